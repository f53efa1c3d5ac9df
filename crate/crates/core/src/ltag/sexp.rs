//! Minimal s-expression reader with source positions. `;` starts a comment.

use super::ConvertError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Sexp {
    Atom { text: String, line: usize, col: usize },
    List { items: Vec<Sexp>, line: usize, col: usize },
}

impl Sexp {
    pub fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Atom { line, col, .. } | Sexp::List { line, col, .. } => (*line, *col),
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Atom { .. } => None,
        }
    }
}

pub(crate) fn parse_all(text: &str) -> Result<Vec<Sexp>, ConvertError> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut top = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let code = raw.split(';').next().unwrap_or("");
        let chars: Vec<char> = code.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let col = i + 1;
            match chars[i] {
                c if c.is_whitespace() => i += 1,
                '(' => {
                    stack.push((Vec::new(), line, col));
                    i += 1;
                }
                ')' => {
                    let (items, l, c) = stack.pop().ok_or(ConvertError::Syntax {
                        line,
                        col,
                        message: "unbalanced ')'".into(),
                    })?;
                    let node = Sexp::List { items, line: l, col: c };
                    match stack.last_mut() {
                        Some(parent) => parent.0.push(node),
                        None => top.push(node),
                    }
                    i += 1;
                }
                _ => {
                    let start = i;
                    while i < chars.len() && !chars[i].is_whitespace() && chars[i] != '(' && chars[i] != ')' {
                        i += 1;
                    }
                    let node = Sexp::Atom {
                        text: chars[start..i].iter().collect(),
                        line,
                        col,
                    };
                    match stack.last_mut() {
                        Some(parent) => parent.0.push(node),
                        None => {
                            return Err(ConvertError::Syntax {
                                line,
                                col,
                                message: "bare symbol outside a list".into(),
                            })
                        }
                    }
                }
            }
        }
    }
    if let Some((_, line, col)) = stack.pop() {
        return Err(ConvertError::Syntax {
            line,
            col,
            message: "unclosed '('".into(),
        });
    }
    Ok(top)
}
