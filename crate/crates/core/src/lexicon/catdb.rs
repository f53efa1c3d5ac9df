//! The category database, indexed by part of speech.
//!
//! ```text
//! V: (S\NP0)/NP1 #INTRANS #NP1caseacc
//!    (NP0\NP1)/NP2 #INTRANSger #NP2caseacc
//! ```
//!
//! A line starting with whitespace continues the previous POS line. Each
//! `#tag` attaches to the nearest preceding category on its own line. Lines
//! starting with `#` in the first column are comments.

use crate::category::Category;

use super::config::{AtomRef, FeatureConfig, TagMeaning};
use super::LexiconError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolvedTag {
    Flag(String),
    Feature {
        target: AtomRef,
        attr: String,
        value: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatClause {
    pub text: String,
    pub category: Category,
    /// Tags as written, without `#`.
    pub tags: Vec<String>,
    pub resolved: Vec<ResolvedTag>,
    pub line: usize,
}

impl CatClause {
    pub fn flags(&self) -> impl Iterator<Item = &str> {
        self.resolved.iter().filter_map(|t| match t {
            ResolvedTag::Flag(f) => Some(f.as_str()),
            ResolvedTag::Feature { .. } => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatDbEntry {
    pub pos: String,
    pub clauses: Vec<CatClause>,
}

pub fn load_cat_db(text: &str, cfg: &FeatureConfig) -> Result<Vec<CatDbEntry>, LexiconError> {
    let mut out: Vec<CatDbEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let continuation = raw.starts_with([' ', '\t']);
        let (body, body_col) = if continuation {
            if out.is_empty() {
                return Err(LexiconError::Cat {
                    line: n,
                    column: 1,
                    message: "continuation line before any POS line".into(),
                });
            }
            (raw, 0)
        } else {
            let (pos, rest) = raw.split_once(':').ok_or_else(|| LexiconError::Cat {
                line: n,
                column: 1,
                message: "expected 'POS: categories'".into(),
            })?;
            let pos = pos.trim();
            if pos.is_empty() || pos.contains(char::is_whitespace) {
                return Err(LexiconError::Cat {
                    line: n,
                    column: 1,
                    message: format!("bad POS '{pos}'"),
                });
            }
            out.push(CatDbEntry {
                pos: pos.to_string(),
                clauses: Vec::new(),
            });
            (rest, pos.len() + 1)
        };
        let entry = out.last_mut().expect("entry pushed above");
        for (col, token) in tokens(body) {
            let column = body_col + col + 1;
            if let Some(tag) = token.strip_prefix('#') {
                let Some(clause) = entry.clauses.last_mut().filter(|c| c.line == n) else {
                    return Err(LexiconError::Cat {
                        line: n,
                        column,
                        message: format!("tag #{tag} before any category"),
                    });
                };
                let resolved = resolve(tag, &clause.category, cfg).map_err(|message| match message {
                    TagProblem::Unknown => LexiconError::UnknownTag {
                        line: n,
                        tag: tag.to_string(),
                    },
                    TagProblem::NoTarget(m) => LexiconError::Cat {
                        line: n,
                        column,
                        message: m,
                    },
                })?;
                clause.tags.push(tag.to_string());
                clause.resolved.push(resolved);
            } else {
                let category = cfg.atoms().parse_category(token).map_err(|e| LexiconError::Cat {
                    line: n,
                    column: column + e.offset,
                    message: e.message,
                })?;
                entry.clauses.push(CatClause {
                    text: token.to_string(),
                    category,
                    tags: Vec::new(),
                    resolved: Vec::new(),
                    line: n,
                });
            }
        }
    }
    merge_by_pos(out)
}

fn merge_by_pos(entries: Vec<CatDbEntry>) -> Result<Vec<CatDbEntry>, LexiconError> {
    let mut out: Vec<CatDbEntry> = Vec::new();
    for e in entries {
        match out.iter_mut().find(|o| o.pos == e.pos) {
            Some(o) => o.clauses.extend(e.clauses),
            None => out.push(e),
        }
    }
    Ok(out)
}

/// Whitespace-separated tokens with their character column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (ci, (bi, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((ci, bi)),
            (true, Some((c0, b0))) => {
                out.push((c0, &line[b0..bi]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c0, b0)) = start {
        out.push((c0, &line[b0..]));
    }
    out
}

enum TagProblem {
    Unknown,
    NoTarget(String),
}

fn resolve(tag: &str, cat: &Category, cfg: &FeatureConfig) -> Result<ResolvedTag, TagProblem> {
    match cfg.resolve_tag(tag).ok_or(TagProblem::Unknown)? {
        TagMeaning::Flag(f) => Ok(ResolvedTag::Flag(f)),
        TagMeaning::Feature { target, attr, value } => {
            if tag_targets(cat, &target).is_empty() {
                return Err(TagProblem::NoTarget(format!(
                    "tag #{tag} names {}{} which is not in {cat}",
                    target.label,
                    target.arg_index.map(|i| i.to_string()).unwrap_or_default()
                )));
            }
            Ok(ResolvedTag::Feature { target, attr, value })
        }
    }
}

/// Atom positions (text order) a tag or route applies to. An indexed
/// reference picks every atom with that label and index; an unindexed one
/// picks the head atom when the label matches.
pub(crate) fn tag_targets(cat: &Category, target: &AtomRef) -> Vec<usize> {
    let atoms = cat.shape.atoms();
    match target.arg_index {
        Some(_) => atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.label == target.label && a.arg_index == target.arg_index)
            .map(|(i, _)| i)
            .collect(),
        None => {
            if cat.head_label() == target.label {
                let head = cat.shape.head();
                atoms
                    .iter()
                    .position(|a| std::ptr::eq(*a, head))
                    .into_iter()
                    .collect()
            } else {
                Vec::new()
            }
        }
    }
}

/// Writes entries back in file syntax, one POS line per entry and one
/// continuation line per further clause.
pub fn write_cat_db(entries: &[CatDbEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let indent = " ".repeat(e.pos.len() + 2);
        for (k, c) in e.clauses.iter().enumerate() {
            if k == 0 {
                out.push_str(&format!("{}: ", e.pos));
            } else {
                out.push_str(&indent);
            }
            out.push_str(&c.category.to_string());
            for t in &c.tags {
                out.push_str(&format!(" #{t}"));
            }
            out.push('\n');
        }
    }
    out
}
