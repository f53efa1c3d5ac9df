//! Derivation output: horizontal-rule ASCII trees, bracketed text and JSON.

use ccg_core::{Category, Derivation, RuleName};
use serde_json::{json, Value};

const GAP: usize = 2;

/// One drawable step: the leaves it covers, its level above the words, the
/// rule symbol and the category written under the rule.
struct Step {
    first: usize,
    last: usize,
    level: usize,
    symbol: &'static str,
    category: String,
}

/// The category a raised leaf was raised from: `X` in `T/(T\X)`.
fn unraised(cat: &Category) -> Option<Category> {
    cat.argument()?.argument()
}

struct Layout {
    words: Vec<String>,
    lexical: Vec<String>,
    steps: Vec<Step>,
}

impl Layout {
    fn new(d: &Derivation, tokens: &[String]) -> Self {
        let mut layout = Layout {
            words: Vec::new(),
            lexical: Vec::new(),
            steps: Vec::new(),
        };
        layout.walk(d, tokens);
        layout
    }

    /// Returns (first leaf, last leaf, level).
    fn walk(&mut self, d: &Derivation, tokens: &[String]) -> (usize, usize, usize) {
        match d {
            Derivation::Leaf { token, entry } => {
                let i = self.words.len();
                self.words.push(tokens.get(*token).cloned().unwrap_or_else(|| entry.word.clone()));
                let rule = d.rule();
                match (rule, unraised(&entry.category)) {
                    (RuleName::FwdTypeRaise | RuleName::BwdTypeRaise, Some(base)) => {
                        self.lexical.push(base.to_string());
                        self.steps.push(Step {
                            first: i,
                            last: i,
                            level: 1,
                            symbol: rule.symbol(),
                            category: entry.category.to_string(),
                        });
                        (i, i, 1)
                    }
                    _ => {
                        self.lexical.push(entry.category.to_string());
                        (i, i, 0)
                    }
                }
            }
            Derivation::Node { rule, category, children } => {
                let spans: Vec<(usize, usize, usize)> = children.iter().map(|c| self.walk(c, tokens)).collect();
                let first = spans.first().map_or(0, |s| s.0);
                let last = spans.last().map_or(0, |s| s.1);
                let level = spans.iter().map(|s| s.2).max().unwrap_or(0) + 1;
                self.steps.push(Step {
                    first,
                    last,
                    level,
                    symbol: rule.symbol(),
                    category: category.to_string(),
                });
                (first, last, level)
            }
        }
    }

    fn widths(&self) -> Vec<usize> {
        let mut w: Vec<usize> = self
            .words
            .iter()
            .zip(&self.lexical)
            .map(|(a, b)| a.len().max(b.len()) + GAP)
            .collect();
        let mut order: Vec<&Step> = self.steps.iter().collect();
        order.sort_by_key(|s| s.level);
        for s in order {
            let need = (s.category.len() + GAP).max(s.symbol.len() + 1 + GAP);
            let have: usize = w[s.first..=s.last].iter().sum();
            if need > have {
                w[s.last] += need - have;
            }
        }
        w
    }

    fn render(&self) -> String {
        let widths = self.widths();
        let starts: Vec<usize> = widths
            .iter()
            .scan(0, |x, w| {
                let s = *x;
                *x += w;
                Some(s)
            })
            .collect();
        let total: usize = widths.iter().sum();
        let mut lines = Vec::new();
        let row = |cells: &[(usize, String)]| {
            let mut line = vec![' '; total];
            for (x, text) in cells {
                for (k, ch) in text.chars().enumerate() {
                    if x + k < total {
                        line[x + k] = ch;
                    }
                }
            }
            line.into_iter().collect::<String>().trim_end().to_string()
        };
        let cells = |texts: &[String]| -> Vec<(usize, String)> {
            texts.iter().enumerate().map(|(i, t)| (starts[i], t.clone())).collect()
        };
        lines.push(row(&cells(&self.words)));
        lines.push(row(&cells(&self.lexical)));
        let top = self.steps.iter().map(|s| s.level).max().unwrap_or(0);
        for level in 1..=top {
            let here: Vec<&Step> = self.steps.iter().filter(|s| s.level == level).collect();
            let rules: Vec<(usize, String)> = here
                .iter()
                .map(|s| {
                    let span = starts[s.last] + widths[s.last] - starts[s.first] - GAP;
                    let dashes = span.saturating_sub(s.symbol.len()).max(1);
                    (starts[s.first], format!("{}{}", "-".repeat(dashes), s.symbol))
                })
                .collect();
            let cats: Vec<(usize, String)> = here.iter().map(|s| (starts[s.first], s.category.clone())).collect();
            lines.push(row(&rules));
            lines.push(row(&cats));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

/// Horizontal-rule rendering: words, lexical categories, then one rule line
/// and one category line per level, annotated with the rule symbol.
pub fn ascii(d: &Derivation, tokens: &[String]) -> String {
    Layout::new(d, tokens).render()
}

fn tree_json(d: &Derivation, tokens: &[String]) -> Value {
    match d {
        Derivation::Leaf { token, entry } => json!({
            "token": token,
            "word": tokens.get(*token).cloned().unwrap_or_else(|| entry.word.clone()),
            "category": entry.category.to_string(),
            "rule": d.rule().name(),
            "pos": entry.pos,
        }),
        Derivation::Node { rule, category, children } => json!({
            "category": category.to_string(),
            "rule": rule.name(),
            "children": children.iter().map(|c| tree_json(c, tokens)).collect::<Vec<_>>(),
        }),
    }
}

/// One JSON object per derivation.
pub fn derivation_json(sentence: &str, index: usize, d: &Derivation, tokens: &[String]) -> Value {
    json!({
        "sentence": sentence,
        "derivation": index,
        "category": d.category().to_string(),
        "bracketed": d.bracketed(),
        "tree": tree_json(d, tokens),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ccg_core::{LexEntry, Provenance, Slash};

    fn leaf(token: usize, word: &str, cat: &str, source: Provenance) -> Derivation {
        Derivation::Leaf {
            token,
            entry: LexEntry {
                word: word.into(),
                lemma: word.into(),
                pos: "X".into(),
                category: Category::parse(cat).unwrap(),
                source,
                labels: Vec::new(),
            },
        }
    }

    fn node(rule: RuleName, cat: &str, children: Vec<Derivation>) -> Derivation {
        Derivation::Node {
            rule,
            category: Category::parse(cat).unwrap(),
            children,
        }
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn application_tree() {
        let d = node(
            RuleName::BwdApp,
            "S",
            vec![
                leaf(0, "Betsy", "NP", Provenance::Base),
                node(
                    RuleName::FwdApp,
                    "S\\NP",
                    vec![
                        leaf(1, "loves", "(S\\NP)/NP", Provenance::Base),
                        leaf(2, "Paddington", "NP", Provenance::Base),
                    ],
                ),
            ],
        );
        let want = "\
Betsy  loves      Paddington
NP     (S\\NP)/NP  NP
       -------------------->
       S\\NP
---------------------------<
S
";
        assert_eq!(ascii(&d, &toks("Betsy loves Paddington")), want);
    }

    #[test]
    fn raised_leaves_show_the_raising_step() {
        let d = node(
            RuleName::FwdComp,
            "S/NP",
            vec![
                leaf(0, "Betsy", "S/(S\\NP)", Provenance::Raised(Slash::Forward)),
                leaf(1, "hates", "(S\\NP)/NP", Provenance::Base),
            ],
        );
        let out = ascii(&d, &toks("Betsy hates"));
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[1], "NP        (S\\NP)/NP");
        assert_eq!(lines[2], "------>T");
        assert_eq!(lines[3], "S/(S\\NP)");
        assert!(lines[4].ends_with(">B"));
        assert_eq!(lines[5], "S/NP");
    }

    #[test]
    fn json_shape() {
        let d = node(
            RuleName::BwdApp,
            "S",
            vec![leaf(0, "Betsy", "NP", Provenance::Base), leaf(1, "sleeps", "S\\NP", Provenance::Base)],
        );
        let v = derivation_json("Betsy sleeps", 0, &d, &toks("Betsy sleeps"));
        assert_eq!(v["category"], "S");
        assert_eq!(v["bracketed"], "(< S Betsy:=NP sleeps:=S\\NP)");
        assert_eq!(v["tree"]["children"][1]["word"], "sleeps");
        assert_eq!(v["tree"]["rule"], "BwdApp");
    }
}
