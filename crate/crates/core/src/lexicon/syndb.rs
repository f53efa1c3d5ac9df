//! The syntactic database: which categories each index word takes.
//!
//! ```text
//! # comment
//! INDEX: park/2
//! POS: V
//! CAT: (S\NP0)/NP1 (NP0\NP1)/NP2
//! ```
//!
//! Records are separated by blank lines. `POS:` holds either one tag for
//! every category or one tag per category. A category may be followed by
//! `#FLAG` items that restrict it to category-database clauses carrying
//! those flags.

use crate::category::{AtomInventory, Category};

use super::LexiconError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynCat {
    pub pos: String,
    pub category: Category,
    /// Clause flags this pairing requires.
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynEntry {
    pub index_word: String,
    pub entry_count: usize,
    pub cats: Vec<SynCat>,
    pub line: usize,
}

#[derive(Default)]
struct Draft {
    start: usize,
    index: Option<(String, usize)>,
    pos: Option<Vec<String>>,
    cat: Option<(usize, String)>,
}

pub fn load_syn_db(text: &str, atoms: &AtomInventory) -> Result<Vec<SynEntry>, LexiconError> {
    let mut out = Vec::new();
    let mut draft = Draft::default();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            finish(&mut draft, atoms, &mut out)?;
            continue;
        }
        if draft.index.is_none() && draft.pos.is_none() && draft.cat.is_none() {
            draft.start = n;
        }
        let err = |message: String| LexiconError::Syn { line: n, message };
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| err(format!("expected 'KEY: value', got '{line}'")))?;
        let value = value.trim();
        match key.trim() {
            "INDEX" => {
                if draft.index.is_some() {
                    return Err(err("second INDEX line in one record".into()));
                }
                let (word, count) = value
                    .rsplit_once('/')
                    .ok_or_else(|| err(format!("INDEX needs word/count, got '{value}'")))?;
                let count: usize = count
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad entry count '{count}'")))?;
                if word.trim().is_empty() {
                    return Err(err("empty index word".into()));
                }
                draft.index = Some((word.trim().to_string(), count));
            }
            "POS" => {
                let tags: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                if tags.is_empty() {
                    return Err(err("empty POS line".into()));
                }
                draft.pos = Some(tags);
            }
            "CAT" => draft.cat = Some((n, value.to_string())),
            other => return Err(err(format!("unknown key '{other}'"))),
        }
    }
    finish(&mut draft, atoms, &mut out)?;
    Ok(out)
}

fn finish(draft: &mut Draft, atoms: &AtomInventory, out: &mut Vec<SynEntry>) -> Result<(), LexiconError> {
    let d = std::mem::take(draft);
    if d.index.is_none() && d.pos.is_none() && d.cat.is_none() {
        return Ok(());
    }
    let err = |message: String| LexiconError::Syn { line: d.start, message };
    let (word, count) = d.index.ok_or_else(|| err("record without INDEX".into()))?;
    let pos = d.pos.ok_or_else(|| err(format!("record '{word}' without POS")))?;
    let (cat_line, cat_text) = d.cat.ok_or_else(|| err(format!("record '{word}' without CAT")))?;

    let mut items: Vec<(String, Vec<String>)> = Vec::new();
    for token in cat_text.split_whitespace() {
        if let Some(flag) = token.strip_prefix('#') {
            match items.last_mut() {
                Some((_, flags)) => flags.push(flag.to_string()),
                None => {
                    return Err(LexiconError::Syn {
                        line: cat_line,
                        message: format!("flag #{flag} before any category"),
                    })
                }
            }
        } else {
            items.push((token.to_string(), Vec::new()));
        }
    }
    if items.len() != count {
        return Err(LexiconError::CountMismatch {
            word,
            declared: count,
            found: items.len(),
        });
    }
    if pos.len() != 1 && pos.len() != items.len() {
        return Err(err(format!(
            "record '{word}' has {} POS tags for {} categories",
            pos.len(),
            items.len()
        )));
    }
    let mut cats = Vec::with_capacity(items.len());
    for (k, (text, flags)) in items.into_iter().enumerate() {
        let category = atoms.parse_category(&text).map_err(|e| LexiconError::Syn {
            line: cat_line,
            message: format!("category '{text}': {e}"),
        })?;
        let pos = if pos.len() == 1 { pos[0].clone() } else { pos[k].clone() };
        cats.push(SynCat { pos, category, flags });
    }
    out.push(SynEntry {
        index_word: word,
        entry_count: count,
        cats,
        line: d.start,
    });
    Ok(())
}

/// Writes entries back in file syntax.
pub fn write_syn_db(entries: &[SynEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!("INDEX: {}/{}\n", e.index_word, e.entry_count));
        let tags: Vec<&str> = e.cats.iter().map(|c| c.pos.as_str()).collect();
        if tags.iter().all(|t| *t == tags[0]) {
            out.push_str(&format!("POS: {}\n", tags[0]));
        } else {
            out.push_str(&format!("POS: {}\n", tags.join(" ")));
        }
        let cats: Vec<String> = e
            .cats
            .iter()
            .map(|c| {
                let mut s = c.category.to_string();
                for f in &c.flags {
                    s.push_str(&format!(" #{f}"));
                }
                s
            })
            .collect();
        out.push_str(&format!("CAT: {}\n\n", cats.join(" ")));
    }
    out
}
