//! Exhaustive reference parser for testing the chart.
//!
//! Works on immutable categories with the standalone combinators, tries
//! every bracketing and every rule, and keeps no back pointers: each span
//! maps result categories to how many derivations reach them.

use std::collections::HashMap;

use crate::category::{Category, RuleName};
use crate::combinators::{apply_all, coordinate, RuleSet};
use crate::lexicon::CompiledLexicon;

use super::raise_rule;

pub const MAX_BRUTE_TOKENS: usize = 8;
pub const MAX_BRUTE_ENTRIES: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BruteForceError {
    #[error("{0} tokens exceeds the limit of {MAX_BRUTE_TOKENS}")]
    TooManyTokens(usize),
    #[error("token {index} '{token}' has {count} entries, limit {MAX_BRUTE_ENTRIES}")]
    TooManyEntries { index: usize, token: String, count: usize },
}

#[derive(Clone, Debug)]
struct Cell {
    /// (waiting for a left conjunct, category, derivations)
    results: Vec<(bool, Category, u128)>,
    index: HashMap<(bool, String), usize>,
}

impl Cell {
    fn new() -> Self {
        Cell {
            results: Vec::new(),
            index: HashMap::new(),
        }
    }

    fn add(&mut self, partial: bool, cat: Category, count: u128) {
        let key = (partial, cat.canonical_key());
        match self.index.get(&key) {
            Some(&i) => self.results[i].2 = self.results[i].2.saturating_add(count),
            None => {
                self.index.insert(key, self.results.len());
                self.results.push((partial, cat, count));
            }
        }
    }
}

fn is_conj(c: &Category) -> bool {
    c.label() == Some("Conj")
}

/// Every complete category over the whole input with its derivation count,
/// sorted by canonical text. No filters apply; raised entries are used when
/// their raising rule is enabled.
pub fn brute_force_parse(
    tokens: &[String],
    lex: &CompiledLexicon,
    rules: &RuleSet,
) -> Result<Vec<(Category, u128)>, BruteForceError> {
    let n = tokens.len();
    if n > MAX_BRUTE_TOKENS {
        return Err(BruteForceError::TooManyTokens(n));
    }
    let mut memo: HashMap<(usize, usize), Cell> = HashMap::new();
    for (i, t) in tokens.iter().enumerate() {
        let entries: Vec<_> = lex
            .lookup(t)
            .iter()
            .filter(|e| raise_rule(e).is_none_or(|r| rules.is_enabled(r)))
            .collect();
        if entries.len() > MAX_BRUTE_ENTRIES {
            return Err(BruteForceError::TooManyEntries {
                index: i,
                token: t.clone(),
                count: entries.len(),
            });
        }
        let mut cell = Cell::new();
        for e in entries {
            cell.add(false, e.category.clone(), 1);
        }
        memo.insert((i, i + 1), cell);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let coord = rules.is_enabled(RuleName::Coord);
    for width in 2..=n {
        for start in 0..=n - width {
            let end = start + width;
            let mut cell = Cell::new();
            for split in start + 1..end {
                let left = &memo[&(start, split)];
                let right = &memo[&(split, end)];
                for (lp, l, lc) in &left.results {
                    for (rp, r, rc) in &right.results {
                        let count = lc.saturating_mul(*rc);
                        match (lp, rp) {
                            (false, false) => {
                                for app in apply_all(l, r, rules) {
                                    cell.add(false, app.result, count);
                                }
                                if coord && is_conj(l) && !is_conj(r) {
                                    cell.add(true, r.clone(), count);
                                }
                            }
                            (false, true) if coord => {
                                if let Some(c) = coordinate(l, r) {
                                    cell.add(false, c, count);
                                }
                            }
                            _ => {}
                        }
                    }
                }
            }
            memo.insert((start, end), cell);
        }
    }
    let mut out: Vec<(Category, u128)> = memo
        .remove(&(0, n))
        .map(|c| c.results)
        .unwrap_or_default()
        .into_iter()
        .filter(|(p, _, _)| !p)
        .map(|(_, c, k)| (c, k))
        .collect();
    out.sort_by_key(|(c, _)| c.canonical_key());
    Ok(out)
}
