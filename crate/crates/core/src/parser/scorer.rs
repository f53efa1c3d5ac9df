//! Category scoring for the n-best cut.

use crate::category::{AtomInventory, Category};
use crate::lexicon::LexEntry;

/// Scores a lexical entry for a token in context. Higher is better; scores
/// are non-negative.
pub trait CategoryScorer: Send + Sync {
    fn score(&self, tokens: &[String], index: usize, entry: &LexEntry) -> f64;
}

/// Every entry scores 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct UniformScorer;

impl CategoryScorer for UniformScorer {
    fn score(&self, _: &[String], _: usize, _: &LexEntry) -> f64 {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("frequency table line {line}: {message}")]
pub struct ScorerError {
    pub line: usize,
    pub message: String,
}

/// Relative frequency of (word, category skeleton) pairs. Words absent from
/// the table score uniformly.
#[derive(Clone, Debug, Default)]
pub struct FrequencyScorer {
    rows: Vec<(String, Category, f64)>,
}

impl FrequencyScorer {
    /// `word TAB category TAB count` per line; `#` lines are comments.
    pub fn parse(text: &str, atoms: &AtomInventory) -> Result<Self, ScorerError> {
        let mut rows = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ScorerError { line: i + 1, message };
            let f: Vec<&str> = line.split('\t').collect();
            let [word, cat, count] = f.as_slice() else {
                return Err(err(format!("expected 3 tab-separated fields, got {}", f.len())));
            };
            let cat = atoms.parse_category(cat.trim()).map_err(|e| err(e.to_string()))?;
            let count: f64 = count
                .trim()
                .parse()
                .map_err(|_| err(format!("bad count '{count}'")))?;
            if count.is_nan() || count < 0.0 {
                return Err(err(format!("negative count {count}")));
            }
            rows.push((word.trim().to_lowercase(), cat, count));
        }
        Ok(FrequencyScorer { rows })
    }

    fn total(&self, word: &str) -> Option<f64> {
        let mut seen = false;
        let total = self
            .rows
            .iter()
            .filter(|(w, _, _)| w == word)
            .inspect(|_| seen = true)
            .map(|(_, _, c)| c)
            .sum();
        seen.then_some(total)
    }
}

impl CategoryScorer for FrequencyScorer {
    fn score(&self, tokens: &[String], index: usize, entry: &LexEntry) -> f64 {
        let word = tokens[index].to_lowercase();
        match self.total(&word) {
            None => 1.0,
            Some(total) if total <= 0.0 => 0.0,
            Some(total) => {
                let count: f64 = self
                    .rows
                    .iter()
                    .filter(|(w, c, _)| *w == word && c.skeleton_eq(&entry.category))
                    .map(|(_, _, n)| n)
                    .sum();
                count / total
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Provenance;

    fn entry(cat: &str) -> LexEntry {
        LexEntry {
            word: "eats".into(),
            lemma: "eat".into(),
            pos: "V".into(),
            category: Category::parse(cat).unwrap(),
            source: Provenance::Base,
            labels: Vec::new(),
        }
    }

    #[test]
    fn relative_frequency_by_skeleton() {
        let s = FrequencyScorer::parse("# w c n\neats\t(S\\NP)/NP\t9\neats\tS\\NP\t1\n", &AtomInventory::default()).unwrap();
        let toks = vec!["Eats".to_string(), "zebra".to_string()];
        assert!((s.score(&toks, 0, &entry("(S[bar=-]\\NP[case=nom])/NP")) - 0.9).abs() < 1e-12);
        assert!((s.score(&toks, 0, &entry("S\\NP")) - 0.1).abs() < 1e-12);
        assert_eq!(s.score(&toks, 0, &entry("NP")), 0.0);
        assert_eq!(s.score(&toks, 1, &entry("NP")), 1.0);
    }

    #[test]
    fn bad_rows() {
        let atoms = AtomInventory::default();
        assert_eq!(FrequencyScorer::parse("a\tNP\n", &atoms).unwrap_err().line, 1);
        assert!(FrequencyScorer::parse("a\tNP\t-1\n", &atoms).is_err());
        assert!(FrequencyScorer::parse("a\tNP/\t1\n", &atoms).is_err());
    }
}
