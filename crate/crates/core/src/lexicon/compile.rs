//! Parse-time lexicon: base entries plus type-raised entries generated at
//! compile time, and the `compiled.db` text format.

use std::collections::BTreeMap;

use crate::category::{Category, Slash};
use crate::combinators::type_raise;
use crate::unify::unify_categories;

use super::config::FeatureConfig;
use super::resolve::{LexEntry, Provenance};
use super::LexiconError;

/// `SOURCE DIRECTION TARGET`: raise entries whose category unifies with
/// SOURCE to TARGET/(TARGET\SOURCE) or TARGET\(TARGET/SOURCE).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RaiseRule {
    pub source: Category,
    pub direction: Slash,
    pub target: Category,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RaiseConfig {
    pub rules: Vec<RaiseRule>,
}

impl RaiseConfig {
    /// Subject raising `NP forward S` and object raising `NP backward S`.
    pub fn standard() -> Self {
        let np = Category::atom("NP");
        let s = Category::atom("S");
        RaiseConfig {
            rules: vec![
                RaiseRule {
                    source: np.clone(),
                    direction: Slash::Forward,
                    target: s.clone(),
                },
                RaiseRule {
                    source: np,
                    direction: Slash::Backward,
                    target: s,
                },
            ],
        }
    }

    pub fn parse(text: &str, cfg: &FeatureConfig) -> Result<Self, LexiconError> {
        let mut rules = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Raise { line: i + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [source, direction, target] = fields.as_slice() else {
                return Err(err(format!("expected SOURCE DIRECTION TARGET, got '{line}'")));
            };
            let source = cfg
                .atoms()
                .parse_category(source)
                .map_err(|e| err(format!("source: {e}")))?;
            if !source.is_atomic() {
                return Err(err(format!("source pattern {source} is not atomic")));
            }
            let direction = match *direction {
                "forward" | ">" | "/" => Slash::Forward,
                "backward" | "<" | "\\" => Slash::Backward,
                other => return Err(err(format!("direction must be forward or backward, got '{other}'"))),
            };
            let target = cfg
                .atoms()
                .parse_category(target)
                .map_err(|e| err(format!("target: {e}")))?;
            rules.push(RaiseRule {
                source,
                direction,
                target,
            });
        }
        Ok(RaiseConfig { rules })
    }
}

/// Immutable word → entries map used by the parser.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledLexicon {
    entries: BTreeMap<String, Vec<LexEntry>>,
    features: FeatureConfig,
}

impl CompiledLexicon {
    /// Base entries in, raised entries added. A raised category already
    /// present for the same word is not added again.
    pub fn compile(base: &[LexEntry], raise: &RaiseConfig, features: &FeatureConfig) -> Result<Self, LexiconError> {
        for (k, rule) in raise.rules.iter().enumerate() {
            if !rule.source.is_atomic() {
                return Err(LexiconError::Raise {
                    line: k + 1,
                    message: format!("source pattern {} is not atomic", rule.source),
                });
            }
        }
        let mut entries: BTreeMap<String, Vec<LexEntry>> = BTreeMap::new();
        for e in base.iter().filter(|e| !e.is_raised()) {
            let list = entries.entry(e.word.clone()).or_default();
            if !list.iter().any(|x| x.pos == e.pos && x.category == e.category) {
                list.push(e.clone());
            }
        }
        for list in entries.values_mut() {
            let base_count = list.len();
            for i in 0..base_count {
                for rule in &raise.rules {
                    let e = &list[i];
                    if unify_categories(&rule.source, &e.category).is_err() {
                        continue;
                    }
                    let raised = type_raise(&e.category, &rule.target, rule.direction)
                        .expect("atomic by unification with an atomic pattern");
                    if list.iter().any(|x| x.category == raised) {
                        continue;
                    }
                    let entry = LexEntry {
                        category: raised,
                        source: Provenance::Raised(rule.direction),
                        ..e.clone()
                    };
                    list.push(entry);
                }
            }
        }
        Ok(CompiledLexicon {
            entries,
            features: features.clone(),
        })
    }

    pub fn features(&self) -> &FeatureConfig {
        &self.features
    }

    /// Entries for a surface form, base before raised. Falls back to the
    /// lowercased form when the exact form is absent.
    pub fn lookup(&self, surface: &str) -> &[LexEntry] {
        if let Some(list) = self.entries.get(surface) {
            return list;
        }
        self.entries
            .get(&surface.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.entries.values().flatten()
    }

    pub fn base_entries(&self) -> Vec<LexEntry> {
        self.entries().filter(|e| !e.is_raised()).cloned().collect()
    }

    /// (base, raised) entry counts.
    pub fn counts(&self) -> (usize, usize) {
        let raised = self.entries().filter(|e| e.is_raised()).count();
        (self.entries().count() - raised, raised)
    }

    /// `compiled.db` text: the feature config as `@` lines, then one
    /// `word TAB lemma TAB pos TAB provenance TAB flags TAB category` row per
    /// entry.
    pub fn to_db_string(&self) -> String {
        let mut out = String::new();
        for line in self.features.to_config_string().lines() {
            out.push('@');
            out.push_str(line);
            out.push('\n');
        }
        for e in self.entries() {
            let labels = if e.labels.is_empty() { "-".to_string() } else { e.labels.join(",") };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                e.word, e.lemma, e.pos, e.source, labels, e.category
            ));
        }
        out
    }

    pub fn from_db_str(text: &str) -> Result<Self, LexiconError> {
        let header: String = text
            .lines()
            .filter_map(|l| l.strip_prefix('@'))
            .map(|l| format!("{l}\n"))
            .collect();
        let features = FeatureConfig::parse(&header)?;
        let mut entries: BTreeMap<String, Vec<LexEntry>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.starts_with('@') || line.trim().is_empty() {
                continue;
            }
            let err = |message: String| LexiconError::Compiled { line: i + 1, message };
            let f: Vec<&str> = line.split('\t').collect();
            let [word, lemma, pos, prov, labels, cat] = f.as_slice() else {
                return Err(err(format!("expected 6 fields, got {}", f.len())));
            };
            let source = Provenance::from_tag(prov).ok_or_else(|| err(format!("bad provenance '{prov}'")))?;
            let category = features
                .atoms()
                .parse_category(cat)
                .map_err(|e| err(e.to_string()))?;
            let labels = if *labels == "-" {
                Vec::new()
            } else {
                labels.split(',').map(str::to_string).collect()
            };
            entries.entry(word.to_string()).or_default().push(LexEntry {
                word: word.to_string(),
                lemma: lemma.to_string(),
                pos: pos.to_string(),
                category,
                source,
                labels,
            });
        }
        Ok(CompiledLexicon { entries, features })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(word: &str, cat: &str) -> LexEntry {
        LexEntry {
            word: word.into(),
            lemma: word.into(),
            pos: "PN".into(),
            category: Category::parse(cat).unwrap(),
            source: Provenance::Base,
            labels: Vec::new(),
        }
    }

    #[test]
    fn subject_raising() {
        let base = [entry("Paddington", "NP[num=sg]")];
        let lex = CompiledLexicon::compile(&base, &RaiseConfig::standard(), &FeatureConfig::default()).unwrap();
        let cats: Vec<String> = lex.lookup("Paddington").iter().map(|e| e.category.to_string()).collect();
        assert_eq!(cats, ["NP[num=sg]", "S[#1]/(S[#1]\\NP[num=sg])", "S[#1]\\(S[#1]/NP[num=sg])"]);
        assert_eq!(lex.lookup("Paddington")[1].source, Provenance::Raised(Slash::Forward));
        assert_eq!(lex.counts(), (1, 2));
    }

    #[test]
    fn empty_config_changes_nothing() {
        let base = [entry("Paddington", "NP"), entry("the", "NP/N")];
        let lex = CompiledLexicon::compile(&base, &RaiseConfig::default(), &FeatureConfig::default()).unwrap();
        assert_eq!(lex.base_entries(), base.to_vec());
        assert_eq!(lex.counts(), (2, 0));
    }

    #[test]
    fn idempotent() {
        let base = [entry("Paddington", "NP"), entry("they", "NP[case=nom]"), entry("the", "NP/N")];
        let cfg = FeatureConfig::default();
        let once = CompiledLexicon::compile(&base, &RaiseConfig::standard(), &cfg).unwrap();
        let twice = CompiledLexicon::compile(&once.base_entries(), &RaiseConfig::standard(), &cfg).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn raise_config_parsing() {
        let cfg = FeatureConfig::default();
        let r = RaiseConfig::parse("# raising\nNP forward S\nNP backward S\n", &cfg).unwrap();
        assert_eq!(r, RaiseConfig::standard());
        assert!(matches!(
            RaiseConfig::parse("S\\NP forward S\n", &cfg),
            Err(LexiconError::Raise { line: 1, .. })
        ));
        assert!(RaiseConfig::parse("NP sideways S\n", &cfg).is_err());
        assert!(RaiseConfig::parse("", &cfg).unwrap().rules.is_empty());
    }

    #[test]
    fn lookup_falls_back_to_lowercase() {
        let lex = CompiledLexicon::compile(&[entry("that", "NP")], &RaiseConfig::default(), &FeatureConfig::default()).unwrap();
        assert_eq!(lex.lookup("That").len(), 1);
        assert!(lex.lookup("zebra").is_empty());
    }

    #[test]
    fn db_round_trip() {
        let base = [entry("Paddington", "NP[num=sg]"), entry("the", "NP/N")];
        let lex = CompiledLexicon::compile(&base, &RaiseConfig::standard(), &FeatureConfig::default()).unwrap();
        let text = lex.to_db_string();
        assert!(text.contains("raised>"));
        assert_eq!(CompiledLexicon::from_db_str(&text).unwrap(), lex);
    }
}
