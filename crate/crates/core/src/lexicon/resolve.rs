//! Word → fully featured categories, merging the three feature sources.

use std::fmt;

use crate::category::{Category, Slash};
use crate::features::FeatureStructure;
use crate::unify::{install_features, unify_categories};

use super::catdb::{tag_targets, CatClause, CatDbEntry, ResolvedTag};
use super::config::{AtomRef, FeatureConfig};
use super::morph::MorphEntry;
use super::syndb::{SynCat, SynEntry};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Base,
    /// Generated by type-raising at compile time.
    Raised(Slash),
}

impl Provenance {
    pub fn is_raised(self) -> bool {
        matches!(self, Provenance::Raised(_))
    }

    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Base => "base",
            Provenance::Raised(Slash::Forward) => "raised>",
            Provenance::Raised(Slash::Backward) => "raised<",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "base" => Some(Provenance::Base),
            "raised>" => Some(Provenance::Raised(Slash::Forward)),
            "raised<" => Some(Provenance::Raised(Slash::Backward)),
            _ => None,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub word: String,
    pub lemma: String,
    pub pos: String,
    pub category: Category,
    pub source: Provenance,
    /// Clause flags of the category-database clause used.
    pub labels: Vec<String>,
}

impl LexEntry {
    pub fn is_raised(&self) -> bool {
        self.source.is_raised()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub word: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.word, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Resolution {
    pub entries: Vec<LexEntry>,
    pub diagnostics: Vec<Diagnostic>,
    /// No syntactic-database record covers the word.
    pub unknown: bool,
}

struct Analysis<'m> {
    lemma: &'m str,
    pos: Option<&'m str>,
    features: &'m [(String, String)],
}

/// Resolves a surface form. For every (POS, category) pairing of its index
/// word, installs tree-level tags, then the syntactic database's own
/// features, then morphology. Pairings whose sources clash are dropped with
/// a diagnostic.
pub fn resolve(
    word: &str,
    syn: &[SynEntry],
    catdb: &[CatDbEntry],
    morph: &[MorphEntry],
    cfg: &FeatureConfig,
) -> Resolution {
    let mut res = Resolution::default();
    let mut analyses: Vec<Analysis> = morph
        .iter()
        .filter(|m| m.surface == word)
        .map(|m| Analysis {
            lemma: &m.lemma,
            pos: Some(&m.pos),
            features: &m.features,
        })
        .collect();
    if analyses.is_empty() {
        analyses.push(Analysis {
            lemma: word,
            pos: None,
            features: &[],
        });
    }
    let mut any_record = false;
    for a in &analyses {
        for entry in syn.iter().filter(|e| e.index_word == a.lemma) {
            any_record = true;
            for sc in entry.cats.iter().filter(|c| a.pos.is_none_or(|p| p == c.pos)) {
                resolve_pairing(word, a, sc, catdb, cfg, &mut res);
            }
        }
    }
    res.unknown = !any_record;
    if res.unknown {
        res.diagnostics.push(Diagnostic {
            word: word.to_string(),
            message: "no syntactic-database record".into(),
        });
    }
    res
}

fn resolve_pairing(
    word: &str,
    a: &Analysis,
    sc: &SynCat,
    catdb: &[CatDbEntry],
    cfg: &FeatureConfig,
    res: &mut Resolution,
) {
    let diag = |res: &mut Resolution, message: String| {
        res.diagnostics.push(Diagnostic {
            word: word.to_string(),
            message,
        })
    };
    let clauses: Vec<&CatClause> = catdb
        .iter()
        .filter(|e| e.pos == sc.pos)
        .flat_map(|e| e.clauses.iter())
        .filter(|c| clause_matches(c, sc))
        .collect();
    if clauses.is_empty() {
        diag(
            res,
            format!("{} {} has no matching category-database clause", sc.pos, sc.category),
        );
        return;
    }
    for clause in clauses {
        match build(a, sc, clause, cfg) {
            Ok(category) => {
                let entry = LexEntry {
                    word: word.to_string(),
                    lemma: a.lemma.to_string(),
                    pos: sc.pos.clone(),
                    category,
                    source: Provenance::Base,
                    labels: clause.flags().map(str::to_string).collect(),
                };
                if !res
                    .entries
                    .iter()
                    .any(|e| e.pos == entry.pos && e.category == entry.category)
                {
                    res.entries.push(entry);
                }
            }
            Err(why) => diag(res, format!("{} {} dropped: {why}", sc.pos, sc.category)),
        }
    }
}

/// Same skeleton, compatible indices, and every flag the pairing asks for.
fn clause_matches(clause: &CatClause, sc: &SynCat) -> bool {
    if !clause.category.skeleton_eq(&sc.category) {
        return false;
    }
    let indices_ok = clause
        .category
        .shape
        .atoms()
        .iter()
        .zip(sc.category.shape.atoms())
        .all(|(c, s)| s.arg_index.is_none() || s.arg_index == c.arg_index);
    indices_ok && sc.flags.iter().all(|f| clause.flags().any(|g| g == f))
}

fn set_on(cat: &Category, target: &AtomRef, attr: &str, value: &str) -> Result<Category, String> {
    let mut positions = tag_targets(cat, target);
    if positions.is_empty() {
        positions.push(0);
    }
    let fs = FeatureStructure::from_pairs([(attr, value)]);
    install_features(cat, &positions, &fs).map_err(|c| format!("{attr}={value} {c}"))
}

fn build(a: &Analysis, sc: &SynCat, clause: &CatClause, cfg: &FeatureConfig) -> Result<Category, String> {
    let mut cat = clause.category.clone();
    for tag in &clause.resolved {
        if let ResolvedTag::Feature { target, attr, value } = tag {
            cat = set_on(&cat, target, attr, value).map_err(|e| format!("tree feature {e}"))?;
        }
    }
    cat = unify_categories(&cat, &sc.category).map_err(|e| format!("lexical {e}"))?;
    let head = AtomRef {
        label: cat.head_label().to_string(),
        arg_index: None,
    };
    for (attr, value) in a.features {
        let target = match cfg.route(&sc.pos, attr) {
            // A route to an atom this category lacks does not apply.
            Some(r) if tag_targets(&cat, r).is_empty() => continue,
            Some(r) => r,
            None => &head,
        };
        cat = set_on(&cat, target, attr, value).map_err(|e| format!("morphological {e}"))?;
    }
    Ok(cat)
}
