//! Lexicon databases and their compilation.
//!
//! A lexicon directory holds five files:
//!
//! | file | content |
//! |---|---|
//! | `features.cfg` | feature inventory, flags, atoms, morphology routes |
//! | `syn.db` | index word → POS and categories |
//! | `cat.db` | POS → category clauses with `#tags` |
//! | `morph.db` | surface → lemma, POS, features |
//! | `raise.cfg` | type-raising rules applied at compile time |

mod catdb;
mod compile;
mod config;
mod morph;
mod resolve;
mod syndb;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

pub use catdb::{load_cat_db, write_cat_db, CatClause, CatDbEntry, ResolvedTag};
pub(crate) use catdb::tag_targets;
pub use compile::{CompiledLexicon, RaiseConfig, RaiseRule};
pub use config::{AtomRef, FeatureConfig, TagMeaning};
pub use morph::{load_morph_db, MorphEntry};
pub use resolve::{resolve, Diagnostic, LexEntry, Provenance, Resolution};
pub use syndb::{load_syn_db, write_syn_db, SynCat, SynEntry};

pub const FILES: [&str; 5] = ["features.cfg", "syn.db", "cat.db", "morph.db", "raise.cfg"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {inner}")]
    InFile { path: PathBuf, inner: Box<LexiconError> },
    #[error("line {line}: {message}")]
    Syn { line: usize, message: String },
    #[error("record '{word}' declares {declared} entries but lists {found}")]
    CountMismatch { word: String, declared: usize, found: usize },
    #[error("line {line}, column {column}: {message}")]
    Cat { line: usize, column: usize, message: String },
    #[error("line {line}: unknown tag #{tag}")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: {message}")]
    Morph { line: usize, message: String },
    #[error("line {line}: {message}")]
    Features { line: usize, message: String },
    #[error("line {line}: {message}")]
    Raise { line: usize, message: String },
    #[error("line {line}: {message}")]
    Compiled { line: usize, message: String },
}

impl LexiconError {
    fn in_file(self, path: &Path) -> Self {
        LexiconError::InFile {
            path: path.to_path_buf(),
            inner: Box::new(self),
        }
    }
}

/// The working (pre-compile) lexicon.
#[derive(Clone, Debug)]
pub struct Lexicon {
    pub features: FeatureConfig,
    pub syn: Vec<SynEntry>,
    pub cat: Vec<CatDbEntry>,
    pub morph: Vec<MorphEntry>,
    pub raise: RaiseConfig,
}

/// Raw file contents of a lexicon directory.
#[derive(Clone, Debug, Default)]
pub struct LexiconSources {
    pub features: String,
    pub syn: String,
    pub cat: String,
    pub morph: String,
    pub raise: String,
}

impl LexiconSources {
    pub fn read_dir(dir: &Path) -> Result<Self, LexiconError> {
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| LexiconError::Io {
                path,
                message: e.to_string(),
            })
        };
        Ok(LexiconSources {
            features: read("features.cfg")?,
            syn: read("syn.db")?,
            cat: read("cat.db")?,
            morph: read("morph.db")?,
            raise: read("raise.cfg")?,
        })
    }
}

impl Lexicon {
    pub fn load_dir(dir: &Path) -> Result<Self, LexiconError> {
        let src = LexiconSources::read_dir(dir)?;
        Self::from_sources_in(&src, Some(dir))
    }

    pub fn from_sources(src: &LexiconSources) -> Result<Self, LexiconError> {
        Self::from_sources_in(src, None)
    }

    fn from_sources_in(src: &LexiconSources, dir: Option<&Path>) -> Result<Self, LexiconError> {
        let tag = |name: &'static str| {
            move |e: LexiconError| match dir {
                Some(d) => e.in_file(&d.join(name)),
                None => e.in_file(Path::new(name)),
            }
        };
        let features = FeatureConfig::parse(&src.features).map_err(tag("features.cfg"))?;
        let syn = load_syn_db(&src.syn, features.atoms()).map_err(tag("syn.db"))?;
        let cat = load_cat_db(&src.cat, &features).map_err(tag("cat.db"))?;
        let morph = load_morph_db(&src.morph, &features).map_err(tag("morph.db"))?;
        let raise = RaiseConfig::parse(&src.raise, &features).map_err(tag("raise.cfg"))?;
        Ok(Lexicon {
            features,
            syn,
            cat,
            morph,
            raise,
        })
    }

    /// Every surface the lexicon can resolve: morphology surfaces, plus
    /// index words that no morphology row lists as a lemma.
    pub fn surfaces(&self) -> Vec<String> {
        let lemmas: BTreeSet<&str> = self.morph.iter().map(|m| m.lemma.as_str()).collect();
        let mut out: BTreeSet<String> = self.morph.iter().map(|m| m.surface.clone()).collect();
        for e in &self.syn {
            if !lemmas.contains(e.index_word.as_str()) {
                out.insert(e.index_word.clone());
            }
        }
        out.into_iter().collect()
    }

    pub fn resolve(&self, word: &str) -> Resolution {
        resolve(word, &self.syn, &self.cat, &self.morph, &self.features)
    }

    /// Resolved base entries for every surface, with all diagnostics.
    pub fn base_entries(&self) -> (Vec<LexEntry>, Vec<Diagnostic>) {
        let mut entries = Vec::new();
        let mut diags = Vec::new();
        for s in self.surfaces() {
            let r = self.resolve(&s);
            entries.extend(r.entries);
            diags.extend(r.diagnostics);
        }
        (entries, diags)
    }

    pub fn compile(&self) -> Result<(CompiledLexicon, Vec<Diagnostic>), LexiconError> {
        self.compile_with(&self.raise)
    }

    pub fn compile_with(&self, raise: &RaiseConfig) -> Result<(CompiledLexicon, Vec<Diagnostic>), LexiconError> {
        let (base, diags) = self.base_entries();
        Ok((CompiledLexicon::compile(&base, raise, &self.features)?, diags))
    }

    /// All category texts that appear in the working files.
    pub fn category_texts(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .cat
            .iter()
            .flat_map(|e| e.clauses.iter().map(|c| c.text.clone()))
            .collect();
        out.extend(self.syn.iter().flat_map(|e| e.cats.iter().map(|c| c.category.to_string())));
        out
    }
}
