//! Combinatory categorial grammar toolkit: feature unification, combinators,
//! lexicon compilation, tree conversion and a chart parser.

pub mod category;
pub mod combinators;
pub mod features;
pub mod lexicon;
pub mod ltag;
pub mod parser;
mod syntax;
pub mod unify;

pub use category::{Atom, AtomInventory, Category, RuleName, Slash, UnknownRule};
pub use features::{FeatureGraph, FeatureStructure, FsNode, NodeIdx};
pub use syntax::SyntaxError;
pub use unify::{unify, unify_categories, CategoryMismatch, Clash, ClashKind, UnifyContext};
pub use combinators::{
    apply_all, backward_apply, backward_compose, backward_cross_compose, coordinate, forward_apply,
    forward_compose, type_raise, RuleApplication, RuleSet, RuleSetError,
};
pub use lexicon::{CompiledLexicon, LexEntry, Lexicon, LexiconError, Provenance};
pub use ltag::{parse_tree_file, ConversionResult, ConvertError, Converter, FamilyConversion, LtagTree, TreeGroup};
pub use parser::{
    brute_force_parse, default_goal, derivations, parse, select_categories, tokenize, BackPointer, CategoryScorer, Chart,
    ChartItem, Derivation, FilterConfig, FilterReason, FrequencyScorer, ItemId, Parser, TokenAssignment, UniformScorer,
    UnknownWordPolicy,
};
