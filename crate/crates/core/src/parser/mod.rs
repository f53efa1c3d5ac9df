//! Two-stage parsing: per-token category selection, then a packed
//! unification CKY chart.

mod brute;
mod chart;
mod derivation;
mod scorer;

use std::fmt;

use crate::category::{Category, RuleName, Shape, Slash};
use crate::combinators::RuleSet;
use crate::lexicon::{CompiledLexicon, LexEntry, Provenance};

pub use brute::{brute_force_parse, BruteForceError, MAX_BRUTE_ENTRIES, MAX_BRUTE_TOKENS};
pub use chart::{BackPointer, Chart, ChartItem, ItemId};
pub use derivation::{Derivation, VerifyError};
pub use scorer::{CategoryScorer, FrequencyScorer, ScorerError, UniformScorer};

/// Whitespace split; trailing punctuation is stripped and tokens that are
/// nothing but punctuation are skipped.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split_whitespace()
        .map(|t| t.trim_end_matches(|c: char| c.is_ascii_punctuation() && c != '\''))
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// What a word absent from the lexicon gets.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum UnknownWordPolicy {
    /// No categories; the parse fails.
    #[default]
    Empty,
    /// Open-class guess: `NP` and `N`.
    Guess,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterConfig {
    /// Drop entries needing more arguments on a side than there are tokens.
    pub span_filter: bool,
    /// Raised entries bypass the span filter.
    pub exempt_raised: bool,
    /// Keep at most this many base entries per token.
    pub n_best: Option<usize>,
    pub unknown: UnknownWordPolicy,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            span_filter: true,
            exempt_raised: true,
            n_best: None,
            unknown: UnknownWordPolicy::Empty,
        }
    }
}

impl FilterConfig {
    /// No filtering at all, as the brute-force oracle sees the lexicon.
    pub fn none() -> Self {
        FilterConfig {
            span_filter: false,
            n_best: None,
            ..Self::default()
        }
    }

    /// Turns a filter off by name: `span` or `n-best`.
    pub fn disable(&mut self, name: &str) -> Result<(), UnknownFilter> {
        match name {
            "span" | "span-filter" => self.span_filter = false,
            "n-best" | "nbest" => self.n_best = None,
            _ => return Err(UnknownFilter(name.to_string())),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown filter '{0}' (expected span or n-best)")]
pub struct UnknownFilter(pub String);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FilterReason {
    /// More arguments wanted on `side` than tokens available there.
    SpanFilter { side: Slash, wanted: usize, available: usize },
    NBest { rank: usize },
    /// A raised entry while the matching type-raising rule is disabled.
    RuleGated(RuleName),
}

impl fmt::Display for FilterReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FilterReason::SpanFilter { side, wanted, available } => {
                let side = match side {
                    Slash::Backward => "left",
                    Slash::Forward => "right",
                };
                write!(f, "span-filter: {wanted} {side} argument(s), {available} token(s)")
            }
            FilterReason::NBest { rank } => write!(f, "n-best: rank {rank}"),
            FilterReason::RuleGated(rule) => write!(f, "rule {rule} disabled"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TokenAssignment {
    pub token_index: usize,
    pub token: String,
    pub surviving: Vec<LexEntry>,
    pub filtered_out: Vec<(LexEntry, FilterReason)>,
    /// The lexicon had nothing for the token.
    pub unknown: bool,
}

/// The type-raising rule a raised entry stands for.
pub fn raise_rule(entry: &LexEntry) -> Option<RuleName> {
    match entry.source {
        Provenance::Base => None,
        Provenance::Raised(Slash::Forward) => Some(RuleName::FwdTypeRaise),
        Provenance::Raised(Slash::Backward) => Some(RuleName::BwdTypeRaise),
    }
}

/// Entries for one token before any filtering.
pub fn candidates(token: &str, lex: &CompiledLexicon, unknown: UnknownWordPolicy) -> (Vec<LexEntry>, bool) {
    let found = lex.lookup(token);
    if !found.is_empty() {
        return (found.to_vec(), false);
    }
    let guesses = match unknown {
        UnknownWordPolicy::Empty => Vec::new(),
        UnknownWordPolicy::Guess => ["NP", "N"]
            .iter()
            .map(|label| LexEntry {
                word: token.to_string(),
                lemma: token.to_lowercase(),
                pos: "UNK".into(),
                category: Category::atom(label),
                source: Provenance::Base,
                labels: Vec::new(),
            })
            .collect(),
    };
    (guesses, true)
}

/// Slashes a token's categories can cancel inside their complex arguments,
/// split by which way the argument is taken and which way the inner slash
/// points. An argument taken with `/` spans tokens to the token's right, so
/// it can only absorb arguments of tokens there; `\` likewise to the left.
#[derive(Clone, Copy, Debug, Default)]
struct Absorb {
    /// (inner forward, inner backward) over arguments taken with `/`.
    taken_forward: (usize, usize),
    /// The same over arguments taken with `\`.
    taken_backward: (usize, usize),
}

impl Absorb {
    fn of(cat: &Category) -> Self {
        let mut a = Absorb::default();
        for (slash, arg) in cat.spine_arguments() {
            let (f, b) = slash_counts(&arg.shape);
            let slot = match slash {
                Slash::Forward => &mut a.taken_forward,
                Slash::Backward => &mut a.taken_backward,
            };
            slot.0 += f;
            slot.1 += b;
        }
        a
    }

    fn max(self, o: Absorb) -> Absorb {
        Absorb {
            taken_forward: (
                self.taken_forward.0.max(o.taken_forward.0),
                self.taken_forward.1.max(o.taken_forward.1),
            ),
            taken_backward: (
                self.taken_backward.0.max(o.taken_backward.0),
                self.taken_backward.1.max(o.taken_backward.1),
            ),
        }
    }
}

fn slash_counts(shape: &Shape) -> (usize, usize) {
    match shape {
        Shape::Atom(_) => (0, 0),
        Shape::Functor(res, slash, arg) => {
            let (rf, rb) = slash_counts(res);
            let (af, ab) = slash_counts(arg);
            let (f, b) = match slash {
                Slash::Forward => (1, 0),
                Slash::Backward => (0, 1),
            };
            (rf + af + f, rb + ab + b)
        }
    }
}

/// (right, left) arguments of token `i` that other tokens could cancel
/// without consuming a token: an argument left unfilled by composition
/// travels up until some complex argument elsewhere takes it over.
fn slack(absorb: &[Absorb], i: usize) -> (usize, usize) {
    let before = absorb[..i].iter().map(|a| a.taken_forward);
    let after = absorb[i + 1..].iter().map(|a| a.taken_backward);
    before.chain(after).fold((0, 0), |acc, (f, b)| (acc.0 + f, acc.1 + b))
}

/// First stage: the categories each token passes on to the chart.
pub fn select_categories(
    tokens: &[String],
    lex: &CompiledLexicon,
    scorer: &dyn CategoryScorer,
    filters: &FilterConfig,
    rules: &RuleSet,
) -> Vec<TokenAssignment> {
    let n = tokens.len();
    let found: Vec<(Vec<LexEntry>, bool)> = tokens
        .iter()
        .map(|t| candidates(t, lex, filters.unknown))
        .collect();
    let absorb: Vec<Absorb> = found
        .iter()
        .map(|(entries, _)| {
            entries
                .iter()
                .filter(|e| raise_rule(e).is_none_or(|r| rules.is_enabled(r)))
                .map(|e| Absorb::of(&e.category))
                .fold(Absorb::default(), Absorb::max)
        })
        .collect();
    found
        .into_iter()
        .enumerate()
        .map(|(i, (entries, unknown))| {
            let token = &tokens[i];
            let mut filtered_out = Vec::new();
            let mut kept: Vec<(usize, f64, LexEntry)> = Vec::new();
            for (order, e) in entries.into_iter().enumerate() {
                if let Some(rule) = raise_rule(&e).filter(|r| !rules.is_enabled(*r)) {
                    filtered_out.push((e, FilterReason::RuleGated(rule)));
                    continue;
                }
                if filters.span_filter && !(filters.exempt_raised && e.is_raised()) {
                    let (left, right) = e.category.directional_arity();
                    let (slack_right, slack_left) = slack(&absorb, i);
                    let available = n - i - 1 + slack_right;
                    if right > available {
                        let reason = FilterReason::SpanFilter {
                            side: Slash::Forward,
                            wanted: right,
                            available,
                        };
                        filtered_out.push((e, reason));
                        continue;
                    }
                    let available = i + slack_left;
                    if left > available {
                        let reason = FilterReason::SpanFilter {
                            side: Slash::Backward,
                            wanted: left,
                            available,
                        };
                        filtered_out.push((e, reason));
                        continue;
                    }
                }
                let score = scorer.score(tokens, i, &e);
                kept.push((order, score, e));
            }
            // Raised entries rank after every base entry.
            kept.sort_by(|a, b| {
                a.2.is_raised()
                    .cmp(&b.2.is_raised())
                    .then(b.1.total_cmp(&a.1))
                    .then(a.0.cmp(&b.0))
            });
            let mut surviving = Vec::new();
            let mut base_rank = 0;
            for (_, _, e) in kept {
                if !e.is_raised() {
                    base_rank += 1;
                    if filters.n_best.is_some_and(|k| base_rank > k) {
                        filtered_out.push((e, FilterReason::NBest { rank: base_rank }));
                        continue;
                    }
                }
                surviving.push(e);
            }
            TokenAssignment {
                token_index: i,
                token: token.clone(),
                surviving,
                filtered_out,
                unknown,
            }
        })
        .collect()
}

/// Parser configuration over a compiled lexicon.
pub struct Parser<'l> {
    lex: &'l CompiledLexicon,
    rules: RuleSet,
    filters: FilterConfig,
    scorer: Box<dyn CategoryScorer + 'l>,
}

impl<'l> Parser<'l> {
    pub fn new(lex: &'l CompiledLexicon) -> Self {
        Parser {
            lex,
            rules: RuleSet::default(),
            filters: FilterConfig::default(),
            scorer: Box::new(UniformScorer),
        }
    }

    pub fn with_rules(mut self, rules: RuleSet) -> Self {
        self.rules = rules;
        self
    }

    pub fn with_filters(mut self, filters: FilterConfig) -> Self {
        self.filters = filters;
        self
    }

    pub fn with_scorer(mut self, scorer: impl CategoryScorer + 'l) -> Self {
        self.scorer = Box::new(scorer);
        self
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn parse(&self, tokens: &[String]) -> Chart {
        let assignments = select_categories(tokens, self.lex, self.scorer.as_ref(), &self.filters, &self.rules);
        Chart::build(assignments, &self.rules)
    }

    pub fn parse_sentence(&self, sentence: &str) -> Chart {
        self.parse(&tokenize(sentence))
    }
}

/// Parses with default filters.
pub fn parse(tokens: &[String], lex: &CompiledLexicon, rules: &RuleSet, scorer: &dyn CategoryScorer) -> Chart {
    let assignments = select_categories(tokens, lex, scorer, &FilterConfig::default(), rules);
    Chart::build(assignments, rules)
}

/// Up to `limit` derivations of goal items, depth first.
pub fn derivations(chart: &Chart, goal: &Category, limit: usize) -> Vec<Derivation> {
    chart.derivations(goal, limit)
}

/// `S[bar=-]`.
pub fn default_goal() -> Category {
    Category::parse("S[bar=-]").expect("valid goal")
}
