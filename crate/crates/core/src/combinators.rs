//! Combinatory rules over categories.
//!
//! Each rule exists twice: a context-level version that works on shapes whose
//! feature nodes live in a parse's [`UnifyContext`], and a standalone wrapper
//! over immutable [`Category`] values. The parser uses the former, tests and
//! tools the latter.

use std::collections::BTreeSet;
use std::fmt;

use crate::category::{pair_atoms, AtomInventory, CatBuilder, Category, RuleName, Shape, Slash};
use crate::unify::UnifyContext;

/// Binary rules tried by [`apply_all`], in output order.
pub const BINARY_RULES: [RuleName; 5] = [
    RuleName::FwdApp,
    RuleName::BwdApp,
    RuleName::FwdComp,
    RuleName::BwdComp,
    RuleName::BwdXComp,
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleSetError {
    #[error(transparent)]
    UnknownRule(#[from] crate::category::UnknownRule),
    #[error("composition depth must be 1 or more, got '{0}'")]
    BadDepth(String),
    #[error("coordination is enabled but the atom inventory has no Conj")]
    CoordWithoutConj,
    #[error("rule config line {line}: {message}")]
    Config { line: usize, message: String },
}

/// Which rules a parse may use, and how deep composition reaches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleSet {
    enabled: BTreeSet<RuleName>,
    composition_depth: usize,
    compose_heads: Option<BTreeSet<String>>,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet {
            enabled: RuleName::ALL.iter().copied().collect(),
            composition_depth: 1,
            compose_heads: None,
        }
    }
}

impl RuleSet {
    pub fn all() -> Self {
        Self::default()
    }

    /// Exactly the given rules, plus `Lex`.
    pub fn only(rules: impl IntoIterator<Item = RuleName>) -> Self {
        let mut enabled: BTreeSet<RuleName> = rules.into_iter().collect();
        enabled.insert(RuleName::Lex);
        RuleSet {
            enabled,
            ..Self::default()
        }
    }

    pub fn is_enabled(&self, rule: RuleName) -> bool {
        self.enabled.contains(&rule)
    }

    pub fn enabled(&self) -> impl Iterator<Item = RuleName> + '_ {
        self.enabled.iter().copied()
    }

    pub fn enable(&mut self, rule: RuleName) -> &mut Self {
        self.enabled.insert(rule);
        self
    }

    /// `Lex` cannot be disabled; asking to is a no-op.
    pub fn disable(&mut self, rule: RuleName) -> &mut Self {
        if rule != RuleName::Lex {
            self.enabled.remove(&rule);
        }
        self
    }

    pub fn without(mut self, rule: RuleName) -> Self {
        self.disable(rule);
        self
    }

    pub fn composition_depth(&self) -> usize {
        self.composition_depth
    }

    pub fn with_composition_depth(mut self, depth: usize) -> Result<Self, RuleSetError> {
        if depth == 0 {
            return Err(RuleSetError::BadDepth(depth.to_string()));
        }
        self.composition_depth = depth;
        Ok(self)
    }

    /// Restricts composition to results whose head atom has one of these
    /// labels. `None` lifts the restriction.
    pub fn set_compose_heads(&mut self, labels: Option<BTreeSet<String>>) {
        self.compose_heads = labels;
    }

    pub fn compose_heads(&self) -> Option<&BTreeSet<String>> {
        self.compose_heads.as_ref()
    }

    fn composes_into(&self, result: &Shape) -> bool {
        match &self.compose_heads {
            None => true,
            Some(set) => set.contains(&result.head().label),
        }
    }

    /// Applies a comma-separated override list.
    ///
    /// Items prefixed with `+` or `-` toggle a rule on top of the current
    /// set; `depth=N` sets the composition depth. If any bare rule name is
    /// present, the set is first reset to just those names.
    pub fn apply_overrides(&mut self, list: &str) -> Result<(), RuleSetError> {
        let items: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let bare: Vec<&str> = items
            .iter()
            .copied()
            .filter(|s| !s.starts_with(['+', '-']) && !s.contains('='))
            .collect();
        if !bare.is_empty() {
            let mut enabled = BTreeSet::from([RuleName::Lex]);
            for name in bare {
                enabled.insert(name.parse()?);
            }
            self.enabled = enabled;
        }
        for item in items {
            if let Some(name) = item.strip_prefix('+') {
                self.enable(name.trim().parse()?);
            } else if let Some(name) = item.strip_prefix('-') {
                self.disable(name.trim().parse()?);
            } else if let Some((key, value)) = item.split_once('=') {
                if key.trim() != "depth" {
                    return Err(RuleSetError::Config {
                        line: 1,
                        message: format!("unknown setting '{}'", key.trim()),
                    });
                }
                self.composition_depth = parse_depth(value)?;
            }
        }
        Ok(())
    }

    /// Reads the line-oriented rule config:
    ///
    /// ```text
    /// # comment
    /// disable BwdXComp
    /// enable Coord
    /// composition_depth 2
    /// compose_heads S
    /// ```
    pub fn from_config_str(text: &str) -> Result<Self, RuleSetError> {
        let mut rules = RuleSet::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let err = |message: String| RuleSetError::Config { line: i + 1, message };
            match key {
                "enable" | "disable" => {
                    if rest.is_empty() {
                        return Err(err(format!("'{key}' needs at least one rule name")));
                    }
                    for name in rest {
                        let rule: RuleName = name.parse()?;
                        if key == "enable" {
                            rules.enable(rule);
                        } else {
                            rules.disable(rule);
                        }
                    }
                }
                "composition_depth" => match rest.as_slice() {
                    [n] => rules.composition_depth = parse_depth(n)?,
                    _ => return Err(err("composition_depth takes one number".into())),
                },
                "compose_heads" => {
                    rules.compose_heads = Some(rest.iter().map(|s| s.to_string()).collect());
                }
                other => return Err(err(format!("unknown directive '{other}'"))),
            }
        }
        Ok(rules)
    }

    pub fn validate(&self, inventory: &AtomInventory) -> Result<(), RuleSetError> {
        if self.is_enabled(RuleName::Coord) && !inventory.contains("Conj") {
            return Err(RuleSetError::CoordWithoutConj);
        }
        Ok(())
    }
}

fn parse_depth(text: &str) -> Result<usize, RuleSetError> {
    match text.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(RuleSetError::BadDepth(text.trim().to_string())),
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.enabled.iter().map(|r| r.name()).collect();
        write!(f, "{} depth={}", names.join(","), self.composition_depth)
    }
}

/// One successful rule application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub rule: RuleName,
    pub left: Category,
    pub right: Category,
    pub result: Category,
}

/// Splits `k` outer argument layers off `shape`, all with slash `dir`.
/// Returns the remaining core and the layers, outermost first.
fn peel(shape: &Shape, k: usize, dir: Slash) -> Option<(&Shape, Vec<(Slash, &Shape)>)> {
    let mut cur = shape;
    let mut layers = Vec::with_capacity(k);
    for _ in 0..k {
        match cur {
            Shape::Functor(res, s, arg) if *s == dir => {
                layers.push((*s, arg.as_ref()));
                cur = res;
            }
            _ => return None,
        }
    }
    Some((cur, layers))
}

/// Re-attaches peeled layers (outermost first) around `core`.
fn wrap(core: &Shape, layers: &[(Slash, &Shape)]) -> Shape {
    layers.iter().rev().fold(core.clone(), |acc, (s, arg)| {
        Shape::Functor(Box::new(acc), *s, Box::new((*arg).clone()))
    })
}

fn functor(shape: &Shape, dir: Slash) -> Option<(&Shape, &Shape)> {
    match shape {
        Shape::Functor(res, s, arg) if *s == dir => Some((res, arg)),
        _ => None,
    }
}

/// Unifies `a` with `b` and copies `template` out with the bindings.
fn bind(ctx: &mut UnifyContext, a: &Shape, b: &Shape, template: &Shape) -> Option<Shape> {
    let mut pairs = Vec::new();
    pair_atoms(a, b, &mut pairs).ok()?;
    ctx.instantiate(&pairs, template).ok()
}

pub(crate) fn fwd_app_in(ctx: &mut UnifyContext, left: &Shape, right: &Shape) -> Option<Shape> {
    let (x, y) = functor(left, Slash::Forward)?;
    bind(ctx, y, right, x)
}

pub(crate) fn bwd_app_in(ctx: &mut UnifyContext, left: &Shape, right: &Shape) -> Option<Shape> {
    let (x, y) = functor(right, Slash::Backward)?;
    bind(ctx, y, left, x)
}

/// X/Y  Y|Z1..|Zk  =>  X|Z1..|Zk, all slashes forward.
pub(crate) fn fwd_comp_in(ctx: &mut UnifyContext, left: &Shape, right: &Shape, depth: usize) -> Option<Shape> {
    let (x, y) = functor(left, Slash::Forward)?;
    (1..=depth).find_map(|k| {
        let (core, layers) = peel(right, k, Slash::Forward)?;
        bind(ctx, y, core, &wrap(x, &layers))
    })
}

/// Y\Z1..\Zk  X\Y  =>  X\Z1..\Zk.
pub(crate) fn bwd_comp_in(ctx: &mut UnifyContext, left: &Shape, right: &Shape, depth: usize) -> Option<Shape> {
    let (x, y) = functor(right, Slash::Backward)?;
    (1..=depth).find_map(|k| {
        let (core, layers) = peel(left, k, Slash::Backward)?;
        bind(ctx, y, core, &wrap(x, &layers))
    })
}

/// Y/Z1../Zk  X\Y  =>  X/Z1../Zk.
pub(crate) fn bwd_xcomp_in(ctx: &mut UnifyContext, left: &Shape, right: &Shape, depth: usize) -> Option<Shape> {
    let (x, y) = functor(right, Slash::Backward)?;
    (1..=depth).find_map(|k| {
        let (core, layers) = peel(left, k, Slash::Forward)?;
        bind(ctx, y, core, &wrap(x, &layers))
    })
}

/// Every enabled binary rule's result on `(left, right)`, in rule order.
pub(crate) fn combine_in(ctx: &mut UnifyContext, rules: &RuleSet, left: &Shape, right: &Shape) -> Vec<(RuleName, Shape)> {
    let depth = rules.composition_depth();
    let mut out = Vec::new();
    for rule in BINARY_RULES {
        if !rules.is_enabled(rule) {
            continue;
        }
        let result = match rule {
            RuleName::FwdApp => fwd_app_in(ctx, left, right),
            RuleName::BwdApp => bwd_app_in(ctx, left, right),
            RuleName::FwdComp => fwd_comp_in(ctx, left, right, depth),
            RuleName::BwdComp => bwd_comp_in(ctx, left, right, depth),
            RuleName::BwdXComp => bwd_xcomp_in(ctx, left, right, depth),
            _ => None,
        };
        if let Some(r) = result {
            let is_comp = matches!(rule, RuleName::FwdComp | RuleName::BwdComp | RuleName::BwdXComp);
            if !is_comp || rules.composes_into(&r) {
                out.push((rule, r));
            }
        }
    }
    out
}

fn lift(
    left: &Category,
    right: &Category,
    f: impl FnOnce(&mut UnifyContext, &Shape, &Shape) -> Option<Shape>,
) -> Option<Category> {
    let mut ctx = UnifyContext::new();
    let l = ctx.import_category(left);
    let r = ctx.import_category(right);
    f(&mut ctx, &l, &r).map(|s| ctx.export_category(&s))
}

/// `X/Y  Y  =>  X`.
pub fn forward_apply(f: &Category, a: &Category) -> Option<Category> {
    lift(f, a, fwd_app_in)
}

/// `Y  X\Y  =>  X`.
pub fn backward_apply(a: &Category, f: &Category) -> Option<Category> {
    lift(a, f, bwd_app_in)
}

/// `X/Y  Y/Z  =>  X/Z`, generalized to `depth` layers on the right.
pub fn forward_compose(f: &Category, g: &Category, depth: usize) -> Option<Category> {
    lift(f, g, |c, l, r| fwd_comp_in(c, l, r, depth))
}

/// `Y\Z  X\Y  =>  X\Z`, generalized to `depth` layers on the left.
pub fn backward_compose(g: &Category, f: &Category, depth: usize) -> Option<Category> {
    lift(g, f, |c, l, r| bwd_comp_in(c, l, r, depth))
}

/// `Y/Z  X\Y  =>  X/Z`.
pub fn backward_cross_compose(f: &Category, g: &Category, depth: usize) -> Option<Category> {
    lift(f, g, |c, l, r| bwd_xcomp_in(c, l, r, depth))
}

/// Like categories combine into their unification.
pub fn coordinate(left: &Category, right: &Category) -> Option<Category> {
    crate::unify::unify_categories(left, right).ok()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("only atomic categories can be type-raised, got {0}")]
pub struct RaiseError(pub String);

/// Forward: `T/(T\X)`; backward: `T\(T/X)`. Both `T`s share their features.
pub fn type_raise(x: &Category, target: &Category, direction: Slash) -> Result<Category, RaiseError> {
    if !x.is_atomic() {
        return Err(RaiseError(x.to_string()));
    }
    let inner = match direction {
        Slash::Forward => Slash::Backward,
        Slash::Backward => Slash::Forward,
    };
    let mut b = CatBuilder::new();
    let t = b.add(target);
    let xs = b.add(x);
    let arg = Shape::Functor(Box::new(t.clone()), inner, Box::new(xs));
    Ok(b.finish(Shape::Functor(Box::new(t), direction, Box::new(arg))))
}

/// All enabled binary rule results, deduplicated, in rule order. Coordination
/// is not included: it needs a conjunction between its operands and is
/// handled by the parser.
pub fn apply_all(left: &Category, right: &Category, rules: &RuleSet) -> Vec<RuleApplication> {
    let mut ctx = UnifyContext::new();
    let l = ctx.import_category(left);
    let r = ctx.import_category(right);
    let mut out: Vec<RuleApplication> = Vec::new();
    for (rule, shape) in combine_in(&mut ctx, rules, &l, &r) {
        let result = ctx.export_category(&shape);
        if !out.iter().any(|a| a.rule == rule && a.result == result) {
            out.push(RuleApplication {
                rule,
                left: left.clone(),
                right: right.clone(),
                result,
            });
        }
    }
    out
}
