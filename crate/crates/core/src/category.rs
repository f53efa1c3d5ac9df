//! The category algebra: atoms, slashes and functors, plus text notation.
//!
//! A category is a skeleton ([`Shape`]) whose atoms each point at a node of
//! one shared [`FeatureGraph`]. Two atoms pointing at the same node share
//! their features, which is how type-raised and modifier categories pass
//! bindings from argument to result.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use crate::features::{copy_reachable, FeatureGraph, FeatureStructure, FsView, FsWriter};
use crate::syntax::{self, SyntaxError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slash {
    Forward,
    Backward,
}

impl Slash {
    pub fn symbol(self) -> char {
        match self {
            Slash::Forward => '/',
            Slash::Backward => '\\',
        }
    }
}

/// Labels of derivation steps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    FwdApp,
    BwdApp,
    FwdComp,
    BwdComp,
    BwdXComp,
    FwdTypeRaise,
    BwdTypeRaise,
    Coord,
    Lex,
}

impl RuleName {
    pub const ALL: [RuleName; 9] = [
        RuleName::FwdApp,
        RuleName::BwdApp,
        RuleName::FwdComp,
        RuleName::BwdComp,
        RuleName::BwdXComp,
        RuleName::FwdTypeRaise,
        RuleName::BwdTypeRaise,
        RuleName::Coord,
        RuleName::Lex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::FwdApp => "FwdApp",
            RuleName::BwdApp => "BwdApp",
            RuleName::FwdComp => "FwdComp",
            RuleName::BwdComp => "BwdComp",
            RuleName::BwdXComp => "BwdXComp",
            RuleName::FwdTypeRaise => "FwdTypeRaise",
            RuleName::BwdTypeRaise => "BwdTypeRaise",
            RuleName::Coord => "Coord",
            RuleName::Lex => "Lex",
        }
    }

    /// Conventional derivation-line annotation.
    pub fn symbol(self) -> &'static str {
        match self {
            RuleName::FwdApp => ">",
            RuleName::BwdApp => "<",
            RuleName::FwdComp => ">B",
            RuleName::BwdComp => "<B",
            RuleName::BwdXComp => "<Bx",
            RuleName::FwdTypeRaise => ">T",
            RuleName::BwdTypeRaise => "<T",
            RuleName::Coord => "&",
            RuleName::Lex => "lex",
        }
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule name '{0}'")]
pub struct UnknownRule(pub String);

impl FromStr for RuleName {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleName::ALL
            .iter()
            .copied()
            .find(|r| r.name().eq_ignore_ascii_case(s) || r.symbol() == s)
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

/// The set of admissible atom labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomInventory {
    labels: BTreeSet<String>,
}

impl Default for AtomInventory {
    fn default() -> Self {
        AtomInventory {
            labels: ["S", "NP", "N", "PP", "Conj", "Punct"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

impl AtomInventory {
    pub fn empty() -> Self {
        AtomInventory {
            labels: BTreeSet::new(),
        }
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn add(&mut self, label: &str) {
        self.labels.insert(label.to_string());
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.labels.iter().map(String::as_str)
    }

    pub fn parse_category(&self, text: &str) -> Result<Category, SyntaxError> {
        syntax::parse_category(text, self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct AtomSlot {
    pub label: String,
    pub arg_index: Option<u8>,
    /// Feature node, in whatever graph or context owns this shape.
    pub fs: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Shape {
    Atom(AtomSlot),
    Functor(Box<Shape>, Slash, Box<Shape>),
}

impl Shape {
    pub fn is_atomic(&self) -> bool {
        matches!(self, Shape::Atom(_))
    }

    pub fn head(&self) -> &AtomSlot {
        match self {
            Shape::Atom(a) => a,
            Shape::Functor(res, _, _) => res.head(),
        }
    }

    pub fn atoms(&self) -> Vec<&AtomSlot> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a AtomSlot>) {
        match self {
            Shape::Atom(a) => out.push(a),
            Shape::Functor(res, _, arg) => {
                res.collect_atoms(out);
                arg.collect_atoms(out);
            }
        }
    }

    pub fn fs_ids(&self) -> Vec<u32> {
        self.atoms().iter().map(|a| a.fs).collect()
    }

    pub fn remap(&self, f: &mut impl FnMut(u32) -> u32) -> Shape {
        match self {
            Shape::Atom(a) => Shape::Atom(AtomSlot {
                label: a.label.clone(),
                arg_index: a.arg_index,
                fs: f(a.fs),
            }),
            Shape::Functor(res, s, arg) => {
                let r = res.remap(f);
                let a = arg.remap(f);
                Shape::Functor(Box::new(r), *s, Box::new(a))
            }
        }
    }

    /// Replaces feature nodes atom by atom, in text order.
    pub fn rebuild(&self, ids: &[u32]) -> Shape {
        let mut it = ids.iter().copied();
        self.remap(&mut |_| it.next().expect("one id per atom"))
    }

    pub fn arity(&self) -> usize {
        match self {
            Shape::Atom(_) => 0,
            Shape::Functor(res, _, _) => 1 + res.arity(),
        }
    }

    pub fn directional_arity(&self) -> (usize, usize) {
        match self {
            Shape::Atom(_) => (0, 0),
            Shape::Functor(res, slash, _) => {
                let (l, r) = res.directional_arity();
                match slash {
                    Slash::Backward => (l + 1, r),
                    Slash::Forward => (l, r + 1),
                }
            }
        }
    }

    /// Arguments along the result spine, outermost first.
    pub fn spine_args(&self) -> Vec<(Slash, &Shape)> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Shape::Functor(res, s, arg) = cur {
            out.push((*s, arg.as_ref()));
            cur = res;
        }
        out
    }

    pub fn skeleton_eq(&self, other: &Shape) -> bool {
        match (self, other) {
            (Shape::Atom(a), Shape::Atom(b)) => a.label == b.label,
            (Shape::Functor(r1, s1, a1), Shape::Functor(r2, s2, a2)) => {
                s1 == s2 && r1.skeleton_eq(r2) && a1.skeleton_eq(a2)
            }
            _ => false,
        }
    }

    pub fn strip_indices(&self) -> Shape {
        match self {
            Shape::Atom(a) => Shape::Atom(AtomSlot {
                label: a.label.clone(),
                arg_index: None,
                fs: a.fs,
            }),
            Shape::Functor(r, s, a) => Shape::Functor(
                Box::new(r.strip_indices()),
                *s,
                Box::new(a.strip_indices()),
            ),
        }
    }
}

/// Pairs up corresponding atoms of two shapes, or explains why the skeletons
/// differ.
pub(crate) fn pair_atoms(a: &Shape, b: &Shape, out: &mut Vec<(u32, u32)>) -> Result<(), String> {
    match (a, b) {
        (Shape::Atom(x), Shape::Atom(y)) => {
            if x.label == y.label {
                out.push((x.fs, y.fs));
                Ok(())
            } else {
                Err(format!("atom label {} vs {}", x.label, y.label))
            }
        }
        (Shape::Functor(r1, s1, a1), Shape::Functor(r2, s2, a2)) => {
            if s1 != s2 {
                return Err(format!("slash {} vs {}", s1.symbol(), s2.symbol()));
            }
            pair_atoms(r1, r2, out)?;
            pair_atoms(a1, a2, out)
        }
        _ => Err("functor depth differs".to_string()),
    }
}

pub(crate) fn write_shape<V: FsView<Id = u32>>(shape: &Shape, view: &V, indices: bool) -> String {
    let mut writer = FsWriter::new(view, shape.fs_ids());
    let mut out = String::new();
    write_rec(shape, &mut writer, indices, &mut out);
    out
}

fn write_rec<V: FsView<Id = u32>>(shape: &Shape, w: &mut FsWriter<'_, V>, indices: bool, out: &mut String) {
    match shape {
        Shape::Atom(a) => {
            out.push_str(&a.label);
            if indices {
                if let Some(i) = a.arg_index {
                    out.push_str(&i.to_string());
                }
            }
            w.write_atom(a.fs, out);
        }
        Shape::Functor(res, slash, arg) => {
            write_side(res, w, indices, out);
            out.push(slash.symbol());
            write_side(arg, w, indices, out);
        }
    }
}

fn write_side<V: FsView<Id = u32>>(shape: &Shape, w: &mut FsWriter<'_, V>, indices: bool, out: &mut String) {
    if shape.is_atomic() {
        write_rec(shape, w, indices, out);
    } else {
        out.push('(');
        write_rec(shape, w, indices, out);
        out.push(')');
    }
}

/// Assembles categories whose parts share one feature graph.
#[derive(Default)]
pub(crate) struct CatBuilder {
    graph: FeatureGraph,
}

impl CatBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Copies a category in; the returned shape may be used more than once to
    /// share its features.
    pub fn add(&mut self, cat: &Category) -> Shape {
        let offset = self.graph.append(&cat.graph);
        cat.shape.remap(&mut |i| i + offset)
    }

    pub fn finish(self, shape: Shape) -> Category {
        Category::from_parts(shape, self.graph)
    }
}

/// One atom of a category, with its features extracted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub label: String,
    pub arg_index: Option<u8>,
    pub features: FeatureStructure,
}

/// A CCG category. Immutable; equality ignores argument indices but not
/// features or feature sharing.
#[derive(Clone, Debug)]
pub struct Category {
    pub(crate) shape: Shape,
    pub(crate) graph: FeatureGraph,
}

impl Category {
    pub(crate) fn from_parts(shape: Shape, graph: FeatureGraph) -> Self {
        Category { shape, graph }
    }

    /// Parses category notation against the default atom inventory.
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        AtomInventory::default().parse_category(text)
    }

    pub fn atom(label: &str) -> Self {
        Self::atom_with(label, None, &FeatureStructure::new())
    }

    pub fn atom_with(label: &str, arg_index: Option<u8>, features: &FeatureStructure) -> Self {
        let mut graph = FeatureGraph::new();
        let offset = graph.append(features.graph());
        Category {
            shape: Shape::Atom(AtomSlot {
                label: label.to_string(),
                arg_index,
                fs: features.root() + offset,
            }),
            graph,
        }
    }

    /// `result slash argument`, with no features shared between the parts.
    pub fn functor(result: &Category, slash: Slash, argument: &Category) -> Self {
        let mut b = CatBuilder::new();
        let r = b.add(result);
        let a = b.add(argument);
        b.finish(Shape::Functor(Box::new(r), slash, Box::new(a)))
    }

    pub fn is_atomic(&self) -> bool {
        self.shape.is_atomic()
    }

    /// Label of an atomic category.
    pub fn label(&self) -> Option<&str> {
        match &self.shape {
            Shape::Atom(a) => Some(&a.label),
            Shape::Functor(..) => None,
        }
    }

    /// Label of the innermost result atom.
    pub fn head_label(&self) -> &str {
        &self.shape.head().label
    }

    pub fn arg_index(&self) -> Option<u8> {
        match &self.shape {
            Shape::Atom(a) => a.arg_index,
            Shape::Functor(..) => None,
        }
    }

    pub fn slash(&self) -> Option<Slash> {
        match &self.shape {
            Shape::Functor(_, s, _) => Some(*s),
            Shape::Atom(_) => None,
        }
    }

    /// Part of this category, with only the nodes it reaches.
    fn sub(&self, shape: &Shape) -> Category {
        let mut graph = FeatureGraph::new();
        let mut map = HashMap::new();
        let shape = shape.remap(&mut |i| copy_reachable(&self.graph, i, &mut graph, &mut map));
        Category::from_parts(shape, graph)
    }

    pub fn result(&self) -> Option<Category> {
        match &self.shape {
            Shape::Functor(res, _, _) => Some(self.sub(res)),
            Shape::Atom(_) => None,
        }
    }

    pub fn argument(&self) -> Option<Category> {
        match &self.shape {
            Shape::Functor(_, _, arg) => Some(self.sub(arg)),
            Shape::Atom(_) => None,
        }
    }

    /// Features of an atomic category.
    pub fn features(&self) -> Option<FeatureStructure> {
        match &self.shape {
            Shape::Atom(a) => Some(self.graph.extract(a.fs)),
            Shape::Functor(..) => None,
        }
    }

    pub fn head(&self) -> Atom {
        self.view_atom(self.shape.head())
    }

    fn view_atom(&self, slot: &AtomSlot) -> Atom {
        Atom {
            label: slot.label.clone(),
            arg_index: slot.arg_index,
            features: self.graph.extract(slot.fs),
        }
    }

    /// All atoms in text order.
    pub fn atoms(&self) -> Vec<Atom> {
        self.shape.atoms().into_iter().map(|a| self.view_atom(a)).collect()
    }

    pub fn find_atom(&self, label: &str, arg_index: Option<u8>) -> Option<Atom> {
        self.shape
            .atoms()
            .into_iter()
            .find(|a| a.label == label && a.arg_index == arg_index)
            .map(|a| self.view_atom(a))
    }

    /// Number of argument slots along the result spine.
    pub fn arity(&self) -> usize {
        self.shape.arity()
    }

    /// (backward-slash arguments, forward-slash arguments) on the result spine.
    pub fn directional_arity(&self) -> (usize, usize) {
        self.shape.directional_arity()
    }

    /// Spine arguments, outermost first.
    pub fn spine_arguments(&self) -> Vec<(Slash, Category)> {
        self.shape
            .spine_args()
            .into_iter()
            .map(|(s, a)| (s, self.sub(a)))
            .collect()
    }

    /// Same slashes and labels, features and indices aside.
    pub fn skeleton_eq(&self, other: &Category) -> bool {
        self.shape.skeleton_eq(&other.shape)
    }

    /// Slashes and labels only: `((S\NP)/PP)/NP`.
    pub fn skeleton(&self) -> String {
        fn go(shape: &Shape, out: &mut String, nested: bool) {
            match shape {
                Shape::Atom(a) => out.push_str(&a.label),
                Shape::Functor(res, slash, arg) => {
                    if nested {
                        out.push('(');
                    }
                    go(res, out, true);
                    out.push(slash.symbol());
                    go(arg, out, true);
                    if nested {
                        out.push(')');
                    }
                }
            }
        }
        let mut out = String::new();
        go(&self.shape, &mut out, false);
        out
    }

    pub fn without_arg_indices(&self) -> Category {
        Category::from_parts(self.shape.strip_indices(), self.graph.clone())
    }

    /// Canonical text with argument indices suppressed; the identity used for
    /// equality, hashing and chart packing.
    pub fn canonical_key(&self) -> String {
        write_shape(&self.shape, &self.graph, false)
    }

    /// `Some(direction)` when the category reads `T/(T\X)` (forward) or
    /// `T\(T/X)` (backward) with both `T`s equal and `X` atomic.
    pub fn raised_shape(&self) -> Option<Slash> {
        let Shape::Functor(outer_t, outer, inner) = &self.shape else {
            return None;
        };
        let Shape::Functor(inner_t, inner_slash, x) = inner.as_ref() else {
            return None;
        };
        if *outer == *inner_slash || !x.is_atomic() {
            return None;
        }
        let t1 = self.sub(outer_t);
        let t2 = self.sub(inner_t);
        (t1 == t2).then_some(*outer)
    }
}

impl PartialEq for Category {
    fn eq(&self, other: &Self) -> bool {
        self.shape.skeleton_eq(&other.shape) && self.canonical_key() == other.canonical_key()
    }
}

impl Eq for Category {}

impl Hash for Category {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_key().hash(state);
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&write_shape(&self.shape, &self.graph, true))
    }
}

impl FromStr for Category {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Category::parse(s)
    }
}
