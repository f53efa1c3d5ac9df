//! Elementary trees to categories.
//!
//! Tree files hold s-expressions, one tree or family per top-level form:
//!
//! ```text
//! (family transitive
//!   (nx0Vnx1 S ((mode ind))
//!     (NP0 !sub ((case nom)))
//!     (V !anchor)
//!     (NP1 !sub ((case acc)))))
//! (betaVvx VP ()
//!   (VP !foot)
//!   (Adv !anchor))
//! ```
//!
//! A tree is `(NAME ROOT (FEATURES) FRONTIER...)`; a frontier node is
//! `(LABEL MARKER [(FEATURES)])` with marker `!sub`, `!anchor` or `!foot`;
//! features are `(attr value)` pairs.

mod sexp;

use std::collections::HashMap;
use std::fmt;

use crate::category::{CatBuilder, Category, Shape, Slash};
use crate::features::{FeatureStructure, FsNode};
use crate::lexicon::{CatClause, CatDbEntry, FeatureConfig, ResolvedTag, TagMeaning};
use crate::unify::install_features;

use sexp::Sexp;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConvertError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("tree {0}: no anchor")]
    NoAnchor(String),
    #[error("tree {0}: more than one anchor is unsupported")]
    MultipleAnchors(String),
    #[error("tree {0}: more than one foot is unsupported")]
    MultipleFeet(String),
    #[error("tree {tree}: foot {foot} does not match root {root}")]
    FootMismatch { tree: String, foot: String, root: String },
    #[error("tree {tree}: unknown label {label}")]
    UnknownLabel { tree: String, label: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Substitution,
    Anchor,
    Foot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    LeftOfAnchor,
    RightOfAnchor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierNode {
    pub label: String,
    pub arg_index: Option<u8>,
    pub kind: NodeKind,
    pub features: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LtagTree {
    pub name: String,
    pub root_label: String,
    pub frontier: Vec<FrontierNode>,
    pub tree_features: Vec<(String, String)>,
}

impl LtagTree {
    fn anchor_position(&self) -> Result<usize, ConvertError> {
        let anchors: Vec<usize> = self
            .frontier
            .iter()
            .enumerate()
            .filter(|(_, n)| n.kind == NodeKind::Anchor)
            .map(|(i, _)| i)
            .collect();
        match anchors.as_slice() {
            [] => Err(ConvertError::NoAnchor(self.name.clone())),
            [a] => Ok(*a),
            _ => Err(ConvertError::MultipleAnchors(self.name.clone())),
        }
    }

    /// POS of the anchor node.
    pub fn anchor_pos(&self) -> Option<&str> {
        self.frontier
            .iter()
            .find(|n| n.kind == NodeKind::Anchor)
            .map(|n| n.label.as_str())
    }

    pub fn side_of(&self, position: usize) -> Result<Side, ConvertError> {
        Ok(if position < self.anchor_position()? {
            Side::LeftOfAnchor
        } else {
            Side::RightOfAnchor
        })
    }

    pub fn foot(&self) -> Option<&FrontierNode> {
        self.frontier.iter().find(|n| n.kind == NodeKind::Foot)
    }

    pub fn substitution_count(&self) -> usize {
        self.frontier.iter().filter(|n| n.kind == NodeKind::Substitution).count()
    }

    /// Flagged as a wh or relative-clause tree.
    pub fn is_extraction(&self) -> bool {
        self.tree_features
            .iter()
            .any(|(a, v)| (a == "wh" || a == "rel") && v == "+")
    }
}

/// One top-level form of a tree file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeGroup {
    Family { name: String, trees: Vec<LtagTree> },
    Tree(LtagTree),
}

impl TreeGroup {
    pub fn trees(&self) -> &[LtagTree] {
        match self {
            TreeGroup::Family { trees, .. } => trees,
            TreeGroup::Tree(t) => std::slice::from_ref(t),
        }
    }
}

fn syntax(node: &Sexp, message: impl Into<String>) -> ConvertError {
    let (line, col) = node.pos();
    ConvertError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

pub fn parse_tree_file(text: &str) -> Result<Vec<TreeGroup>, ConvertError> {
    sexp::parse_all(text)?
        .iter()
        .map(|form| {
            let items = form.as_list().ok_or_else(|| syntax(form, "expected a list"))?;
            match items.first().and_then(Sexp::as_atom) {
                Some("family") => {
                    let name = items
                        .get(1)
                        .and_then(Sexp::as_atom)
                        .ok_or_else(|| syntax(form, "family needs a name"))?;
                    let trees = items[2..].iter().map(read_tree).collect::<Result<_, _>>()?;
                    Ok(TreeGroup::Family {
                        name: name.to_string(),
                        trees,
                    })
                }
                _ => Ok(TreeGroup::Tree(read_tree(form)?)),
            }
        })
        .collect()
}

fn read_features(node: &Sexp) -> Result<Vec<(String, String)>, ConvertError> {
    let items = node.as_list().ok_or_else(|| syntax(node, "expected a feature list"))?;
    items
        .iter()
        .map(|pair| match pair.as_list() {
            Some([a, v]) => match (a.as_atom(), v.as_atom()) {
                (Some(a), Some(v)) => Ok((a.to_string(), v.to_string())),
                _ => Err(syntax(pair, "feature must be (attr value)")),
            },
            _ => Err(syntax(pair, "feature must be (attr value)")),
        })
        .collect()
}

fn split_label(label: &str) -> (String, Option<u8>) {
    match label.chars().last() {
        Some(c) if c.is_ascii_digit() && label.len() > 1 => (label[..label.len() - 1].to_string(), Some(c as u8 - b'0')),
        _ => (label.to_string(), None),
    }
}

fn read_tree(form: &Sexp) -> Result<LtagTree, ConvertError> {
    let items = form.as_list().ok_or_else(|| syntax(form, "expected a tree list"))?;
    let [name, root, feats, frontier @ ..] = items else {
        return Err(syntax(form, "tree needs NAME ROOT (FEATURES) FRONTIER..."));
    };
    let name = name.as_atom().ok_or_else(|| syntax(name, "tree name must be a symbol"))?;
    let root_label = root.as_atom().ok_or_else(|| syntax(root, "root label must be a symbol"))?;
    let tree_features = read_features(feats)?;
    let mut nodes = Vec::new();
    for node in frontier {
        let parts = node.as_list().ok_or_else(|| syntax(node, "frontier node must be a list"))?;
        let (label, marker, features) = match parts {
            [l, m] => (l, m, Vec::new()),
            [l, m, f] => (l, m, read_features(f)?),
            _ => return Err(syntax(node, "frontier node is (LABEL MARKER [(FEATURES)])")),
        };
        let label = label.as_atom().ok_or_else(|| syntax(label, "label must be a symbol"))?;
        let kind = match marker.as_atom() {
            Some("!sub") => NodeKind::Substitution,
            Some("!anchor") => NodeKind::Anchor,
            Some("!foot") => NodeKind::Foot,
            _ => return Err(syntax(marker, "marker must be !sub, !anchor or !foot")),
        };
        let (label, arg_index) = if kind == NodeKind::Anchor {
            (label.to_string(), None)
        } else {
            split_label(label)
        };
        nodes.push(FrontierNode {
            label,
            arg_index,
            kind,
            features,
        });
    }
    Ok(LtagTree {
        name: name.to_string(),
        root_label: root_label.to_string(),
        frontier: nodes,
        tree_features,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConversionResult {
    pub category: Category,
    /// Contributing trees; more than one after family deduplication.
    pub tree_names: Vec<String>,
    pub pos: String,
    pub warnings: Vec<String>,
}

impl ConversionResult {
    pub fn tree_name(&self) -> &str {
        &self.tree_names[0]
    }
}

/// Converts trees against a feature inventory.
pub struct Converter<'c> {
    cfg: &'c FeatureConfig,
}

const MODIFIER_WARNING: &str = "auxiliary tree converted with the modifier recipe X/X or X\\X";

impl<'c> Converter<'c> {
    pub fn new(cfg: &'c FeatureConfig) -> Self {
        Converter { cfg }
    }

    /// Category for a node label. `VP` reads as `S\NP`.
    fn label_category(&self, tree: &LtagTree, label: &str, arg_index: Option<u8>) -> Result<Category, ConvertError> {
        if label == "VP" && !self.cfg.atoms().contains("VP") {
            return Ok(Category::functor(
                &Category::atom_with("S", arg_index, &FeatureStructure::new()),
                Slash::Backward,
                &Category::atom("NP"),
            ));
        }
        if !self.cfg.atoms().contains(label) {
            return Err(ConvertError::UnknownLabel {
                tree: tree.name.clone(),
                label: label.to_string(),
            });
        }
        Ok(Category::atom_with(label, arg_index, &FeatureStructure::new()))
    }

    /// Initial trees; auxiliary trees are handed to [`Self::convert_modifier`].
    pub fn convert_tree(&self, tree: &LtagTree) -> Result<ConversionResult, ConvertError> {
        if tree.foot().is_some() {
            return self.convert_modifier(tree);
        }
        let anchor = tree.anchor_position()?;
        let result = self.label_category(tree, &tree.root_label, None)?;
        let (left, right) = split_subs(tree, anchor);
        let mut order: Vec<usize> = Vec::new();
        let mut cat = result;
        let mut rest_left = left.as_slice();
        if let Some((&subject, rest)) = left.split_first() {
            cat = self.wrap(tree, cat, Slash::Backward, subject)?;
            order.push(subject);
            rest_left = rest;
        }
        for &i in rest_left {
            cat = self.wrap(tree, cat, Slash::Backward, i)?;
            order.push(i);
        }
        for &i in right.iter().rev() {
            cat = self.wrap(tree, cat, Slash::Forward, i)?;
            order.push(i);
        }
        let (category, warnings) = self.install(tree, cat, &order);
        Ok(ConversionResult {
            category,
            tree_names: vec![tree.name.clone()],
            pos: tree.anchor_pos().unwrap_or_default().to_string(),
            warnings,
        })
    }

    /// `X/X` when the anchor precedes the foot, `X\X` when it follows, with
    /// the two `X`s sharing features; substitution nodes then attach as for
    /// initial trees.
    pub fn convert_modifier(&self, tree: &LtagTree) -> Result<ConversionResult, ConvertError> {
        let feet: Vec<usize> = (0..tree.frontier.len())
            .filter(|&i| tree.frontier[i].kind == NodeKind::Foot)
            .collect();
        let foot = match feet.as_slice() {
            [f] => *f,
            [] => return self.convert_tree(tree),
            _ => return Err(ConvertError::MultipleFeet(tree.name.clone())),
        };
        let foot_label = &tree.frontier[foot].label;
        if *foot_label != tree.root_label {
            return Err(ConvertError::FootMismatch {
                tree: tree.name.clone(),
                foot: foot_label.clone(),
                root: tree.root_label.clone(),
            });
        }
        let anchor = tree.anchor_position()?;
        let x = self.label_category(tree, &tree.root_label, None)?;
        let slash = if anchor < foot { Slash::Forward } else { Slash::Backward };
        let mut b = CatBuilder::new();
        let xs = b.add(&x);
        let mut cat = b.finish(Shape::Functor(Box::new(xs.clone()), slash, Box::new(xs)));
        let mut order = vec![foot];
        let (left, right) = split_subs(tree, anchor);
        for &i in &left {
            cat = self.wrap(tree, cat, Slash::Backward, i)?;
            order.push(i);
        }
        for &i in right.iter().rev() {
            cat = self.wrap(tree, cat, Slash::Forward, i)?;
            order.push(i);
        }
        let (category, mut warnings) = self.install(tree, cat, &order);
        warnings.insert(0, format!("{}: {MODIFIER_WARNING}", tree.name));
        Ok(ConversionResult {
            category,
            tree_names: vec![tree.name.clone()],
            pos: tree.anchor_pos().unwrap_or_default().to_string(),
            warnings,
        })
    }

    fn wrap(&self, tree: &LtagTree, cat: Category, slash: Slash, node: usize) -> Result<Category, ConvertError> {
        let n = &tree.frontier[node];
        let arg = self.label_category(tree, &n.label, n.arg_index)?;
        Ok(Category::functor(&cat, slash, &arg))
    }

    fn install(&self, tree: &LtagTree, cat: Category, order: &[usize]) -> (Category, Vec<String>) {
        let mut warnings = Vec::new();
        let cat = self.map_features_in_order(tree, cat, order, &mut warnings);
        (cat, warnings)
    }

    /// Installs tree features on the result atom and each frontier node's
    /// features on its argument, arguments matched innermost first against
    /// `order`. Features outside the inventory are dropped with a warning.
    fn map_features_in_order(
        &self,
        tree: &LtagTree,
        mut cat: Category,
        order: &[usize],
        warnings: &mut Vec<String>,
    ) -> Category {
        // a complex root such as VP's S\NP brings arguments no frontier node owns
        let skip = self
            .label_category(tree, &tree.root_label, None)
            .map(|c| c.arity())
            .unwrap_or(0);
        let heads: Vec<usize> = argument_heads(&cat.shape).into_iter().skip(skip).collect();
        let mut jobs: Vec<(usize, &[(String, String)], String)> = vec![(0, &tree.tree_features, "tree".to_string())];
        for (k, &node) in order.iter().enumerate() {
            if let Some(&pos) = heads.get(k) {
                let n = &tree.frontier[node];
                jobs.push((pos, &n.features, format!("node {}", n.label)));
            }
        }
        for (pos, feats, owner) in jobs {
            let mut kept = Vec::new();
            for (attr, value) in feats {
                match self.cfg.canonical_attr(attr) {
                    Some(canon) if self.cfg.admits(canon, value) => kept.push((canon.to_string(), value.clone())),
                    Some(canon) => warnings.push(format!(
                        "{}: {owner}: value {value} not admissible for {canon}, dropped",
                        tree.name
                    )),
                    None if attr == "wh" || attr == "rel" => {}
                    None => warnings.push(format!(
                        "{}: {owner}: feature {attr} not in the inventory, dropped",
                        tree.name
                    )),
                }
            }
            if kept.is_empty() {
                continue;
            }
            let fs = FeatureStructure::from_pairs(kept.iter().map(|(a, v)| (a.as_str(), v.as_str())));
            match install_features(&cat, &[pos], &fs) {
                Ok(c) => cat = c,
                Err(clash) => warnings.push(format!("{}: {owner}: {clash}, features dropped", tree.name)),
            }
        }
        cat
    }

    /// Features of `tree` installed on a category converted from it.
    pub fn map_tree_features(&self, tree: &LtagTree, cat: &Category) -> (Category, Vec<String>) {
        let order = match tree.anchor_position() {
            Ok(anchor) => conversion_order(tree, anchor),
            Err(_) => Vec::new(),
        };
        let mut warnings = Vec::new();
        let c = self.map_features_in_order(tree, cat.clone(), &order, &mut warnings);
        (c, warnings)
    }

    /// Converts every tree, drops extraction trees with a warning, and
    /// merges trees that yield the same category.
    pub fn convert_family(&self, trees: &[LtagTree]) -> Result<FamilyConversion, ConvertError> {
        let mut out = FamilyConversion::default();
        for tree in trees {
            if tree.is_extraction() {
                out.warnings.push(format!(
                    "{}: extraction tree dropped; extraction is handled by wh-words and relative pronouns in the wh-lexicon",
                    tree.name
                ));
                continue;
            }
            let r = self.convert_tree(tree)?;
            out.warnings.extend(r.warnings.iter().cloned());
            match out
                .results
                .iter_mut()
                .find(|x| x.category == r.category && x.pos == r.pos)
            {
                Some(existing) => existing.tree_names.push(tree.name.clone()),
                None => out.results.push(r),
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FamilyConversion {
    pub results: Vec<ConversionResult>,
    pub warnings: Vec<String>,
}

/// Substitution node positions left and right of the anchor, surface order.
fn split_subs(tree: &LtagTree, anchor: usize) -> (Vec<usize>, Vec<usize>) {
    let subs = (0..tree.frontier.len()).filter(|&i| tree.frontier[i].kind == NodeKind::Substitution);
    subs.partition(|&i| i < anchor)
}

/// Node positions in the order conversion wraps them, innermost first.
fn conversion_order(tree: &LtagTree, anchor: usize) -> Vec<usize> {
    let (left, right) = split_subs(tree, anchor);
    let mut order: Vec<usize> = tree
        .frontier
        .iter()
        .position(|n| n.kind == NodeKind::Foot)
        .into_iter()
        .collect();
    order.extend(left);
    order.extend(right.into_iter().rev());
    order
}

/// Text-order position of each spine argument's head atom, innermost first.
fn argument_heads(shape: &Shape) -> Vec<usize> {
    fn walk(shape: &Shape, out: &mut Vec<usize>) -> usize {
        match shape {
            Shape::Atom(_) => 1,
            Shape::Functor(res, _, arg) => {
                let n = walk(res, out);
                out.push(n);
                n + arg.atoms().len()
            }
        }
    }
    let mut out = Vec::new();
    walk(shape, &mut out);
    out
}

/// Category text with flat, unshared features moved into `#tags` where the
/// tag reads back to the same atom; everything else stays inline.
pub fn category_with_tags(cat: &Category, cfg: &FeatureConfig) -> (String, Vec<String>) {
    let atoms = cat.shape.atoms();
    let mut uses: HashMap<u32, usize> = HashMap::new();
    for a in &atoms {
        *uses.entry(a.fs).or_default() += 1;
    }
    let mut graph = cat.graph.clone();
    let mut tags = Vec::new();
    for (pos, atom) in atoms.iter().enumerate() {
        if uses[&atom.fs] > 1 {
            continue;
        }
        let FsNode::Complex(arcs) = graph.node(atom.fs).clone() else { continue };
        let mut keep = Vec::new();
        for (attr, child) in arcs {
            let value = match graph.node(child) {
                FsNode::Atomic(v) => v.clone(),
                FsNode::Complex(_) => {
                    keep.push((attr, child));
                    continue;
                }
            };
            let idx = atom.arg_index.map(|i| i.to_string()).unwrap_or_default();
            let tag = format!("{}{idx}{attr}{value}", atom.label);
            let reads_back = match cfg.resolve_tag(&tag) {
                Some(TagMeaning::Feature { target, attr: a, value: v }) => {
                    a == attr && v == value && crate::lexicon::tag_targets(cat, &target) == [pos]
                }
                _ => false,
            };
            if reads_back {
                tags.push(tag);
            } else {
                keep.push((attr, child));
            }
        }
        *graph.node_mut(atom.fs) = FsNode::Complex(keep);
    }
    let bare = Category::from_parts(cat.shape.clone(), graph);
    (bare.to_string(), tags)
}

/// `cat.db` text for conversion results, grouped by POS.
pub fn write_cat_db_lines(results: &[ConversionResult], cfg: &FeatureConfig) -> String {
    let mut entries: Vec<CatDbEntry> = Vec::new();
    for r in results {
        let (text, tags) = category_with_tags(&r.category, cfg);
        let category = cfg
            .atoms()
            .parse_category(&text)
            .unwrap_or_else(|_| r.category.clone());
        let clause = CatClause {
            text,
            category,
            resolved: tags
                .iter()
                .filter_map(|t| match cfg.resolve_tag(t)? {
                    TagMeaning::Feature { target, attr, value } => Some(ResolvedTag::Feature { target, attr, value }),
                    TagMeaning::Flag(f) => Some(ResolvedTag::Flag(f)),
                })
                .collect(),
            tags,
            line: 0,
        };
        match entries.iter_mut().find(|e| e.pos == r.pos) {
            Some(e) => e.clauses.push(clause),
            None => entries.push(CatDbEntry {
                pos: r.pos.clone(),
                clauses: vec![clause],
            }),
        }
    }
    crate::lexicon::write_cat_db(&entries)
}

impl fmt::Display for ConversionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} [{}]", self.pos, self.category, self.tree_names.join(","))
    }
}
