//! Quasi-destructive graph unification.
//!
//! Unification writes only generation-stamped scratch slots (forward
//! pointers, complement arcs, copy marks). On success the result is copied
//! out through those slots; either way the generation counter is then
//! advanced, which invalidates every scratch slot at once and leaves the
//! operands exactly as they were.
//!
//! Nodes live in a [`UnifyContext`]. Immutable [`FeatureStructure`]s and
//! [`Category`]s are imported into a context before they take part in
//! unification.

use std::collections::HashMap;
use std::fmt;

use crate::category::{pair_atoms, write_shape, Category, Shape};
use crate::features::{hash_text, FeatureGraph, FeatureStructure, FsNode, FsView, FsWriter, NodeIdx};

/// Index of a node inside a [`UnifyContext`].
pub type NodeId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClashKind {
    /// Two different values met, or an atomic value met a complex one.
    Values { left: String, right: String },
    /// The unified graph would contain a cycle.
    Cycle,
    /// A category atom's feature root became atomic.
    AtomicRoot,
}

/// Why unification failed, with the attribute path where it happened.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clash {
    pub path: Vec<String>,
    pub kind: ClashKind,
}

impl fmt::Display for Clash {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() {
            "<root>".to_string()
        } else {
            self.path.join(".")
        };
        match &self.kind {
            ClashKind::Values { left, right } => write!(f, "clash at {path}: {left} vs {right}"),
            ClashKind::Cycle => write!(f, "cycle through {path}"),
            ClashKind::AtomicRoot => write!(f, "atomic value for category features at {path}"),
        }
    }
}

impl std::error::Error for Clash {}

pub type UnifyOutcome = Result<FeatureStructure, Clash>;

#[derive(Clone, Debug)]
enum Content {
    Atomic(String),
    Complex(Vec<(String, NodeId)>),
}

#[derive(Clone, Copy, Debug)]
enum CopyMark {
    InProgress,
    Done(NodeId),
}

#[derive(Clone, Debug)]
struct Node {
    content: Content,
    forward: NodeId,
    forward_gen: u64,
    comp_arcs: Vec<(String, NodeId)>,
    comp_gen: u64,
    copy: CopyMark,
    copy_gen: u64,
}

impl Node {
    fn new(content: Content) -> Self {
        Node {
            content,
            forward: 0,
            forward_gen: 0,
            comp_arcs: Vec::new(),
            comp_gen: 0,
            copy: CopyMark::InProgress,
            copy_gen: 0,
        }
    }
}

/// Node store plus the global generation counter. One per in-flight parse.
#[derive(Debug)]
pub struct UnifyContext {
    nodes: Vec<Node>,
    generation: u64,
}

impl Default for UnifyContext {
    fn default() -> Self {
        Self::new()
    }
}

impl UnifyContext {
    pub fn new() -> Self {
        UnifyContext {
            nodes: Vec::new(),
            generation: 1,
        }
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn alloc(&mut self, content: Content) -> NodeId {
        self.nodes.push(Node::new(content));
        (self.nodes.len() - 1) as NodeId
    }

    /// Copies a whole graph in; returns the context id of every graph node.
    pub fn import_graph(&mut self, graph: &FeatureGraph) -> Vec<NodeId> {
        let base = self.nodes.len() as NodeId;
        (0..graph.len() as NodeIdx)
            .map(|i| {
                let content = match graph.node(i) {
                    FsNode::Atomic(v) => Content::Atomic(v.clone()),
                    FsNode::Complex(arcs) => {
                        Content::Complex(arcs.iter().map(|(a, c)| (a.clone(), base + c)).collect())
                    }
                };
                self.alloc(content)
            })
            .collect()
    }

    pub fn import(&mut self, fs: &FeatureStructure) -> NodeId {
        self.import_graph(fs.graph())[fs.root() as usize]
    }

    fn deref(&self, mut id: NodeId) -> NodeId {
        loop {
            let n = &self.nodes[id as usize];
            if n.forward_gen == self.generation {
                id = n.forward;
            } else {
                return id;
            }
        }
    }

    fn live_comp_arcs(&self, id: NodeId) -> &[(String, NodeId)] {
        let n = &self.nodes[id as usize];
        if n.comp_gen == self.generation {
            &n.comp_arcs
        } else {
            &[]
        }
    }

    /// Permanent plus live complement arcs, sorted. `None` for atomic nodes.
    fn arcs(&self, id: NodeId) -> Option<Vec<(String, NodeId)>> {
        match &self.nodes[id as usize].content {
            Content::Atomic(_) => None,
            Content::Complex(arcs) => {
                let mut all = arcs.clone();
                all.extend(self.live_comp_arcs(id).iter().cloned());
                all.sort_by(|a, b| a.0.cmp(&b.0));
                Some(all)
            }
        }
    }

    fn find_arc(&self, id: NodeId, attr: &str) -> Option<NodeId> {
        if let Content::Complex(arcs) = &self.nodes[id as usize].content {
            if let Some((_, c)) = arcs.iter().find(|(a, _)| a == attr) {
                return Some(*c);
            }
        }
        self.live_comp_arcs(id)
            .iter()
            .find(|(a, _)| a == attr)
            .map(|(_, c)| *c)
    }

    fn is_top(&self, id: NodeId) -> bool {
        matches!(&self.nodes[id as usize].content, Content::Complex(a) if a.is_empty())
            && self.live_comp_arcs(id).is_empty()
    }

    fn set_forward(&mut self, from: NodeId, to: NodeId) {
        let g = self.generation;
        let n = &mut self.nodes[from as usize];
        n.forward = to;
        n.forward_gen = g;
    }

    fn add_comp_arc(&mut self, id: NodeId, attr: String, child: NodeId) {
        let g = self.generation;
        let n = &mut self.nodes[id as usize];
        if n.comp_gen != g {
            n.comp_arcs.clear();
            n.comp_gen = g;
        }
        n.comp_arcs.push((attr, child));
    }

    fn describe(&self, id: NodeId) -> String {
        match &self.nodes[id as usize].content {
            Content::Atomic(v) => v.clone(),
            Content::Complex(_) => "[...]".to_string(),
        }
    }

    fn unify1(&mut self, a: NodeId, b: NodeId, path: &mut Vec<String>) -> Result<(), Clash> {
        let a = self.deref(a);
        let b = self.deref(b);
        if a == b {
            return Ok(());
        }
        if self.is_top(a) {
            self.set_forward(a, b);
            return Ok(());
        }
        if self.is_top(b) {
            self.set_forward(b, a);
            return Ok(());
        }
        let clash = |ctx: &Self, path: &Vec<String>| Clash {
            path: path.clone(),
            kind: ClashKind::Values {
                left: ctx.describe(a),
                right: ctx.describe(b),
            },
        };
        let b_arcs = match (&self.nodes[a as usize].content, &self.nodes[b as usize].content) {
            (Content::Atomic(x), Content::Atomic(y)) => {
                if x == y {
                    self.set_forward(b, a);
                    return Ok(());
                }
                return Err(clash(self, path));
            }
            (Content::Complex(_), Content::Complex(_)) => self.arcs(b).unwrap_or_default(),
            _ => return Err(clash(self, path)),
        };
        // forward first so reentrant paths back into b terminate
        self.set_forward(b, a);
        for (attr, b_child) in b_arcs {
            let a_now = self.deref(a);
            match self.find_arc(a_now, &attr) {
                Some(a_child) => {
                    path.push(attr);
                    self.unify1(a_child, b_child, path)?;
                    path.pop();
                }
                None => self.add_comp_arc(a_now, attr, b_child),
            }
        }
        Ok(())
    }

    fn copy(&mut self, id: NodeId, path: &mut Vec<String>) -> Result<NodeId, Clash> {
        let d = self.deref(id);
        let g = self.generation;
        {
            let n = &self.nodes[d as usize];
            if n.copy_gen == g {
                return match n.copy {
                    CopyMark::Done(c) => Ok(c),
                    CopyMark::InProgress => Err(Clash {
                        path: path.clone(),
                        kind: ClashKind::Cycle,
                    }),
                };
            }
        }
        {
            let n = &mut self.nodes[d as usize];
            n.copy = CopyMark::InProgress;
            n.copy_gen = g;
        }
        let content = match self.arcs(d) {
            None => match &self.nodes[d as usize].content {
                Content::Atomic(v) => Content::Atomic(v.clone()),
                Content::Complex(_) => unreachable!(),
            },
            Some(arcs) => {
                let mut out = Vec::with_capacity(arcs.len());
                for (attr, child) in arcs {
                    path.push(attr.clone());
                    let c = self.copy(child, path)?;
                    path.pop();
                    out.push((attr, c));
                }
                Content::Complex(out)
            }
        };
        let new = self.alloc(content);
        self.nodes[d as usize].copy = CopyMark::Done(new);
        Ok(new)
    }

    /// Unifies every pair, then copies `keep` out of the unified graph. The
    /// generation advances exactly once whatever the outcome.
    pub fn unify_and_copy(&mut self, pairs: &[(NodeId, NodeId)], keep: &[NodeId]) -> Result<Vec<NodeId>, Clash> {
        self.run(pairs, keep, false)
    }

    fn run(&mut self, pairs: &[(NodeId, NodeId)], keep: &[NodeId], complex_roots: bool) -> Result<Vec<NodeId>, Clash> {
        let result = self.run_inner(pairs, keep, complex_roots);
        self.generation += 1;
        result
    }

    fn run_inner(&mut self, pairs: &[(NodeId, NodeId)], keep: &[NodeId], complex_roots: bool) -> Result<Vec<NodeId>, Clash> {
        let mut path = Vec::new();
        for &(a, b) in pairs {
            self.unify1(a, b, &mut path)?;
        }
        if complex_roots {
            for &k in keep {
                let d = self.deref(k);
                if matches!(self.nodes[d as usize].content, Content::Atomic(_)) {
                    return Err(Clash {
                        path: Vec::new(),
                        kind: ClashKind::AtomicRoot,
                    });
                }
            }
        }
        keep.iter().map(|&k| self.copy(k, &mut path)).collect()
    }

    /// Unifies two nodes; on success returns a fresh copy of the result.
    pub fn unify(&mut self, a: NodeId, b: NodeId) -> Result<NodeId, Clash> {
        self.run(&[(a, b)], &[a], false).map(|v| v[0])
    }

    /// Copies the observable structure under `roots` into a standalone graph.
    pub fn export(&self, roots: &[NodeId]) -> (FeatureGraph, Vec<NodeIdx>) {
        let mut graph = FeatureGraph::new();
        let mut map = HashMap::new();
        let ids = roots.iter().map(|&r| self.export_rec(r, &mut graph, &mut map)).collect();
        (graph, ids)
    }

    fn export_rec(&self, id: NodeId, graph: &mut FeatureGraph, map: &mut HashMap<NodeId, NodeIdx>) -> NodeIdx {
        let d = self.deref(id);
        if let Some(&n) = map.get(&d) {
            return n;
        }
        let new = graph.push(FsNode::top());
        map.insert(d, new);
        let content = match self.arcs(d) {
            None => match &self.nodes[d as usize].content {
                Content::Atomic(v) => FsNode::Atomic(v.clone()),
                Content::Complex(_) => unreachable!(),
            },
            Some(arcs) => FsNode::Complex(
                arcs.into_iter()
                    .map(|(a, c)| (a, self.export_rec(c, graph, map)))
                    .collect(),
            ),
        };
        *graph.node_mut(new) = content;
        new
    }

    pub fn extract(&self, root: NodeId) -> FeatureStructure {
        let (g, ids) = self.export(&[root]);
        FeatureStructure::from_parts(g, ids[0])
    }

    /// Canonical text of what is observable from `root` right now, scratch
    /// slots of the current generation included.
    pub fn observable_text(&self, root: NodeId) -> String {
        let mut w = FsWriter::new(self, [root]);
        let mut out = String::new();
        w.write_value(root, &mut out);
        out
    }

    /// Digest of the observable structure under `root`.
    pub fn snapshot_hash(&self, root: NodeId) -> u64 {
        hash_text(&self.observable_text(root))
    }

    pub(crate) fn import_category(&mut self, cat: &Category) -> Shape {
        let ids = self.import_graph(&cat.graph);
        cat.shape.remap(&mut |i| ids[i as usize])
    }

    pub(crate) fn export_category(&self, shape: &Shape) -> Category {
        let (graph, ids) = self.export(&shape.fs_ids());
        Category::from_parts(shape.rebuild(&ids), graph)
    }

    /// Canonical text of a shape living in this context, indices suppressed.
    pub(crate) fn shape_key(&self, shape: &Shape) -> String {
        write_shape(shape, self, false)
    }

    /// Unifies the atom pairs and copies `template` out with the resulting
    /// bindings.
    pub(crate) fn instantiate(&mut self, pairs: &[(NodeId, NodeId)], template: &Shape) -> Result<Shape, Clash> {
        let keep = template.fs_ids();
        let ids = self.run(pairs, &keep, true)?;
        Ok(template.rebuild(&ids))
    }

    /// Category unification inside this context.
    pub(crate) fn unify_shapes(&mut self, x: &Shape, y: &Shape) -> Result<Shape, CategoryMismatch> {
        let mut pairs = Vec::new();
        pair_atoms(x, y, &mut pairs).map_err(CategoryMismatch::Skeleton)?;
        self.instantiate(&pairs, x).map_err(CategoryMismatch::Features)
    }
}

impl FsView for UnifyContext {
    type Id = NodeId;

    fn canon(&self, id: NodeId) -> NodeId {
        self.deref(id)
    }

    fn view(&self, id: NodeId) -> Result<String, Vec<(String, NodeId)>> {
        let d = self.deref(id);
        match self.arcs(d) {
            None => match &self.nodes[d as usize].content {
                Content::Atomic(v) => Ok(v.clone()),
                Content::Complex(_) => unreachable!(),
            },
            Some(arcs) => Err(arcs.into_iter().map(|(a, c)| (a, self.deref(c))).collect()),
        }
    }
}

/// Unifies `fs` into the atoms at `positions` (text order) of `cat`. Sharing
/// inside the category carries the new features to every linked atom.
pub(crate) fn install_features(cat: &Category, positions: &[usize], fs: &FeatureStructure) -> Result<Category, Clash> {
    let mut ctx = UnifyContext::new();
    let shape = ctx.import_category(cat);
    let atoms = shape.fs_ids();
    let mut pairs = Vec::with_capacity(positions.len());
    for &p in positions {
        let node = ctx.import(fs);
        pairs.push((atoms[p], node));
    }
    let out = ctx.instantiate(&pairs, &shape)?;
    Ok(ctx.export_category(&out))
}

/// Unifies two standalone structures in a private context.
pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> UnifyOutcome {
    let mut ctx = UnifyContext::new();
    let x = ctx.import(a);
    let y = ctx.import(b);
    let r = ctx.unify(x, y)?;
    Ok(ctx.extract(r))
}

pub fn snapshot_hash(fs: &FeatureStructure) -> u64 {
    fs.snapshot_hash()
}

/// Why two categories failed to unify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryMismatch {
    /// Different slash, atom label or depth.
    Skeleton(String),
    Features(Clash),
}

impl fmt::Display for CategoryMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoryMismatch::Skeleton(why) => write!(f, "skeleton mismatch: {why}"),
            CategoryMismatch::Features(c) => write!(f, "feature {c}"),
        }
    }
}

impl std::error::Error for CategoryMismatch {}

/// Succeeds iff the skeletons match and every paired atom's features unify.
/// The result takes its argument indices from `x`.
pub fn unify_categories(x: &Category, y: &Category) -> Result<Category, CategoryMismatch> {
    let mut ctx = UnifyContext::new();
    let xs = ctx.import_category(x);
    let ys = ctx.import_category(y);
    let r = ctx.unify_shapes(&xs, &ys)?;
    Ok(ctx.export_category(&r))
}
