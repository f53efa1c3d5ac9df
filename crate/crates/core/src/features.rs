//! Attribute–value graphs.
//!
//! A [`FeatureGraph`] is a flat arena of nodes; reentrancy is expressed by two
//! arcs pointing at the same node index. A [`FeatureStructure`] is a graph
//! together with a distinguished root. Categories keep one graph for all of
//! their atoms so that features can be shared across atoms.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::syntax::{self, SyntaxError};

/// Index of a node inside a [`FeatureGraph`].
pub type NodeIdx = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FsNode {
    Atomic(String),
    /// Arcs sorted by attribute. No arcs means "unconstrained".
    Complex(Vec<(String, NodeIdx)>),
}

impl FsNode {
    pub fn top() -> Self {
        FsNode::Complex(Vec::new())
    }
}

#[derive(Clone, Debug, Default)]
pub struct FeatureGraph {
    nodes: Vec<FsNode>,
}

impl FeatureGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: FsNode) -> NodeIdx {
        self.nodes.push(node);
        (self.nodes.len() - 1) as NodeIdx
    }

    pub fn node(&self, idx: NodeIdx) -> &FsNode {
        &self.nodes[idx as usize]
    }

    pub(crate) fn node_mut(&mut self, idx: NodeIdx) -> &mut FsNode {
        &mut self.nodes[idx as usize]
    }

    /// Appends every node of `other`, returning the offset to add to its indices.
    pub fn append(&mut self, other: &FeatureGraph) -> NodeIdx {
        let offset = self.nodes.len() as NodeIdx;
        for node in &other.nodes {
            self.nodes.push(match node {
                FsNode::Atomic(v) => FsNode::Atomic(v.clone()),
                FsNode::Complex(arcs) => FsNode::Complex(
                    arcs.iter().map(|(a, c)| (a.clone(), c + offset)).collect(),
                ),
            });
        }
        offset
    }

    /// Adds or replaces an arc on a complex node, keeping arcs sorted.
    pub(crate) fn set_arc(&mut self, node: NodeIdx, attr: &str, child: NodeIdx) {
        if let FsNode::Complex(arcs) = self.node_mut(node) {
            match arcs.binary_search_by(|(a, _)| a.as_str().cmp(attr)) {
                Ok(i) => arcs[i].1 = child,
                Err(i) => arcs.insert(i, (attr.to_string(), child)),
            }
        }
    }

    /// Copies the subgraph reachable from `root` into a standalone structure.
    pub fn extract(&self, root: NodeIdx) -> FeatureStructure {
        let mut graph = FeatureGraph::new();
        let mut map = HashMap::new();
        let root = copy_reachable(self, root, &mut graph, &mut map);
        FeatureStructure { graph, root }
    }
}

pub(crate) fn copy_reachable(
    src: &FeatureGraph,
    idx: NodeIdx,
    dst: &mut FeatureGraph,
    map: &mut HashMap<NodeIdx, NodeIdx>,
) -> NodeIdx {
    if let Some(&n) = map.get(&idx) {
        return n;
    }
    let new = dst.push(FsNode::top());
    map.insert(idx, new);
    let content = match src.node(idx) {
        FsNode::Atomic(v) => FsNode::Atomic(v.clone()),
        FsNode::Complex(arcs) => FsNode::Complex(
            arcs.iter()
                .map(|(a, c)| (a.clone(), copy_reachable(src, *c, dst, map)))
                .collect(),
        ),
    };
    *dst.node_mut(new) = content;
    new
}

/// Read-only access to a node graph, used by the canonical writer so the same
/// text form serves standalone graphs and live unification contexts.
pub(crate) trait FsView {
    type Id: Copy + Eq + Hash;
    fn canon(&self, id: Self::Id) -> Self::Id;
    /// Atomic value, or arcs whose children are already canonical.
    fn view(&self, id: Self::Id) -> Result<String, Vec<(String, Self::Id)>>;
}

impl FsView for FeatureGraph {
    type Id = NodeIdx;

    fn canon(&self, id: NodeIdx) -> NodeIdx {
        id
    }

    fn view(&self, id: NodeIdx) -> Result<String, Vec<(String, NodeIdx)>> {
        match self.node(id) {
            FsNode::Atomic(v) => Ok(v.clone()),
            FsNode::Complex(arcs) => Err(arcs.clone()),
        }
    }
}

/// Writes feature graphs in canonical text: arcs sorted, nodes referenced more
/// than once tagged `#k` in order of first appearance.
pub(crate) struct FsWriter<'v, V: FsView> {
    view: &'v V,
    counts: HashMap<V::Id, usize>,
    tags: HashMap<V::Id, usize>,
}

impl<'v, V: FsView> FsWriter<'v, V> {
    pub fn new(view: &'v V, roots: impl IntoIterator<Item = V::Id>) -> Self {
        let mut w = FsWriter {
            view,
            counts: HashMap::new(),
            tags: HashMap::new(),
        };
        for r in roots {
            let r = view.canon(r);
            w.count(r);
        }
        w
    }

    fn count(&mut self, id: V::Id) {
        let c = self.counts.entry(id).or_insert(0);
        *c += 1;
        if *c == 1 {
            if let Err(arcs) = self.view.view(id) {
                for (_, child) in arcs {
                    self.count(child);
                }
            }
        }
    }

    fn shared(&self, id: V::Id) -> bool {
        self.counts.get(&id).copied().unwrap_or(0) > 1
    }

    /// Returns `Some(k)` the first time a shared node is seen, `None` for
    /// unshared nodes, and `Err(k)` for repeat visits.
    fn tag(&mut self, id: V::Id) -> Result<Option<usize>, usize> {
        if !self.shared(id) {
            return Ok(None);
        }
        if let Some(&k) = self.tags.get(&id) {
            return Err(k);
        }
        let k = self.tags.len() + 1;
        self.tags.insert(id, k);
        Ok(Some(k))
    }

    /// Feature list for a category atom: empty string when there is nothing
    /// to show, otherwise `[...]`.
    pub fn write_atom(&mut self, root: V::Id, out: &mut String) {
        let root = self.view.canon(root);
        let mut items: Vec<String> = Vec::new();
        let fresh = match self.tag(root) {
            Err(k) => {
                items.push(format!("#{k}"));
                false
            }
            Ok(Some(k)) => {
                items.push(format!("#{k}"));
                true
            }
            Ok(None) => true,
        };
        if fresh {
            match self.view.view(root) {
                Ok(v) => items.push(format!("={v}")),
                Err(arcs) => {
                    for (attr, child) in arcs {
                        let mut s = format!("{attr}=");
                        self.write_value(child, &mut s);
                        items.push(s);
                    }
                }
            }
        }
        if !items.is_empty() {
            out.push('[');
            out.push_str(&items.join(","));
            out.push(']');
        }
    }

    pub fn write_value(&mut self, id: V::Id, out: &mut String) {
        let id = self.view.canon(id);
        match self.tag(id) {
            Err(k) => {
                out.push_str(&format!("#{k}"));
                return;
            }
            Ok(Some(k)) => out.push_str(&format!("#{k}:")),
            Ok(None) => {}
        }
        match self.view.view(id) {
            Ok(v) => out.push_str(&v),
            Err(arcs) => {
                out.push('[');
                for (i, (attr, child)) in arcs.into_iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push_str(&attr);
                    out.push('=');
                    self.write_value(child, out);
                }
                out.push(']');
            }
        }
    }
}

pub(crate) fn hash_text(text: &str) -> u64 {
    let mut h = DefaultHasher::new();
    text.hash(&mut h);
    h.finish()
}

/// A rooted attribute–value graph. Equality is isomorphism, sharing included.
#[derive(Clone, Debug)]
pub struct FeatureStructure {
    graph: FeatureGraph,
    root: NodeIdx,
}

impl Default for FeatureStructure {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureStructure {
    /// The unconstrained structure `[]`.
    pub fn new() -> Self {
        let mut graph = FeatureGraph::new();
        let root = graph.push(FsNode::top());
        FeatureStructure { graph, root }
    }

    pub fn from_parts(graph: FeatureGraph, root: NodeIdx) -> Self {
        FeatureStructure { graph, root }
    }

    /// Flat structure from attribute/value pairs. Later pairs win.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        let mut fs = Self::new();
        for (k, v) in pairs {
            fs.set(k.as_ref(), v.as_ref());
        }
        fs
    }

    /// Parses `[attr=value,...]`, with nested lists and `#k` sharing tags.
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        syntax::parse_feature_structure(text)
    }

    pub fn graph(&self) -> &FeatureGraph {
        &self.graph
    }

    pub fn root(&self) -> NodeIdx {
        self.root
    }

    /// Sets a flat atomic value on the root.
    pub fn set(&mut self, attr: &str, value: &str) {
        let child = self.graph.push(FsNode::Atomic(value.to_string()));
        if matches!(self.graph.node(self.root), FsNode::Complex(_)) {
            self.graph.set_arc(self.root, attr, child);
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.graph.node(self.root), FsNode::Complex(arcs) if arcs.is_empty())
    }

    fn follow(&self, path: &[&str]) -> Option<NodeIdx> {
        let mut cur = self.root;
        for step in path {
            match self.graph.node(cur) {
                FsNode::Complex(arcs) => {
                    cur = arcs.iter().find(|(a, _)| a == step)?.1;
                }
                FsNode::Atomic(_) => return None,
            }
        }
        Some(cur)
    }

    /// Atomic value at the end of `path`, if any.
    pub fn get_path(&self, path: &[&str]) -> Option<&str> {
        match self.graph.node(self.follow(path)?) {
            FsNode::Atomic(v) => Some(v),
            FsNode::Complex(_) => None,
        }
    }

    pub fn get(&self, attr: &str) -> Option<&str> {
        self.get_path(&[attr])
    }

    /// True when both paths lead to the very same node.
    pub fn is_shared(&self, a: &[&str], b: &[&str]) -> bool {
        match (self.follow(a), self.follow(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Flat `(attr, value)` pairs of atomic-valued root arcs.
    pub fn atomic_pairs(&self) -> Vec<(String, String)> {
        match self.graph.node(self.root) {
            FsNode::Complex(arcs) => arcs
                .iter()
                .filter_map(|(a, c)| match self.graph.node(*c) {
                    FsNode::Atomic(v) => Some((a.clone(), v.clone())),
                    FsNode::Complex(_) => None,
                })
                .collect(),
            FsNode::Atomic(_) => Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.graph.extract(self.root).graph.len()
    }

    pub fn canonical_text(&self) -> String {
        let mut w = FsWriter::new(&self.graph, [self.root]);
        let mut out = String::new();
        w.write_value(self.root, &mut out);
        out
    }

    /// Content digest. Isomorphic structures hash equal.
    pub fn snapshot_hash(&self) -> u64 {
        hash_text(&self.canonical_text())
    }
}

impl PartialEq for FeatureStructure {
    fn eq(&self, other: &Self) -> bool {
        self.canonical_text() == other.canonical_text()
    }
}

impl Eq for FeatureStructure {}

impl Hash for FeatureStructure {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical_text().hash(state);
    }
}

impl fmt::Display for FeatureStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

impl std::str::FromStr for FeatureStructure {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
