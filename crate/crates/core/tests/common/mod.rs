//! Shared fixtures: the sample grammar, corpus files and a reference
//! unifier that knows nothing about generations or scratch slots.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::OnceLock;

use ccg_core::{CompiledLexicon, FeatureGraph, FeatureStructure, FsNode, Lexicon};
use rand::Rng;

pub fn grammar_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../grammar")
}

pub fn sample_dir() -> PathBuf {
    grammar_dir().join("sample")
}

pub fn sample_lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| Lexicon::load_dir(&sample_dir()).expect("sample grammar loads"))
}

pub fn sample_compiled() -> &'static CompiledLexicon {
    static LEX: OnceLock<CompiledLexicon> = OnceLock::new();
    LEX.get_or_init(|| sample_lexicon().compile().expect("sample grammar compiles").0)
}

/// Non-comment, non-blank lines of a file under `grammar/corpus`.
pub fn corpus(name: &str) -> Vec<String> {
    let path = grammar_dir().join("corpus").join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

pub fn toks(s: &str) -> Vec<String> {
    ccg_core::tokenize(s)
}

#[derive(Clone, Debug)]
enum Node {
    Atom(String),
    /// Empty map is the unconstrained value.
    Map(BTreeMap<String, usize>),
}

/// Copy-first unifier: both inputs are copied into one union-find arena,
/// merged destructively there, and the result checked for cycles.
pub struct NaiveUnifier {
    nodes: Vec<Node>,
    parent: Vec<usize>,
}

impl NaiveUnifier {
    fn new() -> Self {
        NaiveUnifier {
            nodes: Vec::new(),
            parent: Vec::new(),
        }
    }

    fn load(&mut self, fs: &FeatureStructure) -> usize {
        let g = fs.graph();
        let base = self.nodes.len();
        for i in 0..g.len() {
            let node = match g.node(i as u32) {
                FsNode::Atomic(v) => Node::Atom(v.clone()),
                FsNode::Complex(arcs) => Node::Map(arcs.iter().map(|(a, c)| (a.clone(), base + *c as usize)).collect()),
            };
            self.nodes.push(node);
            self.parent.push(base + i);
        }
        base + fs.root() as usize
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn merge(&mut self, a: usize, b: usize) -> bool {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return true;
        }
        match (self.nodes[a].clone(), self.nodes[b].clone()) {
            (Node::Map(m), _) if m.is_empty() => {
                self.parent[a] = b;
                true
            }
            (_, Node::Map(m)) if m.is_empty() => {
                self.parent[b] = a;
                true
            }
            (Node::Atom(x), Node::Atom(y)) => {
                self.parent[b] = a;
                x == y
            }
            (Node::Map(_), Node::Map(mb)) => {
                self.parent[b] = a;
                for (attr, child) in mb {
                    // `a` may itself have been merged away by a reentrant path
                    let a = self.find(a);
                    let existing = match &self.nodes[a] {
                        Node::Map(ma) => ma.get(&attr).copied(),
                        Node::Atom(_) => return false,
                    };
                    match existing {
                        Some(ac) => {
                            if !self.merge(ac, child) {
                                return false;
                            }
                        }
                        None => {
                            if let Node::Map(ma) = &mut self.nodes[a] {
                                ma.insert(attr, child);
                            }
                        }
                    }
                }
                true
            }
            _ => false,
        }
    }

    fn has_cycle(&mut self, x: usize, on_path: &mut Vec<usize>, done: &mut Vec<usize>) -> bool {
        let x = self.find(x);
        if on_path.contains(&x) {
            return true;
        }
        if done.contains(&x) {
            return false;
        }
        on_path.push(x);
        let kids: Vec<usize> = match &self.nodes[x] {
            Node::Map(m) => m.values().copied().collect(),
            Node::Atom(_) => Vec::new(),
        };
        for k in kids {
            if self.has_cycle(k, on_path, done) {
                return true;
            }
        }
        on_path.pop();
        done.push(x);
        false
    }

    fn export(&mut self, x: usize, out: &mut Vec<FsNode>, map: &mut BTreeMap<usize, u32>) -> u32 {
        let x = self.find(x);
        if let Some(&n) = map.get(&x) {
            return n;
        }
        let id = out.len() as u32;
        out.push(FsNode::top());
        map.insert(x, id);
        let node = match self.nodes[x].clone() {
            Node::Atom(v) => FsNode::Atomic(v),
            Node::Map(m) => FsNode::Complex(m.into_iter().map(|(a, c)| (a, self.export(c, out, map))).collect()),
        };
        out[id as usize] = node;
        id
    }

    /// `None` on clash or cycle.
    pub fn unify(a: &FeatureStructure, b: &FeatureStructure) -> Option<FeatureStructure> {
        let mut u = NaiveUnifier::new();
        let ra = u.load(a);
        let rb = u.load(b);
        if !u.merge(ra, rb) {
            return None;
        }
        if u.has_cycle(ra, &mut Vec::new(), &mut Vec::new()) {
            return None;
        }
        let mut nodes = Vec::new();
        let root = u.export(ra, &mut nodes, &mut BTreeMap::new());
        let mut graph = FeatureGraph::new();
        for n in nodes {
            graph.push(n);
        }
        Some(FeatureStructure::from_parts(graph, root))
    }
}

const ATTRS: [&str; 4] = ["a", "b", "c", "d"];
const VALUES: [&str; 3] = ["x", "y", "z"];

/// A random acyclic structure of at most `max_nodes` nodes. Arcs only point
/// to later nodes, and later nodes may be shared, so reentrancy is common.
pub fn random_fs(rng: &mut impl Rng, max_nodes: usize) -> FeatureStructure {
    let n = rng.gen_range(1..=max_nodes);
    let mut contents: Vec<FsNode> = Vec::with_capacity(n);
    for i in 0..n {
        let last = i + 1 == n;
        let roll: f64 = rng.gen();
        let node = if i > 0 && (last || roll < 0.35) {
            if rng.gen_bool(0.15) {
                FsNode::top()
            } else {
                FsNode::Atomic(VALUES[rng.gen_range(0..VALUES.len())].to_string())
            }
        } else {
            let mut arcs = Vec::new();
            for attr in ATTRS {
                if i + 1 < n && rng.gen_bool(0.45) {
                    arcs.push((attr.to_string(), rng.gen_range(i + 1..n) as u32));
                }
            }
            FsNode::Complex(arcs)
        };
        contents.push(node);
    }
    let mut g = FeatureGraph::new();
    for c in contents {
        g.push(c);
    }
    FeatureStructure::from_parts(g, 0)
}
