//! Text syntax for categories and feature structures.
//!
//! ```text
//! category := term (('/' | '\') term)*          left-associative
//! term     := '(' category ')' | atom
//! atom     := LABEL DIGIT? ('[' items? ']')?
//! items    := item (',' item)*
//! item     := '#' N                              atom-level sharing tag
//!           | ATTR '=' value
//! value    := '#' N (':' body)? | body
//! body     := SYMBOL | '[' (ATTR '=' value (',' ATTR '=' value)*)? ']'
//! ```
//!
//! Offsets in errors count characters, not bytes. The Unicode minus sign is
//! read as `-`.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::category::{AtomInventory, AtomSlot, Category, Shape, Slash};
use crate::features::{FeatureGraph, FeatureStructure, FsNode, NodeIdx};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError {
        offset,
        message: message.into(),
    })
}

enum Value {
    Sym(String),
    List(Vec<Item>),
    Tagged(usize, Option<Box<Value>>),
}

struct Item {
    offset: usize,
    attr: String,
    value: Value,
}

struct AtomAst {
    offset: usize,
    label: String,
    arg_index: Option<u8>,
    root_tag: Option<usize>,
    items: Vec<Item>,
}

enum CatAst {
    Atom(AtomAst),
    Functor(Box<CatAst>, Slash, Box<CatAst>),
}

struct Reader {
    chars: Vec<char>,
    pos: usize,
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '_' | '.')
}

fn is_attr_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '-' | '_')
}

impl Reader {
    fn new(text: &str) -> Self {
        Reader {
            chars: text.chars().map(|c| if c == '−' { '-' } else { c }).collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => err(self.pos, format!("expected '{c}', found '{found}'")),
                None => err(self.pos, format!("expected '{c}', found end of input")),
            }
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&pred) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<usize, SyntaxError> {
        let at = self.pos;
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits
            .parse()
            .or_else(|_| err(at, "expected a tag number after '#'"))
    }

    fn category(&mut self) -> Result<CatAst, SyntaxError> {
        let mut left = self.term()?;
        loop {
            self.skip_ws();
            let slash = match self.peek() {
                Some('/') => Slash::Forward,
                Some('\\') => Slash::Backward,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.term()?;
            left = CatAst::Functor(Box::new(left), slash, Box::new(right));
        }
    }

    fn term(&mut self) -> Result<CatAst, SyntaxError> {
        self.skip_ws();
        if self.eat('(') {
            let inner = self.category()?;
            self.skip_ws();
            self.expect(')')?;
            Ok(inner)
        } else {
            self.atom().map(CatAst::Atom)
        }
    }

    fn atom(&mut self) -> Result<AtomAst, SyntaxError> {
        let offset = self.pos;
        let label = self.take_while(|c| c.is_ascii_alphabetic());
        if label.is_empty() {
            return match self.peek() {
                Some(c) => err(offset, format!("expected a category, found '{c}'")),
                None => err(offset, "expected a category, found end of input"),
            };
        }
        let mut arg_index = None;
        if let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            self.pos += 1;
            arg_index = Some(d as u8);
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                return err(self.pos, "argument index must be a single digit");
            }
        }
        let mut root_tag = None;
        let mut items = Vec::new();
        if self.eat('[') && !self.eat(']') {
            loop {
                self.skip_ws();
                if self.peek() == Some('#') {
                    let at = self.pos;
                    self.pos += 1;
                    if root_tag.is_some() {
                        return err(at, "atom carries two sharing tags");
                    }
                    root_tag = Some(self.number()?);
                } else {
                    items.push(self.item()?);
                }
                self.skip_ws();
                if self.eat(']') {
                    break;
                }
                self.expect(',')?;
            }
        }
        Ok(AtomAst {
            offset,
            label,
            arg_index,
            root_tag,
            items,
        })
    }

    fn item(&mut self) -> Result<Item, SyntaxError> {
        self.skip_ws();
        let offset = self.pos;
        let attr = self.take_while(is_attr_char);
        if attr.is_empty() {
            return err(offset, "expected a feature name");
        }
        self.skip_ws();
        self.expect('=')?;
        self.skip_ws();
        let value = self.value()?;
        Ok(Item {
            offset,
            attr,
            value,
        })
    }

    fn value(&mut self) -> Result<Value, SyntaxError> {
        if self.eat('#') {
            let k = self.number()?;
            if self.eat(':') {
                let body = self.body()?;
                return Ok(Value::Tagged(k, Some(Box::new(body))));
            }
            return Ok(Value::Tagged(k, None));
        }
        self.body()
    }

    fn body(&mut self) -> Result<Value, SyntaxError> {
        if self.eat('[') {
            let mut items = Vec::new();
            self.skip_ws();
            if !self.eat(']') {
                loop {
                    items.push(self.item()?);
                    self.skip_ws();
                    if self.eat(']') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
            return Ok(Value::List(items));
        }
        let at = self.pos;
        let sym = self.take_while(is_symbol_char);
        if sym.is_empty() {
            return err(at, "expected a feature value");
        }
        Ok(Value::Sym(sym))
    }

    fn finish(&mut self) -> Result<(), SyntaxError> {
        self.skip_ws();
        match self.peek() {
            None => Ok(()),
            Some(')') => err(self.pos, "unbalanced ')'"),
            Some(c) => err(self.pos, format!("unexpected '{c}'")),
        }
    }
}

struct Builder {
    graph: FeatureGraph,
    tags: HashMap<usize, NodeIdx>,
    defined: HashSet<usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            graph: FeatureGraph::new(),
            tags: HashMap::new(),
            defined: HashSet::new(),
        }
    }

    fn tag_node(&mut self, k: usize) -> NodeIdx {
        if let Some(&n) = self.tags.get(&k) {
            return n;
        }
        let n = self.graph.push(FsNode::top());
        self.tags.insert(k, n);
        n
    }

    fn add_items(&mut self, node: NodeIdx, items: &[Item]) -> Result<(), SyntaxError> {
        for item in items {
            let child = self.value(&item.value, item.offset)?;
            match self.graph.node(node) {
                FsNode::Complex(arcs) => {
                    if arcs.iter().any(|(a, _)| *a == item.attr) {
                        return err(item.offset, format!("feature '{}' given twice", item.attr));
                    }
                }
                FsNode::Atomic(_) => {
                    return err(item.offset, "cannot add features to an atomic value");
                }
            }
            self.graph.set_arc(node, &item.attr, child);
        }
        Ok(())
    }

    fn value(&mut self, v: &Value, offset: usize) -> Result<NodeIdx, SyntaxError> {
        match v {
            Value::Sym(s) => Ok(self.graph.push(FsNode::Atomic(s.clone()))),
            Value::List(items) => {
                let n = self.graph.push(FsNode::top());
                self.add_items(n, items)?;
                Ok(n)
            }
            Value::Tagged(k, None) => Ok(self.tag_node(*k)),
            Value::Tagged(k, Some(body)) => {
                let n = self.tag_node(*k);
                if !self.defined.insert(*k) {
                    return err(offset, format!("tag #{k} given content twice"));
                }
                match body.as_ref() {
                    Value::Sym(s) => {
                        if !matches!(self.graph.node(n), FsNode::Complex(a) if a.is_empty()) {
                            return err(offset, format!("tag #{k} is both atomic and complex"));
                        }
                        *self.graph.node_mut(n) = FsNode::Atomic(s.clone());
                    }
                    Value::List(items) => self.add_items(n, items)?,
                    Value::Tagged(..) => return err(offset, "nested tag"),
                }
                Ok(n)
            }
        }
    }

    fn atom_root(&mut self, atom: &AtomAst) -> Result<NodeIdx, SyntaxError> {
        let node = match atom.root_tag {
            Some(k) => self.tag_node(k),
            None => self.graph.push(FsNode::top()),
        };
        if matches!(self.graph.node(node), FsNode::Atomic(_)) {
            return err(atom.offset, "atom features must be a feature list");
        }
        self.add_items(node, &atom.items)?;
        Ok(node)
    }

    fn shape(&mut self, ast: &CatAst, inventory: &AtomInventory) -> Result<Shape, SyntaxError> {
        match ast {
            CatAst::Atom(atom) => {
                if !inventory.contains(&atom.label) {
                    return err(atom.offset, format!("unknown atom label '{}'", atom.label));
                }
                let fs = self.atom_root(atom)?;
                Ok(Shape::Atom(AtomSlot {
                    label: atom.label.clone(),
                    arg_index: atom.arg_index,
                    fs,
                }))
            }
            CatAst::Functor(res, slash, arg) => {
                let r = self.shape(res, inventory)?;
                let a = self.shape(arg, inventory)?;
                Ok(Shape::Functor(Box::new(r), *slash, Box::new(a)))
            }
        }
    }
}

pub(crate) fn parse_category(text: &str, inventory: &AtomInventory) -> Result<Category, SyntaxError> {
    let mut reader = Reader::new(text);
    reader.skip_ws();
    if reader.peek().is_none() {
        return err(0, "empty category");
    }
    let ast = reader.category()?;
    reader.finish()?;
    let mut b = Builder::new();
    let shape = b.shape(&ast, inventory)?;
    Ok(Category::from_parts(shape, b.graph))
}

pub(crate) fn parse_feature_structure(text: &str) -> Result<FeatureStructure, SyntaxError> {
    let mut reader = Reader::new(text);
    reader.skip_ws();
    let v = reader.value()?;
    reader.finish()?;
    let mut b = Builder::new();
    let root = b.value(&v, 0)?;
    Ok(FeatureStructure::from_parts(b.graph, root))
}
