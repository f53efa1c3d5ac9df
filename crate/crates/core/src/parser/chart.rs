//! The packed CKY chart.
//!
//! Dump format, one item per line:
//!
//! ```text
//! #ID START-END CATEGORY <= BACK; BACK...
//! ```
//!
//! where a back pointer is `lex T:K` (entry K of token T), `RULE #L #R`, or
//! for coordination `conj #C #X` (the half-built `Conj X` item, marked with a
//! trailing `[conj]` on its category) and `Coord #L #P`.

use std::collections::HashMap;
use std::fmt::Write;

use crate::category::{Category, RuleName, Shape};
use crate::combinators::{combine_in, RuleSet};
use crate::unify::{unify_categories, UnifyContext};

use super::derivation::Derivation;
use super::TokenAssignment;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackPointer {
    Lex { token: usize, entry: usize },
    Binary { rule: RuleName, left: ItemId, right: ItemId },
    /// A conjunction followed by its right conjunct.
    ConjPartial { conj: ItemId, right: ItemId },
    /// Left conjunct plus a [`BackPointer::ConjPartial`] item.
    Coord { left: ItemId, partial: ItemId },
}

#[derive(Clone, Debug)]
pub struct ChartItem {
    pub span: (usize, usize),
    pub category: Category,
    /// A `Conj X` item still waiting for its left conjunct.
    pub partial: bool,
    pub backs: Vec<BackPointer>,
}

#[derive(Clone, Debug)]
pub struct Chart {
    assignments: Vec<TokenAssignment>,
    items: Vec<ChartItem>,
    cells: Vec<Vec<Vec<ItemId>>>,
    counts: Vec<u128>,
}

struct Builder<'r> {
    ctx: UnifyContext,
    rules: &'r RuleSet,
    items: Vec<ChartItem>,
    shapes: Vec<Shape>,
    cells: Vec<Vec<Vec<ItemId>>>,
    index: HashMap<(usize, usize, bool, String), ItemId>,
}

impl Builder<'_> {
    fn add(&mut self, span: (usize, usize), partial: bool, shape: Shape, back: BackPointer) {
        let key = (span.0, span.1, partial, self.ctx.shape_key(&shape));
        if let Some(&id) = self.index.get(&key) {
            let backs = &mut self.items[id.0].backs;
            if !backs.contains(&back) {
                backs.push(back);
            }
            return;
        }
        let id = ItemId(self.items.len());
        self.items.push(ChartItem {
            span,
            category: self.ctx.export_category(&shape),
            partial,
            backs: vec![back],
        });
        self.shapes.push(shape);
        self.cells[span.0][span.1].push(id);
        self.index.insert(key, id);
    }

    fn is_conj(&self, id: ItemId) -> bool {
        let item = &self.items[id.0];
        !item.partial && item.category.label() == Some("Conj")
    }

    fn combine(&mut self, span: (usize, usize), l: ItemId, r: ItemId) {
        let (lp, rp) = (self.items[l.0].partial, self.items[r.0].partial);
        let coord = self.rules.is_enabled(RuleName::Coord);
        match (lp, rp) {
            (false, false) => {
                let results = combine_in(&mut self.ctx, self.rules, &self.shapes[l.0], &self.shapes[r.0]);
                for (rule, shape) in results {
                    self.add(span, false, shape, BackPointer::Binary { rule, left: l, right: r });
                }
                if coord && self.is_conj(l) && !self.is_conj(r) {
                    let shape = self.shapes[r.0].clone();
                    self.add(span, true, shape, BackPointer::ConjPartial { conj: l, right: r });
                }
            }
            (false, true) if coord => {
                if let Ok(shape) = self.ctx.unify_shapes(&self.shapes[l.0], &self.shapes[r.0]) {
                    self.add(span, false, shape, BackPointer::Coord { left: l, partial: r });
                }
            }
            _ => {}
        }
    }
}

impl Chart {
    /// Fills the chart bottom-up by span width.
    pub fn build(assignments: Vec<TokenAssignment>, rules: &RuleSet) -> Chart {
        let n = assignments.len();
        let mut b = Builder {
            ctx: UnifyContext::new(),
            rules,
            items: Vec::new(),
            shapes: Vec::new(),
            cells: vec![vec![Vec::new(); n + 1]; n + 1],
            index: HashMap::new(),
        };
        for (i, a) in assignments.iter().enumerate() {
            for (k, e) in a.surviving.iter().enumerate() {
                let shape = b.ctx.import_category(&e.category);
                b.add((i, i + 1), false, shape, BackPointer::Lex { token: i, entry: k });
            }
        }
        for width in 2..=n {
            for start in 0..=n - width {
                let end = start + width;
                for split in start + 1..end {
                    let left = b.cells[start][split].clone();
                    let right = b.cells[split][end].clone();
                    for &l in &left {
                        for &r in &right {
                            b.combine((start, end), l, r);
                        }
                    }
                }
            }
        }
        let mut chart = Chart {
            assignments,
            items: b.items,
            cells: b.cells,
            counts: Vec::new(),
        };
        chart.counts = chart.count_all();
        chart
    }

    /// Children always precede parents, so one forward pass suffices.
    fn count_all(&self) -> Vec<u128> {
        let mut counts: Vec<u128> = Vec::with_capacity(self.items.len());
        for item in &self.items {
            let total = item.backs.iter().fold(0u128, |acc, back| {
                let c = match *back {
                    BackPointer::Lex { .. } => 1,
                    BackPointer::Binary { left, right, .. } => counts[left.0].saturating_mul(counts[right.0]),
                    BackPointer::ConjPartial { conj, right } => counts[conj.0].saturating_mul(counts[right.0]),
                    BackPointer::Coord { left, partial } => counts[left.0].saturating_mul(counts[partial.0]),
                };
                acc.saturating_add(c)
            });
            counts.push(total);
        }
        counts
    }

    /// Sentence length in tokens.
    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn assignments(&self) -> &[TokenAssignment] {
        &self.assignments
    }

    pub fn items(&self) -> &[ChartItem] {
        &self.items
    }

    pub fn item(&self, id: ItemId) -> &ChartItem {
        &self.items[id.0]
    }

    pub fn item_count(&self) -> usize {
        self.items.len()
    }

    pub fn cell(&self, start: usize, end: usize) -> &[ItemId] {
        &self.cells[start][end]
    }

    /// Tokens with no surviving category.
    pub fn empty_tokens(&self) -> Vec<usize> {
        self.assignments
            .iter()
            .filter(|a| a.surviving.is_empty())
            .map(|a| a.token_index)
            .collect()
    }

    /// Complete items over the whole sentence.
    pub fn roots(&self) -> Vec<ItemId> {
        if self.is_empty() {
            return Vec::new();
        }
        self.cell(0, self.len())
            .iter()
            .copied()
            .filter(|id| !self.item(*id).partial)
            .collect()
    }

    /// Roots whose category unifies with `goal`.
    pub fn goal_items(&self, goal: &Category) -> Vec<ItemId> {
        self.roots()
            .into_iter()
            .filter(|id| unify_categories(&self.item(*id).category, goal).is_ok())
            .collect()
    }

    pub fn parsed(&self, goal: &Category) -> bool {
        !self.goal_items(goal).is_empty()
    }

    /// Derivations packed into an item (saturating).
    pub fn derivation_count(&self, id: ItemId) -> u128 {
        self.counts[id.0]
    }

    pub fn goal_derivation_count(&self, goal: &Category) -> u128 {
        self.goal_items(goal)
            .iter()
            .fold(0u128, |acc, id| acc.saturating_add(self.derivation_count(*id)))
    }

    /// Every root category with its derivation count, sorted by canonical
    /// text.
    pub fn root_counts(&self) -> Vec<(Category, u128)> {
        let mut out: Vec<(Category, u128)> = self
            .roots()
            .into_iter()
            .map(|id| (self.item(id).category.clone(), self.derivation_count(id)))
            .collect();
        out.sort_by_key(|(c, _)| c.canonical_key());
        out
    }

    /// Up to `limit` derivations over goal items, in item then back-pointer
    /// order.
    pub fn derivations(&self, goal: &Category, limit: usize) -> Vec<Derivation> {
        let mut memo = HashMap::new();
        let mut out = Vec::new();
        for id in self.goal_items(goal) {
            if out.len() >= limit {
                break;
            }
            let room = limit - out.len();
            out.extend(self.unpack(id, limit, &mut memo).iter().take(room).cloned());
        }
        out
    }

    fn unpack(&self, id: ItemId, limit: usize, memo: &mut HashMap<ItemId, Vec<Derivation>>) -> Vec<Derivation> {
        if let Some(d) = memo.get(&id) {
            return d.clone();
        }
        let item = self.item(id);
        let mut out: Vec<Derivation> = Vec::new();
        for back in &item.backs {
            if out.len() >= limit {
                break;
            }
            match *back {
                BackPointer::Lex { token, entry } => out.push(Derivation::Leaf {
                    token,
                    entry: self.assignments[token].surviving[entry].clone(),
                }),
                BackPointer::Binary { rule, left, right } => {
                    let ls = self.unpack(left, limit, memo);
                    let rs = self.unpack(right, limit, memo);
                    'outer: for l in &ls {
                        for r in &rs {
                            if out.len() >= limit {
                                break 'outer;
                            }
                            out.push(Derivation::Node {
                                rule,
                                category: item.category.clone(),
                                children: vec![l.clone(), r.clone()],
                            });
                        }
                    }
                }
                BackPointer::ConjPartial { conj, right } => {
                    let cs = self.unpack(conj, limit, memo);
                    let rs = self.unpack(right, limit, memo);
                    'outer: for c in &cs {
                        for r in &rs {
                            if out.len() >= limit {
                                break 'outer;
                            }
                            out.push(Derivation::Node {
                                rule: RuleName::Coord,
                                category: item.category.clone(),
                                children: vec![c.clone(), r.clone()],
                            });
                        }
                    }
                }
                BackPointer::Coord { left, partial } => {
                    let ls = self.unpack(left, limit, memo);
                    let ps = self.unpack(partial, limit, memo);
                    'outer: for l in &ls {
                        for p in &ps {
                            if out.len() >= limit {
                                break 'outer;
                            }
                            let Derivation::Node { children, .. } = p else {
                                unreachable!("partial items unpack to nodes")
                            };
                            out.push(Derivation::Node {
                                rule: RuleName::Coord,
                                category: item.category.clone(),
                                children: vec![l.clone(), children[0].clone(), children[1].clone()],
                            });
                        }
                    }
                }
            }
        }
        memo.insert(id, out.clone());
        out
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, item) in self.items.iter().enumerate() {
            let backs: Vec<String> = item
                .backs
                .iter()
                .map(|b| match b {
                    BackPointer::Lex { token, entry } => format!("lex {token}:{entry}"),
                    BackPointer::Binary { rule, left, right } => format!("{rule} #{} #{}", left.0, right.0),
                    BackPointer::ConjPartial { conj, right } => format!("conj #{} #{}", conj.0, right.0),
                    BackPointer::Coord { left, partial } => format!("Coord #{} #{}", left.0, partial.0),
                })
                .collect();
            let mark = if item.partial { "[conj]" } else { "" };
            let _ = writeln!(
                out,
                "#{i} {}-{} {}{mark} <= {}",
                item.span.0,
                item.span.1,
                item.category,
                backs.join("; ")
            );
        }
        out
    }
}
