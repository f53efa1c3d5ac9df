//! Unpacked derivation trees.

use crate::category::{Category, RuleName};
use crate::combinators::{
    backward_apply, backward_compose, backward_cross_compose, coordinate, forward_apply, forward_compose, RuleSet,
};
use crate::lexicon::LexEntry;

use super::raise_rule;

#[derive(Clone, Debug, PartialEq)]
pub enum Derivation {
    Leaf { token: usize, entry: LexEntry },
    /// Binary rules have two children; coordination has three, the middle
    /// one being the conjunction.
    Node {
        rule: RuleName,
        category: Category,
        children: Vec<Derivation>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{rule} node {category}: {message}")]
pub struct VerifyError {
    pub rule: RuleName,
    pub category: String,
    pub message: String,
}

impl Derivation {
    pub fn category(&self) -> &Category {
        match self {
            Derivation::Leaf { entry, .. } => &entry.category,
            Derivation::Node { category, .. } => category,
        }
    }

    /// `Lex` for base leaves, the raising rule for raised ones.
    pub fn rule(&self) -> RuleName {
        match self {
            Derivation::Leaf { entry, .. } => raise_rule(entry).unwrap_or(RuleName::Lex),
            Derivation::Node { rule, .. } => *rule,
        }
    }

    pub fn children(&self) -> &[Derivation] {
        match self {
            Derivation::Leaf { .. } => &[],
            Derivation::Node { children, .. } => children,
        }
    }

    pub fn leaves(&self) -> Vec<(usize, &LexEntry)> {
        let mut out = Vec::new();
        self.walk(&mut |d| {
            if let Derivation::Leaf { token, entry } = d {
                out.push((*token, entry));
            }
        });
        out
    }

    fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Derivation)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Every rule label in the tree, leaves included, pre-order.
    pub fn rules_used(&self) -> Vec<RuleName> {
        let mut out = Vec::new();
        self.walk(&mut |d| out.push(d.rule()));
        out
    }

    pub fn contains_rule(&self, rule: RuleName) -> bool {
        self.rules_used().contains(&rule)
    }

    /// A leaf whose category is a forward-raised subject `T/(T\X)`.
    pub fn has_raised_subject_leaf(&self) -> bool {
        self.leaves().iter().any(|(_, e)| {
            raise_rule(e) == Some(RuleName::FwdTypeRaise)
                && e.category.raised_shape() == Some(crate::category::Slash::Forward)
        })
    }

    /// Re-derives every node from its children and checks the result.
    pub fn verify(&self, rules: &RuleSet) -> Result<(), VerifyError> {
        let Derivation::Node { rule, category, children } = self else {
            return Ok(());
        };
        for c in children {
            c.verify(rules)?;
        }
        let fail = |message: String| VerifyError {
            rule: *rule,
            category: category.to_string(),
            message,
        };
        if !rules.is_enabled(*rule) {
            return Err(fail("rule is disabled".into()));
        }
        let depth = rules.composition_depth();
        let result = match (rule, children.as_slice()) {
            (RuleName::Coord, [l, conj, r]) => {
                if conj.category().label() != Some("Conj") {
                    return Err(fail(format!("middle child is {}, not Conj", conj.category())));
                }
                coordinate(l.category(), r.category())
            }
            (RuleName::FwdApp, [l, r]) => forward_apply(l.category(), r.category()),
            (RuleName::BwdApp, [l, r]) => backward_apply(l.category(), r.category()),
            (RuleName::FwdComp, [l, r]) => forward_compose(l.category(), r.category(), depth),
            (RuleName::BwdComp, [l, r]) => backward_compose(l.category(), r.category(), depth),
            (RuleName::BwdXComp, [l, r]) => backward_cross_compose(l.category(), r.category(), depth),
            _ => return Err(fail(format!("{} children", children.len()))),
        };
        match result {
            Some(c) if c == *category => Ok(()),
            Some(c) => Err(fail(format!("children give {c}"))),
            None => Err(fail("rule does not apply to the children".into())),
        }
    }

    /// `(RULE CATEGORY child...)`, leaves as `word:=CATEGORY`.
    pub fn bracketed(&self) -> String {
        match self {
            Derivation::Leaf { entry, .. } => format!("{}:={}", entry.word, entry.category),
            Derivation::Node { rule, category, children } => {
                let inner: Vec<String> = children.iter().map(Derivation::bracketed).collect();
                format!("({} {} {})", rule.symbol(), category, inner.join(" "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::Provenance;

    fn leaf(token: usize, word: &str, cat: &str) -> Derivation {
        Derivation::Leaf {
            token,
            entry: LexEntry {
                word: word.into(),
                lemma: word.into(),
                pos: "X".into(),
                category: Category::parse(cat).unwrap(),
                source: Provenance::Base,
                labels: Vec::new(),
            },
        }
    }

    fn node(rule: RuleName, cat: &str, children: Vec<Derivation>) -> Derivation {
        Derivation::Node {
            rule,
            category: Category::parse(cat).unwrap(),
            children,
        }
    }

    #[test]
    fn verification() {
        let good = node(
            RuleName::BwdApp,
            "S",
            vec![leaf(0, "a", "NP"), node(RuleName::FwdApp, "S\\NP", vec![leaf(1, "b", "(S\\NP)/NP"), leaf(2, "c", "NP")])],
        );
        good.verify(&RuleSet::default()).unwrap();
        assert_eq!(good.rules_used(), [RuleName::BwdApp, RuleName::Lex, RuleName::FwdApp, RuleName::Lex, RuleName::Lex]);
        assert_eq!(good.leaves().len(), 3);
        assert_eq!(good.bracketed(), "(< S a:=NP (> S\\NP b:=(S\\NP)/NP c:=NP))");
        let wrong = node(RuleName::FwdApp, "S", vec![leaf(0, "a", "NP"), leaf(1, "b", "S\\NP")]);
        assert!(wrong.verify(&RuleSet::default()).is_err());
        let gated = RuleSet::default().without(RuleName::BwdApp);
        assert!(good.verify(&gated).is_err());
    }

    #[test]
    fn coordination_nodes() {
        let d = node(
            RuleName::Coord,
            "S\\NP",
            vec![leaf(0, "a", "S\\NP"), leaf(1, "and", "Conj"), leaf(2, "b", "S\\NP")],
        );
        d.verify(&RuleSet::default()).unwrap();
        let bad = node(RuleName::Coord, "S\\NP", vec![leaf(0, "a", "S\\NP"), leaf(1, "x", "NP"), leaf(2, "b", "S\\NP")]);
        assert!(bad.verify(&RuleSet::default()).is_err());
    }
}
