mod common;

use std::collections::BTreeMap;

use ccg_core::parser::FilterConfig;
use ccg_core::{brute_force_parse, default_goal, Chart, Parser, RuleName, RuleSet};
use common::{corpus, sample_compiled, toks};

const RULES: [RuleName; 6] = [
    RuleName::FwdApp,
    RuleName::BwdApp,
    RuleName::FwdComp,
    RuleName::BwdComp,
    RuleName::BwdXComp,
    RuleName::Coord,
];

fn chart(sentence: &str, rules: &RuleSet, filters: FilterConfig) -> Chart {
    Parser::new(sample_compiled())
        .with_rules(rules.clone())
        .with_filters(filters)
        .parse(&toks(sentence))
}

/// Goal items of a chart as canonical category text to derivation count.
fn goal_cell(c: &Chart) -> BTreeMap<String, u128> {
    let goal = default_goal();
    c.goal_items(&goal)
        .into_iter()
        .map(|id| (c.item(id).category.to_string(), c.derivation_count(id)))
        .collect()
}

#[test]
fn corpus_is_within_brute_force_bounds() {
    let lines = corpus("oracle.txt");
    assert_eq!(lines.len(), 30);
    for s in &lines {
        let t = toks(s);
        assert!(t.len() <= 8, "{s}");
        for w in &t {
            let n = sample_compiled().lookup(w).len();
            assert!((1..=4).contains(&n), "{w} has {n} entries");
        }
    }
}

#[test]
fn chart_matches_exhaustive_search() {
    let rules = RuleSet::default();
    for s in corpus("oracle.txt") {
        let c = chart(&s, &rules, FilterConfig::none());
        let want = brute_force_parse(&toks(&s), sample_compiled(), &rules).unwrap();
        assert_eq!(c.root_counts(), want, "{s}");
    }
}

#[test]
fn unpacking_reaches_every_counted_derivation() {
    let rules = RuleSet::default();
    let goal = default_goal();
    let mut parsed = 0;
    for s in corpus("oracle.txt") {
        let c = chart(&s, &rules, FilterConfig::none());
        let ds = c.derivations(&goal, usize::MAX);
        assert_eq!(ds.len() as u128, c.goal_derivation_count(&goal), "{s}");
        for d in &ds {
            d.verify(&rules).unwrap_or_else(|e| panic!("{s}: {e}"));
            let words: Vec<usize> = d.leaves().iter().map(|(i, _)| *i).collect();
            assert_eq!(words, (0..c.len()).collect::<Vec<_>>());
        }
        let mut keys: Vec<String> = ds.iter().map(|d| d.bracketed()).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), ds.len(), "{s}: duplicate derivations");
        parsed += usize::from(!ds.is_empty());
    }
    assert!(parsed >= 25, "{parsed}");
}

#[test]
fn span_filter_keeps_goal_cells() {
    let rules = RuleSet::default();
    let mut pruned = 0;
    for s in corpus("oracle.txt") {
        let off = chart(&s, &rules, FilterConfig::none());
        let on = chart(&s, &rules, FilterConfig::default());
        assert_eq!(goal_cell(&on), goal_cell(&off), "{s}");
        assert!(on.item_count() <= off.item_count(), "{s}");
        pruned += usize::from(on.item_count() < off.item_count());
    }
    assert!(pruned >= 1);
}

#[test]
fn removing_a_rule_never_adds_a_parse() {
    let goal = default_goal();
    for s in corpus("oracle.txt") {
        let full = chart(&s, &RuleSet::default(), FilterConfig::none());
        for r in RULES {
            let less = chart(&s, &RuleSet::default().without(r), FilterConfig::none());
            assert!(less.goal_derivation_count(&goal) <= full.goal_derivation_count(&goal), "{s} without {r}");
            if less.parsed(&goal) {
                assert!(full.parsed(&goal));
            }
        }
    }
}

#[test]
fn parsing_leaves_the_lexicon_untouched() {
    let lex = sample_compiled();
    let before = lex.to_db_string();
    let hashes: Vec<String> = lex.entries().map(|e| e.category.canonical_key()).collect();
    for s in corpus("oracle.txt").iter().chain(corpus("examples.txt").iter()) {
        let _ = chart(s, &RuleSet::default(), FilterConfig::default()).derivations(&default_goal(), 50);
    }
    assert_eq!(lex.to_db_string(), before);
    let after: Vec<String> = lex.entries().map(|e| e.category.canonical_key()).collect();
    assert_eq!(after, hashes);
}

#[test]
fn attachment_ambiguity_gives_both_readings() {
    let c = chart("Betsy sees the bear with the telescope", &RuleSet::default(), FilterConfig::none());
    let ds = c.derivations(&default_goal(), usize::MAX);
    // one reading builds an NP over "the bear with the telescope"
    let np_attach = ds.iter().filter(|d| d.bracketed().contains("(< NP")).count();
    assert!(np_attach >= 1 && np_attach < ds.len());
}

#[test]
fn derivation_limit_is_respected() {
    let c = chart("Paddington loves dearly the sticky sandwiches", &RuleSet::default(), FilterConfig::default());
    let goal = default_goal();
    assert!(c.goal_derivation_count(&goal) > 3);
    assert_eq!(c.derivations(&goal, 3).len(), 3);
}
