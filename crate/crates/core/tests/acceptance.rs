//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ccg_core::lexicon::{load_cat_db, RaiseConfig};
use ccg_core::parser::FilterConfig;
use ccg_core::{
    brute_force_parse, default_goal, parse_tree_file, unify, Category, Chart, CompiledLexicon, Converter, Derivation,
    RuleName, RuleSet, Slash, UnifyContext,
};
use common::{corpus, grammar_dir, random_fs, sample_compiled, sample_dir, sample_lexicon, toks, NaiveUnifier};
use rand::rngs::StdRng;
use rand::SeedableRng;

type Outcome = Result<String, String>;

const EXAMPLE_VP: &str = "Paddington makes marmalade sandwiches and eats them every day";
const EXAMPLE_GAP: &str = "Paddington loves and Betsy hates marmalade sandwiches";
const EXAMPLE_SHIFT: &str = "Paddington loves dearly his very sticky marmalade sandwiches";

fn chart_with(lex: &CompiledLexicon, sentence: &str, rules: &RuleSet, filters: FilterConfig) -> Chart {
    ccg_core::Parser::new(lex)
        .with_rules(rules.clone())
        .with_filters(filters)
        .parse(&toks(sentence))
}

fn chart(sentence: &str, rules: &RuleSet) -> Chart {
    chart_with(sample_compiled(), sentence, rules, FilterConfig::default())
}

fn all_derivations(c: &Chart) -> Vec<Derivation> {
    c.derivations(&default_goal(), usize::MAX)
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn vp_coordination(rules: &RuleSet) -> Outcome {
    let start = Instant::now();
    let c = chart(EXAMPLE_VP, rules);
    let ds = all_derivations(&c);
    let elapsed = start.elapsed();
    check(!ds.is_empty(), "no derivation")?;
    let allowed = [RuleName::Lex, RuleName::FwdApp, RuleName::BwdApp, RuleName::Coord];
    for d in &ds {
        check(d.rules_used().iter().all(|r| allowed.contains(r)), format!("rule outside the set: {}", d.bracketed()))?;
    }
    check(ds.iter().all(|d| d.contains_rule(RuleName::Coord)), "a derivation without coordination")?;
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("{} derivations in {elapsed:.2?}", ds.len()))
}

fn criterion_1() -> Outcome {
    vp_coordination(&RuleSet::only([RuleName::FwdApp, RuleName::BwdApp, RuleName::Coord]))
}

fn gapping(rules: &RuleSet) -> Outcome {
    let ds = all_derivations(&chart(EXAMPLE_GAP, rules));
    check(!ds.is_empty(), "no derivation")?;
    for d in &ds {
        check(d.has_raised_subject_leaf(), format!("no raised subject: {}", d.bracketed()))?;
        check(d.contains_rule(RuleName::FwdComp), format!("no forward composition: {}", d.bracketed()))?;
        check(d.contains_rule(RuleName::Coord), format!("no coordination: {}", d.bracketed()))?;
    }
    let (unraised, _) = sample_lexicon().compile_with(&RaiseConfig::default()).unwrap();
    let c = chart_with(&unraised, EXAMPLE_GAP, rules, FilterConfig::default());
    check(!c.parsed(&default_goal()), "parses without hidden raising")?;
    Ok(format!("{} derivations, none without raised entries", ds.len()))
}

fn criterion_2() -> Outcome {
    gapping(&RuleSet::default())
}

fn criterion_3() -> Outcome {
    let ds = all_derivations(&chart(EXAMPLE_SHIFT, &RuleSet::default()));
    check(!ds.is_empty(), "no derivation")?;
    let crossed = ds.iter().filter(|d| d.contains_rule(RuleName::BwdXComp)).count();
    check(crossed > 0, "no derivation uses backward crossed composition")?;
    let gated = RuleSet::default().without(RuleName::BwdXComp);
    check(!chart(EXAMPLE_SHIFT, &gated).parsed(&default_goal()), "parses without crossed composition")?;
    let app_coord = RuleSet::only([RuleName::FwdApp, RuleName::BwdApp, RuleName::Coord]).without(RuleName::BwdXComp);
    vp_coordination(&app_coord).map_err(|e| format!("criterion 1 without <Bx: {e}"))?;
    gapping(&gated).map_err(|e| format!("criterion 2 without <Bx: {e}"))?;
    Ok(format!("{crossed}/{} derivations use <Bx", ds.len()))
}

/// Category text with features and argument indices removed.
fn bare(c: &Category) -> String {
    let mut out = String::new();
    let mut depth = 0;
    for ch in c.without_arg_indices().to_string().chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ if depth == 0 => out.push(ch),
            _ => {}
        }
    }
    out
}

fn criterion_4() -> Outcome {
    let cfg = &sample_lexicon().features;
    let conv = Converter::new(cfg);
    let first_tree = |file: &str| {
        let text = std::fs::read_to_string(grammar_dir().join("trees").join(file)).unwrap();
        parse_tree_file(&text).map_err(|e| e.to_string()).map(|g| g[0].trees()[0].clone())
    };
    let di = conv.convert_tree(&first_tree("ditransitive.ltag")?).map_err(|e| e.to_string())?;
    let tr = conv.convert_tree(&first_tree("transitive.ltag")?).map_err(|e| e.to_string())?;
    check(bare(&di.category) == "((S\\NP)/PP)/NP", format!("ditransitive gave {}", di.category))?;
    check(bare(&tr.category) == "(S\\NP)/NP", format!("transitive gave {}", tr.category))?;
    Ok(format!("{} and {}", di.category, tr.category))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut unified, mut clashed) = (0, 0);
    for i in 0..10_000 {
        let a = random_fs(&mut rng, 12);
        let b = random_fs(&mut rng, 12);
        let (ha, hb) = (a.snapshot_hash(), b.snapshot_hash());
        let got = unify(&a, &b).ok();
        check(a.snapshot_hash() == ha && b.snapshot_hash() == hb, format!("pair {i}: operand changed"))?;
        let mut ctx = UnifyContext::new();
        let (x, y) = (ctx.import(&a), ctx.import(&b));
        let _ = ctx.unify(x, y);
        check(
            ctx.snapshot_hash(x) == ha && ctx.snapshot_hash(y) == hb,
            format!("pair {i}: operand changed inside the context"),
        )?;
        let want = NaiveUnifier::unify(&a, &b);
        check(
            got.as_ref().map(|f| f.canonical_text()) == want.as_ref().map(|f| f.canonical_text()),
            format!("pair {i}: {a} + {b}: got {got:?}, oracle {want:?}"),
        )?;
        if got.is_some() {
            unified += 1;
        } else {
            clashed += 1;
        }
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!("10000 pairs ({unified} unified, {clashed} failed) agree, {elapsed:.2?}"))
}

fn criterion_6() -> Outcome {
    let rules = RuleSet::default();
    let lines = corpus("oracle.txt");
    check(lines.len() == 30, format!("corpus has {} sentences", lines.len()))?;
    let goal = default_goal();
    let mut parsed = 0;
    for s in &lines {
        let c = chart_with(sample_compiled(), s, &rules, FilterConfig::none());
        let want = brute_force_parse(&toks(s), sample_compiled(), &rules).map_err(|e| format!("{s}: {e}"))?;
        check(c.root_counts() == want, format!("{s}: root categories or counts differ"))?;
        let want_goal: u128 = want
            .iter()
            .filter(|(cat, _)| ccg_core::unify_categories(cat, &goal).is_ok())
            .map(|(_, n)| n)
            .sum();
        let unpacked = c.derivations(&goal, usize::MAX).len() as u128;
        check(unpacked == want_goal, format!("{s}: unpacked {unpacked}, oracle {want_goal}"))?;
        parsed += usize::from(want_goal > 0);
    }
    Ok(format!("30 sentences agree ({parsed} parse)"))
}

fn goal_cell(c: &Chart) -> BTreeMap<String, u128> {
    let goal = default_goal();
    c.goal_items(&goal)
        .into_iter()
        .map(|id| (c.item(id).category.to_string(), c.derivation_count(id)))
        .collect()
}

fn criterion_7() -> Outcome {
    let rules = RuleSet::default();
    let (mut before, mut after, mut reduced) = (0, 0, 0);
    for s in corpus("oracle.txt") {
        let off = chart_with(sample_compiled(), &s, &rules, FilterConfig::none());
        let on = chart_with(sample_compiled(), &s, &rules, FilterConfig::default());
        check(goal_cell(&on) == goal_cell(&off), format!("{s}: goal cell changed"))?;
        before += off.item_count();
        after += on.item_count();
        reduced += usize::from(on.item_count() < off.item_count());
    }
    check(reduced >= 1, "no sentence lost chart items")?;
    Ok(format!("goal cells unchanged; {reduced} sentences pruned, items {before} -> {after}"))
}

fn criterion_8() -> Outcome {
    let dir = sample_dir();
    let mut scanned = 0;
    for name in ["cat.db", "syn.db", "morph.db"] {
        let text = std::fs::read_to_string(dir.join(name)).map_err(|e| e.to_string())?;
        for word in text.split_whitespace() {
            if let Ok(c) = Category::parse(word) {
                scanned += 1;
                check(c.raised_shape().is_none(), format!("{name}: raised category {word}"))?;
            }
        }
    }
    for text in sample_lexicon().category_texts() {
        let c = Category::parse(&text).map_err(|e| e.to_string())?;
        check(c.raised_shape().is_none(), format!("raised category {text}"))?;
    }
    let compiled = sample_compiled();
    let db = CompiledLexicon::from_db_str(&compiled.to_db_string()).map_err(|e| e.to_string())?;
    let subjects: Vec<String> = db
        .base_entries()
        .into_iter()
        .filter(|e| e.category.is_atomic() && e.category.label() == Some("NP"))
        .map(|e| e.word)
        .collect();
    for w in &subjects {
        let raised = db
            .lookup(w)
            .iter()
            .any(|e| e.is_raised() && e.category.raised_shape() == Some(Slash::Forward));
        check(raised, format!("{w} has no raised subject entry"))?;
    }
    Ok(format!(
        "{scanned} category tokens in working files, none raised; {} subject NPs all raised",
        subjects.len()
    ))
}

fn criterion_9() -> Outcome {
    let lex = sample_lexicon();
    let text = std::fs::read_to_string(sample_dir().join("cat.db")).map_err(|e| e.to_string())?;
    let entries = load_cat_db(&text, &lex.features).map_err(|e| e.to_string())?;
    let mut n = 0;
    for c in entries.iter().flat_map(|e| &e.clauses) {
        let parsed = Category::parse(&c.text).map_err(|e| format!("{}: {e}", c.text))?;
        let shown = parsed.to_string();
        let again = Category::parse(&shown).map_err(|e| format!("{shown}: {e}"))?;
        check(again == parsed && again.canonical_key() == parsed.canonical_key(), format!("{} changed", c.text))?;
        let normal: String = c.text.split_whitespace().collect();
        check(shown == normal, format!("{} formats as {shown}", c.text))?;
        n += 1;
    }
    Ok(format!("{n} categories round-trip"))
}

fn criterion_10() -> Outcome {
    let lines = corpus("bar.txt");
    let want = [true, false, true, true];
    check(lines.len() == want.len(), "bar corpus must have 4 sentences")?;
    for (s, w) in lines.iter().zip(want) {
        let got = chart(s, &RuleSet::default()).parsed(&default_goal());
        check(got == w, format!("'{s}' parsed={got}, expected {w}"))?;
    }
    Ok("sentential subject needs 'that'; complement clause takes either".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("VP coordination", criterion_1),
        ("gapping", criterion_2),
        ("heavy-NP shift", criterion_3),
        ("conversion fidelity", criterion_4),
        ("quasi-destructive unification", criterion_5),
        ("oracle equivalence", criterion_6),
        ("filter soundness", criterion_7),
        ("hidden raising invisibility", criterion_8),
        ("category round-trip", criterion_9),
        ("+BAR behaviour", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
