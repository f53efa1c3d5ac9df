mod common;

use ccg_core::lexicon::{load_cat_db, RaiseConfig};
use ccg_core::{Category, CompiledLexicon, Provenance, Slash};
use common::{sample_compiled, sample_dir, sample_lexicon};

fn cat(s: &str) -> Category {
    Category::parse(s).unwrap()
}

fn read(name: &str) -> String {
    std::fs::read_to_string(sample_dir().join(name)).unwrap()
}

#[test]
fn compiles_with_only_the_expected_diagnostics() {
    // morphology rules out these pairings: a singular form of a plural-only
    // reading, and finite versus gerund verb forms
    let (_, diags) = sample_lexicon().compile().unwrap();
    let words: Vec<&str> = diags.iter().map(|d| d.word.as_str()).collect();
    assert_eq!(words, ["parking", "parks", "sandwich"], "{diags:?}");
    assert!(diags.iter().all(|d| d.message.contains("clash")));
}

#[test]
fn every_tag_resolves_to_one_meaning() {
    let lex = sample_lexicon();
    let entries = load_cat_db(&read("cat.db"), &lex.features).unwrap();
    let mut tags = 0;
    for e in &entries {
        for c in &e.clauses {
            assert_eq!(c.tags.len(), c.resolved.len(), "{}: {}", e.pos, c.text);
            tags += c.tags.len();
        }
    }
    assert!(tags >= 20);
}

#[test]
fn working_files_hold_no_raised_categories() {
    let lex = sample_lexicon();
    for text in lex.category_texts() {
        assert_eq!(cat(&text).raised_shape(), None, "{text}");
    }
    let (base, _) = lex.base_entries();
    assert!(base.iter().all(|e| e.category.raised_shape().is_none() && !e.is_raised()));
}

#[test]
fn compiled_lexicon_raises_every_np() {
    let lex = sample_compiled();
    let (base, raised) = lex.counts();
    assert!(base > 50);
    let nps: Vec<_> = lex.base_entries().into_iter().filter(|e| e.category.label() == Some("NP")).collect();
    assert!(raised >= 2 * nps.len());
    for np in &nps {
        let entries = lex.lookup(&np.word);
        for dir in [Slash::Forward, Slash::Backward] {
            assert!(
                entries.iter().any(|e| e.source == Provenance::Raised(dir) && e.category.raised_shape() == Some(dir)),
                "{} lacks a {dir:?} raised entry",
                np.word
            );
        }
    }
    let db = lex.to_db_string();
    assert!(db.lines().any(|l| l.starts_with("Paddington\t") && l.ends_with("S[#1]/(S[#1]\\NP[num=sg,pers=3])")), "{db}");
}

#[test]
fn compile_is_idempotent() {
    let lex = sample_compiled();
    let raise = RaiseConfig::parse(&read("raise.cfg"), lex.features()).unwrap();
    let again = CompiledLexicon::compile(&lex.base_entries(), &raise, lex.features()).unwrap();
    assert_eq!(&again, lex);
    let reread = CompiledLexicon::from_db_str(&lex.to_db_string()).unwrap();
    assert_eq!(&reread, lex);
}

#[test]
fn empty_raise_config_adds_nothing() {
    let lex = sample_lexicon();
    let (compiled, _) = lex.compile_with(&RaiseConfig::default()).unwrap();
    assert_eq!(compiled.counts().1, 0);
}

#[test]
fn resolution_is_deterministic() {
    let lex = sample_lexicon();
    for w in lex.surfaces() {
        assert_eq!(lex.resolve(&w), lex.resolve(&w), "{w}");
    }
}

#[test]
fn morphology_and_tree_features_meet() {
    let lex = sample_compiled();
    let loves: Vec<String> = lex.lookup("loves").iter().map(|e| e.category.to_string()).collect();
    assert_eq!(loves, ["(S[bar=-,vform=ind]\\NP0[case=nom,num=sg,pers=3])/NP1[case=acc]"]);
    let love: Vec<String> = lex.lookup("love").iter().map(|e| e.category.to_string()).collect();
    assert_eq!(love, ["(S[bar=-,vform=ind]\\NP0[case=nom,num=pl])/NP1[case=acc]"]);
    let parking = lex.lookup("parking");
    assert_eq!(parking.len(), 1);
    assert!(parking[0].category.skeleton_eq(&cat("(NP\\NP)/NP")));
    let annoys: Vec<Category> = lex.lookup("annoys").iter().map(|e| e.category.clone()).collect();
    assert!(annoys.iter().any(|c| c.skeleton_eq(&cat("(S\\S)/NP"))));
    assert!(annoys.contains(&cat("(S[bar=-,vform=ind]\\S[bar=+])/NP[case=acc]")));
}
