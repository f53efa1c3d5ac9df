mod common;

use ccg_core::lexicon::{load_cat_db, FeatureConfig};
use ccg_core::ltag::write_cat_db_lines;
use ccg_core::{parse_tree_file, Category, Converter, LtagTree, Slash, TreeGroup};
use common::{grammar_dir, sample_lexicon};
use proptest::prelude::*;

fn load(name: &str) -> Vec<TreeGroup> {
    let text = std::fs::read_to_string(grammar_dir().join("trees").join(name)).unwrap();
    parse_tree_file(&text).unwrap()
}

fn plain(c: &Category) -> String {
    c.skeleton()
}

fn single(groups: &[TreeGroup]) -> &LtagTree {
    match &groups[0] {
        TreeGroup::Tree(t) => t,
        TreeGroup::Family { .. } => panic!("expected a single tree"),
    }
}

#[test]
fn ditransitive_file() {
    let cfg = &sample_lexicon().features;
    let r = Converter::new(cfg).convert_tree(single(&load("ditransitive.ltag"))).unwrap();
    assert_eq!(plain(&r.category), "((S\\NP)/PP)/NP");
    assert_eq!(r.category.to_string(), "((S[vform=ind]\\NP0[case=nom])/PP2)/NP1[case=acc]");
    assert!(r.warnings.is_empty());
}

#[test]
fn transitive_family_file() {
    let cfg = &sample_lexicon().features;
    let groups = load("transitive.ltag");
    let fam = Converter::new(cfg).convert_family(groups[0].trees()).unwrap();
    let cats: Vec<String> = fam.results.iter().map(|r| plain(&r.category)).collect();
    assert_eq!(cats, ["(S\\NP)/NP", "(S\\NP)/PP"]);
    assert_eq!(fam.results[1].category.to_string(), "(S[passive=+,vform=ppart]\\NP1[case=nom])/PP0");
    let dropped: Vec<&String> = fam.warnings.iter().filter(|w| w.contains("wh-lexicon")).collect();
    assert_eq!(dropped.len(), 2, "{:?}", fam.warnings);
}

#[test]
fn modifier_file() {
    let cfg = &sample_lexicon().features;
    let conv = Converter::new(cfg);
    let cats: Vec<String> = load("modifiers.ltag")
        .iter()
        .flat_map(|g| g.trees().to_vec())
        .map(|t| conv.convert_tree(&t).unwrap().category.to_string())
        .collect();
    assert_eq!(
        cats,
        [
            "(S[#1]\\NP[#2])\\(S[#1]\\NP[#2])",
            "(S[#1]\\NP[#2])/(S[#1]\\NP[#2])",
            "N[#1]/N[#1]",
            "(NP[#1]\\NP[#1])/NP[case=acc]",
            "((S[#1]\\NP[#2])\\(S[#1]\\NP[#2]))/NP[case=acc]",
        ]
    );
}

#[test]
fn converted_output_loads_as_a_category_database() {
    let cfg = &sample_lexicon().features;
    let conv = Converter::new(cfg);
    let mut results = Vec::new();
    for file in ["ditransitive.ltag", "transitive.ltag", "intransitive.ltag", "modifiers.ltag"] {
        for g in load(file) {
            match g {
                TreeGroup::Family { trees, .. } => results.extend(conv.convert_family(&trees).unwrap().results),
                TreeGroup::Tree(t) => results.push(conv.convert_tree(&t).unwrap()),
            }
        }
    }
    let text = write_cat_db_lines(&results, cfg);
    let back = load_cat_db(&text, cfg).unwrap();
    let clauses: Vec<&Category> = back.iter().flat_map(|e| e.clauses.iter().map(|c| &c.category)).collect();
    assert_eq!(clauses.len(), results.len());
    for c in clauses {
        assert!(results.iter().any(|r| r.category.skeleton_eq(c)), "{c}");
    }
}

/// Random initial tree: `left` substitution nodes, the anchor, then `right`.
fn tree_text(left: &[&str], right: &[&str]) -> String {
    let mut nodes = Vec::new();
    let mut k = 0;
    for l in left {
        nodes.push(format!("({l}{k} !sub)"));
        k += 1;
    }
    nodes.push("(V !anchor)".into());
    for r in right {
        nodes.push(format!("({r}{k} !sub)"));
        k += 1;
    }
    format!("(t S () {})", nodes.join(" "))
}

fn labels(max: usize) -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(vec!["NP", "PP", "S", "N"]), 0..=max)
}

proptest! {
    #[test]
    fn initial_tree_properties(left in labels(3), right in labels(3)) {
        let cfg = FeatureConfig::default();
        let conv = Converter::new(&cfg);
        let tree = match parse_tree_file(&tree_text(&left, &right)).unwrap().remove(0) {
            TreeGroup::Tree(t) => t,
            TreeGroup::Family { .. } => unreachable!(),
        };
        let r = conv.convert_tree(&tree).unwrap();
        prop_assert_eq!(r.category.arity(), tree.substitution_count());
        prop_assert_eq!(r.category.directional_arity(), (left.len(), right.len()));
        // innermost-out: left nodes in frontier order, then right nodes far to near
        let mut got: Vec<(Slash, u8)> = r
            .category
            .spine_arguments()
            .into_iter()
            .map(|(s, a)| (s, a.arg_index().unwrap()))
            .collect();
        got.reverse();
        let mut want: Vec<(Slash, u8)> = (0..left.len() as u8).map(|i| (Slash::Backward, i)).collect();
        want.extend((0..right.len()).rev().map(|j| (Slash::Forward, (left.len() + j) as u8)));
        prop_assert_eq!(got, want);
        prop_assert_eq!(conv.convert_tree(&tree).unwrap(), r);
    }

    #[test]
    fn families_never_grow(frames in prop::collection::vec((labels(2), labels(2)), 0..6)) {
        let cfg = FeatureConfig::default();
        let conv = Converter::new(&cfg);
        let trees: Vec<LtagTree> = frames
            .iter()
            .map(|(l, r)| match parse_tree_file(&tree_text(l, r)).unwrap().remove(0) {
                TreeGroup::Tree(t) => t,
                TreeGroup::Family { .. } => unreachable!(),
            })
            .collect();
        let fam = conv.convert_family(&trees).unwrap();
        prop_assert!(fam.results.len() <= trees.len());
        let singles: Vec<Category> = trees.iter().map(|t| conv.convert_tree(t).unwrap().category).collect();
        let distinct = singles.iter().enumerate().all(|(i, c)| singles[..i].iter().all(|d| d != c));
        prop_assert_eq!(fam.results.len() == trees.len(), distinct);
        let names: usize = fam.results.iter().map(|r| r.tree_names.len()).sum();
        prop_assert_eq!(names, trees.len());
    }
}
