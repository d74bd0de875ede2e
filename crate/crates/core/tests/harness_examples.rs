use unranked::harness::oracle::{concat_membership_oracle, language_equal};
use unranked::harness::{verify_boolean_bounds, verify_concat_bound, Automaton, BoolOp, Kind};
use unranked::minimize::minimize_sdta;
use unranked::trees::symbols;
use unranked::witnesses::{derived_boolean_witnesses, make_mb};
use unranked::{CorpusSpec, Sdta, Tree};

fn only(text: &str, alphabet: &[&str]) -> Sdta {
    use std::collections::BTreeMap;
    use unranked::{HState, HorizontalMachine, Letter, VState};
    // accepts exactly `text`: one vertical state per distinct subtree
    let t = Tree::parse(text).unwrap();
    let mut subtrees: Vec<Tree> = Vec::new();
    fn collect(t: &Tree, out: &mut Vec<Tree>) {
        for c in t.children() {
            collect(c, out);
        }
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    collect(&t, &mut subtrees);
    let id = |s: &Tree| subtrees.iter().position(|x| x == s).unwrap() as u32;
    let mut classifiers: BTreeMap<unranked::Symbol, HorizontalMachine> = BTreeMap::new();
    let syms = symbols(alphabet.iter().copied()).unwrap();
    let mut words: BTreeMap<unranked::Symbol, Vec<(Vec<u32>, u32)>> = BTreeMap::new();
    for s in &subtrees {
        let word: Vec<u32> = s.children().iter().map(id).collect();
        words.entry(s.label().clone()).or_default().push((word, id(s)));
    }
    for sym in syms.iter() {
        let entries = words.remove(sym).unwrap_or_default();
        // trie over child words
        let mut nodes: Vec<Vec<(u32, usize)>> = vec![Vec::new()];
        let mut outputs: Vec<Option<u32>> = vec![None];
        for (word, out) in entries {
            let mut cur = 0;
            for v in word {
                cur = match nodes[cur].iter().find(|(l, _)| *l == v) {
                    Some(&(_, next)) => next,
                    None => {
                        nodes.push(Vec::new());
                        outputs.push(None);
                        let next = nodes.len() - 1;
                        nodes[cur].push((v, next));
                        next
                    }
                };
            }
            outputs[cur] = Some(out);
        }
        let mut m = HorizontalMachine::classifier(nodes.len());
        for (i, edges) in nodes.iter().enumerate() {
            for &(v, j) in edges {
                m.add_transition(HState(i as u32), Letter::state(v), HState(j as u32)).unwrap();
            }
            m.set_output(HState(i as u32), outputs[i].map(VState)).unwrap();
        }
        classifiers.insert(sym.clone(), m);
    }
    Sdta::new(syms, subtrees.len(), [VState(id(&t))], classifiers)
}

#[test]
fn single_tree_helper() {
    let a = only("b(c(a),a)", &["a", "b", "c"]);
    assert!(a.is_valid());
    assert!(a.accepts(&Tree::parse("b(c(a),a)").unwrap()));
    assert!(!a.accepts(&Tree::parse("b(a,c(a))").unwrap()));
}

#[test]
fn concat_oracle_examples() {
    let inner = only("c(a)", &["a", "b", "c"]);
    let outer = only("b(a,a)", &["a", "b", "c"]);
    assert!(concat_membership_oracle(&Tree::parse("b(c(a),a)").unwrap(), &inner, &outer));
    assert!(concat_membership_oracle(&Tree::parse("b(a,c(a))").unwrap(), &inner, &outer));
    assert!(!concat_membership_oracle(&Tree::parse("b(a,a)").unwrap(), &inner, &outer));
    assert!(!concat_membership_oracle(&Tree::parse("b(b,a)").unwrap(), &inner, &outer));
}

#[test]
fn language_equal_examples() {
    let mb = make_mb(2).unwrap();
    let corpus = CorpusSpec::with_defaults(mb.alphabet().iter().cloned());
    assert!(language_equal(&mb, &mb, &corpus).holds());
    assert!(language_equal(&mb, &minimize_sdta(&mb), &corpus).holds());
    let cmp = language_equal(&mb, &mb.complement(), &corpus);
    assert!(!cmp.holds());
    let t = cmp.counterexample.unwrap();
    assert_ne!(mb.accepts(&t), mb.complement().accepts(&t));
}

#[test]
fn concat_bound_reports() {
    for (m, n, expected) in [(2, 2, 29), (3, 2, 41), (2, 3, 79)] {
        let r = verify_concat_bound(m, n, 3, 3).unwrap();
        assert!(r.passed(), "{r}");
        assert_eq!(r.minimized_vertical, expected);
    }
    assert!(verify_concat_bound(1, 2, 3, 3).is_err());
}

#[test]
fn boolean_bound_reports() {
    let (a, b) = derived_boolean_witnesses(2, 3).unwrap();
    let (a, b) = (Automaton::Sdta(a), Automaton::Sdta(b));
    let u = verify_boolean_bounds(BoolOp::Union, Kind::Sdta, &a, &b, 3, 3, None).unwrap();
    assert_eq!(u.formula_vertical, 11);
    assert!(u.constructed.vertical <= 11 && u.passed(), "{u}");
    let i = verify_boolean_bounds(BoolOp::Intersection, Kind::Sdta, &a, &b, 3, 3, None).unwrap();
    assert_eq!(i.formula_vertical, 6);
    assert!(i.constructed.vertical <= 6 && i.passed(), "{i}");
    for op in [BoolOp::Union, BoolOp::Intersection] {
        let w = verify_boolean_bounds(op, Kind::Wdta, &a, &b, 3, 3, None).unwrap();
        assert!(w.passed(), "{w}");
        assert!(w.checks.iter().any(|c| c.name == "validation errors"));
    }
}

#[test]
fn reports_are_reproducible() {
    let a = serde_json::to_string(&verify_concat_bound(2, 2, 2, 2).unwrap()).unwrap();
    let b = serde_json::to_string(&verify_concat_bound(2, 2, 2, 2).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"passed\":true"));
}
