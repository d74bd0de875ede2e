use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use unranked::constructions::{sdta_concat, sdta_intersection, sdta_union, wdta_intersection, wdta_union};
use unranked::harness::oracle::{
    check_boolean, check_complement, check_concat, language_equal, language_equal_by_enumeration, wdta_ambiguity,
};
use unranked::harness::{parse_automaton, serialize_automaton, Automaton};
use unranked::minimize::{minimize_sdta, partition_oracle_disagreements, sdta_isomorphic};
use unranked::wdta::{sdta_to_wdta, wdta_to_sdta};
use unranked::{ConstructionError, CorpusSpec, HState, HorizontalMachine, Letter, Sdta, Symbol, Tree, VState};

fn sym(s: &str) -> Symbol {
    Symbol::new(s).unwrap()
}

/// A random valid SDTA over `a`, `b` with up to three vertical states.
fn random_sdta(seed: u64) -> Sdta {
    let mut rng = StdRng::seed_from_u64(seed);
    let k = rng.gen_range(1..=3usize);
    let alphabet = [sym("a"), sym("b")];
    let mut letters: Vec<Letter> = (0..k as u32).map(Letter::state).collect();
    if rng.gen_bool(0.3) {
        letters.push(Letter::Leaf(sym("a")));
    }
    let mut classifiers = BTreeMap::new();
    for s in &alphabet {
        let hs = rng.gen_range(1..=3usize);
        let mut m = HorizontalMachine::classifier(hs);
        for h in 0..hs as u32 {
            for l in &letters {
                if rng.gen_bool(0.6) {
                    m.add_transition(HState(h), l.clone(), HState(rng.gen_range(0..hs as u32))).unwrap();
                }
            }
            if rng.gen_bool(0.7) {
                m.set_output(HState(h), Some(VState(rng.gen_range(0..k as u32)))).unwrap();
            }
        }
        classifiers.insert(s.clone(), m);
    }
    let finals: Vec<VState> = (0..k as u32).filter(|_| rng.gen_bool(0.5)).map(VState).collect();
    Sdta::new(alphabet, k, finals, classifiers)
}

fn corpus() -> CorpusSpec {
    CorpusSpec::new([sym("a"), sym("b")], 3, 2)
}

fn arb_tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![Just("a"), Just("b"), Just("c_1")].prop_map(|s| Tree::leaf(sym(s)));
    leaf.prop_recursive(4, 24, 4, |inner| {
        (prop_oneof![Just("a"), Just("b"), Just("c_1")], prop::collection::vec(inner, 1..4))
            .prop_map(|(s, kids)| Tree::node(sym(s), kids))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tree_text_round_trips(t in arb_tree()) {
        prop_assert_eq!(Tree::parse(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn random_automata_are_valid(seed in any::<u64>()) {
        prop_assert!(random_sdta(seed).is_valid());
    }

    #[test]
    fn minimization_is_idempotent_and_keeps_the_language(seed in any::<u64>()) {
        let a = random_sdta(seed);
        let m = minimize_sdta(&a);
        prop_assert!(m.num_states() <= a.with_leaf_states().num_states());
        prop_assert!(sdta_isomorphic(&minimize_sdta(&m), &m));
        prop_assert!(language_equal(&a, &m, &corpus()).holds());
    }

    #[test]
    fn partition_matches_context_oracle(seed in any::<u64>()) {
        let a = random_sdta(seed);
        prop_assert!(partition_oracle_disagreements(&a, 4, 3).is_empty());
    }

    #[test]
    fn complement_flips_every_tree(seed in any::<u64>()) {
        let a = random_sdta(seed);
        let c = a.complement();
        prop_assert!(check_complement(&a, &c, &corpus()).holds());
        prop_assert!(language_equal(&a, &c.complement(), &corpus()).holds());
    }

    #[test]
    fn products_match_boolean_oracles(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_sdta(s1), random_sdta(s2));
        let u = sdta_union(&a, &b).unwrap();
        let i = sdta_intersection(&a, &b).unwrap();
        prop_assert!(u.num_states() <= (a.with_leaf_states().num_states() + 1) * (b.with_leaf_states().num_states() + 1));
        prop_assert!(check_boolean(&a, &b, &u, &corpus(), |x, y| x || y).holds());
        prop_assert!(check_boolean(&a, &b, &i, &corpus(), |x, y| x && y).holds());
    }

    #[test]
    fn concatenation_matches_its_oracle(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (inner, outer) = (random_sdta(s1), random_sdta(s2));
        match sdta_concat(&inner, &outer) {
            Ok(c) => prop_assert!(check_concat(&inner, &outer, &c, &corpus()).holds()),
            Err(e) => prop_assert_eq!(e, ConstructionError::NoLeafStates),
        }
    }

    #[test]
    fn wdta_conversions_keep_the_language(seed in any::<u64>()) {
        let a = random_sdta(seed);
        let w = sdta_to_wdta(&a);
        prop_assert!(w.is_valid());
        prop_assert!(language_equal(&a, &w, &corpus()).holds());
        prop_assert_eq!(wdta_ambiguity(&w, &corpus()).0, 0);
        let back = wdta_to_sdta(&w).unwrap();
        prop_assert!(language_equal(&a, &back, &corpus()).holds());
    }

    #[test]
    fn wdta_products_are_disjoint_and_correct(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (sdta_to_wdta(&random_sdta(s1)), sdta_to_wdta(&random_sdta(s2)));
        let u = wdta_union(&a, &b).unwrap();
        let i = wdta_intersection(&a, &b).unwrap();
        prop_assert!(u.is_valid() && i.is_valid());
        prop_assert!(check_boolean(&a, &b, &u, &corpus(), |x, y| x || y).holds());
        prop_assert!(check_boolean(&a, &b, &i, &corpus(), |x, y| x && y).holds());
    }

    #[test]
    fn file_format_round_trips(seed in any::<u64>()) {
        for a in [Automaton::Sdta(random_sdta(seed)), Automaton::Wdta(sdta_to_wdta(&random_sdta(seed)))] {
            let text = serialize_automaton(&a);
            prop_assert_eq!(serialize_automaton(&parse_automaton(&text).unwrap()), text);
        }
    }

    #[test]
    fn class_and_enumeration_checks_agree(s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (random_sdta(s1), random_sdta(s2));
        let small = CorpusSpec::new([sym("a"), sym("b")], 2, 2);
        let by_class = language_equal(&a, &b, &small);
        let by_enum = language_equal_by_enumeration(&a, &b, &small);
        prop_assert_eq!(by_class.holds(), by_enum.holds());
    }
}
