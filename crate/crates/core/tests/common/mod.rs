#![allow(dead_code)]

use unranked::constructions::{sdta_concat, sdta_intersection, sdta_union, wdta_intersection, wdta_union};
use unranked::wdta::sdta_to_wdta;
use unranked::witnesses::{derived_boolean_witnesses, make_ma, make_mb};
use unranked::{HorizontalMachine, Sdta, Wdta};

pub const CONCAT_PAIRS: [(usize, usize); 3] = [(2, 2), (3, 2), (2, 3)];
pub const BOOL_PAIRS: [(usize, usize); 3] = [(2, 2), (2, 3), (3, 2)];

pub struct Named<T> {
    pub name: String,
    pub automaton: T,
}

fn named<T>(name: impl Into<String>, automaton: T) -> Named<T> {
    Named {
        name: name.into(),
        automaton,
    }
}

/// Inputs of the suite.
pub fn inputs() -> Vec<Named<Sdta>> {
    let mut out = Vec::new();
    for k in [2, 3] {
        out.push(named(format!("MA({k})"), make_ma(k).unwrap()));
        out.push(named(format!("MB({k})"), make_mb(k).unwrap()));
    }
    for (m, n) in BOOL_PAIRS {
        let (a, b) = derived_boolean_witnesses(m, n).unwrap();
        out.push(named(format!("div_a({m})"), a));
        out.push(named(format!("div_b({n})"), b));
    }
    out
}

pub enum Built {
    Union(Sdta, Sdta),
    Intersection(Sdta, Sdta),
    Complement(Sdta),
    /// inner, outer
    Concat(Sdta, Sdta),
}

/// Every SDTA construction of the suite with its operands.
pub fn sdta_constructions() -> Vec<Named<(Built, Sdta)>> {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    for (m, n) in BOOL_PAIRS {
        let (a, b) = derived_boolean_witnesses(m, n).unwrap();
        pairs.push((format!("div({m},{n})"), a, b));
    }
    pairs.push(("MA(2),MB(2)".into(), make_ma(2).unwrap(), make_mb(2).unwrap()));
    pairs.push(("MB(2),MB(3)".into(), make_mb(2).unwrap(), make_mb(3).unwrap()));
    for (name, a, b) in pairs {
        let u = sdta_union(&a, &b).unwrap();
        out.push(named(format!("union {name}"), (Built::Union(a.clone(), b.clone()), u)));
        let i = sdta_intersection(&a, &b).unwrap();
        out.push(named(format!("intersection {name}"), (Built::Intersection(a, b), i)));
    }
    for x in inputs() {
        let c = x.automaton.complement();
        out.push(named(format!("complement {}", x.name), (Built::Complement(x.automaton), c)));
    }
    for (m, n) in CONCAT_PAIRS {
        let (ma, mb) = (make_ma(m).unwrap(), make_mb(n).unwrap());
        let c = sdta_concat(&ma, &mb).unwrap();
        out.push(named(format!("concat MA({m}).MB({n})"), (Built::Concat(ma, mb), c)));
    }
    out
}

pub enum WBuilt {
    Union(Wdta, Wdta),
    Intersection(Wdta, Wdta),
}

pub fn wdta_constructions() -> Vec<Named<(WBuilt, Wdta)>> {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    for (m, n) in BOOL_PAIRS {
        let (a, b) = derived_boolean_witnesses(m, n).unwrap();
        pairs.push((format!("div({m},{n})"), sdta_to_wdta(&a), sdta_to_wdta(&b)));
    }
    pairs.push(("MA(2),MB(2)".into(), sdta_to_wdta(&make_ma(2).unwrap()), sdta_to_wdta(&make_mb(2).unwrap())));
    for (name, a, b) in pairs {
        let u = wdta_union(&a, &b).unwrap();
        out.push(named(format!("wdta union {name}"), (WBuilt::Union(a.clone(), b.clone()), u)));
        let i = wdta_intersection(&a, &b).unwrap();
        out.push(named(format!("wdta intersection {name}"), (WBuilt::Intersection(a, b), i)));
    }
    out
}

/// Every WDTA of the suite: converted inputs and construction results.
pub fn all_wdtas() -> Vec<Named<Wdta>> {
    let mut out: Vec<Named<Wdta>> = inputs()
        .into_iter()
        .map(|x| named(format!("wdta {}", x.name), sdta_to_wdta(&x.automaton)))
        .collect();
    out.extend(wdta_constructions().into_iter().map(|x| named(x.name, x.automaton.1)));
    out
}

/// A WDTA whose two `b`-acceptors share the word `0 0`, so validation must
/// reject it.
pub fn overlapping_wdta() -> Named<Wdta> {
    use std::collections::BTreeMap;
    use unranked::{HState, Letter, Symbol, VState};
    let (a, b) = (Symbol::new("a").unwrap(), Symbol::new("b").unwrap());
    let mut leaf = HorizontalMachine::acceptor(1);
    leaf.set_accepting(HState(0), true).unwrap();
    let pairs = |len: usize| {
        let mut m = HorizontalMachine::acceptor(len + 1);
        for i in 0..len {
            m.add_transition(HState(i as u32), Letter::state(0), HState(i as u32 + 1)).unwrap();
        }
        m.set_accepting(HState(len as u32), true).unwrap();
        m
    };
    let mut at_least_one = HorizontalMachine::acceptor(2);
    at_least_one.add_transition(HState(0), Letter::state(0), HState(1)).unwrap();
    at_least_one.add_transition(HState(1), Letter::state(0), HState(1)).unwrap();
    at_least_one.set_accepting(HState(1), true).unwrap();
    let hlangs = BTreeMap::from([
        ((a.clone(), VState(0)), leaf),
        ((b.clone(), VState(1)), pairs(2)),
        ((b.clone(), VState(2)), at_least_one),
    ]);
    named("overlapping", Wdta::new([a, b], 3, [VState(1)], hlangs))
}
