//! Worst-case witness families: the string DFAs `A` and `B`, the tree
//! automata `M_A` and `M_B` built on them, the tree language `T_B`, and unary
//! divisibility families for the Boolean operations.

use std::collections::{BTreeMap, BTreeSet};

use crate::constructions::ConcatState;
use crate::error::WitnessError;
use crate::horizontal::{HState, HorizontalMachine, Letter, VState};
use crate::sdta::Sdta;
use crate::trees::{Symbol, Tree};

/// A deterministic string automaton over symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringDfa {
    pub num_states: usize,
    pub start: usize,
    pub finals: BTreeSet<usize>,
    pub trans: BTreeMap<(usize, Symbol), usize>,
}

impl StringDfa {
    pub fn step(&self, state: usize, letter: &Symbol) -> Option<usize> {
        self.trans.get(&(state, letter.clone())).copied()
    }

    pub fn run_from<'a>(&self, state: usize, word: impl IntoIterator<Item = &'a Symbol>) -> Option<usize> {
        word.into_iter().try_fold(state, |s, l| self.step(s, l))
    }

    pub fn run<'a>(&self, word: impl IntoIterator<Item = &'a Symbol>) -> Option<usize> {
        self.run_from(self.start, word)
    }

    pub fn accepts<'a>(&self, word: impl IntoIterator<Item = &'a Symbol>) -> bool {
        self.run(word).is_some_and(|s| self.finals.contains(&s))
    }

    pub fn alphabet(&self) -> BTreeSet<Symbol> {
        self.trans.keys().map(|(_, l)| l.clone()).collect()
    }
}

fn s(name: &str) -> Symbol {
    Symbol::new(name).expect("static symbol")
}

fn abcd() -> [Symbol; 4] {
    [s("a"), s("b"), s("c"), s("d")]
}

fn at_least(name: &'static str, value: usize) -> Result<(), WitnessError> {
    if value < 2 {
        Err(WitnessError::TooSmall { name, min: 2, value })
    } else {
        Ok(())
    }
}

/// `B` with `n` states: `b` counts modulo `n`, `c` jumps to 1, `a` and `d`
/// loop. Final state `n − 1`.
pub fn string_dfa_b(n: usize) -> Result<StringDfa, WitnessError> {
    at_least("n", n)?;
    let mut trans = BTreeMap::new();
    for j in 0..n {
        trans.insert((j, s("a")), j);
        trans.insert((j, s("b")), (j + 1) % n);
        trans.insert((j, s("c")), 1);
        trans.insert((j, s("d")), j);
    }
    Ok(StringDfa {
        num_states: n,
        start: 0,
        finals: BTreeSet::from([n - 1]),
        trans,
    })
}

/// `A` with `m` states: `a` counts modulo `m`, `b` resets to 0, `c` loops.
/// No `d`. Final state `m − 1`.
pub fn string_dfa_a(m: usize) -> Result<StringDfa, WitnessError> {
    at_least("m", m)?;
    let mut trans = BTreeMap::new();
    for i in 0..m {
        trans.insert((i, s("a")), (i + 1) % m);
        trans.insert((i, s("b")), 0);
        trans.insert((i, s("c")), i);
    }
    Ok(StringDfa {
        num_states: m,
        start: 0,
        finals: BTreeSet::from([m - 1]),
        trans,
    })
}

/// Classifier mapping each `i⁺` (all children in state `i`) to `f(i)`, and
/// `ε` to `empty`. States: start, then one per `i`.
fn agreement_classifier(k: usize, empty: Option<VState>, f: impl Fn(usize) -> Option<usize>) -> HorizontalMachine {
    let mut m = HorizontalMachine::classifier(k + 1);
    m.set_output(HState(0), empty).expect("classifier");
    for i in 0..k {
        let h = HState(i as u32 + 1);
        m.add_transition(HState(0), Letter::state(i as u32), h).expect("fresh");
        m.add_transition(h, Letter::state(i as u32), h).expect("fresh");
        m.set_output(h, f(i).map(|v| VState(v as u32))).expect("classifier");
    }
    m
}

/// Names `0 … k−1`, matching the numbering in the formulas.
fn numbered(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

/// The SDTA for `T_B` with `n` vertical states.
pub fn make_mb(n: usize) -> Result<Sdta, WitnessError> {
    at_least("n", n)?;
    let [a, b, c, d] = abcd();
    let da = agreement_classifier(n, Some(VState(0)), Some);
    let dd = agreement_classifier(n, None, Some);
    let db = agreement_classifier(n, None, |i| Some((i + 1) % n));
    let mut dc = HorizontalMachine::classifier(2);
    for i in 0..n as u32 {
        dc.add_transition(HState(0), Letter::state(i), HState(1)).expect("fresh");
        dc.add_transition(HState(1), Letter::state(i), HState(1)).expect("fresh");
    }
    dc.set_output(HState(1), Some(VState(1))).expect("classifier");
    let classifiers = BTreeMap::from([(a.clone(), da), (b.clone(), db), (c.clone(), dc), (d.clone(), dd)]);
    Ok(Sdta::new([a, b, c, d], n, [VState(n as u32 - 1)], classifiers).with_names(numbered(n)))
}

/// The SDTA for `T_A` with `m` vertical states. Like [`make_mb`], each
/// classifier only accepts children that agree on one state.
pub fn make_ma(m: usize) -> Result<Sdta, WitnessError> {
    at_least("m", m)?;
    let [a, b, c, d] = abcd();
    let da = agreement_classifier(m, Some(VState(0)), |i| Some((i + 1) % m));
    let db = agreement_classifier(m, None, |_| Some(0));
    let dc = agreement_classifier(m, None, Some);
    let classifiers = BTreeMap::from([(a.clone(), da), (b.clone(), db), (c.clone(), dc)]);
    Ok(Sdta::new([a, b, c, d], m, [VState(m as u32 - 1)], classifiers).with_names(numbered(m)))
}

/// Membership in `T_B`, checked on paths: every leaf is labeled `a`; for
/// each leaf, `B` reads the labels from the leaf's parent up to the root and
/// must accept; and at every node all leaves below it leave `B` in the same
/// state.
///
/// A leaf is treated as the start of a path (so `B` is in its start state
/// when reading the parent's label). A single leaf is therefore rejected,
/// and a node may mix leaf and inner children.
pub fn membership_tb(t: &Tree, n: usize) -> Result<bool, WitnessError> {
    let dfa = string_dfa_b(n)?;
    let a = s("a");
    let mut at_node: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for leaf in t.leaf_positions() {
        if t.subtree(&leaf).map(Tree::label) != Some(&a) {
            return Ok(false);
        }
        let path = leaf.path();
        let mut state = dfa.start;
        for depth in (0..path.len()).rev() {
            let node = &path[..depth];
            let label = subtree_label(t, node);
            let Some(next) = dfa.step(state, label) else {
                return Ok(false);
            };
            state = next;
            match at_node.get(node) {
                Some(&seen) if seen != state => return Ok(false),
                Some(_) => {}
                None => {
                    at_node.insert(node.to_vec(), state);
                }
            }
        }
        if !dfa.finals.contains(&state) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn subtree_label<'a>(t: &'a Tree, path: &[usize]) -> &'a Symbol {
    path.iter().fold(t, |node, &i| &node.children()[i]).label()
}

/// The three defining conditions taken literally: leaves labeled `a` and
/// never siblings of inner nodes; `B` accepts every path string from a node
/// of height one to the root; path strings from height-one nodes agree at
/// every common ancestor.
pub fn membership_tb_literal(t: &Tree, n: usize) -> Result<bool, WitnessError> {
    let dfa = string_dfa_b(n)?;
    let a = s("a");
    for pos in t.positions() {
        let node = t.subtree(&pos).expect("own position");
        if node.is_leaf() {
            if node.label() != &a {
                return Ok(false);
            }
        } else {
            let leaves = node.children().iter().filter(|c| c.is_leaf()).count();
            if leaves != 0 && leaves != node.children().len() {
                return Ok(false);
            }
        }
    }
    let height_one: Vec<Vec<usize>> = t
        .positions()
        .into_iter()
        .filter(|p| t.subtree(p).is_some_and(|x| x.height() == 1))
        .map(|p| p.path().to_vec())
        .collect();
    let mut at_node: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for v in height_one {
        let mut state = dfa.start;
        for depth in (0..=v.len()).rev() {
            let node = &v[..depth];
            let Some(next) = dfa.step(state, subtree_label(t, node)) else {
                return Ok(false);
            };
            state = next;
            match at_node.get(node) {
                Some(&seen) if seen != state => return Ok(false),
                Some(_) => {}
                None => {
                    at_node.insert(node.to_vec(), state);
                }
            }
        }
        if !dfa.finals.contains(&state) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The unary tree with the given word read from the node of height one up
/// to the root, over a leaf labeled `leaf`.
pub fn build_chain(word: &[Symbol], leaf: &Symbol) -> Tree {
    word.iter()
        .fold(Tree::leaf(leaf.clone()), |t, label| Tree::node(label.clone(), vec![t]))
}

/// The labels of a unary tree from the node of height one up to the root;
/// `None` when some node has more than one child.
pub fn chain_word(t: &Tree) -> Option<Vec<Symbol>> {
    let mut word = Vec::new();
    let mut cur = t;
    while !cur.is_leaf() {
        if cur.children().len() != 1 {
            return None;
        }
        word.push(cur.label().clone());
        cur = &cur.children()[0];
    }
    word.reverse();
    Some(word)
}

/// Unary counter on a chain: leaf `a` is 0, `count` advances modulo `k`,
/// `keep` labels leave the count alone, other labels have no transition.
fn unary_counter(k: usize, count: &Symbol, keep: &[Symbol]) -> Sdta {
    let [a, b, c, d] = abcd();
    let mut classifiers = BTreeMap::new();
    for label in [&a, &b, &c, &d] {
        let step: Option<Box<dyn Fn(usize) -> usize>> = if label == count {
            Some(Box::new(move |i| (i + 1) % k))
        } else if keep.contains(label) {
            Some(Box::new(|i| i))
        } else {
            None
        };
        let leaf = (label == &a).then_some(VState(0));
        let mut m = HorizontalMachine::classifier(if step.is_some() { k + 1 } else { 1 });
        m.set_output(HState(0), leaf).expect("classifier");
        if let Some(step) = step {
            for i in 0..k {
                let h = HState(i as u32 + 1);
                m.add_transition(HState(0), Letter::state(i as u32), h).expect("fresh");
                m.set_output(h, Some(VState(step(i) as u32))).expect("classifier");
            }
        }
        classifiers.insert(label.clone(), m);
    }
    Sdta::new(abcd(), k, [VState(0)], classifiers).with_names(numbered(k))
}

/// Two unary divisibility languages: chains over `a`-leaves whose number of
/// `a`-nodes is divisible by `m` (with `b`, `c` neutral, no `d`), and chains
/// whose number of `b`-nodes is divisible by `n` (with `a`, `d` neutral, no
/// `c`). Each automaton has exactly `m` (resp. `n`) vertical states.
pub fn derived_boolean_witnesses(m: usize, n: usize) -> Result<(Sdta, Sdta), WitnessError> {
    at_least("m", m)?;
    at_least("n", n)?;
    let [a, b, c, d] = abcd();
    Ok((
        unary_counter(m, &a, &[b.clone(), c]),
        unary_counter(n, &b, &[a, d]),
    ))
}

/// `(n+1)((m+1)2^n − 2^(n−1)) − 1`.
pub fn concat_lower_bound(m: usize, n: usize) -> u128 {
    let p = 1u128 << n;
    (n as u128 + 1) * ((m as u128 + 1) * p - p / 2) - 1
}

/// The states `(q, S, p)` of the concatenation automaton for `T_A · T_B`
/// with `q ≤ n`, `S ⊆ {0…n−1}`, `p ≤ m` (`n` and `m` standing for dead),
/// `0 ∈ S` whenever `p = m − 1`, and `(n, ∅, m)` excluded. Returned in the
/// shape used by the construction: outer state, subset, inner state.
pub fn concat_state_census(m: usize, n: usize) -> Result<BTreeSet<ConcatState>, WitnessError> {
    at_least("m", m)?;
    at_least("n", n)?;
    let mut out = BTreeSet::new();
    for q in 0..=n {
        for mask in 0u32..(1 << n) {
            let set: Vec<VState> = (0..n as u32).filter(|i| mask >> i & 1 == 1).map(VState).collect();
            for p in 0..=m {
                if p == m - 1 && mask & 1 == 0 {
                    continue;
                }
                if set.is_empty() && q == n && p == m {
                    continue;
                }
                out.insert(ConcatState {
                    p1: (q < n).then_some(VState(q as u32)),
                    p2: set.clone(),
                    q: (p < m).then_some(VState(p as u32)),
                });
            }
        }
    }
    Ok(out)
}
