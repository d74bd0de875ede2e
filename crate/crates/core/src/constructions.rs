//! Union, intersection and concatenation of tree automata.
//!
//! SDTA constructions run a reachable-only exploration over a virtual
//! product classifier per symbol: only vertical states that some tree can
//! reach, and only horizontal states some reachable word can reach, are
//! materialized. Sizes are asserted against the worst-case bounds.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::ConstructionError;
use crate::horizontal::{product_with, HState, HorizontalMachine, Letter, VState};
use crate::sdta::{no_errors, Sdta, SizePair};
use crate::trees::Symbol;
use crate::wdta::Wdta;

/// A letter of a virtual classifier: a (structured) vertical state or a
/// literal leaf symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum VLetter<V> {
    State(V),
    Leaf(Symbol),
}

/// A classifier family given by functions rather than tables.
pub(crate) trait Virtual {
    type V: Ord + Clone;
    type H: Ord + Clone;

    fn alphabet(&self) -> Vec<Symbol>;
    fn start(&self, sym: &Symbol) -> Option<Self::H>;
    fn step(&self, sym: &Symbol, h: &Self::H, letter: &VLetter<Self::V>) -> Option<Self::H>;
    fn output(&self, sym: &Symbol, h: &Self::H) -> Option<Self::V>;
    fn is_final(&self, v: &Self::V) -> bool;
    fn name(&self, v: &Self::V) -> String;
}

pub(crate) struct Explored<V, H> {
    pub sdta: Sdta,
    pub vstates: Vec<V>,
    pub hstates: BTreeMap<Symbol, Vec<H>>,
}

struct SymbolTable<H> {
    list: Vec<H>,
    index: BTreeMap<H, u32>,
    outputs: Vec<Option<usize>>,
    edges: Vec<Vec<(usize, u32)>>,
    done: Vec<usize>,
}

/// Fixpoint exploration: vertical states are discovered as outputs of
/// reachable horizontal states, and every newly discovered vertical state is
/// fed back as a letter to all classifiers. Discovery order is deterministic.
pub(crate) fn explore<X: Virtual>(x: &X) -> Explored<X::V, X::H> {
    let alphabet = x.alphabet();
    let mut vlist: Vec<X::V> = Vec::new();
    let mut vindex: BTreeMap<X::V, usize> = BTreeMap::new();
    let mut letters: Vec<VLetter<X::V>> = Vec::new();

    let mut discover = |v: X::V, vlist: &mut Vec<X::V>, letters: &mut Vec<VLetter<X::V>>| -> usize {
        if let Some(&i) = vindex.get(&v) {
            return i;
        }
        let i = vlist.len();
        vindex.insert(v.clone(), i);
        vlist.push(v.clone());
        letters.push(VLetter::State(v));
        i
    };

    let mut tables: Vec<SymbolTable<X::H>> = Vec::new();
    for sym in &alphabet {
        let mut table = SymbolTable {
            list: Vec::new(),
            index: BTreeMap::new(),
            outputs: Vec::new(),
            edges: Vec::new(),
            done: Vec::new(),
        };
        let start = x.start(sym);
        let leaf_output = start.as_ref().and_then(|h| x.output(sym, h));
        if leaf_output.is_none() {
            letters.push(VLetter::Leaf(sym.clone()));
        }
        if let Some(h) = start {
            let out = leaf_output.map(|v| discover(v, &mut vlist, &mut letters));
            table.index.insert(h.clone(), 0);
            table.list.push(h);
            table.outputs.push(out);
            table.edges.push(Vec::new());
            table.done.push(0);
        }
        tables.push(table);
    }

    loop {
        let mut changed = false;
        for (sym, table) in alphabet.iter().zip(tables.iter_mut()) {
            let mut i = 0;
            while i < table.list.len() {
                while table.done[i] < letters.len() {
                    let li = table.done[i];
                    table.done[i] += 1;
                    changed = true;
                    let Some(next) = x.step(sym, &table.list[i], &letters[li]) else {
                        continue;
                    };
                    let id = match table.index.get(&next) {
                        Some(&id) => id,
                        None => {
                            let id = table.list.len() as u32;
                            let out = x
                                .output(sym, &next)
                                .map(|v| discover(v, &mut vlist, &mut letters));
                            table.index.insert(next.clone(), id);
                            table.list.push(next);
                            table.outputs.push(out);
                            table.edges.push(Vec::new());
                            table.done.push(0);
                            id
                        }
                    };
                    table.edges[i].push((li, id));
                }
                i += 1;
            }
        }
        if !changed {
            break;
        }
    }

    let concrete: Vec<Letter> = letters
        .iter()
        .map(|l| match l {
            VLetter::State(v) => Letter::State(VState(vindex_of(&vlist, v) as u32)),
            VLetter::Leaf(s) => Letter::Leaf(s.clone()),
        })
        .collect();
    let mut classifiers = BTreeMap::new();
    let mut hstates = BTreeMap::new();
    for (sym, table) in alphabet.iter().zip(tables) {
        let mut m = HorizontalMachine::classifier(table.list.len().max(1));
        for (from, row) in table.edges.iter().enumerate() {
            for &(li, to) in row {
                m.add_transition(HState(from as u32), concrete[li].clone(), HState(to))
                    .expect("explored machine is deterministic");
            }
        }
        for (h, out) in table.outputs.iter().enumerate() {
            m.set_output(HState(h as u32), out.map(|v| VState(v as u32)))
                .expect("classifier");
        }
        classifiers.insert(sym.clone(), m);
        hstates.insert(sym.clone(), table.list);
    }
    let finals: Vec<VState> = vlist
        .iter()
        .enumerate()
        .filter(|(_, v)| x.is_final(v))
        .map(|(i, _)| VState(i as u32))
        .collect();
    let names: Vec<String> = vlist.iter().map(|v| x.name(v)).collect();
    let sdta = Sdta::new(alphabet, vlist.len(), finals, classifiers).with_names(names);
    Explored {
        sdta,
        vstates: vlist,
        hstates,
    }
}

fn vindex_of<V: Ord>(list: &[V], v: &V) -> usize {
    list.iter().position(|w| w == v).expect("discovered")
}

fn check_valid(a: &Sdta, which: &str) -> Result<(), ConstructionError> {
    let v = a.validate();
    if no_errors(&v) {
        Ok(())
    } else {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(ConstructionError::Invalid(format!("{which}: {}", msgs.join("; "))))
    }
}

fn check_valid_wdta(a: &Wdta, which: &str) -> Result<(), ConstructionError> {
    let v = a.validate();
    if no_errors(&v) {
        Ok(())
    } else {
        let msgs: Vec<String> = v.iter().map(ToString::to_string).collect();
        Err(ConstructionError::Invalid(format!("{which}: {}", msgs.join("; "))))
    }
}

/// `a` over a larger alphabet; new symbols get empty classifiers.
pub fn sdta_over_alphabet(a: &Sdta, alphabet: &BTreeSet<Symbol>) -> Sdta {
    let mut all = a.alphabet().clone();
    all.extend(alphabet.iter().cloned());
    let out = Sdta::new(all, a.num_states(), a.finals().iter().copied(), a.classifiers().clone());
    match a.names() {
        Some(n) => out.with_names(n.to_vec()),
        None => out,
    }
}

/// The inputs as the constructions see them: leaf letters turned into proxy
/// states and both over the joint alphabet. Bounds refer to these sizes.
pub fn prepare_pair(a1: &Sdta, a2: &Sdta) -> (Sdta, Sdta) {
    let alphabet: BTreeSet<Symbol> = a1.alphabet().union(a2.alphabet()).cloned().collect();
    (
        sdta_over_alphabet(&a1.with_leaf_states(), &alphabet),
        sdta_over_alphabet(&a2.with_leaf_states(), &alphabet),
    )
}

fn name_or_dead(a: &Sdta, v: Option<VState>) -> String {
    v.map_or_else(|| "dead".to_string(), |v| a.state_name(v))
}

struct PairProduct<'a> {
    a1: &'a Sdta,
    a2: &'a Sdta,
    padded: bool,
}

type Pair<T> = (Option<T>, Option<T>);

impl PairProduct<'_> {
    fn keep<T>(&self, p: &Pair<T>) -> bool {
        if self.padded {
            p.0.is_some() || p.1.is_some()
        } else {
            p.0.is_some() && p.1.is_some()
        }
    }

    fn side(&self, k: usize) -> &Sdta {
        if k == 0 {
            self.a1
        } else {
            self.a2
        }
    }
}

fn side_letter(l: &VLetter<Pair<VState>>, k: usize) -> Option<Letter> {
    match l {
        VLetter::State(p) => (if k == 0 { p.0 } else { p.1 }).map(Letter::State),
        VLetter::Leaf(s) => Some(Letter::Leaf(s.clone())),
    }
}

impl Virtual for PairProduct<'_> {
    type V = Pair<VState>;
    type H = Pair<HState>;

    fn alphabet(&self) -> Vec<Symbol> {
        self.a1.alphabet().iter().cloned().collect()
    }

    fn start(&self, sym: &Symbol) -> Option<Self::H> {
        let p = (
            self.a1.classifier(sym).map(HorizontalMachine::start),
            self.a2.classifier(sym).map(HorizontalMachine::start),
        );
        self.keep(&p).then_some(p)
    }

    fn step(&self, sym: &Symbol, h: &Self::H, l: &VLetter<Self::V>) -> Option<Self::H> {
        let comp = |k: usize, c: Option<HState>| -> Option<HState> {
            let c = c?;
            let letter = side_letter(l, k)?;
            self.side(k).classifier(sym)?.step(c, &letter)
        };
        let p = (comp(0, h.0), comp(1, h.1));
        self.keep(&p).then_some(p)
    }

    fn output(&self, sym: &Symbol, h: &Self::H) -> Option<Self::V> {
        let comp = |k: usize, c: Option<HState>| c.and_then(|c| self.side(k).classifier(sym)?.output(c));
        let p = (comp(0, h.0), comp(1, h.1));
        self.keep(&p).then_some(p)
    }

    fn is_final(&self, v: &Self::V) -> bool {
        let f1 = v.0.is_some_and(|q| self.a1.is_final(q));
        let f2 = v.1.is_some_and(|q| self.a2.is_final(q));
        if self.padded {
            f1 || f2
        } else {
            f1 && f2
        }
    }

    fn name(&self, v: &Self::V) -> String {
        format!("({},{})", name_or_dead(self.a1, v.0), name_or_dead(self.a2, v.1))
    }
}

/// Padded product: accepts `L(a1) ∪ L(a2)`.
pub fn sdta_union(a1: &Sdta, a2: &Sdta) -> Result<Sdta, ConstructionError> {
    check_valid(a1, "first operand")?;
    check_valid(a2, "second operand")?;
    let (b1, b2) = prepare_pair(a1, a2);
    let ex = explore(&PairProduct {
        a1: &b1,
        a2: &b2,
        padded: true,
    });
    let bound = (b1.num_states() + 1) * (b2.num_states() + 1) - 1;
    assert!(ex.sdta.num_states() <= bound, "union exceeds the vertical bound");
    for (sym, m) in ex.sdta.classifiers() {
        let hb = (hsize(&b1, sym) + 1) * (hsize(&b2, sym) + 1) - 1;
        assert!(m.num_states() <= hb, "union exceeds the horizontal bound for {sym}");
    }
    Ok(ex.sdta)
}

/// Plain product: accepts `L(a1) ∩ L(a2)`.
pub fn sdta_intersection(a1: &Sdta, a2: &Sdta) -> Result<Sdta, ConstructionError> {
    check_valid(a1, "first operand")?;
    check_valid(a2, "second operand")?;
    let (b1, b2) = prepare_pair(a1, a2);
    let ex = explore(&PairProduct {
        a1: &b1,
        a2: &b2,
        padded: false,
    });
    assert!(ex.sdta.num_states() <= b1.num_states() * b2.num_states());
    for (sym, m) in ex.sdta.classifiers() {
        // An empty product still carries a one-state classifier.
        let hb = (hsize(&b1, sym) * hsize(&b2, sym)).max(1);
        assert!(m.num_states() <= hb, "intersection exceeds the horizontal bound for {sym}");
    }
    Ok(ex.sdta)
}

fn hsize(a: &Sdta, sym: &Symbol) -> usize {
    a.classifier(sym).map_or(0, HorizontalMachine::num_states)
}

/// Vertical bound for concatenation, `(k+1)(2^k (l+1) − 2^(k−1)) − 1` with
/// `k` outer and `l` inner states. Saturates.
pub fn concat_vertical_bound(outer: usize, inner: usize) -> u128 {
    if outer == 0 {
        return 0;
    }
    let pow = |e: usize| 1u128.checked_shl(e as u32).unwrap_or(u128::MAX);
    let k = outer as u128;
    let l = inner as u128;
    let inner_term = pow(outer)
        .saturating_mul(l + 1)
        .saturating_sub(pow(outer - 1));
    (k + 1).saturating_mul(inner_term).saturating_sub(1)
}

/// Per-symbol horizontal bound for concatenation,
/// `(c_inner+1)(c_outer+1) 2^(c_outer+1)`. Saturates.
pub fn concat_horizontal_bound(outer: usize, inner: usize) -> u128 {
    let pow = 1u128.checked_shl(outer as u32 + 1).unwrap_or(u128::MAX);
    ((outer as u128 + 1) * (inner as u128 + 1)).saturating_mul(pow)
}

/// A vertical state of the concatenation automaton.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConcatState {
    /// Outer run with no substitution.
    pub p1: Option<VState>,
    /// Outer states reachable with exactly one substitution below.
    pub p2: Vec<VState>,
    /// Inner run.
    pub q: Option<VState>,
}

/// A horizontal state of the concatenation automaton.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConcatHState {
    pub c1: Option<HState>,
    pub c2: Vec<HState>,
    pub x: bool,
    pub cq: Option<HState>,
}

struct Concat<'a> {
    outer: &'a Sdta,
    inner: &'a Sdta,
    p_leaf: Vec<VState>,
}

fn union_sorted(into: &mut Vec<HState>, extra: impl IntoIterator<Item = HState>) {
    into.extend(extra);
    into.sort_unstable();
    into.dedup();
}

impl Virtual for Concat<'_> {
    type V = ConcatState;
    type H = ConcatHState;

    fn alphabet(&self) -> Vec<Symbol> {
        self.outer.alphabet().iter().cloned().collect()
    }

    fn start(&self, sym: &Symbol) -> Option<ConcatHState> {
        let d1 = self.outer.classifier(sym)?;
        let d2 = self.inner.classifier(sym)?;
        Some(ConcatHState {
            c1: Some(d1.start()),
            c2: vec![d1.start()],
            x: false,
            cq: Some(d2.start()),
        })
    }

    fn step(&self, sym: &Symbol, h: &ConcatHState, l: &VLetter<ConcatState>) -> Option<ConcatHState> {
        let d1 = self.outer.classifier(sym)?;
        let d2 = self.inner.classifier(sym)?;
        let next = match l {
            VLetter::Leaf(s) => {
                let a = Letter::Leaf(s.clone());
                let mut c2 = Vec::new();
                union_sorted(&mut c2, h.c2.iter().filter_map(|&c| d1.step(c, &a)));
                ConcatHState {
                    c1: h.c1.and_then(|c| d1.step(c, &a)),
                    c2,
                    x: h.x,
                    cq: h.cq.and_then(|c| d2.step(c, &a)),
                }
            }
            VLetter::State(r) => {
                let via_p1 = |c: HState| r.p1.and_then(|p| d1.step(c, &Letter::State(p)));
                let mut c2 = Vec::new();
                let x = if r.p2.is_empty() {
                    if h.x {
                        union_sorted(&mut c2, h.c2.iter().filter_map(|&c| via_p1(c)));
                    }
                    h.x
                } else {
                    if let Some(c1) = h.c1 {
                        union_sorted(&mut c2, r.p2.iter().filter_map(|&p| d1.step(c1, &Letter::State(p))));
                    }
                    if h.x {
                        union_sorted(&mut c2, h.c2.iter().filter_map(|&c| via_p1(c)));
                    }
                    true
                };
                ConcatHState {
                    c1: h.c1.and_then(via_p1),
                    c2,
                    x,
                    cq: h.cq.and_then(|c| r.q.and_then(|q| d2.step(c, &Letter::State(q)))),
                }
            }
        };
        debug_assert!(!h.x || next.x, "the concatenation flag never resets");
        let sink = next.c1.is_none() && next.cq.is_none() && (next.c2.is_empty() || !next.x);
        (!sink).then_some(next)
    }

    fn output(&self, sym: &Symbol, h: &ConcatHState) -> Option<ConcatState> {
        let d1 = self.outer.classifier(sym)?;
        let d2 = self.inner.classifier(sym)?;
        let p1 = h.c1.and_then(|c| d1.output(c));
        let q = h.cq.and_then(|c| d2.output(c));
        let mut p2: BTreeSet<VState> = BTreeSet::new();
        if q.is_some_and(|q| self.inner.is_final(q)) {
            p2.extend(self.p_leaf.iter().copied());
        }
        if h.x {
            p2.extend(h.c2.iter().filter_map(|&c| d1.output(c)));
        }
        if p1.is_none() && p2.is_empty() && q.is_none() {
            return None;
        }
        Some(ConcatState {
            p1,
            p2: p2.into_iter().collect(),
            q,
        })
    }

    fn is_final(&self, v: &ConcatState) -> bool {
        v.p2.iter().any(|&p| self.outer.is_final(p))
    }

    fn name(&self, v: &ConcatState) -> String {
        let mut s = String::from("(");
        s.push_str(&name_or_dead(self.outer, v.p1));
        s.push_str(",{");
        for (i, p) in v.p2.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", self.outer.state_name(*p));
        }
        s.push_str("},");
        s.push_str(&name_or_dead(self.inner, v.q));
        s.push(')');
        s
    }
}

/// Result of [`sdta_concat_detailed`].
#[derive(Clone, Debug)]
pub struct ConcatResult {
    pub automaton: Sdta,
    pub states: Vec<ConcatState>,
    /// Sizes of the prepared inner and outer automata.
    pub inner_size: SizePair,
    pub outer_size: SizePair,
    pub p_leaf: Vec<VState>,
}

/// Accepts `L(inner)·L(outer)`: trees obtained from a tree of `outer` by
/// replacing one leaf with a tree of `inner`.
pub fn sdta_concat(inner: &Sdta, outer: &Sdta) -> Result<Sdta, ConstructionError> {
    Ok(sdta_concat_detailed(inner, outer)?.automaton)
}

/// As [`sdta_concat`], also returning the structured states.
pub fn sdta_concat_detailed(inner: &Sdta, outer: &Sdta) -> Result<ConcatResult, ConstructionError> {
    check_valid(inner, "inner operand")?;
    check_valid(outer, "outer operand")?;
    let (o, i) = prepare_pair(outer, inner);
    let p_leaf: Vec<VState> = outer
        .alphabet()
        .iter()
        .filter_map(|s| o.leaf_state(s))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if p_leaf.is_empty() {
        return Err(ConstructionError::NoLeafStates);
    }
    let ex = explore(&Concat {
        outer: &o,
        inner: &i,
        p_leaf: p_leaf.clone(),
    });
    let vb = concat_vertical_bound(o.num_states(), i.num_states());
    assert!(ex.sdta.num_states() as u128 <= vb, "concatenation exceeds the vertical bound");
    for (sym, m) in ex.sdta.classifiers() {
        let hb = concat_horizontal_bound(hsize(&o, sym), hsize(&i, sym));
        assert!(m.num_states() as u128 <= hb, "concatenation exceeds the horizontal bound for {sym}");
    }
    for (sym, hs) in &ex.hstates {
        let d = ex.sdta.classifier(sym).expect("explored");
        for (k, h) in hs.iter().enumerate() {
            for (_, t) in d.transitions(HState(k as u32)) {
                assert!(!h.x || hs[t.index()].x, "the concatenation flag never resets");
            }
        }
    }
    Ok(ConcatResult {
        automaton: ex.sdta,
        states: ex.vstates,
        inner_size: i.size(),
        outer_size: o.size(),
        p_leaf,
    })
}

/// WDTA inputs as the constructions see them.
pub fn prepare_wdta_pair(a1: &Wdta, a2: &Wdta) -> Result<(Wdta, Wdta), ConstructionError> {
    let n1 = a1.with_leaf_states().map_err(|e| ConstructionError::Invalid(e.to_string()))?;
    let n2 = a2.with_leaf_states().map_err(|e| ConstructionError::Invalid(e.to_string()))?;
    let alphabet: BTreeSet<Symbol> = n1.alphabet().union(n2.alphabet()).cloned().collect();
    let widen = |w: Wdta| {
        let names: Vec<String> = w.states().map(|v| w.state_name(v)).collect();
        Wdta::new(alphabet.iter().cloned(), w.num_states(), w.finals().iter().copied(), w.hlangs().clone())
            .with_names(names)
    };
    Ok((widen(n1), widen(n2)))
}

/// Horizontal bound of the WDTA union, summed over symbols.
pub fn wdta_union_horizontal_bound(a1: &Wdta, a2: &Wdta) -> u128 {
    let alphabet: BTreeSet<Symbol> = a1.alphabet().union(a2.alphabet()).cloned().collect();
    let mut total: u128 = 0;
    for sym in &alphabet {
        let s1: Vec<u128> = a1.hlangs_for(sym).map(|(_, m)| m.num_states() as u128).collect();
        let s2: Vec<u128> = a2.hlangs_for(sym).map(|(_, m)| m.num_states() as u128).collect();
        let pairs: u128 = s1.iter().map(|x| s2.iter().map(|y| x * y).sum::<u128>()).sum();
        let prod1: u128 = s1.iter().fold(1u128, |a, b| a.saturating_mul(*b));
        let prod2: u128 = s2.iter().fold(1u128, |a, b| a.saturating_mul(*b));
        let side1: u128 = s1.iter().map(|x| x.saturating_mul(prod2)).fold(0, u128::saturating_add);
        let side2: u128 = s2.iter().map(|y| y.saturating_mul(prod1)).fold(0, u128::saturating_add);
        total = total.saturating_add(pairs).saturating_add(side1).saturating_add(side2);
    }
    total
}

/// Horizontal bound of the WDTA intersection, summed over symbols.
pub fn wdta_intersection_horizontal_bound(a1: &Wdta, a2: &Wdta) -> u128 {
    let alphabet: BTreeSet<Symbol> = a1.alphabet().union(a2.alphabet()).cloned().collect();
    alphabet
        .iter()
        .map(|sym| {
            let s2: u128 = a2.hlangs_for(sym).map(|(_, m)| m.num_states() as u128).sum();
            a1.hlangs_for(sym).map(|(_, m)| m.num_states() as u128 * s2).sum::<u128>()
        })
        .sum()
}

/// Pair states of a WDTA product and the letters over them.
struct PairSpace {
    pairs: Vec<Pair<VState>>,
    letters: Vec<Letter>,
}

impl PairSpace {
    fn new(n1: usize, n2: usize, padded: bool, leaf_letters: BTreeSet<Letter>) -> PairSpace {
        let opts = |n: usize| -> Vec<Option<VState>> {
            let mut v: Vec<Option<VState>> = (0..n as u32).map(|i| Some(VState(i))).collect();
            if padded {
                v.push(None);
            }
            v
        };
        let mut pairs = Vec::new();
        for q in opts(n1) {
            for p in opts(n2) {
                if q.is_some() || p.is_some() {
                    pairs.push((q, p));
                }
            }
        }
        let mut letters: Vec<Letter> = (0..pairs.len() as u32).map(Letter::state).collect();
        letters.extend(leaf_letters);
        PairSpace { pairs, letters }
    }

    fn translate(&self, side: usize, l: &Letter) -> Option<Letter> {
        match l {
            Letter::State(v) => {
                let pair = self.pairs[v.index()];
                (if side == 0 { pair.0 } else { pair.1 }).map(Letter::State)
            }
            Letter::Leaf(_) => Some(l.clone()),
        }
    }
}

fn leaf_letters(a: &Wdta) -> BTreeSet<Letter> {
    a.letter_alphabet()
        .into_iter()
        .filter(|l| matches!(l, Letter::Leaf(_)))
        .collect()
}

fn wdta_pair_name(a1: &Wdta, a2: &Wdta, p: Pair<VState>) -> String {
    let n = |a: &Wdta, v: Option<VState>| v.map_or_else(|| "dead".to_string(), |v| a.state_name(v));
    format!("({},{})", n(a1, p.0), n(a2, p.1))
}

/// Product acceptor for one pair state of a WDTA union or intersection.
fn pair_hlang(a1: &Wdta, a2: &Wdta, space: &PairSpace, sym: &Symbol, pair: Pair<VState>) -> Option<HorizontalMachine> {
    match pair {
        (Some(q), Some(p)) => {
            let m1 = a1.hlang(sym, q)?;
            let m2 = a2.hlang(sym, p)?;
            let prod = product_with(
                &[m1, m2],
                &space.letters,
                |k, l| space.translate(k, l),
                |t| t.iter().all(Option::is_some),
                |t| m1.is_accepting(t[0].unwrap()) && m2.is_accepting(t[1].unwrap()),
            );
            Some(prod.machine)
        }
        (Some(q), None) => Some(exclusive_hlang(a1.hlang(sym, q)?, a2, space, sym, 0)),
        (None, Some(p)) => Some(exclusive_hlang(a2.hlang(sym, p)?, a1, space, sym, 1)),
        (None, None) => None,
    }
}

/// Words accepted by `main` (read as side `side`) and by no acceptor of
/// `other` for `sym` (read as the other side).
fn exclusive_hlang(main: &HorizontalMachine, other: &Wdta, space: &PairSpace, sym: &Symbol, side: usize) -> HorizontalMachine {
    let mut machines = vec![main];
    machines.extend(other.hlangs_for(sym).map(|(_, m)| m));
    let prod = product_with(
        &machines,
        &space.letters,
        |k, l| space.translate(if k == 0 { side } else { 1 - side }, l),
        |t| t[0].is_some(),
        |t| {
            main.is_accepting(t[0].unwrap())
                && t[1..]
                    .iter()
                    .zip(&machines[1..])
                    .all(|(c, m)| !c.is_some_and(|c| m.is_accepting(c)))
        },
    );
    prod.machine
}

/// Keeps the states some tree reaches, renumbers them, and minimizes every
/// acceptor. Empty acceptors are dropped.
pub(crate) fn wdta_reachable_minimized(w: &Wdta) -> Wdta {
    let mut reach: BTreeSet<VState> = BTreeSet::new();
    loop {
        let mut grew = false;
        for ((_, q), m) in w.hlangs() {
            if reach.contains(q) {
                continue;
            }
            let seen = m.reachable(|l| match l {
                Letter::State(v) => reach.contains(v),
                Letter::Leaf(_) => true,
            });
            if seen.iter().any(|&h| m.is_accepting(h)) {
                reach.insert(*q);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    let renumber: BTreeMap<VState, VState> = reach
        .iter()
        .enumerate()
        .map(|(i, v)| (*v, VState(i as u32)))
        .collect();
    let mut hlangs = BTreeMap::new();
    for ((sym, q), m) in w.hlangs() {
        let Some(&nq) = renumber.get(q) else { continue };
        let m = m
            .map_letters(|l| match l {
                Letter::State(v) => renumber.get(v).map(|&n| Letter::State(n)),
                other => Some(other.clone()),
            })
            .minimize();
        if !m.is_empty() {
            hlangs.insert((sym.clone(), nq), m);
        }
    }
    let names: Vec<String> = reach.iter().map(|&v| w.state_name(v)).collect();
    let finals = reach.iter().filter(|v| w.is_final(**v)).map(|v| renumber[v]);
    Wdta::new(w.alphabet().iter().cloned(), reach.len(), finals, hlangs).with_names(names)
}

fn wdta_product(a1: &Wdta, a2: &Wdta, padded: bool) -> Result<Wdta, ConstructionError> {
    check_valid_wdta(a1, "first operand")?;
    check_valid_wdta(a2, "second operand")?;
    let (b1, b2) = prepare_wdta_pair(a1, a2)?;
    let mut leaves = leaf_letters(&b1);
    leaves.extend(leaf_letters(&b2));
    let space = PairSpace::new(b1.num_states(), b2.num_states(), padded, leaves);
    let mut hlangs = BTreeMap::new();
    for sym in b1.alphabet() {
        for (i, &pair) in space.pairs.iter().enumerate() {
            if let Some(m) = pair_hlang(&b1, &b2, &space, sym, pair) {
                hlangs.insert((sym.clone(), VState(i as u32)), m);
            }
        }
    }
    let finals = space.pairs.iter().enumerate().filter_map(|(i, p)| {
        let f1 = p.0.is_some_and(|q| b1.is_final(q));
        let f2 = p.1.is_some_and(|q| b2.is_final(q));
        let fin = if padded { f1 || f2 } else { f1 && f2 };
        fin.then_some(VState(i as u32))
    });
    let names: Vec<String> = space.pairs.iter().map(|&p| wdta_pair_name(&b1, &b2, p)).collect();
    let full = Wdta::new(b1.alphabet().iter().cloned(), space.pairs.len(), finals, hlangs).with_names(names);
    let out = wdta_reachable_minimized(&full);
    let vb = if padded {
        (b1.num_states() + 1) * (b2.num_states() + 1) - 1
    } else {
        b1.num_states() * b2.num_states()
    };
    assert!(out.num_states() <= vb, "WDTA product exceeds the vertical bound");
    Ok(out)
}

/// Accepts `L(a1) ∪ L(a2)`. Pair states use the product of the two
/// acceptors; a state alive on one side only accepts the words of that side
/// that no acceptor of the other side accepts.
pub fn wdta_union(a1: &Wdta, a2: &Wdta) -> Result<Wdta, ConstructionError> {
    wdta_product(a1, a2, true)
}

/// Accepts `L(a1) ∩ L(a2)` with pairwise products of acceptors.
pub fn wdta_intersection(a1: &Wdta, a2: &Wdta) -> Result<Wdta, ConstructionError> {
    wdta_product(a1, a2, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::{enumerate_trees, symbols, Tree};
    use crate::wdta::sdta_to_wdta;

    fn sym(s: &str) -> Symbol {
        Symbol::new(s).unwrap()
    }

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    /// Accepts exactly the leaf `a`.
    fn only_a() -> Sdta {
        let mut da = HorizontalMachine::classifier(1);
        da.set_output(HState(0), Some(VState(0))).unwrap();
        Sdta::new(symbols(["a", "b", "c"]).unwrap(), 1, [VState(0)], BTreeMap::from([(sym("a"), da)]))
    }

    /// Accepts exactly `b(a,a)`.
    fn only_baa() -> Sdta {
        let mut da = HorizontalMachine::classifier(1);
        da.set_output(HState(0), Some(VState(0))).unwrap();
        let mut db = HorizontalMachine::classifier(3);
        db.add_transition(HState(0), Letter::state(0), HState(1)).unwrap();
        db.add_transition(HState(1), Letter::state(0), HState(2)).unwrap();
        db.set_output(HState(2), Some(VState(1))).unwrap();
        Sdta::new(
            symbols(["a", "b", "c"]).unwrap(),
            2,
            [VState(1)],
            BTreeMap::from([(sym("a"), da), (sym("b"), db)]),
        )
    }

    /// Accepts exactly `c(a)`.
    fn only_ca() -> Sdta {
        let mut da = HorizontalMachine::classifier(1);
        da.set_output(HState(0), Some(VState(0))).unwrap();
        let mut dc = HorizontalMachine::classifier(2);
        dc.add_transition(HState(0), Letter::state(0), HState(1)).unwrap();
        dc.set_output(HState(1), Some(VState(1))).unwrap();
        Sdta::new(
            symbols(["a", "b", "c"]).unwrap(),
            2,
            [VState(1)],
            BTreeMap::from([(sym("a"), da), (sym("c"), dc)]),
        )
    }

    fn corpus() -> Vec<Tree> {
        enumerate_trees(&symbols(["a", "b", "c"]).unwrap(), 2, 2).collect()
    }

    #[test]
    fn union_of_two_singletons() {
        let u = sdta_union(&only_a(), &only_baa()).unwrap();
        assert!(u.is_valid());
        let accepted: Vec<String> = corpus().into_iter().filter(|x| u.accepts(x)).map(|x| x.to_string()).collect();
        assert_eq!(accepted, ["a", "b(a,a)"]);
        assert!(u.num_states() <= 3);
    }

    #[test]
    fn intersection_of_disjoint_singletons_is_empty() {
        let i = sdta_intersection(&only_a(), &only_baa()).unwrap();
        assert!(corpus().iter().all(|x| !i.accepts(x)));
        let same = sdta_intersection(&only_baa(), &only_baa()).unwrap();
        for x in corpus() {
            assert_eq!(same.accepts(&x), only_baa().accepts(&x), "{x}");
        }
    }

    #[test]
    fn concat_of_singletons() {
        let c = sdta_concat(&only_ca(), &only_baa()).unwrap();
        assert!(c.accepts(&t("b(c(a),a)")));
        assert!(c.accepts(&t("b(a,c(a))")));
        assert!(!c.accepts(&t("b(a,a)")));
        assert!(!c.accepts(&t("b(c(a),c(a))")));
        assert!(!c.accepts(&t("c(a)")));
    }

    #[test]
    fn concat_with_leaf_inner_is_identity_on_leaves() {
        let c = sdta_concat(&only_a(), &only_baa()).unwrap();
        for x in corpus() {
            assert_eq!(c.accepts(&x), x == t("b(a,a)"), "{x}");
        }
    }

    #[test]
    fn concat_needs_outer_leaf_states() {
        let empty = Sdta::new(symbols(["a"]).unwrap(), 0, [], BTreeMap::new());
        assert_eq!(sdta_concat(&only_a(), &empty), Err(ConstructionError::NoLeafStates));
    }

    #[test]
    fn concat_bound_arithmetic() {
        assert_eq!(concat_vertical_bound(2, 2), 29);
        assert_eq!(concat_vertical_bound(2, 3), 41);
        assert_eq!(concat_vertical_bound(3, 2), 79);
        assert_eq!(concat_horizontal_bound(1, 1), 2 * 2 * 4);
    }

    #[test]
    fn wdta_union_and_intersection_agree_with_sdta() {
        let w1 = sdta_to_wdta(&only_a());
        let w2 = sdta_to_wdta(&only_baa());
        let u = wdta_union(&w1, &w2).unwrap();
        let i = wdta_intersection(&w2, &w2).unwrap();
        assert!(u.is_valid());
        assert!(i.is_valid());
        for x in corpus() {
            let (in1, in2) = (only_a().accepts(&x), only_baa().accepts(&x));
            assert_eq!(u.accepts(&x).unwrap(), in1 || in2, "{x}");
            assert_eq!(i.accepts(&x).unwrap(), in2, "{x}");
        }
    }

    #[test]
    fn wdta_union_bound_arithmetic() {
        // One state each, every acceptor of size 2: 4 + 2·2 + 2·2 per symbol.
        let mut two = HorizontalMachine::acceptor(2);
        two.add_transition(HState(0), Letter::state(0), HState(1)).unwrap();
        two.set_accepting(HState(1), true).unwrap();
        let hl: BTreeMap<_, _> = [("a", 0), ("b", 0)]
            .into_iter()
            .map(|(s, q)| ((sym(s), VState(q)), two.clone()))
            .collect();
        let w = Wdta::new(symbols(["a", "b"]).unwrap(), 1, [VState(0)], hl);
        assert_eq!(wdta_union_horizontal_bound(&w, &w), 2 * (4 + 4 + 4));
        assert_eq!(wdta_intersection_horizontal_bound(&w, &w), 2 * 4);
    }
}
