//! Corpus-wide language checks.
//!
//! The bounded corpora used here are far too large to list tree by tree
//! (four labels, height 3, width 3 is beyond 10^14 trees). Evaluation is
//! compositional, though: a node's result depends only on its label and its
//! children's results. [`outcome_classes`] therefore computes the exact set
//! of results over the whole corpus, with one witness tree per result, by
//! exploring child words per horizontal configuration. Anything decidable
//! from a result (acceptance, agreement of several automata, ambiguity) is
//! decided for every tree of the corpus at once.
//!
//! [`language_equal_by_enumeration`] streams the literal corpus instead and
//! is used to cross-check on corpora small enough to list.

use std::collections::{BTreeMap, BTreeSet};

use crate::horizontal::{HState, Letter, VState};
use crate::sdta::Sdta;
use crate::trees::{CorpusSpec, Symbol, Tree};
use crate::error::WitnessError;
use crate::wdta::Wdta;
use crate::witnesses::{string_dfa_b, StringDfa};

/// A compositional bottom-up evaluator.
pub trait BottomUp {
    /// Result of a whole subtree.
    type Out: Ord + Clone;
    /// Configuration while reading a node's children.
    type Hor: Ord + Clone;

    fn start(&self, sym: &Symbol) -> Self::Hor;
    fn step(&self, sym: &Symbol, h: &Self::Hor, child: &Self::Out) -> Self::Hor;
    fn finish(&self, sym: &Symbol, h: &Self::Hor, leaf: bool) -> Self::Out;

    fn eval_tree(&self, t: &Tree) -> Self::Out {
        let sym = t.label();
        let mut h = self.start(sym);
        for c in t.children() {
            let out = self.eval_tree(c);
            h = self.step(sym, &h, &out);
        }
        self.finish(sym, &h, t.is_leaf())
    }
}

/// A bottom-up evaluator with an acceptance condition on results.
pub trait Recognizer: BottomUp {
    fn accepting(&self, out: &Self::Out) -> bool;
}

impl BottomUp for Sdta {
    type Out = Option<Letter>;
    type Hor = Option<HState>;

    fn start(&self, sym: &Symbol) -> Self::Hor {
        self.classifier(sym).map(|m| m.start())
    }

    fn step(&self, sym: &Symbol, h: &Self::Hor, child: &Self::Out) -> Self::Hor {
        self.classifier(sym)?.step((*h)?, child.as_ref()?)
    }

    fn finish(&self, sym: &Symbol, h: &Self::Hor, leaf: bool) -> Self::Out {
        if leaf {
            return self.leaf_letter(sym);
        }
        self.classifier(sym)?.output((*h)?).map(Letter::State)
    }
}

impl Recognizer for Sdta {
    fn accepting(&self, out: &Self::Out) -> bool {
        matches!(out, Some(Letter::State(v)) if self.is_final(*v))
    }
}

/// Result of a WDTA on a subtree; ambiguity propagates to the root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WdtaOut {
    Run(Option<Letter>),
    Ambiguous,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum WdtaHor {
    Run(Vec<Option<HState>>),
    Dead,
    Ambiguous,
}

impl Wdta {
    fn select_at(&self, sym: &Symbol, states: &[Option<HState>]) -> Result<Option<VState>, ()> {
        let mut found = None;
        for ((q, m), h) in self.hlangs_for(sym).zip(states) {
            if h.is_some_and(|h| m.is_accepting(h)) {
                if found.is_some() {
                    return Err(());
                }
                found = Some(q);
            }
        }
        Ok(found)
    }
}

impl BottomUp for Wdta {
    type Out = WdtaOut;
    type Hor = WdtaHor;

    fn start(&self, sym: &Symbol) -> WdtaHor {
        WdtaHor::Run(self.hlangs_for(sym).map(|(_, m)| Some(m.start())).collect())
    }

    fn step(&self, sym: &Symbol, h: &WdtaHor, child: &WdtaOut) -> WdtaHor {
        match (h, child) {
            (WdtaHor::Ambiguous, _) | (_, WdtaOut::Ambiguous) => WdtaHor::Ambiguous,
            (WdtaHor::Dead, _) | (_, WdtaOut::Run(None)) => WdtaHor::Dead,
            (WdtaHor::Run(states), WdtaOut::Run(Some(l))) => {
                let next: Vec<Option<HState>> = self
                    .hlangs_for(sym)
                    .zip(states)
                    .map(|((_, m), c)| c.and_then(|c| m.step(c, l)))
                    .collect();
                if next.iter().all(Option::is_none) {
                    WdtaHor::Dead
                } else {
                    WdtaHor::Run(next)
                }
            }
        }
    }

    fn finish(&self, sym: &Symbol, h: &WdtaHor, leaf: bool) -> WdtaOut {
        match h {
            WdtaHor::Ambiguous => WdtaOut::Ambiguous,
            WdtaHor::Dead => WdtaOut::Run(None),
            WdtaHor::Run(states) => match self.select_at(sym, states) {
                Err(()) => WdtaOut::Ambiguous,
                Ok(Some(q)) => WdtaOut::Run(Some(Letter::State(q))),
                Ok(None) if leaf && self.alphabet().contains(sym) => WdtaOut::Run(Some(Letter::Leaf(sym.clone()))),
                Ok(None) => WdtaOut::Run(None),
            },
        }
    }
}

impl Recognizer for Wdta {
    fn accepting(&self, out: &WdtaOut) -> bool {
        matches!(out, WdtaOut::Run(Some(Letter::State(v))) if self.is_final(*v))
    }
}

/// Either kind of automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Automaton {
    Sdta(Sdta),
    Wdta(Wdta),
}

impl Automaton {
    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        match self {
            Automaton::Sdta(a) => a.alphabet(),
            Automaton::Wdta(a) => a.alphabet(),
        }
    }

    /// Acceptance; an ambiguous WDTA run counts as rejection.
    pub fn accepts(&self, t: &Tree) -> bool {
        match self {
            Automaton::Sdta(a) => a.accepts(t),
            Automaton::Wdta(a) => a.accepts(t).unwrap_or(false),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Automaton::Sdta(_) => "sdta",
            Automaton::Wdta(_) => "wdta",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AutOut {
    Sdta(Option<Letter>),
    Wdta(WdtaOut),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AutHor {
    Sdta(Option<HState>),
    Wdta(WdtaHor),
}

impl BottomUp for Automaton {
    type Out = AutOut;
    type Hor = AutHor;

    fn start(&self, sym: &Symbol) -> AutHor {
        match self {
            Automaton::Sdta(a) => AutHor::Sdta(a.start(sym)),
            Automaton::Wdta(a) => AutHor::Wdta(a.start(sym)),
        }
    }

    fn step(&self, sym: &Symbol, h: &AutHor, child: &AutOut) -> AutHor {
        match (self, h, child) {
            (Automaton::Sdta(a), AutHor::Sdta(h), AutOut::Sdta(c)) => AutHor::Sdta(a.step(sym, h, c)),
            (Automaton::Wdta(a), AutHor::Wdta(h), AutOut::Wdta(c)) => AutHor::Wdta(a.step(sym, h, c)),
            _ => unreachable!("configurations always match their automaton"),
        }
    }

    fn finish(&self, sym: &Symbol, h: &AutHor, leaf: bool) -> AutOut {
        match (self, h) {
            (Automaton::Sdta(a), AutHor::Sdta(h)) => AutOut::Sdta(a.finish(sym, h, leaf)),
            (Automaton::Wdta(a), AutHor::Wdta(h)) => AutOut::Wdta(a.finish(sym, h, leaf)),
            _ => unreachable!("configurations always match their automaton"),
        }
    }
}

impl Recognizer for Automaton {
    fn accepting(&self, out: &AutOut) -> bool {
        match (self, out) {
            (Automaton::Sdta(a), AutOut::Sdta(o)) => a.accepting(o),
            (Automaton::Wdta(a), AutOut::Wdta(o)) => a.accepting(o),
            _ => false,
        }
    }
}

/// Two evaluators run side by side.
pub struct Joint<'a, A, B>(pub &'a A, pub &'a B);

impl<A: BottomUp, B: BottomUp> BottomUp for Joint<'_, A, B> {
    type Out = (A::Out, B::Out);
    type Hor = (A::Hor, B::Hor);

    fn start(&self, sym: &Symbol) -> Self::Hor {
        (self.0.start(sym), self.1.start(sym))
    }

    fn step(&self, sym: &Symbol, h: &Self::Hor, child: &Self::Out) -> Self::Hor {
        (self.0.step(sym, &h.0, &child.0), self.1.step(sym, &h.1, &child.1))
    }

    fn finish(&self, sym: &Symbol, h: &Self::Hor, leaf: bool) -> Self::Out {
        (self.0.finish(sym, &h.0, leaf), self.1.finish(sym, &h.1, leaf))
    }
}

/// One result reached on the corpus, with a tree reaching it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeClass<O> {
    pub out: O,
    pub witness: Tree,
}

/// Every result `b` produces on some tree of the corpus, each with a
/// witness of least height. Exact for the whole corpus.
pub fn outcome_classes<B: BottomUp>(b: &B, corpus: &CorpusSpec) -> Vec<OutcomeClass<B::Out>> {
    let mut known: BTreeMap<B::Out, Tree> = BTreeMap::new();
    for sym in &corpus.alphabet {
        let out = b.finish(sym, &b.start(sym), true);
        known.entry(out).or_insert_with(|| Tree::leaf(sym.clone()));
    }
    for _ in 0..corpus.max_height {
        let children: Vec<(B::Out, Tree)> = known.iter().map(|(o, t)| (o.clone(), t.clone())).collect();
        let mut found: Vec<(B::Out, Tree)> = Vec::new();
        for sym in &corpus.alphabet {
            let mut frontier: BTreeMap<B::Hor, Vec<usize>> = BTreeMap::from([(b.start(sym), Vec::new())]);
            for _ in 0..corpus.max_width {
                let mut next: BTreeMap<B::Hor, Vec<usize>> = BTreeMap::new();
                for (h, word) in &frontier {
                    for (i, (o, _)) in children.iter().enumerate() {
                        let h2 = b.step(sym, h, o);
                        next.entry(h2).or_insert_with(|| {
                            let mut w = word.clone();
                            w.push(i);
                            w
                        });
                    }
                }
                for (h, word) in &next {
                    let out = b.finish(sym, h, false);
                    if !known.contains_key(&out) {
                        let kids = word.iter().map(|&i| children[i].1.clone()).collect();
                        found.push((out, Tree::node(sym.clone(), kids)));
                    }
                }
                frontier = next;
            }
        }
        let before = known.len();
        for (o, t) in found {
            known.entry(o).or_insert(t);
        }
        if known.len() == before {
            break;
        }
    }
    known.into_iter().map(|(out, witness)| OutcomeClass { out, witness }).collect()
}

/// Smallest witness (by height, then size, then text) among the classes
/// whose result satisfies `bad`.
pub fn find_violation<B: BottomUp>(
    b: &B,
    corpus: &CorpusSpec,
    bad: impl Fn(&B::Out) -> bool,
) -> (usize, Option<Tree>) {
    let classes = outcome_classes(b, corpus);
    let violating: Vec<&OutcomeClass<B::Out>> = classes.iter().filter(|c| bad(&c.out)).collect();
    let witness = violating
        .iter()
        .map(|c| &c.witness)
        .min_by_key(|t| (t.height(), t.size(), t.to_string()))
        .cloned();
    (violating.len(), witness)
}

/// Outcome of a corpus comparison.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    /// Number of distinct joint results that disagree.
    pub violations: usize,
    pub counterexample: Option<Tree>,
}

impl Comparison {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Whether `x` and `y` accept the same trees of the corpus. The
/// counterexample, if any, is a smallest disagreeing tree.
pub fn language_equal<X: Recognizer, Y: Recognizer>(x: &X, y: &Y, corpus: &CorpusSpec) -> Comparison {
    let (violations, counterexample) =
        find_violation(&Joint(x, y), corpus, |(a, b)| x.accepting(a) != y.accepting(b));
    Comparison {
        violations,
        counterexample,
    }
}

/// As [`language_equal`] but evaluating every tree of the corpus in
/// enumeration order; the counterexample is the first disagreeing tree.
pub fn language_equal_by_enumeration<X: Recognizer, Y: Recognizer>(x: &X, y: &Y, corpus: &CorpusSpec) -> Comparison {
    let mut violations = 0;
    let mut counterexample = None;
    for t in corpus.trees() {
        if x.accepting(&x.eval_tree(&t)) != y.accepting(&y.eval_tree(&t)) {
            violations += 1;
            counterexample.get_or_insert(t);
        }
    }
    Comparison {
        violations,
        counterexample,
    }
}

/// Checks `result` against a Boolean combination of `x` and `y` on the
/// whole corpus.
pub fn check_boolean<X: Recognizer, Y: Recognizer, R: Recognizer>(
    x: &X,
    y: &Y,
    result: &R,
    corpus: &CorpusSpec,
    combine: impl Fn(bool, bool) -> bool,
) -> Comparison {
    let inputs = Joint(x, y);
    let (violations, counterexample) = find_violation(&Joint(&inputs, result), corpus, |((a, b), r)| {
        combine(x.accepting(a), y.accepting(b)) != result.accepting(r)
    });
    Comparison {
        violations,
        counterexample,
    }
}

/// Checks that `result` accepts exactly the trees `x` rejects.
pub fn check_complement<X: Recognizer, R: Recognizer>(x: &X, result: &R, corpus: &CorpusSpec) -> Comparison {
    let (violations, counterexample) =
        find_violation(&Joint(x, result), corpus, |(a, r)| x.accepting(a) == result.accepting(r));
    Comparison {
        violations,
        counterexample,
    }
}

/// Independent evaluator for `L(inner)·L(outer)` that follows the definition
/// rather than the construction. For a subtree it tracks the inner result,
/// the outer result without substitution, and every outer result obtainable
/// by substituting exactly one subtree of the inner language (at or below
/// the node) with a leaf.
pub struct ConcatOracle<'a> {
    pub inner: &'a Sdta,
    pub outer: &'a Sdta,
}

impl ConcatOracle<'_> {
    fn substituted_here(&self) -> BTreeSet<Letter> {
        self.outer.alphabet().iter().filter_map(|s| self.outer.leaf_letter(s)).collect()
    }
}

type ConcatOut = (Option<Letter>, Option<Letter>, BTreeSet<Letter>);
type ConcatHor = (Option<HState>, Option<HState>, BTreeSet<HState>);

impl BottomUp for ConcatOracle<'_> {
    type Out = ConcatOut;
    type Hor = ConcatHor;

    fn start(&self, sym: &Symbol) -> ConcatHor {
        (self.inner.start(sym), self.outer.start(sym), BTreeSet::new())
    }

    fn step(&self, sym: &Symbol, h: &ConcatHor, child: &ConcatOut) -> ConcatHor {
        let inner = self.inner.step(sym, &h.0, &child.0);
        let outer = self.outer.step(sym, &h.1, &child.1);
        let mut once: BTreeSet<HState> = BTreeSet::new();
        if let Some(d) = self.outer.classifier(sym) {
            if let Some(o) = &child.1 {
                once.extend(h.2.iter().filter_map(|&c| d.step(c, o)));
            }
            if let Some(c) = h.1 {
                once.extend(child.2.iter().filter_map(|l| d.step(c, l)));
            }
        }
        (inner, outer, once)
    }

    fn finish(&self, sym: &Symbol, h: &ConcatHor, leaf: bool) -> ConcatOut {
        let inner = self.inner.finish(sym, &h.0, leaf);
        let outer = self.outer.finish(sym, &h.1, leaf);
        let mut once: BTreeSet<Letter> = BTreeSet::new();
        if let Some(d) = self.outer.classifier(sym) {
            once.extend(h.2.iter().filter_map(|&c| d.output(c)).map(Letter::State));
        }
        if self.inner.accepting(&inner) {
            once.extend(self.substituted_here());
        }
        (inner, outer, once)
    }
}

impl Recognizer for ConcatOracle<'_> {
    fn accepting(&self, out: &ConcatOut) -> bool {
        out.2.iter().any(|l| matches!(l, Letter::State(v) if self.outer.is_final(*v)))
    }
}

/// Membership in `L(inner)·L(outer)` by definition: some node's subtree is
/// in `L(inner)` and replacing it by a leaf (of any outer label) gives a
/// tree of `L(outer)`.
pub fn concat_membership_oracle(t: &Tree, inner: &Sdta, outer: &Sdta) -> bool {
    t.positions().iter().any(|u| {
        let sub: &Tree = t.subtree(u).expect("own position");
        inner.accepts(sub)
            && outer.alphabet().iter().any(|s| {
                let replaced = t.substitute(u, Tree::leaf(s.clone())).expect("own position");
                outer.accepts(&replaced)
            })
    })
}

/// Evaluator for the path language of a string DFA, by definition: every
/// leaf carries `leaf`, the DFA reads labels from a leaf's parent up to the
/// root and accepts, and all leaves below a node leave it in the same state.
/// A lone leaf is accepted iff the start state is final.
pub struct PathOracle {
    pub dfa: StringDfa,
    pub leaf: Symbol,
}

impl PathOracle {
    /// The oracle for `T_B` with `n` states.
    pub fn tb(n: usize) -> Result<PathOracle, WitnessError> {
        Ok(PathOracle {
            dfa: string_dfa_b(n)?,
            leaf: Symbol::new("a").expect("static symbol"),
        })
    }
}

/// Result of [`PathOracle`] on a subtree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PathOut {
    Rejected,
    Leaf,
    /// DFA state after reading the subtree's root label.
    At(usize),
}

impl BottomUp for PathOracle {
    type Out = PathOut;
    /// `None` once children disagree or die; `Some(None)` before any child.
    type Hor = Option<Option<usize>>;

    fn start(&self, _: &Symbol) -> Self::Hor {
        Some(None)
    }

    fn step(&self, sym: &Symbol, h: &Self::Hor, child: &PathOut) -> Self::Hor {
        let from = match child {
            PathOut::Rejected => return None,
            PathOut::Leaf => self.dfa.start,
            PathOut::At(q) => *q,
        };
        let next = self.dfa.step(from, sym)?;
        match (*h)? {
            Some(seen) if seen != next => None,
            _ => Some(Some(next)),
        }
    }

    fn finish(&self, sym: &Symbol, h: &Self::Hor, leaf: bool) -> PathOut {
        match (leaf, h) {
            (true, _) if *sym == self.leaf => PathOut::Leaf,
            (false, Some(Some(q))) => PathOut::At(*q),
            _ => PathOut::Rejected,
        }
    }
}

impl Recognizer for PathOracle {
    fn accepting(&self, out: &PathOut) -> bool {
        match out {
            PathOut::Rejected => false,
            PathOut::Leaf => self.dfa.finals.contains(&self.dfa.start),
            PathOut::At(q) => self.dfa.finals.contains(q),
        }
    }
}

/// Checks `result` against [`ConcatOracle`] on the whole corpus.
pub fn check_concat<R: Recognizer>(inner: &Sdta, outer: &Sdta, result: &R, corpus: &CorpusSpec) -> Comparison {
    let oracle = ConcatOracle { inner, outer };
    let (violations, counterexample) = find_violation(&Joint(&oracle, result), corpus, |(o, r)| {
        oracle.accepting(o) != result.accepting(r)
    });
    Comparison {
        violations,
        counterexample,
    }
}

/// Number of distinct WDTA results on the corpus in which two acceptors
/// claimed the same node, with a smallest such tree.
pub fn wdta_ambiguity(w: &Wdta, corpus: &CorpusSpec) -> (usize, Option<Tree>) {
    find_violation(w, corpus, |o| *o == WdtaOut::Ambiguous)
}
