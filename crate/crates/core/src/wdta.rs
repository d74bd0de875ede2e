//! Weakly deterministic unranked tree automata: one acceptor per
//! (state, symbol) pair, with pairwise-disjoint languages per symbol.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::horizontal::{common_word, product_with, HState, HorizontalMachine, Letter, VState};
use crate::sdta::{no_errors, Sdta, SizePair, Violation, LEAF_PROXY_PREFIX};
use crate::trees::{Symbol, Tree};

/// Two horizontal languages accepted the same word during evaluation. A
/// validated automaton never produces this.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invariant violated: states {first} and {second} both accept the children of a {symbol}-node")]
pub struct Ambiguity {
    pub symbol: Symbol,
    pub first: VState,
    pub second: VState,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wdta {
    alphabet: BTreeSet<Symbol>,
    num_states: usize,
    finals: BTreeSet<VState>,
    hlangs: BTreeMap<(Symbol, VState), HorizontalMachine>,
    names: Option<Vec<String>>,
}

/// A pair of states whose horizontal languages for `symbol` overlap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlap {
    pub symbol: Symbol,
    pub first: VState,
    pub second: VState,
    pub word: Vec<Letter>,
}

impl fmt::Display for Overlap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word: Vec<String> = self.word.iter().map(ToString::to_string).collect();
        write!(
            f,
            "states {} and {} overlap for symbol {} on word [{}]",
            self.first,
            self.second,
            self.symbol,
            word.join(" ")
        )
    }
}

impl Wdta {
    /// A missing `(symbol, state)` entry is the empty language.
    pub fn new(
        alphabet: impl IntoIterator<Item = Symbol>,
        num_states: usize,
        finals: impl IntoIterator<Item = VState>,
        hlangs: BTreeMap<(Symbol, VState), HorizontalMachine>,
    ) -> Wdta {
        Wdta {
            alphabet: alphabet.into_iter().collect(),
            num_states,
            finals: finals.into_iter().collect(),
            hlangs,
            names: None,
        }
    }

    pub fn with_names(mut self, names: Vec<String>) -> Wdta {
        debug_assert_eq!(names.len(), self.num_states);
        self.names = Some(names);
        self
    }

    pub fn alphabet(&self) -> &BTreeSet<Symbol> {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn states(&self) -> impl Iterator<Item = VState> {
        (0..self.num_states as u32).map(VState)
    }

    pub fn finals(&self) -> &BTreeSet<VState> {
        &self.finals
    }

    pub fn is_final(&self, v: VState) -> bool {
        self.finals.contains(&v)
    }

    pub fn hlangs(&self) -> &BTreeMap<(Symbol, VState), HorizontalMachine> {
        &self.hlangs
    }

    pub fn hlang(&self, sym: &Symbol, q: VState) -> Option<&HorizontalMachine> {
        self.hlangs.get(&(sym.clone(), q))
    }

    pub fn state_name(&self, v: VState) -> String {
        self.names
            .as_ref()
            .and_then(|n| n.get(v.index()).cloned())
            .unwrap_or_else(|| v.to_string())
    }

    /// The acceptors for `sym`, in state order.
    pub fn hlangs_for<'a>(&'a self, sym: &'a Symbol) -> impl Iterator<Item = (VState, &'a HorizontalMachine)> + 'a {
        self.hlangs
            .range((sym.clone(), VState(0))..=(sym.clone(), VState(u32::MAX)))
            .map(|((_, q), m)| (*q, m))
    }

    pub fn size(&self) -> SizePair {
        SizePair {
            vertical: self.num_states,
            horizontal: self.hlangs.values().map(HorizontalMachine::num_states).sum(),
        }
    }

    /// Pairs of states whose languages overlap, with a shortest shared word.
    pub fn overlaps(&self) -> Vec<Overlap> {
        let mut out = Vec::new();
        for sym in &self.alphabet {
            let machines: Vec<(VState, &HorizontalMachine)> = self.hlangs_for(sym).collect();
            for (i, (q1, m1)) in machines.iter().enumerate() {
                for (q2, m2) in &machines[i + 1..] {
                    if let Some(word) = common_word(m1, m2) {
                        out.push(Overlap {
                            symbol: sym.clone(),
                            first: *q1,
                            second: *q2,
                            word,
                        });
                    }
                }
            }
        }
        out
    }

    /// Structural checks plus exact pairwise disjointness.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for f in &self.finals {
            if f.index() >= self.num_states {
                out.push(Violation::error(format!("final state {f} is not a declared state")));
            }
        }
        for ((sym, q), m) in &self.hlangs {
            if !self.alphabet.contains(sym) {
                out.push(Violation::error(format!("acceptor for {sym} outside the alphabet")));
            }
            if q.index() >= self.num_states {
                out.push(Violation::error(format!("acceptor for undeclared state {q} on {sym}")));
            }
            if !m.is_acceptor() {
                out.push(Violation::error(format!("machine for ({sym}, {q}) is not an acceptor")));
                continue;
            }
            for h in m.states() {
                for (l, _) in m.transitions(h) {
                    match l {
                        Letter::State(v) if v.index() >= self.num_states => out.push(Violation::error(format!(
                            "dangling letter: ({sym}, {q}) state {h} reads undeclared state {v}"
                        ))),
                        Letter::Leaf(s) if !self.alphabet.contains(s) => out.push(Violation::error(format!(
                            "dangling letter: ({sym}, {q}) state {h} reads symbol {s} outside the alphabet"
                        ))),
                        _ => {}
                    }
                }
            }
        }
        for o in self.overlaps() {
            out.push(Violation::error(format!("not disjoint: {o}")));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        no_errors(&self.validate())
    }

    /// The unique state whose `sym`-language contains `word`.
    fn select(&self, sym: &Symbol, word: &[Letter]) -> Result<Option<VState>, Ambiguity> {
        let mut found: Option<VState> = None;
        for (q, m) in self.hlangs_for(sym) {
            if m.accepts(word) {
                if let Some(first) = found {
                    return Err(Ambiguity {
                        symbol: sym.clone(),
                        first,
                        second: q,
                    });
                }
                found = Some(q);
            }
        }
        Ok(found)
    }

    /// The state a leaf labeled `sym` gets (`ε`-membership), if any.
    pub fn leaf_state(&self, sym: &Symbol) -> Result<Option<VState>, Ambiguity> {
        self.select(sym, &[])
    }

    pub fn leaf_letter(&self, sym: &Symbol) -> Result<Option<Letter>, Ambiguity> {
        if !self.alphabet.contains(sym) {
            return Ok(None);
        }
        Ok(Some(match self.leaf_state(sym)? {
            Some(q) => Letter::State(q),
            None => Letter::Leaf(sym.clone()),
        }))
    }

    pub fn eval_letter(&self, t: &Tree) -> Result<Option<Letter>, Ambiguity> {
        if t.is_leaf() {
            return self.leaf_letter(t.label());
        }
        let mut word = Vec::with_capacity(t.children().len());
        for c in t.children() {
            match self.eval_letter(c)? {
                Some(l) => word.push(l),
                None => return Ok(None),
            }
        }
        Ok(self.select(t.label(), &word)?.map(Letter::State))
    }

    /// Bottom-up evaluation. Every candidate language is checked, so an
    /// overlap that validation missed surfaces as an [`Ambiguity`].
    pub fn eval(&self, t: &Tree) -> Result<Option<VState>, Ambiguity> {
        Ok(self.eval_letter(t)?.and_then(|l| l.as_state()))
    }

    pub fn accepts(&self, t: &Tree) -> Result<bool, Ambiguity> {
        Ok(self.eval(t)?.is_some_and(|v| self.is_final(v)))
    }

    fn reads_leaf_letter(&self, sym: &Symbol) -> bool {
        let l = Letter::Leaf(sym.clone());
        self.hlangs
            .values()
            .any(|m| m.states().any(|h| m.step(h, &l).is_some()))
    }

    /// Same rewrite as [`Sdta::with_leaf_states`]: literal leaf letters that
    /// some acceptor reads become proxy states whose only language is `{ε}`.
    pub fn with_leaf_states(&self) -> Result<Wdta, Ambiguity> {
        let mut needs = Vec::new();
        let mut ambiguous = Vec::new();
        for s in &self.alphabet {
            let reads = self.reads_leaf_letter(s);
            match (self.leaf_state(s)?, reads) {
                (None, true) => needs.push(s.clone()),
                (Some(_), true) => ambiguous.push(s.clone()),
                _ => {}
            }
        }
        if needs.is_empty() && ambiguous.is_empty() {
            return Ok(self.clone());
        }
        let mut names: Vec<String> = self.states().map(|v| self.state_name(v)).collect();
        let mut proxy: BTreeMap<Symbol, VState> = BTreeMap::new();
        for s in &needs {
            proxy.insert(s.clone(), VState(names.len() as u32));
            names.push(format!("{LEAF_PROXY_PREFIX}{s}"));
        }
        let mut hlangs = BTreeMap::new();
        for (key, m) in &self.hlangs {
            let rewritten = m.map_letters(|l| match l {
                Letter::Leaf(s) if proxy.contains_key(s) => Some(Letter::State(proxy[s])),
                Letter::Leaf(s) if ambiguous.contains(s) => None,
                other => Some(other.clone()),
            });
            hlangs.insert(key.clone(), rewritten);
        }
        for (s, p) in &proxy {
            let mut eps = HorizontalMachine::acceptor(1);
            eps.set_accepting(HState(0), true).expect("acceptor");
            hlangs.insert((s.clone(), *p), eps);
        }
        Ok(Wdta::new(self.alphabet.iter().cloned(), names.len(), self.finals.iter().copied(), hlangs)
            .with_names(names))
    }

    /// Letters that can occur in a run: all states plus the literal leaf
    /// letters some acceptor reads.
    pub(crate) fn letter_alphabet(&self) -> Vec<Letter> {
        let mut letters: BTreeSet<Letter> = self.states().map(Letter::State).collect();
        for m in self.hlangs.values() {
            letters.extend(m.letters().into_iter().filter(|l| matches!(l, Letter::Leaf(_))));
        }
        letters.into_iter().collect()
    }
}

/// Splits each classifier into per-state acceptors with accept set `λ⁻¹(q)`.
/// States never output by a classifier get no acceptor for that symbol.
pub fn sdta_to_wdta(a: &Sdta) -> Wdta {
    let mut hlangs = BTreeMap::new();
    for (sym, m) in a.classifiers() {
        let mut by_state: BTreeMap<VState, Vec<HState>> = BTreeMap::new();
        for h in m.states() {
            if let Some(q) = m.output(h) {
                by_state.entry(q).or_default().push(h);
            }
        }
        for (q, accepting) in by_state {
            hlangs.insert((sym.clone(), q), m.to_acceptor(accepting));
        }
    }
    let mut w = Wdta::new(a.alphabet().iter().cloned(), a.num_states(), a.finals().iter().copied(), hlangs);
    w.names = a.names().map(<[String]>::to_vec);
    w
}

/// Joins the acceptors of each symbol into one classifier by a padded
/// product; the output of a tuple is the unique accepting component. Each
/// classifier is minimized.
pub fn wdta_to_sdta(a: &Wdta) -> Result<Sdta, Ambiguity> {
    wdta_to_sdta_with(a, true)
}

/// As [`wdta_to_sdta`], optionally skipping classifier minimization.
pub fn wdta_to_sdta_with(a: &Wdta, minimize: bool) -> Result<Sdta, Ambiguity> {
    let letters = a.letter_alphabet();
    let mut classifiers = BTreeMap::new();
    for sym in a.alphabet() {
        let parts: Vec<(VState, &HorizontalMachine)> = a.hlangs_for(sym).collect();
        if parts.is_empty() {
            continue;
        }
        let machines: Vec<&HorizontalMachine> = parts.iter().map(|(_, m)| *m).collect();
        let product = product_with(
            &machines,
            &letters,
            |_, l| Some(l.clone()),
            |t| t.iter().any(Option::is_some),
            |_| false,
        );
        let mut classifier = HorizontalMachine::classifier(product.machine.num_states());
        for h in product.machine.states() {
            for (l, t) in product.machine.transitions(h) {
                classifier.add_transition(h, l.clone(), t).expect("copy");
            }
            let mut out: Option<VState> = None;
            for (k, c) in product.tuples[h.index()].iter().enumerate() {
                if c.is_some_and(|c| machines[k].is_accepting(c)) {
                    if let Some(first) = out {
                        return Err(Ambiguity {
                            symbol: sym.clone(),
                            first,
                            second: parts[k].0,
                        });
                    }
                    out = Some(parts[k].0);
                }
            }
            classifier.set_output(h, out).expect("classifier");
        }
        let classifier = if minimize { classifier.minimize() } else { classifier };
        classifiers.insert(sym.clone(), classifier);
    }
    let mut s = Sdta::new(a.alphabet().iter().cloned(), a.num_states(), a.finals().iter().copied(), classifiers);
    if let Some(names) = &a.names {
        s = s.with_names(names.clone());
    }
    Ok(s)
}
