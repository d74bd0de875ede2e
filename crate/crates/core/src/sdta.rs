//! Strongly deterministic unranked tree automata.
//!
//! An [`Sdta`] has one classifier per symbol. At a node labeled `σ` with
//! children contributing letters `ℓ1 … ℓk`, the node's vertical state is
//! `classify(D_σ, ℓ1 … ℓk)`.
//!
//! Leaves: a leaf labeled `σ` gets `classify(D_σ, ε)` when that is defined.
//! Otherwise it contributes the literal letter `Leaf(σ)` to its parent. A
//! child with no run kills its parent's run.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::horizontal::{HState, HorizontalMachine, Letter, VState};
use crate::trees::{Symbol, Tree};

/// Name given to the sink state added by completion.
pub const SINK_NAME: &str = "#sink";
/// Name prefix of states standing in for literal leaf letters.
pub const LEAF_PROXY_PREFIX: &str = "#leaf:";

/// `[vertical, horizontal]` state counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SizePair {
    pub vertical: usize,
    pub horizontal: usize,
}

impl fmt::Display for SizePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.vertical, self.horizontal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub severity: Severity,
    pub message: String,
}

impl Violation {
    pub(crate) fn error(message: impl Into<String>) -> Self {
        Violation {
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub(crate) fn warning(message: impl Into<String>) -> Self {
        Violation {
            severity: Severity::Warning,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

/// True when none of the violations is an error.
pub fn no_errors(violations: &[Violation]) -> bool {
    violations.iter().all(|v| v.severity != Severity::Error)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sdta {
    alphabet: BTreeSet<Symbol>,
    num_states: usize,
    finals: BTreeSet<VState>,
    classifiers: BTreeMap<Symbol, HorizontalMachine>,
    names: Option<Vec<String>>,
}

impl Sdta {
    /// Symbols of `alphabet` without a classifier get an empty one-state
    /// classifier. Classifiers for symbols outside the alphabet are kept and
    /// reported by [`Sdta::validate`].
    pub fn new(
        alphabet: impl IntoIterator<Item = Symbol>,
        num_states: usize,
        finals: impl IntoIterator<Item = VState>,
        mut classifiers: BTreeMap<Symbol, HorizontalMachine>,
    ) -> Sdta {
        let alphabet: BTreeSet<Symbol> = alphabet.into_iter().collect();
        for s in &alphabet {
            classifiers
                .entry(s.clone())
                .or_insert_with(|| HorizontalMachine::classifier(1));
        }
        Sdta {
            alphabet,
            num_states,
            finals: finals.into_iter().collect(),
            classifiers,
            names: None,
        }
    }

    /// Attaches display names to vertical states (one per state).
    pub fn with_names(mut self, names: Vec<String>) -> Sdta {
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

    pub fn classifier(&self, sym: &Symbol) -> Option<&HorizontalMachine> {
        self.classifiers.get(sym)
    }

    pub fn classifiers(&self) -> &BTreeMap<Symbol, HorizontalMachine> {
        &self.classifiers
    }

    pub fn state_name(&self, v: VState) -> String {
        self.names
            .as_ref()
            .and_then(|n| n.get(v.index()).cloned())
            .unwrap_or_else(|| v.to_string())
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Structural checks. Errors make the automaton unusable; the only
    /// warning is an ambiguous leaf role.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for f in &self.finals {
            if f.index() >= self.num_states {
                out.push(Violation::error(format!("final state {f} is not a declared state")));
            }
        }
        for sym in &self.alphabet {
            if !self.classifiers.contains_key(sym) {
                out.push(Violation::error(format!("symbol {sym} has no classifier")));
            }
        }
        for (sym, m) in &self.classifiers {
            if !self.alphabet.contains(sym) {
                out.push(Violation::error(format!("classifier for {sym} outside the alphabet")));
            }
            if !m.is_classifier() {
                out.push(Violation::error(format!("machine for {sym} is not a classifier")));
                continue;
            }
            for h in m.states() {
                if let Some(v) = m.output(h) {
                    if v.index() >= self.num_states {
                        out.push(Violation::error(format!(
                            "dangling output: {sym} state {h} outputs undeclared state {v}"
                        )));
                    }
                }
                for (l, _) in m.transitions(h) {
                    match l {
                        Letter::State(v) if v.index() >= self.num_states => out.push(Violation::error(format!(
                            "dangling letter: {sym} state {h} reads undeclared state {v}"
                        ))),
                        Letter::Leaf(s) if !self.alphabet.contains(s) => out.push(Violation::error(format!(
                            "dangling letter: {sym} state {h} reads symbol {s} outside the alphabet"
                        ))),
                        _ => {}
                    }
                }
            }
        }
        for sym in &self.alphabet {
            if self.leaf_state(sym).is_some() && self.reads_leaf_letter(sym) {
                out.push(Violation::warning(format!(
                    "ambiguous leaf role: leaves labeled {sym} get a state, but some classifier reads sym:{sym}"
                )));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        no_errors(&self.validate())
    }

    /// `classify(D_σ, ε)`: the state given to a leaf labeled `sym`.
    pub fn leaf_state(&self, sym: &Symbol) -> Option<VState> {
        self.classifiers.get(sym).and_then(|m| m.classify(&[]))
    }

    /// Whether some classifier has a transition on `Leaf(sym)`.
    pub fn reads_leaf_letter(&self, sym: &Symbol) -> bool {
        let l = Letter::Leaf(sym.clone());
        self.classifiers
            .values()
            .any(|m| m.states().any(|h| m.step(h, &l).is_some()))
    }

    /// Symbols whose leaves contribute a literal letter.
    pub fn literal_leaf_symbols(&self) -> Vec<Symbol> {
        self.alphabet
            .iter()
            .filter(|s| self.leaf_state(s).is_none())
            .cloned()
            .collect()
    }

    /// What a leaf labeled `sym` contributes to its parent.
    pub fn leaf_letter(&self, sym: &Symbol) -> Option<Letter> {
        if !self.alphabet.contains(sym) {
            return None;
        }
        Some(match self.leaf_state(sym) {
            Some(v) => Letter::State(v),
            None => Letter::Leaf(sym.clone()),
        })
    }

    /// What the root of `t` contributes to a parent: a state, a literal leaf
    /// letter, or `None` when there is no run.
    pub fn eval_letter(&self, t: &Tree) -> Option<Letter> {
        if t.is_leaf() {
            return self.leaf_letter(t.label());
        }
        let m = self.classifiers.get(t.label())?;
        let mut h = m.start();
        for c in t.children() {
            let l = self.eval_letter(c)?;
            h = m.step(h, &l)?;
        }
        m.output(h).map(Letter::State)
    }

    /// The vertical state at the root, or `None`.
    pub fn eval(&self, t: &Tree) -> Option<VState> {
        self.eval_letter(t).and_then(|l| l.as_state())
    }

    pub fn accepts(&self, t: &Tree) -> bool {
        self.eval(t).is_some_and(|v| self.is_final(v))
    }

    pub fn size(&self) -> SizePair {
        SizePair {
            vertical: self.num_states,
            horizontal: self.classifiers.values().map(HorizontalMachine::num_states).sum(),
        }
    }

    /// Returns an equivalent automaton in which every leaf whose literal
    /// letter is read by some classifier gets its own proxy vertical state.
    ///
    /// After this, `Leaf(σ)` letters never matter: either leaves labeled `σ`
    /// get a state, or no classifier reads `Leaf(σ)` (and such a leaf kills
    /// its parent's run). Identity when there is nothing to rewrite.
    pub fn with_leaf_states(&self) -> Sdta {
        let needs: Vec<Symbol> = self
            .alphabet
            .iter()
            .filter(|s| self.leaf_state(s).is_none() && self.reads_leaf_letter(s))
            .cloned()
            .collect();
        let ambiguous: Vec<Symbol> = self
            .alphabet
            .iter()
            .filter(|s| self.leaf_state(s).is_some() && self.reads_leaf_letter(s))
            .cloned()
            .collect();
        if needs.is_empty() && ambiguous.is_empty() {
            return self.clone();
        }
        let mut names: Vec<String> = self.states().map(|v| self.state_name(v)).collect();
        let mut proxy: BTreeMap<Symbol, VState> = BTreeMap::new();
        for s in &needs {
            proxy.insert(s.clone(), VState(names.len() as u32));
            names.push(format!("{LEAF_PROXY_PREFIX}{s}"));
        }
        let mut classifiers = BTreeMap::new();
        for (sym, m) in &self.classifiers {
            // Leaf letters that are never produced are dropped; proxied ones
            // become the proxy state's letter.
            let mut rewritten = m.map_letters(|l| match l {
                Letter::Leaf(s) if proxy.contains_key(s) => Some(Letter::State(proxy[s])),
                Letter::Leaf(s) if ambiguous.contains(s) => None,
                other => Some(other.clone()),
            });
            if let Some(&p) = proxy.get(sym) {
                rewritten = with_fresh_start(&rewritten, Some(p));
            }
            classifiers.insert(sym.clone(), rewritten);
        }
        Sdta::new(self.alphabet.iter().cloned(), names.len(), self.finals.iter().copied(), classifiers)
            .with_names(names)
    }

    /// Completion with one sink vertical state followed by flipping the final
    /// states. Accepts exactly the trees over the alphabet not accepted by
    /// `self`.
    ///
    /// Literal leaf letters that some classifier reads are first turned into
    /// proxy states (see [`Sdta::with_leaf_states`]); without such letters
    /// the result has exactly one more vertical state.
    pub fn complement(&self) -> Sdta {
        let base = self.with_leaf_states();
        let sink = VState(base.num_states as u32);
        let mut names: Vec<String> = base.states().map(|v| base.state_name(v)).collect();
        names.push(SINK_NAME.to_string());
        let letters: Vec<Letter> = (0..=sink.0).map(Letter::state).collect();
        let mut classifiers = BTreeMap::new();
        for (sym, m) in &base.classifiers {
            let restricted = m.map_letters(|l| matches!(l, Letter::State(_)).then(|| l.clone()));
            let mut completed = restricted.complete(&letters);
            for h in completed.states().collect::<Vec<_>>() {
                if completed.output(h).is_none() {
                    completed.set_output(h, Some(sink)).expect("classifier");
                }
            }
            classifiers.insert(sym.clone(), completed);
        }
        let finals: Vec<VState> = (0..=sink.0).map(VState).filter(|v| !base.finals.contains(v)).collect();
        Sdta::new(base.alphabet.iter().cloned(), names.len(), finals, classifiers).with_names(names)
    }
}

/// Gives `m` a new start state with the old start's outgoing transitions and
/// the given output. The old start keeps its role for non-empty words.
pub(crate) fn with_fresh_start(m: &HorizontalMachine, output: Option<VState>) -> HorizontalMachine {
    let n = m.num_states();
    let mut out = if m.is_classifier() {
        HorizontalMachine::classifier(n + 1)
    } else {
        HorizontalMachine::acceptor(n + 1)
    };
    for h in m.states() {
        for (l, t) in m.transitions(h) {
            out.add_transition(h, l.clone(), t).expect("copy");
        }
        if m.is_classifier() {
            out.set_output(h, m.output(h)).expect("classifier");
        } else {
            out.set_accepting(h, m.is_accepting(h)).expect("acceptor");
        }
    }
    let fresh = HState(n as u32);
    for (l, t) in m.transitions(m.start()) {
        out.add_transition(fresh, l.clone(), t).expect("fresh");
    }
    if out.is_classifier() {
        out.set_output(fresh, output).expect("classifier");
    } else {
        out.set_accepting(fresh, output.is_some()).expect("acceptor");
    }
    out.set_start(fresh).expect("in range");
    out
}
