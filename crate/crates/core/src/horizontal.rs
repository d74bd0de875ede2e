//! Horizontal DFAs over the mixed letter alphabet of vertical states and leaf
//! symbols.
//!
//! A [`HorizontalMachine`] plays one of two roles. As an *acceptor* it has a
//! set of accepting states and recognizes a horizontal language (the WDTA
//! view). As a *classifier* it carries a partial output map from its states to
//! vertical states (the SDTA view: the machine reads a sibling word and the
//! output of the state it stops in is the state of the parent).
//!
//! Machines may be incomplete. A missing transition means the run dies; that
//! is reported as `None` rather than an error.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::MachineError;
use crate::trees::Symbol;

/// A vertical state id.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct VState(pub u32);

/// A horizontal state id, local to one machine.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct HState(pub u32);

impl VState {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl HState {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for HState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A letter of a horizontal word. Vertical states and leaf symbols live in
/// separate namespaces, so `State(VState(0))` never equals `Leaf("0")`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Letter {
    State(VState),
    Leaf(Symbol),
}

impl Letter {
    pub fn state(id: u32) -> Letter {
        Letter::State(VState(id))
    }

    pub fn as_state(&self) -> Option<VState> {
        match self {
            Letter::State(v) => Some(*v),
            Letter::Leaf(_) => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::State(v) => write!(f, "state:{v}"),
            Letter::Leaf(s) => write!(f, "sym:{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Acceptor { accepting: BTreeSet<HState> },
    Classifier { outputs: Vec<Option<VState>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalMachine {
    start: HState,
    trans: Vec<BTreeMap<Letter, HState>>,
    role: Role,
}

impl HorizontalMachine {
    /// An acceptor with `num_states` states (at least one), start state 0, no
    /// transitions and nothing accepting.
    pub fn acceptor(num_states: usize) -> Self {
        let n = num_states.max(1);
        HorizontalMachine {
            start: HState(0),
            trans: vec![BTreeMap::new(); n],
            role: Role::Acceptor {
                accepting: BTreeSet::new(),
            },
        }
    }

    /// A classifier with `num_states` states (at least one), start state 0,
    /// no transitions and no outputs.
    pub fn classifier(num_states: usize) -> Self {
        let n = num_states.max(1);
        HorizontalMachine {
            start: HState(0),
            trans: vec![BTreeMap::new(); n],
            role: Role::Classifier {
                outputs: vec![None; n],
            },
        }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn states(&self) -> impl Iterator<Item = HState> {
        (0..self.trans.len() as u32).map(HState)
    }

    pub fn start(&self) -> HState {
        self.start
    }

    pub fn role(&self) -> &Role {
        &self.role
    }

    pub fn is_classifier(&self) -> bool {
        matches!(self.role, Role::Classifier { .. })
    }

    pub fn is_acceptor(&self) -> bool {
        matches!(self.role, Role::Acceptor { .. })
    }

    fn check(&self, h: HState) -> Result<(), MachineError> {
        if h.index() < self.trans.len() {
            Ok(())
        } else {
            Err(MachineError::StateOutOfRange(h))
        }
    }

    pub fn set_start(&mut self, h: HState) -> Result<(), MachineError> {
        self.check(h)?;
        self.start = h;
        Ok(())
    }

    pub fn add_transition(&mut self, from: HState, letter: Letter, to: HState) -> Result<(), MachineError> {
        self.check(from)?;
        self.check(to)?;
        let row = &mut self.trans[from.index()];
        if row.contains_key(&letter) {
            return Err(MachineError::DuplicateTransition { from, letter });
        }
        row.insert(letter, to);
        Ok(())
    }

    pub fn set_accepting(&mut self, h: HState, accepting: bool) -> Result<(), MachineError> {
        self.check(h)?;
        match &mut self.role {
            Role::Acceptor { accepting: set } => {
                if accepting {
                    set.insert(h);
                } else {
                    set.remove(&h);
                }
                Ok(())
            }
            Role::Classifier { .. } => Err(MachineError::WrongRole { expected: "acceptor" }),
        }
    }

    pub fn set_output(&mut self, h: HState, output: Option<VState>) -> Result<(), MachineError> {
        self.check(h)?;
        match &mut self.role {
            Role::Classifier { outputs } => {
                outputs[h.index()] = output;
                Ok(())
            }
            Role::Acceptor { .. } => Err(MachineError::WrongRole { expected: "classifier" }),
        }
    }

    pub fn step(&self, h: HState, letter: &Letter) -> Option<HState> {
        self.trans.get(h.index())?.get(letter).copied()
    }

    pub fn transitions(&self, h: HState) -> impl Iterator<Item = (&Letter, HState)> {
        self.trans[h.index()].iter().map(|(l, t)| (l, *t))
    }

    /// Total number of transitions.
    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(BTreeMap::len).sum()
    }

    /// `γ*(start, w)`, or `None` if some step is undefined.
    pub fn run<'a, I>(&self, word: I) -> Option<HState>
    where
        I: IntoIterator<Item = &'a Letter>,
    {
        word.into_iter().try_fold(self.start, |h, l| self.step(h, l))
    }

    pub fn output(&self, h: HState) -> Option<VState> {
        match &self.role {
            Role::Classifier { outputs } => outputs.get(h.index()).copied().flatten(),
            Role::Acceptor { .. } => None,
        }
    }

    pub fn is_accepting(&self, h: HState) -> bool {
        match &self.role {
            Role::Acceptor { accepting } => accepting.contains(&h),
            Role::Classifier { .. } => false,
        }
    }

    /// Acceptors: accepting. Classifiers: the output is defined.
    pub fn is_final(&self, h: HState) -> bool {
        match &self.role {
            Role::Acceptor { accepting } => accepting.contains(&h),
            Role::Classifier { outputs } => outputs.get(h.index()).copied().flatten().is_some(),
        }
    }

    /// The output of the state reached on `word`, if both are defined.
    pub fn classify<'a, I>(&self, word: I) -> Option<VState>
    where
        I: IntoIterator<Item = &'a Letter>,
    {
        self.run(word).and_then(|h| self.output(h))
    }

    pub fn accepts<'a, I>(&self, word: I) -> bool
    where
        I: IntoIterator<Item = &'a Letter>,
    {
        self.run(word).is_some_and(|h| self.is_final(h))
    }

    pub fn accepting_states(&self) -> BTreeSet<HState> {
        self.states().filter(|&h| self.is_final(h)).collect()
    }

    /// Every letter with at least one transition.
    pub fn letters(&self) -> BTreeSet<Letter> {
        self.trans.iter().flat_map(|row| row.keys().cloned()).collect()
    }

    /// States reachable from the start using only letters accepted by
    /// `allowed`.
    pub fn reachable(&self, allowed: impl Fn(&Letter) -> bool) -> BTreeSet<HState> {
        let mut seen = BTreeSet::from([self.start]);
        let mut queue = VecDeque::from([self.start]);
        while let Some(h) = queue.pop_front() {
            for (l, t) in self.transitions(h) {
                if allowed(l) && seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        seen
    }

    /// True when no accepting (acceptor) or output (classifier) state is
    /// reachable.
    pub fn is_empty(&self) -> bool {
        !self.reachable(|_| true).into_iter().any(|h| self.is_final(h))
    }

    /// The same transition structure reinterpreted as an acceptor.
    pub fn to_acceptor(&self, accepting: impl IntoIterator<Item = HState>) -> HorizontalMachine {
        HorizontalMachine {
            start: self.start,
            trans: self.trans.clone(),
            role: Role::Acceptor {
                accepting: accepting.into_iter().filter(|h| h.index() < self.trans.len()).collect(),
            },
        }
    }

    /// Applies a letter renaming; transitions whose letter maps to `None`
    /// are dropped. The renaming must be injective on the used letters.
    pub fn map_letters(&self, f: impl Fn(&Letter) -> Option<Letter>) -> HorizontalMachine {
        let trans = self
            .trans
            .iter()
            .map(|row| {
                let mut out = BTreeMap::new();
                for (l, t) in row {
                    if let Some(nl) = f(l) {
                        let prev = out.insert(nl, *t);
                        debug_assert!(prev.is_none(), "letter renaming must be injective");
                    }
                }
                out
            })
            .collect();
        HorizontalMachine {
            start: self.start,
            trans,
            role: self.role.clone(),
        }
    }

    /// Adds a sink (if needed) so that every state has a transition on every
    /// letter of `letters`. Classifier sinks have no output.
    pub fn complete(&self, letters: &[Letter]) -> HorizontalMachine {
        let mut out = self.clone();
        let sink = HState(out.trans.len() as u32);
        let mut used_sink = false;
        for row in &mut out.trans {
            for l in letters {
                if !row.contains_key(l) {
                    row.insert(l.clone(), sink);
                    used_sink = true;
                }
            }
        }
        if used_sink {
            out.trans.push(letters.iter().map(|l| (l.clone(), sink)).collect());
            if let Role::Classifier { outputs } = &mut out.role {
                outputs.push(None);
            }
        }
        out
    }

    /// Complement of an acceptor over the letter alphabet `letters`.
    /// Transitions on letters outside `letters` are discarded.
    pub fn complement_acceptor(&self, letters: &[Letter]) -> Result<HorizontalMachine, MachineError> {
        if !self.is_acceptor() {
            return Err(MachineError::WrongRole { expected: "acceptor" });
        }
        let allowed: BTreeSet<&Letter> = letters.iter().collect();
        let restricted = self.map_letters(|l| allowed.contains(l).then(|| l.clone()));
        let completed = restricted.complete(letters);
        let flipped: BTreeSet<HState> = completed.states().filter(|h| !completed.is_accepting(*h)).collect();
        Ok(completed.to_acceptor(flipped))
    }

    /// Removes unreachable states, renumbering in breadth-first order.
    pub fn trim(&self) -> HorizontalMachine {
        let keep = self.reachable(|_| true);
        self.rebuild(&keep.into_iter().collect::<Vec<_>>(), Some)
    }

    /// Minimal machine equivalent to `self`: unreachable states and states
    /// that can never reach an accepting state or an output are removed and
    /// equivalent states merged (Moore refinement; classifiers start from the
    /// partition by output value).
    pub fn minimize(&self) -> HorizontalMachine {
        let reachable: Vec<HState> = self.reachable(|_| true).into_iter().collect();
        let letters: Vec<Letter> = self.letters().into_iter().collect();
        let classes = self.moore_classes(&reachable, &letters, |h| match &self.role {
            Role::Acceptor { accepting } => (accepting.contains(&h), None),
            Role::Classifier { outputs } => (false, outputs[h.index()]),
        });
        // One representative per class; the sink class is dropped.
        let mut rep: BTreeMap<usize, HState> = BTreeMap::new();
        for &h in &reachable {
            rep.entry(classes.class_of[&h]).or_insert(h);
        }
        let class_of = &classes.class_of;
        let sink = classes.sink;
        let reps: Vec<HState> = reachable
            .iter()
            .copied()
            .filter(|h| rep[&class_of[h]] == *h && class_of[h] != sink)
            .collect();
        if reps.is_empty() || class_of[&self.start] == sink {
            return match self.role {
                Role::Acceptor { .. } => HorizontalMachine::acceptor(1),
                Role::Classifier { .. } => HorizontalMachine::classifier(1),
            };
        }
        self.rebuild(&reps, |h| {
            let c = class_of[&h];
            (c != sink).then(|| rep[&c])
        })
    }

    /// Builds a machine over the states `keep` (which must contain the
    /// image of the start under `redirect`), renumbered breadth-first from
    /// the start with letters in sorted order. `redirect` maps a transition
    /// target to its representative, or `None` to drop the transition.
    fn rebuild(&self, keep: &[HState], redirect: impl Fn(HState) -> Option<HState>) -> HorizontalMachine {
        let keep_set: BTreeSet<HState> = keep.iter().copied().collect();
        let start = redirect(self.start).expect("start state is kept");
        let mut order: Vec<HState> = vec![start];
        let mut index: HashMap<HState, u32> = HashMap::from([(start, 0)]);
        let mut i = 0;
        while i < order.len() {
            let h = order[i];
            i += 1;
            for (_, t) in self.transitions(h) {
                if let Some(t) = redirect(t) {
                    debug_assert!(keep_set.contains(&t));
                    if let std::collections::hash_map::Entry::Vacant(e) = index.entry(t) {
                        e.insert(order.len() as u32);
                        order.push(t);
                    }
                }
            }
        }
        let trans = order
            .iter()
            .map(|&h| {
                self.transitions(h)
                    .filter_map(|(l, t)| redirect(t).map(|t| (l.clone(), HState(index[&t]))))
                    .collect()
            })
            .collect();
        let role = match &self.role {
            Role::Acceptor { accepting } => Role::Acceptor {
                accepting: order
                    .iter()
                    .filter(|h| accepting.contains(h))
                    .map(|h| HState(index[h]))
                    .collect(),
            },
            Role::Classifier { outputs } => Role::Classifier {
                outputs: order.iter().map(|h| outputs[h.index()]).collect(),
            },
        };
        HorizontalMachine {
            start: HState(0),
            trans,
            role,
        }
    }

    /// Moore refinement over `states` plus an implicit sink (which receives
    /// every undefined transition). `key` gives the initial class of a real
    /// state; the sink's key is `K::default()`.
    pub(crate) fn moore_classes<K>(&self, states: &[HState], letters: &[Letter], key: impl Fn(HState) -> K) -> MooreClasses
    where
        K: Eq + Hash + Default,
    {
        let n = states.len();
        let pos: HashMap<HState, usize> = states.iter().enumerate().map(|(i, h)| (*h, i)).collect();
        // succ[i][j]: index of the successor of state i on letter j; n = sink.
        let succ: Vec<Vec<usize>> = states
            .iter()
            .map(|&h| {
                letters
                    .iter()
                    .map(|l| self.step(h, l).and_then(|t| pos.get(&t).copied()).unwrap_or(n))
                    .collect()
            })
            .collect();
        let mut ids: HashMap<K, usize> = HashMap::new();
        let mut block: Vec<usize> = Vec::with_capacity(n + 1);
        for &h in states {
            let k = key(h);
            let next = ids.len();
            block.push(*ids.entry(k).or_insert(next));
        }
        let next = ids.len();
        block.push(*ids.entry(K::default()).or_insert(next));
        let mut count = ids.len();
        loop {
            let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_block = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let row = if i < n {
                    succ[i].iter().map(|&j| block[j]).collect()
                } else {
                    vec![block[n]; letters.len()]
                };
                let len = sigs.len();
                next_block.push(*sigs.entry((block[i], row)).or_insert(len));
            }
            let new_count = sigs.len();
            block = next_block;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        MooreClasses {
            class_of: states.iter().enumerate().map(|(i, h)| (*h, block[i])).collect(),
            sink: block[n],
        }
    }
}

pub(crate) struct MooreClasses {
    pub class_of: HashMap<HState, usize>,
    pub sink: usize,
}

/// How a product treats components whose run has died.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// Plain product: a dead component kills the pair; accepts when both
    /// components accept.
    And,
    /// Padded product: each side is extended with a dead sink; only the
    /// all-dead tuple is dropped; accepts when either component accepts.
    Or,
}

/// Result of a product construction: the product acceptor plus the component
/// tuple behind each product state.
#[derive(Clone, Debug)]
pub struct Product {
    pub machine: HorizontalMachine,
    pub tuples: Vec<Vec<Option<HState>>>,
}

/// Reachable product of several machines over a common letter alphabet.
///
/// `translate(i, l)` is the letter component `i` reads when the product
/// reads `l` (`None`: component `i` dies). A tuple is kept while `alive`
/// holds; a kept tuple is accepting when `accept` holds. Component roles are
/// read through [`HorizontalMachine::is_final`].
pub fn product_with(
    machines: &[&HorizontalMachine],
    letters: &[Letter],
    translate: impl Fn(usize, &Letter) -> Option<Letter>,
    alive: impl Fn(&[Option<HState>]) -> bool,
    accept: impl Fn(&[Option<HState>]) -> bool,
) -> Product {
    let start: Vec<Option<HState>> = machines.iter().map(|m| Some(m.start())).collect();
    let mut index: HashMap<Vec<Option<HState>>, u32> = HashMap::new();
    let mut tuples: Vec<Vec<Option<HState>>> = Vec::new();
    let mut edges: Vec<Vec<(Letter, u32)>> = Vec::new();
    if alive(&start) {
        index.insert(start.clone(), 0);
        tuples.push(start);
        edges.push(Vec::new());
    }
    let mut i = 0;
    while i < tuples.len() {
        let cur = tuples[i].clone();
        for l in letters {
            let next: Vec<Option<HState>> = cur
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let c = (*c)?;
                    let tl = translate(k, l)?;
                    machines[k].step(c, &tl)
                })
                .collect();
            if !alive(&next) {
                continue;
            }
            let id = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = tuples.len() as u32;
                    index.insert(next.clone(), id);
                    tuples.push(next);
                    edges.push(Vec::new());
                    id
                }
            };
            edges[i].push((l.clone(), id));
        }
        i += 1;
    }
    let mut machine = HorizontalMachine::acceptor(tuples.len());
    for (from, row) in edges.into_iter().enumerate() {
        for (l, to) in row {
            machine
                .add_transition(HState(from as u32), l, HState(to))
                .expect("product is deterministic");
        }
    }
    for (id, t) in tuples.iter().enumerate() {
        if accept(t) {
            machine.set_accepting(HState(id as u32), true).expect("acceptor");
        }
    }
    Product { machine, tuples }
}

/// Binary product of two acceptors over the union of their letters.
pub fn dfa_product(m1: &HorizontalMachine, m2: &HorizontalMachine, mode: ProductMode) -> Product {
    let letters: Vec<Letter> = m1.letters().union(&m2.letters()).cloned().collect();
    let identity = |_: usize, l: &Letter| Some(l.clone());
    let machines = [m1, m2];
    let fin = |k: usize, h: Option<HState>| h.is_some_and(|h| machines[k].is_final(h));
    match mode {
        ProductMode::And => product_with(
            &machines,
            &letters,
            identity,
            |t| t.iter().all(Option::is_some),
            |t| fin(0, t[0]) && fin(1, t[1]),
        ),
        ProductMode::Or => product_with(
            &machines,
            &letters,
            identity,
            |t| t.iter().any(Option::is_some),
            |t| fin(0, t[0]) || fin(1, t[1]),
        ),
    }
}

/// Exact disjointness test for two acceptors: no word reaches an accepting
/// state in both.
pub fn acceptor_disjoint(m1: &HorizontalMachine, m2: &HorizontalMachine) -> bool {
    let p = dfa_product(m1, m2, ProductMode::And);
    p.machine.accepting_states().is_empty()
}

/// A shortest word accepted by both acceptors, if any.
pub fn common_word(m1: &HorizontalMachine, m2: &HorizontalMachine) -> Option<Vec<Letter>> {
    let p = dfa_product(m1, m2, ProductMode::And).machine;
    let mut prev: HashMap<HState, (HState, Letter)> = HashMap::new();
    let mut queue = VecDeque::from([p.start()]);
    let mut seen = BTreeSet::from([p.start()]);
    while let Some(h) = queue.pop_front() {
        if p.is_accepting(h) {
            let mut word = Vec::new();
            let mut cur = h;
            while let Some((from, l)) = prev.get(&cur) {
                word.push(l.clone());
                cur = *from;
            }
            word.reverse();
            return Some(word);
        }
        for (l, t) in p.transitions(h) {
            if seen.insert(t) {
                prev.insert(t, (h, l.clone()));
                queue.push_back(t);
            }
        }
    }
    None
}

/// Structural isomorphism of two machines with the same letters: a bijection
/// of reachable states that preserves start, transitions, and acceptance or
/// outputs.
pub fn is_isomorphic(m1: &HorizontalMachine, m2: &HorizontalMachine) -> bool {
    is_isomorphic_under(m1, m2, |l| Some(l.clone()), Some)
}

/// Isomorphism where letters of `m1` are renamed by `letter_map` and outputs
/// by `output_map` before comparison.
pub(crate) fn is_isomorphic_under(
    m1: &HorizontalMachine,
    m2: &HorizontalMachine,
    letter_map: impl Fn(&Letter) -> Option<Letter>,
    output_map: impl Fn(VState) -> Option<VState>,
) -> bool {
    if m1.is_classifier() != m2.is_classifier() {
        return false;
    }
    let mut fwd: HashMap<HState, HState> = HashMap::from([(m1.start(), m2.start())]);
    let mut back: HashMap<HState, HState> = HashMap::from([(m2.start(), m1.start())]);
    let mut queue = VecDeque::from([(m1.start(), m2.start())]);
    while let Some((a, b)) = queue.pop_front() {
        if m1.is_accepting(a) != m2.is_accepting(b) {
            return false;
        }
        if m1.output(a).map(&output_map) != m2.output(b).map(Some) {
            return false;
        }
        let mut mapped: BTreeMap<Letter, HState> = BTreeMap::new();
        for (l, t) in m1.transitions(a) {
            match letter_map(l) {
                Some(nl) => {
                    mapped.insert(nl, t);
                }
                None => return false,
            }
        }
        let row2: BTreeMap<&Letter, HState> = m2.transitions(b).collect();
        if mapped.len() != row2.len() {
            return false;
        }
        for (l, ta) in mapped {
            let Some(&tb) = row2.get(&l) else {
                return false;
            };
            match (fwd.get(&ta), back.get(&tb)) {
                (Some(&x), Some(&y)) if x == tb && y == ta => {}
                (None, None) => {
                    fwd.insert(ta, tb);
                    back.insert(tb, ta);
                    queue.push_back((ta, tb));
                }
                _ => return false,
            }
        }
    }
    true
}
