//! SDTA minimization and a brute-force context oracle that cross-checks it.
//!
//! Two vertical states are equivalent when every context accepts both or
//! neither. The partition is the greatest fixpoint of a refinement that, in
//! each round, Moore-reduces every classifier with outputs read as current
//! blocks and then splits states whose letters lead to inequivalent
//! horizontal states. A virtual dead state stands for undefined runs, so
//! states that no context can accept end up in its block.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::horizontal::{is_isomorphic_under, HState, HorizontalMachine, Letter, VState};
use crate::sdta::Sdta;
use crate::trees::{Position, Symbol, Tree};

/// Vertical states some tree evaluates to.
pub fn reachable_vertical(a: &Sdta) -> BTreeSet<VState> {
    let literal: BTreeSet<Symbol> = a.literal_leaf_symbols().into_iter().collect();
    let mut reach: BTreeSet<VState> = BTreeSet::new();
    loop {
        let before = reach.len();
        for m in a.classifiers().values() {
            let seen = m.reachable(|l| match l {
                Letter::State(v) => reach.contains(v),
                Letter::Leaf(s) => literal.contains(s),
            });
            reach.extend(seen.into_iter().filter_map(|h| m.output(h)));
        }
        if reach.len() == before {
            return reach;
        }
    }
}

/// Blocks of equivalent reachable states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<VState>>,
    useless: Option<usize>,
}

impl Partition {
    /// Blocks, each sorted, ordered by least member.
    pub fn blocks(&self) -> &[Vec<VState>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, v: VState) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains(&v))
    }

    pub fn same_block(&self, p: VState, q: VState) -> bool {
        matches!((self.block_of(p), self.block_of(q)), (Some(x), Some(y)) if x == y)
    }

    /// The block of states from which no context accepts, if any.
    pub fn useless_block(&self) -> Option<&[VState]> {
        self.useless.map(|i| self.blocks[i].as_slice())
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn covered(&self) -> BTreeSet<VState> {
        self.blocks.iter().flatten().copied().collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let ids: Vec<String> = b.iter().map(ToString::to_string).collect();
                format!("{{{}}}", ids.join(","))
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Letters a run can produce: reachable states and literal leaf letters.
fn run_letters(a: &Sdta, reach: &BTreeSet<VState>) -> Vec<Letter> {
    let mut letters: Vec<Letter> = reach.iter().copied().map(Letter::State).collect();
    letters.extend(a.literal_leaf_symbols().into_iter().map(Letter::Leaf));
    letters
}

/// Equivalence classes of the reachable states.
pub fn inequivalence_partition(a: &Sdta) -> Partition {
    let reach = reachable_vertical(a);
    let states: Vec<VState> = reach.iter().copied().collect();
    let letters = run_letters(a, &reach);
    let allowed: BTreeSet<Letter> = letters.iter().cloned().collect();
    let horizontal: Vec<(&HorizontalMachine, Vec<HState>)> = a
        .classifiers()
        .values()
        .map(|m| (m, m.reachable(|l| allowed.contains(l)).into_iter().collect()))
        .collect();

    // block[i] for states[i]; the last slot is the dead state.
    let dead = states.len();
    let mut block: Vec<usize> = states.iter().map(|&v| usize::from(a.is_final(v))).collect();
    block.push(0);
    let index: HashMap<VState, usize> = states.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut count = renumber(&mut block);
    loop {
        let out_block = |v: Option<VState>| -> usize {
            v.and_then(|v| index.get(&v).copied()).map_or(block[dead], |i| block[i])
        };
        let mut sig: Vec<Vec<usize>> = block.iter().map(|&b| vec![b]).collect();
        for (m, hs) in &horizontal {
            let dead_block = block[dead];
            let classes = m.moore_classes(hs, &letters, |h| {
                let b = out_block(m.output(h));
                (b != dead_block).then_some(b)
            });
            for &h in hs {
                for (i, &v) in states.iter().enumerate() {
                    let class = m
                        .step(h, &Letter::State(v))
                        .and_then(|t| classes.class_of.get(&t).copied())
                        .unwrap_or(classes.sink);
                    sig[i].push(class);
                }
                sig[dead].push(classes.sink);
            }
        }
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let next: Vec<usize> = sig
            .into_iter()
            .map(|s| {
                let n = ids.len();
                *ids.entry(s).or_insert(n)
            })
            .collect();
        block = next;
        let new_count = renumber(&mut block);
        if new_count == count {
            break;
        }
        count = new_count;
    }

    let mut grouped: BTreeMap<usize, Vec<VState>> = BTreeMap::new();
    for (i, &v) in states.iter().enumerate() {
        grouped.entry(block[i]).or_default().push(v);
    }
    let mut blocks: Vec<(usize, Vec<VState>)> = grouped.into_iter().collect();
    blocks.sort_by_key(|(_, b)| b[0]);
    let useless = blocks.iter().position(|(id, _)| *id == block[dead]);
    Partition {
        blocks: blocks.into_iter().map(|(_, b)| b).collect(),
        useless,
    }
}

/// Renumbers block ids by first occurrence; returns the number of blocks.
fn renumber(block: &mut [usize]) -> usize {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    for b in block.iter_mut() {
        let n = ids.len();
        *b = *ids.entry(*b).or_insert(n);
    }
    ids.len()
}

/// The minimal equivalent SDTA: unreachable and useless states removed,
/// equivalent states merged (each block is named after its least member),
/// classifiers rebuilt over the block letters and Moore-minimized.
pub fn minimize_sdta(a: &Sdta) -> Sdta {
    let partition = inequivalence_partition(a);
    let mut new_id: BTreeMap<VState, VState> = BTreeMap::new();
    let mut reps: Vec<VState> = Vec::new();
    for (i, b) in partition.blocks().iter().enumerate() {
        if Some(i) == partition.useless {
            continue;
        }
        let id = VState(reps.len() as u32);
        reps.push(b[0]);
        for &v in b {
            new_id.insert(v, id);
        }
    }
    let literal: BTreeSet<Symbol> = a.literal_leaf_symbols().into_iter().collect();
    let rep_set: BTreeSet<VState> = reps.iter().copied().collect();
    let mut classifiers = BTreeMap::new();
    for (sym, m) in a.classifiers() {
        let mut out = HorizontalMachine::classifier(m.num_states());
        out.set_start(m.start()).expect("same states");
        for h in m.states() {
            for (l, t) in m.transitions(h) {
                let nl = match l {
                    Letter::State(v) if rep_set.contains(v) => Letter::State(new_id[v]),
                    Letter::Leaf(s) if literal.contains(s) => l.clone(),
                    _ => continue,
                };
                out.add_transition(h, nl, t).expect("renaming representatives is injective");
            }
            let o = m.output(h).and_then(|v| new_id.get(&v).copied());
            out.set_output(h, o).expect("classifier");
        }
        classifiers.insert(sym.clone(), out.minimize());
    }
    let finals = reps.iter().filter(|v| a.is_final(**v)).map(|v| new_id[v]);
    let names: Vec<String> = reps.iter().map(|&v| a.state_name(v)).collect();
    Sdta::new(a.alphabet().iter().cloned(), reps.len(), finals, classifiers).with_names(names)
}

/// Isomorphism of two SDTAs: a bijection of vertical states preserving
/// finality, together with isomorphic classifiers under that renaming.
/// Intended for trimmed automata such as the output of [`minimize_sdta`].
pub fn sdta_isomorphic(a: &Sdta, b: &Sdta) -> bool {
    if a.alphabet() != b.alphabet() || a.num_states() != b.num_states() {
        return false;
    }
    let mut phi: BTreeMap<VState, VState> = BTreeMap::new();
    let mut back: BTreeMap<VState, VState> = BTreeMap::new();
    let mut bind = |x: Option<VState>, y: Option<VState>, phi: &mut BTreeMap<VState, VState>| -> Result<bool, ()> {
        match (x, y) {
            (None, None) => Ok(false),
            (Some(x), Some(y)) => match (phi.get(&x), back.get(&y)) {
                (Some(&px), Some(&by)) if px == y && by == x => Ok(false),
                (None, None) => {
                    phi.insert(x, y);
                    back.insert(y, x);
                    Ok(true)
                }
                _ => Err(()),
            },
            _ => Err(()),
        }
    };
    loop {
        let mut grew = false;
        for sym in a.alphabet() {
            let (ma, mb) = (a.classifier(sym).expect("alphabet"), b.classifier(sym).expect("alphabet"));
            let mut seen: BTreeSet<(HState, HState)> = BTreeSet::new();
            let mut stack = vec![(ma.start(), mb.start())];
            while let Some((ha, hb)) = stack.pop() {
                if !seen.insert((ha, hb)) {
                    continue;
                }
                match bind(ma.output(ha), mb.output(hb), &mut phi) {
                    Err(()) => return false,
                    Ok(g) => grew |= g,
                }
                for (l, ta) in ma.transitions(ha) {
                    let lb = match l {
                        Letter::State(v) => match phi.get(v) {
                            Some(&w) => Letter::State(w),
                            None => continue,
                        },
                        Letter::Leaf(_) => l.clone(),
                    };
                    match mb.step(hb, &lb) {
                        Some(tb) => stack.push((ta, tb)),
                        None => return false,
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    if phi.len() != a.num_states() {
        return false;
    }
    if phi.iter().any(|(x, y)| a.is_final(*x) != b.is_final(*y)) {
        return false;
    }
    a.alphabet().iter().all(|sym| {
        is_isomorphic_under(
            a.classifier(sym).expect("alphabet"),
            b.classifier(sym).expect("alphabet"),
            |l| match l {
                Letter::State(v) => phi.get(v).map(|w| Letter::State(*w)),
                Letter::Leaf(_) => Some(l.clone()),
            },
            |v| phi.get(&v).copied(),
        )
    })
}

/// A tree with one marked leaf. The label at the hole is irrelevant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub tree: Tree,
    pub hole: Position,
}

impl Context {
    /// The empty context `x`.
    pub fn hole_only(placeholder: Symbol) -> Context {
        Context {
            tree: Tree::leaf(placeholder),
            hole: Position::root(),
        }
    }

    pub fn height(&self) -> usize {
        self.tree.height()
    }

    fn fmt_node(&self, t: &Tree, at: &mut Vec<usize>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if at.as_slice() == self.hole.path() {
            return write!(f, "x");
        }
        write!(f, "{}", t.label())?;
        if !t.is_leaf() {
            write!(f, "(")?;
            for (i, c) in t.children().iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                at.push(i);
                self.fmt_node(c, at, f)?;
                at.pop();
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_node(&self.tree, &mut Vec::new(), f)
    }
}

/// Evaluates `ctx` with the state `v` plugged into the hole.
pub fn eval_context(a: &Sdta, ctx: &Context, v: VState) -> Option<VState> {
    fn go(a: &Sdta, t: &Tree, at: &mut Vec<usize>, hole: &[usize], v: VState) -> Option<Letter> {
        if at.as_slice() == hole {
            return Some(Letter::State(v));
        }
        if t.is_leaf() {
            return a.leaf_letter(t.label());
        }
        let mut word = Vec::with_capacity(t.children().len());
        for (i, c) in t.children().iter().enumerate() {
            at.push(i);
            let l = go(a, c, at, hole, v);
            at.pop();
            word.push(l?);
        }
        a.classifier(t.label())?.classify(&word).map(Letter::State)
    }
    go(a, &ctx.tree, &mut Vec::new(), ctx.hole.path(), v)?.as_state()
}

/// Letters produced by trees of bounded height, each with a smallest-height
/// witness tree. `levels[k]` covers height ≤ k.
struct Realizable {
    levels: Vec<Vec<(Letter, Tree)>>,
}

impl Realizable {
    fn new(a: &Sdta, max_height: usize, max_width: usize) -> Realizable {
        let mut known: BTreeMap<Letter, Tree> = BTreeMap::new();
        for s in a.alphabet() {
            if let Some(l) = a.leaf_letter(s) {
                known.entry(l).or_insert_with(|| Tree::leaf(s.clone()));
            }
        }
        let mut levels = vec![known.clone().into_iter().collect::<Vec<_>>()];
        for _ in 0..max_height {
            let prev: Vec<(Letter, Tree)> = levels.last().expect("level 0").clone();
            for (sym, m) in a.classifiers() {
                for (h, word) in words_by_state(m, &prev, max_width) {
                    if let Some(v) = m.output(h) {
                        let l = Letter::State(v);
                        if !known.contains_key(&l) && !word.is_empty() {
                            let kids: Vec<Tree> = word.iter().map(|&i| prev[i].1.clone()).collect();
                            known.insert(l, Tree::node(sym.clone(), kids));
                        }
                    }
                }
            }
            levels.push(known.clone().into_iter().collect());
        }
        Realizable { levels }
    }

    fn at(&self, height: usize) -> &[(Letter, Tree)] {
        &self.levels[height.min(self.levels.len() - 1)]
    }
}

/// For every state reachable from the start by a word over `letters` of
/// length ≤ `max_len`, one shortest such word (as indices into `letters`).
fn words_by_state(m: &HorizontalMachine, letters: &[(Letter, Tree)], max_len: usize) -> Vec<(HState, Vec<usize>)> {
    words_from(m, m.start(), letters, max_len)
}

fn words_from(m: &HorizontalMachine, from: HState, letters: &[(Letter, Tree)], max_len: usize) -> Vec<(HState, Vec<usize>)> {
    let mut best: BTreeMap<HState, Vec<usize>> = BTreeMap::from([(from, Vec::new())]);
    let mut frontier = vec![(from, Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (h, w) in &frontier {
            for (i, (l, _)) in letters.iter().enumerate() {
                if let Some(t) = m.step(*h, l) {
                    if let std::collections::btree_map::Entry::Vacant(e) = best.entry(t) {
                        let mut w2: Vec<usize> = w.clone();
                        w2.push(i);
                        e.insert(w2.clone());
                        next.push((t, w2));
                    }
                }
            }
        }
        frontier = next;
    }
    best.into_iter().collect()
}

/// One step up from a hole-carrying child: the node's symbol, the siblings
/// left and right of that child.
#[derive(Clone, Debug)]
struct Frame {
    symbol: Symbol,
    left: Vec<Tree>,
    right: Vec<Tree>,
}

type PairLetter = (Option<VState>, Option<VState>);

/// Searches contexts of height ≤ `max_height` and width ≤ `max_width` for one
/// that accepts exactly one of `p`, `q`. Every returned context is checked
/// with [`eval_context`].
pub fn context_distinguish_oracle(
    a: &Sdta,
    p: VState,
    q: VState,
    max_height: usize,
    max_width: usize,
) -> Option<Context> {
    let accepts = |v: Option<VState>| v.is_some_and(|v| a.is_final(v));
    let placeholder = a.alphabet().iter().next().cloned().unwrap_or_else(|| Symbol::new("x").expect("valid"));
    if accepts(Some(p)) != accepts(Some(q)) {
        return Some(Context::hole_only(placeholder));
    }
    if max_width == 0 {
        return None;
    }
    let realizable = Realizable::new(a, max_height, max_width);
    // Hole at depth j: climb j levels; the node at depth d has siblings of
    // height ≤ max_height − d − 1.
    for j in 1..=max_height {
        let mut layer: BTreeMap<PairLetter, Vec<Frame>> = BTreeMap::from([((Some(p), Some(q)), Vec::new())]);
        for d in (0..j).rev() {
            let siblings = realizable.at(max_height - d - 1);
            let mut next: BTreeMap<PairLetter, Vec<Frame>> = BTreeMap::new();
            for (&(x, y), path) in &layer {
                for (sym, m) in a.classifiers() {
                    for (h, left) in words_by_state(m, siblings, max_width - 1) {
                        let hx = x.and_then(|x| m.step(h, &Letter::State(x)));
                        let hy = y.and_then(|y| m.step(h, &Letter::State(y)));
                        if hx.is_none() && hy.is_none() {
                            continue;
                        }
                        let room = max_width - 1 - left.len();
                        for (right, rx, ry) in joint_words(m, hx, hy, siblings, room) {
                            let key = (rx.and_then(|h| m.output(h)), ry.and_then(|h| m.output(h)));
                            if key.0.is_none() && key.1.is_none() {
                                continue;
                            }
                            next.entry(key).or_insert_with(|| {
                                let mut frames = path.clone();
                                frames.push(Frame {
                                    symbol: sym.clone(),
                                    left: left.iter().map(|&i| siblings[i].1.clone()).collect(),
                                    right: right.iter().map(|&i| siblings[i].1.clone()).collect(),
                                });
                                frames
                            });
                        }
                    }
                }
            }
            layer = next;
        }
        for ((x, y), frames) in layer {
            if accepts(x) != accepts(y) {
                let ctx = build_context(&frames, placeholder.clone());
                debug_assert_eq!(eval_context(a, &ctx, p), x);
                debug_assert_eq!(eval_context(a, &ctx, q), y);
                return Some(ctx);
            }
        }
    }
    None
}

/// Words of length ≤ `max_len` read from the pair `(hx, hy)` jointly, one
/// per reached pair.
fn joint_words(
    m: &HorizontalMachine,
    hx: Option<HState>,
    hy: Option<HState>,
    letters: &[(Letter, Tree)],
    max_len: usize,
) -> Vec<(Vec<usize>, Option<HState>, Option<HState>)> {
    let mut best: BTreeMap<(Option<HState>, Option<HState>), Vec<usize>> = BTreeMap::from([((hx, hy), Vec::new())]);
    let mut frontier = vec![((hx, hy), Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for ((x, y), w) in &frontier {
            for (i, (l, _)) in letters.iter().enumerate() {
                let nx = x.and_then(|x| m.step(x, l));
                let ny = y.and_then(|y| m.step(y, l));
                if nx.is_none() && ny.is_none() {
                    continue;
                }
                if let std::collections::btree_map::Entry::Vacant(e) = best.entry((nx, ny)) {
                    let mut w2: Vec<usize> = w.clone();
                    w2.push(i);
                    e.insert(w2.clone());
                    next.push(((nx, ny), w2));
                }
            }
        }
        frontier = next;
    }
    best.into_iter().map(|((x, y), w)| (w, x, y)).collect()
}

/// Frames are ordered from the hole upwards.
fn build_context(frames: &[Frame], placeholder: Symbol) -> Context {
    let mut tree = Tree::leaf(placeholder);
    let mut path: Vec<usize> = Vec::new();
    for f in frames {
        let mut kids = f.left.clone();
        path.push(kids.len());
        kids.push(tree);
        kids.extend(f.right.iter().cloned());
        tree = Tree::node(f.symbol.clone(), kids);
    }
    path.reverse();
    Context {
        tree,
        hole: Position::new(path),
    }
}

/// Whether the partition and the context oracle agree on every pair of
/// reachable states: a pair shares a block iff no bounded context tells
/// them apart. Returns the disagreeing pairs.
pub fn partition_oracle_disagreements(
    a: &Sdta,
    max_height: usize,
    max_width: usize,
) -> Vec<(VState, VState)> {
    let partition = inequivalence_partition(a);
    let states: Vec<VState> = partition.covered().into_iter().collect();
    let mut out = Vec::new();
    for (i, &p) in states.iter().enumerate() {
        for &q in &states[i + 1..] {
            let same = partition.same_block(p, q);
            let found = context_distinguish_oracle(a, p, q, max_height, max_width).is_some();
            if same == found {
                out.push((p, q));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::sdta_union;
    use crate::trees::{enumerate_trees, symbols};
    use crate::witnesses::{make_ma, make_mb};

    fn sym(s: &str) -> Symbol {
        Symbol::new(s).unwrap()
    }

    /// make_mb(2) with state 1 duplicated as state 2 (same behavior).
    fn duplicated() -> Sdta {
        let mb = make_mb(2).unwrap();
        let mut classifiers = BTreeMap::new();
        for (s, m) in mb.classifiers() {
            // Reading state 2 behaves like reading state 1; outputs of 1
            // from the first classifier go to 2 instead.
            let mut out = HorizontalMachine::classifier(m.num_states());
            for h in m.states() {
                for (l, t) in m.transitions(h) {
                    out.add_transition(h, l.clone(), t).unwrap();
                    if *l == Letter::state(1) {
                        out.add_transition(h, Letter::state(2), t).unwrap();
                    }
                }
                let o = m.output(h).map(|v| if v == VState(1) && s.as_str() == "b" { VState(2) } else { v });
                out.set_output(h, o).unwrap();
            }
            classifiers.insert(s.clone(), out);
        }
        Sdta::new(mb.alphabet().iter().cloned(), 3, [VState(1), VState(2)], classifiers)
    }

    #[test]
    fn reachability_examples() {
        assert_eq!(reachable_vertical(&make_mb(2).unwrap()), BTreeSet::from([VState(0), VState(1)]));
        let mut da = HorizontalMachine::classifier(1);
        da.set_output(HState(0), Some(VState(0))).unwrap();
        let a = Sdta::new(symbols(["a"]).unwrap(), 6, [VState(0)], BTreeMap::from([(sym("a"), da)]));
        let r = reachable_vertical(&a);
        assert!(!r.contains(&VState(5)));
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn partition_examples() {
        let mut da = HorizontalMachine::classifier(1);
        da.set_output(HState(0), Some(VState(0))).unwrap();
        let one = Sdta::new(symbols(["a"]).unwrap(), 1, [VState(0)], BTreeMap::from([(sym("a"), da)]));
        assert_eq!(inequivalence_partition(&one).len(), 1);
        for n in 2..5 {
            let p = inequivalence_partition(&make_mb(n).unwrap());
            assert!(p.is_discrete());
            assert_eq!(p.len(), n);
        }
        let dup = inequivalence_partition(&duplicated());
        assert!(dup.same_block(VState(1), VState(2)));
        assert_eq!(dup.len(), 2);
    }

    #[test]
    fn minimize_merges_duplicates_and_keeps_the_language() {
        let d = duplicated();
        let m = minimize_sdta(&d);
        assert_eq!(m.num_states(), 2);
        assert!(m.is_valid());
        for t in enumerate_trees(&symbols(["a", "b", "c", "d"]).unwrap(), 2, 2) {
            assert_eq!(m.accepts(&t), d.accepts(&t), "{t}");
        }
        assert!(sdta_isomorphic(&m, &minimize_sdta(&make_mb(2).unwrap())));
        assert!(sdta_isomorphic(&minimize_sdta(&m), &m));
    }

    #[test]
    fn witnesses_are_minimal() {
        for k in 2..5 {
            for a in [make_mb(k).unwrap(), make_ma(k).unwrap()] {
                let m = minimize_sdta(&a);
                assert_eq!(m.num_states(), k);
                assert!(sdta_isomorphic(&m, &minimize_sdta(&m)));
            }
        }
    }

    #[test]
    fn union_with_self_minimizes_to_the_same_size() {
        for k in 2..4 {
            let a = make_mb(k).unwrap();
            let u = sdta_union(&a, &a).unwrap();
            let mu = minimize_sdta(&u);
            let ma = minimize_sdta(&a);
            assert_eq!(mu.num_states(), ma.num_states());
            assert!(sdta_isomorphic(&mu, &ma));
        }
    }

    #[test]
    fn oracle_examples() {
        let mb = make_mb(3).unwrap();
        let ctx = context_distinguish_oracle(&mb, VState(2), VState(0), 2, 2).unwrap();
        assert_eq!(ctx.to_string(), "x");
        let ctx = context_distinguish_oracle(&mb, VState(1), VState(0), 3, 3).unwrap();
        let (x, y) = (eval_context(&mb, &ctx, VState(1)), eval_context(&mb, &ctx, VState(0)));
        assert_ne!(x.is_some_and(|v| mb.is_final(v)), y.is_some_and(|v| mb.is_final(v)), "{ctx}");
        assert!(context_distinguish_oracle(&duplicated(), VState(1), VState(2), 3, 3).is_none());
    }

    #[test]
    fn partition_agrees_with_oracle_on_witnesses() {
        for a in [make_mb(2).unwrap(), make_mb(3).unwrap(), make_ma(3).unwrap(), duplicated()] {
            assert!(partition_oracle_disagreements(&a, 4, 3).is_empty());
        }
    }
}
