//! Finite ordered unranked trees, tree domains, leaf substitution and tree
//! concatenation.
//!
//! Trees are written in term syntax: `b(c(a),a)` is a `b`-node with two
//! children, the first of which is a unary `c`-node over a leaf `a`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ParseTreeError, TreeError};

/// A node label. Symbols are non-empty tokens over ASCII letters, digits and
/// underscore.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Result<Symbol, TreeError> {
        if Self::is_valid(name) {
            Ok(Symbol(Arc::from(name)))
        } else {
            Err(TreeError::InvalidSymbol(name.to_string()))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        !name.is_empty() && name.bytes().all(is_symbol_byte)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// Builds a list of symbols from names, failing on the first invalid one.
pub fn symbols<'a, I>(names: I) -> Result<Vec<Symbol>, TreeError>
where
    I: IntoIterator<Item = &'a str>,
{
    names.into_iter().map(Symbol::new).collect()
}

fn is_symbol_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl FromStr for Symbol {
    type Err = TreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Symbol::new(s)
    }
}

impl TryFrom<String> for Symbol {
    type Error = TreeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Symbol::new(&s)
    }
}

impl From<Symbol> for String {
    fn from(s: Symbol) -> String {
        s.0.to_string()
    }
}

/// A node address: the sequence of 0-based child indices from the root.
/// The empty path is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Position {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, index: usize) -> Position {
        let mut path = self.0.clone();
        path.push(index);
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, idx) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{idx}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A finite ordered tree with labeled nodes and no arity constraint.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    label: Symbol,
    children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(label: Symbol) -> Tree {
        Tree {
            label,
            children: Vec::new(),
        }
    }

    pub fn node(label: Symbol, children: Vec<Tree>) -> Tree {
        Tree { label, children }
    }

    /// Parses term syntax: `tree := sym | sym '(' tree (',' tree)* ')'`.
    /// ASCII whitespace between tokens is ignored.
    pub fn parse(text: &str) -> Result<Tree, ParseTreeError> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let tree = parser.tree()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("trailing input after tree"));
        }
        Ok(tree)
    }

    pub fn label(&self) -> &Symbol {
        &self.label
    }

    pub fn children(&self) -> &[Tree] {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Height of the tree; a single leaf has height 0.
    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    /// All node labels occurring in the tree.
    pub fn labels(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut BTreeSet<Symbol>) {
        out.insert(self.label.clone());
        for c in &self.children {
            c.collect_labels(out);
        }
    }

    pub fn subtree(&self, pos: &Position) -> Option<&Tree> {
        let mut t = self;
        for &i in pos.path() {
            t = t.children.get(i)?;
        }
        Some(t)
    }

    pub fn contains(&self, pos: &Position) -> bool {
        self.subtree(pos).is_some()
    }

    /// The tree domain `dom(t)` in pre-order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::with_capacity(self.size());
        self.walk(&mut Vec::new(), &mut |p, _| out.push(Position::new(p.to_vec())));
        out
    }

    /// Positions with no children, in pre-order.
    pub fn leaf_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |p, t| {
            if t.is_leaf() {
                out.push(Position::new(p.to_vec()))
            }
        });
        out
    }

    fn walk(&self, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &Tree)) {
        f(path, self);
        for (i, c) in self.children.iter().enumerate() {
            path.push(i);
            c.walk(path, f);
            path.pop();
        }
    }

    /// `outer(u ← inner)`: replaces the subtree at `pos` with `inner`.
    pub fn substitute(&self, pos: &Position, inner: Tree) -> Result<Tree, TreeError> {
        if !self.contains(pos) {
            return Err(TreeError::PositionOutOfDomain(pos.clone()));
        }
        let mut out = self.clone();
        let mut slot = &mut out;
        for &i in pos.path() {
            slot = &mut slot.children[i];
        }
        *slot = inner;
        Ok(out)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label.as_str())?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                fmt::Display::fmt(c, f)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree({self})")
    }
}

impl FromStr for Tree {
    type Err = ParseTreeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Tree::parse(s)
    }
}

pub fn parse_tree(text: &str) -> Result<Tree, ParseTreeError> {
    Tree::parse(text)
}

pub fn serialize_tree(t: &Tree) -> String {
    t.to_string()
}

/// `t · t'`: every tree obtained from `tprime` by replacing one of its leaves
/// with `t`.
pub fn concat_trees(t: &Tree, tprime: &Tree) -> BTreeSet<Tree> {
    tprime
        .leaf_positions()
        .iter()
        .map(|u| {
            tprime
                .substitute(u, t.clone())
                .expect("leaf positions lie in the domain")
        })
        .collect()
}

/// `L1 · L2` for finite languages.
pub fn concat_finite_languages<'a, I, J>(l1: I, l2: J) -> BTreeSet<Tree>
where
    I: IntoIterator<Item = &'a Tree>,
    J: IntoIterator<Item = &'a Tree> + Clone,
{
    let mut out = BTreeSet::new();
    for t in l1 {
        for tp in l2.clone() {
            out.extend(concat_trees(t, tp));
        }
    }
    out
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseTreeError {
        ParseTreeError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn symbol(&mut self) -> Result<Symbol, ParseTreeError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && is_symbol_byte(self.src[self.pos]) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a symbol"));
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(Symbol(Arc::from(name)))
    }

    fn tree(&mut self) -> Result<Tree, ParseTreeError> {
        let label = self.symbol()?;
        if self.peek() != Some(b'(') {
            return Ok(Tree::leaf(label));
        }
        self.pos += 1;
        let mut children = vec![self.tree()?];
        loop {
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                    children.push(self.tree()?);
                }
                Some(b')') => {
                    self.pos += 1;
                    return Ok(Tree::node(label, children));
                }
                Some(_) => return Err(self.error("expected ',' or ')'")),
                None => return Err(self.error("unexpected end of input, expected ')'")),
            }
        }
    }
}

/// Bounds for an exhaustive tree corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub alphabet: Vec<Symbol>,
    pub max_height: usize,
    pub max_width: usize,
}

impl CorpusSpec {
    pub const DEFAULT_HEIGHT: usize = 3;
    pub const DEFAULT_WIDTH: usize = 3;

    pub fn new(alphabet: impl IntoIterator<Item = Symbol>, max_height: usize, max_width: usize) -> Self {
        let alphabet: BTreeSet<Symbol> = alphabet.into_iter().collect();
        CorpusSpec {
            alphabet: alphabet.into_iter().collect(),
            max_height,
            max_width,
        }
    }

    pub fn with_defaults(alphabet: impl IntoIterator<Item = Symbol>) -> Self {
        Self::new(alphabet, Self::DEFAULT_HEIGHT, Self::DEFAULT_WIDTH)
    }

    /// Number of trees in the corpus, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        corpus_size(self.alphabet.len(), self.max_height, self.max_width)
    }

    pub fn trees(&self) -> TreeEnumerator {
        enumerate_trees(&self.alphabet, self.max_height, self.max_width)
    }
}

/// Number of trees over `k` labels with height at most `h` and arity at most
/// `w`, saturating.
pub fn corpus_size(k: usize, h: usize, w: usize) -> u128 {
    let k = k as u128;
    let mut n = k;
    for _ in 0..h {
        // k * (1 + n + n^2 + ... + n^w)
        let mut sum: u128 = 1;
        let mut pow: u128 = 1;
        for _ in 0..w {
            pow = pow.saturating_mul(n);
            sum = sum.saturating_add(pow);
        }
        n = k.saturating_mul(sum);
    }
    n
}

/// Streams every tree over `alphabet` with height at most `max_height` and
/// arity at most `max_width`, each exactly once.
///
/// Order: by height; within a height by root label (alphabet order), then
/// arity, then the children tuple compared lexicographically in this same
/// order. Memory use is proportional to `max_height * max_width`.
pub fn enumerate_trees(alphabet: &[Symbol], max_height: usize, max_width: usize) -> TreeEnumerator {
    let sorted: BTreeSet<Symbol> = alphabet.iter().cloned().collect();
    let alphabet: Arc<[Symbol]> = sorted.into_iter().collect::<Vec<_>>().into();
    TreeEnumerator {
        inner: UpTo::new(alphabet, max_height, max_width),
    }
}

#[derive(Clone)]
pub struct TreeEnumerator {
    inner: UpTo,
}

impl Iterator for TreeEnumerator {
    type Item = Tree;
    fn next(&mut self) -> Option<Tree> {
        self.inner.next().map(|(t, _)| t)
    }
}

/// Trees of height `<= max`, paired with their height.
#[derive(Clone)]
struct UpTo {
    alphabet: Arc<[Symbol]>,
    width: usize,
    max: usize,
    height: usize,
    exact: Exact,
}

impl UpTo {
    fn new(alphabet: Arc<[Symbol]>, max: usize, width: usize) -> UpTo {
        UpTo {
            exact: Exact::new(alphabet.clone(), 0, width),
            alphabet,
            width,
            max,
            height: 0,
        }
    }
}

impl Iterator for UpTo {
    type Item = (Tree, usize);
    fn next(&mut self) -> Option<(Tree, usize)> {
        loop {
            if let Some(t) = self.exact.next() {
                return Some((t, self.height));
            }
            if self.height >= self.max || self.width == 0 {
                return None;
            }
            self.height += 1;
            self.exact = Exact::new(self.alphabet.clone(), self.height, self.width);
        }
    }
}

/// Trees of height exactly `height`.
#[derive(Clone)]
enum Exact {
    Leaves { alphabet: Arc<[Symbol]>, next: usize },
    Nodes(Box<Odometer>),
}

impl Exact {
    fn new(alphabet: Arc<[Symbol]>, height: usize, width: usize) -> Exact {
        if height == 0 {
            Exact::Leaves { alphabet, next: 0 }
        } else {
            Exact::Nodes(Box::new(Odometer {
                alphabet,
                width,
                height,
                label: 0,
                arity: 0,
                slots: Vec::new(),
                current: Vec::new(),
            }))
        }
    }
}

impl Iterator for Exact {
    type Item = Tree;
    fn next(&mut self) -> Option<Tree> {
        match self {
            Exact::Leaves { alphabet, next } => {
                let s = alphabet.get(*next)?.clone();
                *next += 1;
                Some(Tree::leaf(s))
            }
            Exact::Nodes(o) => o.next(),
        }
    }
}

/// Walks (label, arity, children) tuples where every child has height
/// `< height` and at least one child has height exactly `height - 1`.
#[derive(Clone)]
struct Odometer {
    alphabet: Arc<[Symbol]>,
    width: usize,
    height: usize,
    label: usize,
    /// 0 until started.
    arity: usize,
    slots: Vec<UpTo>,
    current: Vec<(Tree, usize)>,
}

impl Odometer {
    fn fresh_slot(&self) -> UpTo {
        UpTo::new(self.alphabet.clone(), self.height - 1, self.width)
    }

    fn reset_tuple(&mut self) {
        self.slots = (0..self.arity).map(|_| self.fresh_slot()).collect();
        self.current = self
            .slots
            .iter_mut()
            .map(|s| s.next().expect("alphabet is non-empty"))
            .collect();
    }

    /// Advances to the next raw tuple; false when exhausted.
    fn advance(&mut self) -> bool {
        if self.alphabet.is_empty() || self.width == 0 {
            return false;
        }
        if self.arity == 0 {
            self.arity = 1;
            self.reset_tuple();
            return true;
        }
        let mut i = self.arity;
        while i > 0 {
            i -= 1;
            if let Some(t) = self.slots[i].next() {
                self.current[i] = t;
                return true;
            }
            self.slots[i] = self.fresh_slot();
            self.current[i] = self.slots[i].next().expect("alphabet is non-empty");
        }
        // Every slot wrapped: move to the next arity, then the next label.
        if self.arity < self.width {
            self.arity += 1;
        } else {
            self.label += 1;
            self.arity = 1;
            if self.label >= self.alphabet.len() {
                return false;
            }
        }
        self.reset_tuple();
        true
    }
}

impl Iterator for Odometer {
    type Item = Tree;
    fn next(&mut self) -> Option<Tree> {
        while self.advance() {
            if self.current.iter().any(|(_, h)| *h + 1 == self.height) {
                let children = self.current.iter().map(|(t, _)| t.clone()).collect();
                return Some(Tree::node(self.alphabet[self.label].clone(), children));
            }
        }
        // Stay exhausted.
        self.label = self.alphabet.len();
        self.width = 0;
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Tree {
        Tree::parse(s).unwrap()
    }

    fn syms(names: &[&str]) -> Vec<Symbol> {
        symbols(names.iter().copied()).unwrap()
    }

    #[test]
    fn parse_examples() {
        let a = t("a");
        assert!(a.is_leaf());
        assert_eq!(a.label().as_str(), "a");
        let b = t("b(a,a)");
        assert_eq!(b.children().len(), 2);
        assert!(b.children().iter().all(|c| c.is_leaf() && c.label().as_str() == "a"));
        assert_eq!(t("b(c(a),a)").height(), 2);
        assert_eq!(t(" b ( a , a ) "), b);
    }

    #[test]
    fn serialize_examples() {
        for s in ["a", "b(a,a)", "a(b(a),a)"] {
            assert_eq!(serialize_tree(&t(s)), s);
        }
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let err = Tree::parse("b(a,").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = Tree::parse("b(a a)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(Tree::parse("").is_err());
        assert!(Tree::parse("b()").is_err());
        assert!(Tree::parse("a)").is_err());
        assert!(Tree::parse("a-b").is_err());
    }

    #[test]
    fn leaf_positions_examples() {
        assert_eq!(t("a").leaf_positions(), vec![Position::root()]);
        assert_eq!(
            t("b(a,a)").leaf_positions(),
            vec![Position::new(vec![0]), Position::new(vec![1])]
        );
        assert_eq!(
            t("b(c(a),a)").leaf_positions(),
            vec![Position::new(vec![0, 0]), Position::new(vec![1])]
        );
    }

    #[test]
    fn substitute_examples() {
        let outer = t("b(a,a)");
        let inner = t("c(a)");
        assert_eq!(outer.substitute(&Position::root(), inner.clone()).unwrap(), inner);
        assert_eq!(
            outer.substitute(&Position::new(vec![0]), inner.clone()).unwrap(),
            t("b(c(a),a)")
        );
        assert_eq!(
            outer.substitute(&Position::new(vec![1]), inner.clone()).unwrap(),
            t("b(a,c(a))")
        );
        assert!(matches!(
            outer.substitute(&Position::new(vec![2]), inner),
            Err(TreeError::PositionOutOfDomain(_))
        ));
    }

    #[test]
    fn concat_examples() {
        let got = concat_trees(&t("c(a)"), &t("b(a,a)"));
        assert_eq!(got, [t("b(c(a),a)"), t("b(a,c(a))")].into_iter().collect());
        assert_eq!(concat_trees(&t("c(a)"), &t("a")), [t("c(a)")].into_iter().collect());
        assert_eq!(concat_trees(&t("a"), &t("b(a,a)")), [t("b(a,a)")].into_iter().collect());

        let a = [t("a")];
        assert_eq!(concat_finite_languages(&a, &a), a.iter().cloned().collect());
        let l1 = [t("c(a)")];
        let l2 = [t("b(a,a)")];
        assert_eq!(concat_finite_languages(&l1, &l2).len(), 2);
        let empty: [Tree; 0] = [];
        assert!(concat_finite_languages(&empty, &l2).is_empty());
    }

    #[test]
    fn enumerate_examples() {
        let got: Vec<String> = enumerate_trees(&syms(&["a"]), 0, 2).map(|t| t.to_string()).collect();
        assert_eq!(got, ["a"]);
        let got: Vec<String> = enumerate_trees(&syms(&["a", "b"]), 0, 2).map(|t| t.to_string()).collect();
        assert_eq!(got, ["a", "b"]);
        let got: Vec<String> = enumerate_trees(&syms(&["a"]), 1, 2).map(|t| t.to_string()).collect();
        assert_eq!(got, ["a", "a(a)", "a(a,a)"]);
    }

    #[test]
    fn enumeration_counts_match_closed_form() {
        for k in 1..=3 {
            for h in 0..=2 {
                for w in 1..=3 {
                    let alphabet = syms(&["a", "b", "c"][..k]);
                    let n = enumerate_trees(&alphabet, h, w).count() as u128;
                    if n > 200_000 {
                        continue;
                    }
                    assert_eq!(n, corpus_size(k, h, w), "k={k} h={h} w={w}");
                }
            }
        }
        // Values quoted in the docs.
        assert_eq!(corpus_size(1, 3, 3), 621_436);
        assert!(corpus_size(4, 3, 3) > 10u128.pow(20));
    }

    #[test]
    fn enumeration_is_duplicate_free_and_bounded() {
        let alphabet = syms(&["a", "b"]);
        let all: Vec<Tree> = enumerate_trees(&alphabet, 2, 2).collect();
        let set: BTreeSet<&Tree> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        assert!(all.windows(2).all(|w| w[0].height() <= w[1].height()));
        assert!(all.iter().all(|t| t.height() <= 2));
    }

    #[test]
    fn enumeration_count_strictly_increases() {
        let alphabet = syms(&["a"]);
        for h in 1..=3 {
            for w in 1..=3 {
                let n = corpus_size(1, h, w);
                assert!(corpus_size(1, h + 1, w) > n);
                assert!(corpus_size(1, h, w + 1) > n);
                if n < 100_000 {
                    assert_eq!(enumerate_trees(&alphabet, h, w).count() as u128, n);
                }
            }
        }
    }

    #[test]
    fn substitute_own_subtree_is_identity() {
        for tree in enumerate_trees(&syms(&["a", "b"]), 2, 2) {
            for u in tree.positions() {
                let sub = tree.subtree(&u).unwrap().clone();
                assert_eq!(tree.substitute(&u, sub).unwrap(), tree);
            }
        }
    }

    #[test]
    fn concat_size_bounded_by_leaf_count() {
        let corpus: Vec<Tree> = enumerate_trees(&syms(&["a", "b"]), 1, 2).collect();
        for x in &corpus {
            for y in &corpus {
                let n = concat_trees(x, y).len();
                let leaves = y.leaf_positions().len();
                assert!(n <= leaves);
                let collapses = x.is_leaf() && y.leaf_positions().iter().any(|u| y.subtree(u).unwrap() == x);
                if !collapses {
                    assert_eq!(n, leaves, "{x} · {y}");
                }
            }
        }
    }

    #[test]
    fn domain_is_prefix_and_left_sibling_closed() {
        for tree in enumerate_trees(&syms(&["a", "b"]), 2, 3) {
            let dom: BTreeSet<Position> = tree.positions().into_iter().collect();
            for p in &dom {
                if let Some((&last, prefix)) = p.path().split_last() {
                    assert!(dom.contains(&Position::new(prefix.to_vec())));
                    for j in 0..last {
                        let mut sib = prefix.to_vec();
                        sib.push(j);
                        assert!(dom.contains(&Position::new(sib)));
                    }
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn parse_serialize_round_trip(idx in 0usize..5000) {
            let tree = enumerate_trees(&syms(&["a", "b", "c"]), 2, 2).nth(idx % 4000);
            if let Some(tree) = tree {
                proptest::prop_assert_eq!(Tree::parse(&serialize_tree(&tree)).unwrap(), tree);
            }
        }
    }
}
