//! Ranked alphabets, ranked terms, node addressing and the two substitution
//! operators.
//!
//! [`Term`] is generic over its label type so that plain trees, rule
//! right-hand sides and attribute references share one implementation. The
//! arity invariant is enforced by every public constructor.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::syntax::write_name;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("symbol {name} expects {expected} children, got {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("path {0} does not address a node")]
    InvalidPath(Path),
    #[error("duplicate symbol name {0} in alphabet")]
    DuplicateSymbol(String),
    #[error("alphabet has no rank-0 symbol")]
    NoNullary,
    #[error("substitution key {0} must have rank 0")]
    NotALeaf(String),
    #[error("replacement for {key} uses parameter y{param}, but {key} has rank {rank}")]
    ParameterRange { key: String, param: usize, rank: usize },
}

/// A named symbol with a fixed rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    rank: usize,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>, rank: usize) -> Symbol {
        let name = name.into();
        assert!(!name.is_empty(), "symbol names are non-empty");
        Symbol { name, rank }
    }

    /// The parameter leaf `y<j>`.
    pub fn param(j: usize) -> Symbol {
        Symbol::new(format!("y{j}"), 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `Some(j)` for the rank-0 parameter symbol `y<j>`.
    pub fn param_index(&self) -> Option<usize> {
        if self.rank != 0 {
            return None;
        }
        reserved_index(&self.name, 'y')
    }
}

/// Parses `<prefix><digits>` with a positive index and no leading zero.
pub(crate) fn reserved_index(name: &str, prefix: char) -> Option<usize> {
    let digits = name.strip_prefix(prefix)?;
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// True for names in the reserved parameter, variable and context namespaces.
pub fn is_reserved_name(name: &str) -> bool {
    name == "@x" || reserved_index(name, 'y').is_some() || reserved_index(name, 'x').is_some()
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.rank)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_name(f, &self.name)
    }
}

/// A finite set of symbols with unique names, kept in declaration order.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct RankedAlphabet {
    symbols: IndexMap<Arc<str>, usize>,
}

impl RankedAlphabet {
    pub fn new() -> RankedAlphabet {
        RankedAlphabet::default()
    }

    pub fn from_symbols<I: IntoIterator<Item = Symbol>>(symbols: I) -> Result<RankedAlphabet, TreeError> {
        let mut a = RankedAlphabet::new();
        for s in symbols {
            a.insert(s)?;
        }
        Ok(a)
    }

    /// Shorthand for tests and examples: `&[("a", 1), ("e", 0)]`.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<RankedAlphabet, TreeError> {
        RankedAlphabet::from_symbols(pairs.iter().map(|&(n, r)| Symbol::new(n, r)))
    }

    pub fn insert(&mut self, s: Symbol) -> Result<(), TreeError> {
        if self.symbols.contains_key(&s.name) {
            return Err(TreeError::DuplicateSymbol(s.name.to_string()));
        }
        self.symbols.insert(s.name, s.rank);
        Ok(())
    }

    /// Inserts unless a symbol of that name is already present.
    pub fn insert_if_absent(&mut self, s: Symbol) {
        self.symbols.entry(s.name).or_insert(s.rank);
    }

    pub fn get(&self, name: &str) -> Option<Symbol> {
        self.symbols
            .get_key_value(name)
            .map(|(n, &r)| Symbol { name: n.clone(), rank: r })
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.symbols.get(&*s.name) == Some(&s.rank)
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.get_index_of(name)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols
            .iter()
            .map(|(n, &r)| Symbol { name: n.clone(), rank: r })
    }

    pub fn of_rank(&self, k: usize) -> impl Iterator<Item = Symbol> + '_ {
        self.iter().filter(move |s| s.rank == k)
    }

    pub fn first_of_rank(&self, k: usize) -> Option<Symbol> {
        self.of_rank(k).next()
    }

    pub fn max_rank(&self) -> usize {
        self.symbols.values().copied().max().unwrap_or(0)
    }

    /// Same symbols regardless of declaration order.
    pub fn same_symbols(&self, other: &RankedAlphabet) -> bool {
        self.len() == other.len() && self.iter().all(|s| other.contains(&s))
    }

    pub fn is_subset_of(&self, other: &RankedAlphabet) -> bool {
        self.iter().all(|s| other.contains(&s))
    }
}

impl fmt::Debug for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for RankedAlphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}/{}", s, s.rank)?;
        }
        Ok(())
    }
}

/// A node address: 1-based child indices from the root.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn new(steps: Vec<usize>) -> Path {
        assert!(steps.iter().all(|&s| s >= 1), "path steps are 1-based");
        Path(steps)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Path {
        assert!(i >= 1);
        let mut v = self.0.clone();
        v.push(i);
        Path(v)
    }

    pub fn parent(&self) -> Option<(Path, usize)> {
        let (&last, init) = self.0.split_last()?;
        Some((Path(init.to_vec()), last))
    }

    pub fn is_prefix_of(&self, other: &Path) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn concat(&self, other: &Path) -> Path {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Path(v)
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Path {
    type Err = String;

    /// Accepts `ε`, `root`, the empty string, or steps separated by `.` or `·`.
    fn from_str(s: &str) -> Result<Path, String> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "root" || s == "eps" {
            return Ok(Path::root());
        }
        s.split(['.', '·'])
            .map(|p| match p.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(format!("bad path step {p:?} in {s:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}

/// Node labels of a [`Term`].
pub trait Label: Clone + Eq + Hash + fmt::Debug {
    fn arity(&self) -> usize;

    /// `Some(j)` if this label is the parameter leaf `y_j`.
    fn param_index(&self) -> Option<usize> {
        None
    }

    fn describe(&self) -> String {
        format!("{self:?}")
    }
}

impl Label for Symbol {
    fn arity(&self) -> usize {
        self.rank
    }

    fn param_index(&self) -> Option<usize> {
        Symbol::param_index(self)
    }

    fn describe(&self) -> String {
        self.name.to_string()
    }
}

/// A finite ordered ranked term.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term<L> {
    label: L,
    children: Vec<Term<L>>,
}

/// A tree over plain symbols.
pub type Tree = Term<Symbol>;

impl<L: Label> Term<L> {
    pub fn new(label: L, children: Vec<Term<L>>) -> Result<Term<L>, TreeError> {
        if label.arity() != children.len() {
            return Err(TreeError::Arity {
                name: label.describe(),
                expected: label.arity(),
                found: children.len(),
            });
        }
        Ok(Term { label, children })
    }

    pub fn leaf(label: L) -> Result<Term<L>, TreeError> {
        Term::new(label, Vec::new())
    }

    /// Internal constructor for call sites whose arity is correct by construction.
    pub(crate) fn node(label: L, children: Vec<Term<L>>) -> Term<L> {
        debug_assert_eq!(label.arity(), children.len(), "ill-ranked node {label:?}");
        Term { label, children }
    }

    pub fn label(&self) -> &L {
        &self.label
    }

    pub fn children(&self) -> &[Term<L>] {
        &self.children
    }

    /// The `i`-th child, 1-based.
    pub fn child(&self, i: usize) -> Option<&Term<L>> {
        i.checked_sub(1).and_then(|i| self.children.get(i))
    }

    pub fn into_parts(self) -> (L, Vec<Term<L>>) {
        (self.label, self.children)
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Term::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(Term::height).max().unwrap_or(0)
    }

    /// All node addresses in preorder.
    pub fn node_set(&self) -> Vec<Path> {
        let mut out = Vec::with_capacity(self.size());
        let mut cur = Vec::new();
        self.collect_paths(&mut cur, &mut out);
        out
    }

    fn collect_paths(&self, cur: &mut Vec<usize>, out: &mut Vec<Path>) {
        out.push(Path(cur.clone()));
        for (i, c) in self.children.iter().enumerate() {
            cur.push(i + 1);
            c.collect_paths(cur, out);
            cur.pop();
        }
    }

    /// Preorder traversal yielding each node with its address.
    pub fn preorder(&self) -> Vec<(Path, &Term<L>)> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.walk(&mut cur, &mut |p, t| out.push((Path(p.to_vec()), t)));
        out
    }

    fn walk<'a>(&'a self, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a Term<L>)) {
        f(cur, self);
        for (i, c) in self.children.iter().enumerate() {
            cur.push(i + 1);
            c.walk(cur, f);
            cur.pop();
        }
    }

    pub fn get(&self, u: &Path) -> Option<&Term<L>> {
        let mut t = self;
        for &i in u.steps() {
            t = t.child(i)?;
        }
        Some(t)
    }

    pub fn subtree(&self, u: &Path) -> Result<&Term<L>, TreeError> {
        self.get(u).ok_or_else(|| TreeError::InvalidPath(u.clone()))
    }

    pub fn replace_subtree(&self, u: &Path, s: Term<L>) -> Result<Term<L>, TreeError> {
        self.subtree(u)?;
        Ok(self.replace_at(u.steps(), s))
    }

    fn replace_at(&self, steps: &[usize], s: Term<L>) -> Term<L> {
        match steps.split_first() {
            None => s,
            Some((&i, rest)) => {
                let mut children = self.children.clone();
                children[i - 1] = children[i - 1].replace_at(rest, s);
                Term { label: self.label.clone(), children }
            }
        }
    }

    pub fn any_label(&self, pred: &impl Fn(&L) -> bool) -> bool {
        pred(&self.label) || self.children.iter().any(|c| c.any_label(pred))
    }

    pub fn count_labels(&self, pred: &impl Fn(&L) -> bool) -> usize {
        usize::from(pred(&self.label)) + self.children.iter().map(|c| c.count_labels(pred)).sum::<usize>()
    }

    pub fn labels_preorder(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.walk(&mut Vec::new(), &mut |_, t| out.push(&t.label));
        out
    }

    /// Relabels every node; fails if some new label has a different arity.
    pub fn try_map<M: Label>(&self, f: &impl Fn(&L) -> M) -> Result<Term<M>, TreeError> {
        let children = self
            .children
            .iter()
            .map(|c| c.try_map(f))
            .collect::<Result<Vec<_>, _>>()?;
        Term::new(f(&self.label), children)
    }

    /// Replaces matching rank-0 leaves, all at once.
    pub fn subst_leaves(&self, sub: &LeafSubstitution<L>) -> Term<L> {
        if self.children.is_empty() {
            if let Some(t) = sub.bindings.get(&self.label) {
                return t.clone();
            }
        }
        Term {
            label: self.label.clone(),
            children: self.children.iter().map(|c| c.subst_leaves(sub)).collect(),
        }
    }

    /// Second-order substitution: each `σ(s1..sm)` with `σ` bound becomes the
    /// replacement with `y_j` set to the recursively substituted `s_j`.
    pub fn subst_second_order(&self, sub: &SecondOrderSubstitution<L>) -> Term<L> {
        let kids: Vec<Term<L>> = self.children.iter().map(|c| c.subst_second_order(sub)).collect();
        match sub.bindings.get(&self.label) {
            Some(rep) => rep.instantiate_params(&kids),
            None => Term { label: self.label.clone(), children: kids },
        }
    }

    /// First-order replacement of parameter leaves `y_j` by `args[j-1]`.
    /// Parameters beyond `args` are left untouched.
    pub fn instantiate_params(&self, args: &[Term<L>]) -> Term<L> {
        if let Some(j) = self.label.param_index() {
            if let Some(a) = j.checked_sub(1).and_then(|i| args.get(i)) {
                return a.clone();
            }
        }
        Term {
            label: self.label.clone(),
            children: self.children.iter().map(|c| c.instantiate_params(args)).collect(),
        }
    }

    /// Largest parameter index occurring, 0 if none.
    pub fn max_param(&self) -> usize {
        let own = self.label.param_index().unwrap_or(0);
        self.children.iter().map(Term::max_param).fold(own, usize::max)
    }
}

impl<L: Label + fmt::Display> fmt::Display for Term<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl<L: Label + fmt::Display> fmt::Debug for Term<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Tree {
    /// Convenience constructor that resolves names through an alphabet.
    pub fn build(alphabet: &RankedAlphabet, name: &str, children: Vec<Tree>) -> Result<Tree, TreeError> {
        let sym = alphabet.get(name).unwrap_or_else(|| Symbol::new(name, children.len()));
        Tree::new(sym, children)
    }

    /// The leaf `y_j`.
    pub fn param(j: usize) -> Tree {
        Term::node(Symbol::param(j), Vec::new())
    }
}

#[derive(Clone)]
pub struct LeafSubstitution<L> {
    bindings: HashMap<L, Term<L>>,
}

impl<L: Label> Default for LeafSubstitution<L> {
    fn default() -> Self {
        LeafSubstitution { bindings: HashMap::new() }
    }
}

impl<L: Label> LeafSubstitution<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, key: L, t: Term<L>) -> Result<(), TreeError> {
        if key.arity() != 0 {
            return Err(TreeError::NotALeaf(key.describe()));
        }
        self.bindings.insert(key, t);
        Ok(())
    }

    pub fn with(mut self, key: L, t: Term<L>) -> Result<Self, TreeError> {
        self.bind(key, t)?;
        Ok(self)
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

#[derive(Clone)]
pub struct SecondOrderSubstitution<L> {
    bindings: HashMap<L, Term<L>>,
}

impl<L: Label> Default for SecondOrderSubstitution<L> {
    fn default() -> Self {
        SecondOrderSubstitution { bindings: HashMap::new() }
    }
}

impl<L: Label> SecondOrderSubstitution<L> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, key: L, replacement: Term<L>) -> Result<(), TreeError> {
        let m = replacement.max_param();
        if m > key.arity() {
            return Err(TreeError::ParameterRange {
                key: key.describe(),
                param: m,
                rank: key.arity(),
            });
        }
        self.bindings.insert(key, replacement);
        Ok(())
    }

    pub fn with(mut self, key: L, replacement: Term<L>) -> Result<Self, TreeError> {
        self.bind(key, replacement)?;
        Ok(self)
    }
}

/// Streams every tree with at most `max_size` nodes, ordered by size and then
/// lexicographically by preorder symbol sequence (declaration order).
pub fn enumerate_trees(alphabet: &RankedAlphabet, max_size: usize) -> Result<TreeEnumerator, TreeError> {
    if alphabet.first_of_rank(0).is_none() {
        return Err(TreeError::NoNullary);
    }
    Ok(TreeEnumerator {
        symbols: alphabet.iter().collect(),
        max_size,
        size: 0,
        level: Vec::new().into_iter(),
    })
}

pub struct TreeEnumerator {
    symbols: Vec<Symbol>,
    max_size: usize,
    size: usize,
    level: std::vec::IntoIter<Tree>,
}

impl TreeEnumerator {
    fn fill_level(&mut self, n: usize) -> Vec<Tree> {
        let mut out = Vec::new();
        let mut seq = Vec::with_capacity(n);
        polish(&self.symbols, n, 1, &mut seq, &mut out);
        out
    }
}

/// Depth-first over preorder sequences of length `n`; `open` counts the
/// subtrees still to be filled.
fn polish(symbols: &[Symbol], n: usize, open: usize, seq: &mut Vec<usize>, out: &mut Vec<Tree>) {
    let pos = seq.len();
    if pos == n {
        if open == 0 {
            out.push(from_polish(symbols, seq, &mut 0));
        }
        return;
    }
    if open == 0 {
        return;
    }
    let left_after = n - pos - 1;
    for (idx, s) in symbols.iter().enumerate() {
        let next_open = open - 1 + s.rank;
        if next_open > left_after || (next_open == 0 && left_after > 0) {
            continue;
        }
        seq.push(idx);
        polish(symbols, n, next_open, seq, out);
        seq.pop();
    }
}

fn from_polish(symbols: &[Symbol], seq: &[usize], at: &mut usize) -> Tree {
    let s = symbols[seq[*at]].clone();
    *at += 1;
    let children = (0..s.rank).map(|_| from_polish(symbols, seq, at)).collect();
    Term::node(s, children)
}

impl Iterator for TreeEnumerator {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        loop {
            if let Some(t) = self.level.next() {
                return Some(t);
            }
            if self.size >= self.max_size {
                return None;
            }
            self.size += 1;
            let level = self.fill_level(self.size);
            self.level = level.into_iter();
        }
    }
}

/// Collects [`enumerate_trees`] into a vector.
pub fn all_trees(alphabet: &RankedAlphabet, max_size: usize) -> Result<Vec<Tree>, TreeError> {
    Ok(enumerate_trees(alphabet, max_size)?.collect())
}
