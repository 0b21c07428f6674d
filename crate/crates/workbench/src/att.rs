//! Attributed tree transducers: definition, validation, dependency graphs,
//! circularity and demand-driven evaluation.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};

use crate::syntax::{quote_name, write_name};
use crate::tree::{is_reserved_name, Label, Path, RankedAlphabet, Symbol, Term, Tree, TreeError};

/// Node labels of attribute right-hand sides. The index is the child
/// position; 0 refers to the current node.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrLabel {
    Out(Symbol),
    Syn(Arc<str>, usize),
    Inh(Arc<str>, usize),
}

pub type AttrTree = Term<AttrLabel>;

impl Label for AttrLabel {
    fn arity(&self) -> usize {
        match self {
            AttrLabel::Out(s) => s.rank(),
            _ => 0,
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AttrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttrLabel::Out(s) => write!(f, "{s}"),
            AttrLabel::Syn(a, i) | AttrLabel::Inh(a, i) => {
                write_name(f, a)?;
                if *i == 0 {
                    f.write_str("(pi)")
                } else {
                    write!(f, "(pi {i})")
                }
            }
        }
    }
}

impl fmt::Debug for AttrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn attr_out(sym: Symbol, children: Vec<AttrTree>) -> Result<AttrTree, TreeError> {
    AttrTree::new(AttrLabel::Out(sym), children)
}

pub fn attr_syn(name: &str, i: usize) -> AttrTree {
    Term::node(AttrLabel::Syn(name.into(), i), Vec::new())
}

pub fn attr_inh(name: &str, i: usize) -> AttrTree {
    Term::node(AttrLabel::Inh(name.into(), i), Vec::new())
}

pub fn attr_from_tree(t: &Tree) -> AttrTree {
    Term::node(
        AttrLabel::Out(t.label().clone()),
        t.children().iter().map(attr_from_tree).collect(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrKind {
    Syn,
    Inh,
}

/// Rules of one input symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolRules {
    /// `α(π) -> t`
    pub syn: IndexMap<String, AttrTree>,
    /// `β(π i) -> t`, keyed by `(β, i)`.
    pub inh: IndexMap<(String, usize), AttrTree>,
}

/// Unvalidated ATT components; see [`validate_att`] and [`Att::new`].
#[derive(Clone, Debug)]
pub struct AttParts {
    pub name: String,
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
    pub syn: Vec<String>,
    pub inh: Vec<String>,
    pub root: String,
    pub rules: IndexMap<String, SymbolRules>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AttViolation {
    Overlap(String),
    Duplicate(String),
    RootNotSynthesized(String),
    MissingSyn { symbol: String, attr: String },
    MissingInh { symbol: String, attr: String, child: usize },
    ExtraRule { symbol: String, lhs: String },
    UnknownSymbol(String),
    BadLeaf { symbol: String, lhs: String, leaf: String },
    UnknownOutput { symbol: String, lhs: String, name: String },
    ReservedName(String),
}

impl fmt::Display for AttViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AttViolation::*;
        match self {
            Overlap(a) => write!(f, "attribute {a} is both synthesized and inherited"),
            Duplicate(a) => write!(f, "attribute {a} declared twice"),
            RootNotSynthesized(a) => write!(f, "output attribute {a} is not synthesized"),
            MissingSyn { symbol, attr } => write!(f, "missing rule {attr}(pi) at {symbol}"),
            MissingInh { symbol, attr, child } => write!(f, "missing rule {attr}(pi {child}) at {symbol}"),
            ExtraRule { symbol, lhs } => write!(f, "unexpected rule {lhs} at {symbol}"),
            UnknownSymbol(s) => write!(f, "rules given for undeclared input symbol {s}"),
            BadLeaf { symbol, lhs, leaf } => write!(f, "rule {lhs} at {symbol} may not reference {leaf}"),
            UnknownOutput { symbol, lhs, name } => {
                write!(f, "rule {lhs} at {symbol} uses undeclared output symbol {name}")
            }
            ReservedName(n) => write!(f, "symbol name {n} is reserved"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttValidationReport {
    pub violations: Vec<AttViolation>,
}

impl AttValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AttValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for AttValidationReport {}

pub fn validate_att(a: &AttParts) -> AttValidationReport {
    use AttViolation::*;
    let mut v = Vec::new();
    for s in a.input.iter().chain(a.output.iter()) {
        if is_reserved_name(s.name()) {
            v.push(ReservedName(s.name().to_string()));
        }
    }
    let mut seen = HashSet::new();
    for n in a.syn.iter().chain(a.inh.iter()) {
        if !seen.insert(n) {
            if a.syn.contains(n) && a.inh.contains(n) {
                v.push(Overlap(n.clone()));
            } else {
                v.push(Duplicate(n.clone()));
            }
        }
    }
    if !a.syn.contains(&a.root) {
        v.push(RootNotSynthesized(a.root.clone()));
    }
    let empty = SymbolRules::default();
    for sigma in a.input.iter() {
        let sname = sigma.name().to_string();
        let rules = a.rules.get(sigma.name()).unwrap_or(&empty);
        for attr in &a.syn {
            match rules.syn.get(attr) {
                None => v.push(MissingSyn { symbol: sname.clone(), attr: attr.clone() }),
                Some(t) => check_attr_rhs(a, &sigma, &format!("{}(pi)", quote_name(attr)), t, &mut v),
            }
        }
        for attr in &a.inh {
            for i in 1..=sigma.rank() {
                match rules.inh.get(&(attr.clone(), i)) {
                    None => v.push(MissingInh { symbol: sname.clone(), attr: attr.clone(), child: i }),
                    Some(t) => check_attr_rhs(a, &sigma, &format!("{}(pi {i})", quote_name(attr)), t, &mut v),
                }
            }
        }
        for attr in rules.syn.keys() {
            if !a.syn.contains(attr) {
                v.push(ExtraRule { symbol: sname.clone(), lhs: format!("{attr}(pi)") });
            }
        }
        for (attr, i) in rules.inh.keys() {
            if !a.inh.contains(attr) || *i == 0 || *i > sigma.rank() {
                v.push(ExtraRule { symbol: sname.clone(), lhs: format!("{attr}(pi {i})") });
            }
        }
    }
    for s in a.rules.keys() {
        if !a.input.contains_name(s) {
            v.push(UnknownSymbol(s.clone()));
        }
    }
    AttValidationReport { violations: v }
}

fn check_attr_rhs(a: &AttParts, sigma: &Symbol, lhs: &str, t: &AttrTree, v: &mut Vec<AttViolation>) {
    for (_, node) in t.preorder() {
        let bad = match node.label() {
            AttrLabel::Out(s) => {
                if !a.output.contains(s) {
                    v.push(AttViolation::UnknownOutput {
                        symbol: sigma.name().into(),
                        lhs: lhs.into(),
                        name: s.name().into(),
                    });
                }
                false
            }
            AttrLabel::Syn(n, i) => !a.syn.iter().any(|x| **x == **n) || *i == 0 || *i > sigma.rank(),
            AttrLabel::Inh(n, i) => !a.inh.iter().any(|x| **x == **n) || *i != 0,
        };
        if bad {
            v.push(AttViolation::BadLeaf {
                symbol: sigma.name().into(),
                lhs: lhs.into(),
                leaf: node.label().to_string(),
            });
        }
    }
}

/// A validated total ATT.
#[derive(Clone)]
pub struct Att {
    parts: AttParts,
    syn_index: HashMap<Arc<str>, usize>,
    inh_index: HashMap<Arc<str>, usize>,
    /// `syn_table[symbol][syn]`
    syn_table: Vec<Vec<AttrTree>>,
    /// `inh_table[symbol][child - 1][inh]`
    inh_table: Vec<Vec<Vec<AttrTree>>>,
}

/// An attribute instance `γ(u)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    pub kind: AttrKind,
    pub attr: Arc<str>,
    pub node: Path,
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.attr, self.node)
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AttEvalError {
    #[error("circular attribute dependency: {}", format_cycle(.0))]
    Circular(Vec<Instance>),
    #[error("inherited attribute {0} demanded at the root")]
    UndefinedRootInherited(String),
}

pub fn format_cycle(c: &[Instance]) -> String {
    let mut s: Vec<String> = c.iter().map(|i| i.to_string()).collect();
    if let Some(first) = c.first() {
        s.push(first.to_string());
    }
    s.join(" -> ")
}

impl Att {
    pub fn new(parts: AttParts) -> Result<Att, AttValidationReport> {
        let report = validate_att(&parts);
        if !report.is_empty() {
            return Err(report);
        }
        let syn_index = parts.syn.iter().enumerate().map(|(i, n)| (Arc::from(n.as_str()), i)).collect();
        let inh_index = parts.inh.iter().enumerate().map(|(i, n)| (Arc::from(n.as_str()), i)).collect();
        let mut syn_table = Vec::new();
        let mut inh_table = Vec::new();
        for sigma in parts.input.iter() {
            let r = &parts.rules[sigma.name()];
            syn_table.push(parts.syn.iter().map(|a| r.syn[a].clone()).collect());
            inh_table.push(
                (1..=sigma.rank())
                    .map(|i| parts.inh.iter().map(|b| r.inh[&(b.clone(), i)].clone()).collect())
                    .collect(),
            );
        }
        Ok(Att { parts, syn_index, inh_index, syn_table, inh_table })
    }

    pub fn parts(&self) -> &AttParts {
        &self.parts
    }

    pub fn into_parts(self) -> AttParts {
        self.parts
    }

    pub fn name(&self) -> &str {
        &self.parts.name
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.parts.input
    }

    pub fn output(&self) -> &RankedAlphabet {
        &self.parts.output
    }

    pub fn syn(&self) -> &[String] {
        &self.parts.syn
    }

    pub fn inh(&self) -> &[String] {
        &self.parts.inh
    }

    pub fn root(&self) -> &str {
        &self.parts.root
    }

    pub fn syn_rule(&self, sigma: &str, attr: &str) -> Option<&AttrTree> {
        let si = self.parts.input.index_of(sigma)?;
        Some(&self.syn_table[si][*self.syn_index.get(attr)?])
    }

    pub fn inh_rule(&self, sigma: &str, attr: &str, child: usize) -> Option<&AttrTree> {
        let si = self.parts.input.index_of(sigma)?;
        let row = self.inh_table[si].get(child.checked_sub(1)?)?;
        Some(&row[*self.inh_index.get(attr)?])
    }

    fn symbol_index(&self, s: &Symbol) -> usize {
        self.parts
            .input
            .index_of(s.name())
            .unwrap_or_else(|| panic!("input symbol {s:?} not in the alphabet of {}", self.name()))
    }

    /// The unique normal form of `α0(ε)`, computed on demand with memoization.
    pub fn evaluate(&self, s: &Tree) -> Result<Tree, AttEvalError> {
        let nodes = Arena::new(s);
        let mut ev = AttEvaluator { a: self, nodes: &nodes, memo: HashMap::new(), stack: IndexSet::new() };
        let root = self.syn_index[self.parts.root.as_str()];
        ev.instance((AttrKind::Syn, root, 0))
    }

    /// The dependency graph with the restricted vertex set: the output
    /// attribute at the root plus every attribute at every other node.
    pub fn dependency_graph(&self, s: &Tree) -> DependencyGraph {
        self.build_graph(s, false)
    }

    /// Like [`Att::dependency_graph`] but with every attribute at the root.
    pub fn full_dependency_graph(&self, s: &Tree) -> DependencyGraph {
        self.build_graph(s, true)
    }

    fn build_graph(&self, s: &Tree, full_root: bool) -> DependencyGraph {
        let mut g = DependencyGraph::default();
        let nodes = s.node_set();
        for u in &nodes {
            for (kind, names) in [(AttrKind::Syn, &self.parts.syn), (AttrKind::Inh, &self.parts.inh)] {
                for a in names {
                    let root_ok = full_root || (kind == AttrKind::Syn && *a == self.parts.root);
                    if !u.is_root() || root_ok {
                        g.add_vertex(Instance { kind, attr: a.as_str().into(), node: u.clone() });
                    }
                }
            }
        }
        for u in &nodes {
            let t = s.get(u).expect("node of s");
            let si = self.symbol_index(t.label());
            let mut add = |target: Instance, rhs: &AttrTree| {
                for l in rhs.labels_preorder() {
                    let (kind, name, j) = match l {
                        AttrLabel::Syn(n, j) => (AttrKind::Syn, n, *j),
                        AttrLabel::Inh(n, j) => (AttrKind::Inh, n, *j),
                        AttrLabel::Out(_) => continue,
                    };
                    let node = if j == 0 { u.clone() } else { u.child(j) };
                    let source = Instance { kind, attr: name.clone(), node };
                    g.add_edge(&source, &target);
                }
            };
            for (ai, a) in self.parts.syn.iter().enumerate() {
                let target = Instance { kind: AttrKind::Syn, attr: a.as_str().into(), node: u.clone() };
                add(target, &self.syn_table[si][ai]);
            }
            for (i, row) in self.inh_table[si].iter().enumerate() {
                for (bi, b) in self.parts.inh.iter().enumerate() {
                    let target = Instance { kind: AttrKind::Inh, attr: b.as_str().into(), node: u.child(i + 1) };
                    add(target, &row[bi]);
                }
            }
        }
        g
    }

    /// Circularity of the dependency graph on one input, with a shortest cycle.
    pub fn is_circular_on(&self, s: &Tree) -> Option<Vec<Instance>> {
        self.dependency_graph(s).shortest_cycle()
    }

    /// Whether some input has a cyclic dependency graph, with a witness input.
    pub fn is_circular(&self) -> Option<CircularityWitness> {
        circularity_fixpoint(self)
    }
}

impl fmt::Debug for Att {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Att({})", self.name())
    }
}

/// Flattened input tree with parent links.
struct Arena<'t> {
    trees: Vec<&'t Tree>,
    parent: Vec<Option<(usize, usize)>>,
    children: Vec<Vec<usize>>,
    paths: Vec<Path>,
}

impl<'t> Arena<'t> {
    fn new(s: &'t Tree) -> Self {
        let mut a = Arena { trees: Vec::new(), parent: Vec::new(), children: Vec::new(), paths: Vec::new() };
        a.push(s, None, Path::root());
        a
    }

    fn push(&mut self, t: &'t Tree, parent: Option<(usize, usize)>, path: Path) -> usize {
        let id = self.trees.len();
        self.trees.push(t);
        self.parent.push(parent);
        self.children.push(Vec::new());
        self.paths.push(path.clone());
        for (i, c) in t.children().iter().enumerate() {
            let cid = self.push(c, Some((id, i + 1)), path.child(i + 1));
            self.children[id].push(cid);
        }
        id
    }
}

type Key = (AttrKind, usize, usize);

struct AttEvaluator<'a, 't> {
    a: &'a Att,
    nodes: &'a Arena<'t>,
    memo: HashMap<Key, Tree>,
    stack: IndexSet<Key>,
}

impl AttEvaluator<'_, '_> {
    fn instance(&mut self, key: Key) -> Result<Tree, AttEvalError> {
        if let Some(t) = self.memo.get(&key) {
            return Ok(t.clone());
        }
        if let Some(start) = self.stack.get_index_of(&key) {
            let cycle = self.stack.iter().skip(start).map(|k| self.describe(*k)).collect();
            return Err(AttEvalError::Circular(cycle));
        }
        self.stack.insert(key);
        let (kind, attr, node) = key;
        let result = match kind {
            AttrKind::Syn => {
                let si = self.a.symbol_index(self.nodes.trees[node].label());
                let rhs = &self.a.syn_table[si][attr];
                self.resolve(rhs, node)
            }
            AttrKind::Inh => match self.nodes.parent[node] {
                None => Err(AttEvalError::UndefinedRootInherited(self.a.parts.inh[attr].clone())),
                Some((p, i)) => {
                    let si = self.a.symbol_index(self.nodes.trees[p].label());
                    let rhs = &self.a.inh_table[si][i - 1][attr];
                    self.resolve(rhs, p)
                }
            },
        };
        self.stack.pop();
        let t = result?;
        self.memo.insert(key, t.clone());
        Ok(t)
    }

    fn resolve(&mut self, rhs: &AttrTree, base: usize) -> Result<Tree, AttEvalError> {
        let at = |j: usize| if j == 0 { base } else { self.nodes.children[base][j - 1] };
        match rhs.label() {
            AttrLabel::Out(s) => {
                let kids = rhs
                    .children()
                    .iter()
                    .map(|c| self.resolve(c, base))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Term::node(s.clone(), kids))
            }
            AttrLabel::Syn(n, j) => {
                let node = at(*j);
                self.instance((AttrKind::Syn, self.a.syn_index[n], node))
            }
            AttrLabel::Inh(n, j) => {
                let node = at(*j);
                self.instance((AttrKind::Inh, self.a.inh_index[n], node))
            }
        }
    }

    fn describe(&self, (kind, attr, node): Key) -> Instance {
        let name = match kind {
            AttrKind::Syn => &self.a.parts.syn[attr],
            AttrKind::Inh => &self.a.parts.inh[attr],
        };
        Instance { kind, attr: name.as_str().into(), node: self.nodes.paths[node].clone() }
    }
}

/// `D_A(s)`: attribute instances and their dependencies.
#[derive(Clone, Default, Debug)]
pub struct DependencyGraph {
    vertices: IndexSet<Instance>,
    edges: BTreeSet<(usize, usize)>,
}

impl DependencyGraph {
    fn add_vertex(&mut self, v: Instance) {
        self.vertices.insert(v);
    }

    fn add_edge(&mut self, from: &Instance, to: &Instance) {
        if let (Some(a), Some(b)) = (self.vertices.get_index_of(from), self.vertices.get_index_of(to)) {
            self.edges.insert((a, b));
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Instance> {
        self.vertices.iter()
    }

    pub fn contains(&self, v: &Instance) -> bool {
        self.vertices.contains(v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&Instance, &Instance)> + '_ {
        self.edges.iter().map(|&(a, b)| (&self.vertices[a], &self.vertices[b]))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.vertices.len()];
        for &(a, b) in &self.edges {
            succ[a].push(b);
        }
        succ
    }

    /// Whether `to` is reachable from `from` by a non-empty path.
    pub fn has_path(&self, from: &Instance, to: &Instance) -> bool {
        let (Some(a), Some(b)) = (self.vertices.get_index_of(from), self.vertices.get_index_of(to)) else {
            return false;
        };
        let succ = self.successors();
        let mut seen = vec![false; self.vertices.len()];
        let mut queue: VecDeque<usize> = succ[a].iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            if v == b {
                return true;
            }
            if !std::mem::replace(&mut seen[v], true) {
                queue.extend(succ[v].iter().copied());
            }
        }
        false
    }

    /// A shortest directed cycle, starting at its earliest vertex.
    pub fn shortest_cycle(&self) -> Option<Vec<Instance>> {
        let succ = self.successors();
        let n = self.vertices.len();
        let mut best: Option<Vec<usize>> = None;
        for start in 0..n {
            let mut prev = vec![usize::MAX; n];
            let mut queue = VecDeque::from([start]);
            let mut found = None;
            'bfs: while let Some(v) = queue.pop_front() {
                for &w in &succ[v] {
                    if w == start {
                        found = Some(v);
                        break 'bfs;
                    }
                    if prev[w] == usize::MAX && w != start {
                        prev[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            if let Some(last) = found {
                let mut cyc = vec![last];
                while *cyc.last().unwrap() != start {
                    let p = prev[*cyc.last().unwrap()];
                    cyc.push(p);
                }
                cyc.reverse();
                if best.as_ref().map_or(true, |b| cyc.len() < b.len()) {
                    best = Some(cyc);
                }
            }
        }
        best.map(|c| c.into_iter().map(|i| self.vertices[i].clone()).collect())
    }

    /// Graphviz rendering: synthesized instances boxed, inherited elliptical.
    pub fn to_dot(&self) -> String {
        let label = |v: &Instance| format!("\"{}@{}\"", v.attr.replace('"', "\\\""), v.node);
        let mut s = String::from("digraph dependencies {\n");
        for v in &self.vertices {
            let shape = match v.kind {
                AttrKind::Syn => "box",
                AttrKind::Inh => "ellipse",
            };
            s.push_str(&format!("  {} [shape={shape}];\n", label(v)));
        }
        for (a, b) in self.edges() {
            s.push_str(&format!("  {} -> {};\n", label(a), label(b)));
        }
        s.push_str("}\n");
        s
    }
}

/// A tree whose dependency graph has a cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircularityWitness {
    pub input: Tree,
    pub cycle: Vec<Instance>,
}

/// Inherited-to-synthesized dependencies at the root of some subtree.
type Relation = BTreeSet<(usize, usize)>;

/// Explores every achievable relation, building each symbol's local graph
/// from all combinations of child relations found so far.
fn circularity_fixpoint(a: &Att) -> Option<CircularityWitness> {
    let nsyn = a.parts.syn.len();
    let ninh = a.parts.inh.len();
    let mut known: IndexMap<Relation, Tree> = IndexMap::new();
    let mut prev_len = 0;
    let mut round = 0;
    loop {
        let snapshot = known.len();
        let mut fresh: IndexMap<Relation, Tree> = IndexMap::new();
        for (si, sigma) in a.parts.input.iter().enumerate() {
            let k = sigma.rank();
            let mut tuple = vec![0usize; k];
            if k > 0 && snapshot == 0 {
                continue;
            }
            loop {
                if round == 0 || tuple.iter().any(|&i| i >= prev_len) {
                    let rels: Vec<&Relation> = tuple.iter().map(|&i| known.get_index(i).unwrap().0).collect();
                    let local = LocalGraph::new(a, si, k, &rels, nsyn, ninh);
                    if local.has_cycle() {
                        let kids: Vec<Tree> = tuple.iter().map(|&i| known.get_index(i).unwrap().1.clone()).collect();
                        let input = Term::node(sigma.clone(), kids);
                        let cycle = a.is_circular_on(&input).expect("local cycle appears in the full graph");
                        return Some(CircularityWitness { input, cycle });
                    }
                    let rel = local.root_relation();
                    if !known.contains_key(&rel) && !fresh.contains_key(&rel) {
                        let kids: Vec<Tree> = tuple.iter().map(|&i| known.get_index(i).unwrap().1.clone()).collect();
                        fresh.insert(rel, Term::node(sigma.clone(), kids));
                    }
                }
                if !advance(&mut tuple, snapshot) {
                    break;
                }
            }
        }
        if fresh.is_empty() {
            return None;
        }
        prev_len = snapshot;
        known.extend(fresh);
        round += 1;
    }
}

/// Odometer step over `[0, base)^k`; false when exhausted.
fn advance(tuple: &mut [usize], base: usize) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < base {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// Instances at one node (position 0) and its children (positions 1..=k).
struct LocalGraph {
    nsyn: usize,
    ninh: usize,
    succ: Vec<Vec<usize>>,
}

impl LocalGraph {
    fn id(&self, pos: usize, kind: AttrKind, attr: usize) -> usize {
        let width = self.nsyn + self.ninh;
        pos * width + if kind == AttrKind::Syn { attr } else { self.nsyn + attr }
    }

    fn new(a: &Att, si: usize, k: usize, rels: &[&Relation], nsyn: usize, ninh: usize) -> Self {
        let mut g = LocalGraph { nsyn, ninh, succ: vec![Vec::new(); (k + 1) * (nsyn + ninh)] };
        let mut edges = Vec::new();
        let mut add = |target: usize, rhs: &AttrTree, g: &LocalGraph| {
            for l in rhs.labels_preorder() {
                let src = match l {
                    AttrLabel::Syn(n, j) => g.id(*j, AttrKind::Syn, a.syn_index[n]),
                    AttrLabel::Inh(n, j) => g.id(*j, AttrKind::Inh, a.inh_index[n]),
                    AttrLabel::Out(_) => continue,
                };
                edges.push((src, target));
            }
        };
        for (ai, rhs) in a.syn_table[si].iter().enumerate() {
            add(g.id(0, AttrKind::Syn, ai), rhs, &g);
        }
        for (i, row) in a.inh_table[si].iter().enumerate() {
            for (bi, rhs) in row.iter().enumerate() {
                add(g.id(i + 1, AttrKind::Inh, bi), rhs, &g);
            }
        }
        for (i, rel) in rels.iter().enumerate() {
            for &(b, s) in rel.iter() {
                edges.push((g.id(i + 1, AttrKind::Inh, b), g.id(i + 1, AttrKind::Syn, s)));
            }
        }
        for (x, y) in edges {
            if !g.succ[x].contains(&y) {
                g.succ[x].push(y);
            }
        }
        g
    }

    fn reach(&self, from: usize) -> Vec<bool> {
        let mut seen = vec![false; self.succ.len()];
        let mut stack = self.succ[from].clone();
        while let Some(v) = stack.pop() {
            if !std::mem::replace(&mut seen[v], true) {
                stack.extend(self.succ[v].iter().copied());
            }
        }
        seen
    }

    fn has_cycle(&self) -> bool {
        (0..self.succ.len()).any(|v| self.reach(v)[v])
    }

    fn root_relation(&self) -> Relation {
        let mut rel = Relation::new();
        for b in 0..self.ninh {
            let r = self.reach(self.id(0, AttrKind::Inh, b));
            for s in 0..self.nsyn {
                if r[self.id(0, AttrKind::Syn, s)] {
                    rel.insert((b, s));
                }
            }
        }
        rel
    }
}
