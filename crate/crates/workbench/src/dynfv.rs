//! Reachable states, call trees and the bounded dynamic FV check, plus the
//! state-annotating relabeling with its ATT and the equivalence gadget.

use std::borrow::Cow;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::top_with;
use crate::att::{Att, AttParts, AttValidationReport, AttrLabel, SymbolRules};
use crate::constructions::{att_to_consistent_mtt, bottom_symbol, ensure_symbol, state_set_name, ConstructionError};
use crate::mtt::{rhs_to_tree, Mtt, MttParts, Rhs, RhsLabel, ValidationReport, HOLE};
use crate::relabel::{Brel, BrelRule, Pipeline, PipelineError, RelabelError, Stage, Trel, TrelRule};
use crate::tree::{all_trees, Path, RankedAlphabet, Symbol, Term, Tree, TreeError};

#[derive(Debug, Error)]
pub enum DynFvError {
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("the MTT is deleting; normalize it first")]
    Deleting,
    #[error("look-around must consist of relabelings whose output the MTT reads: {0}")]
    BadLookaround(String),
    #[error("pipeline shape not supported: {0}")]
    Shape(String),
    #[error("the input alphabet has no unary symbol")]
    NoUnarySymbol,
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Relabel(#[from] RelabelError),
    #[error("constructed MTT is invalid: {0}")]
    InvalidMtt(#[from] ValidationReport),
    #[error("constructed ATT is invalid: {0}")]
    InvalidAtt(#[from] AttValidationReport),
}

fn state_idx(m: &Mtt, q: &str) -> Result<usize, DynFvError> {
    m.state_index(q).ok_or_else(|| DynFvError::UnknownState(q.into()))
}

fn sorted_states(m: &Mtt, set: impl IntoIterator<Item = usize>) -> Vec<Symbol> {
    let mut v: Vec<usize> = set.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    let states: Vec<Symbol> = m.states().iter().collect();
    v.into_iter().map(|i| states[i].clone()).collect()
}

/// The states called on the hole of `M_q′(s[u←x])` for
/// some `q′ ∈ Q′`, in declaration order.
pub fn reachable_states(m: &Mtt, from: &[&str], s: &Tree, u: &Path) -> Result<Vec<Symbol>, DynFvError> {
    let mut found = Vec::new();
    for q in from {
        state_idx(m, q)?;
        let xi = m.context_semantics_from(q, s, u)?;
        for l in xi.labels_preorder() {
            if let RhsLabel::Call(p, HOLE) = l {
                found.push(state_idx(m, p.name())?);
            }
        }
    }
    Ok(sorted_states(m, found))
}

/// Distinct `⟨q,x⟩`-rooted subtrees of `M_q0(s[u←x])`, in
/// preorder of first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallTreeSet {
    pub state: Symbol,
    pub trees: Vec<Rhs>,
}

pub fn call_trees(m: &Mtt, s: &Tree, u: &Path, q: &str) -> Result<CallTreeSet, DynFvError> {
    let state = m.state(q).ok_or_else(|| DynFvError::UnknownState(q.into()))?;
    let xi = m.context_semantics(s, u)?;
    let trees = collect_call_trees(&xi).shift_remove(&state).unwrap_or_default().into_iter().collect();
    Ok(CallTreeSet { state, trees })
}

fn collect_call_trees(xi: &Rhs) -> IndexMap<Symbol, IndexSet<Rhs>> {
    let mut by_state: IndexMap<Symbol, IndexSet<Rhs>> = IndexMap::new();
    for (_, t) in xi.preorder() {
        if let RhsLabel::Call(q, HOLE) = t.label() {
            by_state.entry(q.clone()).or_default().insert(t.clone());
        }
    }
    by_state
}

/// Every `⟨q′,x⟩` in `t` replaced by `M_q′(s_u)`. `None` if the
/// result still mentions parameters.
pub fn evaluate_argument(m: &Mtt, t: &Rhs, s_u: &Tree) -> Option<Tree> {
    rhs_to_tree(&m.evaluate_hole_calls(t, s_u))
}

/// Two call trees of one state whose `j`-th arguments evaluate differently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynFvViolation {
    /// The enumerated tree before the look-around.
    pub source: Tree,
    /// The tree the MTT reads.
    pub input: Tree,
    pub node: Path,
    pub state: String,
    pub j: usize,
    pub first: Rhs,
    pub second: Rhs,
    pub first_value: Rhs,
    pub second_value: Rhs,
}

impl fmt::Display for DynFvViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "on {} at node {}, argument {} of {} evaluates to {} in {} but to {} in {}",
            self.input, self.node, self.j, self.state, self.first_value, self.first, self.second_value, self.second
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DynFvVerdict {
    /// No violation on any input up to the bound; this is not a proof.
    NoViolationUpTo { bound: usize, inputs: usize },
    Violation(Box<DynFvViolation>),
}

impl DynFvVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, DynFvVerdict::NoViolationUpTo { .. })
    }

    pub fn violation(&self) -> Option<&DynFvViolation> {
        match self {
            DynFvVerdict::Violation(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for DynFvVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynFvVerdict::NoViolationUpTo { bound, inputs } => {
                write!(f, "no violation on {inputs} inputs of size <= {bound}")
            }
            DynFvVerdict::Violation(v) => write!(f, "violation {v}"),
        }
    }
}

/// First violation on one input tree, scanning nodes in preorder, states in
/// declaration order and argument positions in order.
pub fn dynamic_fv_violation_on(m: &Mtt, s: &Tree) -> Option<DynFvViolation> {
    for (u, sub) in s.preorder() {
        let xi = m.context_semantics(s, &u).expect("node of s");
        let by_state = collect_call_trees(&xi);
        for q in m.states().iter().filter(|q| q.rank() > 0) {
            let Some(trees) = by_state.get(&q) else { continue };
            if trees.len() < 2 {
                continue;
            }
            for j in 0..q.rank() {
                let args: Vec<&Rhs> = trees.iter().map(|t| &t.children()[j]).collect();
                if args.iter().all(|a| *a == args[0]) {
                    continue;
                }
                let values = m.evaluate_hole_calls_all(args.iter().copied(), sub);
                if let Some(k) = values.iter().position(|v| *v != values[0]) {
                    return Some(DynFvViolation {
                        source: s.clone(),
                        input: s.clone(),
                        node: u,
                        state: q.name().to_string(),
                        j: j + 1,
                        first: trees[0].clone(),
                        second: trees[k].clone(),
                        first_value: values[0].clone(),
                        second_value: values[k].clone(),
                    });
                }
            }
        }
    }
    None
}

/// Bounded dynamic FV check on the image of the look-around (or on all
/// input trees). Reports the first violation in enumeration order.
pub fn check_dynamic_fv(m: &Mtt, lookaround: Option<&Pipeline>, bound: usize) -> Result<DynFvVerdict, DynFvError> {
    let source = match lookaround {
        Some(p) => {
            if let Some(st) = p.stages().iter().find(|s| !s.is_relabeling()) {
                return Err(DynFvError::BadLookaround(format!("stage {} is a {}", st.name(), st.kind())));
            }
            if !p.output().is_subset_of(m.input()) {
                return Err(DynFvError::BadLookaround(format!("{} is not read by {}", p.output(), m.name())));
            }
            p.input().clone()
        }
        None => m.input().clone(),
    };
    let inputs = all_trees(&source, bound)?;
    let found = inputs.par_iter().find_map_first(|s| {
        let image = match lookaround {
            Some(p) => p.apply(s).expect("relabelings are total"),
            None => s.clone(),
        };
        dynamic_fv_violation_on(m, &image).map(|mut v| {
            v.source = s.clone();
            v
        })
    });
    Ok(match found {
        Some(v) => DynFvVerdict::Violation(Box::new(v)),
        None => DynFvVerdict::NoViolationUpTo { bound, inputs: inputs.len() },
    })
}

/// States `q` with `⟨q,x_i⟩` in `rhs(q′,σ)` for some `q′` in `from`.
fn called_on(m: &Mtt, from: &[usize], sigma: &Symbol, i: usize) -> Vec<usize> {
    let states: Vec<Symbol> = m.states().iter().collect();
    let mut out = HashSet::new();
    for &q in from {
        let rhs = m.rhs(states[q].name(), sigma.name()).expect("total");
        for l in rhs.labels_preorder() {
            if let RhsLabel::Call(p, v) = l {
                if *v == i {
                    out.insert(m.state_index(p.name()).expect("state"));
                }
            }
        }
    }
    let mut v: Vec<usize> = out.into_iter().collect();
    v.sort_unstable();
    v
}

/// Reachable state sets and the annotated symbols `[σ,{…}]`.
struct StateAnnotation {
    sets: Vec<Vec<usize>>,
    /// annotated name -> (symbol, set index, child set indices)
    symbols: IndexMap<String, (Symbol, usize, Vec<usize>)>,
}

fn state_annotation(m: &Mtt) -> StateAnnotation {
    let q0 = m.state_index(m.initial().name()).expect("initial");
    let mut sets: IndexSet<Vec<usize>> = IndexSet::new();
    sets.insert(vec![q0]);
    let mut symbols = IndexMap::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let set = sets[k].clone();
        for sigma in m.input().iter() {
            let mut kids = Vec::new();
            for i in 1..=sigma.rank() {
                let (idx, fresh) = sets.insert_full(called_on(m, &set, &sigma, i));
                if fresh {
                    queue.push_back(idx);
                }
                kids.push(idx);
            }
            let name = format!("[{},{}]", sigma.name(), state_set_name(m, &set));
            symbols.insert(name, (sigma.clone(), k, kids));
        }
    }
    StateAnnotation { sets: sets.into_iter().collect(), symbols }
}

/// The top-down relabeling that annotates each node with the set of states
/// processing it, over the reachable state sets only. The annotation is
/// exact for nondeleting MTTs; otherwise it may contain states whose calls
/// are deleted.
pub fn build_state_annotating_trel(m: &Mtt) -> Trel {
    let ann = state_annotation(m);
    let names: Vec<String> = ann.sets.iter().map(|s| state_set_name(m, s)).collect();
    let mut output = RankedAlphabet::new();
    let mut rules = Vec::new();
    for (name, (sigma, k, kids)) in &ann.symbols {
        output.insert_if_absent(Symbol::new(name.as_str(), sigma.rank()));
        rules.push(TrelRule {
            state: names[*k].clone(),
            symbol: sigma.name().to_string(),
            output: name.clone(),
            children: kids.iter().map(|&c| names[c].clone()).collect(),
        });
    }
    Trel::new(format!("{}_states", m.name()), m.input().clone(), output, names.clone(), &names[0], rules)
        .expect("one rule per reachable set and symbol")
}

/// `m` read over the annotated alphabet of [`build_state_annotating_trel`],
/// ignoring the annotation.
pub fn restricted_copy(m: &Mtt) -> Mtt {
    let ann = state_annotation(m);
    let mut input = RankedAlphabet::new();
    for (name, (sigma, _, _)) in &ann.symbols {
        input.insert_if_absent(Symbol::new(name.as_str(), sigma.rank()));
    }
    let project = |s: &Symbol| ann.symbols[s.name()].0.clone();
    m.with_input_relabeled(format!("{}_annotated", m.name()), input, project).expect("same ranks")
}

/// `<q,j>`
pub fn param_attr_name(q: &str, j: usize) -> String {
    format!("<{q},{j}>")
}

fn postorder<'a>(t: &'a Rhs, at: Path, out: &mut Vec<(Path, &'a Rhs)>) {
    for (k, c) in t.children().iter().enumerate() {
        postorder(c, at.child(k + 1), out);
    }
    out.push((at, t));
}

/// The ATT reading the output of [`build_state_annotating_trel`]: states
/// become synthesized attributes, parameter `j` of `q` becomes the inherited
/// attribute `<q,j>`, defined from the first call of `q` met in a post-order
/// traversal of the rules of the annotated states in declaration order.
pub fn build_dynfv_att(m: &Mtt) -> Result<Att, DynFvError> {
    if !m.is_nondeleting() {
        return Err(DynFvError::Deleting);
    }
    let bottom = bottom_symbol(m.output())?;
    let ann = state_annotation(m);
    let states: Vec<Symbol> = m.states().iter().collect();
    let inh: Vec<String> =
        states.iter().flat_map(|q| (1..=q.rank()).map(move |j| param_attr_name(q.name(), j))).collect();
    let mut input = RankedAlphabet::new();
    let mut rules = IndexMap::new();
    let dummy = || Term::node(AttrLabel::Out(bottom.clone()), Vec::new());
    for (name, (sigma, k, _)) in &ann.symbols {
        input.insert_if_absent(Symbol::new(name.as_str(), sigma.rank()));
        let active = &ann.sets[*k];
        let mut r = SymbolRules::default();
        for (qi, q) in states.iter().enumerate() {
            let t = if active.contains(&qi) {
                let zeta = m.rhs(q.name(), sigma.name()).expect("total");
                top_with(zeta, &|j| param_attr_name(q.name(), j))
            } else {
                dummy()
            };
            r.syn.insert(q.name().to_string(), t);
        }
        let mut seen: HashSet<(Symbol, usize)> = HashSet::new();
        for &qv in active {
            let qv = &states[qv];
            let zeta = m.rhs(qv.name(), sigma.name()).expect("total");
            let mut order = Vec::new();
            postorder(zeta, Path::root(), &mut order);
            for (_, node) in order {
                let RhsLabel::Call(p, i) = node.label() else { continue };
                if !seen.insert((p.clone(), *i)) {
                    continue;
                }
                for (j, arg) in node.children().iter().enumerate() {
                    let t = top_with(arg, &|l| param_attr_name(qv.name(), l));
                    r.inh.insert((param_attr_name(p.name(), j + 1), *i), t);
                }
            }
        }
        for i in 1..=sigma.rank() {
            for b in &inh {
                r.inh.entry((b.clone(), i)).or_insert_with(dummy);
            }
        }
        rules.insert(name.clone(), r);
    }
    Ok(Att::new(AttParts {
        name: format!("{}_dynfv", m.name()),
        input,
        output: m.output().clone(),
        syn: states.iter().map(|q| q.name().to_string()).collect(),
        inh,
        root: m.initial().name().to_string(),
        rules,
    })?)
}

/// The state-annotating relabeling followed by its ATT.
pub fn dynfv_pipeline(m: &Mtt) -> Result<Pipeline, DynFvError> {
    let a = build_dynfv_att(m)?;
    Ok(Pipeline::new(vec![build_state_annotating_trel(m).into(), a.into()])?)
}

/// A final ATT is replaced by its equivalent consistent MTT.
fn split_pipeline(p: &Pipeline) -> Result<(Option<&Brel>, Option<&Trel>, Cow<'_, Mtt>), DynFvError> {
    let mut brel = None;
    let mut trel = None;
    let stages = p.stages();
    let (m, prefix) = match stages.split_last() {
        Some((Stage::Mtt(m), prefix)) => (Cow::Borrowed(m), prefix),
        Some((Stage::Att(a), prefix)) => (Cow::Owned(att_to_consistent_mtt(a)?), prefix),
        _ => return Err(DynFvError::Shape("the pipeline must end in an MTT or an ATT".into())),
    };
    for st in prefix {
        match st {
            Stage::Brel(b) if brel.is_none() && trel.is_none() => brel = Some(b),
            Stage::Trel(t) if trel.is_none() => trel = Some(t),
            other => {
                return Err(DynFvError::Shape(format!(
                    "expected at most one bottom-up then one top-down relabeling before the MTT, found {} {}",
                    other.kind(),
                    other.name()
                )))
            }
        }
    }
    Ok((brel, trel, m))
}

fn pair_name(a: &str, b: &str) -> String {
    format!("({a},{b})")
}

type PairSymbols = IndexMap<String, (Symbol, Symbol)>;

/// Bottom-up product over the reachable state pairs.
fn brel_product(b1: &Brel, b2: &Brel) -> Result<(Brel, PairSymbols), DynFvError> {
    let input = b1.input().clone();
    let mut pairs: IndexSet<(String, String)> = IndexSet::new();
    let mut done: HashSet<(String, Vec<usize>)> = HashSet::new();
    let mut rules = Vec::new();
    let mut symbols = PairSymbols::new();
    loop {
        let before = pairs.len();
        let known: Vec<(String, String)> = pairs.iter().cloned().collect();
        for sigma in input.iter() {
            if sigma.rank() > 0 && known.is_empty() {
                continue;
            }
            let mut err = None;
            crate::analysis::for_each_tuple(sigma.rank(), known.len(), |tuple| {
                if err.is_some() || !done.insert((sigma.name().to_string(), tuple.to_vec())) {
                    return;
                }
                let k1: Vec<&str> = tuple.iter().map(|&i| known[i].0.as_str()).collect();
                let k2: Vec<&str> = tuple.iter().map(|&i| known[i].1.as_str()).collect();
                let (Some((s1, o1)), Some((s2, o2))) = (b1.rule(sigma.name(), &k1), b2.rule(sigma.name(), &k2)) else {
                    err = Some(DynFvError::Shape(format!("no relabeling rule for {}", sigma.name())));
                    return;
                };
                let out = pair_name(o1.name(), o2.name());
                symbols.insert(out.clone(), (o1.clone(), o2.clone()));
                pairs.insert((s1.to_string(), s2.to_string()));
                rules.push(BrelRule {
                    symbol: sigma.name().to_string(),
                    children: tuple.iter().map(|&i| pair_name(&known[i].0, &known[i].1)).collect(),
                    state: pair_name(s1, s2),
                    output: out,
                });
            });
            if let Some(e) = err {
                return Err(e);
            }
        }
        if pairs.len() == before {
            break;
        }
    }
    let mut output = RankedAlphabet::new();
    for (name, (o1, _)) in &symbols {
        output.insert_if_absent(Symbol::new(name.as_str(), o1.rank()));
    }
    let states = pairs.iter().map(|(a, b)| pair_name(a, b)).collect();
    let b = Brel::new("convolution_lookahead", input, output, states, rules)?;
    Ok((b, symbols))
}

/// Name of the gadget relabeling's root state.
pub const TOP_STATE: &str = "@top";

/// Top-down product over the reachable state pairs. The root gets the fresh
/// state `@top`, which relabels like the initial pair but restarts both
/// relabelings at its children, so each child subtree is relabeled as a
/// whole input.
fn trel_product(t1: &Trel, t2: &Trel, input: &PairSymbols) -> Result<(Trel, PairSymbols), DynFvError> {
    let init = (t1.initial().to_string(), t2.initial().to_string());
    let mut pairs: IndexSet<(String, String)> = IndexSet::new();
    pairs.insert(init.clone());
    let mut in_alpha = RankedAlphabet::new();
    for (name, (o1, _)) in input {
        in_alpha.insert_if_absent(Symbol::new(name.as_str(), o1.rank()));
    }
    let mut symbols = PairSymbols::new();
    let mut rules = Vec::new();
    let mut k = 0;
    let mut step = |state: String, from: &(String, String), kids_override: bool, pairs: &mut IndexSet<(String, String)>| {
        let mut rs = Vec::new();
        for (name, (a1, a2)) in input {
            let (o1, c1) = t1.rule(&from.0, a1.name()).expect("total");
            let (o2, c2) = t2.rule(&from.1, a2.name()).expect("total");
            let out = pair_name(o1.name(), o2.name());
            symbols.insert(out.clone(), (o1.clone(), o2.clone()));
            let children = (0..a1.rank())
                .map(|i| {
                    let p = if kids_override { init.clone() } else { (c1[i].to_string(), c2[i].to_string()) };
                    let n = pair_name(&p.0, &p.1);
                    pairs.insert(p);
                    n
                })
                .collect();
            rs.push(TrelRule { state: state.clone(), symbol: name.clone(), output: out, children });
        }
        rs
    };
    rules.extend(step(TOP_STATE.to_string(), &init, true, &mut pairs));
    while k < pairs.len() {
        let p = pairs[k].clone();
        rules.extend(step(pair_name(&p.0, &p.1), &p, false, &mut pairs));
        k += 1;
    }
    let mut output = RankedAlphabet::new();
    for (name, (o1, _)) in &symbols {
        output.insert_if_absent(Symbol::new(name.as_str(), o1.rank()));
    }
    let mut states = vec![TOP_STATE.to_string()];
    states.extend(pairs.iter().map(|(a, b)| pair_name(a, b)));
    let t = Trel::new("convolution_states", in_alpha, output, states, TOP_STATE, rules)?;
    Ok((t, symbols))
}

fn prefixed(zeta: &Rhs, prefix: &str) -> Rhs {
    zeta.try_map(&|l: &RhsLabel| match l {
        RhsLabel::Call(p, i) => RhsLabel::Call(Symbol::new(format!("{prefix}{}", p.name()), p.rank()), *i),
        other => other.clone(),
    })
    .expect("ranks kept")
}

fn pick_symbol(output: &mut RankedAlphabet, name: &str, fresh: &str, rank: usize) -> Result<Symbol, DynFvError> {
    match output.get(name) {
        Some(s) if s.rank() == rank => Ok(s),
        _ => Ok(ensure_symbol(output, fresh, rank)?),
    }
}

/// Reduces equivalence of two relabeling-then-MTT pipelines to dynamic FV:
/// the returned MTT, read through the returned relabelings, has the dynamic
/// FV property iff both pipelines agree on every input (given that each has
/// it on its own). On a tree `a(t)` with `a` unary, the fresh state `q'` is
/// called at node 1 with the two translations of `t` as arguments.
pub fn equivalence_gadget(p1: &Pipeline, p2: &Pipeline) -> Result<(Pipeline, Mtt), DynFvError> {
    let (b1, t1, m1) = split_pipeline(p1)?;
    let (b2, t2, m2) = split_pipeline(p2)?;
    if !p1.input().same_symbols(p2.input()) {
        return Err(DynFvError::Shape(format!("different input alphabets {} and {}", p1.input(), p2.input())));
    }
    if p1.input().first_of_rank(1).is_none() {
        return Err(DynFvError::NoUnarySymbol);
    }
    let id1 = Brel::identity(p1.input());
    let id2 = Brel::identity(p2.input());
    let (brel, mut symbols) = brel_product(b1.unwrap_or(&id1), b2.unwrap_or(&id2))?;
    let mut stages: Vec<Stage> = vec![brel.into()];
    if t1.is_some() || t2.is_some() {
        let it1 = Trel::identity(b1.map_or(p1.input(), |b| b.output()));
        let it2 = Trel::identity(b2.map_or(p2.input(), |b| b.output()));
        let (trel, syms) = trel_product(t1.unwrap_or(&it1), t2.unwrap_or(&it2), &symbols)?;
        symbols = syms;
        stages.push(trel.into());
    }
    let relabeling = Pipeline::new(stages)?;

    let mut output = m1.output().clone();
    for d in m2.output().iter() {
        if let Some(old) = output.get(d.name()) {
            if old.rank() != d.rank() {
                return Err(DynFvError::Shape(format!("output symbol {} has two ranks", d.name())));
            }
        }
        output.insert_if_absent(d);
    }
    let e = pick_symbol(&mut output, "e", "@e", 0)?;
    let delta = pick_symbol(&mut output, "delta", "@delta", 2)?;

    let q0 = Symbol::new("q0", 0);
    let qp = Symbol::new("q'", 1);
    let l0 = Symbol::new(format!("L.{}", m1.initial().name()), 0);
    let r0 = Symbol::new(format!("R.{}", m2.initial().name()), 0);
    let mut states = RankedAlphabet::new();
    states.insert_if_absent(q0.clone());
    states.insert_if_absent(qp.clone());
    for q in m1.states().iter() {
        states.insert_if_absent(Symbol::new(format!("L.{}", q.name()), q.rank()));
    }
    for q in m2.states().iter() {
        states.insert_if_absent(Symbol::new(format!("R.{}", q.name()), q.rank()));
    }
    let mut input = RankedAlphabet::new();
    let mut rules = IndexMap::new();
    let call = |q: &Symbol, args: Vec<Rhs>| Term::node(RhsLabel::Call(q.clone(), 1), args);
    for (name, (a1, a2)) in &symbols {
        let sym = Symbol::new(name.as_str(), a1.rank());
        input.insert_if_absent(sym.clone());
        let top = if sym.rank() == 1 {
            Term::node(
                RhsLabel::Out(delta.clone()),
                vec![call(&qp, vec![call(&l0, vec![])]), call(&qp, vec![call(&r0, vec![])])],
            )
        } else {
            Term::node(RhsLabel::Out(e.clone()), Vec::new())
        };
        rules.insert(("q0".to_string(), name.clone()), top);
        rules.insert(("q'".to_string(), name.clone()), Term::node(RhsLabel::Param(1), Vec::new()));
        for q in m1.states().iter() {
            let zeta = m1.rhs(q.name(), a1.name()).expect("total");
            rules.insert((format!("L.{}", q.name()), name.clone()), prefixed(zeta, "L."));
        }
        for q in m2.states().iter() {
            let zeta = m2.rhs(q.name(), a2.name()).expect("total");
            rules.insert((format!("R.{}", q.name()), name.clone()), prefixed(zeta, "R."));
        }
    }
    let m = Mtt::new(MttParts {
        name: format!("gadget_{}_{}", m1.name(), m2.name()),
        input,
        output,
        states,
        initial: "q0".into(),
        rules,
    })?;
    Ok((relabeling, m))
}
