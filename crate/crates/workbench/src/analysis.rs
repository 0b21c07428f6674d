//! Static analyses of MTTs: parameter-occurrence profiles, importance, `Top`,
//! consistency, the FV property and permanence.

use std::fmt;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::att::{AttrLabel, AttrTree};
use crate::mtt::{calls_preorder, Mtt, Rhs, RhsLabel};
use crate::relabel::odometer;
use crate::tree::{Path, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("the MTT is deleting: state {state} drops y{param} in its rule for {symbol}")]
    Deleting { state: String, symbol: String, param: usize },
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("unknown input symbol {0}")]
    UnknownSymbol(String),
    #[error("{path} is not a node of the right-hand side")]
    InvalidPath { path: Path },
    #[error("parameter index {index} out of range for {state}/{rank}")]
    ParamRange { state: String, index: usize, rank: usize },
    #[error("invalid parameter renaming: {0}")]
    BadRenaming(String),
    #[error("state ranks above 64 are not supported")]
    RankTooLarge,
}

/// For each state, the set of its parameters that occur in `M_q(s)` for one input `s`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(Vec<u64>);

impl Profile {
    pub fn contains(&self, state: usize, j: usize) -> bool {
        j >= 1 && self.0[state] >> (j - 1) & 1 == 1
    }

    /// Parameter indices of one state, ascending.
    pub fn params(&self, state: usize) -> Vec<usize> {
        (1..=64).filter(|&j| self.contains(state, j)).collect()
    }

    pub fn mask(&self, state: usize) -> u64 {
        self.0[state]
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The reachable profiles of an MTT and the bottom-up transition table between them.
#[derive(Clone, Debug)]
pub struct Profiles {
    states: Vec<Symbol>,
    profiles: Vec<Profile>,
    transitions: IndexMap<(String, Vec<usize>), usize>,
}

impl Profiles {
    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn get(&self, i: usize) -> &Profile {
        &self.profiles[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Profile> {
        self.profiles.iter()
    }

    /// `h(σ, p_1..p_k)`; indices into [`Profiles::get`].
    pub fn transition(&self, sigma: &str, children: &[usize]) -> Option<usize> {
        self.transitions.get(&(sigma.to_string(), children.to_vec())).copied()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (&str, &[usize], usize)> {
        self.transitions.iter().map(|((s, c), p)| (s.as_str(), c.as_slice(), *p))
    }

    /// `{q:{1}, q1:{}}`, rank-0 states omitted.
    pub fn describe(&self, i: usize) -> String {
        let parts: Vec<String> = self
            .states
            .iter()
            .enumerate()
            .filter(|(_, q)| q.rank() > 0)
            .map(|(qi, q)| {
                let ps: Vec<String> = self.profiles[i].params(qi).iter().map(|j| j.to_string()).collect();
                format!("{}:{{{}}}", q, ps.join(","))
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Some reachable profile has `j ∈ p(q)` for every required `(q, j)`.
    pub fn satisfiable(&self, required: &[(usize, usize)]) -> bool {
        self.profiles.iter().any(|p| required.iter().all(|&(q, j)| p.contains(q, j)))
    }
}

/// Parameters of `rhs` that survive when the children have the given profiles.
fn occurrences(m: &Mtt, rhs: &Rhs, child: &[&Profile]) -> u64 {
    match rhs.label() {
        RhsLabel::Param(j) => 1 << (j - 1),
        RhsLabel::Out(_) => rhs.children().iter().fold(0, |acc, c| acc | occurrences(m, c, child)),
        RhsLabel::Call(p, i) => {
            let pi = m.state_index(p.name()).expect("validated");
            let mask = child[*i - 1].mask(pi);
            rhs.children()
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .fold(0, |acc, (_, c)| acc | occurrences(m, c, child))
        }
    }
}

fn profile_of(m: &Mtt, sigma: &Symbol, child: &[&Profile]) -> Profile {
    Profile(
        m.states()
            .iter()
            .map(|q| occurrences(m, m.rhs(q.name(), sigma.name()).expect("total"), child))
            .collect(),
    )
}

/// Least fixpoint of reachable profiles, discovered in round order, symbols in
/// declaration order and child tuples in odometer order.
pub fn occurrence_profiles(m: &Mtt) -> Result<Profiles, AnalysisError> {
    if m.states().max_rank() > 64 {
        return Err(AnalysisError::RankTooLarge);
    }
    let mut set: IndexSet<Profile> = IndexSet::new();
    loop {
        let before = set.len();
        let snapshot: Vec<Profile> = set.iter().cloned().collect();
        for sigma in m.input().iter() {
            for_each_tuple(sigma.rank(), snapshot.len(), |tuple| {
                let kids: Vec<&Profile> = tuple.iter().map(|&i| &snapshot[i]).collect();
                set.insert(profile_of(m, &sigma, &kids));
            });
        }
        if set.len() == before {
            break;
        }
    }
    let profiles: Vec<Profile> = set.iter().cloned().collect();
    let mut transitions = IndexMap::new();
    for sigma in m.input().iter() {
        for_each_tuple(sigma.rank(), profiles.len(), |tuple| {
            let kids: Vec<&Profile> = tuple.iter().map(|&i| &profiles[i]).collect();
            let p = set.get_index_of(&profile_of(m, &sigma, &kids)).expect("closed under transitions");
            transitions.insert((sigma.name().to_string(), tuple.to_vec()), p);
        });
    }
    Ok(Profiles { states: m.states().iter().collect(), profiles, transitions })
}

/// Calls `f` on every tuple in `[0,base)^k` in odometer order.
pub(crate) fn for_each_tuple(k: usize, base: usize, mut f: impl FnMut(&[usize])) {
    if k > 0 && base == 0 {
        return;
    }
    let mut tuple = vec![0; k];
    loop {
        f(&tuple);
        if !odometer(&mut tuple, base) {
            break;
        }
    }
}

/// Decides importance of rule positions from the reachable profiles.
#[derive(Clone, Debug)]
pub struct Importance<'a> {
    m: &'a Mtt,
    profiles: Profiles,
}

impl<'a> Importance<'a> {
    pub fn new(m: &'a Mtt) -> Result<Self, AnalysisError> {
        Ok(Importance { m, profiles: occurrence_profiles(m)? })
    }

    pub fn profiles(&self) -> &Profiles {
        &self.profiles
    }

    /// `v` survives for some choice of subtrees: for each child index, one
    /// reachable profile keeps every enclosing call argument of `v`.
    pub fn in_rhs(&self, rhs: &Rhs, v: &Path) -> bool {
        let mut required: IndexMap<usize, Vec<(usize, usize)>> = IndexMap::new();
        let mut node = rhs;
        for &step in v.steps() {
            if let RhsLabel::Call(p, i) = node.label() {
                let pi = self.m.state_index(p.name()).expect("validated");
                required.entry(*i).or_default().push((pi, step));
            }
            node = node.child(step).expect("valid path");
        }
        required.values().all(|req| self.profiles.satisfiable(req))
    }

    pub fn is_important(&self, q: &str, sigma: &str, v: &Path) -> Result<bool, AnalysisError> {
        let rhs = self.rule(q, sigma)?;
        if rhs.get(v).is_none() {
            return Err(AnalysisError::InvalidPath { path: v.clone() });
        }
        Ok(self.in_rhs(rhs, v))
    }

    fn rule(&self, q: &str, sigma: &str) -> Result<&'a Rhs, AnalysisError> {
        if self.m.state(q).is_none() {
            return Err(AnalysisError::UnknownState(q.into()));
        }
        self.m.rhs(q, sigma).ok_or_else(|| AnalysisError::UnknownSymbol(sigma.into()))
    }
}

pub fn is_important(m: &Mtt, q: &str, sigma: &str, v: &Path) -> Result<bool, AnalysisError> {
    Importance::new(m)?.is_important(q, sigma, v)
}

/// `Top`: calls become `q′(π i)`, parameters `y_j(π)`.
pub fn top(zeta: &Rhs) -> AttrTree {
    top_with(zeta, &|j| format!("y{j}"))
}

/// `Top` with a custom inherited-attribute name for each parameter index.
pub fn top_with(zeta: &Rhs, param_attr: &impl Fn(usize) -> String) -> AttrTree {
    match zeta.label() {
        RhsLabel::Call(q, i) => Term::node(AttrLabel::Syn(q.name_arc().clone(), *i), Vec::new()),
        RhsLabel::Param(j) => Term::node(AttrLabel::Inh(param_attr(*j).into(), 0), Vec::new()),
        RhsLabel::Out(d) => Term::node(
            AttrLabel::Out(d.clone()),
            zeta.children().iter().map(|c| top_with(c, param_attr)).collect(),
        ),
    }
}

/// Two co-indexed calls whose important `j`-th arguments have different tops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyViolation {
    pub symbol: String,
    pub q1: String,
    pub q2: String,
    pub w1: Path,
    pub w2: Path,
    pub j: usize,
    pub top1: AttrTree,
    pub top2: AttrTree,
}

impl fmt::Display for ConsistencyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "symbol {}: argument {} of the call at {} in rule ({},{}) has top {}, \
             but the call at {} in rule ({},{}) has top {}",
            self.symbol, self.j, self.w1, self.q1, self.symbol, self.top1, self.w2, self.q2, self.symbol, self.top2
        )
    }
}

/// First violation over symbols, then state pairs `q1 ≤ q2`, then call
/// positions in preorder, then argument index.
pub fn is_consistent(m: &Mtt) -> Result<Option<ConsistencyViolation>, AnalysisError> {
    let imp = Importance::new(m)?;
    let states: Vec<Symbol> = m.states().iter().collect();
    for sigma in m.input().iter() {
        for (a, q1) in states.iter().enumerate() {
            for q2 in &states[a..] {
                let z1 = m.rhs(q1.name(), sigma.name()).expect("total");
                let z2 = m.rhs(q2.name(), sigma.name()).expect("total");
                for (w1, c1) in calls_preorder(z1) {
                    for (w2, c2) in calls_preorder(z2) {
                        let (RhsLabel::Call(_, l1), RhsLabel::Call(_, l2)) = (c1.label(), c2.label()) else {
                            unreachable!()
                        };
                        if l1 != l2 {
                            continue;
                        }
                        for j in 1..=c1.children().len().min(c2.children().len()) {
                            if !imp.in_rhs(z1, &w1.child(j)) || !imp.in_rhs(z2, &w2.child(j)) {
                                continue;
                            }
                            let (t1, t2) = (top(&c1.children()[j - 1]), top(&c2.children()[j - 1]));
                            if t1 != t2 {
                                return Ok(Some(ConsistencyViolation {
                                    symbol: sigma.name().into(),
                                    q1: q1.name().into(),
                                    q2: q2.name().into(),
                                    w1: w1.clone(),
                                    w2: w2.clone(),
                                    j,
                                    top1: t1,
                                    top2: t2,
                                }));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// The renaming `ρ : Q × ℕ → ℕ`, kept in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParamRenaming {
    map: IndexMap<(String, usize), usize>,
}

impl ParamRenaming {
    pub fn new() -> Self {
        ParamRenaming::default()
    }

    /// `ρ(q, j) = f(q, j)` for every parameter of every state of `m`.
    pub fn from_fn(m: &Mtt, f: impl Fn(&Symbol, usize) -> usize) -> Self {
        let mut r = ParamRenaming::new();
        for q in m.states().iter() {
            for j in 1..=q.rank() {
                r.set(q.name(), j, f(&q, j));
            }
        }
        r
    }

    pub fn set(&mut self, q: &str, j: usize, v: usize) {
        self.map.insert((q.to_string(), j), v);
    }

    pub fn get(&self, q: &str, j: usize) -> Option<usize> {
        self.map.get(&(q.to_string(), j)).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, usize, usize)> {
        self.map.iter().map(|((q, j), v)| (q.as_str(), *j, *v))
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `m̃`, the largest target index (0 when empty).
    pub fn max_index(&self) -> usize {
        self.map.values().copied().max().unwrap_or(0)
    }

    /// Defined on every parameter of `m` and injective per state.
    pub fn check_complete(&self, m: &Mtt) -> Result<(), String> {
        for q in m.states().iter() {
            let mut seen = Vec::new();
            for j in 1..=q.rank() {
                let v = self.get(q.name(), j).ok_or_else(|| format!("no entry for {q} {j}"))?;
                if v == 0 {
                    return Err(format!("{q} {j} maps to 0"));
                }
                if seen.contains(&v) {
                    return Err(format!("two parameters of {q} map to {v}"));
                }
                seen.push(v);
            }
        }
        for (q, j, _) in self.entries() {
            match m.state(q) {
                Some(s) if j >= 1 && j <= s.rank() => {}
                _ => return Err(format!("entry {q} {j} does not name a parameter")),
            }
        }
        Ok(())
    }

    /// `Ψ^ρ_q`: renames `y_j` to `y_ρ(q,j)`.
    pub fn psi(&self, q: &str, t: &Rhs) -> Rhs {
        t.try_map(&|l: &RhsLabel| match l {
            RhsLabel::Param(j) => RhsLabel::Param(self.get(q, *j).expect("complete renaming")),
            other => other.clone(),
        })
        .expect("labels keep their arity")
    }
}

/// A pair of co-indexed calls that are not `~^{q1,q2}_ρ`-related.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FvViolation {
    pub symbol: String,
    pub q1: String,
    pub q2: String,
    pub w1: Path,
    pub w2: Path,
    pub j1: usize,
    pub j2: usize,
}

impl fmt::Display for FvViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "symbol {}: argument {} of the call at {} in rule ({},{}) and argument {} of the call at {} \
             in rule ({},{}) share an index but differ after renaming",
            self.symbol, self.j1, self.w1, self.q1, self.symbol, self.j2, self.w2, self.q2, self.symbol
        )
    }
}

/// First parameter dropped by some rule, if any.
pub fn deletion_witness(m: &Mtt) -> Option<AnalysisError> {
    for (q, s, rhs) in m.rules() {
        let labels = rhs.labels_preorder();
        for j in 1..=q.rank() {
            if !labels.iter().any(|l| **l == RhsLabel::Param(j)) {
                return Some(AnalysisError::Deleting { state: q.name().into(), symbol: s.name().into(), param: j });
            }
        }
    }
    None
}

fn require_nondeleting(m: &Mtt) -> Result<(), AnalysisError> {
    match deletion_witness(m) {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Pairs of co-indexed calls: (σ, q1, q2, w1, ξ1, w2, ξ2) with q1 ≤ q2 in
/// declaration order and, for q1 = q2, w1 ≤ w2 in preorder.
fn call_pairs(m: &Mtt) -> Vec<(Symbol, Symbol, Symbol, Path, &Rhs, Path, &Rhs)> {
    let states: Vec<Symbol> = m.states().iter().collect();
    let mut out = Vec::new();
    for sigma in m.input().iter() {
        for (a, q1) in states.iter().enumerate() {
            for q2 in &states[a..] {
                let c1 = calls_preorder(m.rhs(q1.name(), sigma.name()).expect("total"));
                let c2 = calls_preorder(m.rhs(q2.name(), sigma.name()).expect("total"));
                for (x, (w1, t1)) in c1.iter().enumerate() {
                    let start = if q1 == q2 { x } else { 0 };
                    for (w2, t2) in &c2[start..] {
                        let (RhsLabel::Call(_, l1), RhsLabel::Call(_, l2)) = (t1.label(), t2.label()) else {
                            unreachable!()
                        };
                        if l1 == l2 {
                            out.push((sigma.clone(), q1.clone(), q2.clone(), w1.clone(), *t1, w2.clone(), *t2));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Checks the FV property with `ρ`; `Ok(None)` when it holds.
pub fn check_fv(m: &Mtt, rho: &ParamRenaming) -> Result<Option<FvViolation>, AnalysisError> {
    require_nondeleting(m)?;
    rho.check_complete(m).map_err(AnalysisError::BadRenaming)?;
    for (sigma, q1, q2, w1, t1, w2, t2) in call_pairs(m) {
        let (RhsLabel::Call(p1, _), RhsLabel::Call(p2, _)) = (t1.label(), t2.label()) else { unreachable!() };
        for j1 in 1..=p1.rank() {
            for j2 in 1..=p2.rank() {
                if rho.get(p1.name(), j1) != rho.get(p2.name(), j2) {
                    continue;
                }
                let a = rho.psi(q1.name(), &t1.children()[j1 - 1]);
                let b = rho.psi(q2.name(), &t2.children()[j2 - 1]);
                if a != b {
                    return Ok(Some(FvViolation {
                        symbol: sigma.name().into(),
                        q1: q1.name().into(),
                        q2: q2.name().into(),
                        w1,
                        w2,
                        j1,
                        j2,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// `ρ(p1,j1) = ρ(p2,j2)` implies every listed equality between variables.
/// An unsatisfiable implication (`None`) forces the two sides apart.
struct Implication {
    lhs: (usize, usize),
    rhs: Option<Vec<(usize, usize)>>,
}

/// Matches two argument trees up to parameter indices, collecting the
/// parameter pairs that must be renamed alike.
fn align(a: &Rhs, b: &Rhs, out: &mut Vec<(usize, usize)>) -> bool {
    match (a.label(), b.label()) {
        (RhsLabel::Param(i), RhsLabel::Param(j)) => {
            out.push((*i, *j));
            true
        }
        (RhsLabel::Param(_), _) | (_, RhsLabel::Param(_)) => false,
        (la, lb) => la == lb && a.children().iter().zip(b.children()).all(|(x, y)| align(x, y, out)),
    }
}

/// Smallest-index search for a renaming under which `m` has the FV property.
/// Values range over `1..=total rank`; values are interchangeable, so each
/// variable only tries indices up to one above the largest used so far.
pub fn find_rho(m: &Mtt) -> Result<Option<ParamRenaming>, AnalysisError> {
    require_nondeleting(m)?;
    let mut vars: Vec<(Symbol, usize)> = Vec::new();
    let mut var_of: IndexMap<(String, usize), usize> = IndexMap::new();
    for q in m.states().iter() {
        for j in 1..=q.rank() {
            var_of.insert((q.name().to_string(), j), vars.len());
            vars.push((q.clone(), j));
        }
    }
    let var = |q: &Symbol, j: usize| var_of[&(q.name().to_string(), j)];
    let mut imps = Vec::new();
    for (_, q1, q2, _, t1, _, t2) in call_pairs(m) {
        let (RhsLabel::Call(p1, _), RhsLabel::Call(p2, _)) = (t1.label(), t2.label()) else { unreachable!() };
        for j1 in 1..=p1.rank() {
            for j2 in 1..=p2.rank() {
                let (v1, v2) = (var(p1, j1), var(p2, j2));
                let mut pairs = Vec::new();
                let rhs = align(&t1.children()[j1 - 1], &t2.children()[j2 - 1], &mut pairs).then(|| {
                    pairs.into_iter().map(|(a, b)| (var(&q1, a), var(&q2, b))).filter(|(x, y)| x != y).collect()
                });
                imps.push(Implication { lhs: (v1, v2), rhs });
            }
        }
    }
    // Constraints become checkable once their largest variable is assigned.
    let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); vars.len()];
    for (i, imp) in imps.iter().enumerate() {
        let mut last = imp.lhs.0.max(imp.lhs.1);
        for &(a, b) in imp.rhs.iter().flatten() {
            last = last.max(a).max(b);
        }
        by_var[last].push(i);
    }
    let same_state: Vec<Vec<usize>> = (0..vars.len())
        .map(|v| (0..v).filter(|&u| vars[u].0 == vars[v].0).collect())
        .collect();
    let cap = m.total_rank();
    let mut assign = vec![0usize; vars.len()];
    fn holds(imp: &Implication, a: &[usize]) -> bool {
        if a[imp.lhs.0] != a[imp.lhs.1] {
            return true;
        }
        match &imp.rhs {
            None => false,
            Some(eqs) => eqs.iter().all(|&(x, y)| a[x] == a[y]),
        }
    }
    fn search(
        v: usize,
        used: usize,
        cap: usize,
        assign: &mut Vec<usize>,
        imps: &[Implication],
        by_var: &[Vec<usize>],
        same_state: &[Vec<usize>],
    ) -> bool {
        if v == assign.len() {
            return true;
        }
        for val in 1..=(used + 1).min(cap) {
            if same_state[v].iter().any(|&u| assign[u] == val) {
                continue;
            }
            assign[v] = val;
            if by_var[v].iter().all(|&i| holds(&imps[i], assign))
                && search(v + 1, used.max(val), cap, assign, imps, by_var, same_state)
            {
                return true;
            }
        }
        assign[v] = 0;
        false
    }
    if !search(0, 0, cap, &mut assign, &imps, &by_var, &same_state) {
        return Ok(None);
    }
    let mut rho = ParamRenaming::new();
    for (i, (q, j)) in vars.iter().enumerate() {
        rho.set(q.name(), *j, assign[i]);
    }
    Ok(Some(rho))
}

/// Every call of `q` in every rule has an important `j`-th argument.
pub fn is_permanent(m: &Mtt, q: &str, j: usize) -> Result<bool, AnalysisError> {
    let state = m.state(q).ok_or_else(|| AnalysisError::UnknownState(q.into()))?;
    if j == 0 || j > state.rank() {
        return Err(AnalysisError::ParamRange { state: q.into(), index: j, rank: state.rank() });
    }
    let imp = Importance::new(m)?;
    for (_, _, rhs) in m.rules() {
        for (w, c) in calls_preorder(rhs) {
            if matches!(c.label(), RhsLabel::Call(p, _) if p.name() == q) && !imp.in_rhs(rhs, &w.child(j)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
