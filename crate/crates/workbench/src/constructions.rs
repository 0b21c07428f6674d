//! Transducer-to-transducer constructions: the consistent expansion of an
//! FV-MTT, its ATT, the reverse direction, the nondeleting and nonerasing
//! normal forms and the product of a top-down relabeling with an MTT.

use std::collections::HashMap;

use indexmap::IndexMap;
use thiserror::Error;

use crate::analysis::{
    check_fv, deletion_witness, occurrence_profiles, top, top_with, AnalysisError, FvViolation, Importance,
    ParamRenaming,
};
use crate::att::{format_cycle, Att, AttParts, AttValidationReport, AttrLabel, AttrTree, SymbolRules};
use crate::mtt::{calls_preorder, Mtt, MttParts, Rhs, RhsLabel, ValidationReport};
use crate::relabel::{Brel, BrelRule, RelabelError, Trel};
use crate::tree::{RankedAlphabet, Symbol, Term};

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("the output alphabet has no rank-0 symbol to use as the dummy")]
    NoNullaryOutput,
    #[error("output symbol {name} already exists with rank {found}, needed rank {needed}")]
    FreshSymbolClash { name: String, found: usize, needed: usize },
    #[error("the transducer is deleting: {0}")]
    Deleting(AnalysisError),
    #[error("the renaming is not an FV renaming: {0}")]
    NotFv(FvViolation),
    #[error("bad renaming: {0}")]
    BadRenaming(String),
    #[error("the ATT is circular on {input}: {cycle}")]
    Circular { input: String, cycle: String },
    #[error("conflicting rules for {attr}(pi {child}) at {symbol}: {first} vs {second}")]
    Conflict { symbol: String, attr: String, child: usize, first: String, second: String },
    #[error("alphabets do not chain: {0}")]
    AlphabetMismatch(String),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("constructed MTT is invalid: {0}")]
    InvalidMtt(#[from] ValidationReport),
    #[error("constructed ATT is invalid: {0}")]
    InvalidAtt(#[from] AttValidationReport),
    #[error(transparent)]
    Relabel(#[from] RelabelError),
}

/// The dummy output symbol: the first rank-0 output symbol.
pub fn bottom_symbol(output: &RankedAlphabet) -> Result<Symbol, ConstructionError> {
    output.first_of_rank(0).ok_or(ConstructionError::NoNullaryOutput)
}

/// Adds `name/rank` to `alphabet` unless present; fails if present with another rank.
pub(crate) fn ensure_symbol(alphabet: &mut RankedAlphabet, name: &str, rank: usize) -> Result<Symbol, ConstructionError> {
    match alphabet.get(name) {
        Some(s) if s.rank() == rank => Ok(s),
        Some(s) => Err(ConstructionError::FreshSymbolClash { name: name.into(), found: s.rank(), needed: rank }),
        None => {
            let s = Symbol::new(name, rank);
            alphabet.insert_if_absent(s.clone());
            Ok(s)
        }
    }
}

fn leaf<L: crate::tree::Label>(l: L) -> Term<L> {
    Term::node(l, Vec::new())
}

fn require_fv(m: &Mtt, rho: &ParamRenaming) -> Result<(), ConstructionError> {
    rho.check_complete(m).map_err(ConstructionError::BadRenaming)?;
    if let Some(e) = deletion_witness(m) {
        return Err(ConstructionError::Deleting(e));
    }
    match check_fv(m, rho)? {
        Some(v) => Err(ConstructionError::NotFv(v)),
        None => Ok(()),
    }
}

/// Pads the MTT to a consistent one: every state of nonzero rank gets rank `m̃`, parameter `y_j` of
/// `q` moves to slot `ρ(q,j)` and the unused slots of each call are filled
/// with the dummy.
pub fn expand_to_consistent(m: &Mtt, rho: &ParamRenaming) -> Result<Mtt, ConstructionError> {
    require_fv(m, rho)?;
    let bottom = bottom_symbol(m.output())?;
    let mt = rho.max_index();
    let promote = |q: &Symbol| if q.rank() == 0 { q.clone() } else { Symbol::new(q.name_arc().clone(), mt) };
    let states = RankedAlphabet::from_symbols(m.states().iter().map(|q| promote(&q))).expect("same names");

    fn e(zeta: &Rhs, q: &str, rho: &ParamRenaming, mt: usize, bottom: &Symbol, promote: &impl Fn(&Symbol) -> Symbol) -> Rhs {
        match zeta.label() {
            RhsLabel::Param(j) => leaf(RhsLabel::Param(rho.get(q, *j).expect("complete"))),
            RhsLabel::Out(d) => Term::node(
                RhsLabel::Out(d.clone()),
                zeta.children().iter().map(|c| e(c, q, rho, mt, bottom, promote)).collect(),
            ),
            RhsLabel::Call(p, i) if p.rank() == 0 => leaf(RhsLabel::Call(p.clone(), *i)),
            RhsLabel::Call(p, i) => {
                let mut slots = vec![leaf(RhsLabel::Out(bottom.clone())); mt];
                for (l, arg) in zeta.children().iter().enumerate() {
                    let j = rho.get(p.name(), l + 1).expect("complete");
                    slots[j - 1] = e(arg, q, rho, mt, bottom, promote);
                }
                Term::node(RhsLabel::Call(promote(p), *i), slots)
            }
        }
    }

    let rules = m
        .rules()
        .map(|(q, s, rhs)| ((q.name().to_string(), s.name().to_string()), e(rhs, q.name(), rho, mt, &bottom, &promote)))
        .collect();
    Ok(Mtt::new(MttParts {
        name: format!("{}_consistent", m.name()),
        input: m.input().clone(),
        output: m.output().clone(),
        states,
        initial: m.initial().name().to_string(),
        rules,
    })?)
}

fn conflict(symbol: &Symbol, attr: &str, child: usize, a: &AttrTree, b: &AttrTree) -> ConstructionError {
    ConstructionError::Conflict {
        symbol: symbol.name().into(),
        attr: attr.into(),
        child,
        first: a.to_string(),
        second: b.to_string(),
    }
}

fn define(
    rules: &mut SymbolRules,
    sigma: &Symbol,
    attr: &str,
    child: usize,
    t: AttrTree,
) -> Result<(), ConstructionError> {
    match rules.inh.get(&(attr.to_string(), child)) {
        Some(old) if *old != t => Err(conflict(sigma, attr, child, old, &t)),
        Some(_) => Ok(()),
        None => {
            rules.inh.insert((attr.to_string(), child), t);
            Ok(())
        }
    }
}

fn fill_dummies(rules: &mut SymbolRules, sigma: &Symbol, inh: &[String], bottom: &Symbol) {
    for i in 1..=sigma.rank() {
        for b in inh {
            rules.inh.entry((b.clone(), i)).or_insert_with(|| leaf(AttrLabel::Out(bottom.clone())));
        }
    }
}

fn build_att(
    name: String,
    m: &Mtt,
    inh: Vec<String>,
    rules: IndexMap<String, SymbolRules>,
) -> Result<Att, ConstructionError> {
    Ok(Att::new(AttParts {
        name,
        input: m.input().clone(),
        output: m.output().clone(),
        syn: m.states().iter().map(|q| q.name().to_string()).collect(),
        inh,
        root: m.initial().name().to_string(),
        rules,
    })?)
}

/// The ATT of a consistent MTT whose parameterized states all share the
/// rank `m̃`: states become synthesized attributes, the parameters become
/// inherited attributes `y1..ym̃`, and every important argument of a call
/// defines the inherited attribute of the called child.
pub fn omega(m: &Mtt) -> Result<Att, ConstructionError> {
    let bottom = bottom_symbol(m.output())?;
    let mt = m.states().iter().map(|q| q.rank()).max().unwrap_or(0);
    let inh: Vec<String> = (1..=mt).map(|j| format!("y{j}")).collect();
    let imp = Importance::new(m)?;
    let mut rules = IndexMap::new();
    for sigma in m.input().iter() {
        let mut r = SymbolRules::default();
        for q in m.states().iter() {
            let zeta = m.rhs(q.name(), sigma.name()).expect("total");
            r.syn.insert(q.name().to_string(), top(zeta));
            for (v, call) in calls_preorder(zeta) {
                let RhsLabel::Call(_, i) = call.label() else { unreachable!() };
                for (j, arg) in call.children().iter().enumerate() {
                    if imp.in_rhs(zeta, &v.child(j + 1)) {
                        define(&mut r, &sigma, &inh[j], *i, top(arg))?;
                    }
                }
            }
        }
        fill_dummies(&mut r, &sigma, &inh, &bottom);
        rules.insert(sigma.name().to_string(), r);
    }
    build_att(format!("{}_att", m.name()), m, inh, rules)
}

/// The ATT built directly from a nondeleting FV-MTT: parameter `y_j` of
/// `q` is read from the inherited attribute `y<ρ(q,j)>`.
pub fn omega_direct(m: &Mtt, rho: &ParamRenaming) -> Result<Att, ConstructionError> {
    require_fv(m, rho)?;
    let bottom = bottom_symbol(m.output())?;
    let mut range: Vec<usize> = rho.entries().map(|(_, _, v)| v).collect();
    range.sort_unstable();
    range.dedup();
    let attr = |l: usize| format!("y{l}");
    let inh: Vec<String> = range.iter().map(|&l| attr(l)).collect();
    let mut rules = IndexMap::new();
    for sigma in m.input().iter() {
        let mut r = SymbolRules::default();
        for q in m.states().iter() {
            let zeta = m.rhs(q.name(), sigma.name()).expect("total");
            let top_q = |t: &Rhs| top_with(t, &|j| attr(rho.get(q.name(), j).expect("complete")));
            r.syn.insert(q.name().to_string(), top_q(zeta));
            for (_, call) in calls_preorder(zeta) {
                let RhsLabel::Call(p, i) = call.label() else { unreachable!() };
                for (j, arg) in call.children().iter().enumerate() {
                    let l = rho.get(p.name(), j + 1).expect("complete");
                    define(&mut r, &sigma, &attr(l), *i, top_q(arg))?;
                }
            }
        }
        fill_dummies(&mut r, &sigma, &inh, &bottom);
        rules.insert(sigma.name().to_string(), r);
    }
    build_att(format!("{}_att", m.name()), m, inh, rules)
}

/// Pads the MTT and turns it into an ATT, checked to be non-circular.
pub fn fv_to_att(m: &Mtt, rho: &ParamRenaming) -> Result<Att, ConstructionError> {
    let a = omega(&expand_to_consistent(m, rho)?)?;
    if let Some(w) = a.is_circular() {
        return Err(ConstructionError::Circular { input: w.input.to_string(), cycle: format_cycle(&w.cycle) });
    }
    Ok(a)
}

/// Name of the fresh initial state used when the ATT has inherited attributes.
pub const INIT_STATE: &str = "@init";

/// A consistent MTT equivalent to a non-circular ATT: each synthesized
/// attribute becomes a state with one parameter per inherited attribute.
/// Inherited references are inlined; an inherited instance met again while
/// it is being expanded cannot be demanded in a non-circular ATT and becomes
/// the dummy.
pub fn att_to_consistent_mtt(a: &Att) -> Result<Mtt, ConstructionError> {
    if let Some(w) = a.is_circular() {
        return Err(ConstructionError::Circular { input: w.input.to_string(), cycle: format_cycle(&w.cycle) });
    }
    let n = a.inh().len();
    let bottom = if n > 0 { Some(bottom_symbol(a.output())?) } else { None };
    let state = |name: &str| Symbol::new(name, n);
    let mut states = RankedAlphabet::new();
    for s in a.syn() {
        states.insert(state(s)).map_err(|e| ConstructionError::AlphabetMismatch(e.to_string()))?;
    }
    let initial = if n > 0 {
        states
            .insert(Symbol::new(INIT_STATE, 0))
            .map_err(|e| ConstructionError::AlphabetMismatch(e.to_string()))?;
        INIT_STATE.to_string()
    } else {
        a.root().to_string()
    };

    struct Inline<'a> {
        a: &'a Att,
        sigma: &'a str,
        bottom: Option<&'a Symbol>,
        root_params: bool,
        stack: Vec<(usize, usize)>,
    }
    impl Inline<'_> {
        fn dummy(&self) -> Rhs {
            leaf(RhsLabel::Out(self.bottom.expect("inherited attributes exist").clone()))
        }
        fn go(&mut self, t: &AttrTree) -> Rhs {
            match t.label() {
                AttrLabel::Out(d) => Term::node(RhsLabel::Out(d.clone()), t.children().iter().map(|c| self.go(c)).collect()),
                AttrLabel::Inh(b, _) => {
                    if self.root_params {
                        return self.dummy();
                    }
                    let j = self.a.inh().iter().position(|x| **x == **b).expect("validated");
                    leaf(RhsLabel::Param(j + 1))
                }
                AttrLabel::Syn(al, i) => {
                    let n = self.a.inh().len();
                    let mut args = Vec::with_capacity(n);
                    for j in 0..n {
                        if self.stack.contains(&(j, *i)) {
                            args.push(self.dummy());
                            continue;
                        }
                        let rule = self.a.inh_rule(self.sigma, &self.a.inh()[j], *i).expect("total").clone();
                        self.stack.push((j, *i));
                        args.push(self.go(&rule));
                        self.stack.pop();
                    }
                    Term::node(RhsLabel::Call(Symbol::new(al.clone(), n), *i), args)
                }
            }
        }
    }

    let mut rules = IndexMap::new();
    for sigma in a.input().iter() {
        let mut inl = Inline { a, sigma: sigma.name(), bottom: bottom.as_ref(), root_params: false, stack: Vec::new() };
        for s in a.syn() {
            let t = a.syn_rule(sigma.name(), s).expect("total");
            rules.insert((s.clone(), sigma.name().to_string()), inl.go(t));
        }
        if n > 0 {
            inl.root_params = true;
            let t = a.syn_rule(sigma.name(), a.root()).expect("total");
            rules.insert((INIT_STATE.to_string(), sigma.name().to_string()), inl.go(t));
        }
    }
    Ok(Mtt::new(MttParts {
        name: format!("{}_mtt", a.name()),
        input: a.input().clone(),
        output: a.output().clone(),
        states,
        initial,
        rules,
    })?)
}

/// A look-ahead relabeling together with the MTT that reads its output.
#[derive(Clone, Debug)]
pub struct NormalFormResult {
    pub lookahead: Brel,
    pub core: Mtt,
    /// `ρ((q,I),j) = I(j)` for the nondeleting form.
    pub renaming: Option<ParamRenaming>,
}

impl NormalFormResult {
    pub fn pipeline(&self) -> crate::relabel::Pipeline {
        crate::relabel::Pipeline::new(vec![self.lookahead.clone().into(), self.core.clone().into()])
            .expect("alphabets chain")
    }
}

/// `[σ,p1,…,pk]`; nullary symbols keep their own name.
pub fn annotated_name(sigma: &str, parts: &[String]) -> String {
    if parts.is_empty() {
        sigma.to_string()
    } else {
        format!("[{},{}]", sigma, parts.join(","))
    }
}

/// `q.{i1,i2}` with sorted 1-based indices.
pub fn subset_state_name(q: &str, set: &[usize]) -> String {
    let ix: Vec<String> = set.iter().map(|i| i.to_string()).collect();
    format!("{q}.{{{}}}", ix.join(","))
}

/// Annotated input symbols: one per input symbol and tuple of child
/// annotations, in declaration and odometer order.
struct Annotation {
    alphabet: RankedAlphabet,
    /// annotated name -> (original symbol, child annotations, own annotation)
    table: IndexMap<String, (Symbol, Vec<usize>, usize)>,
}

fn annotate(
    input: &RankedAlphabet,
    n: usize,
    label: impl Fn(usize) -> String,
    mut h: impl FnMut(&Symbol, &[usize]) -> Option<usize>,
) -> Annotation {
    let mut alphabet = RankedAlphabet::new();
    let mut table = IndexMap::new();
    for sigma in input.iter() {
        crate::analysis::for_each_tuple(sigma.rank(), n, |tuple| {
            if let Some(p) = h(&sigma, tuple) {
                let parts: Vec<String> = tuple.iter().map(|&i| label(i)).collect();
                let name = annotated_name(sigma.name(), &parts);
                alphabet.insert_if_absent(Symbol::new(name.as_str(), sigma.rank()));
                table.insert(name, (sigma.clone(), tuple.to_vec(), p));
            }
        });
    }
    Annotation { alphabet, table }
}

fn lookahead_brel(
    name: String,
    input: &RankedAlphabet,
    ann: &Annotation,
    states: Vec<String>,
) -> Result<Brel, ConstructionError> {
    let rules = ann
        .table
        .iter()
        .map(|(out, (sigma, kids, p))| BrelRule {
            symbol: sigma.name().to_string(),
            children: kids.iter().map(|&k| states[k].clone()).collect(),
            state: states[*p].clone(),
            output: out.clone(),
        })
        .collect();
    Ok(Brel::new(name, input.clone(), ann.alphabet.clone(), states, rules)?)
}

fn subsets(m: usize) -> Vec<Vec<usize>> {
    (0u64..(1 << m))
        .map(|mask| (1..=m).filter(|j| mask & (1 << (j - 1)) != 0).collect())
        .collect()
}

/// Nondeleting normal form: a bottom-up relabeling annotates each node with
/// the parameter-occurrence profiles of its children, and the core MTT with
/// states `q.{I}` keeps only the parameters that will actually occur.
pub fn nondeleting_nf(m: &Mtt) -> Result<NormalFormResult, ConstructionError> {
    let profiles = occurrence_profiles(m)?;
    let pname = |i: usize| format!("p{}", i + 1);
    let ann = annotate(m.input(), profiles.len(), pname, |s, t| profiles.transition(s.name(), t));
    let brel_states: Vec<String> = (0..profiles.len()).map(pname).collect();
    let lookahead = lookahead_brel(format!("{}_lookahead", m.name()), m.input(), &ann, brel_states)?;

    let mut output = m.output().clone();
    let max_rank = m.states().max_rank();
    let d = if max_rank > 1 { Some(ensure_symbol(&mut output, "@d", 2)?) } else { None };
    let bottom = bottom_symbol(m.output()).ok();

    let mut states = RankedAlphabet::new();
    let mut renaming = ParamRenaming::new();
    for q in m.states().iter() {
        for set in subsets(q.rank()) {
            let name = subset_state_name(q.name(), &set);
            for (j, &i) in set.iter().enumerate() {
                renaming.set(&name, j + 1, i);
            }
            states.insert(Symbol::new(name.as_str(), set.len())).map_err(|e| ConstructionError::AlphabetMismatch(e.to_string()))?;
        }
    }

    let state_set = |p: usize, q: &Symbol| -> Vec<usize> {
        let qi = m.state_index(q.name()).expect("state");
        profiles.get(p).params(qi)
    };

    let mut rules = IndexMap::new();
    for (aname, (sigma, kids, p0)) in &ann.table {
        for q in m.states().iter() {
            let qi = m.state_index(q.name()).expect("state");
            let own = profiles.get(*p0).params(qi);
            for set in subsets(q.rank()) {
                let name = subset_state_name(q.name(), &set);
                let rhs = if set == own {
                    let zeta = m.rhs(q.name(), sigma.name()).expect("total");
                    let theta = theta_profiles(zeta, &|r: &Symbol, i: usize| state_set(kids[i - 1], r));
                    rename_params(&theta, &set)
                } else {
                    dummy_rhs(set.len(), bottom.as_ref(), d.as_ref())?
                };
                rules.insert((name, aname.clone()), rhs);
            }
        }
    }
    let core = Mtt::new(MttParts {
        name: format!("{}_nondeleting", m.name()),
        input: ann.alphabet.clone(),
        output,
        states,
        initial: subset_state_name(m.initial().name(), &[]),
        rules,
    })?;
    Ok(NormalFormResult { lookahead, core, renaming: Some(renaming) })
}

fn dummy_rhs(k: usize, bottom: Option<&Symbol>, d: Option<&Symbol>) -> Result<Rhs, ConstructionError> {
    Ok(match k {
        0 => leaf(RhsLabel::Out(bottom.ok_or(ConstructionError::NoNullaryOutput)?.clone())),
        1 => leaf(RhsLabel::Param(1)),
        _ => {
            let d = d.expect("added when some rank exceeds 1");
            let mut t = leaf(RhsLabel::Param(k));
            for j in (1..k).rev() {
                t = Term::node(RhsLabel::Out(d.clone()), vec![leaf(RhsLabel::Param(j)), t]);
            }
            t
        }
    })
}

/// `Θ_p`: a call `⟨r,x_i⟩(ζ1..ζm)` becomes `⟨r.{I},x_i⟩(ζ_{I(1)},…)` with `I`
/// the parameters of `r` occurring below child `i`.
fn theta_profiles(zeta: &Rhs, occurring: &impl Fn(&Symbol, usize) -> Vec<usize>) -> Rhs {
    match zeta.label() {
        RhsLabel::Call(r, i) => {
            let set = occurring(r, *i);
            let args = set.iter().map(|&j| theta_profiles(&zeta.children()[j - 1], occurring)).collect();
            Term::node(RhsLabel::Call(Symbol::new(subset_state_name(r.name(), &set), set.len()), *i), args)
        }
        l => Term::node(l.clone(), zeta.children().iter().map(|c| theta_profiles(c, occurring)).collect()),
    }
}

/// `θ_I`: `y_{I(j)}` becomes `y_j`.
fn rename_params(zeta: &Rhs, set: &[usize]) -> Rhs {
    zeta.try_map(&|l: &RhsLabel| match l {
        RhsLabel::Param(i) => RhsLabel::Param(set.iter().position(|x| x == i).expect("occurring parameter") + 1),
        other => other.clone(),
    })
    .expect("labels keep their arity")
}

/// `{q1,q2}` in state declaration order.
pub fn state_set_name(m: &Mtt, set: &[usize]) -> String {
    let names: Vec<String> = set
        .iter()
        .map(|&i| m.states().iter().nth(i).expect("state").name().to_string())
        .collect();
    format!("{{{}}}", names.join(","))
}

/// Normal form without erasing rules: a bottom-up relabeling records which
/// rank-1 states erase (return their parameter) on each subtree, and calls
/// of those states are inlined away. Rules that would still be a bare `y1`
/// output the fresh symbol `@erase(y1)` instead.
pub fn nonerasing_nf(m: &Mtt) -> Result<NormalFormResult, ConstructionError> {
    if let Some(e) = deletion_witness(m) {
        return Err(ConstructionError::Deleting(e));
    }
    let nq = m.states().len();
    let state_names: Vec<Symbol> = m.states().iter().collect();
    // Reachable erasing sets, as sorted state-index vectors.
    let mut sets: IndexMap<Vec<usize>, ()> = IndexMap::new();
    let mut trans: HashMap<(String, Vec<usize>), usize> = HashMap::new();
    let erasing = |sigma: &Symbol, kids: &[Vec<usize>]| -> Vec<usize> {
        (0..nq)
            .filter(|&qi| {
                let zeta = m.rhs(state_names[qi].name(), sigma.name()).expect("total");
                let t = theta_erasing(zeta, &|r: &Symbol, i: usize| kids[i - 1].contains(&m.state_index(r.name()).expect("state")));
                matches!(t.label(), RhsLabel::Param(_))
            })
            .collect()
    };
    loop {
        let before = sets.len();
        let known: Vec<Vec<usize>> = sets.keys().cloned().collect();
        for sigma in m.input().iter() {
            let base = known.len();
            if sigma.rank() > 0 && base == 0 {
                continue;
            }
            crate::analysis::for_each_tuple(sigma.rank(), base, |tuple| {
                let key = (sigma.name().to_string(), tuple.to_vec());
                if trans.contains_key(&key) {
                    return;
                }
                let kids: Vec<Vec<usize>> = tuple.iter().map(|&i| known[i].clone()).collect();
                let p = erasing(&sigma, &kids);
                let (idx, _) = sets.insert_full(p, ());
                trans.insert(key, idx);
            });
        }
        if sets.len() == before {
            break;
        }
    }
    let set_list: Vec<Vec<usize>> = sets.keys().cloned().collect();
    let labels: Vec<String> = set_list.iter().map(|s| state_set_name(m, s)).collect();
    let ann = annotate(m.input(), set_list.len(), |i| labels[i].clone(), |s, t| {
        trans.get(&(s.name().to_string(), t.to_vec())).copied()
    });
    let lookahead = lookahead_brel(format!("{}_lookahead", m.name()), m.input(), &ann, labels.clone())?;

    let mut output = m.output().clone();
    let erase = ensure_symbol(&mut output, "@erase", 1)?;
    let mut rules = IndexMap::new();
    for (aname, (sigma, kids, _)) in &ann.table {
        for q in m.states().iter() {
            let zeta = m.rhs(q.name(), sigma.name()).expect("total");
            let t = theta_erasing(zeta, &|r: &Symbol, i: usize| {
                set_list[kids[i - 1]].contains(&m.state_index(r.name()).expect("state"))
            });
            let t = if matches!(t.label(), RhsLabel::Param(_)) {
                Term::node(RhsLabel::Out(erase.clone()), vec![t])
            } else {
                t
            };
            rules.insert((q.name().to_string(), aname.clone()), t);
        }
    }
    let core = Mtt::new(MttParts {
        name: format!("{}_nonerasing", m.name()),
        input: ann.alphabet.clone(),
        output,
        states: m.states().clone(),
        initial: m.initial().name().to_string(),
        rules,
    })?;
    Ok(NormalFormResult { lookahead, core, renaming: None })
}

/// `Θ`: a call `⟨r,x_i⟩(t)` of a state erasing on child `i` becomes `t`.
fn theta_erasing(zeta: &Rhs, erases: &impl Fn(&Symbol, usize) -> bool) -> Rhs {
    match zeta.label() {
        RhsLabel::Call(r, i) if r.rank() == 1 && erases(r, *i) => theta_erasing(&zeta.children()[0], erases),
        l => Term::node(l.clone(), zeta.children().iter().map(|c| theta_erasing(c, erases)).collect()),
    }
}

/// `r.q`
pub fn product_state_name(r: &str, q: &str) -> String {
    format!("{r}.{q}")
}

/// An MTT equivalent to running the top-down relabeling `e` and then `m`.
pub fn trel_mtt_product(e: &Trel, m: &Mtt) -> Result<Mtt, ConstructionError> {
    if !e.output().is_subset_of(m.input()) {
        return Err(ConstructionError::AlphabetMismatch(format!(
            "relabeling output {} is not part of the MTT input {}",
            e.output(),
            m.input()
        )));
    }
    let mut states = RankedAlphabet::new();
    for r in e.states() {
        for q in m.states().iter() {
            states
                .insert(Symbol::new(product_state_name(r, q.name()), q.rank()))
                .map_err(|err| ConstructionError::AlphabetMismatch(err.to_string()))?;
        }
    }
    let mut rules = IndexMap::new();
    for r in e.states() {
        for sigma in e.input().iter() {
            let (target, kids) = e.rule(r, sigma.name()).expect("total");
            for q in m.states().iter() {
                let zeta = m.rhs(q.name(), target.name()).expect("total");
                let t = zeta
                    .try_map(&|l: &RhsLabel| match l {
                        RhsLabel::Call(p, i) => {
                            RhsLabel::Call(Symbol::new(product_state_name(kids[*i - 1], p.name()), p.rank()), *i)
                        }
                        other => other.clone(),
                    })
                    .expect("ranks kept");
                rules.insert((product_state_name(r, q.name()), sigma.name().to_string()), t);
            }
        }
    }
    Ok(Mtt::new(MttParts {
        name: format!("{}_{}", e.name(), m.name()),
        input: e.input().clone(),
        output: m.output().clone(),
        states,
        initial: product_state_name(e.initial(), m.initial().name()),
        rules,
    })?)
}
