//! Macro tree transducers: definition, validation and semantics.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::syntax::write_name;
use crate::tree::{is_reserved_name, Label, Path, RankedAlphabet, Symbol, Term, Tree, TreeError};

/// Variable index used by state calls on the context hole `x`.
pub const HOLE: usize = 0;

/// Node labels of right-hand sides.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsLabel {
    Out(Symbol),
    /// The parameter leaf `y_j`.
    Param(usize),
    /// The state call `⟨q, x_i⟩`; the symbol carries the state's rank.
    /// `i == HOLE` stands for the context hole `x`.
    Call(Symbol, usize),
}

pub type Rhs = Term<RhsLabel>;

impl Label for RhsLabel {
    fn arity(&self) -> usize {
        match self {
            RhsLabel::Out(s) | RhsLabel::Call(s, _) => s.rank(),
            RhsLabel::Param(_) => 0,
        }
    }

    fn param_index(&self) -> Option<usize> {
        match self {
            RhsLabel::Param(j) => Some(*j),
            _ => None,
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RhsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsLabel::Out(s) => write!(f, "{s}"),
            RhsLabel::Param(j) => write!(f, "y{j}"),
            RhsLabel::Call(q, HOLE) => write!(f, "{q}[x]"),
            RhsLabel::Call(q, i) => write!(f, "{q}[x{i}]"),
        }
    }
}

impl fmt::Debug for RhsLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn rhs_out(sym: Symbol, children: Vec<Rhs>) -> Result<Rhs, TreeError> {
    Rhs::new(RhsLabel::Out(sym), children)
}

pub fn rhs_param(j: usize) -> Rhs {
    Term::node(RhsLabel::Param(j), Vec::new())
}

pub fn rhs_call(state: Symbol, var: usize, args: Vec<Rhs>) -> Result<Rhs, TreeError> {
    Rhs::new(RhsLabel::Call(state, var), args)
}

/// Lifts a ground tree into a right-hand side.
pub fn rhs_from_tree(t: &Tree) -> Rhs {
    Term::node(
        RhsLabel::Out(t.label().clone()),
        t.children().iter().map(rhs_from_tree).collect(),
    )
}

/// Lowers a right-hand side over output symbols only; `None` if it contains
/// parameters or calls.
pub fn rhs_to_tree(r: &Rhs) -> Option<Tree> {
    match r.label() {
        RhsLabel::Out(s) => {
            let kids = r.children().iter().map(rhs_to_tree).collect::<Option<Vec<_>>>()?;
            Some(Term::node(s.clone(), kids))
        }
        _ => None,
    }
}

/// Lowers a right-hand side to a tree over output symbols and `y<j>` leaves.
pub fn rhs_to_param_tree(r: &Rhs) -> Option<Tree> {
    match r.label() {
        RhsLabel::Out(s) => {
            let kids = r.children().iter().map(rhs_to_param_tree).collect::<Option<Vec<_>>>()?;
            Some(Term::node(s.clone(), kids))
        }
        RhsLabel::Param(j) => Some(Tree::param(*j)),
        RhsLabel::Call(..) => None,
    }
}

/// Every call node of `r` in preorder, with its address.
pub fn calls_preorder(r: &Rhs) -> Vec<(Path, &Rhs)> {
    r.preorder()
        .into_iter()
        .filter(|(_, t)| matches!(t.label(), RhsLabel::Call(..)))
        .collect()
}

/// Unvalidated MTT components; see [`validate_mtt`] and [`Mtt::new`].
#[derive(Clone, Debug)]
pub struct MttParts {
    pub name: String,
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
    pub states: RankedAlphabet,
    pub initial: String,
    /// Keyed by (state name, input symbol name).
    pub rules: IndexMap<(String, String), Rhs>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MttViolation {
    InitialUndeclared(String),
    InitialRank { state: String, rank: usize },
    MissingRule { state: String, symbol: String },
    UnknownRuleState { state: String, symbol: String },
    UnknownRuleSymbol { state: String, symbol: String },
    UnknownOutput { state: String, symbol: String, name: String },
    UnknownCallState { state: String, symbol: String, name: String },
    RankMismatch { state: String, symbol: String, name: String },
    ParameterRange { state: String, symbol: String, param: usize, rank: usize },
    VariableRange { state: String, symbol: String, var: usize, rank: usize },
    ReservedName(String),
    Overlap(String),
}

impl fmt::Display for MttViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use MttViolation::*;
        match self {
            InitialUndeclared(q) => write!(f, "initial state {q} is not declared"),
            InitialRank { state, rank } => write!(f, "initial state {state} has rank {rank}, expected 0"),
            MissingRule { state, symbol } => write!(f, "missing rule ({state},{symbol})"),
            UnknownRuleState { state, symbol } => write!(f, "rule ({state},{symbol}) names an undeclared state"),
            UnknownRuleSymbol { state, symbol } => write!(f, "rule ({state},{symbol}) names an undeclared input symbol"),
            UnknownOutput { state, symbol, name } => {
                write!(f, "rule ({state},{symbol}) uses undeclared output symbol {name}")
            }
            UnknownCallState { state, symbol, name } => {
                write!(f, "rule ({state},{symbol}) calls undeclared state {name}")
            }
            RankMismatch { state, symbol, name } => {
                write!(f, "rule ({state},{symbol}) uses {name} with the wrong rank")
            }
            ParameterRange { state, symbol, param, rank } => write!(
                f,
                "rule ({state},{symbol}) uses parameter y{param} but {state} has rank {rank}"
            ),
            VariableRange { state, symbol, var, rank } => write!(
                f,
                "rule ({state},{symbol}) uses variable x{var} but {symbol} has rank {rank}"
            ),
            ReservedName(n) => write!(f, "symbol name {n} is reserved"),
            Overlap(n) => write!(f, "{n} is declared both as input and output symbol with different ranks"),
        }
    }
}

/// Empty iff the MTT is well formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<MttViolation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
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

impl std::error::Error for ValidationReport {}

pub fn validate_mtt(m: &MttParts) -> ValidationReport {
    use MttViolation::*;
    let mut v = Vec::new();
    for s in m.input.iter().chain(m.output.iter()) {
        if is_reserved_name(s.name()) {
            v.push(ReservedName(s.name().to_string()));
        }
    }
    match m.states.get(&m.initial) {
        None => v.push(InitialUndeclared(m.initial.clone())),
        Some(q) if q.rank() != 0 => v.push(InitialRank { state: q.name().to_string(), rank: q.rank() }),
        _ => {}
    }
    for q in m.states.iter() {
        for sigma in m.input.iter() {
            let key = (q.name().to_string(), sigma.name().to_string());
            match m.rules.get(&key) {
                None => v.push(MissingRule { state: key.0, symbol: key.1 }),
                Some(rhs) => check_rhs(m, &q, &sigma, rhs, &mut v),
            }
        }
    }
    for (state, symbol) in m.rules.keys() {
        if !m.states.contains_name(state) {
            v.push(UnknownRuleState { state: state.clone(), symbol: symbol.clone() });
        } else if !m.input.contains_name(symbol) {
            v.push(UnknownRuleSymbol { state: state.clone(), symbol: symbol.clone() });
        }
    }
    ValidationReport { violations: v }
}

fn check_rhs(m: &MttParts, q: &Symbol, sigma: &Symbol, rhs: &Rhs, v: &mut Vec<MttViolation>) {
    use MttViolation::*;
    let (state, symbol) = (q.name().to_string(), sigma.name().to_string());
    for (_, node) in rhs.preorder() {
        match node.label() {
            RhsLabel::Out(s) => match m.output.get(s.name()) {
                None => v.push(UnknownOutput { state: state.clone(), symbol: symbol.clone(), name: s.name().into() }),
                Some(d) if d.rank() != s.rank() => {
                    v.push(RankMismatch { state: state.clone(), symbol: symbol.clone(), name: s.name().into() })
                }
                _ => {}
            },
            RhsLabel::Param(j) => {
                if *j == 0 || *j > q.rank() {
                    v.push(ParameterRange { state: state.clone(), symbol: symbol.clone(), param: *j, rank: q.rank() });
                }
            }
            RhsLabel::Call(p, i) => {
                match m.states.get(p.name()) {
                    None => v.push(UnknownCallState {
                        state: state.clone(),
                        symbol: symbol.clone(),
                        name: p.name().into(),
                    }),
                    Some(d) if d.rank() != p.rank() => {
                        v.push(RankMismatch { state: state.clone(), symbol: symbol.clone(), name: p.name().into() })
                    }
                    _ => {}
                }
                if *i == HOLE || *i > sigma.rank() {
                    v.push(VariableRange { state: state.clone(), symbol: symbol.clone(), var: *i, rank: sigma.rank() });
                }
            }
        }
    }
}

/// A validated total deterministic MTT.
#[derive(Clone)]
pub struct Mtt {
    parts: MttParts,
    /// `table[state][symbol]`, both in declaration order.
    table: Vec<Vec<Rhs>>,
    state_index: HashMap<Arc<str>, usize>,
}

impl Mtt {
    pub fn new(parts: MttParts) -> Result<Mtt, ValidationReport> {
        let report = validate_mtt(&parts);
        if !report.is_empty() {
            return Err(report);
        }
        let mut table = Vec::with_capacity(parts.states.len());
        let mut state_index = HashMap::new();
        for (qi, q) in parts.states.iter().enumerate() {
            state_index.insert(q.name_arc().clone(), qi);
            let row = parts
                .input
                .iter()
                .map(|s| parts.rules[&(q.name().to_string(), s.name().to_string())].clone())
                .collect();
            table.push(row);
        }
        Ok(Mtt { parts, table, state_index })
    }

    pub fn parts(&self) -> &MttParts {
        &self.parts
    }

    pub fn into_parts(self) -> MttParts {
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

    pub fn states(&self) -> &RankedAlphabet {
        &self.parts.states
    }

    pub fn initial(&self) -> Symbol {
        self.parts.states.get(&self.parts.initial).expect("validated")
    }

    pub fn state(&self, name: &str) -> Option<Symbol> {
        self.parts.states.get(name)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_index.get(name).copied()
    }

    /// The rule right-hand side for `(q, σ)`.
    pub fn rhs(&self, q: &str, sigma: &str) -> Option<&Rhs> {
        let qi = self.state_index(q)?;
        let si = self.parts.input.index_of(sigma)?;
        Some(&self.table[qi][si])
    }

    fn rhs_idx(&self, qi: usize, sigma: &Symbol) -> &Rhs {
        let si = self
            .parts
            .input
            .index_of(sigma.name())
            .unwrap_or_else(|| panic!("input symbol {sigma:?} not in the alphabet of {}", self.name()));
        &self.table[qi][si]
    }

    /// All rules in (state, symbol) declaration order.
    pub fn rules(&self) -> impl Iterator<Item = (Symbol, Symbol, &Rhs)> + '_ {
        self.parts.states.iter().enumerate().flat_map(move |(qi, q)| {
            self.parts
                .input
                .iter()
                .enumerate()
                .map(move |(si, s)| (q.clone(), s, &self.table[qi][si]))
        })
    }

    /// Sum of all state ranks.
    pub fn total_rank(&self) -> usize {
        self.parts.states.iter().map(|q| q.rank()).sum()
    }

    /// `M_q(s)`: a tree over the output alphabet and `y_1..y_rank(q)`.
    pub fn state_semantics(&self, q: &str, s: &Tree) -> Rhs {
        let qi = self.state_index(q).unwrap_or_else(|| panic!("unknown state {q}"));
        Evaluator::new(self, None).state(qi, s)
    }

    /// `M_q0(s)`.
    pub fn translate(&self, s: &Tree) -> Tree {
        let q0 = self.state_index(&self.parts.initial).expect("validated");
        let r = Evaluator::new(self, None).state(q0, s);
        rhs_to_tree(&r).expect("the initial state has rank 0")
    }

    /// `M_q0(s[u←x])` where `M_q(x) = ⟨q,x⟩(y_1,…,y_m)`.
    pub fn context_semantics(&self, s: &Tree, u: &Path) -> Result<Rhs, TreeError> {
        let hole = s.subtree(u)?;
        let q0 = self.state_index(&self.parts.initial).expect("validated");
        Ok(Evaluator::new(self, Some(hole)).state(q0, s))
    }

    /// `M_q(s[u←x])` for an arbitrary start state `q`.
    pub fn context_semantics_from(&self, q: &str, s: &Tree, u: &Path) -> Result<Rhs, TreeError> {
        let hole = s.subtree(u)?;
        let qi = self.state_index(q).unwrap_or_else(|| panic!("unknown state {q}"));
        Ok(Evaluator::new(self, Some(hole)).state(qi, s))
    }

    /// Replaces every `⟨q′,x⟩` in `t` by `M_q′(s_u)`, second-order.
    pub fn evaluate_hole_calls(&self, t: &Rhs, s_u: &Tree) -> Rhs {
        let mut ev = Evaluator::new(self, None);
        ev.fill_hole(t, s_u)
    }

    /// [`Mtt::evaluate_hole_calls`] on several trees, sharing one memo table.
    pub fn evaluate_hole_calls_all<'t>(&self, ts: impl IntoIterator<Item = &'t Rhs>, s_u: &Tree) -> Vec<Rhs> {
        let mut ev = Evaluator::new(self, None);
        ts.into_iter().map(|t| ev.fill_hole(t, s_u)).collect()
    }

    /// Every parameter of every state occurs in each of its rules.
    pub fn is_nondeleting(&self) -> bool {
        self.rules().all(|(q, _, rhs)| {
            let mut seen = vec![false; q.rank()];
            for l in rhs.labels_preorder() {
                if let RhsLabel::Param(j) = l {
                    seen[j - 1] = true;
                }
            }
            seen.into_iter().all(|b| b)
        })
    }

    /// No rule right-hand side is a bare parameter.
    pub fn is_nonerasing(&self) -> bool {
        self.rules().all(|(_, _, rhs)| !matches!(rhs.label(), RhsLabel::Param(_)))
    }

    /// The same rules read over a new input alphabet: the rule for `(q, σ′)`
    /// is the original rule for `(q, project(σ′))`.
    pub fn with_input_relabeled(
        &self,
        name: impl Into<String>,
        input: RankedAlphabet,
        project: impl Fn(&Symbol) -> Symbol,
    ) -> Result<Mtt, ValidationReport> {
        let mut rules = IndexMap::new();
        for q in self.states().iter() {
            for s in input.iter() {
                let orig = project(&s);
                if orig.rank() != s.rank() {
                    return Err(ValidationReport {
                        violations: vec![MttViolation::RankMismatch {
                            state: q.name().into(),
                            symbol: s.name().into(),
                            name: orig.name().into(),
                        }],
                    });
                }
                let rhs = self.rhs(q.name(), orig.name()).cloned().ok_or_else(|| ValidationReport {
                    violations: vec![MttViolation::MissingRule { state: q.name().into(), symbol: orig.name().into() }],
                })?;
                rules.insert((q.name().to_string(), s.name().to_string()), rhs);
            }
        }
        Mtt::new(MttParts {
            name: name.into(),
            input,
            output: self.output().clone(),
            states: self.states().clone(),
            initial: self.parts.initial.clone(),
            rules,
        })
    }

    /// Renames every state through `f`, which must be injective.
    pub fn rename_states(&self, name: impl Into<String>, f: impl Fn(&str) -> String) -> Mtt {
        let rename = |q: &Symbol| Symbol::new(f(q.name()), q.rank());
        let states = RankedAlphabet::from_symbols(self.states().iter().map(|q| rename(&q)))
            .expect("state renaming must be injective");
        let rules = self
            .rules()
            .map(|(q, s, rhs)| {
                let r = rhs.try_map(&|l: &RhsLabel| match l {
                    RhsLabel::Call(p, i) => RhsLabel::Call(rename(p), *i),
                    other => other.clone(),
                });
                ((f(q.name()), s.name().to_string()), r.expect("renaming keeps ranks"))
            })
            .collect();
        Mtt::new(MttParts {
            name: name.into(),
            input: self.input().clone(),
            output: self.output().clone(),
            states,
            initial: f(&self.parts.initial),
            rules,
        })
        .expect("renaming preserves validity")
    }
}

impl fmt::Debug for Mtt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mtt({})", self.name())
    }
}

/// Memoized structural recursion, private to one call.
struct Evaluator<'a> {
    m: &'a Mtt,
    hole: Option<*const Tree>,
    memo: HashMap<(usize, *const Tree), Rhs>,
}

impl<'a> Evaluator<'a> {
    fn new(m: &'a Mtt, hole: Option<&Tree>) -> Self {
        Evaluator { m, hole: hole.map(|h| h as *const Tree), memo: HashMap::new() }
    }

    fn state(&mut self, qi: usize, s: &Tree) -> Rhs {
        let key = (qi, s as *const Tree);
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let r = if self.hole == Some(key.1) {
            let q = self.m.parts.states.iter().nth(qi).expect("state index");
            let params = (1..=q.rank()).map(rhs_param).collect();
            Term::node(RhsLabel::Call(q, HOLE), params)
        } else {
            let rhs = self.m.rhs_idx(qi, s.label());
            self.instantiate(rhs, s)
        };
        self.memo.insert(key, r.clone());
        r
    }

    fn instantiate(&mut self, r: &Rhs, s: &Tree) -> Rhs {
        match r.label() {
            RhsLabel::Call(p, i) => {
                let args: Vec<Rhs> = r.children().iter().map(|c| self.instantiate(c, s)).collect();
                let child = s.child(*i).expect("validated variable index");
                let qi = self.m.state_index(p.name()).expect("validated call");
                self.state(qi, child).instantiate_params(&args)
            }
            RhsLabel::Param(_) => r.clone(),
            RhsLabel::Out(_) => Term::node(
                r.label().clone(),
                r.children().iter().map(|c| self.instantiate(c, s)).collect(),
            ),
        }
    }

    fn fill_hole(&mut self, t: &Rhs, s_u: &Tree) -> Rhs {
        let kids: Vec<Rhs> = t.children().iter().map(|c| self.fill_hole(c, s_u)).collect();
        match t.label() {
            RhsLabel::Call(q, HOLE) => {
                let qi = self.m.state_index(q.name()).expect("known state");
                self.state(qi, s_u).instantiate_params(&kids)
            }
            l => Term::node(l.clone(), kids),
        }
    }
}

/// Writes `q[x1]`-style labels; used by the formatter.
pub(crate) fn write_call(f: &mut impl fmt::Write, q: &str, i: usize) -> fmt::Result {
    write_name(f, q)?;
    if i == HOLE {
        f.write_str("[x]")
    } else {
        write!(f, "[x{i}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_mtt;
    use crate::samples;
    use crate::tree::{all_trees, SecondOrderSubstitution};

    fn tree(m: &Mtt, s: &str) -> Tree {
        crate::syntax::parse_tree(s, m.input()).unwrap()
    }

    #[test]
    fn abcd_translation() {
        let m = samples::abcd();
        assert!(validate_mtt(m.parts()).is_empty());
        assert_eq!(m.translate(&tree(&m, "#(a(a(e)))")).to_string(), "a(a(b(b(c(c(d(d(e))))))))");
        assert_eq!(m.translate(&tree(&m, "#(e)")).to_string(), "e");
        assert_eq!(m.translate(&tree(&m, "#(a(e))")).to_string(), "a(b(c(d(e))))");
        assert_eq!(m.state_semantics("q1", &tree(&m, "e")).to_string(), "y1");
        assert_eq!(m.state_semantics("q1", &tree(&m, "a(e)")).to_string(), "a(b(y1))");
    }

    #[test]
    fn twin_translation() {
        let m = samples::twin_args();
        assert_eq!(m.state_semantics("q2", &tree(&m, "a(e)")).to_string(), "a(a(e))");
        assert_eq!(
            m.translate(&tree(&m, "a(a(a(e)))")).to_string(),
            "f(a(a(b(b(a(a(a(a(e)))))))),a(a(b(b(a(a(a(a(e)))))))))"
        );
    }

    #[test]
    fn validation_reports() {
        let mut parts = samples::abcd().into_parts();
        parts.rules.shift_remove(&("q1".to_string(), "e".to_string()));
        let report = validate_mtt(&parts);
        assert_eq!(report.to_string(), "missing rule (q1,e)");

        let bad = parse_mtt(
            "mtt bad { input { a/1 e/0 } output { e/0 b/1 } states { q0/0 q/1 }
               initial q0
               rule q0 a(x1) -> q[x1](e)  rule q0 e -> e
               rule q a(x1)(y1) -> b(y2)  rule q e(y1) -> y1 }",
        );
        let report = match bad {
            Err(crate::format::FormatError::Invalid(r)) => r,
            other => panic!("expected a validation failure, got {other:?}"),
        };
        assert!(matches!(
            report.violations.as_slice(),
            [MttViolation::ParameterRange { param: 2, rank: 1, .. }]
        ));
    }

    #[test]
    fn context_semantics_examples() {
        let m = samples::twin_args();
        let s = tree(&m, "a(a(e))");
        assert_eq!(
            m.context_semantics(&s, &"1".parse().unwrap()).unwrap().to_string(),
            "f(q1[x](q2[x]),q1[x](q3[x](e)))"
        );
        assert_eq!(m.context_semantics(&s, &Path::root()).unwrap().to_string(), "q0[x]");
        let a = samples::abcd();
        assert_eq!(
            a.context_semantics(&tree(&a, "#(e)"), &"1".parse().unwrap()).unwrap().to_string(),
            "q1[x](q2[x](e))"
        );
    }

    #[test]
    fn deletion_and_erasure() {
        assert!(samples::abcd().is_nondeleting());
        assert!(!samples::abcd_padded().is_nondeleting());
        assert!(!samples::deleting().is_nondeleting());
        assert!(!samples::abcd().is_nonerasing());
        let wrapped = parse_mtt(
            "mtt w { input { a/1 e/0 } output { f/2 a/1 b/1 e/0 } states { q0/0 q1/1 q2/0 q3/1 }
               initial q0
               rule q0 a(x1) -> f(q1[x1](q2[x1]), q1[x1](q3[x1](e)))
               rule q1 a(x1)(y1) -> a(q1[x1](b(y1)))
               rule q2 a(x1) -> a(a(q2[x1]))
               rule q3 a(x1)(y1) -> a(q3[x1](a(y1)))
               rule q0 e -> e  rule q2 e -> e
               rule q1 e(y1) -> b(y1)  rule q3 e(y1) -> b(y1) }",
        )
        .unwrap();
        assert!(wrapped.is_nonerasing());
        let flat = parse_mtt(
            "mtt c { input { a/1 e/0 } output { e/0 } states { q0/0 } initial q0
               rule q0 a(x1) -> q0[x1]  rule q0 e -> e }",
        )
        .unwrap();
        assert!(flat.is_nonerasing());
    }

    /// Unmemoized semantics written with the generic second-order substitution.
    fn naive(m: &Mtt, q: &str, s: &Tree) -> Rhs {
        let rhs = m.rhs(q, s.label().name()).unwrap();
        let mut sub = SecondOrderSubstitution::new();
        for (_, c) in calls_preorder(rhs) {
            if let RhsLabel::Call(p, i) = c.label() {
                let v = naive(m, p.name(), s.child(*i).unwrap());
                sub.bind(c.label().clone(), v).unwrap();
            }
        }
        rhs.subst_second_order(&sub)
    }

    #[test]
    fn memoized_equals_naive() {
        for m in samples::all_mtts() {
            for s in all_trees(m.input(), 5).unwrap() {
                for q in m.states().iter() {
                    assert_eq!(m.state_semantics(q.name(), &s), naive(&m, q.name(), &s), "{} {q:?} {s}", m.name());
                }
            }
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let m = samples::binary_blowup();
        for s in all_trees(m.input(), 5).unwrap() {
            assert_eq!(m.translate(&s), m.translate(&s));
        }
    }
}
