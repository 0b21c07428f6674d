//! Deterministic bottom-up and top-down finite-state relabelings, and
//! pipelines of stages.

use std::collections::HashMap;
use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::att::{Att, AttEvalError};
use crate::mtt::Mtt;
use crate::tree::{RankedAlphabet, Symbol, Term, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelabelError {
    #[error("undeclared state {0}")]
    UnknownState(String),
    #[error("undeclared symbol {0}")]
    UnknownSymbol(String),
    #[error("rule for {symbol} relabels to {target} of a different rank")]
    RankChange { symbol: String, target: String },
    #[error("missing rule for {0}")]
    Missing(String),
    #[error("duplicate rule for {0}")]
    Duplicate(String),
    #[error("wrong number of child states in the rule for {0}")]
    ChildCount(String),
}

/// One bottom-up rule `σ(p1(x1),…,pk(xk)) → p(σ′(x1,…,xk))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrelRule {
    pub symbol: String,
    pub children: Vec<String>,
    pub state: String,
    pub output: String,
}

/// Deterministic total bottom-up relabeling; every state is final.
#[derive(Clone)]
pub struct Brel {
    name: String,
    input: RankedAlphabet,
    output: RankedAlphabet,
    states: IndexSet<String>,
    rules: HashMap<(usize, Vec<usize>), (usize, Symbol)>,
    order: Vec<(usize, Vec<usize>)>,
}

impl Brel {
    pub fn new(
        name: impl Into<String>,
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: Vec<String>,
        rules: Vec<BrelRule>,
    ) -> Result<Brel, RelabelError> {
        let states: IndexSet<String> = states.into_iter().collect();
        let st = |n: &str| states.get_index_of(n).ok_or_else(|| RelabelError::UnknownState(n.to_string()));
        let mut table = HashMap::new();
        let mut order = Vec::new();
        for r in rules {
            let si = input.index_of(&r.symbol).ok_or_else(|| RelabelError::UnknownSymbol(r.symbol.clone()))?;
            let sym = input.iter().nth(si).expect("index");
            if r.children.len() != sym.rank() {
                return Err(RelabelError::ChildCount(r.symbol));
            }
            let out = output.get(&r.output).ok_or_else(|| RelabelError::UnknownSymbol(r.output.clone()))?;
            if out.rank() != sym.rank() {
                return Err(RelabelError::RankChange { symbol: r.symbol, target: r.output });
            }
            let kids = r.children.iter().map(|c| st(c)).collect::<Result<Vec<_>, _>>()?;
            let key = (si, kids);
            if table.insert(key.clone(), (st(&r.state)?, out)).is_some() {
                return Err(RelabelError::Duplicate(format!("{}({})", r.symbol, r.children.join(","))));
            }
            order.push(key);
        }
        for (si, sym) in input.iter().enumerate() {
            let mut tuple = vec![0; sym.rank()];
            loop {
                if !table.contains_key(&(si, tuple.clone())) {
                    if states.is_empty() && sym.rank() > 0 {
                        break;
                    }
                    let names: Vec<&str> = tuple.iter().map(|&i| states[i].as_str()).collect();
                    return Err(RelabelError::Missing(format!("{}({})", sym.name(), names.join(","))));
                }
                if !odometer(&mut tuple, states.len()) {
                    break;
                }
            }
        }
        Ok(Brel { name: name.into(), input, output, states, rules: table, order })
    }

    /// One state; every symbol relabels to itself.
    pub fn identity(alphabet: &RankedAlphabet) -> Brel {
        let rules = alphabet
            .iter()
            .map(|s| BrelRule {
                symbol: s.name().into(),
                children: vec!["p".into(); s.rank()],
                state: "p".into(),
                output: s.name().into(),
            })
            .collect();
        Brel::new("identity", alphabet.clone(), alphabet.clone(), vec!["p".into()], rules).expect("identity is total")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.input
    }

    pub fn output(&self) -> &RankedAlphabet {
        &self.output
    }

    pub fn states(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(String::as_str)
    }

    /// Rules in the order they were given.
    pub fn rules(&self) -> Vec<BrelRule> {
        self.order
            .iter()
            .map(|key| {
                let (p, out) = &self.rules[key];
                BrelRule {
                    symbol: self.input.iter().nth(key.0).expect("index").name().into(),
                    children: key.1.iter().map(|&i| self.states[i].clone()).collect(),
                    state: self.states[*p].clone(),
                    output: out.name().into(),
                }
            })
            .collect()
    }

    /// Target state and symbol for `σ` over the given child states.
    pub fn rule(&self, symbol: &str, children: &[&str]) -> Option<(&str, &Symbol)> {
        let si = self.input.index_of(symbol)?;
        let kids = children.iter().map(|c| self.states.get_index_of(*c)).collect::<Option<Vec<_>>>()?;
        self.rules.get(&(si, kids)).map(|(p, s)| (self.states[*p].as_str(), s))
    }

    /// The relabeled tree and the state reached at the root.
    pub fn apply(&self, s: &Tree) -> (Tree, String) {
        let (t, p) = self.run(s);
        (t, self.states[p].clone())
    }

    fn run(&self, s: &Tree) -> (Tree, usize) {
        let (kids, states): (Vec<Tree>, Vec<usize>) = s.children().iter().map(|c| self.run(c)).unzip();
        let si = self
            .input
            .index_of(s.label().name())
            .unwrap_or_else(|| panic!("input symbol {:?} not in the alphabet of {}", s.label(), self.name));
        let (p, out) = &self.rules[&(si, states)];
        (Term::node(out.clone(), kids), *p)
    }
}

impl fmt::Debug for Brel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Brel({})", self.name)
    }
}

pub(crate) fn odometer(tuple: &mut [usize], base: usize) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if tuple[i] < base {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

/// One top-down rule `q(σ(x1,…,xk)) → σ′(q1(x1),…,qk(xk))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrelRule {
    pub state: String,
    pub symbol: String,
    pub output: String,
    pub children: Vec<String>,
}

/// Deterministic total top-down relabeling.
#[derive(Clone)]
pub struct Trel {
    name: String,
    input: RankedAlphabet,
    output: RankedAlphabet,
    states: IndexSet<String>,
    initial: usize,
    rules: HashMap<(usize, usize), (Symbol, Vec<usize>)>,
    order: Vec<(usize, usize)>,
}

impl Trel {
    pub fn new(
        name: impl Into<String>,
        input: RankedAlphabet,
        output: RankedAlphabet,
        states: Vec<String>,
        initial: &str,
        rules: Vec<TrelRule>,
    ) -> Result<Trel, RelabelError> {
        let states: IndexSet<String> = states.into_iter().collect();
        let st = |n: &str| states.get_index_of(n).ok_or_else(|| RelabelError::UnknownState(n.to_string()));
        let initial = st(initial)?;
        let mut table = HashMap::new();
        let mut order = Vec::new();
        for r in rules {
            let si = input.index_of(&r.symbol).ok_or_else(|| RelabelError::UnknownSymbol(r.symbol.clone()))?;
            let sym = input.iter().nth(si).expect("index");
            let out = output.get(&r.output).ok_or_else(|| RelabelError::UnknownSymbol(r.output.clone()))?;
            if out.rank() != sym.rank() {
                return Err(RelabelError::RankChange { symbol: r.symbol, target: r.output });
            }
            if r.children.len() != sym.rank() {
                return Err(RelabelError::ChildCount(r.symbol));
            }
            let kids = r.children.iter().map(|c| st(c)).collect::<Result<Vec<_>, _>>()?;
            let key = (st(&r.state)?, si);
            if table.insert(key, (out, kids)).is_some() {
                return Err(RelabelError::Duplicate(format!("{} {}", r.state, r.symbol)));
            }
            order.push(key);
        }
        for q in 0..states.len() {
            for (si, sym) in input.iter().enumerate() {
                if !table.contains_key(&(q, si)) {
                    return Err(RelabelError::Missing(format!("{} {}", states[q], sym.name())));
                }
            }
        }
        Ok(Trel { name: name.into(), input, output, states, initial, rules: table, order })
    }

    pub fn identity(alphabet: &RankedAlphabet) -> Trel {
        let rules = alphabet
            .iter()
            .map(|s| TrelRule {
                state: "r".into(),
                symbol: s.name().into(),
                output: s.name().into(),
                children: vec!["r".into(); s.rank()],
            })
            .collect();
        Trel::new("identity", alphabet.clone(), alphabet.clone(), vec!["r".into()], "r", rules)
            .expect("identity is total")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input(&self) -> &RankedAlphabet {
        &self.input
    }

    pub fn output(&self) -> &RankedAlphabet {
        &self.output
    }

    pub fn states(&self) -> impl Iterator<Item = &str> {
        self.states.iter().map(String::as_str)
    }

    pub fn initial(&self) -> &str {
        &self.states[self.initial]
    }

    pub fn rules(&self) -> Vec<TrelRule> {
        self.order
            .iter()
            .map(|key| {
                let (out, kids) = &self.rules[key];
                TrelRule {
                    state: self.states[key.0].clone(),
                    symbol: self.input.iter().nth(key.1).expect("index").name().into(),
                    output: out.name().into(),
                    children: kids.iter().map(|&i| self.states[i].clone()).collect(),
                }
            })
            .collect()
    }

    /// Output symbol and child states for `(q, σ)`.
    pub fn rule(&self, state: &str, symbol: &str) -> Option<(&Symbol, Vec<&str>)> {
        let q = self.states.get_index_of(state)?;
        let si = self.input.index_of(symbol)?;
        self.rules
            .get(&(q, si))
            .map(|(s, kids)| (s, kids.iter().map(|&i| self.states[i].as_str()).collect()))
    }

    pub fn apply(&self, s: &Tree) -> Tree {
        self.apply_from(self.initial(), s)
    }

    /// The run starting in `state` instead of the initial state.
    pub fn apply_from(&self, state: &str, s: &Tree) -> Tree {
        let q = self.states.get_index_of(state).unwrap_or_else(|| panic!("unknown state {state}"));
        self.run(q, s)
    }

    fn run(&self, q: usize, s: &Tree) -> Tree {
        let si = self
            .input
            .index_of(s.label().name())
            .unwrap_or_else(|| panic!("input symbol {:?} not in the alphabet of {}", s.label(), self.name));
        let (out, kids) = &self.rules[&(q, si)];
        let children = s.children().iter().zip(kids).map(|(c, &qi)| self.run(qi, c)).collect();
        Term::node(out.clone(), children)
    }
}

impl fmt::Debug for Trel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Trel({})", self.name)
    }
}

#[derive(Clone, Debug)]
pub enum Stage {
    Brel(Brel),
    Trel(Trel),
    Mtt(Mtt),
    Att(Att),
}

impl Stage {
    pub fn input(&self) -> &RankedAlphabet {
        match self {
            Stage::Brel(b) => b.input(),
            Stage::Trel(t) => t.input(),
            Stage::Mtt(m) => m.input(),
            Stage::Att(a) => a.input(),
        }
    }

    pub fn output(&self) -> &RankedAlphabet {
        match self {
            Stage::Brel(b) => b.output(),
            Stage::Trel(t) => t.output(),
            Stage::Mtt(m) => m.output(),
            Stage::Att(a) => a.output(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Stage::Brel(b) => b.name(),
            Stage::Trel(t) => t.name(),
            Stage::Mtt(m) => m.name(),
            Stage::Att(a) => a.name(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Stage::Brel(_) => "brel",
            Stage::Trel(_) => "trel",
            Stage::Mtt(_) => "mtt",
            Stage::Att(_) => "att",
        }
    }

    pub fn is_relabeling(&self) -> bool {
        matches!(self, Stage::Brel(_) | Stage::Trel(_))
    }

    pub fn apply(&self, s: &Tree) -> Result<Tree, AttEvalError> {
        Ok(match self {
            Stage::Brel(b) => b.apply(s).0,
            Stage::Trel(t) => t.apply(s),
            Stage::Mtt(m) => m.translate(s),
            Stage::Att(a) => a.evaluate(s)?,
        })
    }
}

impl From<Brel> for Stage {
    fn from(b: Brel) -> Stage {
        Stage::Brel(b)
    }
}

impl From<Trel> for Stage {
    fn from(t: Trel) -> Stage {
        Stage::Trel(t)
    }
}

impl From<Mtt> for Stage {
    fn from(m: Mtt) -> Stage {
        Stage::Mtt(m)
    }
}

impl From<Att> for Stage {
    fn from(a: Att) -> Stage {
        Stage::Att(a)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("stage {index} ({name}) produces symbol {symbol} that the next stage does not accept")]
    Incompatible { index: usize, name: String, symbol: String },
    #[error("input {0} is not a tree over the pipeline's input alphabet")]
    ForeignInput(String),
    #[error("stage {index} ({name}) failed: {error}")]
    Stage { index: usize, name: String, error: AttEvalError },
}

/// Stages applied left to right.
#[derive(Clone, Debug, Default)]
pub struct Pipeline {
    stages: Vec<Stage>,
    /// Input alphabet of an empty pipeline.
    identity_alphabet: Option<RankedAlphabet>,
}

impl Pipeline {
    pub fn new(stages: Vec<Stage>) -> Result<Pipeline, PipelineError> {
        for (i, w) in stages.windows(2).enumerate() {
            if let Some(s) = w[0].output().iter().find(|s| !w[1].input().contains(s)) {
                return Err(PipelineError::Incompatible {
                    index: i,
                    name: w[0].name().into(),
                    symbol: s.name().into(),
                });
            }
        }
        Ok(Pipeline { stages, identity_alphabet: None })
    }

    /// The empty pipeline over an alphabet.
    pub fn identity(alphabet: RankedAlphabet) -> Pipeline {
        Pipeline { stages: Vec::new(), identity_alphabet: Some(alphabet) }
    }

    pub fn single(stage: impl Into<Stage>) -> Pipeline {
        Pipeline { stages: vec![stage.into()], identity_alphabet: None }
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn into_stages(self) -> Vec<Stage> {
        self.stages
    }

    pub fn input(&self) -> &RankedAlphabet {
        match self.stages.first() {
            Some(s) => s.input(),
            None => self.identity_alphabet.as_ref().expect("empty pipelines carry an alphabet"),
        }
    }

    pub fn output(&self) -> &RankedAlphabet {
        match self.stages.last() {
            Some(s) => s.output(),
            None => self.input(),
        }
    }

    pub fn accepts(&self, s: &Tree) -> bool {
        s.labels_preorder().iter().all(|l| self.input().contains(l))
    }

    pub fn apply(&self, s: &Tree) -> Result<Tree, PipelineError> {
        if !self.accepts(s) {
            return Err(PipelineError::ForeignInput(s.to_string()));
        }
        let mut t = s.clone();
        for (index, stage) in self.stages.iter().enumerate() {
            t = stage.apply(&t).map_err(|error| PipelineError::Stage {
                index,
                name: stage.name().into(),
                error,
            })?;
        }
        Ok(t)
    }

    /// Relabeling prefix and final stage, if the pipeline has that shape.
    pub fn split_last(&self) -> Option<(&[Stage], &Stage)> {
        let (last, init) = self.stages.split_last()?;
        init.iter().all(Stage::is_relabeling).then_some((init, last))
    }
}
