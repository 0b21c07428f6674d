//! Bounded differential equivalence testing of two pipelines.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::relabel::{Pipeline, PipelineError};
use crate::tree::{all_trees, Tree, TreeError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiffOutcome {
    /// No difference on any input up to the bound.
    Equal,
    Counterexample { input: Tree, out1: Tree, out2: Tree },
    /// `pipeline` is 1 or 2.
    StageError { input: Tree, pipeline: usize, error: PipelineError },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffReport {
    pub outcome: DiffOutcome,
    pub bound: usize,
    /// Inputs examined, including the failing one.
    pub tested: usize,
}

impl DiffReport {
    pub fn is_equal(&self) -> bool {
        self.outcome == DiffOutcome::Equal
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            DiffOutcome::Equal => {
                write!(f, "equal on all {} inputs of size <= {}", self.tested, self.bound)
            }
            DiffOutcome::Counterexample { input, out1, out2 } => {
                write!(f, "counterexample {input}: {out1} vs {out2}")
            }
            DiffOutcome::StageError { input, pipeline, error } => {
                write!(f, "pipeline {pipeline} fails on {input}: {error}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("the pipelines read different alphabets: {0} vs {1}")]
    AlphabetMismatch(String, String),
    #[error(transparent)]
    Enumeration(#[from] TreeError),
}

/// Runs both pipelines on every tree with at most `bound` nodes and reports
/// the first difference in enumeration order.
pub fn equivalent_up_to(p1: &Pipeline, p2: &Pipeline, bound: usize) -> Result<DiffReport, DiffError> {
    if !p1.input().same_symbols(p2.input()) {
        return Err(DiffError::AlphabetMismatch(p1.input().to_string(), p2.input().to_string()));
    }
    let inputs = all_trees(p1.input(), bound)?;
    let first = inputs.par_iter().enumerate().find_map_first(|(k, s)| {
        let out1 = match p1.apply(s) {
            Ok(t) => t,
            Err(error) => return Some((k, DiffOutcome::StageError { input: s.clone(), pipeline: 1, error })),
        };
        let out2 = match p2.apply(s) {
            Ok(t) => t,
            Err(error) => return Some((k, DiffOutcome::StageError { input: s.clone(), pipeline: 2, error })),
        };
        (out1 != out2).then(|| (k, DiffOutcome::Counterexample { input: s.clone(), out1, out2 }))
    });
    Ok(match first {
        Some((k, outcome)) => DiffReport { outcome, bound, tested: k + 1 },
        None => DiffReport { outcome: DiffOutcome::Equal, bound, tested: inputs.len() },
    })
}
