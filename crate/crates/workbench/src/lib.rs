//! Macro tree transducers, attributed tree transducers and finite-state
//! relabelings: evaluation, static analyses, conversions between them and
//! bounded equivalence testing.

pub mod analysis;
pub mod att;
pub mod cli;
pub mod constructions;
pub mod difftest;
pub mod dynfv;
pub mod format;
pub mod mtt;
pub mod relabel;
pub mod samples;
pub mod syntax;
pub mod tree;

pub use analysis::ParamRenaming;
pub use att::Att;
pub use mtt::Mtt;
pub use relabel::{Brel, Pipeline, Stage, Trel};
pub use tree::{Path, RankedAlphabet, Symbol, Tree};
