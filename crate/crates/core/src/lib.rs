//! Core algorithms for the logic of functional dependence (LFD).
//!
//! Formulas are evaluated at single assignments drawn from a fixed team of
//! variable assignments over a finite relational structure. This crate holds
//! everything that does not touch the filesystem: the formula syntax and
//! closure sets, the local model checker, Ψ-types and type models, three
//! bisimulation checkers, the first-order translation, the good-path
//! unravelling with its cut-off and partial-isomorphism machinery, and the
//! relational (modal) semantics.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bisim;
pub mod bitset;
pub mod error;
pub mod fmp;
pub mod relational;
pub mod report;
pub mod semantics;
pub mod structure;
pub mod syntax;
pub mod translate;
pub mod types;
pub mod unravel;
pub mod vars;

pub use error::{Error, Result};
pub use report::{Issue, Severity, ValidationReport};
pub use semantics::{Assignment, DependenceModel, Obj};
pub use syntax::{closure, parse_formula, ClosureSet, Formula, PredId, Vocabulary};
pub use types::{PsiType, TypeModel};
pub use vars::{Var, VarSet};
