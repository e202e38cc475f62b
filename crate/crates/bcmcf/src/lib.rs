//! Exact network simplex solver for the budget-constrained minimum cost
//! flow problem (BCMCFP): a minimum cost circulation with a knapsack-style
//! side constraint on per-unit usage fees.
//!
//! The solver works entirely in exact rational arithmetic. It consists of
//! a budget-free min-cost-circulation preprocessing gate, a specialized
//! network simplex over basis structures `(L, T, U, extra edge)`, an
//! anti-cycling scheme combining a half-integral budget shift with
//! strongly feasible bases, and a brute-force enumeration oracle for
//! desk-scale verification.

pub mod basis;
pub mod instance;
pub mod numerics;
pub mod oracle;
pub mod pivot;
pub mod preprocess;
pub mod solver;

pub use instance::{Edge, GenParams, Instance};
pub use numerics::Rat;
pub use preprocess::Flow;
pub use solver::{SolveOptions, SolveReport, SolveStatus};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("internal invariant violated: {0}")]
    Corruption(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
