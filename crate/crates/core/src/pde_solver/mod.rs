//! Finite-difference solver: operator, convex inner problems, monotone
//! iteration between barriers, and the lambda ladder.

mod banded;
mod convex;
mod monotone;
mod operator;
mod pipeline;
mod scan;

pub use banded::{BandCholesky, BandMatrix, NotPositiveDefinite};
pub use convex::{convex_subproblem, ConvexOptions, ConvexOutcome};
pub use monotone::{default_reg, monotone_iterate, residual_max, MonotoneOptions, SolveReport};
pub use operator::apply_operator;
pub use pipeline::{solve_problem, PipelineOptions, PipelineReport};
pub use scan::{lambda_scan, Bracket, Classification, Path, ScanOptions, ScanPoint, ScanReport};

use crate::barriers::BarrierError;
use crate::verification::CheckError;

#[derive(Debug, Clone, thiserror::Error)]
pub enum SolveError {
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("lower bound exceeds upper bound at node {node} (gap {gap:e})")]
    Ordering { node: usize, gap: f64 },
    #[error("Hessian factorization failed")]
    Factorization,
    #[error("inner solve hit its iteration cap; projected-gradient history {pg_history:?}")]
    InnerNonConvergence { pg_history: Vec<f64> },
    #[error("monotone iteration did not converge in {} outer steps (last residual {:e})", .report.iterations, .report.residual)]
    NonConvergence { report: Box<SolveReport> },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error(transparent)]
    Check(#[from] CheckError),
}
