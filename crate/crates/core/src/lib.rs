//! Sub- and supersolution barriers for the orthotropic p-Laplacian
//! `-sum_i d_i(|d_i u|^{p_i-2} d_i u) = lambda u^{q-1}` on boxes, with a
//! monotone-iteration solver and a parameter scan for the existence threshold.

pub mod domain;
pub mod eigen1d;
pub mod interp;
pub mod quadrature;

pub use domain::{AxisBox, DomainError, Interval};
pub use eigen1d::{check_slope_sign, pi_p, solve_eigenpair, EigenError, Eigenpair1D, EigenpairRecord};
pub mod barriers;
pub mod grid;
pub mod problem;

pub use barriers::{
    build_barrier, default_alpha, epsilon_for_lambda, lambda_star_sub, lambda_star_super, m_for_lambda,
    nonexistence_bound, pointwise_s, sample_to_grid, BarrierError, BarrierFunction, BarrierKind, BarrierSpec,
    SValue, SubThreshold, ThresholdSummary,
};
pub use grid::{Grid, GridError, GridField};
pub use problem::{Problem, ProblemError, Regime};
pub mod flux;
pub mod verification;

pub use verification::{
    poincare_check, sandwich_check, validate_problem, weak_inequality_check, CheckError, CheckKind, Diagnostics,
    PoincareReport, SandwichReport, WeakCheckReport,
};
pub mod pde_solver;

pub use pde_solver::{
    apply_operator, convex_subproblem, lambda_scan, monotone_iterate, solve_problem, Bracket, Classification, ConvexOptions,
    MonotoneOptions, Path, PipelineOptions, PipelineReport, ScanOptions, ScanPoint, ScanReport, SolveError, SolveReport,
};
