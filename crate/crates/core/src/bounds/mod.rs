//! Model constants Δ and γ, the 2→∞ bound β, the concentration-bound
//! diagnostics of a sample, the perfect-clustering conditions and the
//! sparse-regime classification.

mod assumptions;
mod constants;
mod report;
mod sparse;

pub use assumptions::{
    check_assumptions, AssumptionReport, EigenDistinctness, Eigengap, Separation, SphereSeparation,
    A0_TOL,
};
pub use constants::{
    beta, block_sizes, gram_eigenvalues, model_constants, Beta, ModelConstants, DISTINCT_EIGEN_TOL,
    ZERO_EIGEN_TOL,
};
pub use report::{bound_report, names, population_eigenpairs, BoundEntry, BoundReport, NORM_TOL};
pub use sparse::{
    classify, sparse_regime, sparse_row, GrowthExpr, Order, SparseCase, SparseRegimeReport,
    SparseRow, Term,
};
