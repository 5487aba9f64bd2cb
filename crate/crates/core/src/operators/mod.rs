//! Dyadic maximal and sparse operators, the Bergman projection of the disk and
//! the stopping-time decomposition behind the weak-type estimate.

pub mod bergman;
pub mod cellfn;
pub mod cz;
pub mod maximal;
pub mod sparse;
pub mod weak;

pub use bergman::{
    sparse_domination_check, BergmanProjector, ProjectionMatrix, ProjectorOptions, ReproductionReport,
    SparseDomination,
};
pub use cellfn::{CellFunction, FnSample, NodeFunction, Sampled};
pub use cz::{cz_decompose, CzChecks, CzSplit, StoppingFamily};
pub use maximal::{
    arc_maximal, box_averages, maximal_dyadic, maximal_two_grid, maximal_weak_check, two_grid_domination,
    DominationReport, WeakRow,
};
pub use sparse::{sparse_apply, sparse_bound, sparse_norm_check, SparseNormRow};
pub use weak::{lambda_grid, product_estimate, weak_type_sweep, ProductEstimate, WeakConstant, WeakTypeReport};
