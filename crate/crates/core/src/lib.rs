//! Convex equivolume partitions of the unit cube and the expected
//! L2-discrepancy of stratified samples drawn from them.
//!
//! The partition family replaces two adjacent corner cells of the `m^d`
//! jittered grid by a single `2b × b × … × b` cuboid, re-split through its
//! centre by a hyperplane at angle `θ` to the horizontal. `θ = π/2` recovers
//! jittered sampling; `θ = arctan ½` gives the triangular-prism split.
//!
//! Three independent routes evaluate the expected squared L2-discrepancy:
//!
//! * [`closedform`]: explicit formulas for the θ-correction `P(θ)`, the
//!   building-block integrals and the upper bound;
//! * [`discrepancy::quadrature`]: deterministic tensor-midpoint quadrature of
//!   the expectation integral, with anchored-box measures from exact polygon
//!   clipping;
//! * [`discrepancy::monte_carlo`]: seeded (and coupled) stratified replicates
//!   scored with the exact pairwise formula.

pub mod cli;
pub mod closedform;
pub mod discrepancy;
mod error;
pub mod geometry;
pub mod io;
mod par;
pub mod sampling;

pub use error::{Error, Result};
pub use par::Execution;

pub use closedform::{
    building_block_closed, expected_difference_closed, p_theta, upper_bound, BoundReport,
};
pub use discrepancy::{
    building_block_b, expected_difference_mc, expected_difference_quadrature,
    expected_l2_squared_mc, expected_l2_squared_quadrature, l2_squared_exact,
    l2_squared_quadrature, local_discrepancy, ExpectationResult, Method, PointSet, QuadratureSpec,
};
pub use geometry::{
    build_partition, building_block_q, regime_of, Cell, Partition, PartitionSpec, Polygon2, Theta,
    ThetaRegime,
};
pub use sampling::{
    generate_coupled, generate_stratified, sample_uniform_in_cell, CellStream, SeedSpec,
    StratifiedSample,
};
