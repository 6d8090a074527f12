//! Thin circulant matrices.
//!
//! Tools for building Boolean circulant matrices with no all-ones `k × l`
//! submatrix by random sampling with exact verification, together with the
//! additive-combinatorics machinery that sets the sampling density: minimum
//! Minkowski sumset sizes under a dimension constraint, the exponent
//! `ρ(K, L)`, and the rectangle-class counting used in the union bound.

mod bitset;
pub mod circulant;
pub mod construction;
pub mod error;
pub mod experiment;
pub mod freeness;
mod linalg;
pub mod rectangles;
pub mod rho;
pub mod sumset;

pub use circulant::{CirculantMatrix, MatrixJson, Orientation, SupportSet, WeightReport};
pub use construction::{ConstructionParams, ConstructionResult};
pub use error::{Error, Result};
pub use experiment::{CorollaryReport, SweepSpec};
pub use freeness::{
    find_block_naive, find_block_naive_with_limit, find_rectangle_integer, is_free_cyclic,
    FreenessMode, FreenessQuery, SearchLimits, Verdict, Witness,
};
pub use rectangles::{Rectangle, SumPattern};
pub use rho::{Rational, RhoValue};
pub use sumset::{PointSet, SimplexPair, SumsetBoundQuery};
