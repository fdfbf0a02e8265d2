//! Paraproducts realized on the periodic grid `{m / N}` of the unit circle.
//!
//! Functions are [`GridFunction`]s; multiplier symbols are sampled on the
//! integer frequencies `(-N/2, N/2]` as [`Mask`]s. Integrals are means over
//! the grid (period one) and `‖f‖_p = (mean |f|^p)^{1/p}`.

pub mod bounds;
pub mod grid;
pub mod lambda;
pub mod operators;
pub mod sweep;
pub mod symbol;

use paraproduct_core::VertexId;
use thiserror::Error;

pub use bounds::{check_pointwise_bounds, BoundKind, BoundsReport};
pub use grid::GridFunction;
pub use lambda::{apply_multiplier, evaluate_lambda, evaluate_max_lambda, family_box, Families, Functions, ScaleBox};
pub use operators::{hl_maximal, square_function};
pub use sweep::{uniformity_sweep, ExponentTuple, SweepConfig, SweepTable};
pub use symbol::{build_symbol, Mask, SymbolFamily, SymbolKind, SymbolSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error("grid size {0} is not a power of two at least 2")]
    GridSize(usize),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("symbol at scale {scale} reaches |ξ| = {radius}, beyond the grid band {limit}")]
    SupportOverflow { scale: i64, radius: f64, limit: f64 },
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("scale box misses the nonzero symbol of vertex {vertex} at scale {scale}")]
    BoxInsufficient { vertex: VertexId, scale: i64 },
    #[error("no symbol family for vertex {0}")]
    MissingFamily(VertexId),
    #[error("no function for vertex {0}")]
    MissingFunction(VertexId),
    #[error("no scale range for vertex {0}")]
    MissingRange(VertexId),
    #[error("invalid exponents: {0}")]
    InvalidExponents(String),
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Polytope(String),
}
