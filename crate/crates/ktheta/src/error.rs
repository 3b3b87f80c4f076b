//! Error type shared by every module of the crate.

use num_complex::Complex64;

/// Errors raised by spec construction, matrix building, and diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Blaschke zero #{index} has modulus {modulus}; zeros must satisfy |a| < 1 - 1e-9")]
    ZeroOnBoundary { index: usize, modulus: f64 },

    #[error("unimodular factor has modulus {modulus}; require ||c| - 1| < 1e-12")]
    NotUnimodular { modulus: f64 },

    #[error("inner function specification is empty")]
    EmptySpec,

    #[error("singular atom #{index} has non-positive mass {mass}")]
    NonPositiveMass { index: usize, mass: f64 },

    #[error("evaluation point {z} lies outside the open unit disk")]
    OutsideDisk { z: Complex64 },

    #[error("radius {r} outside the open interval (0, 1)")]
    BadRadius { r: f64 },

    #[error("symbol index {index} out of range for truncation order {order}")]
    IndexOutOfRange { index: i64, order: usize },

    #[error("need at least {needed} coefficients, got {got}")]
    InsufficientCoefficients { needed: usize, got: usize },

    #[error("iteration count {count} invalid (limit {limit})")]
    BadIterationCount { count: usize, limit: usize },

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("truncation insufficient at N = {order}: projection eigenvalue gap {gap} exceeds 0.1")]
    TruncationInsufficient { order: usize, gap: f64 },

    #[error("model space is empty at N = {order}")]
    EmptyModelSpace { order: usize },

    #[error("|lambda| = {modulus} exceeds the kernel sampling bound 0.9")]
    LambdaTooLarge { modulus: f64 },

    #[error("vector lies {distance:e} away from the model space (tolerance {tolerance:e})")]
    NotInModelSpace { distance: f64, tolerance: f64 },

    #[error("operator space too large: dimension {dim} exceeds the guard {limit}")]
    TooLarge { dim: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid value: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
