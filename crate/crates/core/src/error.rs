//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failures raised by constructors, decompositions and deciders.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TripleError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    Inconsistent,
    #[error("bilinear form is degenerate: {0}")]
    DegenerateForm(String),
    #[error("action of h on m is not faithful (kernel dimension {0})")]
    NotFaithful(usize),
    #[error("bracket closure failed: {0}")]
    Closure(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("symmetry violation: {0}")]
    Symmetry(String),
    #[error("center is not totally isotropic (dim m = {0})")]
    CenterNotIsotropic(usize),
    #[error("irrational spectrum: characteristic polynomial {0} has non-rational roots")]
    IrrationalSpectrum(String),
    #[error("operators do not commute")]
    NonCommuting,
    #[error("not a valid triple: {0}")]
    InvalidTriple(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("grid too large: {0} candidates")]
    GridTooLarge(u128),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, TripleError>;
