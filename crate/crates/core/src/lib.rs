//! Exact-rational toolkit for solvable pseudo-Riemannian symmetric triples.

// index loops mirror the tensor notation
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod classification;
pub mod error;
pub mod geometry;
pub mod json;
pub mod lie;
pub mod linalg;
pub mod normal_forms;
pub mod oracle;
pub mod poly;
pub mod triple;
pub mod witt;

pub use error::{Result, TripleError};
