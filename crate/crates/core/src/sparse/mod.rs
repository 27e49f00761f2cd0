//! Compressed sparse column storage and direct factorizations.

mod chol;
mod csc;
mod lu;

pub use chol::SparseCholesky;
pub use csc::Csc;
pub use lu::SparseLu;

/// Below this dimension sparse operators are factorized densely.
pub const DENSE_FALLBACK: usize = 500;
