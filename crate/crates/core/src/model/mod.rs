//! System realizations, structural transformations and shifted solves.

mod diag;
mod krylov;
mod operator;
mod system;

pub use diag::{DiagonalizedSystem, MAX_EIGVEC_CONDITION};
pub use krylov::KrylovOperator;
pub use operator::{Factor, Operator, SchurComplement, ShiftedFactor};
pub use system::{
    alpha_shift, cholesky_transform, eliminate_descriptor, mass_solve, similarity_transform, spectral_abscissa,
    transfer_at, transfer_eval, CholeskyTransformed, DenseForm, DescriptorIndex1,
    GeneralizedSystem, LtiSystem, MassCholesky, StandardSystem,
};
