//! Dense numerical kernels.

mod chol;
mod eig;
mod expm;
mod lu;
mod lyap;
mod mat;
mod qr;
mod svd;
mod symeig;

pub use chol::Cholesky;
pub use eig::{eigvals, gen_eig, schur_complex, spectral_abscissa_dense, EigDecomposition};
pub use expm::expm;
pub use lu::{lu_solve, Lu};
pub use lyap::{lyap_dense, lyap_residual};
pub use mat::{CMat, Mat};
pub(crate) use qr::norm as vec_norm;
pub use qr::{orthonormal_extend, orthonormal_extend_tol, qr_thin, DEFLATION_TOL};
pub use svd::{singular_values, svd, Svd};
pub use symeig::{sym_eig, sym_eigvals, SymEig};

#[cfg(test)]
pub(crate) mod testutil {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::Mat;

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn rand_mat(r: &mut ChaCha8Rng, m: usize, n: usize) -> Mat {
        Mat::from_fn(m, n, |_, _| r.gen_range(-1.0..1.0))
    }

    /// Random matrix with negative definite symmetric part.
    pub fn rand_stable(r: &mut ChaCha8Rng, n: usize) -> Mat {
        let g = rand_mat(r, n, n);
        let top = super::sym_eigvals(&g.symmetrized()).unwrap()[0];
        g.sub(&Mat::identity(n).scaled(top + 0.5))
    }
}
