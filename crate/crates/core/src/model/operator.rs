use alloc::boxed::Box;

use crate::error::{Error, Result};
use crate::linalg::{Lu, Mat};
use crate::scalar::Scalar;
use crate::sparse::{Csc, SparseLu, DENSE_FALLBACK};

/// Direct solver for a square matrix, dense or sparse depending on size.
#[derive(Clone, Debug)]
pub enum Factor<T = f64> {
    Dense(Lu<T>),
    Sparse(SparseLu<T>),
}

impl<T: Scalar> Factor<T> {
    pub fn of_dense(a: &Mat<T>) -> Result<Self> {
        Ok(Factor::Dense(Lu::factor(a)?))
    }

    pub fn of_sparse(a: &Csc<T>) -> Result<Self> {
        if a.nrows() < DENSE_FALLBACK {
            Self::of_dense(&a.to_dense())
        } else {
            Ok(Factor::Sparse(SparseLu::factor(a)?))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Factor::Dense(f) => f.dim(),
            Factor::Sparse(f) => f.dim(),
        }
    }

    pub fn solve(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        match self {
            Factor::Dense(f) => f.solve(rhs),
            Factor::Sparse(f) => f.solve(rhs),
        }
    }

    pub fn solve_transpose(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        match self {
            Factor::Dense(f) => f.solve_transpose(rhs),
            Factor::Sparse(f) => f.solve_transpose(rhs),
        }
    }
}

/// Schur complement `A1 - A2 A4^{-1} A3` of a blocked matrix, kept implicit.
#[derive(Clone, Debug)]
pub struct SchurComplement {
    pub a1: Csc,
    pub a2: Csc,
    pub a3: Csc,
    pub a4: Csc,
    a4_factor: Factor,
}

impl SchurComplement {
    pub fn new(a1: Csc, a2: Csc, a3: Csc, a4: Csc) -> Result<Self> {
        let nf = a1.nrows();
        let na = a4.nrows();
        if a1.ncols() != nf || a4.ncols() != na || a2.shape() != (nf, na) || a3.shape() != (na, nf)
        {
            return Err(Error::DimensionMismatch("descriptor block shapes"));
        }
        let a4_factor = Factor::of_sparse(&a4).map_err(|e| match e {
            Error::SingularMatrix => Error::SingularBlock,
            other => other,
        })?;
        Ok(SchurComplement {
            a1,
            a2,
            a3,
            a4,
            a4_factor,
        })
    }

    pub fn dim(&self) -> usize {
        self.a1.nrows()
    }

    /// `A4^{-1} X`.
    pub fn solve_a4(&self, x: &Mat) -> Result<Mat> {
        self.a4_factor.solve(x)
    }

    /// `A4^{-T} X`.
    pub fn solve_a4_transpose(&self, x: &Mat) -> Result<Mat> {
        self.a4_factor.solve_transpose(x)
    }

    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        let y = self.solve_a4(&self.a3.mul_mat(x))?;
        Ok(self.a1.mul_mat(x).sub(&self.a2.mul_mat(&y)))
    }

    fn transpose(&self) -> Result<Self> {
        SchurComplement::new(
            self.a1.transpose(),
            self.a3.transpose(),
            self.a2.transpose(),
            self.a4.transpose(),
        )
    }

    fn to_dense(&self) -> Result<Mat> {
        let y = self.solve_a4(&self.a3.to_dense())?;
        Ok(self.a1.to_dense().sub(&self.a2.mul_mat(&y)))
    }
}

/// A square system matrix: explicit dense, explicit sparse, or an implicit Schur complement.
#[derive(Clone, Debug)]
pub enum Operator {
    Dense(Mat),
    Sparse(Csc),
    Schur(Box<SchurComplement>),
}

impl Operator {
    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(a) => a.nrows(),
            Operator::Sparse(a) => a.nrows(),
            Operator::Schur(s) => s.dim(),
        }
    }

    pub fn identity_like(n: usize, sparse: bool) -> Operator {
        if sparse {
            Operator::Sparse(Csc::identity(n))
        } else {
            Operator::Dense(Mat::identity(n))
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Operator::Dense(a) => a.is_finite(),
            Operator::Sparse(a) => a.is_finite(),
            Operator::Schur(s) => {
                s.a1.is_finite() && s.a2.is_finite() && s.a3.is_finite() && s.a4.is_finite()
            }
        }
    }

    fn check_square(&self) -> Result<()> {
        let ok = match self {
            Operator::Dense(a) => a.is_square(),
            Operator::Sparse(a) => a.nrows() == a.ncols(),
            Operator::Schur(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("system matrix must be square"))
        }
    }

    /// `A X`.
    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        if x.nrows() != self.dim() {
            return Err(Error::DimensionMismatch("operator apply: rows"));
        }
        match self {
            Operator::Dense(a) => Ok(a.matmul(x)),
            Operator::Sparse(a) => Ok(a.mul_mat(x)),
            Operator::Schur(s) => s.apply(x),
        }
    }

    /// Explicit transpose (blocks are transposed and refactorized).
    pub fn transpose(&self) -> Result<Operator> {
        Ok(match self {
            Operator::Dense(a) => Operator::Dense(a.transpose()),
            Operator::Sparse(a) => Operator::Sparse(a.transpose()),
            Operator::Schur(s) => Operator::Schur(Box::new(s.transpose()?)),
        })
    }

    pub fn to_dense(&self) -> Result<Mat> {
        match self {
            Operator::Dense(a) => Ok(a.clone()),
            Operator::Sparse(a) => Ok(a.to_dense()),
            Operator::Schur(s) => s.to_dense(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            Operator::Dense(a) => {
                a.is_square() && a.sub(&a.transpose()).max_abs() <= 1e-14 * a.max_abs()
            }
            Operator::Sparse(a) => a.is_symmetric(1e-14),
            Operator::Schur(s) => {
                s.a1.is_symmetric(1e-14)
                    && s.a4.is_symmetric(1e-14)
                    && s.a2.lin_comb(1.0, &s.a3.transpose(), -1.0).max_abs()
                        <= 1e-14 * s.a2.max_abs().max(s.a3.max_abs())
            }
        }
    }

    /// `self + alpha * other` where `other` is an explicit (dense or sparse) matrix.
    pub fn add_scaled(&self, alpha: f64, other: &Operator) -> Result<Operator> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch("operator sum"));
        }
        Ok(match (self, other) {
            (Operator::Sparse(a), Operator::Sparse(b)) => {
                Operator::Sparse(a.lin_comb(1.0, b, alpha))
            }
            (Operator::Schur(s), _) => {
                let b = sparse_of(other)?;
                Operator::Schur(Box::new(SchurComplement::new(
                    s.a1.lin_comb(1.0, &b, alpha),
                    s.a2.clone(),
                    s.a3.clone(),
                    s.a4.clone(),
                )?))
            }
            (_, Operator::Schur(_)) => {
                return Err(Error::DimensionMismatch(
                    "implicit operator cannot be added",
                ))
            }
            (a, b) => {
                let mut d = a.to_dense()?;
                d.axpy(alpha, &b.to_dense()?);
                Operator::Dense(d)
            }
        })
    }

    /// Factorize `A - s M` (`M = I` when `mass` is `None`).
    ///
    /// For the Schur complement the augmented sparse matrix
    /// `[[A1 - s M, A2], [A3, A4]]` is factorized instead of forming the complement.
    pub fn factor_shifted<T: Scalar>(
        &self,
        s: T,
        mass: Option<&Operator>,
    ) -> Result<ShiftedFactor<T>> {
        self.check_square()?;
        let n = self.dim();
        if let Some(m) = mass {
            if m.dim() != n {
                return Err(Error::DimensionMismatch("mass matrix size"));
            }
        }
        let to_shift = |e: Error| match e {
            Error::SingularMatrix => Error::SingularShift,
            other => other,
        };
        let neg_s = -s;
        match self {
            Operator::Dense(a) => {
                let mut k: Mat<T> = a.cast();
                shift_dense(&mut k, neg_s, mass)?;
                Ok(ShiftedFactor {
                    factor: Factor::of_dense(&k).map_err(to_shift)?,
                    lead: n,
                })
            }
            Operator::Sparse(a) => {
                if n < DENSE_FALLBACK {
                    let mut k: Mat<T> = a.to_dense().cast();
                    shift_dense(&mut k, neg_s, mass)?;
                    return Ok(ShiftedFactor {
                        factor: Factor::of_dense(&k).map_err(to_shift)?,
                        lead: n,
                    });
                }
                let m = match mass {
                    Some(m) => sparse_of(m)?,
                    None => Csc::identity(n),
                };
                let k = a.cast::<T>().lin_comb(T::ONE, &m.cast(), neg_s);
                Ok(ShiftedFactor {
                    factor: Factor::Sparse(SparseLu::factor(&k).map_err(to_shift)?),
                    lead: n,
                })
            }
            Operator::Schur(sc) => {
                let m = match mass {
                    Some(m) => sparse_of(m)?,
                    None => Csc::identity(n),
                };
                let top_left = sc.a1.cast::<T>().lin_comb(T::ONE, &m.cast(), neg_s);
                let aug = Csc::block2x2(&top_left, &sc.a2.cast(), &sc.a3.cast(), &sc.a4.cast())?;
                Ok(ShiftedFactor {
                    factor: Factor::of_sparse(&aug).map_err(to_shift)?,
                    lead: n,
                })
            }
        }
    }
}

fn shift_dense<T: Scalar>(k: &mut Mat<T>, neg_s: T, mass: Option<&Operator>) -> Result<()> {
    match mass {
        None => {
            for i in 0..k.nrows() {
                k[(i, i)] += neg_s;
            }
        }
        Some(m) => {
            let md: Mat<T> = m.to_dense()?.cast();
            k.axpy(neg_s, &md);
        }
    }
    Ok(())
}

fn sparse_of(op: &Operator) -> Result<Csc> {
    match op {
        Operator::Dense(a) => Ok(Csc::from_dense(a)),
        Operator::Sparse(a) => Ok(a.clone()),
        Operator::Schur(_) => Err(Error::DimensionMismatch("mass matrix must be explicit")),
    }
}

/// Factorization of a shifted pencil `A - s M`, reused across right-hand sides.
#[derive(Clone, Debug)]
pub struct ShiftedFactor<T = f64> {
    factor: Factor<T>,
    lead: usize,
}

impl<T: Scalar> ShiftedFactor<T> {
    pub fn dim(&self) -> usize {
        self.lead
    }

    /// `(A - s M)^{-1} W`.
    pub fn solve(&self, w: &Mat<T>) -> Result<Mat<T>> {
        if w.nrows() != self.lead {
            return Err(Error::DimensionMismatch("shifted solve: RHS rows"));
        }
        if self.factor.dim() == self.lead {
            return self.factor.solve(w);
        }
        let padded = w.resized_rows(self.factor.dim());
        Ok(self.factor.solve(&padded)?.resized_rows(self.lead))
    }

    /// `(A - s M)^{-T} W`.
    pub fn solve_transpose(&self, w: &Mat<T>) -> Result<Mat<T>> {
        if w.nrows() != self.lead {
            return Err(Error::DimensionMismatch("shifted solve: RHS rows"));
        }
        if self.factor.dim() == self.lead {
            return self.factor.solve_transpose(w);
        }
        let padded = w.resized_rows(self.factor.dim());
        Ok(self
            .factor
            .solve_transpose(&padded)?
            .resized_rows(self.lead))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    fn descriptor_blocks() -> (Csc, Csc, Csc, Csc) {
        let s = |v: f64| Csc::from_dense(&Mat::from_rows(&[&[v]]));
        (s(-1.0), s(1.0), s(1.0), s(-2.0))
    }

    #[test]
    fn schur_apply_and_dense() {
        let (a1, a2, a3, a4) = descriptor_blocks();
        let op = Operator::Schur(Box::new(SchurComplement::new(a1, a2, a3, a4).unwrap()));
        assert_eq!(op.to_dense().unwrap(), Mat::from_rows(&[&[-0.5]]));
        assert_eq!(
            op.apply(&Mat::from_rows(&[&[2.0]])).unwrap(),
            Mat::from_rows(&[&[-1.0]])
        );
    }

    #[test]
    fn augmented_shifted_solve() {
        let (a1, a2, a3, a4) = descriptor_blocks();
        let op = Operator::Schur(Box::new(SchurComplement::new(a1, a2, a3, a4).unwrap()));
        let f = op.factor_shifted(0.0, None).unwrap();
        let v = f.solve(&Mat::from_rows(&[&[1.0]])).unwrap();
        assert!((v[(0, 0)] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn scalar_resolvents() {
        let op = Operator::Dense(Mat::from_rows(&[&[-1.0]]));
        let v = op
            .factor_shifted(1.0, None)
            .unwrap()
            .solve(&Mat::from_rows(&[&[3.0]]))
            .unwrap();
        assert!((v[(0, 0)] + 1.5).abs() < 1e-15);
        let s = C64::new(1.0, 1.0);
        let w = Mat::from_rows(&[&[C64::new(1.0, 0.0)]]);
        let v = op.factor_shifted(s, None).unwrap().solve(&w).unwrap();
        let expect = C64::new(1.0, 0.0) / C64::new(-2.0, -1.0);
        assert!((v[(0, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn singular_shift() {
        let op = Operator::Dense(Mat::diag(&[-1.0, -2.0]));
        assert_eq!(
            op.factor_shifted(-2.0, None).unwrap_err(),
            Error::SingularShift
        );
    }

    #[test]
    fn singular_block() {
        let (a1, a2, a3, _) = descriptor_blocks();
        let z = Csc::from_dense(&Mat::from_rows(&[&[0.0]]));
        assert_eq!(
            SchurComplement::new(a1, a2, a3, z).unwrap_err(),
            Error::SingularBlock
        );
    }
}
