use alloc::vec;
use alloc::vec::Vec;

use super::Csc;
use crate::error::{Error, Result};
use crate::linalg::Mat;

const NONE: usize = usize::MAX;

/// Up-looking sparse Cholesky `A = L L^T` (natural ordering).
#[derive(Clone, Debug)]
pub struct SparseCholesky {
    l: Csc,
}

impl SparseCholesky {
    pub fn factor(a: &Csc) -> Result<Self> {
        let (n, nc) = a.shape();
        if n != nc {
            return Err(Error::DimensionMismatch(
                "sparse Cholesky of a non-square matrix",
            ));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        if !a.is_symmetric(1e-12) {
            return Err(Error::NotSpd);
        }
        let scale = a.max_abs();
        let parent = etree(a);
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut x = vec![0.0; n];
        let mut flag = vec![NONE; n];
        let mut s = vec![0usize; n];
        let mut path = vec![0usize; n];
        for k in 0..n {
            // nonzero pattern of row k of L
            let mut top = n;
            flag[k] = k;
            for (i, v) in a.column(k) {
                if i > k {
                    continue;
                }
                x[i] += v;
                let mut len = 0;
                let mut i = i;
                while flag[i] != k {
                    path[len] = i;
                    len += 1;
                    flag[i] = k;
                    i = parent[i];
                    if i == NONE {
                        break;
                    }
                }
                while len > 0 {
                    len -= 1;
                    top -= 1;
                    s[top] = path[len];
                }
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &j in &s[top..n] {
                let col = &cols[j];
                let lkj = x[j] / col[0].1;
                x[j] = 0.0;
                for &(i, lij) in &col[1..] {
                    x[i] -= lij * lkj;
                }
                d -= lkj * lkj;
                cols[j].push((k, lkj));
            }
            if !(d > f64::EPSILON * scale) {
                return Err(Error::NotSpd);
            }
            cols[k].push((k, libm::sqrt(d)));
        }
        let mut colptr = vec![0usize; n + 1];
        let mut rowidx = Vec::new();
        let mut vals = Vec::new();
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col {
                rowidx.push(i);
                vals.push(v);
            }
            colptr[j + 1] = rowidx.len();
        }
        Ok(SparseCholesky {
            l: Csc::from_parts(n, n, colptr, rowidx, vals),
        })
    }

    pub fn l(&self) -> &Csc {
        &self.l
    }

    /// `L^{-1} B`.
    pub fn solve_lower(&self, b: &Mat) -> Mat {
        let n = self.l.nrows();
        assert_eq!(b.nrows(), n);
        let (lp, li, lx) = (self.l.colptr(), self.l.rowidx(), self.l.values());
        let mut x = b.clone();
        for c in 0..x.ncols() {
            let v = x.col_mut(c);
            for j in 0..n {
                v[j] /= lx[lp[j]];
                let vj = v[j];
                for p in lp[j] + 1..lp[j + 1] {
                    v[li[p]] -= lx[p] * vj;
                }
            }
        }
        x
    }

    /// `L^{-T} B`.
    pub fn solve_upper(&self, b: &Mat) -> Mat {
        let n = self.l.nrows();
        assert_eq!(b.nrows(), n);
        let (lp, li, lx) = (self.l.colptr(), self.l.rowidx(), self.l.values());
        let mut x = b.clone();
        for c in 0..x.ncols() {
            let v = x.col_mut(c);
            for j in (0..n).rev() {
                let mut s = v[j];
                for p in lp[j] + 1..lp[j + 1] {
                    s -= lx[p] * v[li[p]];
                }
                v[j] = s / lx[lp[j]];
            }
        }
        x
    }

    /// `L B`.
    pub fn mul_lower(&self, b: &Mat) -> Mat {
        self.l.mul_mat(b)
    }

    /// `L^T B`.
    pub fn mul_upper(&self, b: &Mat) -> Mat {
        self.l.tr_mul_mat(b)
    }
}

/// Elimination tree of a symmetric matrix (upper triangle used).
fn etree(a: &Csc) -> Vec<usize> {
    let n = a.ncols();
    let mut parent = vec![NONE; n];
    let mut ancestor = vec![NONE; n];
    for k in 0..n {
        for (i, _) in a.column(k) {
            let mut i = i;
            while i != NONE && i < k {
                let next = ancestor[i];
                ancestor[i] = k;
                if next == NONE {
                    parent[i] = k;
                }
                i = next;
            }
        }
    }
    parent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{rand_mat, rng};
    use crate::linalg::Cholesky;

    fn tridiag(n: usize) -> Csc {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0));
            if i + 1 < n {
                t.push((i, i + 1, 1.0));
                t.push((i + 1, i, 1.0));
            }
        }
        Csc::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let a = tridiag(12);
        let c = SparseCholesky::factor(&a).unwrap();
        let dense = Cholesky::factor(&a.to_dense()).unwrap();
        assert!(c.l().to_dense().sub(dense.l()).max_abs() < 1e-14);
        assert_eq!(c.l().nnz(), 23);
    }

    #[test]
    fn random_spd_solves() {
        let mut g = rng(31);
        let z = rand_mat(&mut g, 15, 15);
        let mut d = z.matmul_tr(&z).add(&Mat::identity(15));
        // sparsify while keeping SPD via diagonal dominance
        for j in 0..15 {
            for i in 0..15 {
                if (i + 2 * j) % 3 == 0 && i != j {
                    d[(i, j)] = 0.0;
                    d[(j, i)] = 0.0;
                }
            }
        }
        for i in 0..15 {
            d[(i, i)] = 60.0;
        }
        let a = Csc::from_dense(&d);
        let c = SparseCholesky::factor(&a).unwrap();
        let b = rand_mat(&mut g, 15, 2);
        let y = c.solve_lower(&b);
        assert!(c.l().to_dense().matmul(&y).sub(&b).max_abs() < 1e-13);
        let w = c.solve_upper(&b);
        assert!(c.l().to_dense().transpose().matmul(&w).sub(&b).max_abs() < 1e-13);
        let l = c.l().to_dense();
        assert!(l.matmul_tr(&l).sub(&d).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_indefinite() {
        let a = Csc::from_dense(&Mat::diag(&[1.0, -2.0]));
        assert_eq!(SparseCholesky::factor(&a).unwrap_err(), Error::NotSpd);
    }
}
