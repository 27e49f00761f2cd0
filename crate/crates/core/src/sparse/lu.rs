use alloc::vec;
use alloc::vec::Vec;

use super::Csc;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::Scalar;

const NONE: usize = usize::MAX;

/// Left-looking sparse LU with partial pivoting, `P A = L U`.
///
/// `L` is unit lower triangular (diagonal stored first in each column),
/// `U` upper triangular (diagonal stored last).
#[derive(Clone, Debug)]
pub struct SparseLu<T = f64> {
    n: usize,
    l: Csc<T>,
    u: Csc<T>,
    /// row `i` of `A` is row `pinv[i]` of `P A`
    pinv: Vec<usize>,
}

impl<T: Scalar> SparseLu<T> {
    pub fn factor(a: &Csc<T>) -> Result<Self> {
        let (n, nc) = a.shape();
        if n != nc {
            return Err(Error::DimensionMismatch("sparse LU of a non-square matrix"));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let tiny = f64::EPSILON * a.norm_1();
        let mut lp = vec![0usize; n + 1];
        let mut li: Vec<usize> = Vec::with_capacity(2 * a.nnz() + n);
        let mut lx: Vec<T> = Vec::with_capacity(2 * a.nnz() + n);
        let mut up = vec![0usize; n + 1];
        let mut ui: Vec<usize> = Vec::with_capacity(2 * a.nnz() + n);
        let mut ux: Vec<T> = Vec::with_capacity(2 * a.nnz() + n);
        let mut pinv = vec![NONE; n];
        let mut x = vec![T::ZERO; n];
        let mut xi = vec![0usize; n];
        let mut stack = vec![0usize; n];
        let mut pstack = vec![0usize; n];
        let mut marked = vec![false; n];

        for k in 0..n {
            lp[k] = li.len();
            up[k] = ui.len();
            // pattern of L \ A(:,k), in topological order at xi[top..n]
            let mut top = n;
            for (i, _) in a.column(k) {
                if !marked[i] {
                    top = dfs(
                        i,
                        &lp,
                        &li,
                        k,
                        &pinv,
                        top,
                        &mut xi,
                        &mut stack,
                        &mut pstack,
                        &mut marked,
                    );
                }
            }
            for &i in &xi[top..n] {
                marked[i] = false;
                x[i] = T::ZERO;
            }
            for (i, v) in a.column(k) {
                x[i] = v;
            }
            for &j in &xi[top..n] {
                let jc = pinv[j];
                if jc == NONE {
                    continue;
                }
                let xj = x[j];
                if xj == T::ZERO {
                    continue;
                }
                // skip unit diagonal stored first
                for p in lp[jc] + 1..end(&lp, jc, k, li.len()) {
                    x[li[p]] -= lx[p] * xj;
                }
            }
            // choose pivot among non-pivotal rows
            let mut ipiv = NONE;
            let mut best = -1.0;
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    let v = x[i].modulus();
                    if v > best {
                        best = v;
                        ipiv = i;
                    }
                } else {
                    ui.push(pinv[i]);
                    ux.push(x[i]);
                }
            }
            if ipiv == NONE || best <= tiny || best == 0.0 {
                return Err(Error::SingularMatrix);
            }
            let piv = x[ipiv];
            ui.push(k);
            ux.push(piv);
            pinv[ipiv] = k;
            li.push(ipiv);
            lx.push(T::ONE);
            for &i in &xi[top..n] {
                if pinv[i] == NONE {
                    li.push(i);
                    lx.push(x[i] / piv);
                }
                x[i] = T::ZERO;
            }
        }
        lp[n] = li.len();
        up[n] = ui.len();
        for r in li.iter_mut() {
            *r = pinv[*r];
        }
        // U columns: off-diagonals in arbitrary order, diagonal last; sort off-diagonals
        let mut u_rows = ui;
        let mut u_vals = ux;
        for k in 0..n {
            let (s, e) = (up[k], up[k + 1] - 1);
            let mut pairs: Vec<(usize, T)> = (s..e).map(|p| (u_rows[p], u_vals[p])).collect();
            pairs.sort_by_key(|p| p.0);
            for (o, (r, v)) in pairs.into_iter().enumerate() {
                u_rows[s + o] = r;
                u_vals[s + o] = v;
            }
        }
        Ok(SparseLu {
            n,
            l: Csc::from_parts(n, n, lp, li, lx),
            u: Csc::from_parts(n, n, up, u_rows, u_vals),
            pinv,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn fill(&self) -> usize {
        self.l.nnz() + self.u.nnz()
    }

    /// Solve `A x = b` in place.
    pub fn solve_vec(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x = vec![T::ZERO; n];
        for i in 0..n {
            x[self.pinv[i]] = b[i];
        }
        let (lp, li, lx) = (self.l.colptr(), self.l.rowidx(), self.l.values());
        for j in 0..n {
            let xj = x[j];
            if xj == T::ZERO {
                continue;
            }
            for p in lp[j] + 1..lp[j + 1] {
                x[li[p]] -= lx[p] * xj;
            }
        }
        let (up, ui, ux) = (self.u.colptr(), self.u.rowidx(), self.u.values());
        for j in (0..n).rev() {
            let d = up[j + 1] - 1;
            x[j] /= ux[d];
            let xj = x[j];
            if xj == T::ZERO {
                continue;
            }
            for p in up[j]..d {
                x[ui[p]] -= ux[p] * xj;
            }
        }
        b.copy_from_slice(&x);
    }

    /// Solve `A^T x = b` in place (plain transpose).
    pub fn solve_transpose_vec(&self, b: &mut [T]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut z = b.to_vec();
        let (up, ui, ux) = (self.u.colptr(), self.u.rowidx(), self.u.values());
        for j in 0..n {
            let d = up[j + 1] - 1;
            let mut s = z[j];
            for p in up[j]..d {
                s -= ux[p] * z[ui[p]];
            }
            z[j] = s / ux[d];
        }
        let (lp, li, lx) = (self.l.colptr(), self.l.rowidx(), self.l.values());
        for j in (0..n).rev() {
            let mut s = z[j];
            for p in lp[j] + 1..lp[j + 1] {
                s -= lx[p] * z[li[p]];
            }
            z[j] = s;
        }
        for i in 0..n {
            b[i] = z[self.pinv[i]];
        }
    }

    pub fn solve(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        if rhs.nrows() != self.n {
            return Err(Error::DimensionMismatch("sparse LU solve: RHS rows"));
        }
        let mut x = rhs.clone();
        for c in 0..x.ncols() {
            self.solve_vec(x.col_mut(c));
        }
        Ok(x)
    }

    pub fn solve_transpose(&self, rhs: &Mat<T>) -> Result<Mat<T>> {
        if rhs.nrows() != self.n {
            return Err(Error::DimensionMismatch("sparse LU solve: RHS rows"));
        }
        let mut x = rhs.clone();
        for c in 0..x.ncols() {
            self.solve_transpose_vec(x.col_mut(c));
        }
        Ok(x)
    }
}

// end of column `jc` of the partially built L (columns < k are complete)
#[inline]
fn end(lp: &[usize], jc: usize, k: usize, len: usize) -> usize {
    if jc + 1 < k {
        lp[jc + 1]
    } else {
        len
    }
}

/// Depth-first search from row `j` through the graph of the partial L; pushes the
/// reach onto `xi[..top]` and returns the new top.
#[allow(clippy::too_many_arguments)]
fn dfs(
    j: usize,
    lp: &[usize],
    li: &[usize],
    k: usize,
    pinv: &[usize],
    mut top: usize,
    xi: &mut [usize],
    stack: &mut [usize],
    pstack: &mut [usize],
    marked: &mut [bool],
) -> usize {
    let mut head = 0usize;
    stack[0] = j;
    loop {
        let j = stack[head];
        let jc = pinv[j];
        if !marked[j] {
            marked[j] = true;
            pstack[head] = if jc == NONE { 0 } else { lp[jc] + 1 };
        }
        let mut done = true;
        if jc != NONE {
            let e = end(lp, jc, k, li.len());
            let mut p = pstack[head];
            while p < e {
                let i = li[p];
                p += 1;
                if !marked[i] {
                    pstack[head] = p;
                    head += 1;
                    stack[head] = i;
                    done = false;
                    break;
                }
            }
            if done {
                pstack[head] = e;
            }
        }
        if done {
            top -= 1;
            xi[top] = j;
            if head == 0 {
                break;
            }
            head -= 1;
        }
    }
    top
}
