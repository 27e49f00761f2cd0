use crate::error::{Error, Result};
use crate::linalg::{spectral_abscissa_dense, CMat, Cholesky, Lu, Mat};
use crate::sparse::{Csc, SparseCholesky};
use crate::C64;

use super::operator::{Factor, Operator, SchurComplement};
use alloc::boxed::Box;

/// `x' = A x + B u, y = C x + D u`.
#[derive(Clone, Debug)]
pub struct StandardSystem {
    pub a: Operator,
    pub b: Mat,
    pub c: Mat,
    pub d: Mat,
}

impl StandardSystem {
    pub fn new(a: Operator, b: Mat, c: Mat, d: Option<Mat>) -> Result<Self> {
        let n = a.dim();
        let d = d.unwrap_or_else(|| Mat::zeros(c.nrows(), b.ncols()));
        check_io(n, &b, &c, &d)?;
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(StandardSystem { a, b, c, d })
    }

    pub fn dense(a: Mat, b: Mat, c: Mat) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("A must be square"));
        }
        Self::new(Operator::Dense(a), b, c, None)
    }
}

/// `M x' = A x + B u, y = C x + D u` with nonsingular `M`.
#[derive(Clone, Debug)]
pub struct GeneralizedSystem {
    pub m: Operator,
    pub a: Operator,
    pub b: Mat,
    pub c: Mat,
    pub d: Mat,
    /// `M` is symmetric positive definite (verified on construction).
    pub spd: bool,
}

impl GeneralizedSystem {
    pub fn new(
        m: Operator,
        a: Operator,
        b: Mat,
        c: Mat,
        d: Option<Mat>,
        spd: bool,
    ) -> Result<Self> {
        let n = a.dim();
        if m.dim() != n {
            return Err(Error::DimensionMismatch("M and A sizes differ"));
        }
        if matches!(m, Operator::Schur(_)) {
            return Err(Error::DimensionMismatch("mass matrix must be explicit"));
        }
        let d = d.unwrap_or_else(|| Mat::zeros(c.nrows(), b.ncols()));
        check_io(n, &b, &c, &d)?;
        if !a.is_finite() || !m.is_finite() {
            return Err(Error::NonFinite);
        }
        if spd {
            MassCholesky::factor(&m)?;
        } else {
            mass_lu(&m)?;
        }
        Ok(GeneralizedSystem { m, a, b, c, d, spd })
    }
}

fn check_io(n: usize, b: &Mat, c: &Mat, d: &Mat) -> Result<()> {
    if b.nrows() != n {
        return Err(Error::DimensionMismatch("B rows != state dimension"));
    }
    if c.ncols() != n {
        return Err(Error::DimensionMismatch("C columns != state dimension"));
    }
    if d.shape() != (c.nrows(), b.ncols()) {
        return Err(Error::DimensionMismatch("D must be p x m"));
    }
    if !b.is_finite() || !c.is_finite() || !d.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub(crate) fn mass_lu(m: &Operator) -> Result<Factor> {
    match m {
        Operator::Dense(d) => Factor::of_dense(d),
        Operator::Sparse(s) => Factor::of_sparse(s),
        Operator::Schur(_) => Err(Error::DimensionMismatch("mass matrix must be explicit")),
    }
}

/// Cholesky factor `M = L L^T` of an explicit SPD mass matrix.
#[derive(Clone, Debug)]
pub enum MassCholesky {
    Dense(Cholesky),
    Sparse(SparseCholesky),
}

impl MassCholesky {
    pub fn factor(m: &Operator) -> Result<Self> {
        match m {
            Operator::Dense(d) => Ok(MassCholesky::Dense(Cholesky::factor(d)?)),
            Operator::Sparse(s) => Ok(MassCholesky::Sparse(SparseCholesky::factor(s)?)),
            Operator::Schur(_) => Err(Error::NotSpd),
        }
    }

    /// `L^{-1} X`.
    pub fn solve_lower(&self, x: &Mat) -> Mat {
        match self {
            MassCholesky::Dense(c) => c.solve_lower(x),
            MassCholesky::Sparse(c) => c.solve_lower(x),
        }
    }

    /// `L^{-T} X`.
    pub fn solve_upper(&self, x: &Mat) -> Mat {
        match self {
            MassCholesky::Dense(c) => c.solve_upper(x),
            MassCholesky::Sparse(c) => c.solve_upper(x),
        }
    }

    /// `L X`.
    pub fn mul_lower(&self, x: &Mat) -> Mat {
        match self {
            MassCholesky::Dense(c) => c.l().matmul(x),
            MassCholesky::Sparse(c) => c.mul_lower(x),
        }
    }

    /// `L^T X`.
    pub fn mul_upper(&self, x: &Mat) -> Mat {
        match self {
            MassCholesky::Dense(c) => c.l().tr_matmul(x),
            MassCholesky::Sparse(c) => c.mul_upper(x),
        }
    }

    pub fn l_dense(&self) -> Mat {
        match self {
            MassCholesky::Dense(c) => c.l().clone(),
            MassCholesky::Sparse(c) => c.l().to_dense(),
        }
    }
}

/// Any supported realization.
#[derive(Clone, Debug)]
pub enum LtiSystem {
    Standard(StandardSystem),
    Generalized(GeneralizedSystem),
}

impl From<StandardSystem> for LtiSystem {
    fn from(s: StandardSystem) -> Self {
        LtiSystem::Standard(s)
    }
}

impl From<GeneralizedSystem> for LtiSystem {
    fn from(s: GeneralizedSystem) -> Self {
        LtiSystem::Generalized(s)
    }
}

impl LtiSystem {
    pub fn a(&self) -> &Operator {
        match self {
            LtiSystem::Standard(s) => &s.a,
            LtiSystem::Generalized(s) => &s.a,
        }
    }

    pub fn mass(&self) -> Option<&Operator> {
        match self {
            LtiSystem::Standard(_) => None,
            LtiSystem::Generalized(s) => Some(&s.m),
        }
    }

    pub fn mass_spd(&self) -> bool {
        match self {
            LtiSystem::Standard(_) => false,
            LtiSystem::Generalized(s) => s.spd,
        }
    }

    pub fn b(&self) -> &Mat {
        match self {
            LtiSystem::Standard(s) => &s.b,
            LtiSystem::Generalized(s) => &s.b,
        }
    }

    pub fn c(&self) -> &Mat {
        match self {
            LtiSystem::Standard(s) => &s.c,
            LtiSystem::Generalized(s) => &s.c,
        }
    }

    pub fn d(&self) -> &Mat {
        match self {
            LtiSystem::Standard(s) => &s.d,
            LtiSystem::Generalized(s) => &s.d,
        }
    }

    /// State dimension.
    pub fn order(&self) -> usize {
        self.a().dim()
    }

    pub fn inputs(&self) -> usize {
        self.b().ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c().nrows()
    }

    /// `M` applied to `X` (identity for standard systems).
    pub fn mass_apply(&self, x: &Mat) -> Result<Mat> {
        match self.mass() {
            None => Ok(x.clone()),
            Some(m) => m.apply(x),
        }
    }

    /// Dense `M` (identity for standard systems).
    pub fn mass_dense(&self) -> Result<Mat> {
        match self.mass() {
            None => Ok(Mat::identity(self.order())),
            Some(m) => m.to_dense(),
        }
    }

    /// Dual realization `(A^T, M^T, C^T, B^T, D^T)`; its reachability Gramian is the
    /// observability Gramian of `self`.
    pub fn dual(&self) -> Result<LtiSystem> {
        Ok(match self {
            LtiSystem::Standard(s) => LtiSystem::Standard(StandardSystem {
                a: s.a.transpose()?,
                b: s.c.transpose(),
                c: s.b.transpose(),
                d: s.d.transpose(),
            }),
            LtiSystem::Generalized(s) => LtiSystem::Generalized(GeneralizedSystem {
                m: s.m.transpose()?,
                a: s.a.transpose()?,
                b: s.c.transpose(),
                c: s.b.transpose(),
                d: s.d.transpose(),
                spd: s.spd,
            }),
        })
    }

    /// Copy with a different feed-through.
    pub fn with_d(&self, d: Mat) -> Result<LtiSystem> {
        if d.shape() != (self.outputs(), self.inputs()) {
            return Err(Error::DimensionMismatch("D must be p x m"));
        }
        let mut out = self.clone();
        match &mut out {
            LtiSystem::Standard(s) => s.d = d,
            LtiSystem::Generalized(s) => s.d = d,
        }
        Ok(out)
    }

    /// Dense `(K, B_K)` with `K = M^{-1} A`, `B_K = M^{-1} B` (or the Cholesky-congruent
    /// pair for SPD `M`), plus the map back to original coordinates.
    pub fn dense_standard_form(&self) -> Result<DenseForm> {
        let a = self.a().to_dense()?;
        match self {
            LtiSystem::Standard(s) => Ok(DenseForm {
                k: a,
                bk: s.b.clone(),
                l: None,
            }),
            LtiSystem::Generalized(g) if g.spd => {
                let t = cholesky_transform(g)?;
                Ok(DenseForm {
                    k: t.system.a.to_dense()?,
                    bk: t.system.b,
                    l: Some(t.l),
                })
            }
            LtiSystem::Generalized(g) => {
                let f = mass_lu(&g.m)?;
                Ok(DenseForm {
                    k: f.solve(&a)?,
                    bk: f.solve(&g.b)?,
                    l: None,
                })
            }
        }
    }
}

/// `M^{-1} X` (`X` for standard systems).
pub fn mass_solve(sys: &LtiSystem, x: &Mat) -> Result<Mat> {
    match sys.mass() {
        None => Ok(x.clone()),
        Some(m) => mass_lu(m)?.solve(x),
    }
}

/// Dense standard-form equivalent of a system, used by the oracle paths.
#[derive(Clone, Debug)]
pub struct DenseForm {
    pub k: Mat,
    pub bk: Mat,
    /// Cholesky factor of `M` when the congruence form was used.
    pub l: Option<Mat>,
}

impl DenseForm {
    /// Map a factor from working to original coordinates (`Z = L^{-T} Z_K`).
    pub fn lift_factor(&self, z: &Mat) -> Mat {
        match &self.l {
            None => z.clone(),
            Some(l) => solve_upper_dense(l, z),
        }
    }

    /// Map a Gramian from working to original coordinates (`P = L^{-T} P_K L^{-1}`).
    pub fn lift_gramian(&self, p: &Mat) -> Mat {
        match &self.l {
            None => p.clone(),
            Some(l) => {
                let x = solve_upper_dense(l, p);
                solve_upper_dense(l, &x.transpose()).symmetrized()
            }
        }
    }
}

fn solve_upper_dense(l: &Mat, b: &Mat) -> Mat {
    let n = l.nrows();
    let mut x = b.clone();
    for c in 0..x.ncols() {
        let col = x.col_mut(c);
        for i in (0..n).rev() {
            let mut s = col[i];
            for k in i + 1..n {
                s -= l[(k, i)] * col[k];
            }
            col[i] = s / l[(i, i)];
        }
    }
    x
}

/// Semi-explicit index-1 descriptor system
/// `[M1 0; 0 0] x' = [A1 A2; A3 A4] x + [B1; B2] u`, `y = [C1 C2] x`.
#[derive(Clone, Debug)]
pub struct DescriptorIndex1 {
    pub m1: Csc,
    pub a1: Csc,
    pub a2: Csc,
    pub a3: Csc,
    pub a4: Csc,
    pub b1: Mat,
    pub b2: Mat,
    pub c1: Mat,
    pub c2: Mat,
    pub m1_spd: bool,
}

impl DescriptorIndex1 {
    /// Split full `M`, `A`, `B`, `C` at `n_f` differential states.
    pub fn from_full(nf: usize, m: &Csc, a: &Csc, b: &Mat, c: &Mat, m1_spd: bool) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || m.shape() != (n, n) || b.nrows() != n || c.ncols() != n {
            return Err(Error::DimensionMismatch("descriptor matrices"));
        }
        if nf == 0 || nf >= n {
            return Err(Error::DimensionMismatch("n_f must satisfy 0 < n_f < n"));
        }
        let d = DescriptorIndex1 {
            m1: m.block(0, nf, 0, nf),
            a1: a.block(0, nf, 0, nf),
            a2: a.block(0, nf, nf, n),
            a3: a.block(nf, n, 0, nf),
            a4: a.block(nf, n, nf, n),
            b1: b.submatrix(0, nf, 0, b.ncols()),
            b2: b.submatrix(nf, n, 0, b.ncols()),
            c1: c.submatrix(0, c.nrows(), 0, nf),
            c2: c.submatrix(0, c.nrows(), nf, n),
            m1_spd,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let nf = self.a1.nrows();
        let na = self.a4.nrows();
        let (m, p) = (self.b1.ncols(), self.c1.nrows());
        let ok = self.m1.shape() == (nf, nf)
            && self.a1.shape() == (nf, nf)
            && self.a2.shape() == (nf, na)
            && self.a3.shape() == (na, nf)
            && self.a4.shape() == (na, na)
            && self.b1.shape() == (nf, m)
            && self.b2.shape() == (na, m)
            && self.c1.shape() == (p, nf)
            && self.c2.shape() == (p, na);
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("descriptor block shapes"))
        }
    }

    pub fn n_f(&self) -> usize {
        self.a1.nrows()
    }

    pub fn order(&self) -> usize {
        self.a1.nrows() + self.a4.nrows()
    }

    /// `C (s E - A)^{-1} B` of the unreduced descriptor realization.
    pub fn transfer_at(&self, s: C64) -> Result<CMat> {
        let nf = self.n_f();
        let n = self.order();
        let one = C64::new(1.0, 0.0);
        let zero_m = Csc::<f64>::zeros(n - nf, n - nf);
        let e = Csc::block2x2(
            &self.m1,
            &Csc::zeros(nf, n - nf),
            &Csc::zeros(n - nf, nf),
            &zero_m,
        )?;
        let a = Csc::block2x2(&self.a1, &self.a2, &self.a3, &self.a4)?;
        let pencil = e.cast::<C64>().lin_comb(s, &a.cast(), -one);
        let b: CMat = self.b1.vcat(&self.b2).cast();
        let x = Factor::of_sparse(&pencil)
            .map_err(|_| Error::SingularShift)?
            .solve(&b)?;
        let c: CMat = self.c1.hcat(&self.c2).cast();
        Ok(c.matmul(&x))
    }
}

/// Eliminate the algebraic states of an index-1 descriptor system. The returned
/// system carries the Schur complement `A1 - A2 A4^{-1} A3` implicitly; the
/// feed-through `-C2 A4^{-1} B2` is returned separately and stored in the system.
pub fn eliminate_descriptor(d: &DescriptorIndex1) -> Result<(GeneralizedSystem, Mat)> {
    d.validate()?;
    let sc = SchurComplement::new(d.a1.clone(), d.a2.clone(), d.a3.clone(), d.a4.clone())?;
    let y = sc.solve_a4(&d.b2)?;
    let b = d.b1.sub(&d.a2.mul_mat(&y));
    // C2 A4^{-1} = (A4^{-T} C2^T)^T
    let w = sc.solve_a4_transpose(&d.c2.transpose())?.transpose();
    let c = d.c1.sub(&d.a3.tr_mul_mat(&w.transpose()).transpose());
    let dd = w.matmul(&d.b2).scaled(-1.0);
    let sys = GeneralizedSystem::new(
        Operator::Sparse(d.m1.clone()),
        Operator::Schur(Box::new(sc)),
        b,
        c,
        Some(dd.clone()),
        d.m1_spd,
    )?;
    Ok((sys, dd))
}

/// Standard system congruent to a generalized one with SPD `M = L L^T`.
#[derive(Clone, Debug)]
pub struct CholeskyTransformed {
    pub system: StandardSystem,
    pub l: Mat,
}

impl CholeskyTransformed {
    /// Map a reachability factor back: `Z = L^{-T} Z_std`.
    pub fn lift(&self, z: &Mat) -> Mat {
        solve_upper_dense(&self.l, z)
    }
}

/// `(L^{-1} A L^{-T}, L^{-1} B, C L^{-T})` for SPD `M = L L^T` (dense).
pub fn cholesky_transform(g: &GeneralizedSystem) -> Result<CholeskyTransformed> {
    let chol = MassCholesky::factor(&g.m)?;
    let a = g.a.to_dense()?;
    let x = chol.solve_lower(&a);
    let k = chol.solve_lower(&x.transpose()).transpose();
    let b = chol.solve_lower(&g.b);
    let c = chol.solve_lower(&g.c.transpose()).transpose();
    let l = chol.l_dense();
    Ok(CholeskyTransformed {
        system: StandardSystem::new(Operator::Dense(k), b, c, Some(g.d.clone()))?,
        l,
    })
}

/// `(T^{-1} A T, T^{-1} B, C T)`.
pub fn similarity_transform(sys: &StandardSystem, t: &Mat) -> Result<StandardSystem> {
    let n = sys.a.dim();
    if t.shape() != (n, n) {
        return Err(Error::DimensionMismatch("transform size"));
    }
    let lu = Lu::factor(t).map_err(|e| match e {
        Error::SingularMatrix => Error::SingularTransform,
        other => other,
    })?;
    let a = sys.a.to_dense()?;
    let at = lu.solve(&a.matmul(t))?;
    let b = lu.solve(&sys.b)?;
    StandardSystem::new(Operator::Dense(at), b, sys.c.matmul(t), Some(sys.d.clone()))
}

/// Largest real part of the (generalized) spectrum, computed densely.
pub fn spectral_abscissa(sys: &LtiSystem) -> Result<f64> {
    if sys.order() == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let k = match sys.mass() {
        None => sys.a().to_dense()?,
        Some(m) => mass_lu(m)?.solve(&sys.a().to_dense()?)?,
    };
    spectral_abscissa_dense(&k)
}

/// Replace `A` with `A - alpha M` (`A - alpha I` for standard systems).
pub fn alpha_shift(sys: &LtiSystem, alpha: f64) -> Result<LtiSystem> {
    if alpha == 0.0 {
        return Ok(sys.clone());
    }
    let mut out = sys.clone();
    match &mut out {
        LtiSystem::Standard(s) => {
            let sparse = matches!(s.a, Operator::Sparse(_) | Operator::Schur(_));
            let id = Operator::identity_like(s.a.dim(), sparse);
            s.a = s.a.add_scaled(-alpha, &id)?;
        }
        LtiSystem::Generalized(g) => {
            g.a = g.a.add_scaled(-alpha, &g.m)?;
        }
    }
    Ok(out)
}

/// `H(s) = C (s M - A)^{-1} B + D` at a complex point.
pub fn transfer_at(sys: &LtiSystem, s: C64) -> Result<CMat> {
    let d: CMat = sys.d().cast();
    if sys.order() == 0 {
        return Ok(d);
    }
    let f = sys.a().factor_shifted(s, sys.mass())?;
    // (sM - A)^{-1} = -(A - sM)^{-1}
    let x = f.solve(&sys.b().cast())?;
    let c: CMat = sys.c().cast();
    Ok(d.sub(&c.matmul(&x)))
}

/// `H(i omega)`.
pub fn transfer_eval(sys: &LtiSystem, omega: f64) -> Result<CMat> {
    transfer_at(sys, C64::new(0.0, omega))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lyap_dense;
    use crate::linalg::testutil::{rand_mat, rand_stable, rng};

    fn scalar(a: f64, b: f64, c: f64) -> StandardSystem {
        StandardSystem::dense(
            Mat::from_rows(&[&[a]]),
            Mat::from_rows(&[&[b]]),
            Mat::from_rows(&[&[c]]),
        )
        .unwrap()
    }

    fn descriptor_example() -> DescriptorIndex1 {
        let m = Csc::from_dense(&Mat::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]));
        let a = Csc::from_dense(&Mat::from_rows(&[&[-1.0, 1.0], &[1.0, -2.0]]));
        DescriptorIndex1::from_full(
            1,
            &m,
            &a,
            &Mat::col_vector(&[1.0, 0.0]),
            &Mat::from_rows(&[&[1.0, 0.0]]),
            true,
        )
        .unwrap()
    }

    #[test]
    fn eliminate_hand_example() {
        let (g, d) = eliminate_descriptor(&descriptor_example()).unwrap();
        assert_eq!(g.a.to_dense().unwrap(), Mat::from_rows(&[&[-0.5]]));
        assert_eq!(g.b, Mat::from_rows(&[&[1.0]]));
        assert_eq!(g.c, Mat::from_rows(&[&[1.0]]));
        assert_eq!(d, Mat::from_rows(&[&[0.0]]));
        let sys = LtiSystem::from(g);
        let f = sys.a().factor_shifted(0.0, sys.mass()).unwrap();
        let v = f.solve(&Mat::from_rows(&[&[1.0]])).unwrap();
        assert!((v[(0, 0)] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn eliminate_decoupled_blocks() {
        let m = Csc::from_dense(&Mat::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]));
        let a = Csc::from_dense(&Mat::from_rows(&[&[-3.0, 0.0], &[0.0, 4.0]]));
        let b = Mat::col_vector(&[1.0, 2.0]);
        let c = Mat::from_rows(&[&[5.0, 3.0]]);
        let d = DescriptorIndex1::from_full(1, &m, &a, &b, &c, false).unwrap();
        let (g, dd) = eliminate_descriptor(&d).unwrap();
        assert_eq!(g.a.to_dense().unwrap(), Mat::from_rows(&[&[-3.0]]));
        assert_eq!(g.b, Mat::from_rows(&[&[1.0]]));
        assert_eq!(g.c, Mat::from_rows(&[&[5.0]]));
        assert!((dd[(0, 0)] + 3.0 * 2.0 / 4.0).abs() < 1e-15);
        // B2 = 0, C2 = 0 gives D = 0
        let d0 = DescriptorIndex1::from_full(
            1,
            &m,
            &Csc::from_dense(&Mat::from_rows(&[&[-1.0, 1.0], &[1.0, -2.0]])),
            &Mat::col_vector(&[1.0, 0.0]),
            &Mat::from_rows(&[&[1.0, 0.0]]),
            false,
        )
        .unwrap();
        assert_eq!(eliminate_descriptor(&d0).unwrap().1, Mat::zeros(1, 1));
    }

    #[test]
    fn cholesky_transform_cases() {
        let mut g = rng(41);
        let a = rand_stable(&mut g, 4);
        let b = rand_mat(&mut g, 4, 1);
        let c = rand_mat(&mut g, 1, 4);
        let gs = GeneralizedSystem::new(
            Operator::Dense(Mat::identity(4)),
            Operator::Dense(a.clone()),
            b.clone(),
            c.clone(),
            None,
            true,
        )
        .unwrap();
        let t = cholesky_transform(&gs).unwrap();
        assert_eq!(t.system.a.to_dense().unwrap(), a);
        assert_eq!(t.system.b, b);

        let gs = GeneralizedSystem::new(
            Operator::Dense(Mat::diag(&[4.0])),
            Operator::Dense(Mat::from_rows(&[&[3.0]])),
            Mat::from_rows(&[&[5.0]]),
            Mat::from_rows(&[&[7.0]]),
            None,
            true,
        )
        .unwrap();
        let t = cholesky_transform(&gs).unwrap();
        assert_eq!(t.system.a.to_dense().unwrap()[(0, 0)], 0.75);
        assert_eq!(t.system.b[(0, 0)], 2.5);
        assert_eq!(t.system.c[(0, 0)], 3.5);
    }

    #[test]
    fn cholesky_transform_generalized_lyapunov() {
        let mut g = rng(42);
        let n = 5;
        let r = rand_mat(&mut g, n, n);
        let m = r.matmul_tr(&r).add(&Mat::identity(n));
        let a = rand_stable(&mut g, n).scaled(1.0).sub(&m);
        let b = rand_mat(&mut g, n, 2);
        let gs = GeneralizedSystem::new(
            Operator::Dense(m.clone()),
            Operator::Dense(a.clone()),
            b.clone(),
            rand_mat(&mut g, 1, n),
            None,
            true,
        )
        .unwrap();
        let t = cholesky_transform(&gs).unwrap();
        let ps = lyap_dense(
            &t.system.a.to_dense().unwrap(),
            &t.system.b.matmul_tr(&t.system.b),
        )
        .unwrap();
        let x = t.lift(&ps);
        let p = t.lift(&x.transpose());
        let res = a.matmul(&p).matmul_tr(&m);
        let res = res.add(&res.transpose()).add(&b.matmul_tr(&b));
        assert!(res.max_abs() <= 1e-9 * b.matmul_tr(&b).max_abs());
    }

    #[test]
    fn similarity_cases() {
        let s = scalar(-1.0, 2.0, 3.0);
        let t2 = similarity_transform(&s, &Mat::identity(1).scaled(2.0)).unwrap();
        assert_eq!(t2.a.to_dense().unwrap()[(0, 0)], -1.0);
        assert_eq!(t2.b[(0, 0)], 1.0);
        assert_eq!(t2.c[(0, 0)], 6.0);
        let mut g = rng(43);
        let sys = StandardSystem::dense(
            rand_stable(&mut g, 6),
            rand_mat(&mut g, 6, 2),
            rand_mat(&mut g, 2, 6),
        )
        .unwrap();
        let t = rand_mat(&mut g, 6, 6).add(&Mat::identity(6).scaled(3.0));
        let sys2 = similarity_transform(&sys, &t).unwrap();
        let h1 = transfer_at(&sys.into(), C64::new(1.0, 0.0)).unwrap();
        let h2 = transfer_at(&sys2.into(), C64::new(1.0, 0.0)).unwrap();
        assert!(h1.sub(&h2).max_abs() <= 1e-10 * h1.max_abs());
        let sing = Mat::zeros(1, 1);
        assert_eq!(
            similarity_transform(&s, &sing).unwrap_err(),
            Error::SingularTransform
        );
    }

    #[test]
    fn abscissa_and_shift() {
        let sys: LtiSystem =
            StandardSystem::dense(Mat::diag(&[-1.0, -5.0]), Mat::zeros(2, 1), Mat::zeros(1, 2))
                .unwrap()
                .into();
        assert_eq!(spectral_abscissa(&sys).unwrap(), -1.0);
        let rot: LtiSystem = StandardSystem::dense(
            Mat::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]),
            Mat::zeros(2, 1),
            Mat::zeros(1, 2),
        )
        .unwrap()
        .into();
        assert!(spectral_abscissa(&rot).unwrap().abs() < 1e-15);
        let g: LtiSystem = GeneralizedSystem::new(
            Operator::Dense(Mat::identity(1)),
            Operator::Dense(Mat::from_rows(&[&[0.1]])),
            Mat::zeros(1, 1),
            Mat::zeros(1, 1),
            None,
            true,
        )
        .unwrap()
        .into();
        let sh = alpha_shift(&g, 0.2).unwrap();
        assert!((sh.a().to_dense().unwrap()[(0, 0)] + 0.1).abs() < 1e-15);
        assert_eq!(
            alpha_shift(&g, 0.0).unwrap().a().to_dense().unwrap()[(0, 0)],
            0.1
        );
    }

    #[test]
    fn transfer_cases() {
        let s: LtiSystem = scalar(-1.0, 1.0, 1.0).into();
        let h0 = transfer_eval(&s, 0.0).unwrap();
        assert!((h0[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(transfer_eval(&s, 1e6).unwrap()[(0, 0)].norm() <= 1.1e-6);
        let empty: LtiSystem = StandardSystem::new(
            Operator::Dense(Mat::zeros(0, 0)),
            Mat::zeros(0, 1),
            Mat::zeros(1, 0),
            Some(Mat::from_rows(&[&[2.5]])),
        )
        .unwrap()
        .into();
        assert_eq!(
            transfer_eval(&empty, 3.0).unwrap()[(0, 0)],
            C64::new(2.5, 0.0)
        );
    }

    #[test]
    fn descriptor_transfer_preserved() {
        let d = descriptor_example();
        let (g, _) = eliminate_descriptor(&d).unwrap();
        let sys: LtiSystem = g.into();
        for k in 0..10 {
            let s = C64::new(0.1 * k as f64, 0.7 * k as f64 - 1.0);
            let h = transfer_at(&sys, s).unwrap();
            let hf = d.transfer_at(s).unwrap();
            assert!(h.sub(&hf).max_abs() <= 1e-12 * hf.max_abs());
        }
    }
}
