use crate::error::Result;
use crate::linalg::{CMat, Mat};
use crate::C64;

use super::operator::{Factor, Operator, ShiftedFactor};
use super::system::{mass_lu, LtiSystem, MassCholesky};

enum Mass {
    Identity,
    General(Factor),
    Spd(MassCholesky),
}

/// The standard-form operator `K` the Krylov engine works with:
/// `K = A`, `K = M^{-1} A`, or `K = L^{-1} A L^{-T}` for SPD `M = L L^T`.
/// Only actions and shifted solves are exposed.
pub struct KrylovOperator<'a> {
    a: &'a Operator,
    m: Option<&'a Operator>,
    mass: Mass,
    b: Mat,
    symmetric: bool,
}

impl<'a> KrylovOperator<'a> {
    pub fn new(sys: &'a LtiSystem) -> Result<Self> {
        let a = sys.a();
        let (mass, b) = match sys {
            LtiSystem::Standard(s) => (Mass::Identity, s.b.clone()),
            LtiSystem::Generalized(g) if g.spd => {
                let c = MassCholesky::factor(&g.m)?;
                let b = c.solve_lower(&g.b);
                (Mass::Spd(c), b)
            }
            LtiSystem::Generalized(g) => {
                let f = mass_lu(&g.m)?;
                let b = f.solve(&g.b)?;
                (Mass::General(f), b)
            }
        };
        let symmetric = !matches!(mass, Mass::General(_)) && a.is_symmetric();
        Ok(KrylovOperator {
            a,
            m: sys.mass(),
            mass,
            b,
            symmetric,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// Input matrix in working coordinates.
    pub fn b(&self) -> &Mat {
        &self.b
    }

    /// `K` is symmetric.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// `K X`.
    pub fn apply(&self, x: &Mat) -> Result<Mat> {
        match &self.mass {
            Mass::Identity => self.a.apply(x),
            Mass::General(f) => f.solve(&self.a.apply(x)?),
            Mass::Spd(c) => Ok(c.solve_lower(&self.a.apply(&c.solve_upper(x))?)),
        }
    }

    /// `(K - s I)^{-1} W` for a real shift.
    pub fn solve_real(&self, s: f64, w: &Mat) -> Result<Mat> {
        let f: ShiftedFactor<f64> = self.a.factor_shifted(s, self.m)?;
        match &self.mass {
            Mass::Identity => f.solve(w),
            Mass::General(_) => f.solve(&self.m.expect("mass").apply(w)?),
            Mass::Spd(c) => Ok(c.mul_upper(&f.solve(&c.mul_lower(w))?)),
        }
    }

    /// `(K - s I)^{-1} W` for a complex shift and real `W`.
    pub fn solve_complex(&self, s: C64, w: &Mat) -> Result<CMat> {
        let f: ShiftedFactor<C64> = self.a.factor_shifted(s, self.m)?;
        match &self.mass {
            Mass::Identity => f.solve(&w.to_complex()),
            Mass::General(_) => f.solve(&self.m.expect("mass").apply(w)?.to_complex()),
            Mass::Spd(c) => {
                let v = f.solve(&c.mul_lower(w).to_complex())?;
                let re = c.mul_upper(&v.real_part());
                let im = c.mul_upper(&v.imag_part());
                Ok(join(&re, &im))
            }
        }
    }

    /// Map a factor from working to original coordinates.
    pub fn lift(&self, z: &Mat) -> Mat {
        match &self.mass {
            Mass::Spd(c) => c.solve_upper(z),
            _ => z.clone(),
        }
    }
}

fn join(re: &Mat, im: &Mat) -> CMat {
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| {
        C64::new(re[(i, j)], im[(i, j)])
    })
}
