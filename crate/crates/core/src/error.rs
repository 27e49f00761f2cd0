use core::fmt;

/// Errors raised by the numerical kernels and the algorithms built on them.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes do not conform.
    DimensionMismatch(&'static str),
    /// A NaN or infinite entry was supplied.
    NonFinite,
    /// LU pivot fell below `eps * ||A||`.
    SingularMatrix,
    /// Iterative eigen/SVD kernel hit its iteration cap.
    NoConvergence(&'static str),
    /// `||e^A||` is not representable.
    Overflow,
    /// `lambda_i + lambda_j ~ 0` in a Lyapunov solve.
    SpectrumConflict,
    /// The algebraic block `A4` of an index-1 descriptor system is singular.
    SingularBlock,
    /// A shift collides with the (generalized) spectrum.
    SingularShift,
    /// Cholesky factorization failed.
    NotSpd,
    /// Similarity transform is singular.
    SingularTransform,
    /// Eigenvector matrix too ill-conditioned for the Cauchy representation.
    NearDefective { condition: f64 },
    /// A mode has (numerically) zero input weight in eigencoordinates.
    Uncontrollable,
    /// All Ritz values coincide, so the shift hull is a single point.
    DegenerateHull,
    /// Rational Krylov subspace reached its dimension cap before converging.
    MaxDimExceeded { dim: usize },
    /// Basis could not be expanded any further without convergence.
    Stagnation { dim: usize },
    /// Requested reduced order exceeds the numerical rank of `Z_Q^T M Z_P`.
    RankDeficient { requested: usize, available: usize },
    /// Implicit midpoint step matrix is singular.
    SingularStep,
    /// Time grids of two trajectories differ.
    GridMismatch,
    /// MAC of a zero vector.
    ZeroVector,
    /// Time window must satisfy `0 <= t_s < t_e < inf`.
    InvalidWindow,
    /// Solver configuration outside its documented range.
    InvalidConfig(&'static str),
    /// Krylov path refused on a system whose spectral abscissa is `>= 0`.
    Unstable { abscissa: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch: {what}"),
            Error::NonFinite => f.write_str("matrix contains NaN or infinite entries"),
            Error::SingularMatrix => f.write_str("matrix is numerically singular"),
            Error::NoConvergence(what) => write!(f, "{what} did not converge"),
            Error::Overflow => f.write_str("matrix exponential overflows"),
            Error::SpectrumConflict => {
                f.write_str("Lyapunov operator is singular (eigenvalue pair sums to zero)")
            }
            Error::SingularBlock => f.write_str("algebraic block A4 is singular"),
            Error::SingularShift => f.write_str("shift lies in the spectrum"),
            Error::NotSpd => f.write_str("matrix is not symmetric positive definite"),
            Error::SingularTransform => f.write_str("similarity transform is singular"),
            Error::NearDefective { condition } => {
                write!(
                    f,
                    "eigenvector matrix is nearly defective (cond ~ {condition:e})"
                )
            }
            Error::Uncontrollable => {
                f.write_str("pair (A, B) is not controllable in eigencoordinates")
            }
            Error::DegenerateHull => f.write_str("Ritz values coincide; shift hull is degenerate"),
            Error::MaxDimExceeded { dim } => {
                write!(f, "subspace dimension cap exceeded at dim {dim}")
            }
            Error::Stagnation { dim } => {
                write!(f, "Krylov basis stagnated at dim {dim} without convergence")
            }
            Error::RankDeficient {
                requested,
                available,
            } => write!(
                f,
                "requested order {requested} exceeds available numerical rank {available}"
            ),
            Error::SingularStep => f.write_str("implicit midpoint step matrix is singular"),
            Error::GridMismatch => f.write_str("trajectory time grids differ"),
            Error::ZeroVector => f.write_str("MAC of a zero vector"),
            Error::InvalidWindow => f.write_str("time window must satisfy 0 <= t_s < t_e < inf"),
            Error::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            Error::Unstable { abscissa } => write!(
                f,
                "system is not asymptotically stable (spectral abscissa {abscissa:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
