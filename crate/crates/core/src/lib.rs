//! Time-limited balanced truncation for linear time-invariant systems.
//!
//! The crate is `no_std` (with `alloc`). It contains the dense kernels the
//! rest is built on ([`linalg`]), a small sparse layer ([`sparse`]), system
//! representations and shifted solves ([`model`]), infinite / time-limited /
//! modified Gramians including the rational Krylov low-rank solver
//! ([`gramians`]), square-root balanced truncation ([`reduction`]) and the
//! time-domain validation tools ([`simulate`]). Deterministic synthetic
//! benchmark systems live in [`synth`].
//!
//! Enable the `std` feature to have solver wall times recorded.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod gramians;
pub mod linalg;
pub mod model;
pub mod reduction;
pub mod scalar;
pub mod simulate;
pub mod sparse;
pub mod synth;

mod clock;

pub use error::{Error, Result};
pub use linalg::{CMat, Mat};
pub use num_complex::Complex64 as C64;
