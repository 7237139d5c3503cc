//! Generalized prolate spheroidal wave functions: the eigenfunctions of the
//! weighted finite Fourier transform with weight (1-x^2)^alpha on [-1, 1].
//!
//! The crate computes the Jacobi-expansion eigensystem (chi_n and the
//! expansion coefficients), the two derived eigenvalue families |mu_n| and
//! lambda_n, a Nystrom discretization of the concentration operator as a
//! brute-force cross-check, machine verification of the decay bounds and
//! local estimates satisfied by these quantities, and spectral projection of
//! signals onto the computed basis.

pub mod approx;
pub mod basis;
pub mod bounds;
pub mod eigtri;
pub mod error;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, Result};
