//! Spectral theory of the Cauchy process killed on leaving the half-line or
//! the interval (−1, 1).
//!
//! * [`numerics`]: quadrature, symmetric eigensolvers, extended precision.
//! * [`specialfun`]: Ti₂, η and the boundary function B.
//! * [`halfline`]: generalized eigenfunctions ψ_λ, the heat kernel, exit times, the Π transform.
//! * [`interval`]: two-sided eigenvalue bounds on (−1, 1) and approximate eigenfunctions.
//! * [`mc`]: a Monte Carlo oracle for survival probabilities.

pub mod error;
pub mod halfline;
pub mod interval;
pub mod mc;
pub mod numerics;
pub mod specialfun;

pub use error::{Error, Result};
