//! Numerical engine shared by every other module: adaptive quadrature,
//! dense symmetric linear algebra, sampled grid functions and an
//! extended-precision arithmetic context.

mod gauss;
mod grid;
mod linalg;
mod precision;
mod quadrature;

pub use gauss::{gauss_legendre, GaussRule};
pub use grid::{Grid, GridFunction};
pub use linalg::{
    generalized_sym_eig, solve_spd, sym_eig, Matrix, PencilSpectrum, SymEigen, SymMatrix,
};
pub use precision::{binomial, ExtFloat, PrecisionContext, PrecisionMode, DIGITS_ENV_VAR};
pub use quadrature::{
    integrate, integrate_pv, integrate_pv_with_breaks, integrate_with_breaks, Domain, Estimate, QuadratureKind,
    QuadratureSpec,
};
