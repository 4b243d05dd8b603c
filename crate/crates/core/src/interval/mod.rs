//! The Cauchy process killed on leaving D = (−1, 1).
//!
//! Approximate eigenfunctions φ̃_n glued from two half-line eigenfunctions,
//! the generator residual that controls them, and certified eigenvalue
//! brackets: Rayleigh–Ritz on the Green operator in a Legendre basis for
//! upper bounds, intermediate problems for lower bounds.

mod approx;
mod bounds;
mod intermediate;
mod ritz;

pub use approx::{
    generator_apply, generator_residual, lemma_closeness_bound, mu, norm_bounds, q_cutoff, residual_bound, tilde_phi,
    ApproxEigenfunction, Parity, PiecewiseFn, PiecewiseSmooth, ResidualReport,
};
pub use bounds::{bracket, bracket_from, BoundMeta, EigBound, REFERENCE_BRACKETS};
pub use intermediate::{assemble_intermediate, gram_entry, lower_bounds, lower_bounds_from, IntermediateMatrices, PencilObservation};
pub use ritz::{
    assemble_rayleigh_ritz, green_moment, legendre_coefficient, required_digits, rr_eigenfunction, upper_bounds,
    upper_bounds_from, BasisMatrix, MatrixRole, PiRational, MAX_BASIS,
};
