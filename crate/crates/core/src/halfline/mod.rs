//! The Cauchy process killed on leaving D = (0, ∞).
//!
//! ψ_λ(x) = sin(λx + π/8) − r(λx) are bounded generalized eigenfunctions of the
//! killed semigroup, r is a totally monotone Laplace transform, and the
//! transition density, exit-time law and the Π transform are all built on them.

mod kernel;
mod remainder;
mod transform;

pub use kernel::{
    exit_density, exit_mass, f_exit, heat_kernel, heat_kernel_spectral, survival, ExitLaw, KernelTable,
    MassReport,
};
pub use remainder::{
    laplace_psi, laplace_psi_quadrature, psi, r, r_adaptive, r_deriv, r_integral, r_squared_integral,
    remainder_weight, remainder_weight_eta_form, EigenfunctionEval, PSI_SUP_BOUND,
};
pub use transform::pi_transform;
