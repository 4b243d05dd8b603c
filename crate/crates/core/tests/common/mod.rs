//! Computations shared by the integration tests and the acceptance report.
#![allow(dead_code)]

use std::f64::consts::PI;

use cauchy_spectral::halfline::{heat_kernel, pi_transform, psi};
use cauchy_spectral::numerics::{integrate_with_breaks, Domain, Estimate, Grid, GridFunction, QuadratureSpec};
use cauchy_spectral::Result;

/// ∫₀^∞ p^D_t(x, y) dy, split at the peak and then at doubling distances.
pub fn kernel_mass(t: f64, x: f64) -> Result<Estimate> {
    let mut breaks: Vec<f64> = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0].iter().map(|f| f * x).collect();
    let mut b = 4.0 * x;
    while b < 1e6 * x {
        breaks.push(b);
        b *= 2.0;
    }
    let spec = QuadratureSpec::default().with_tol(1e-11, 1e-10);
    integrate_with_breaks(|y| heat_kernel(t, x, y).unwrap(), Domain::UpperHalfLine(0.0), &breaks, &spec)
}

pub struct KernelAction {
    pub value: f64,
    pub quadrature_error: f64,
    /// Bound on the discarded part beyond `cutoff`.
    pub tail_bound: f64,
}

/// ∫₀^Y p^D_t(x, y) ψ_λ(y) dy with panels of one half period of ψ_λ.
///
/// Beyond Y the integrand is p^D_t(x, ·) (decreasing, ≤ t/(π(y−x)²)) times an
/// oscillation of bounded antiderivative, so the tail is at most 2·1.14·t/(π(Y−x)²)·(π/λ).
pub fn kernel_action_on_psi(t: f64, x: f64, lambda: f64, cutoff: f64) -> Result<KernelAction> {
    let n = (cutoff * lambda / PI).ceil() as usize;
    let breaks: Vec<f64> = (1..n).map(|k| k as f64 * cutoff / n as f64).collect();
    let spec = QuadratureSpec::default().with_tol(1e-9, 1e-8);
    let e = integrate_with_breaks(
        |y| heat_kernel(t, x, y).unwrap() * psi(lambda, y).psi,
        Domain::Interval(0.0, cutoff),
        &breaks,
        &spec,
    )?;
    let tail_bound = 2.0 * 1.14 * t / (PI * (cutoff - x).powi(2)) * PI / lambda;
    Ok(KernelAction { value: e.value, quadrature_error: e.error, tail_bound })
}

/// exp(−1/((λ−1)(2−λ))) on (1, 2)
pub fn bump(l: f64) -> f64 {
    if l > 1.0 && l < 2.0 {
        (-1.0 / ((l - 1.0) * (2.0 - l))).exp()
    } else {
        0.0
    }
}

pub struct PlancherelReport {
    /// ‖Πf‖² / ((π/2)‖f‖²)
    pub norm_ratio: f64,
    /// max |Π²f − (π/2)f| / max |(π/2)f|
    pub inversion_error: f64,
}

/// The bump sampled with spacing 0.005 on [0, 3]; Πf on [0, 60] with
/// spacing 0.1. For the second transform Πf is tapered to zero over
/// [40, 60] (it decays like x^{−2}), and Π²f is read on the bump's grid.
pub fn plancherel() -> Result<PlancherelReport> {
    let lg = Grid::trapezoid(0.0, 3.0, 601)?;
    let f = lg.sample(bump);
    let xg = Grid::trapezoid(0.0, 60.0, 601)?;
    let pf = pi_transform(&f, &xg)?;
    let norm_ratio = pf.norm2_squared() / (PI / 2.0 * f.norm2_squared());
    let tapered: Vec<f64> = pf.nodes.iter().zip(&pf.values).map(|(&x, &v)| v * taper(x)).collect();
    let pf = GridFunction::new(pf.nodes.clone(), tapered, pf.weights.clone())?;
    let out = Grid::trapezoid(0.5, 2.5, 201)?;
    let ppf = pi_transform(&pf, &out)?;
    let peak = PI / 2.0 * f.sup_norm();
    let inversion_error = out
        .nodes
        .iter()
        .zip(&ppf.values)
        .map(|(&l, &v)| (v - PI / 2.0 * bump(l)).abs())
        .fold(0.0, f64::max)
        / peak;
    Ok(PlancherelReport { norm_ratio, inversion_error })
}

fn taper(x: f64) -> f64 {
    if x <= 40.0 {
        1.0
    } else if x >= 60.0 {
        0.0
    } else {
        let s = (x - 40.0) / 20.0;
        0.5 * (1.0 + (PI * s).cos())
    }
}
