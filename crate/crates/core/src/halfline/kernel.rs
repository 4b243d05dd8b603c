use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_with_breaks, Domain, Matrix, QuadratureSpec};
use crate::specialfun::{ti2, CATALAN};

use super::remainder::{psi, PSI_SUP_BOUND};

/// f(s) = (1/π) s^{1 − arctan(s)/π} (1+s²)^{−3/4} e^{Ti₂(s)/π}; the exit-time
/// law from x has density f(t/x)/t.
///
/// ```
/// use cauchy_spectral::halfline::f_exit;
/// assert_eq!(f_exit(0.0), 0.0);
/// assert!((f_exit(1e-6) / 1e-6 * std::f64::consts::PI - 1.0).abs() < 1e-4);
/// ```
pub fn f_exit(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s.is_infinite() {
        return 0.0;
    }
    let e = (1.0 - s.atan() / PI) * s.ln() - 0.75 * (s * s).ln_1p() + ti2(s) / PI;
    e.exp() / PI
}

/// f(s)/s, continuous at 0 with value 1/π.
fn f_over_s(s: f64) -> f64 {
    if s <= 0.0 {
        return 1.0 / PI;
    }
    let e = -(s.atan() / PI) * s.ln() - 0.75 * (s * s).ln_1p() + ti2(s) / PI;
    e.exp() / PI
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Density of the first exit time from (0, ∞) started at x, at time t.
pub fn exit_density(x: f64, t: f64) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    Ok(f_exit(t / x) / t)
}

fn spec_default() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-14, 1e-13)
}

/// P^x(τ > t) = 1 − ∫₀^{t/x} f(u)/u du.
///
/// For t > x the complementary tail ∫_{t/x}^∞ f(u)/u du is integrated
/// instead, which keeps small survival probabilities accurate.
pub fn survival(x: f64, t: f64) -> Result<f64> {
    check_positive("x", x)?;
    check_positive("t", t)?;
    let u = t / x;
    let spec = spec_default();
    let v = if u <= 1.0 {
        1.0 - integrate(f_over_s, Domain::Interval(0.0, u), &spec)?.value
    } else {
        integrate(f_over_s, Domain::UpperHalfLine(u), &spec)?.value
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Total mass of the exit-time density, with the tail beyond `horizon` bounded
/// in closed form by e^{±𝒞/π}/π · ∫_T^∞ (1+s²)^{−3/4} ds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassReport {
    pub horizon: f64,
    pub integral: f64,
    pub quadrature_error: f64,
    pub tail_lower: f64,
    pub tail_upper: f64,
}

impl MassReport {
    pub fn mass_lower(&self) -> f64 {
        self.integral - self.quadrature_error + self.tail_lower
    }

    pub fn mass_upper(&self) -> f64 {
        self.integral + self.quadrature_error + self.tail_upper
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.mass_lower() + self.mass_upper())
    }
}

/// ∫₀^∞ exit_density(x, t) dt in the scale-free variable u = t/x.
pub fn exit_mass(horizon: f64) -> Result<MassReport> {
    check_positive("horizon", horizon)?;
    let spec = spec_default();
    let mut breaks = Vec::new();
    let mut b = 1.0;
    while b < horizon {
        breaks.push(b);
        b *= 10.0;
    }
    let e = integrate_with_breaks(f_over_s, Domain::Interval(0.0, horizon), &breaks, &spec)?;
    // for s ≥ T: s^{−3/2}(1 + T^{−2})^{−3/4} ≤ (1+s²)^{−3/4} ≤ s^{−3/2}
    let tail_pow = 2.0 / horizon.sqrt();
    let lo = tail_pow * (1.0 + horizon.powi(-2)).powf(-0.75);
    let c = (CATALAN / PI).exp();
    Ok(MassReport {
        horizon,
        integral: e.value,
        quadrature_error: e.error,
        tail_lower: lo / (c * PI),
        tail_upper: tail_pow * c / PI,
    })
}

/// Free Cauchy transition density p_t(y − x).
fn cauchy_density(t: f64, d: f64) -> f64 {
    t / (PI * (t * t + d * d))
}

/// p^D_t(x, y) from the closed form: Cauchy kernel minus
/// (1/(xy)) ∫₀ᵗ f(s/x) f((t−s)/y) / (s/x + (t−s)/y) ds.
///
/// Rounding can push the difference a few ulps below zero when the killed
/// density is tiny; such values are returned as 0.
pub fn heat_kernel(t: f64, x: f64, y: f64) -> Result<f64> {
    check_positive("t", t)?;
    if x <= 0.0 || y <= 0.0 {
        return Ok(0.0);
    }
    let spec = spec_default();
    let breaks = [0.5 * t];
    let corr = integrate_with_breaks(
        |s| {
            let a = s / x;
            let b = (t - s) / y;
            if a <= 0.0 || b <= 0.0 {
                0.0
            } else {
                f_exit(a) * f_exit(b) / (a + b)
            }
        },
        Domain::Interval(0.0, t),
        &breaks,
        &spec,
    )?;
    let v = cauchy_density(t, x - y) - corr.value / (x * y);
    Ok(v.max(0.0))
}

/// p^D_t(x, y) = (2/π) ∫₀^∞ ψ_λ(x) ψ_λ(y) e^{−λt} dλ.
///
/// The λ-integral is truncated at Λ where the bound (2/π)·1.14²·e^{−Λt}/t on
/// the tail drops below `tail_tol`.
pub fn heat_kernel_spectral(t: f64, x: f64, y: f64, spec: &QuadratureSpec, tail_tol: f64) -> Result<f64> {
    check_positive("t", t)?;
    check_positive("tail_tol", tail_tol)?;
    if x <= 0.0 || y <= 0.0 {
        return Ok(0.0);
    }
    let c = 2.0 / PI * PSI_SUP_BOUND * PSI_SUP_BOUND / t;
    let lam_max = ((c / tail_tol).ln() / t).max(1.0);
    // resolve the faster oscillation of the product
    let period = PI / x.max(y);
    let n = ((lam_max / period).ceil() as usize).clamp(1, 100_000);
    let breaks: Vec<f64> = (1..n).map(|k| k as f64 * lam_max / n as f64).collect();
    let e = integrate_with_breaks(
        |l| {
            if l <= 0.0 {
                return 0.0;
            }
            psi(l, x).psi * psi(l, y).psi * (-l * t).exp()
        },
        Domain::Interval(0.0, lam_max),
        &breaks,
        spec,
    )?;
    Ok(2.0 / PI * e.value)
}

/// p^D_t on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub t: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// values[(i, j)] = p^D_t(xs[i], ys[j])
    pub values: Matrix,
}

impl KernelTable {
    pub fn evaluate(t: f64, xs: &[f64], ys: &[f64]) -> Result<Self> {
        check_positive("t", t)?;
        let cells: Vec<(usize, usize)> = (0..xs.len()).flat_map(|i| (0..ys.len()).map(move |j| (i, j))).collect();
        let vals: Vec<f64> = cells
            .par_iter()
            .map(|&(i, j)| heat_kernel(t, xs[i], ys[j]))
            .collect::<Result<Vec<_>>>()?;
        let values = Matrix::from_fn(xs.len(), ys.len(), |i, j| vals[i * ys.len() + j]);
        Ok(KernelTable { t, xs: xs.to_vec(), ys: ys.to_vec(), values })
    }
}

/// Exit-time density and survival function for one starting point.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitLaw {
    pub x: f64,
    pub ts: Vec<f64>,
    pub density: Vec<f64>,
    pub survival: Vec<f64>,
}

impl ExitLaw {
    pub fn evaluate(x: f64, ts: &[f64]) -> Result<Self> {
        check_positive("x", x)?;
        let rows: Vec<(f64, f64)> = ts
            .par_iter()
            .map(|&t| Ok((exit_density(x, t)?, survival(x, t)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExitLaw {
            x,
            ts: ts.to_vec(),
            density: rows.iter().map(|r| r.0).collect(),
            survival: rows.iter().map(|r| r.1).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfun::eta;

    #[test]
    fn f_exit_values() {
        assert_eq!(f_exit(0.0), 0.0);
        assert!((f_exit(1.0) - eta(1.0).exp() / (2.0 * PI)).abs() < 1e-15);
        assert!((f_exit(1.0) - 0.253_338_341_056_097_493_52).abs() < 1e-14);
        for s in [1e-3, 0.4, 3.0, 250.0] {
            let alt = s / (1.0 + s * s) * eta(s).exp() / PI;
            assert!((f_exit(s) - alt).abs() < 1e-14 * alt);
            assert!((f_over_s(s) * s - f_exit(s)).abs() < 1e-15 * f_exit(s).max(1e-300) * 4.0);
        }
    }

    #[test]
    fn density_scaling() {
        assert!((exit_density(1.0, 1.0).unwrap() - f_exit(1.0)).abs() < 1e-16);
        assert!((exit_density(2.0, 4.0).unwrap() - exit_density(1.0, 2.0).unwrap() / 2.0).abs() < 1e-16);
    }

    #[test]
    fn survival_values() {
        assert!((survival(1.0, 1.0).unwrap() - 0.670_692_950_486_178_308_19).abs() < 1e-12);
        assert!((survival(1.0, 1e-9).unwrap() - 1.0).abs() < 1e-9);
        let cum = integrate(|s| exit_density(1.0, s).unwrap_or(0.0), Domain::Interval(0.0, 1.0), &spec_default())
            .unwrap()
            .value;
        assert!((survival(1.0, 1.0).unwrap() + cum - 1.0).abs() < 1e-12);
        // branch switch at t = x is continuous
        let a = survival(1.0, 1.0 - 1e-12).unwrap();
        let b = survival(1.0, 1.0 + 1e-12).unwrap();
        assert!((a - b).abs() < 1e-11);
    }

    #[test]
    fn survival_bounds() {
        for x in [0.3, 1.0, 4.0] {
            let mut prev = 1.0;
            for t in [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
                let s = survival(x, t).unwrap();
                assert!(s <= prev);
                assert!(s >= 1.0 - (t / x).min(1.0) - 1e-8);
                assert!(s >= 2.0 / PI * (x / t).atan() - 1e-10, "x={x} t={t}");
                prev = s;
            }
        }
    }

    #[test]
    fn total_mass_is_one() {
        let m = exit_mass(1e16).unwrap();
        assert!(m.mass_lower() <= 1.0 + 1e-9 && m.mass_upper() >= 1.0 - 1e-9, "{m:?}");
        assert!(m.mass_upper() - m.mass_lower() < 1e-6);
        assert!((m.midpoint() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn kernel_symmetric_and_bounded() {
        let a = heat_kernel(1.0, 0.3, 2.0).unwrap();
        let b = heat_kernel(1.0, 2.0, 0.3).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!(a >= 0.0 && a <= cauchy_density(1.0, 1.7));
    }

    #[test]
    fn kernel_appendix_bound() {
        let grid = [0.2, 0.5, 1.0, 2.0, 5.0];
        for t in [0.3, 1.0, 3.0] {
            for &x in &grid {
                for &y in &grid {
                    let d = (cauchy_density(t, y - x) - heat_kernel(t, x, y).unwrap()) / t;
                    let m = [1.0 / (t * t), 1.0 / (x * x), 1.0 / (y * y), t / (x * x * y), t / (x * y * y)]
                        .into_iter()
                        .fold(f64::INFINITY, f64::min);
                    assert!(d <= m / PI + 1e-12, "t={t} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn kernel_scaling() {
        let b = 2.5;
        let lhs = b * heat_kernel(b * 0.7, b * 0.4, b * 1.3).unwrap();
        let rhs = heat_kernel(0.7, 0.4, 1.3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn spectral_matches_closed_form() {
        let s = QuadratureSpec::default().with_tol(1e-12, 1e-10);
        let a = heat_kernel_spectral(1.0, 0.5, 0.5, &s, 1e-12).unwrap();
        let b = heat_kernel(1.0, 0.5, 0.5).unwrap();
        assert!(((a - b) / b).abs() < 1e-6, "{a} vs {b}");
        let c = heat_kernel_spectral(1.0, 1.0, 1.0, &s, 1e-12).unwrap();
        assert!(c <= 1.0 / PI);
        assert_eq!(heat_kernel_spectral(1.0, -0.5, 1.0, &s, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn tables() {
        let xs = [0.5, 1.0, 2.0];
        let k = KernelTable::evaluate(1.0, &xs, &xs).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((k.values[(i, j)] - k.values[(j, i)]).abs() < 1e-14);
                assert!(k.values[(i, j)] <= 1.0 / PI);
            }
        }
        let law = ExitLaw::evaluate(1.0, &[0.1, 1.0, 10.0]).unwrap();
        assert!(law.survival.windows(2).all(|w| w[0] >= w[1]));
        assert!(law.density.iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(exit_density(0.0, 1.0).is_err());
        assert!(survival(1.0, -1.0).is_err());
        assert!(heat_kernel(0.0, 1.0, 1.0).is_err());
    }
}
