//! Inverse tangent integral Ti₂, the function η and the boundary value B.
//!
//! η(t) = ¼ log(1+t²) − (1/π) ∫₀ᵗ log|s|/(1+s²) ds
//!
//! B(z) = (1/π) ∫_{−∞}^0 log(z−s)/(1+s²) ds, holomorphic off (−∞, 0], with
//! Re B(t) = η(t) and Im B(t) = arctan(t₋) on the real line.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, integrate_with_breaks, Domain, GaussRule, QuadratureSpec};

/// Catalan's constant 𝒞 = Ti₂(1) = Σ (−1)ᵏ/(2k+1)².
pub const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932;

/// The same constant as a decimal string, to 30 digits.
pub const CATALAN_DIGITS: &str = "0.915965594177219015054603514932";

/// A special-function value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialValue<T> {
    pub value: T,
    pub est_error: f64,
}

fn middle_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(24))
}

fn ti2_series(t: f64) -> f64 {
    // alternating, terms fall like t^{2k}/(2k+1)²
    let t2 = t * t;
    let mut term = t;
    let mut sum = 0.0;
    for k in 0..200 {
        let d = (2 * k + 1) as f64;
        let c = term / (d * d);
        sum += if k % 2 == 0 { c } else { -c };
        if c.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        term *= t2;
    }
    sum
}

fn atan_over(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else {
        u.atan() / u
    }
}

/// Ti₂(t) = ∫₀ᵗ arctan(u)/u du.
///
/// Defined for all real t (it is odd); the series, inversion and quadrature
/// branches meet continuously at ½ and 2.
///
/// ```
/// use cauchy_spectral::specialfun::{ti2, CATALAN};
/// assert!((ti2(1.0) - CATALAN).abs() < 1e-15);
/// ```
pub fn ti2(t: f64) -> f64 {
    if t < 0.0 {
        return -ti2(-t);
    }
    if t.is_infinite() {
        return f64::INFINITY;
    }
    if t <= 0.5 {
        ti2_series(t)
    } else if t >= 2.0 {
        // Ti₂(t) − Ti₂(1/t) = (π/2) log t
        ti2_series(1.0 / t) + FRAC_PI_2 * t.ln()
    } else {
        ti2_series(0.5) + middle_rule().integrate(atan_over, 0.5, t)
    }
}

/// η(t) via the closed form in Ti₂.
///
/// ```
/// use cauchy_spectral::specialfun::eta;
/// assert_eq!(eta(0.0), 0.0);
/// assert!((eta(1.0) - 0.464_847_699_170_805).abs() < 1e-14);
/// ```
pub fn eta(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let a = t.abs();
    // ∫₀^a log s/(1+s²) ds = arctan(a) log a − Ti₂(a)
    let log_int = a.atan() * a.ln() - ti2(a);
    0.25 * (t * t).ln_1p() - t.signum() * log_int / PI
}

/// e^{η(t)}
pub fn exp_eta(t: f64) -> f64 {
    eta(t).exp()
}

/// η(t) by direct adaptive quadrature of its defining integral; an
/// independent route used to check [`eta`].
pub fn eta_quadrature(t: f64, spec: &QuadratureSpec) -> Result<SpecialValue<f64>> {
    if !t.is_finite() {
        return Err(Error::Domain(format!("eta needs a finite argument, got {t}")));
    }
    if t == 0.0 {
        return Ok(SpecialValue { value: 0.0, est_error: 0.0 });
    }
    let a = t.abs();
    let breaks: Vec<f64> = [1.0, 10.0, 100.0].into_iter().filter(|&b| b < a).collect();
    let e = integrate_with_breaks(|s| s.ln() / (1.0 + s * s), Domain::Interval(0.0, a), &breaks, spec)?;
    Ok(SpecialValue {
        value: 0.25 * (t * t).ln_1p() - t.signum() * e.value / PI,
        est_error: e.error / PI,
    })
}

/// B(z) = (1/π) ∫_{−∞}^0 log(z−s)/(1+s²) ds.
///
/// Accepts the closed upper half-plane (negative reals are read as limits
/// from above, as in the principal branch) and the right half-plane.
/// The open third quadrant lies across the cut and is rejected.
///
/// ```
/// use cauchy_spectral::specialfun::b_complex;
/// use num_complex::Complex64;
/// let b = b_complex(Complex64::new(0.0, 1.0)).unwrap();
/// assert!((b.value.re - 2f64.ln() / 2.0).abs() < 1e-11);
/// assert!((b.value.im - std::f64::consts::PI / 8.0).abs() < 1e-11);
/// ```
pub fn b_complex(z: Complex64) -> Result<SpecialValue<Complex64>> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("B needs a finite argument, got {z}")));
    }
    if z.re < 0.0 && z.im < 0.0 {
        return Err(Error::Domain(format!("{z} is below the branch cut (−∞, 0]")));
    }
    // read a signed zero imaginary part as the limit from above
    let z = Complex64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im });
    let spec = QuadratureSpec::default().with_tol(1e-14, 1e-13);
    // ∫_{−∞}^0 g(s) ds = ∫_0^∞ g(−u) du
    let mut breaks = vec![1.0];
    if z.re < 0.0 {
        breaks.push(-z.re);
    }
    if z.norm() > 1.0 {
        breaks.push(z.norm());
    }
    let re = integrate_with_breaks(
        |u| (z + u).norm().ln() / (1.0 + u * u),
        Domain::UpperHalfLine(0.0),
        &breaks,
        &spec,
    )?;
    let im = integrate_with_breaks(|u| (z + u).arg() / (1.0 + u * u), Domain::UpperHalfLine(0.0), &breaks, &spec)?;
    Ok(SpecialValue {
        value: Complex64::new(re.value / PI, im.value / PI),
        est_error: (re.error.hypot(im.error)) / PI,
    })
}
