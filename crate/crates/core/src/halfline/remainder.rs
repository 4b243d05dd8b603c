use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, integrate_with_breaks, Domain, QuadratureSpec};
use crate::specialfun::{b_complex, eta, ti2, SpecialValue};

/// sup |ψ_λ| < 1.14
pub const PSI_SUP_BOUND: f64 = 1.14;

const SIN_PI_8: f64 = 0.382_683_432_365_089_771_73;

/// Laplace density of r: r(x) = ∫₀^∞ w(t) e^{−tx} dt with
/// w(t) = (√2/2π) t^{1 + arctan(t)/π} (1+t²)^{−5/4} e^{−Ti₂(t)/π}.
pub fn remainder_weight(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let lt = t.ln();
    let e = (1.0 + t.atan() / PI) * lt - 1.25 * (t * t).ln_1p() - ti2(t) / PI;
    SQRT_2 / (2.0 * PI) * e.exp()
}

/// The same density written as (√2/2π) t e^{−η(t)}/(1+t²).
pub fn remainder_weight_eta_form(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    SQRT_2 / (2.0 * PI) * t / (1.0 + t * t) * (-eta(t)).exp()
}

/// Precomputed product rule in u = log t for bulk evaluation of r and its derivatives.
struct RemainderRule {
    t: Vec<f64>,
    w: Vec<f64>,
}

// terms below this weight cannot matter at double precision (w(t) ≈ t)
const RULE_U_MIN: f64 = -21.0;
const RULE_U_MAX: f64 = 60.0;
const RULE_PANEL: f64 = 0.25;
// e^{−40} times the largest weight is far below 1e−17
const RULE_CUTOFF: f64 = 40.0;

fn rule() -> &'static RemainderRule {
    static RULE: OnceLock<RemainderRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let g = gauss_legendre(10);
        let panels = ((RULE_U_MAX - RULE_U_MIN) / RULE_PANEL).round() as usize;
        let mut t = Vec::with_capacity(panels * 10);
        let mut w = Vec::with_capacity(panels * 10);
        for p in 0..panels {
            let a = RULE_U_MIN + p as f64 * RULE_PANEL;
            for (u, gw) in g.on(a, a + RULE_PANEL) {
                let tt = u.exp();
                t.push(tt);
                w.push(gw * tt * remainder_weight(tt));
            }
        }
        RemainderRule { t, w }
    })
}

/// Σ w_k t_k^order e^{−x t_k}
fn rule_moment(x: f64, order: i32) -> f64 {
    let r = rule();
    let mut s = 0.0;
    for (&t, &w) in r.t.iter().zip(&r.w) {
        let a = x * t;
        if a > RULE_CUTOFF {
            break;
        }
        s += w * t.powi(order) * (-a).exp();
    }
    s
}

// below this the fixed rule's upper truncation would show; fall back to adaptive quadrature
const RULE_X_MIN: f64 = 1e-20;

/// r(x) for x ≥ 0, with r(0) = sin(π/8).
///
/// ```
/// use cauchy_spectral::halfline::r;
/// assert!((r(0.0) - (std::f64::consts::PI / 8.0).sin()).abs() < 1e-15);
/// assert!(r(1.0) < 2f64.sqrt() / (2.0 * std::f64::consts::PI));
/// ```
pub fn r(x: f64) -> f64 {
    assert!(x >= 0.0, "r is defined for x ≥ 0, got {x}");
    if x == 0.0 {
        return SIN_PI_8;
    }
    if x < RULE_X_MIN {
        return r_adaptive(x, &QuadratureSpec::default()).map(|v| v.value).unwrap_or(SIN_PI_8);
    }
    rule_moment(x, 0)
}

/// r(x) by adaptive quadrature of its Laplace integral, with an error estimate.
/// At x = 0 the integral is evaluated too (it converges like t^{−1/2}).
pub fn r_adaptive(x: f64, spec: &QuadratureSpec) -> Result<SpecialValue<f64>> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("r needs a finite x ≥ 0, got {x}")));
    }
    let e = integrate_with_breaks(
        |t| {
            let w = remainder_weight(t);
            if w == 0.0 {
                0.0
            } else {
                w * (-t * x).exp()
            }
        },
        Domain::UpperHalfLine(0.0),
        &decade_breaks(x),
        spec,
    )?;
    Ok(SpecialValue { value: e.value, est_error: e.error })
}

/// Decades from 1 up to the scale 1/x where e^{−tx} takes over; a single
/// panel spanning many decades would sample only its far end.
fn decade_breaks(x: f64) -> Vec<f64> {
    let mut b = vec![1.0];
    if x > 0.0 {
        let scale = 1.0 / x;
        let (lo, hi) = if scale < 1.0 { (scale, 1.0) } else { (1.0, scale) };
        let mut t = lo * 10.0;
        while t < hi {
            b.push(t);
            t *= 10.0;
        }
        b.extend([scale, 4.0 * scale, 16.0 * scale]);
    }
    b
}

/// r′(x) (order 1) or r″(x) (order 2), for x > 0.
pub fn r_deriv(x: f64, order: u32) -> Result<f64> {
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidArgument(format!("derivative order must be 1 or 2, got {order}")));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("r^({order}) diverges or is undefined at x = {x}")));
    }
    let m = if x < RULE_X_MIN {
        integrate_with_breaks(
            |t| remainder_weight(t) * t.powi(order as i32) * (-t * x).exp(),
            Domain::UpperHalfLine(0.0),
            &decade_breaks(x),
            &QuadratureSpec::default(),
        )?
        .value
    } else {
        rule_moment(x, order as i32)
    };
    Ok(if order == 1 { -m } else { m })
}

/// ∫₀^∞ r(x) dx = ∫₀^∞ w(t)/t dt (= cos(π/8) − √2/2).
pub fn r_integral(spec: &QuadratureSpec) -> Result<SpecialValue<f64>> {
    let e = integrate_with_breaks(
        |t| if t == 0.0 { 0.0 } else { remainder_weight(t) / t },
        Domain::UpperHalfLine(0.0),
        &[1.0],
        spec,
    )?;
    Ok(SpecialValue { value: e.value, est_error: e.error })
}

/// ∫₀^∞ r(x)² dx by quadrature of the tabulated r.
pub fn r_squared_integral(spec: &QuadratureSpec) -> Result<SpecialValue<f64>> {
    let e = integrate_with_breaks(|x| r(x).powi(2), Domain::UpperHalfLine(0.0), &[0.1, 1.0, 10.0], spec)?;
    Ok(SpecialValue { value: e.value, est_error: e.error })
}

/// ψ_λ(x) together with its remainder term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenfunctionEval {
    pub lambda: f64,
    pub x: f64,
    pub psi: f64,
    pub remainder: f64,
}

/// ψ_λ(x) = sin(λx + π/8) − r(λx) for x > 0, and 0 for x ≤ 0.
///
/// ```
/// use cauchy_spectral::halfline::psi;
/// assert!(psi(1.0, 0.0).psi.abs() < 1e-15);
/// assert_eq!(psi(1.0, -2.0).psi, 0.0);
/// ```
pub fn psi(lambda: f64, x: f64) -> EigenfunctionEval {
    assert!(lambda > 0.0, "ψ_λ needs λ > 0, got {lambda}");
    if x <= 0.0 {
        return EigenfunctionEval { lambda, x, psi: 0.0, remainder: 0.0 };
    }
    let z = lambda * x;
    let rem = r(z);
    EigenfunctionEval { lambda, x, psi: (z + PI / 8.0).sin() - rem, remainder: rem }
}

/// Closed-form Laplace transform (√2/2) λ e^{B(z/λ)} / (λ² + z²) of ψ_λ, Re z > 0.
pub fn laplace_psi(lambda: f64, z: Complex64) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ must be positive, got {lambda}")));
    }
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("the Laplace transform needs Re z > 0, got {z}")));
    }
    let w = z / lambda;
    let b = if w.im == 0.0 { Complex64::new(eta(w.re), 0.0) } else { b_complex(w)?.value };
    Ok(FRAC_1_SQRT_2 * lambda * b.exp() / (lambda * lambda + z * z))
}

/// ∫₀^∞ ψ_λ(x) e^{−tx} dx by adaptive quadrature (t > 0 real).
pub fn laplace_psi_quadrature(lambda: f64, t: f64, spec: &QuadratureSpec) -> Result<SpecialValue<f64>> {
    if !(lambda > 0.0 && t > 0.0) {
        return Err(Error::Domain(format!("need λ > 0 and t > 0, got λ={lambda}, t={t}")));
    }
    // split at every half period until the exponential has decayed by e^{−40}
    let period = PI / lambda;
    let horizon = 40.0 / t;
    let n = ((horizon / period).ceil() as usize).min(2000);
    let breaks: Vec<f64> = (1..=n).map(|k| k as f64 * horizon / n as f64).collect();
    let e = integrate_with_breaks(
        |x| {
            let d = (-t * x).exp();
            if d == 0.0 {
                0.0
            } else {
                psi(lambda, x).psi * d
            }
        },
        Domain::UpperHalfLine(0.0),
        &breaks,
        spec,
    )?;
    Ok(SpecialValue { value: e.value, est_error: e.error })
}
