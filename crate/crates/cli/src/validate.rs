//! Named numerical checks run by `validate`.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use cauchy_spectral::halfline::*;
use cauchy_spectral::interval::*;
use cauchy_spectral::mc::{estimate_survival, refinement_study, McConfig};
use cauchy_spectral::numerics::{integrate_with_breaks, Domain, Grid, GridFunction, PrecisionContext, QuadratureSpec};
use cauchy_spectral::specialfun::{b_complex, exp_eta};
use cauchy_spectral::Result;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: &'static str,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

fn below(id: &'static str, measured: f64, threshold: f64, detail: String) -> CheckResult {
    CheckResult { id, pass: measured <= threshold, measured, threshold, detail }
}

fn failed(id: &'static str, e: cauchy_spectral::Error) -> CheckResult {
    CheckResult { id, pass: false, measured: f64::NAN, threshold: f64::NAN, detail: format!("error: {e}") }
}

fn guarded(id: &'static str, f: impl FnOnce() -> Result<CheckResult>) -> CheckResult {
    f().unwrap_or_else(|e| failed(id, e))
}

pub fn run(level: Level, ctx: &PrecisionContext, seed: u64) -> Vec<CheckResult> {
    let full = level == Level::Full;
    let mut out = vec![
        guarded("b_at_i", || {
            let b = b_complex(Complex64::new(0.0, 1.0))?.value;
            let err = (b - Complex64::new(LN_2 / 2.0, PI / 8.0)).norm();
            Ok(below("b_at_i", err, 1e-11, "absolute error of B(i)".into()))
        }),
        guarded("r_at_zero", || {
            let v = r_adaptive(0.0, &QuadratureSpec::default())?.value;
            Ok(below("r_at_zero", (v - (PI / 8.0).sin()).abs(), 1e-10, "quadrature r(0) vs sin(π/8)".into()))
        }),
        guarded("r_integral", || {
            let v = r_integral(&QuadratureSpec::default())?.value;
            let err = (v - ((PI / 8.0).cos() - FRAC_1_SQRT_2)).abs();
            Ok(below("r_integral", err, 1e-9, format!("∫r = {v}")))
        }),
        guarded("r_squared_integral", || {
            let v = r_squared_integral(&QuadratureSpec::default())?.value;
            Ok(CheckResult {
                id: "r_squared_integral",
                pass: v > 0.012 && v < 0.037,
                measured: v,
                threshold: 0.037,
                detail: "must lie in (0.012, 0.037)".into(),
            })
        }),
        guarded("laplace_identity", || {
            let spec = QuadratureSpec::default().with_tol(1e-12, 1e-11);
            let mut worst = 0.0f64;
            for t in [0.5, 1.0, 2.0] {
                let q = laplace_psi_quadrature(1.0, t, &spec)?.value;
                let closed = FRAC_1_SQRT_2 * exp_eta(t) / (1.0 + t * t);
                worst = worst.max(((q - closed) / closed).abs());
            }
            Ok(below("laplace_identity", worst, 1e-8, "max relative error at t = 0.5, 1, 2".into()))
        }),
        guarded("kernel_cross_method", || {
            let spec = QuadratureSpec::default().with_tol(1e-12, 1e-10);
            let pts: &[f64] = if full { &[0.5, 1.0, 2.0] } else { &[0.5, 2.0] };
            let ts: &[f64] = if full { &[0.5, 1.0] } else { &[1.0] };
            let mut worst = 0.0f64;
            for &t in ts {
                for &x in pts {
                    for &y in pts {
                        let a = heat_kernel(t, x, y)?;
                        let b = heat_kernel_spectral(t, x, y, &spec, 1e-12)?;
                        worst = worst.max(((a - b) / a).abs());
                    }
                }
            }
            Ok(below("kernel_cross_method", worst, 1e-6, "closed form vs spectral, max relative difference".into()))
        }),
        guarded("mass_balance", || {
            let m = kernel_mass(1.0, 1.0)?;
            let err = (m - survival(1.0, 1.0)?).abs();
            Ok(below("mass_balance", err, 1e-7, "∫p^D_1(1,y)dy vs survival(1,1)".into()))
        }),
        guarded("exit_mass", || {
            let r = exit_mass(1e16)?;
            let err = (r.mass_lower() - 1.0).abs().max((r.mass_upper() - 1.0).abs());
            Ok(below("exit_mass", err, 1e-6, "exit density total mass with certified tail".into()))
        }),
        guarded("eigenfunction_property", || {
            let v = kernel_action_on_psi(0.5, 0.7, 1.0, 1000.0)?;
            let err = (v - (-0.5f64).exp() * psi(1.0, 0.7).psi).abs();
            Ok(below("eigenfunction_property", err, 1e-4, "∫p^D_0.5(0.7,y)ψ_1(y)dy vs e^{-0.5}ψ_1(0.7)".into()))
        }),
        guarded("plancherel", || {
            let (norm, inv) = plancherel()?;
            Ok(below("plancherel", norm.max(inv), 0.01, format!("norm ratio error {norm:.3e}, inversion error {inv:.3e}")))
        }),
    ];
    out.extend(interval_checks(full, ctx));
    out.push(guarded("mc_survival", || {
        let (paths, dt) = if full { (100_000, 1e-3) } else { (20_000, 1e-2) };
        let s = survival(1.0, 1.0)?;
        let e = estimate_survival(1.0, 1.0, &McConfig { paths, dt, horizon: 1.0, seed })?;
        let deficit = (s - e.value) / e.std_error;
        Ok(below("mc_survival", deficit, 3.0, format!("estimate {} ± {} vs {s}, in standard errors", e.value, e.std_error)))
    }));
    if full {
        out.push(guarded("mc_refinement", || {
            let s = survival(1.0, 1.0)?;
            let r = refinement_study(1.0, 1.0, &[4e-3, 2e-3, 1e-3], 100_000, seed)?;
            let gaps: Vec<f64> = r.iter().map(|e| (e.value - s).abs()).collect();
            let worst_step = gaps.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            Ok(below(
                "mc_refinement",
                worst_step,
                3.0 * r[2].std_error,
                format!("|estimate − survival| at dt = 4e-3, 2e-3, 1e-3: {gaps:?}"),
            ))
        }));
    }
    out
}

fn interval_checks(full: bool, ctx: &PrecisionContext) -> Vec<CheckResult> {
    let n_basis = if full { 150 } else { 50 };
    let a = match assemble_rayleigh_ritz(n_basis, ctx) {
        Ok(a) => a,
        Err(e) => return vec![failed("brackets", e)],
    };
    let mut out = vec![
        guarded("brackets", || {
            let b = bracket_from(&a, n_basis, 10)?;
            let missing = b.iter().filter(|e| e.reference_contained() != Some(true)).count();
            let mut nested = true;
            let sizes: Vec<usize> = [25, 50, 100, 150].into_iter().filter(|&n| n <= n_basis).collect();
            let runs: Vec<Vec<EigBound>> = sizes.iter().map(|&n| bracket_from(&a, n, 10)).collect::<Result<_>>()?;
            for pair in runs.windows(2) {
                for (c, f) in pair[0].iter().zip(&pair[1]) {
                    nested &= f.lower.unwrap() >= c.lower.unwrap() * (1.0 - 1e-12);
                    nested &= f.upper.unwrap() <= c.upper.unwrap() * (1.0 + 1e-12);
                }
            }
            Ok(CheckResult {
                id: "brackets",
                pass: missing == 0 && nested,
                measured: missing as f64,
                threshold: 0.0,
                detail: format!("N = {n_basis}: reference values outside the bracket; nested over N ∈ {sizes:?}: {nested}"),
            })
        }),
        guarded("localization", || {
            let b = bracket_from(&a, n_basis, 10)?;
            let worst = b.iter().map(|e| (e.midpoint().unwrap() - mu(e.n)).abs() * e.n as f64).fold(0.0, f64::max);
            let inside = b.iter().filter(|e| e.n >= 4).all(|e| (e.midpoint().unwrap() - mu(e.n)).abs() < PI / 10.0);
            Ok(CheckResult {
                id: "localization",
                pass: worst <= 1.0 && inside,
                measured: worst,
                threshold: 1.0,
                detail: format!("max n·|midpoint − μ_n|; within π/10 for n ≥ 4: {inside}"),
            })
        }),
        guarded("generator_residual", || {
            let spec = QuadratureSpec::default().with_tol(1e-10, 1e-9);
            let ns: &[usize] = if full { &[4, 6, 8] } else { &[4] };
            let mut worst = f64::NEG_INFINITY;
            let mut norms = true;
            for &n in ns {
                let r = generator_residual(n, &spec)?;
                worst = worst.max(r.residual_norm - r.bound);
                norms &= r.norm_within_bounds();
            }
            Ok(CheckResult {
                id: "generator_residual",
                pass: worst <= 1e-4 && norms,
                measured: worst,
                threshold: 1e-4,
                detail: format!("max (residual − bound) for n ∈ {ns:?}; norms within interval: {norms}"),
            })
        }),
        guarded("ritz_eigenfunctions", || {
            let grid = Grid::trapezoid(-1.0, 1.0, 2001)?;
            let mut sup = 0.0f64;
            let mut parity = true;
            for n in 1..=8 {
                let f = rr_eigenfunction(&a, n, n_basis, &grid)?;
                let len = f.len();
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                parity &= (0..len).all(|i| (f.values[i] - sign * f.values[len - 1 - i]).abs() < 1e-10);
                sup = sup.max(f.sup_norm());
            }
            Ok(CheckResult {
                id: "ritz_eigenfunctions",
                pass: parity && sup <= 3.0,
                measured: sup,
                threshold: 3.0,
                detail: format!("max sup norm for n = 1..8; parity as expected: {parity}"),
            })
        }),
    ];
    if full {
        out.push(guarded("bracket_width_300", || {
            let a = assemble_rayleigh_ritz(300, ctx)?;
            let w = bracket_from(&a, 300, 4)?.iter().map(|b| b.width().unwrap()).fold(0.0, f64::max);
            Ok(below("bracket_width_300", w, 1e-6, format!("max width for n ≤ 4 at N = 300, {} digits", a.precision_digits)))
        }));
    }
    out
}

fn kernel_mass(t: f64, x: f64) -> Result<f64> {
    let mut breaks: Vec<f64> = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0].iter().map(|f| f * x).collect();
    let mut b = 4.0 * x;
    while b < 1e6 * x {
        breaks.push(b);
        b *= 2.0;
    }
    let spec = QuadratureSpec::default().with_tol(1e-11, 1e-10);
    Ok(integrate_with_breaks(|y| heat_kernel(t, x, y).unwrap_or(f64::NAN), Domain::UpperHalfLine(0.0), &breaks, &spec)?.value)
}

fn kernel_action_on_psi(t: f64, x: f64, lambda: f64, cutoff: f64) -> Result<f64> {
    let n = (cutoff * lambda / PI).ceil() as usize;
    let breaks: Vec<f64> = (1..n).map(|k| k as f64 * cutoff / n as f64).collect();
    let spec = QuadratureSpec::default().with_tol(1e-9, 1e-8);
    Ok(integrate_with_breaks(
        |y| heat_kernel(t, x, y).unwrap_or(f64::NAN) * psi(lambda, y).psi,
        Domain::Interval(0.0, cutoff),
        &breaks,
        &spec,
    )?
    .value)
}

fn bump(l: f64) -> f64 {
    if l > 1.0 && l < 2.0 {
        (-1.0 / ((l - 1.0) * (2.0 - l))).exp()
    } else {
        0.0
    }
}

/// (norm ratio error, inversion error) for a bump on [1, 2].
fn plancherel() -> Result<(f64, f64)> {
    let f = Grid::trapezoid(0.0, 3.0, 601)?.sample(bump);
    let xg = Grid::trapezoid(0.0, 60.0, 601)?;
    let pf = pi_transform(&f, &xg)?;
    let norm = (pf.norm2_squared() / (PI / 2.0 * f.norm2_squared()) - 1.0).abs();
    let taper = |x: f64| if x <= 40.0 { 1.0 } else { 0.5 * (1.0 + (PI * ((x - 40.0) / 20.0).min(1.0)).cos()) };
    let tapered = pf.nodes.iter().zip(&pf.values).map(|(&x, &v)| v * taper(x)).collect();
    let pf = GridFunction::new(pf.nodes.clone(), tapered, pf.weights.clone())?;
    let out = Grid::trapezoid(0.5, 2.5, 201)?;
    let ppf = pi_transform(&pf, &out)?;
    let peak = PI / 2.0 * f.sup_norm();
    let inv = out.nodes.iter().zip(&ppf.values).map(|(&l, &v)| (v - PI / 2.0 * bump(l)).abs()).fold(0.0, f64::max) / peak;
    Ok((norm, inv))
}
