use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::Result;
use crate::halfline::psi;
use crate::numerics::{gauss_legendre, integrate_pv_with_breaks, integrate_with_breaks, Domain, Grid, QuadratureSpec};

/// μ_n = nπ/2 − π/8, the asymptotic location of λ_n.
pub fn mu(n: usize) -> f64 {
    n as f64 * PI / 2.0 - PI / 8.0
}

/// C² cutoff: 0 below −1/3, 1 above 1/3, quadratic pieces between, q(x) + q(−x) = 1.
///
/// ```
/// use cauchy_spectral::interval::q_cutoff;
/// assert_eq!(q_cutoff(0.0), 0.5);
/// assert!((q_cutoff(0.2) + q_cutoff(-0.2) - 1.0).abs() < 1e-15);
/// ```
pub fn q_cutoff(x: f64) -> f64 {
    const T: f64 = 1.0 / 3.0;
    if x <= -T {
        0.0
    } else if x <= 0.0 {
        4.5 * (x + T) * (x + T)
    } else if x < T {
        1.0 - 4.5 * (x - T) * (x - T)
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

/// A function on the line that is C² away from finitely many kinks and
/// vanishes outside a bounded interval.
pub trait PiecewiseSmooth: Sync {
    fn eval(&self, x: f64) -> f64;
    /// Open interval outside of which the function is zero.
    fn support(&self) -> (f64, f64);
    /// Interior points where derivatives may jump.
    fn breakpoints(&self) -> Vec<f64>;
}

/// A closure with explicit support and kinks.
pub struct PiecewiseFn<F: Fn(f64) -> f64 + Sync> {
    pub f: F,
    pub support: (f64, f64),
    pub breaks: Vec<f64>,
}

impl<F: Fn(f64) -> f64 + Sync> PiecewiseSmooth for PiecewiseFn<F> {
    fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support;
        if x <= a || x >= b {
            0.0
        } else {
            (self.f)(x)
        }
    }

    fn support(&self) -> (f64, f64) {
        self.support
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// φ̃_n(x) = q(−x) ψ_μ(1+x) ± q(x) ψ_μ(1−x) on (−1, 1), + for odd n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxEigenfunction {
    pub n: usize,
    pub mu: f64,
    pub parity: Parity,
}

impl ApproxEigenfunction {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "eigenvalue index starts at 1");
        let parity = if n % 2 == 1 { Parity::Symmetric } else { Parity::Antisymmetric };
        ApproxEigenfunction { n, mu: mu(n), parity }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= -1.0 || x >= 1.0 {
            return 0.0;
        }
        let left = q_cutoff(-x) * psi(self.mu, 1.0 + x).psi;
        let right = q_cutoff(x) * psi(self.mu, 1.0 - x).psi;
        match self.parity {
            Parity::Symmetric => left + right,
            Parity::Antisymmetric => left - right,
        }
    }

    /// ‖φ̃_n‖₂² by composite Gauss–Legendre quadrature.
    pub fn norm_squared(&self) -> f64 {
        let grid = norm_grid();
        grid.nodes.iter().zip(&grid.weights).map(|(&x, &w)| w * self.eval(x).powi(2)).sum()
    }
}

impl PiecewiseSmooth for ApproxEigenfunction {
    fn eval(&self, x: f64) -> f64 {
        ApproxEigenfunction::eval(self, x)
    }

    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![-1.0 / 3.0, 0.0, 1.0 / 3.0]
    }
}

/// φ̃_n(x)
pub fn tilde_phi(n: usize, x: f64) -> f64 {
    ApproxEigenfunction::new(n).eval(x)
}

/// Panels graded towards ±1, where φ̃ behaves like a square root.
fn norm_grid() -> Grid {
    let half = [1.0, 0.9999, 0.999, 0.99, 0.95, 0.85, 2.0 / 3.0, 0.5, 1.0 / 3.0, 1.0 / 6.0, 0.0];
    let mut breaks: Vec<f64> = half.iter().map(|v| -v).collect();
    breaks.extend(half.iter().rev().skip(1));
    Grid::composite_gauss(&breaks, 24).expect("static breakpoints are increasing")
}

/// 𝒜g(z) = (1/π) pv∫ (g(y) − g(z))/(y − z)² dy.
///
/// Inside the support (a, b) the part outside is done in closed form,
/// −g(z)(1/(z−a) + 1/(b−z)); the rest is a principal value split at the kinks of g.
pub fn generator_apply<G: PiecewiseSmooth + ?Sized>(g: &G, z: f64, spec: &QuadratureSpec) -> Result<f64> {
    let (a, b) = g.support();
    let breaks = g.breakpoints();
    if z <= a || z >= b {
        // no singularity: g(z) = 0
        let mut br: Vec<f64> = breaks.into_iter().filter(|&k| k > a && k < b).collect();
        br.push(z.clamp(a, b));
        let e = integrate_with_breaks(|y| g.eval(y) / ((y - z) * (y - z)), Domain::Interval(a, b), &br, spec)?;
        return Ok(e.value / PI);
    }
    let gz = g.eval(z);
    let diff = |y: f64| (g.eval(y) - gz) / ((y - z) * (y - z));
    let pair = |u: f64| diff(z + u) + diff(z - u);
    // Very close to z the difference quotient is pure rounding noise, so on
    // |y − z| < eps the symmetric pair is replaced by its even quadratic model.
    let nearest = breaks.iter().map(|k| (k - z).abs()).filter(|&d| d > 0.0).fold(0.25 * (z - a).min(b - z), f64::min);
    let eps = (1e-3f64).min(0.5 * nearest);
    let (p1, p2) = (pair(eps), pair(0.5 * eps));
    let curv = (p1 - p2) / (0.75 * eps * eps);
    let base = p1 - curv * eps * eps;
    let mut br = breaks.clone();
    br.extend([z - eps, z + eps]);
    let e = integrate_pv_with_breaks(
        |y| {
            let u = (y - z).abs();
            if u < eps {
                0.5 * (base + curv * u * u)
            } else {
                diff(y)
            }
        },
        z,
        Domain::Interval(a, b),
        &br,
        spec,
    )?;
    Ok((e.value - gz * (1.0 / (z - a) + 1.0 / (b - z))) / PI)
}

/// √(1.21 + 8.00/μ + 13.66/μ²)/μ
pub fn residual_bound(mu: f64) -> f64 {
    (1.21 + 8.00 / mu + 13.66 / (mu * mu)).sqrt() / mu
}

/// Interval [1 − 0.52/μ, 1 + 1.37/μ] containing ‖φ̃_n‖₂².
pub fn norm_bounds(mu: f64) -> (f64, f64) {
    (1.0 - 0.52 / mu, 1.0 + 1.37 / mu)
}

/// (20/3π)·residual_bound(μ_n), bounding ‖φ̃_n − ‖φ̃_n‖₂ φ_n‖₂.
pub fn lemma_closeness_bound(n: usize) -> f64 {
    20.0 / (3.0 * PI) * residual_bound(mu(n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub n: usize,
    pub mu: f64,
    /// ‖𝒜φ̃_n + μ_n φ̃_n‖₂
    pub residual_norm: f64,
    pub norm_squared: f64,
    pub bound: f64,
    pub norm_lower: f64,
    pub norm_upper: f64,
}

impl ResidualReport {
    pub fn within_bound(&self, tol: f64) -> bool {
        self.residual_norm <= self.bound + tol
    }

    pub fn norm_within_bounds(&self) -> bool {
        self.norm_lower <= self.norm_squared && self.norm_squared <= self.norm_upper
    }
}

/// ‖𝒜φ̃_n + μ_nφ̃_n‖₂ over (−1, 1), using the parity of φ̃_n to integrate over (−1, 0) only.
pub fn generator_residual(n: usize, spec: &QuadratureSpec) -> Result<ResidualReport> {
    let phi = ApproxEigenfunction::new(n);
    let rule = gauss_legendre(24);
    let breaks = [-1.0, -0.9, -2.0 / 3.0, -0.5, -1.0 / 3.0, -1.0 / 6.0, 0.0];
    let nodes: Vec<(f64, f64)> = breaks.windows(2).flat_map(|w| rule.on(w[0], w[1]).collect::<Vec<_>>()).collect();
    let terms: Vec<f64> = nodes
        .par_iter()
        .map(|&(z, w)| {
            let a = generator_apply(&phi, z, spec)?;
            Ok(w * (a + phi.mu * phi.eval(z)).powi(2))
        })
        .collect::<Result<Vec<_>>>()?;
    let residual_norm = (2.0 * terms.iter().sum::<f64>()).sqrt();
    let (norm_lower, norm_upper) = norm_bounds(phi.mu);
    Ok(ResidualReport {
        n,
        mu: phi.mu,
        residual_norm,
        norm_squared: phi.norm_squared(),
        bound: residual_bound(phi.mu),
        norm_lower,
        norm_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default().with_tol(1e-10, 1e-9)
    }

    #[test]
    fn cutoff() {
        assert_eq!(q_cutoff(0.0), 0.5);
        assert_eq!(q_cutoff(-0.5), 0.0);
        assert_eq!(q_cutoff(0.4), 1.0);
        for x in [0.05, 0.2, 1.0 / 3.0, 0.7] {
            assert!((q_cutoff(x) + q_cutoff(-x) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn parity_of_tilde_phi() {
        assert!(tilde_phi(2, 0.0).abs() < 1e-15);
        assert!((tilde_phi(1, 0.37) - tilde_phi(1, -0.37)).abs() < 1e-15);
        assert!((tilde_phi(4, 0.37) + tilde_phi(4, -0.37)).abs() < 1e-15);
        assert_eq!(tilde_phi(3, 1.2), 0.0);
    }

    #[test]
    fn norm_of_tilde_phi_4() {
        let p = ApproxEigenfunction::new(4);
        let (lo, hi) = norm_bounds(p.mu);
        let v = p.norm_squared();
        assert!(lo <= v && v <= hi, "{lo} ≤ {v} ≤ {hi}");
    }

    #[test]
    fn generator_of_zero() {
        let g = PiecewiseFn { f: |_| 0.0, support: (-1.0, 1.0), breaks: vec![] };
        assert_eq!(generator_apply(&g, 0.3, &spec()).unwrap(), 0.0);
    }

    #[test]
    fn generator_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (a, b): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let f = PiecewiseFn { f: |x: f64| (1.0 - x * x).powi(2), support: (-1.0, 1.0), breaks: vec![] };
        let g = PiecewiseFn { f: |x: f64| (1.0 - x * x) * x.cos(), support: (-1.0, 1.0), breaks: vec![] };
        let h = PiecewiseFn {
            f: |x: f64| a * (1.0 - x * x).powi(2) + b * (1.0 - x * x) * x.cos(),
            support: (-1.0, 1.0),
            breaks: vec![],
        };
        let z = 0.41;
        let lhs = generator_apply(&h, z, &spec()).unwrap();
        let rhs = a * generator_apply(&f, z, &spec()).unwrap() + b * generator_apply(&g, z, &spec()).unwrap();
        assert!((lhs - rhs).abs() < 1e-8);
    }

    #[test]
    fn generator_of_torsion_function_is_minus_one() {
        // √(1−x²) is the expected exit time, so 𝒜 of it is −1 on (−1, 1)
        let g = PiecewiseFn { f: |x: f64| (1.0 - x * x).sqrt(), support: (-1.0, 1.0), breaks: vec![] };
        for z in [-0.8, -0.2, 0.0, 0.5] {
            let v = generator_apply(&g, z, &QuadratureSpec { max_subdivisions: 20000, ..spec() }).unwrap();
            assert!((v + 1.0).abs() < 1e-6, "z={z}: {v}");
        }
    }

    #[test]
    fn residual_within_bound_n4() {
        let r = generator_residual(4, &spec()).unwrap();
        assert!(r.within_bound(1e-4), "{r:?}");
        assert!(r.norm_within_bounds());
    }
}
