use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::binomial;
use crate::numerics::{sym_eig, ExtFloat, Grid, GridFunction, Matrix, PrecisionContext, PrecisionMode, SymMatrix};

use super::approx::ApproxEigenfunction;
use super::bounds::{BoundMeta, EigBound};

/// Largest basis accepted by the assembly (coefficient magnitudes beyond
/// this overflow the double-precision error bookkeeping).
pub const MAX_BASIS: usize = 350;

/// Digits that must survive the assembly cancellation.
const TARGET_DIGITS: f64 = 17.0;
/// Below this the assembled matrix is rejected.
const MIN_SURVIVING_DIGITS: f64 = 15.0;

/// π · numerator / denominator, exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiRational {
    pub numerator: BigInt,
    pub denominator: BigInt,
}

impl PiRational {
    /// value / π
    pub fn over_pi(&self) -> f64 {
        if self.numerator.is_zero() {
            return 0.0;
        }
        ExtFloat::from_ratio(&self.numerator, &self.denominator, 64).to_f64()
    }

    pub fn to_f64(&self) -> f64 {
        PI * self.over_pi()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

/// Γ-ratio factor of the moments: for even j, Γ((j+1)/2)/(√π Γ(j/2+1)) = C(j, j/2)/2^j;
/// for odd j, Γ(j/2+1)/(√π Γ((j+3)/2)) = C(j+1, (j+1)/2)/2^{j+1}.
/// Returned as (integer numerator, power of two in the denominator).
fn moment_factor(j: usize) -> (BigInt, u64) {
    let j = j as u64;
    if j % 2 == 0 {
        (binomial(j, j / 2), j)
    } else {
        (binomial(j + 1, (j + 1) / 2), j + 1)
    }
}

/// ∫∫ x^m y^n G(x, y) dx dy over (−1, 1)², G the Green function of the killed process.
///
/// ```
/// use cauchy_spectral::interval::green_moment;
/// assert!((green_moment(0, 0).to_f64() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
/// assert!((green_moment(1, 1).to_f64() - std::f64::consts::PI / 16.0).abs() < 1e-15);
/// assert!(green_moment(0, 1).is_zero());
/// ```
pub fn green_moment(m: usize, n: usize) -> PiRational {
    if (m + n) % 2 == 1 {
        return PiRational { numerator: BigInt::zero(), denominator: BigInt::from(1) };
    }
    let (a, sa) = moment_factor(m);
    let (b, sb) = moment_factor(n);
    PiRational { numerator: a * b, denominator: (BigInt::from(m + n + 2)) << (sa + sb) as usize }
}

/// Coefficient of x^{n−2i} in 2ⁿ Pₙ(x): (−1)^i C(n, i) C(2n − 2i, n).
pub fn legendre_coefficient(n: usize, i: usize) -> BigInt {
    assert!(2 * i <= n, "index {i} out of range for degree {n}");
    let (n, i) = (n as u64, i as u64);
    let c = binomial(n, i) * binomial(2 * n - 2 * i, n);
    if i % 2 == 1 {
        -c
    } else {
        c
    }
}

fn norm_factor(n: usize) -> f64 {
    ((2 * n + 1) as f64 / 2.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixRole {
    RayleighRitz,
    Gram,
    Constraint,
    Weights,
    Schur,
}

/// A matrix of the bound computations together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix {
    pub role: MatrixRole,
    pub entries: Matrix,
    /// Working precision of the assembly (decimal digits).
    pub precision_digits: u32,
    /// Decimal digits certified by the rounding-error bookkeeping, relative to the largest entry.
    pub surviving_digits: f64,
}

impl BasisMatrix {
    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn cols(&self) -> usize {
        self.entries.cols()
    }

    pub fn sym(&self) -> Result<SymMatrix> {
        SymMatrix::from_dense(&self.entries)
    }

    /// Leading principal block (A_N is nested in N).
    pub fn leading(&self, order: usize) -> BasisMatrix {
        assert!(order <= self.rows() && order <= self.cols());
        BasisMatrix {
            entries: Matrix::from_fn(order, order, |i, j| self.entries[(i, j)]),
            ..self.clone()
        }
    }
}

/// Per-degree data: scaled monomial coefficients x_{m,i} = 2^{−m} c'_{m,i} V_{m−2i}
/// (exact up to the chosen precision) and Σ_i |x_{m,i}| in doubles.
struct DegreeRow {
    exact: Vec<(BigInt, i64)>,
    abs_sum: f64,
    approx: Vec<f64>,
}

fn degree_row(m: usize) -> DegreeRow {
    let mut exact = Vec::with_capacity(m / 2 + 1);
    let mut approx = Vec::with_capacity(m / 2 + 1);
    for i in 0..=m / 2 {
        let (v, sv) = moment_factor(m - 2 * i);
        let num = legendre_coefficient(m, i) * v;
        let shift = m as i64 + sv as i64;
        approx.push(ExtFloat::from_bigint(num.clone(), 64).ldexp(-shift).to_f64());
        exact.push((num, shift));
    }
    let abs_sum = approx.iter().map(|x| x.abs()).sum();
    DegreeRow { exact, abs_sum, approx }
}

/// Decimal digits the assembly of A_N needs so that 17 digits survive.
pub fn required_digits(n_basis: usize) -> u32 {
    let rows: Vec<f64> = (0..n_basis).map(|m| degree_row(m).abs_sum * norm_factor(m)).collect();
    let smax = rows.iter().fold(0.0f64, |a, &b| a.max(b));
    // the largest normalized entry is a_00/π = 1/4
    let amplification = (2 * n_basis + 6) as f64 * smax * smax / 2.0 / 0.25;
    (amplification.log10() + TARGET_DIGITS).ceil().max(15.0) as u32
}

/// A_N: a_{mn} = ⟨G f_m, f_n⟩ for normalized Legendre polynomials f_k = √((2k+1)/2) P_k,
/// degrees 0..N−1.
///
/// Each entry is a sum of large alternating terms, so it is accumulated in
/// extended precision and only the final value is rounded to a double.
pub fn assemble_rayleigh_ritz(n_basis: usize, ctx: &PrecisionContext) -> Result<BasisMatrix> {
    if n_basis == 0 || n_basis > MAX_BASIS {
        return Err(Error::InvalidArgument(format!("basis size must be in 1..={MAX_BASIS}, got {n_basis}")));
    }
    let rows: Vec<DegreeRow> = (0..n_basis).into_par_iter().map(degree_row).collect();
    let needed = required_digits(n_basis);
    let (digits, unit) = match ctx.mode {
        PrecisionMode::Machine => (15, f64::EPSILON / 2.0),
        PrecisionMode::Extended => {
            let d = if ctx.auto_raise { ctx.significant_digits.max(needed) } else { ctx.significant_digits };
            let c = PrecisionContext { significant_digits: d, ..*ctx };
            (d, c.unit_roundoff())
        }
    };
    let over_pi: Vec<Vec<f64>> = match ctx.mode {
        PrecisionMode::Machine => assemble_machine(&rows),
        PrecisionMode::Extended => {
            let bits = PrecisionContext { significant_digits: digits, ..*ctx }.bits();
            assemble_extended(&rows, bits)
        }
    };
    // rounding-error bookkeeping (γ_k |x_m| |G| |x_n|, summed bound)
    let mut max_err = 0.0f64;
    let mut max_abs = 0.0f64;
    let entries = Matrix::from_fn(n_basis, n_basis, |m, n| {
        let (hi, lo) = if m >= n { (m, n) } else { (n, m) };
        let v = over_pi[hi][lo] * PI * norm_factor(hi) * norm_factor(lo);
        let terms = (hi / 2 + lo / 2 + 8) as f64;
        let err = terms * unit * rows[hi].abs_sum * rows[lo].abs_sum / 2.0 * PI * norm_factor(hi) * norm_factor(lo);
        max_err = max_err.max(err);
        max_abs = max_abs.max(v.abs());
        v
    });
    let surviving_digits = if max_err == 0.0 { 99.0 } else { (max_abs / max_err).log10().clamp(0.0, 99.0) };
    if surviving_digits < MIN_SURVIVING_DIGITS {
        return Err(Error::PrecisionExhausted { surviving_digits });
    }
    Ok(BasisMatrix { role: MatrixRole::RayleighRitz, entries, precision_digits: digits, surviving_digits })
}

/// Lower triangle of A_N/π (unnormalized), index [m][n] with n ≤ m.
fn assemble_extended(rows: &[DegreeRow], bits: u64) -> Vec<Vec<f64>> {
    let n_basis = rows.len();
    let recip: Vec<ExtFloat> = (0..2 * n_basis + 2)
        .map(|d| if d == 0 { ExtFloat::zero(bits) } else { ExtFloat::from_ratio(&BigInt::from(1), &BigInt::from(d), bits) })
        .collect();
    let xs: Vec<Vec<ExtFloat>> = rows
        .par_iter()
        .map(|r| r.exact.iter().map(|(num, shift)| ExtFloat::from_bigint(num.clone(), bits).ldexp(-shift)).collect())
        .collect();
    (0..n_basis)
        .into_par_iter()
        .map(|m| {
            // y[s] = Σ_i x_{m,i} / (m − 2i + s + 2) for the exponents s of the same parity
            let y: Vec<ExtFloat> = (0..n_basis)
                .map(|s| {
                    if (s + m) % 2 == 1 {
                        return ExtFloat::zero(bits);
                    }
                    xs[m].iter().enumerate().fold(ExtFloat::zero(bits), |acc, (i, x)| {
                        acc.add(&x.mul(&recip[m - 2 * i + s + 2]))
                    })
                })
                .collect();
            (0..=m)
                .map(|n| {
                    if (m + n) % 2 == 1 {
                        return 0.0;
                    }
                    xs[n]
                        .iter()
                        .enumerate()
                        .fold(ExtFloat::zero(bits), |acc, (k, x)| acc.add(&x.mul(&y[n - 2 * k])))
                        .to_f64()
                })
                .collect()
        })
        .collect()
}

fn assemble_machine(rows: &[DegreeRow]) -> Vec<Vec<f64>> {
    let n_basis = rows.len();
    (0..n_basis)
        .map(|m| {
            (0..=m)
                .map(|n| {
                    if (m + n) % 2 == 1 {
                        return 0.0;
                    }
                    let mut s = 0.0;
                    for (i, xi) in rows[m].approx.iter().enumerate() {
                        for (k, xk) in rows[n].approx.iter().enumerate() {
                            s += xi * xk / ((m - 2 * i + n - 2 * k + 2) as f64);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// λ⁺_n = 1/θ_n, θ_n the n-th largest eigenvalue of the leading N×N block of `a`.
pub fn upper_bounds_from(a: &BasisMatrix, n_basis: usize, count: usize) -> Result<Vec<EigBound>> {
    if count > n_basis || n_basis > a.rows() {
        return Err(Error::InvalidArgument(format!(
            "need count ≤ N ≤ assembled order, got count={count}, N={n_basis}, order={}",
            a.rows()
        )));
    }
    let eig = sym_eig(&a.leading(n_basis).sym()?)?;
    let meta = BoundMeta {
        digits_used: a.precision_digits,
        surviving_digits: a.surviving_digits,
        eig_residual: eig.residual,
        pencil: None,
    };
    Ok((1..=count)
        .map(|n| EigBound {
            n,
            basis: n_basis,
            lower: None,
            upper: Some(1.0 / eig.values[n_basis - n]),
            meta: meta.clone(),
        })
        .collect())
}

/// Rayleigh–Ritz upper bounds for λ_1..λ_count with N basis functions.
pub fn upper_bounds(n_basis: usize, count: usize, ctx: &PrecisionContext) -> Result<Vec<EigBound>> {
    let a = assemble_rayleigh_ritz(n_basis, ctx)?;
    upper_bounds_from(&a, n_basis, count)
}

/// Normalized Legendre values f_0(x)..f_{N−1}(x).
fn legendre_normalized(n_basis: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n_basis);
    let (mut p0, mut p1) = (1.0, x);
    for k in 0..n_basis {
        let v = match k {
            0 => 1.0,
            1 => x,
            _ => {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
                p2
            }
        };
        p.push(v * norm_factor(k));
    }
    p
}

/// Ritz approximation of φ_n from the leading N×N block of `a`, sampled on `grid`.
///
/// The coefficient vector is unit length in the orthonormal Legendre basis,
/// so the function has unit L² norm; its sign makes ⟨φ_n, φ̃_n⟩ positive on the grid.
pub fn rr_eigenfunction(a: &BasisMatrix, n: usize, n_basis: usize, grid: &Grid) -> Result<GridFunction> {
    if n == 0 || n > n_basis || n_basis > a.rows() {
        return Err(Error::InvalidArgument(format!("need 1 ≤ n ≤ N ≤ order, got n={n}, N={n_basis}")));
    }
    let eig = sym_eig(&a.leading(n_basis).sym()?)?;
    let v = eig.vectors.column(n_basis - n);
    let values: Vec<f64> = grid
        .nodes
        .iter()
        .map(|&x| legendre_normalized(n_basis, x).iter().zip(&v).map(|(p, c)| p * c).sum())
        .collect();
    let f = GridFunction::new(grid.nodes.clone(), values, grid.weights.clone())?;
    let tilde = grid.sample(|x| ApproxEigenfunction::new(n).eval(x));
    Ok(if f.inner(&tilde)? < 0.0 { f.scale(-1.0) } else { f })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        assert!((green_moment(0, 0).to_f64() - PI / 2.0).abs() < 1e-15);
        assert!((green_moment(1, 1).to_f64() - PI / 16.0).abs() < 1e-15);
        assert!(green_moment(0, 1).is_zero());
        for m in 0..8 {
            for n in 0..8 {
                assert_eq!(green_moment(m, n), green_moment(n, m));
                if (m + n) % 2 == 0 {
                    assert!(green_moment(m, n).to_f64() > 0.0);
                }
            }
        }
    }

    #[test]
    fn legendre_coefficients_are_classical() {
        // 8 P_3 = 20x³ − 12x
        assert_eq!(legendre_coefficient(3, 0), BigInt::from(20));
        assert_eq!(legendre_coefficient(3, 1), BigInt::from(-12));
        // 16 P_4 = 70x⁴ − 60x² + 6
        assert_eq!(legendre_coefficient(4, 2), BigInt::from(6));
    }

    #[test]
    fn small_matrix_structure() {
        let a = assemble_rayleigh_ritz(6, &PrecisionContext::default()).unwrap();
        for m in 0..6 {
            for n in 0..6 {
                if (m + n) % 2 == 1 {
                    assert_eq!(a.entries[(m, n)], 0.0);
                }
            }
        }
        assert!((a.entries[(0, 0)] - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_to_last_digit() {
        let a = assemble_rayleigh_ritz(20, &PrecisionContext::default()).unwrap();
        for m in 0..20 {
            for n in 0..20 {
                assert_eq!(a.entries[(m, n)].to_bits(), a.entries[(n, m)].to_bits());
            }
        }
    }

    #[test]
    fn machine_precision_gives_up_for_large_bases() {
        assert!(matches!(
            assemble_rayleigh_ritz(20, &PrecisionContext::machine()),
            Err(Error::PrecisionExhausted { .. })
        ));
        assert!(assemble_rayleigh_ritz(2, &PrecisionContext::machine()).is_ok());
    }

    #[test]
    fn fixed_digits_can_be_exhausted() {
        let ctx = PrecisionContext::default().with_auto_raise(false);
        assert!(matches!(assemble_rayleigh_ritz(150, &ctx), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn one_function_basis() {
        // only the constant: λ⁺ = 1/(π/4)
        let b = upper_bounds(1, 1, &PrecisionContext::default()).unwrap();
        assert!((b[0].upper.unwrap() - 4.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(assemble_rayleigh_ritz(0, &PrecisionContext::default()).is_err());
        assert!(upper_bounds(3, 5, &PrecisionContext::default()).is_err());
    }
}
