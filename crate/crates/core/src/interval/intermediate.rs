use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{generalized_sym_eig, solve_spd, Matrix, SymMatrix};

use super::bounds::{BoundMeta, EigBound};
use super::ritz::{BasisMatrix, MatrixRole};

/// Sign attached to the n-th relaxation function so that C takes its alternating form.
fn twist(n: usize) -> f64 {
    if n.div_ceil(2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Gram entry b_{m,n} (1-indexed) of the relaxation functions.
///
/// ```
/// use cauchy_spectral::interval::gram_entry;
/// assert!((gram_entry(1, 1) - (4.0 + 32.0 / (3.0 * std::f64::consts::PI))).abs() < 1e-14);
/// assert_eq!(gram_entry(1, 2), 0.0);
/// ```
pub fn gram_entry(m: usize, n: usize) -> f64 {
    assert!(m >= 1 && n >= 1, "Gram indices start at 1");
    if (m + n) % 2 == 1 {
        return 0.0;
    }
    let (mf, nf) = (m as f64, n as f64);
    let d = mf - nf;
    let s = mf + nf;
    let mut b = -32.0 * mf * nf / (PI * (d * d - 1.0) * (s * s - 1.0));
    if m == n {
        b += 4.0;
    }
    twist(m) * twist(n) * b
}

/// The matrices of the intermediate problem with N constraints.
#[derive(Debug, Clone)]
pub struct IntermediateMatrices {
    /// N × (N+1)
    pub c: BasisMatrix,
    /// N × N
    pub gram: BasisMatrix,
    /// diagonal 1..=N+1
    pub d: Vec<f64>,
    /// (N+1) × (N+1), I − Cᵀ B⁻¹ C
    pub s: BasisMatrix,
}

pub fn assemble_intermediate(n_basis: usize) -> Result<IntermediateMatrices> {
    if n_basis == 0 {
        return Err(Error::InvalidArgument("basis size must be at least 1".into()));
    }
    let k = n_basis + 1;
    let c = Matrix::from_fn(n_basis, k, |i, j| {
        let (n, col) = (i + 1, j + 1);
        if col + 1 == n {
            if n % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else if col == n + 1 {
            if n % 2 == 0 {
                -1.0
            } else {
                1.0
            }
        } else {
            0.0
        }
    });
    let gram = SymMatrix::from_fn(n_basis, |i, j| gram_entry(i + 1, j + 1));
    let binv_c = solve_spd(&gram, &c)?;
    let ct_binv_c = c.transpose().matmul(&binv_c);
    let s = Matrix::from_fn(k, k, |i, j| {
        // symmetrize the rounding
        let v = 0.5 * (ct_binv_c[(i, j)] + ct_binv_c[(j, i)]);
        if i == j {
            1.0 - v
        } else {
            -v
        }
    });
    let wrap = |role, entries| BasisMatrix { role, entries, precision_digits: 15, surviving_digits: f64::NAN };
    Ok(IntermediateMatrices {
        c: wrap(MatrixRole::Constraint, c),
        gram: wrap(MatrixRole::Gram, gram.to_dense()),
        d: (1..=k).map(|v| v as f64).collect(),
        s: wrap(MatrixRole::Schur, s),
    })
}

/// What the pencil solve looked like, recorded alongside the lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilObservation {
    /// Largest finite eigenvalue of the pencil.
    pub max_eigenvalue: f64,
    /// Whether every finite eigenvalue is below N + 2.
    pub all_below_n_plus_2: bool,
    /// Directions dropped because S is (numerically) singular on them.
    pub degenerate: usize,
}

/// Lower bounds for λ_1..λ_count from the intermediate problem with N constraints.
pub fn lower_bounds(n_basis: usize, count: usize) -> Result<Vec<EigBound>> {
    lower_bounds_from(&assemble_intermediate(n_basis)?, count)
}

pub fn lower_bounds_from(m: &IntermediateMatrices, count: usize) -> Result<Vec<EigBound>> {
    let n_basis = m.c.rows();
    let k = n_basis + 1;
    if count == 0 || count > k {
        return Err(Error::InvalidArgument(format!("count must be in 1..={k}, got {count}")));
    }
    let pencil = generalized_sym_eig(&m.s.sym()?, &m.d)?;
    let max_eigenvalue = pencil.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let observation = PencilObservation {
        max_eigenvalue,
        all_below_n_plus_2: max_eigenvalue < (n_basis + 2) as f64,
        degenerate: pencil.degenerate.len(),
    };
    let mut merged = pencil.values.clone();
    merged.extend((k + 1..=k + count).map(|v| v as f64));
    merged.sort_by(f64::total_cmp);
    let meta = BoundMeta {
        digits_used: 15,
        surviving_digits: f64::NAN,
        eig_residual: pencil.residual,
        pencil: Some(observation),
    };
    Ok(merged
        .into_iter()
        .take(count)
        .enumerate()
        .map(|(i, v)| EigBound { n: i + 1, basis: n_basis, lower: Some(v), upper: None, meta: meta.clone() })
        .collect())
}
