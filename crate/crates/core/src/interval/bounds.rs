use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;

use super::intermediate::{assemble_intermediate, lower_bounds_from, PencilObservation};
use super::ritz::{assemble_rayleigh_ritz, upper_bounds_from, BasisMatrix};

/// Published brackets (lower, upper) for λ_1..λ_10 from a 900-function computation.
pub const REFERENCE_BRACKETS: [(f64, f64); 10] = [
    (1.15777388369758, 1.15777388369792),
    (2.75475474221510, 2.75475474221695),
    (4.31680106659303, 4.31680106659758),
    (5.89214747093908, 5.89214747094751),
    (7.46017573939764, 7.46017573941122),
    (9.03285269048857, 9.03285269050838),
    (10.60229309961113, 10.60229309963854),
    (12.17411826272585, 12.17411826276180),
    (13.74410905939799, 13.74410905944402),
    (15.31555499602690, 15.31555499608382),
];

/// How a bound was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundMeta {
    /// Working precision of the assembly, in decimal digits.
    pub digits_used: u32,
    /// Certified digits of the assembled matrix (NaN when not tracked).
    pub surviving_digits: f64,
    /// Residual certificate of the symmetric eigensolve.
    pub eig_residual: f64,
    pub pencil: Option<PencilObservation>,
}

/// Bounds for λ_n computed with N basis functions. Either half may be absent
/// when only one method was run.
#[derive(Debug, Clone, PartialEq)]
pub struct EigBound {
    pub n: usize,
    pub basis: usize,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub meta: BoundMeta,
}

impl EigBound {
    pub fn midpoint(&self) -> Option<f64> {
        Some(0.5 * (self.lower? + self.upper?))
    }

    pub fn width(&self) -> Option<f64> {
        Some(self.upper? - self.lower?)
    }

    /// Whether the published bracket for λ_n lies inside this one (None for n > 10 or half bounds).
    pub fn reference_contained(&self) -> Option<bool> {
        let (lo, hi) = REFERENCE_BRACKETS.get(self.n.checked_sub(1)?)?;
        let (l, u) = (self.lower?, self.upper?);
        Some(l <= *lo && *hi <= u)
    }
}

/// Brackets λ⁻_n ≤ λ_n ≤ λ⁺_n for n = 1..=n_max with N basis functions.
pub fn bracket(n_max: usize, n_basis: usize, ctx: &PrecisionContext) -> Result<Vec<EigBound>> {
    if n_max == 0 || n_max > n_basis {
        return Err(Error::InvalidArgument(format!("need 1 ≤ n_max ≤ N, got n_max={n_max}, N={n_basis}")));
    }
    let a = assemble_rayleigh_ritz(n_basis, ctx)?;
    bracket_from(&a, n_basis, n_max)
}

/// As [`bracket`], reusing an assembled A of order ≥ N.
pub fn bracket_from(a: &BasisMatrix, n_basis: usize, n_max: usize) -> Result<Vec<EigBound>> {
    if n_max == 0 || n_max > n_basis {
        return Err(Error::InvalidArgument(format!("need 1 ≤ n_max ≤ N, got n_max={n_max}, N={n_basis}")));
    }
    let upper = upper_bounds_from(a, n_basis, n_max)?;
    let lower = lower_bounds_from(&assemble_intermediate(n_basis)?, n_max)?;
    upper
        .into_iter()
        .zip(lower)
        .map(|(u, l)| {
            let (lo, hi) = (l.lower.unwrap(), u.upper.unwrap());
            if lo > hi {
                return Err(Error::BracketInversion { n: u.n, lower: lo, upper: hi });
            }
            Ok(EigBound {
                n: u.n,
                basis: n_basis,
                lower: Some(lo),
                upper: Some(hi),
                meta: BoundMeta { pencil: l.meta.pencil, ..u.meta },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_brackets_contain_reference() {
        let b = bracket(5, 30, &PrecisionContext::default()).unwrap();
        for e in &b {
            assert_eq!(e.reference_contained(), Some(true), "{e:?}");
        }
        assert!(b[0].width().unwrap() < 1e-5);
    }

    #[test]
    fn reference_only_for_first_ten() {
        let e = EigBound {
            n: 11,
            basis: 20,
            lower: Some(1.0),
            upper: Some(2.0),
            meta: BoundMeta { digits_used: 15, surviving_digits: 17.0, eig_residual: 0.0, pencil: None },
        };
        assert_eq!(e.reference_contained(), None);
        assert_eq!(e.midpoint(), Some(1.5));
    }

    #[test]
    fn rejects_bad_n_max() {
        assert!(bracket(0, 5, &PrecisionContext::default()).is_err());
        assert!(bracket(6, 5, &PrecisionContext::default()).is_err());
    }
}
