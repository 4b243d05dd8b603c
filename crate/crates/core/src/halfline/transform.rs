use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{Grid, GridFunction};

use super::remainder::psi;

/// Πf(x) = ∫₀^∞ f(λ) ψ_λ(x) dλ, by the input grid's quadrature weights,
/// evaluated at the nodes of `output`.
///
/// The input must vanish at both ends of its grid (compact support inside
/// the grid), and its spacing must resolve the oscillation of ψ_λ(x) in λ
/// at the largest output node: spacing ≤ π/(8·max x). With these, Π∘Π = (π/2)·id
/// up to discretization error.
pub fn pi_transform(f: &GridFunction, output: &Grid) -> Result<GridFunction> {
    if f.is_empty() || output.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if f.nodes[0] < 0.0 {
        return Err(Error::Domain(format!("input grid must lie in [0, ∞), starts at {}", f.nodes[0])));
    }
    let peak = f.sup_norm();
    let edge = f.values[0].abs().max(f.values[f.len() - 1].abs());
    if edge > 1e-10 * peak {
        return Err(Error::InvalidArgument("input is not compactly supported within its grid".into()));
    }
    let xmax = output.nodes.iter().fold(0.0f64, |m, &x| m.max(x));
    let required = std::f64::consts::PI / (8.0 * xmax.max(f64::MIN_POSITIVE));
    let spacing = f.grid().max_spacing();
    if spacing > required {
        return Err(Error::GridTooCoarse { spacing, required });
    }
    let support: Vec<(f64, f64)> = f
        .nodes
        .iter()
        .zip(f.values.iter().zip(&f.weights))
        .filter(|(_, (v, _))| **v != 0.0)
        .map(|(&l, (&v, &w))| (l, v * w))
        .collect();
    let values: Vec<f64> = output
        .nodes
        .par_iter()
        .map(|&x| support.iter().map(|&(l, vw)| if l > 0.0 { vw * psi(l, x).psi } else { 0.0 }).sum())
        .collect();
    GridFunction::new(output.nodes.clone(), values, output.weights.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_maps_to_zero() {
        let g = Grid::trapezoid(0.0, 3.0, 100).unwrap();
        let f = g.sample(|_| 0.0);
        let out = Grid::trapezoid(0.0, 5.0, 11).unwrap();
        let p = pi_transform(&f, &out).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn coarse_grid_rejected() {
        let g = Grid::trapezoid(0.0, 3.0, 10).unwrap();
        let f = g.sample(|l| (l * (3.0 - l)).max(0.0));
        let out = Grid::trapezoid(0.0, 50.0, 11).unwrap();
        assert!(matches!(pi_transform(&f, &out), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn support_must_be_inside_grid() {
        let g = Grid::trapezoid(1.0, 2.0, 1000).unwrap();
        let f = g.sample(|_| 1.0);
        let out = Grid::trapezoid(0.0, 1.0, 3).unwrap();
        assert!(matches!(pi_transform(&f, &out), Err(Error::InvalidArgument(_))));
    }
}
