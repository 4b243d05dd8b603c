use crate::error::{Error, Result};

use super::gauss_legendre;

/// Quadrature node set.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Grid {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check(&nodes, nodes.len(), &weights)?;
        Ok(Grid { nodes, weights })
    }

    /// `points` equally spaced nodes on [a, b] with trapezoid weights.
    pub fn trapezoid(a: f64, b: f64, points: usize) -> Result<Self> {
        if points < 2 || !(b > a) {
            return Err(Error::InvalidArgument(format!("trapezoid grid needs a < b and ≥ 2 points, got [{a}, {b}] with {points}")));
        }
        let h = (b - a) / (points - 1) as f64;
        let nodes: Vec<f64> = (0..points).map(|i| if i + 1 == points { b } else { a + h * i as f64 }).collect();
        let weights = (0..points).map(|i| if i == 0 || i + 1 == points { 0.5 * h } else { h }).collect();
        Ok(Grid { nodes, weights })
    }

    /// Composite Gauss–Legendre rule over consecutive breakpoints.
    pub fn composite_gauss(breaks: &[f64], per_panel: usize) -> Result<Self> {
        if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("breakpoints must be strictly increasing".into()));
        }
        let rule = gauss_legendre(per_panel);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            for (x, wt) in rule.on(w[0], w[1]) {
                nodes.push(x);
                weights.push(wt);
            }
        }
        Ok(Grid { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest gap between consecutive nodes.
    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction {
            values: self.nodes.iter().map(|&x| f(x)).collect(),
            nodes: self.nodes.clone(),
            weights: self.weights.clone(),
        }
    }
}

/// Sampled function together with quadrature weights for its nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

fn check(nodes: &[f64], nvalues: usize, weights: &[f64]) -> Result<()> {
    if nodes.len() != nvalues || nodes.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} nodes, {} values, {} weights",
            nodes.len(),
            nvalues,
            weights.len()
        )));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("nodes must be strictly increasing".into()));
    }
    Ok(())
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        check(&nodes, values.len(), &weights)?;
        Ok(GridFunction { nodes, values, weights })
    }

    pub fn grid(&self) -> Grid {
        Grid { nodes: self.nodes.clone(), weights: self.weights.clone() }
    }

    /// Σ wᵢ fᵢ
    pub fn integral(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Σ wᵢ fᵢ gᵢ; both functions must live on the same grid.
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        if self.nodes != other.nodes {
            return Err(Error::InvalidArgument("inner product of functions on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).zip(&self.weights).map(|((a, b), w)| a * b * w).sum())
    }

    pub fn norm2_squared(&self) -> f64 {
        self.values.iter().zip(&self.weights).map(|(v, w)| v * v * w).sum()
    }

    pub fn norm2(&self) -> f64 {
        self.norm2_squared().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> GridFunction {
        GridFunction { values: self.values.iter().map(|v| c * v).collect(), ..self.clone() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
