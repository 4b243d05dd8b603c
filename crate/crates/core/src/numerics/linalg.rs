use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Matrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Symmetric matrix in packed lower-triangular storage, so that
/// `get(i, j) == get(j, i)` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    packed: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix { order, packed: vec![0.0; order * (order + 1) / 2] }
    }

    pub fn identity(order: usize) -> Self {
        Self::diagonal(&vec![1.0; order])
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = SymMatrix::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from the lower triangle of `f`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(order * (order + 1) / 2);
        for i in 0..order {
            for j in 0..=i {
                packed.push(f(i, j));
            }
        }
        SymMatrix { order, packed }
    }

    /// Symmetrizes a dense square matrix as (M + Mᵀ)/2.
    pub fn from_dense(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::InvalidArgument(format!("{}×{} matrix is not square", m.rows(), m.cols())));
        }
        Ok(SymMatrix::from_fn(m.rows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)])))
    }

    fn idx(i: usize, j: usize) -> usize {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        r * (r + 1) / 2 + c
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.packed[Self::idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.packed[Self::idx(i, j)] = v;
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.order, self.order, |i, j| self.get(i, j))
    }

    /// Leading principal submatrix of the given order.
    pub fn leading(&self, order: usize) -> SymMatrix {
        assert!(order <= self.order);
        SymMatrix { order, packed: self.packed[..order * (order + 1) / 2].to_vec() }
    }

    pub fn norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.order {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.order).map(|i| (0..self.order).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|x| x.is_finite())
    }
}

/// Eigen-decomposition with its residual certificate.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column i is the unit eigenvector of `values[i]`.
    pub vectors: Matrix,
    /// max_i ‖M v_i − θ_i v_i‖₂ / ‖M‖_F
    pub residual: f64,
    /// max |VᵀV − I|
    pub orthogonality: f64,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
pub fn sym_eig(m: &SymMatrix) -> Result<SymEigen> {
    if !m.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = m.order();
    let mut a = m.to_dense();
    let mut v = Matrix::identity(n);
    let norm = m.norm();
    let mut sweeps = 0;
    if n > 1 && norm > 0.0 {
        loop {
            let off: f64 = (0..n)
                .flat_map(|i| (0..i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum::<f64>()
                .sqrt();
            if off <= f64::EPSILON * 1e-2 * norm || off == 0.0 {
                break;
            }
            if sweeps >= MAX_SWEEPS {
                return Err(Error::NoConvergence { sweeps, off_norm: off });
            }
            sweeps += 1;
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        // deterministic sign: largest-magnitude component positive
        let col = v.column(i);
        let pivot = col.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        let s = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors[(r, k)] = s * col[r];
        }
    }
    let (residual, orthogonality) = certificate(m, &values, &vectors);
    Ok(SymEigen { values, vectors, residual, orthogonality, sweeps })
}

fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    if apq == 0.0 {
        return;
    }
    let app = a[(p, p)];
    let aqq = a[(q, q)];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn certificate(m: &SymMatrix, values: &[f64], vectors: &Matrix) -> (f64, f64) {
    let n = m.order();
    let norm = m.norm().max(f64::MIN_POSITIVE);
    let dense = m.to_dense();
    let mut residual = 0.0f64;
    for k in 0..n {
        let col = vectors.column(k);
        let mut r2 = 0.0;
        for i in 0..n {
            let mv: f64 = dense.row(i).iter().zip(&col).map(|(a, b)| a * b).sum();
            let d = mv - values[k] * col[i];
            r2 += d * d;
        }
        residual = residual.max(r2.sqrt() / norm);
    }
    let vt = vectors.transpose();
    let mut orth = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = vt.row(i).iter().zip(vt.row(j)).map(|(a, b)| a * b).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            orth = orth.max((dot - target).abs());
        }
    }
    (residual, orth)
}

/// Solves M X = rhs for symmetric positive definite M by Cholesky factorization.
pub fn solve_spd(m: &SymMatrix, rhs: &Matrix) -> Result<Matrix> {
    let n = m.order();
    if rhs.rows() != n {
        return Err(Error::InvalidArgument(format!("rhs has {} rows, matrix order is {n}", rhs.rows())));
    }
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j);
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    let mut x = rhs.clone();
    for c in 0..rhs.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in i + 1..n {
                s -= l[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    Ok(x)
}

/// Spectrum of the pencil D α = λ S α.
#[derive(Debug, Clone)]
pub struct PencilSpectrum {
    /// Ascending λ from the non-degenerate directions.
    pub values: Vec<f64>,
    /// Eigenvalues θ of D^{−1/2} S D^{−1/2} at or below the threshold; their λ are omitted.
    pub degenerate: Vec<f64>,
    pub residual: f64,
}

/// Eigenvalues below this are treated as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Eigenvalues of D α = λ S α for positive diagonal D.
///
/// Uses the symmetric form D^{−1/2} S D^{−1/2} v = θ v, then reports each λ as
/// the Rayleigh quotient αᵀDα / αᵀSα with α = D^{−1/2} v (equal to 1/θ in exact
/// arithmetic, and exact when S is diagonal).
pub fn generalized_sym_eig(s: &SymMatrix, d: &[f64]) -> Result<PencilSpectrum> {
    let n = s.order();
    if d.len() != n {
        return Err(Error::InvalidArgument(format!("D has {} entries, S has order {n}", d.len())));
    }
    if let Some(bad) = d.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument(format!("D must be positive, found {bad}")));
    }
    let isq: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let scaled = SymMatrix::from_fn(n, |i, j| isq[i] * s.get(i, j) * isq[j]);
    let eig = sym_eig(&scaled)?;
    let mut values = Vec::new();
    let mut degenerate = Vec::new();
    for k in 0..n {
        let theta = eig.values[k];
        if theta <= DEGENERACY_THRESHOLD {
            degenerate.push(theta);
            continue;
        }
        let mut alpha: Vec<f64> = (0..n).map(|i| isq[i] * eig.vectors[(i, k)]).collect();
        let amax = alpha.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        alpha.iter_mut().for_each(|x| *x /= amax);
        let num: f64 = (0..n).map(|i| d[i] * alpha[i] * alpha[i]).sum();
        let sa = s.mul_vec(&alpha);
        let den: f64 = alpha.iter().zip(&sa).map(|(a, b)| a * b).sum();
        let lam = if den > 0.0 { num / den } else { 1.0 / theta };
        values.push(lam);
    }
    values.sort_by(f64::total_cmp);
    Ok(PencilSpectrum { values, degenerate, residual: eig.residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(n: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn diagonal_sorted() {
        let e = sym_eig(&SymMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two() {
        let m = SymMatrix::from_fn(2, |i, j| if i == j { 0.0 } else { 1.0 });
        let e = sym_eig(&m).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_residual_certificate() {
        let m = random_sym(10, 7);
        let e = sym_eig(&m).unwrap();
        assert!(e.residual <= 1e-12, "{}", e.residual);
        assert!(e.orthogonality <= 1e-12);
    }

    #[test]
    fn spd_solves() {
        let x = solve_spd(&SymMatrix::identity(3), &Matrix::from_columns(&[vec![1.0, 0.0, 0.0]])).unwrap();
        assert_eq!(x.column(0), vec![1.0, 0.0, 0.0]);
        let x = solve_spd(&SymMatrix::diagonal(&[2.0, 4.0]), &Matrix::from_columns(&[vec![2.0, 4.0]])).unwrap();
        assert!(x.column(0).iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn spd_rejects_indefinite() {
        let m = SymMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            solve_spd(&m, &Matrix::identity(2)),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }

    #[test]
    fn pencil_identity_reproduces_d() {
        let d: Vec<f64> = (1..=12).map(|k| k as f64).collect();
        let p = generalized_sym_eig(&SymMatrix::identity(12), &d).unwrap();
        assert_eq!(p.values, d);
        let p = generalized_sym_eig(&SymMatrix::diagonal(&[0.5, 0.5]), &[1.0, 2.0]).unwrap();
        assert_eq!(p.values, vec![2.0, 4.0]);
    }

    #[test]
    fn pencil_reports_degenerate_directions() {
        let p = generalized_sym_eig(&SymMatrix::diagonal(&[1.0, 0.0, 1.0]), &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.values, vec![1.0, 3.0]);
        assert_eq!(p.degenerate.len(), 1);
    }

    proptest! {
        #[test]
        fn eigenvalue_sum_is_trace(n in 2usize..12, seed in any::<u64>()) {
            let m = random_sym(n, seed);
            let scale = m.norm();
            let m = SymMatrix::from_fn(n, |i, j| m.get(i, j) / scale);
            let e = sym_eig(&m).unwrap();
            let sum: f64 = e.values.iter().sum();
            prop_assert!((sum - m.trace()).abs() <= 1e-10 * (1.0f64).max(m.trace().abs()));
            prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn spd_residual_small(n in 1usize..10, seed in any::<u64>()) {
            let r = random_sym(n, seed);
            // R² + I is SPD
            let rd = r.to_dense();
            let m = SymMatrix::from_dense(&rd.matmul(&rd)).unwrap();
            let m = SymMatrix::from_fn(n, |i, j| m.get(i, j) + if i == j { 1.0 } else { 0.0 });
            let b = Matrix::from_fn(n, 2, |i, j| (i + 3 * j) as f64 - 2.0);
            let x = solve_spd(&m, &b).unwrap();
            let mx = m.to_dense().matmul(&x);
            let mut diff = 0.0f64;
            for i in 0..n { for j in 0..2 { diff = diff.max((mx[(i, j)] - b[(i, j)]).abs()); } }
            prop_assert!(diff <= 1e-12 * m.norm() * x.norm().max(1.0));
        }
    }
}
