//! Dense symmetric-matrix primitives: sample covariance, eigendecomposition,
//! reconstruction, condition numbers, and the handful of dense kernels the
//! solvers run hot.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads. With the `parallel`
//! feature the kernels split work over output rows; every inner reduction
//! runs in a fixed order, so parallel and sequential results are
//! bit-identical.

use crate::error::{Error, Result};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Relative asymmetry tolerated at construction; anything worse is rejected
/// rather than silently averaged away.
pub const SYMMETRY_RTOL: f64 = 1e-8;

/// Matrices at least this large go through the rayon kernels when the
/// `parallel` feature is on; below it the sequential path is faster.
#[cfg(feature = "parallel")]
const PAR_MIN_DIM: usize = 64;

/// Dense `p x p` real symmetric matrix, stored row-major with exact
/// entrywise symmetry (`a[i][j] == a[j][i]` bit-for-bit).
///
/// Construction symmetrizes `(A + A^T) / 2` when the asymmetry is within
/// [`SYMMETRY_RTOL`] relative to the largest entry; larger asymmetry is an
/// error. Pseudo-likelihood pipelines routinely hand back matrices with
/// tiny asymmetries, which is why averaging is preferred over rejection.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds from a row-major `dim * dim` buffer.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        let scale = data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        let mut sym = data;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = sym[i * dim + j];
                let b = sym[j * dim + i];
                if (a - b).abs() > SYMMETRY_RTOL * scale {
                    return Err(Error::InvalidInput(format!(
                        "asymmetry {:.3e} at ({i},{j}) exceeds tolerance {:.3e}",
                        (a - b).abs(),
                        SYMMETRY_RTOL * scale
                    )));
                }
                let avg = 0.5 * (a + b);
                sym[i * dim + j] = avg;
                sym[j * dim + i] = avg;
            }
        }
        Ok(Self { dim, data: sym })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("matrix rows must all have length p".into()));
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut data = vec![0.0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            data[i * dim + i] = d;
        }
        Self { dim, data }
    }

    /// Internal constructor for buffers already exactly symmetric.
    pub(crate) fn from_symmetric_data(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: f64) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + c * b)
            .collect();
        Self { dim: self.dim, data }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|x| c * x).collect() }
    }
}

impl std::ops::Add for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn add(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        self.add_scaled(rhs, 1.0)
    }
}

impl std::ops::Sub for &SymmetricMatrix {
    type Output = SymmetricMatrix;
    fn sub(self, rhs: &SymmetricMatrix) -> SymmetricMatrix {
        self.add_scaled(rhs, -1.0)
    }
}

/// General dense square matrix, row-major. Used for eigenvector bases and
/// products of symmetric matrices (which are not symmetric themselves).
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn from_data(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { dim, data })
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Max-norm of `V^T V - I`; zero for an exactly orthogonal matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        let p = self.dim;
        let mut worst = 0.0f64;
        for i in 0..p {
            for j in i..p {
                let mut dot = 0.0;
                for k in 0..p {
                    dot += self.get(k, i) * self.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn mat_mul_row(a: &SquareMatrix, b: &SquareMatrix, i: usize, out_row: &mut [f64]) {
    let p = a.dim;
    for j in 0..p {
        let mut acc = 0.0;
        for k in 0..p {
            acc += a.get(i, k) * b.get(k, j);
        }
        out_row[j] = acc;
    }
}

/// Sequential `A * B`.
pub fn mat_mul_seq(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    assert_eq!(a.dim, b.dim, "mat_mul dimension mismatch");
    let p = a.dim;
    let mut data = vec![0.0; p * p];
    for (i, row) in data.chunks_mut(p).enumerate() {
        mat_mul_row(a, b, i, row);
    }
    SquareMatrix { dim: p, data }
}

/// Row-parallel `A * B`; identical output to [`mat_mul_seq`].
#[cfg(feature = "parallel")]
pub fn mat_mul_par(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    assert_eq!(a.dim, b.dim, "mat_mul dimension mismatch");
    let p = a.dim;
    let mut data = vec![0.0; p * p];
    data.par_chunks_mut(p)
        .enumerate()
        .for_each(|(i, row)| mat_mul_row(a, b, i, row));
    SquareMatrix { dim: p, data }
}

/// `A * B` for square matrices.
pub fn mat_mul(a: &SquareMatrix, b: &SquareMatrix) -> SquareMatrix {
    #[cfg(feature = "parallel")]
    if a.dim >= PAR_MIN_DIM {
        return mat_mul_par(a, b);
    }
    mat_mul_seq(a, b)
}

pub fn symmetric_to_square(a: &SymmetricMatrix) -> SquareMatrix {
    SquareMatrix { dim: a.dim, data: a.data.clone() }
}

fn jordan_row(m: &SymmetricMatrix, x: &SymmetricMatrix, i: usize, out_row: &mut [f64]) {
    let p = m.dim;
    for j in 0..p {
        let mut acc = 0.0;
        for k in 0..p {
            acc += m.get(i, k) * x.get(k, j) + x.get(i, k) * m.get(k, j);
        }
        out_row[j] = 0.5 * acc;
    }
}

/// Sequential Jordan product `(M X + X M) / 2` of symmetric matrices.
pub fn jordan_product_seq(m: &SymmetricMatrix, x: &SymmetricMatrix) -> SymmetricMatrix {
    assert_eq!(m.dim, x.dim, "jordan_product dimension mismatch");
    let p = m.dim;
    let mut data = vec![0.0; p * p];
    for (i, row) in data.chunks_mut(p).enumerate() {
        jordan_row(m, x, i, row);
    }
    symmetrize_in_place(p, &mut data);
    SymmetricMatrix { dim: p, data }
}

/// Row-parallel Jordan product; identical output to [`jordan_product_seq`].
#[cfg(feature = "parallel")]
pub fn jordan_product_par(m: &SymmetricMatrix, x: &SymmetricMatrix) -> SymmetricMatrix {
    assert_eq!(m.dim, x.dim, "jordan_product dimension mismatch");
    let p = m.dim;
    let mut data = vec![0.0; p * p];
    data.par_chunks_mut(p)
        .enumerate()
        .for_each(|(i, row)| jordan_row(m, x, i, row));
    symmetrize_in_place(p, &mut data);
    SymmetricMatrix { dim: p, data }
}

/// Jordan product `(M X + X M) / 2`; symmetric whenever `M` and `X` are.
/// This is the gradient kernel of the quadratic forms `Tr(X M X) / 2`.
pub fn jordan_product(m: &SymmetricMatrix, x: &SymmetricMatrix) -> SymmetricMatrix {
    #[cfg(feature = "parallel")]
    if m.dim >= PAR_MIN_DIM {
        return jordan_product_par(m, x);
    }
    jordan_product_seq(m, x)
}

// The row kernel is symmetric only up to rounding; tie the halves together
// so downstream code can rely on exact symmetry.
fn symmetrize_in_place(p: usize, data: &mut [f64]) {
    for i in 0..p {
        for j in (i + 1)..p {
            let avg = 0.5 * (data[i * p + j] + data[j * p + i]);
            data[i * p + j] = avg;
            data[j * p + i] = avg;
        }
    }
}

/// Frobenius inner product `<A, B> = sum_ij a_ij b_ij`.
pub fn frob_inner(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
    debug_assert_eq!(a.dim, b.dim);
    a.data.iter().zip(&b.data).map(|(x, y)| x * y).sum()
}

/// `n` observations of a `p`-variate vector, row-major.
#[derive(Debug, Clone)]
pub struct DataMatrix {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, p: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || p == 0 {
            return Err(Error::InvalidInput("data matrix needs n >= 1 and p >= 1".into()));
        }
        if data.len() != n * p {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for {n}x{p} data, got {}",
                n * p,
                data.len()
            )));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("data matrix has non-finite entries".into()));
        }
        Ok(Self { n, p, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::DimensionMismatch("data rows must all have the same length".into()));
        }
        Self::new(n, p, rows.concat())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }
}

fn covariance_row(data: &DataMatrix, means: &[f64], j: usize, out: &mut [f64]) {
    // out[k] for k >= j only; the caller mirrors.
    let (n, p) = (data.n, data.p);
    let inv_n = 1.0 / n as f64;
    for k in j..p {
        let mut acc = 0.0;
        for i in 0..n {
            let row = data.row(i);
            acc += (row[j] - means[j]) * (row[k] - means[k]);
        }
        out[k - j] = acc * inv_n;
    }
}

/// Sample covariance `S = (1/n) sum_i (X_i - mean)(X_i - mean)^T`.
///
/// The divisor is `n`, not `n - 1`; this matches the estimator the solvers
/// are defined against, and differs from the unbiased convention used by
/// many statistics libraries. A single observation yields the zero matrix.
pub fn sample_covariance(data: &DataMatrix) -> SymmetricMatrix {
    let p = data.p;
    let means = column_means(data);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(p);

    #[cfg(feature = "parallel")]
    if p >= PAR_MIN_DIM {
        rows = (0..p)
            .into_par_iter()
            .map(|j| {
                let mut out = vec![0.0; p - j];
                covariance_row(data, &means, j, &mut out);
                out
            })
            .collect();
    }
    if rows.is_empty() {
        for j in 0..p {
            let mut out = vec![0.0; p - j];
            covariance_row(data, &means, j, &mut out);
            rows.push(out);
        }
    }

    let mut out = vec![0.0; p * p];
    for (j, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let k = j + off;
            out[j * p + k] = v;
            out[k * p + j] = v;
        }
    }
    SymmetricMatrix { dim: p, data: out }
}

fn column_means(data: &DataMatrix) -> Vec<f64> {
    let (n, p) = (data.n, data.p);
    let mut means = vec![0.0; p];
    for i in 0..n {
        for (m, &x) in means.iter_mut().zip(data.row(i)) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    means
}

/// Eigendecomposition of a symmetric matrix: orthogonal `vectors` (columns
/// are eigenvectors) paired with `values` sorted non-increasing.
#[derive(Debug, Clone)]
pub struct Spectrum {
    vectors: SquareMatrix,
    values: Vec<f64>,
}

impl Spectrum {
    #[inline]
    pub fn vectors(&self) -> &SquareMatrix {
        &self.vectors
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Spectral decomposition with a deterministic output convention:
/// eigenvalues sorted non-increasing (ties kept in the backend's order),
/// and each eigenvector's largest-magnitude component made positive
/// (first such component on exact magnitude ties).
pub fn eigendecompose(a: &SymmetricMatrix) -> Result<Spectrum> {
    let p = a.dim;
    let na = nalgebra::DMatrix::from_row_slice(p, p, &a.data);
    let eig = na.symmetric_eigen();

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut values = Vec::with_capacity(p);
    let mut vectors = vec![0.0; p * p];
    for (col, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let mut max_abs = 0.0f64;
        let mut max_idx = 0usize;
        for r in 0..p {
            let v = eig.eigenvectors[(r, src)].abs();
            if v > max_abs {
                max_abs = v;
                max_idx = r;
            }
        }
        let flip = if eig.eigenvectors[(max_idx, src)] < 0.0 { -1.0 } else { 1.0 };
        for r in 0..p {
            vectors[r * p + col] = flip * eig.eigenvectors[(r, src)];
        }
    }

    let vectors = SquareMatrix { dim: p, data: vectors };
    let defect = vectors.orthogonality_defect();
    if !values.iter().all(|v| v.is_finite()) || defect > 1e-10 {
        return Err(Error::Numerical(format!(
            "eigensolver produced a basis with orthogonality defect {defect:.3e} (dim {p})"
        )));
    }
    Ok(Spectrum { vectors, values })
}

/// `V diag(values) V^T`, symmetrized.
pub fn reconstruct(vectors: &SquareMatrix, values: &[f64]) -> Result<SymmetricMatrix> {
    let p = vectors.dim;
    if values.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "{} eigenvalues for a {p}x{p} basis",
            values.len()
        )));
    }
    let mut data = vec![0.0; p * p];

    let fill_row = |i: usize, row: &mut [f64]| {
        for j in 0..p {
            let mut acc = 0.0;
            for k in 0..p {
                acc += vectors.get(i, k) * values[k] * vectors.get(j, k);
            }
            row[j] = acc;
        }
    };

    #[cfg(feature = "parallel")]
    if p >= PAR_MIN_DIM {
        data.par_chunks_mut(p)
            .enumerate()
            .for_each(|(i, row)| fill_row(i, row));
        symmetrize_in_place(p, &mut data);
        return Ok(SymmetricMatrix { dim: p, data });
    }

    for (i, row) in data.chunks_mut(p).enumerate() {
        fill_row(i, row);
    }
    symmetrize_in_place(p, &mut data);
    Ok(SymmetricMatrix { dim: p, data })
}

/// Extremal eigenvalues together with their ratio.
#[derive(Debug, Clone, Copy)]
pub struct ConditionNumber {
    /// `lambda_max / lambda_min` for positive definite input, `+inf` when
    /// the smallest eigenvalue is non-positive, `1.0` for the zero matrix.
    pub value: f64,
    pub lambda_max: f64,
    pub lambda_min: f64,
}

pub fn condition_number(a: &SymmetricMatrix) -> Result<ConditionNumber> {
    let spec = eigendecompose(a)?;
    let lambda_max = spec.values[0];
    let lambda_min = spec.values[spec.values.len() - 1];
    let value = if lambda_min > 0.0 {
        lambda_max / lambda_min
    } else if lambda_max == 0.0 && lambda_min == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(ConditionNumber { value, lambda_max, lambda_min })
}

/// Lower Cholesky factor of a positive definite matrix, row-major.
pub(crate) fn cholesky_lower(a: &SymmetricMatrix) -> Result<Vec<f64>> {
    let p = a.dim;
    let na = nalgebra::DMatrix::from_row_slice(p, p, &a.data);
    let chol = na
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("matrix is not positive definite".into()))?;
    let l = chol.l();
    let mut out = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            out[i * p + j] = l[(i, j)];
        }
    }
    Ok(out)
}
