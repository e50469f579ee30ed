//! Dense complex matrices for small quantum systems.
//!
//! Everything here is sized for dimensions up to a few dozen: states of one
//! or two qubits, channel outputs, environments, and the explicit
//! classical-quantum states built in cross-checks. The Hermitian eigensolver
//! is a cyclic Jacobi iteration.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Sub};
use core::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default cap on any matrix dimension produced by tensor products.
pub const DEFAULT_MAX_DIM: usize = 256;

/// Tolerance used for Hermiticity, unit trace and eigenvalue clamping.
pub const STATE_TOL: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

static MAX_DIM: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_DIM);

/// Current dimension cap.
pub fn max_dim() -> usize {
    MAX_DIM.load(Ordering::Relaxed)
}

/// Overrides the dimension cap for the whole process.
pub fn set_max_dim(cap: usize) {
    MAX_DIM.store(cap.max(1), Ordering::Relaxed);
}

pub(crate) fn check_dim(dim: usize) -> Result<usize> {
    let cap = max_dim();
    if dim > cap {
        Err(Error::DimensionCap { dim, cap })
    } else {
        Ok(dim)
    }
}

/// Dense complex matrix stored row-major.
///
/// Kraus operators are rectangular, so the type is not restricted to square
/// shapes; states and observables are always square.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(*v, 0.0);
        }
        m
    }

    /// Projector `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        Matrix::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// `self += factor * other`, shapes must agree.
    pub fn add_scaled(&mut self, factor: f64, other: &Matrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * factor;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Largest entrywise deviation `|M - M^dag|`, with the entry where it occurs.
    pub fn hermitian_violation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        if !self.is_square() {
            return (0, 0, f64::INFINITY);
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.2 {
                    worst = (i, j, d);
                }
            }
        }
        worst
    }

    /// Kronecker product without a dimension check.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `A rho A^dag` for a (possibly rectangular) `A = self`.
    pub fn conjugate(&self, rho: &Matrix) -> Matrix {
        let left = self * rho;
        left.mul_adjoint(self)
    }

    /// `self * other^dag` without materializing the adjoint.
    pub fn mul_adjoint(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, other.rows);
        for i in 0..self.rows {
            for j in 0..other.rows {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..self.cols {
                    acc += self[(i, k)] * other[(j, k)].conj();
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product, rejected when the result exceeds the dimension cap.
pub fn tensor(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    check_dim(a.rows * b.rows)?;
    check_dim(a.cols * b.cols)?;
    Ok(a.kron(b))
}

pub fn pauli_x() -> Matrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    Matrix::from_vec(2, 2, vec![o, l, l, o]).expect("2x2")
}

pub fn pauli_y() -> Matrix {
    let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    Matrix::from_vec(2, 2, vec![o, -i, i, o]).expect("2x2")
}

pub fn pauli_z() -> Matrix {
    Matrix::diag(&[1.0, -1.0])
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver
// ---------------------------------------------------------------------------

/// Eigenvalues in ascending order with eigenvectors as matching columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl HermitianEigen {
    /// `Q diag(values) Q^dag`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.values.len();
        let mut out = Matrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            for i in 0..n {
                let qi = self.vectors[(i, k)] * lam;
                for j in 0..n {
                    out[(i, j)] += qi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Column `k` of the eigenvector matrix.
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.values.len()).map(|i| self.vectors[(i, k)]).collect()
    }
}

fn hermitian_working_copy(m: &Matrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "eigensolver input must be square",
            expected: m.rows,
            found: m.cols,
        });
    }
    let (row, col, deviation) = m.hermitian_violation();
    if deviation > STATE_TOL {
        return Err(Error::NotHermitian { row, col, deviation });
    }
    let n = m.rows;
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    Ok(a)
}

/// Cyclic Jacobi iteration on a Hermitian matrix stored in `a`.
///
/// On return the diagonal of `a` holds the eigenvalues; if `v` is given it is
/// multiplied on the right by every rotation.
fn jacobi(a: &mut [C64], n: usize, mut v: Option<&mut [C64]>) -> Result<()> {
    let scale = libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[p * n + q].norm_sqr();
                }
            }
        }
        if libm::sqrt(off) < JACOBI_TOL * scale {
            return Ok(());
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[p * n + q];
                let abs = g.norm();
                if abs < 1e-300 {
                    continue;
                }
                // Phase that makes the (p, q) entry real, then a real rotation.
                let w = (g / abs).conj();
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * abs);
                let t = if libm::fabs(theta) > 1e150 {
                    0.5 / theta
                } else {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                let sw = w * s;
                let cw = w * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * sw;
                    a[k * n + q] = akp * s + akq * cw;
                }
                let swc = sw.conj();
                let cwc = cw.conj();
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * swc;
                    a[q * n + k] = apk * s + aqk * cwc;
                }
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p] = C64::new(app - t * abs, 0.0);
                a[q * n + q] = C64::new(aqq + t * abs, 0.0);
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = vkp * c - vkq * sw;
                        v[k * n + q] = vkp * s + vkq * cw;
                    }
                }
            }
        }
    }
    Err(Error::NotConverged {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let n = m.rows;
    let mut a = hermitian_working_copy(m)?;
    if n > 1 {
        jacobi(&mut a, n, None)?;
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Full eigendecomposition of a Hermitian matrix, ascending eigenvalues.
pub fn hermitian_eigen(m: &Matrix) -> Result<HermitianEigen> {
    let n = m.rows;
    let mut a = hermitian_working_copy(m)?;
    let mut v = Matrix::identity(n).data;
    if n > 1 {
        jacobi(&mut a, n, Some(&mut v))?;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = Matrix::from_fn(n, n, |i, k| v[i * n + order[k]]);
    Ok(HermitianEigen { values, vectors })
}

// ---------------------------------------------------------------------------
// Density operators
// ---------------------------------------------------------------------------

/// A validated density operator with labelled tensor factors.
///
/// `dims` records the subsystem dimensions in order; their product is the
/// matrix dimension. Partial traces and the multipartite entropies address
/// subsystems by position in this list.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: Matrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(matrix: Matrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                context: "density operator must be square",
                expected: matrix.rows,
                found: matrix.cols,
            });
        }
        let product: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || product != matrix.rows {
            return Err(Error::DimensionMismatch {
                context: "product of subsystem dimensions",
                expected: matrix.rows,
                found: product,
            });
        }
        let (row, col, deviation) = matrix.hermitian_violation();
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { row, col, deviation });
        }
        let trace = matrix.trace();
        if libm::fabs(trace.re - 1.0) > STATE_TOL || libm::fabs(trace.im) > STATE_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        let min = hermitian_eigenvalues(&matrix)?.first().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        Ok(DensityOperator { matrix, dims })
    }

    /// Single-system state.
    pub fn from_matrix(matrix: Matrix) -> Result<Self> {
        let n = matrix.rows;
        DensityOperator::new(matrix, vec![n])
    }

    /// Skips validation. Callers guarantee the matrix is a state by construction.
    pub(crate) fn new_unchecked(matrix: Matrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows);
        DensityOperator { matrix, dims }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    /// Relabels the tensor factors; the product must equal the dimension.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        let product: usize = dims.iter().product();
        if dims.is_empty() || product != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "product of subsystem dimensions",
                expected: self.dim(),
                found: product,
            });
        }
        Ok(DensityOperator {
            matrix: self.matrix,
            dims,
        })
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix[(i, j)] * self.matrix[(j, i)]).re;
            }
        }
        acc
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }

    /// `self ⊗ other`, concatenating the subsystem labels.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let matrix = tensor(&self.matrix, &other.matrix)?;
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(DensityOperator { matrix, dims })
    }

    /// Convex combination `sum_i w_i rho_i` of states with identical labels.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<DensityOperator> {
        let first = parts
            .first()
            .ok_or_else(|| Error::invalid("mixture needs at least one state"))?
            .1;
        let mut m = Matrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.dims != first.dims {
                return Err(Error::DimensionMismatch {
                    context: "mixture components",
                    expected: first.dim(),
                    found: rho.dim(),
                });
            }
            m.add_scaled(*w, &rho.matrix);
        }
        DensityOperator::new(m, first.dims.clone())
    }
}

/// Reduces `rho` to the subsystems listed in `keep` (kept in original order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let dims = &rho.dims;
    if keep.is_empty() {
        return Err(Error::invalid("partial trace needs at least one kept subsystem"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::invalid(alloc::format!(
            "subsystem index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    if kept.len() == dims.len() {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let mut out = vec![0usize];
        for &s in subsystems {
            let mut next = Vec::with_capacity(out.len() * dims[s]);
            for &base in &out {
                for d in 0..dims[s] {
                    next.push(base + d * strides[s]);
                }
            }
            out = next;
        }
        out
    };
    let kept_off = offsets(&kept);
    let traced_off = offsets(&traced);
    let n = kept_off.len();
    let mut out = Matrix::zeros(n, n);
    for (i, &ri) in kept_off.iter().enumerate() {
        for (j, &cj) in kept_off.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += rho.matrix[(ri + t, cj + t)];
            }
            out[(i, j)] = acc;
        }
    }
    let new_dims = kept.iter().map(|&k| dims[k]).collect();
    Ok(DensityOperator::new_unchecked(out, new_dims))
}

/// The maximally entangled state `Phi` on `D x D`.
pub fn max_entangled(d: usize) -> Result<DensityOperator> {
    if d == 0 {
        return Err(Error::invalid("maximally entangled state needs D >= 1"));
    }
    check_dim(d * d)?;
    let amp = 1.0 / libm::sqrt(d as f64);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = C64::new(amp, 0.0);
    }
    Ok(DensityOperator::new_unchecked(Matrix::outer(&v), vec![d, d]))
}

/// The maximally correlated classical state `(1/D) sum_i |ii><ii|`.
pub fn max_correlated(d: usize) -> Result<DensityOperator> {
    if d == 0 {
        return Err(Error::invalid("maximally correlated state needs D >= 1"));
    }
    check_dim(d * d)?;
    let mut diag = vec![0.0; d * d];
    for i in 0..d {
        diag[i * d + i] = 1.0 / d as f64;
    }
    Ok(DensityOperator::new_unchecked(Matrix::diag(&diag), vec![d, d]))
}

pub fn maximally_mixed(d: usize) -> Result<DensityOperator> {
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    Ok(DensityOperator::new_unchecked(
        Matrix::diag(&vec![1.0 / d as f64; d]),
        vec![d],
    ))
}

/// Normalized pure state `|v><v|`.
pub fn pure_state(v: &[C64]) -> Result<DensityOperator> {
    let norm = libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum());
    if v.is_empty() || norm < 1e-300 {
        return Err(Error::invalid("pure state vector must be nonzero"));
    }
    let unit: Vec<C64> = v.iter().map(|z| z / norm).collect();
    Ok(DensityOperator::new_unchecked(Matrix::outer(&unit), vec![v.len()]))
}

/// Diagonal state with the given probabilities.
pub fn diagonal_state(probs: &[f64]) -> Result<DensityOperator> {
    DensityOperator::from_matrix(Matrix::diag(probs))
}

/// Qubit state with Bloch vector `(x, y, z)`, `|r| <= 1`.
pub fn bloch_state(x: f64, y: f64, z: f64) -> Result<DensityOperator> {
    let r = libm::sqrt(x * x + y * y + z * z);
    if r > 1.0 + 1e-12 {
        return Err(Error::OutOfRange {
            name: "Bloch radius",
            value: r,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(DensityOperator::new_unchecked(bloch_matrix(x, y, z), vec![2]))
}

pub(crate) fn bloch_matrix(x: f64, y: f64, z: f64) -> Matrix {
    Matrix::from_vec(
        2,
        2,
        vec![
            C64::new(0.5 * (1.0 + z), 0.0),
            C64::new(0.5 * x, -0.5 * y),
            C64::new(0.5 * x, 0.5 * y),
            C64::new(0.5 * (1.0 - z), 0.0),
        ],
    )
    .expect("2x2")
}

/// Purification vector of `rho` on `R ⊗ S` (reference first), Schmidt form
/// `sum_i sqrt(l_i) |i>_R |e_i>_S` over the eigenbasis of `rho`.
pub fn purification_vector(rho: &Matrix) -> Result<Vec<C64>> {
    let eig = hermitian_eigen(rho)?;
    let d = rho.rows();
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for (i, &lam) in eig.values.iter().enumerate() {
        if lam < -STATE_TOL {
            return Err(Error::NotPositive { eigenvalue: lam });
        }
        let amp = libm::sqrt(lam.max(0.0));
        for s in 0..d {
            v[i * d + s] = eig.vectors[(s, i)] * amp;
        }
    }
    Ok(v)
}

/// Pure state on `dim^2` whose marginal on the second factor is `rho`.
pub fn purify(rho: &DensityOperator) -> Result<DensityOperator> {
    let d = rho.dim();
    check_dim(d * d)?;
    let v = purification_vector(&rho.matrix)?;
    Ok(DensityOperator::new_unchecked(Matrix::outer(&v), vec![d, d]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn eigenvalues_of_fixtures() {
        assert_eq!(hermitian_eigenvalues(&Matrix::identity(2)).unwrap(), vec![1.0, 1.0]);
        let d = hermitian_eigenvalues(&Matrix::diag(&[0.9, 0.1])).unwrap();
        assert_eq!(d, vec![0.1, 0.9]);
        let x = hermitian_eigenvalues(&pauli_x()).unwrap();
        assert!((x[0] + 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        let y = hermitian_eigenvalues(&pauli_y()).unwrap();
        assert!((y[0] + 1.0).abs() < 1e-14 && (y[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_input_names_the_entry() {
        let mut m = Matrix::identity(3);
        m[(0, 2)] = c(0.5);
        match hermitian_eigenvalues(&m) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eigen_reconstructs_complex_matrix() {
        let m = Matrix::from_fn(4, 4, |i, j| {
            let re = (i as f64 + 1.0) * (j as f64 + 1.0) * 0.1 + if i == j { i as f64 } else { 0.0 };
            let im = (i as f64 - j as f64) * 0.3;
            C64::new(re, im)
        });
        let eig = hermitian_eigen(&m).unwrap();
        assert!(eig.reconstruct().max_abs_diff(&m) < 1e-9);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let q = &eig.vectors;
        let qq = &q.adjoint() * q;
        assert!(qq.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }

    #[test]
    fn tensor_basis_bookkeeping() {
        assert_eq!(
            tensor(&Matrix::identity(2), &Matrix::identity(2)).unwrap(),
            Matrix::identity(4)
        );
        let t = tensor(&Matrix::diag(&[1.0, 0.0]), &Matrix::diag(&[0.0, 1.0])).unwrap();
        assert_eq!(t, Matrix::diag(&[0.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn tensor_rejects_dimensions_over_cap() {
        let big = Matrix::identity(32);
        assert!(matches!(
            tensor(&big, &big),
            Err(Error::DimensionCap { dim: 1024, cap: 256 })
        ));
    }

    #[test]
    fn max_entangled_entries() {
        assert_eq!(max_entangled(1).unwrap().matrix(), &Matrix::identity(1));
        let phi = max_entangled(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i == 0 || i == 3) && (j == 0 || j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert!((phi.matrix()[(i, j)] - c(expect)).norm() < 1e-15);
            }
        }
        assert!((phi.purity() - 1.0).abs() < 1e-14);
        assert!(max_entangled(0).is_err());
    }

    #[test]
    fn partial_trace_cases() {
        let phi = max_entangled(2).unwrap();
        let a = phi.partial_trace(&[0]).unwrap();
        assert!(a.matrix().max_abs_diff(&Matrix::diag(&[0.5, 0.5])) < 1e-15);
        assert_eq!(phi.partial_trace(&[0, 1]).unwrap(), phi);
        assert!(phi.partial_trace(&[]).is_err());
        assert!(phi.partial_trace(&[2]).is_err());

        let rho = bloch_state(0.3, -0.2, 0.5).unwrap();
        let sigma = bloch_state(0.0, 0.6, -0.1).unwrap();
        let prod = rho.tensor(&sigma).unwrap();
        assert!(prod.partial_trace(&[0]).unwrap().matrix().max_abs_diff(rho.matrix()) < 1e-15);
        assert!(prod.partial_trace(&[1]).unwrap().matrix().max_abs_diff(sigma.matrix()) < 1e-15);
    }

    #[test]
    fn partial_trace_middle_subsystem() {
        let a = bloch_state(0.1, 0.2, 0.3).unwrap();
        let b = maximally_mixed(3).unwrap();
        let cst = bloch_state(-0.4, 0.0, 0.5).unwrap();
        let abc = a.tensor(&b).unwrap().tensor(&cst).unwrap();
        let ac = abc.partial_trace(&[2, 0]).unwrap();
        assert_eq!(ac.dims(), &[2, 2]);
        let expect = a.tensor(&cst).unwrap();
        assert!(ac.matrix().max_abs_diff(expect.matrix()) < 1e-15);
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::from_matrix(Matrix::diag(&[0.5, 0.4])),
            Err(Error::NotUnitTrace { .. })
        ));
        assert!(matches!(
            DensityOperator::from_matrix(Matrix::diag(&[1.2, -0.2])),
            Err(Error::NotPositive { .. })
        ));
        assert!(DensityOperator::new(Matrix::identity(4).scale(0.25), vec![2, 3]).is_err());
        assert!(DensityOperator::from_matrix(Matrix::diag(&[1.0 + 5e-11, -5e-11])).is_ok());
    }

    #[test]
    fn purify_round_trips() {
        let zero = diagonal_state(&[1.0, 0.0]).unwrap();
        let p = purify(&zero).unwrap();
        assert!((p.purity() - 1.0).abs() < 1e-12);
        assert!(p.partial_trace(&[1]).unwrap().matrix().max_abs_diff(zero.matrix()) < 1e-12);

        let mixed = maximally_mixed(2).unwrap();
        let p = purify(&mixed).unwrap();
        assert!(p.partial_trace(&[1]).unwrap().matrix().max_abs_diff(mixed.matrix()) < 1e-12);
        let top = *p.eigenvalues().unwrap().last().unwrap();
        assert!((top - 1.0).abs() < 1e-9);
    }
}
