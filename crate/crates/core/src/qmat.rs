//! Small dense linear algebra for operators on at most three qubits.
//!
//! Everything here is sized for 8×8 complex matrices and 3×n real
//! matrices, which is all the Bell/Mermin/Svetlichny machinery needs.
//! Eigenproblems are solved with cyclic Jacobi rotations.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest supported row or column count.
pub const MAX_DIM: usize = 8;

/// Maximum number of Jacobi sweeps before giving up on convergence.
pub const MAX_JACOBI_SWEEPS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension overflow: {rows}x{cols} exceeds {max}x{max}", max = MAX_DIM)]
    DimensionOverflow { rows: usize, cols: usize },

    #[error("invalid shape {rows}x{cols} for {len} entries")]
    InvalidShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
}

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(LinalgError::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(LinalgError::DimensionOverflow { rows, cols });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_DIM && cols <= MAX_DIM && rows > 0 && cols > 0);
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self, LinalgError> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `|ψ⟩⟨ψ|` for a state vector of length at most 8.
    pub fn outer(psi: &[C64]) -> Self {
        let n = psi.len();
        Self::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &CMat) -> Result<CMat, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::ShapeMismatch(self.shape(), rhs.shape()));
        }
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::ShapeMismatch(self.shape(), (v.len(), 1)));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// `Tr[self · rhs]` without forming the product.
    pub fn trace_product(&self, rhs: &CMat) -> Result<C64, LinalgError> {
        if self.cols != rhs.rows || self.rows != rhs.cols {
            return Err(LinalgError::ShapeMismatch(self.shape(), rhs.shape()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * rhs[(k, i)];
            }
        }
        Ok(acc)
    }

    /// Largest `|A[i][j] − conj(A[j][i])|`; infinite for non-square input.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &CMat {
    type Output = CMat;

    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in add");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;

    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in sub");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &CMat {
    type Output = CMat;

    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

/// Pauli matrix `σ_i` with `σ_0 = I`, `σ_1 = X`, `σ_2 = Y`, `σ_3 = Z`.
pub fn pauli(i: usize) -> CMat {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    let data = match i {
        0 => vec![one, z, z, one],
        1 => vec![z, one, one, z],
        2 => vec![z, -im, im, z],
        3 => vec![one, z, z, -one],
        _ => panic!("pauli index {i} out of range"),
    };
    CMat {
        rows: 2,
        cols: 2,
        data,
    }
}

/// `n̂·σ⃗` for a real 3-vector.
pub fn bloch_operator(v: [f64; 3]) -> CMat {
    let mut out = CMat::zeros(2, 2);
    for (k, &c) in v.iter().enumerate() {
        if c != 0.0 {
            out = &out + &pauli(k + 1).scale_real(c);
        }
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat, LinalgError> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(LinalgError::DimensionOverflow { rows, cols });
    }
    let mut out = CMat::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of a sequence of factors, leftmost factor most significant.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMat>) -> Result<CMat, LinalgError> {
    let mut it = factors.into_iter();
    let first = it.next().cloned().ok_or(LinalgError::InvalidShape {
        rows: 0,
        cols: 0,
        len: 0,
    })?;
    it.try_fold(first, |acc, f| kron(&acc, f))
}

/// Eigenvalues of a real symmetric `n×n` matrix (row-major), sorted descending.
///
/// Cyclic Jacobi; stops when the off-diagonal mass falls below machine
/// resolution or after [`MAX_JACOBI_SWEEPS`] sweeps.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| m[p * n + q] * m[p * n + q])
            .sum();
        if off.sqrt() <= 1e-16 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    eig
}

/// Real eigenvalues of a Hermitian matrix, sorted descending.
///
/// The `n×n` Hermitian problem is embedded as the `2n×2n` real symmetric
/// matrix `[[Re, −Im], [Im, Re]]`, whose spectrum is the original one with
/// every eigenvalue doubled.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>, LinalgError> {
    let dev = a.hermitian_deviation();
    if dev > 1e-10 {
        return Err(LinalgError::NotHermitian(dev));
    }
    let n = a.rows;
    let m = 2 * n;
    let mut real = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            // symmetrize away the tolerated round-off
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            real[i * m + j] = z.re;
            real[(i + n) * m + (j + n)] = z.re;
            real[i * m + (j + n)] = -z.im;
            real[(i + n) * m + j] = z.im;
        }
    }
    let doubled = symmetric_eigenvalues(m, &real);
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Singular values of a real matrix with three rows, sorted descending.
///
/// Computed as square roots of the eigenvalues of the 3×3 Gram matrix
/// `M·Mᵀ`; negative round-off is clamped to zero.
pub fn singular_values_3xn<const C: usize>(m: &[[f64; C]; 3]) -> [f64; 3] {
    let mut gram = [0.0; 9];
    for r in 0..3 {
        for s in 0..3 {
            gram[r * 3 + s] = (0..C).map(|c| m[r][c] * m[s][c]).sum();
        }
    }
    let eig = symmetric_eigenvalues(3, &gram);
    [
        eig[0].max(0.0).sqrt(),
        eig[1].max(0.0).sqrt(),
        eig[2].max(0.0).sqrt(),
    ]
}

/// Real 3×9 matrix: row `j`, column `(i, k)` at index `3i + k` (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RMat3x9 {
    pub entries: [[f64; 9]; 3],
}

impl RMat3x9 {
    pub fn zeros() -> Self {
        Self {
            entries: [[0.0; 9]; 3],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn singular_values(&self) -> [f64; 3] {
        singular_values_3x9(self)
    }
}

/// Singular values `λ₁ ≥ λ₂ ≥ λ₃ ≥ 0` of a 3×9 real matrix.
pub fn singular_values_3x9(m: &RMat3x9) -> [f64; 3] {
    singular_values_3xn(&m.entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn zz_is_diag() {
        let zz = kron(&pauli(3), &pauli(3)).unwrap();
        assert_eq!(zz, CMat::diag_real(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn identity_kron_is_block_diagonal() {
        let a = CMat::from_fn(2, 2, |i, j| C64::new((i * 2 + j) as f64, 1.0));
        let out = kron(&CMat::identity(2), &a).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i / 2 == j / 2 {
                    a[(i % 2, j % 2)]
                } else {
                    c(0.0)
                };
                assert_eq!(out[(i, j)], expected);
            }
        }
    }

    #[test]
    fn xxx_on_ghz_is_one() {
        let xxx = kron_all([&pauli(1), &pauli(1), &pauli(1)]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut ghz = vec![c(0.0); 8];
        ghz[0] = c(s);
        ghz[7] = c(s);
        let v = xxx.matvec(&ghz).unwrap();
        let e: C64 = ghz.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        assert!((e.re - 1.0).abs() < 1e-15 && e.im.abs() < 1e-15);
    }

    #[test]
    fn kron_overflow() {
        let a = CMat::identity(4);
        let err = kron(&a, &a).unwrap_err();
        assert_eq!(err, LinalgError::DimensionOverflow { rows: 16, cols: 16 });
    }

    #[test]
    fn kron_trace_multiplies() {
        let a = CMat::from_fn(2, 2, |i, j| C64::new(1.0 + i as f64, j as f64 - 0.5));
        let b = CMat::from_fn(4, 4, |i, j| {
            C64::new((i + j) as f64 * 0.3, (i as f64) - (j as f64))
        });
        let lhs = kron(&a, &b).unwrap().trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn pauli_spectrum() {
        assert_eq!(hermitian_eigenvalues(&pauli(1)).unwrap().len(), 2);
        let e = hermitian_eigenvalues(&pauli(2)).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] + 1.0).abs() < 1e-14);
        let proj = CMat::diag_real(&[1.0, 0.0]);
        let e = hermitian_eigenvalues(&proj).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14 && e[1].abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMat::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(LinalgError::NotHermitian(_))
        ));
    }

    #[test]
    fn zero_matrix_singular_values() {
        assert_eq!(singular_values_3x9(&RMat3x9::zeros()), [0.0; 3]);
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(CMat::new(2, 2, vec![c(0.0); 3]).is_err());
        assert!(matches!(
            CMat::new(9, 1, vec![c(0.0); 9]),
            Err(LinalgError::DimensionOverflow { .. })
        ));
    }
}
