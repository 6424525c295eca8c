//! Small dense complex matrices.
//!
//! Only what the verification code needs: products, adjoints, Kronecker
//! products and comparisons. Storage is row-major.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut, Mul};

use crate::error::{bail, Result};
use crate::math::*;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            bail!(Shape, "expected {} entries for a {}x{} matrix, got {}", rows * cols, rows, cols, data.len());
        }
        Ok(CMatrix { rows, cols, data })
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn from_2x2(m: &[[C64; 2]; 2]) -> Self {
        Self::from_fn(2, 2, |r, c| m[r][c])
    }

    pub fn from_4x4(m: &[[C64; 4]; 4]) -> Self {
        Self::from_fn(4, 4, |r, c| m[r][c])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            bail!(Shape, "cannot multiply {}x{} by {}x{}", self.rows, self.cols, other.rows, other.cols);
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            self[(r / other.rows, c / other.cols)] * other[(r % other.rows, c % other.cols)]
        })
    }

    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            bail!(Shape, "vector of length {} for matrix with {} columns", v.len(), self.cols);
        }
        Ok((0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Entrywise distance after removing a global phase from both matrices.
    ///
    /// Each matrix is divided by the phase of its largest-modulus entry (the
    /// first one in row-major order, taken from `self` for both so that the
    /// reference entry is the same position).
    pub fn max_abs_diff_up_to_phase(&self, other: &CMatrix) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for (i, z) in self.data.iter().enumerate() {
            // Ties within rounding go to the first entry.
            if z.norm() > best_abs + 1e-12 {
                best_abs = z.norm();
                best = i;
            }
        }
        if best_abs <= 0.0 {
            return other.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
        }
        let pa = self.data[best] / self.data[best].norm();
        let ob = other.data[best];
        if ob.norm() == 0.0 {
            return f64::INFINITY;
        }
        let pb = ob / ob.norm();
        self.data.iter().zip(&other.data).map(|(a, b)| (a / pa - b / pb).norm()).fold(0.0, f64::max)
    }

    /// `max |(A^dagger A - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint().matmul(self).expect("shapes agree");
        g.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            bail!(Shape, "cannot subtract {}x{} and {}x{}", self.rows, self.cols, other.rows, other.cols);
        }
        Ok(CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

/// Hadamard gate.
pub fn hadamard() -> [[C64; 2]; 2] {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

/// Single-qubit phase `diag(1, e^{i theta})`.
pub fn phase_gate(theta: f64) -> [[C64; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), cis(theta)]]
}

/// Controlled phase `diag(1, 1, 1, e^{i theta})`.
pub fn controlled_phase(theta: f64) -> [[C64; 4]; 4] {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate().take(3) {
        row[i] = c(1.0, 0.0);
    }
    m[3][3] = cis(theta);
    m
}

/// CNOT with the first qubit (more significant index bit) as control.
pub fn cnot() -> [[C64; 4]; 4] {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    m[0][0] = c(1.0, 0.0);
    m[1][1] = c(1.0, 0.0);
    m[2][3] = c(1.0, 0.0);
    m[3][2] = c(1.0, 0.0);
    m
}

pub fn swap() -> [[C64; 4]; 4] {
    let mut m = [[c(0.0, 0.0); 4]; 4];
    m[0][0] = c(1.0, 0.0);
    m[1][2] = c(1.0, 0.0);
    m[2][1] = c(1.0, 0.0);
    m[3][3] = c(1.0, 0.0);
    m
}

/// Conjugates a two-qubit matrix by SWAP, exchanging the roles of its qubits.
pub fn swap_qubits(m: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let p = [0usize, 2, 1, 3];
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            out[p[r]][p[col]] = m[r][col];
        }
    }
    out
}

pub fn adjoint_2x2(m: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn adjoint_4x4(m: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for col in 0..4 {
            out[r][col] = m[col][r].conj();
        }
    }
    out
}

/// Dense matrix on `n` qubits of a two-qubit gate acting on qubits `a` and `b`.
///
/// Bit `q` of a basis index is qubit `q`; the 4x4 matrix is indexed by
/// `2 x_a + x_b`.
pub fn embed_two_qubit(m: &[[C64; 4]; 4], n: usize, a: usize, b: usize) -> CMatrix {
    assert!(a != b && a < n && b < n);
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let xa = (col >> a) & 1;
        let xb = (col >> b) & 1;
        let rest = col & !(1 << a) & !(1 << b);
        for (ra, rb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let v = m[2 * ra + rb][2 * xa + xb];
            if v != C64::new(0.0, 0.0) {
                out[(rest | (ra << a) | (rb << b), col)] += v;
            }
        }
    }
    out
}

/// Dense matrix on `n` qubits of a single-qubit gate acting on qubit `a`.
pub fn embed_one_qubit(m: &[[C64; 2]; 2], n: usize, a: usize) -> CMatrix {
    assert!(a < n);
    let dim = 1usize << n;
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let xa = (col >> a) & 1;
        let rest = col & !(1 << a);
        for ra in 0..2 {
            let v = m[ra][xa];
            if v != C64::new(0.0, 0.0) {
                out[(rest | (ra << a), col)] += v;
            }
        }
    }
    out
}

pub fn is_unitary_2x2(m: &[[C64; 2]; 2], tol: f64) -> bool {
    CMatrix::from_2x2(m).unitarity_defect() <= tol
}

pub fn is_unitary_4x4(m: &[[C64; 4]; 4], tol: f64) -> bool {
    CMatrix::from_4x4(m).unitarity_defect() <= tol
}
