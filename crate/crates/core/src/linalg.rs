//! Small dense linear-algebra helpers shared across modules.
//!
//! Large dense work (Hamiltonians, reduced density matrices) goes through
//! [`faer`]; two-qubit gates are fixed-size arrays so the statevector kernel
//! never allocates.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Deviation tolerated before a gate is rejected as non-unitary.
pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// A 4×4 matrix acting on an ordered pair of qubits `(i, j)`.
///
/// Rows and columns follow `|q_i q_j⟩ ∈ {|00⟩, |01⟩, |10⟩, |11⟩}`, i.e. the
/// local index is `2 q_i + q_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitGate(pub [[C64; 4]; 4]);

impl TwoQubitGate {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (k, row) in m.iter_mut().enumerate() {
            row[k] = ONE;
        }
        Self(m)
    }

    pub fn swap() -> Self {
        let mut m = [[ZERO; 4]; 4];
        m[0][0] = ONE;
        m[1][2] = ONE;
        m[2][1] = ONE;
        m[3][3] = ONE;
        Self(m)
    }

    pub fn from_mat(m: &Mat<C64>) -> Result<Self> {
        if m.nrows() != 4 || m.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: m.nrows().max(m.ncols()),
            });
        }
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = m[(r, c)];
            }
        }
        Ok(Self(out))
    }

    pub fn to_mat(&self) -> Mat<C64> {
        Mat::from_fn(4, 4, |r, c| self.0[r][c])
    }

    pub fn dagger(&self) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.0[c][r].conj();
            }
        }
        Self(out)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        Self(out)
    }

    /// Frobenius norm of `G†G − I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger().matmul(self);
        let mut acc = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let target = if r == c { ONE } else { ZERO };
                acc += (p.0[r][c] - target).norm_sqr();
            }
        }
        acc.sqrt()
    }
}

/// Frobenius norm of a dense matrix.
pub fn frobenius_norm(m: &Mat<C64>) -> f64 {
    let mut acc = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            acc += m[(r, c)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Largest entrywise deviation `max |M − M†|`.
pub fn hermiticity_deviation(m: &Mat<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for c in 0..n {
        for r in c..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(m: &Mat<C64>) -> Result<Vec<f64>> {
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?} (dimension {})", m.nrows())))
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal. Returns eigenvalues (ascending) and the
/// eigenvector matrix with eigenvectors as columns.
pub(crate) fn tridiagonal_eigen(diag: &[f64], offdiag: &[f64]) -> Result<(Vec<f64>, Mat<f64>)> {
    let m = diag.len();
    debug_assert!(offdiag.len() + 1 >= m);
    let t = Mat::from_fn(m, m, |r, c| {
        if r == c {
            diag[r]
        } else if r == c + 1 {
            offdiag[c]
        } else if c == r + 1 {
            offdiag[r]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?} (tridiagonal of size {m})")))?;
    let values = (0..m).map(|k| evd.S()[k]).collect();
    Ok((values, evd.U().to_owned()))
}
