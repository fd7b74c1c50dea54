//! Density operators on `C^M (x) C^N` with `M` in {2, 3}.
//!
//! Indices are A-major: row/column `k * N + j` belongs to basis vector
//! `|k> (x) |j>`, so `rho` is an `M x M` grid of `N x N` blocks.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::linalg::hermitian_eigenvalues;
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    rho: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PptVerdict {
    pub is_ppt: bool,
    pub min_eigenvalue: f64,
    /// Spectrum of the partial transpose, descending.
    pub spectrum: Vec<f64>,
}

impl BipartiteState {
    /// Validates `rho` as a density matrix on `C^dim_a (x) C^dim_b`.
    pub fn validate(
        rho: ComplexMatrix,
        dim_a: usize,
        dim_b: usize,
        tol: &Tolerance,
    ) -> Result<Self, Error> {
        if !(dim_a == 2 || dim_a == 3) {
            return Err(Error::UnsupportedDimension { dim_a });
        }
        let n = dim_a * dim_b;
        if dim_b == 0 || rho.rows() != n || rho.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: rho.rows() * rho.cols(),
            });
        }
        if !rho.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = rho.hermiticity_defect();
        if defect > tol.eps_residual {
            return Err(Error::NotHermitian { defect });
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > tol.eps_trace {
            return Err(Error::TraceNotOne { trace });
        }
        let spectrum = hermitian_eigenvalues(&rho)?;
        let min_eigenvalue = *spectrum.last().unwrap();
        if min_eigenvalue < -tol.eps_psd {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(Self {
            dim_a,
            dim_b,
            rho: rho.hermitian_part(),
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    /// Block `(k, l)`, zero-based, as an `N x N` matrix.
    pub fn block(&self, k: usize, l: usize) -> Result<ComplexMatrix, Error> {
        if k >= self.dim_a || l >= self.dim_a {
            return Err(Error::IndexOutOfRange {
                k,
                l,
                dim_a: self.dim_a,
            });
        }
        Ok(self.block_unchecked(k, l))
    }

    pub(crate) fn block_unchecked(&self, k: usize, l: usize) -> ComplexMatrix {
        let n = self.dim_b;
        self.rho.submatrix(k * n, l * n, n, n)
    }

    /// All blocks, `blocks[k][l]`.
    pub fn blocks(&self) -> Vec<Vec<ComplexMatrix>> {
        (0..self.dim_a)
            .map(|k| (0..self.dim_a).map(|l| self.block_unchecked(k, l)).collect())
            .collect()
    }

    /// Partial transpose on A: block `(k, l)` is replaced by block `(l, k)`.
    pub fn partial_transpose_a(&self) -> ComplexMatrix {
        partial_transpose_a(&self.rho, self.dim_a, self.dim_b)
    }

    pub fn is_ppt(&self, tol: &Tolerance) -> Result<PptVerdict, Error> {
        let spectrum = hermitian_eigenvalues(&self.partial_transpose_a())?;
        let min_eigenvalue = *spectrum.last().unwrap();
        Ok(PptVerdict {
            is_ppt: min_eigenvalue >= -tol.eps_psd,
            min_eigenvalue,
            spectrum,
        })
    }

    /// `rho_B = Tr_A rho` (N x N).
    pub fn partial_trace_a(&self) -> ComplexMatrix {
        let n = self.dim_b;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..self.dim_a {
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += self.rho[(k * n + i, k * n + j)];
                }
            }
        }
        out
    }

    /// `rho_A = Tr_B rho` (M x M); entry `(k, l)` is the trace of block `(k, l)`.
    pub fn partial_trace_b(&self) -> ComplexMatrix {
        let n = self.dim_b;
        ComplexMatrix::from_fn(self.dim_a, self.dim_a, |k, l| {
            (0..n).map(|j| self.rho[(k * n + j, l * n + j)]).sum()
        })
    }

    /// Conjugates by a local unitary, `(u (x) v) rho (u (x) v)^dagger`.
    pub fn local_unitary(&self, u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
        let w = u.kron(v);
        &(&w * &self.rho) * &w.dagger()
    }

    /// Spectrum of `rho`, descending.
    pub fn spectrum(&self) -> Result<Vec<f64>, Error> {
        hermitian_eigenvalues(&self.rho)
    }

    /// Reassembles a state from `M x M` blocks without re-validation.
    pub(crate) fn from_blocks_unchecked(blocks: &[Vec<ComplexMatrix>]) -> ComplexMatrix {
        let m = blocks.len();
        let n = blocks[0][0].rows();
        let mut rho = ComplexMatrix::zeros(m * n, m * n);
        for (k, row) in blocks.iter().enumerate() {
            for (l, b) in row.iter().enumerate() {
                rho.set_submatrix(k * n, l * n, b);
            }
        }
        rho
    }
}

pub fn partial_transpose_a(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let n = dim_b;
    ComplexMatrix::from_fn(dim_a * n, dim_a * n, |r, c| {
        let (k, i) = (r / n, r % n);
        let (l, j) = (c / n, c % n);
        rho[(l * n + i, k * n + j)]
    })
}

/// Compresses `rho` to the A-side basis given by the columns of `u`:
/// block `(k, l)` of the result is `sum_ij conj(u_ik) u_jl block(i, j)`.
pub fn rotate_a(state: &BipartiteState, u: &ComplexMatrix) -> Vec<Vec<ComplexMatrix>> {
    rotate_blocks(&state.blocks(), u)
}

pub fn rotate_blocks(blocks: &[Vec<ComplexMatrix>], u: &ComplexMatrix) -> Vec<Vec<ComplexMatrix>> {
    let m = u.cols();
    let n = blocks[0][0].rows();
    let mut out = Vec::with_capacity(m);
    for k in 0..m {
        let mut row = Vec::with_capacity(m);
        for l in 0..m {
            let mut acc = ComplexMatrix::zeros(n, n);
            for (i, brow) in blocks.iter().enumerate() {
                for (j, b) in brow.iter().enumerate() {
                    let w = u[(i, k)].conj() * u[(j, l)];
                    if !w.is_zero() {
                        acc = &acc + &b.scale(w);
                    }
                }
            }
            row.push(acc);
        }
        out.push(row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, C64};

    fn bell_phi_plus() -> ComplexMatrix {
        let h = 0.5;
        ComplexMatrix::from_real_rows(&[
            [h, 0.0, 0.0, h],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [h, 0.0, 0.0, h],
        ])
    }

    fn xstate_matrix(a: [f64; 3], b: [f64; 3], a12: C64, b12: C64) -> ComplexMatrix {
        // a = (a11, a22, unused), b = (b11, b22, unused)
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = c64(a[0], 0.0);
        m[(3, 3)] = c64(a[1], 0.0);
        m[(1, 1)] = c64(b[0], 0.0);
        m[(2, 2)] = c64(b[1], 0.0);
        m[(0, 3)] = a12;
        m[(3, 0)] = a12.conj();
        m[(1, 2)] = b12;
        m[(2, 1)] = b12.conj();
        m
    }

    #[test]
    fn validate_accepts_and_rejects() {
        let tol = Tolerance::default();
        BipartiteState::validate(ComplexMatrix::identity(4).scale_real(0.25), 2, 2, &tol).unwrap();
        BipartiteState::validate(ComplexMatrix::diag_real(&[1.0, 0.0, 0.0, 0.0]), 2, 2, &tol).unwrap();
        let err = BipartiteState::validate(ComplexMatrix::diag_real(&[2.0, -1.0, 0.0, 0.0]), 2, 2, &tol)
            .unwrap_err();
        assert_eq!(err, Error::NotPsd { min_eigenvalue: -1.0 });
        let err = BipartiteState::validate(ComplexMatrix::identity(4).scale_real(0.225), 2, 2, &tol)
            .unwrap_err();
        assert!(matches!(err, Error::TraceNotOne { .. }));
        let err = BipartiteState::validate(ComplexMatrix::identity(4).scale_real(0.25), 2, 3, &tol)
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        let mut skew = ComplexMatrix::identity(4).scale_real(0.25);
        skew[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(
            BipartiteState::validate(skew, 2, 2, &tol),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            BipartiteState::validate(ComplexMatrix::identity(4).scale_real(0.25), 4, 1, &tol),
            Err(Error::UnsupportedDimension { dim_a: 4 })
        ));
    }

    #[test]
    fn xstate_blocks_and_partial_transpose() {
        let tol = Tolerance::default();
        let a12 = c64(0.05, 0.02);
        let b12 = c64(-0.03, 0.04);
        let rho = xstate_matrix([0.3, 0.2, 0.0], [0.25, 0.25, 0.0], a12, b12);
        let s = BipartiteState::validate(rho, 2, 2, &tol).unwrap();
        assert_eq!(s.block(0, 0).unwrap(), ComplexMatrix::diag_real(&[0.3, 0.25]));
        assert_eq!(s.block(1, 0).unwrap(), s.block(0, 1).unwrap().dagger());
        assert!(matches!(s.block(2, 0), Err(Error::IndexOutOfRange { .. })));

        // a~ = [[a11, b21], [b12, a22]], b~ = [[b11, a21], [a12, b22]]
        let pt = s.partial_transpose_a();
        assert_eq!(pt[(0, 3)], b12.conj());
        assert_eq!(pt[(3, 0)], b12);
        assert_eq!(pt[(1, 2)], a12.conj());
        assert_eq!(pt[(2, 1)], a12);
        assert_eq!(pt[(0, 1)], C64::zero());
        let back = partial_transpose_a(&pt, 2, 2);
        assert_eq!(&back, s.rho());

        let rho_b = s.partial_trace_a();
        assert!(rho_b.max_abs_diff(&ComplexMatrix::diag_real(&[0.55, 0.45])) < 1e-15);
    }

    #[test]
    fn product_state_traces() {
        let tol = Tolerance::default();
        let sigma = ComplexMatrix::from_real_rows(&[[0.7, 0.2], [0.2, 0.3]]);
        let tau = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c64([0.5, 0.3, 0.2][i], 0.0)
            } else if i < j {
                c64(0.05, 0.01)
            } else {
                c64(0.05, -0.01)
            }
        });
        let s = BipartiteState::validate(sigma.kron(&tau), 2, 3, &tol).unwrap();
        assert!(s.partial_trace_a().max_abs_diff(&tau) < 1e-15);
        assert!(s.partial_trace_b().max_abs_diff(&sigma) < 1e-15);
        assert!(s.block(0, 1).unwrap().max_abs_diff(&tau.scale_real(0.2)) < 1e-15);
        // Real symmetric sigma: partial transpose leaves the state unchanged.
        assert!(s.partial_transpose_a().max_abs_diff(s.rho()) < 1e-15);
    }

    #[test]
    fn bell_state_is_npt() {
        let tol = Tolerance::default();
        let s = BipartiteState::validate(bell_phi_plus(), 2, 2, &tol).unwrap();
        let v = s.is_ppt(&tol).unwrap();
        assert!(!v.is_ppt);
        assert!((v.min_eigenvalue + 0.5).abs() < 1e-14);
        let total: f64 = v.spectrum.iter().sum();
        assert!((total - 1.0).abs() < 1e-14);
        let mixed = BipartiteState::validate(ComplexMatrix::identity(4).scale_real(0.25), 2, 2, &tol)
            .unwrap();
        let v = mixed.is_ppt(&tol).unwrap();
        assert!(v.is_ppt);
        assert!((v.min_eigenvalue - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rotate_identity_is_noop() {
        let tol = Tolerance::default();
        let s = BipartiteState::validate(bell_phi_plus(), 2, 2, &tol).unwrap();
        let blocks = rotate_a(&s, &ComplexMatrix::identity(2));
        assert_eq!(BipartiteState::from_blocks_unchecked(&blocks), *s.rho());
    }
}
