//! Hermitian spectral routines.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. For the matrix sizes
//! this crate works with (at most 3N x 3N with small N) it is accurate to a few
//! ulps relative to `||A||_F` and needs no LAPACK.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::Error;
use crate::matrix::{c64, ComplexMatrix, C64};
use crate::tolerance::Tolerance;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Real eigenvalues, sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    /// `V f(diag(lambda)) V^dagger`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C64::zero();
            for (k, &w) in fl.iter().enumerate() {
                if w != 0.0 {
                    acc += v[(i, k)] * v[(j, k)].conj() * w;
                }
            }
            acc
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let v = &self.eigenvectors;
        (0..v.rows()).map(|i| v[(i, k)]).collect()
    }
}

fn check_hermitian(a: &ComplexMatrix, tol: f64) -> Result<(), Error> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = a.hermiticity_defect();
    if defect > tol * a.fro_norm().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Fails with [`Error::NotHermitian`] when `||A - A^dagger||_F` exceeds
/// `eps_residual * max(1, ||A||_F)` for the default tolerance.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig, Error> {
    check_hermitian(a, Tolerance::default().eps_residual)?;
    jacobi(a, true)
}

/// Eigenvalues only, descending. Skips eigenvector accumulation.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>, Error> {
    check_hermitian(a, Tolerance::default().eps_residual)?;
    if a.rows() == 2 {
        let (hi, lo) = eigenvalues_2x2(a[(0, 0)].re, a[(1, 1)].re, a[(0, 1)]);
        return Ok(alloc::vec![hi, lo]);
    }
    Ok(jacobi(a, false)?.eigenvalues)
}

/// Closed-form spectrum of `[[a, b], [conj(b), d]]`, returned as `(max, min)`.
#[inline]
pub fn eigenvalues_2x2(a: f64, d: f64, b: C64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = (half * half + b.norm_sqr()).sqrt();
    (mean + r, mean - r)
}

fn jacobi(a: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEig, Error> {
    let n = a.rows();
    // Symmetrize so tiny input asymmetry cannot stall the sweep.
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = c64(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = m.fro_norm();

    let mut converged = n == 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE || mag <= 1e-300 * scale {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase = apq / mag;
                // J = [[c, s*phase], [-s*conj(phase), c]] on (p, q); m <- J^dagger m J.
                let sp = phase * s;
                let spc = phase.conj() * s;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * spc;
                    m[(k, q)] = mkp * sp + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * sp;
                    m[(q, k)] = mpk * spc + mqk * c;
                }
                m[(p, q)] = C64::zero();
                m[(q, p)] = C64::zero();
                m[(p, p)] = c64(m[(p, p)].re, 0.0);
                m[(q, q)] = c64(m[(q, q)].re, 0.0);
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - vkq * spc;
                        v[(k, q)] = vkp * sp + vkq * c;
                    }
                }
            }
        }
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[(i, j)].norm_sqr();
                }
            }
        }
        converged = off.sqrt() <= 1e-16 * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| m[(i, i)].re).collect();
    let eigenvectors = if want_vectors {
        ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])])
    } else {
        ComplexMatrix::identity(n)
    };
    Ok(HermitianEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Checks hermiticity and the eigenvalue floor `-eps_psd * ||A||_F`.
fn psd_eig(a: &ComplexMatrix, tol: &Tolerance) -> Result<HermitianEig, Error> {
    check_hermitian(a, tol.eps_residual)?;
    let eig = jacobi(a, true)?;
    let floor = -tol.eps_psd * a.fro_norm().max(f64::MIN_POSITIVE);
    if eig.min_eigenvalue() < floor {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_eigenvalue(),
        });
    }
    Ok(eig)
}

/// Hermitian PSD square root; slightly negative eigenvalues are clamped to 0.
pub fn psd_sqrt(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, Error> {
    let eig = psd_eig(a, tol)?;
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()).hermitian_part())
}

/// Moore-Penrose pseudoinverse of a Hermitian PSD matrix.
///
/// Eigenvalues at or below `eps_rank * lambda_max` are treated as zero.
pub fn pseudo_inverse(a: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix, Error> {
    let eig = psd_eig(a, tol)?;
    Ok(pinv_from_eig(&eig, tol.eps_rank))
}

pub(crate) fn pinv_from_eig(eig: &HermitianEig, eps_rank: f64) -> ComplexMatrix {
    let lmax = eig.max_eigenvalue().max(0.0);
    let cutoff = eps_rank * lmax;
    eig.map_spectrum(|l| if l > cutoff && l > 0.0 { 1.0 / l } else { 0.0 })
        .hermitian_part()
}

/// Numerical rank of a Hermitian PSD matrix under the `eps_rank` cutoff.
pub fn psd_rank(eig: &HermitianEig, eps_rank: f64) -> usize {
    let lmax = eig.max_eigenvalue().max(0.0);
    eig.eigenvalues
        .iter()
        .filter(|&&l| l > eps_rank * lmax && l > 0.0)
        .count()
}

/// `||U^dagger U - I||_F`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&(&u.dagger() * u) - &ComplexMatrix::identity(u.rows())).fro_norm()
}

/// `exp(i H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix, Error> {
    let eig = hermitian_eig(h)?;
    let v = &eig.eigenvectors;
    let n = v.rows();
    let phases: Vec<C64> = eig
        .eigenvalues
        .iter()
        .map(|&l| c64(l.cos(), l.sin()))
        .collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let mut acc = C64::zero();
        for (k, ph) in phases.iter().enumerate() {
            acc += v[(i, k)] * ph * v[(j, k)].conj();
        }
        acc
    }))
}
