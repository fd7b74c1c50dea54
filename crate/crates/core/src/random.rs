//! Seeded random ensembles.
//!
//! Every generator draws from ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64`, so a seed pins the output bit-for-bit on every platform.
//! Complex Gaussians are `(x + i y) / sqrt(2)` with `x, y` standard normal.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::bipartite::BipartiteState;
use crate::error::Error;
use crate::families::{build_cq_state, CqSpec};
use crate::matrix::{c64, ComplexMatrix, C64};
use crate::tolerance::Tolerance;

pub type StateRng = ChaCha20Rng;

pub fn rng(seed: u64) -> StateRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    c64(x, y) * core::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `G G^dagger / tr(G G^dagger)` with `G` an `n x n` Ginibre matrix.
pub fn ginibre_density_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre_matrix(n, n, rng);
    let w = &g * &g.dagger();
    w.scale_real(1.0 / w.trace().re).hermitian_part()
}

pub fn random_ginibre_density(n: usize, seed: u64) -> ComplexMatrix {
    ginibre_density_with(n, &mut rng(seed))
}

/// Haar unitary: Gram-Schmidt (applied twice) on the columns of a Ginibre
/// matrix, which leaves positive diagonal in `R`.
pub fn unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let z = ginibre_matrix(n, n, rng);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| z[(i, j)]).collect()).collect();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let col = &mut rest[0];
        for _pass in 0..2 {
            for prev in done.iter() {
                let dot: C64 = prev.iter().zip(col.iter()).map(|(p, c)| p.conj() * c).sum();
                for (c, p) in col.iter_mut().zip(prev) {
                    *c -= dot * p;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    unitary_with(n, &mut rng(seed))
}

/// CQ spec with Haar `U`, Dirichlet(1, .., 1) weights and Ginibre conditional states.
pub fn cq_spec_with<R: Rng + ?Sized>(dim_a: usize, n: usize, rng: &mut R) -> CqSpec {
    let u = unitary_with(dim_a, rng);
    let raw: Vec<f64> = (0..dim_a).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let sigmas = raw
        .iter()
        .map(|w| ginibre_density_with(n, rng).scale_real(w / total))
        .collect();
    CqSpec { dim_a, u, sigmas }
}

pub fn random_cq_spec(dim_a: usize, n: usize, seed: u64) -> CqSpec {
    cq_spec_with(dim_a, n, &mut rng(seed))
}

pub fn random_cq(dim_a: usize, n: usize, seed: u64, tol: &Tolerance) -> Result<BipartiteState, Error> {
    build_cq_state(&random_cq_spec(dim_a, n, seed), tol)
}

/// `rho = X^dagger X / tr` with `X = [[X1, S X1], [0, X2]]`, `X1, X2` Ginibre
/// and `S = W D W^dagger` normal (`W` Haar, `D` complex Gaussian diagonal).
pub fn random_sppt(n: usize, seed: u64, tol: &Tolerance) -> Result<BipartiteState, Error> {
    let mut r = rng(seed);
    let x1 = ginibre_matrix(n, n, &mut r);
    let x2 = ginibre_matrix(n, n, &mut r);
    let w = unitary_with(n, &mut r);
    let d: Vec<C64> = (0..n).map(|_| complex_gaussian(&mut r)).collect();
    let s = &(&w * &ComplexMatrix::diag(&d)) * &w.dagger();
    let mut x = ComplexMatrix::zeros(2 * n, 2 * n);
    x.set_submatrix(0, 0, &x1);
    x.set_submatrix(0, n, &(&s * &x1));
    x.set_submatrix(n, n, &x2);
    let rho = &x.dagger() * &x;
    let rho = rho.scale_real(1.0 / rho.trace().re).hermitian_part();
    BipartiteState::validate(rho, 2, n, tol)
}

/// Pure state from a normalized complex Gaussian vector.
pub fn random_pure(dim_a: usize, n: usize, seed: u64, tol: &Tolerance) -> Result<BipartiteState, Error> {
    let mut r = rng(seed);
    let mut psi: Vec<C64> = (0..dim_a * n).map(|_| complex_gaussian(&mut r)).collect();
    let norm = psi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|v| *v /= norm);
    BipartiteState::validate(ComplexMatrix::outer(&psi), dim_a, n, tol)
}

/// Generic full-rank bipartite state from the Ginibre ensemble.
pub fn random_ginibre_state(dim_a: usize, n: usize, seed: u64, tol: &Tolerance) -> Result<BipartiteState, Error> {
    BipartiteState::validate(random_ginibre_density(dim_a * n, seed), dim_a, n, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, unitarity_defect};

    #[test]
    fn ginibre_density_is_normalized() {
        for n in [1, 3, 6] {
            let rho = random_ginibre_density(n, 42);
            assert!((rho.trace().re - 1.0).abs() < 1e-14);
            assert!(*hermitian_eigenvalues(&rho).unwrap().last().unwrap() > -1e-14);
        }
    }

    #[test]
    fn unitaries_are_unitary_and_reproducible() {
        for n in [1, 2, 3, 8] {
            let u = random_unitary(n, 7);
            assert!(unitarity_defect(&u) < 1e-13);
            assert_eq!(u, random_unitary(n, 7));
        }
        assert_ne!(random_unitary(3, 1), random_unitary(3, 2));
    }

    #[test]
    fn ensembles_validate() {
        let tol = Tolerance::default();
        random_cq(2, 4, 3, &tol).unwrap();
        random_cq(3, 2, 3, &tol).unwrap();
        random_sppt(3, 3, &tol).unwrap();
        let p = random_pure(2, 3, 3, &tol).unwrap();
        let spectrum = p.spectrum().unwrap();
        assert!((spectrum[0] - 1.0).abs() < 1e-12);
        assert_eq!(random_ginibre_state(2, 2, 11, &tol).unwrap(), random_ginibre_state(2, 2, 11, &tol).unwrap());
    }
}
