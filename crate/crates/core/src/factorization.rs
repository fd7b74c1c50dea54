//! Canonical upper-triangular block factorization `rho = X^dagger X`.
//!
//! For `M = 2`,
//!
//! ```text
//!     X = | X1   S X1 |          rho11 = X1^dagger X1
//!         | 0    X2   |          rho12 = X1^dagger S X1
//!                                rho22 = X1^dagger S^dagger S X1 + X2^dagger X2
//! ```
//!
//! The gauge is fixed by taking every diagonal factor Hermitian PSD, so
//! `X1 = rho11^(1/2)` and `S = X1^+ rho12 X1^+`. The state is SPPT when `S` is
//! normal; the partial transpose is then `Y^dagger Y` with `S` replaced by
//! `S^dagger` in `X`.
//!
//! For `M = 3` the same sequential extraction yields `X1, X2, X3` and
//! `S12, S13, S23`. The verdict there is about the canonical factors only
//! ("canonical SPPT"): all three `S_kl` normal and `S12 S13^dagger = S13^dagger S12`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bipartite::{partial_transpose_a, BipartiteState};
use crate::error::Error;
use crate::linalg::{hermitian_eig, pinv_from_eig, psd_rank, unitarity_defect, HermitianEig};
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone)]
pub struct SpptFactorization2 {
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub s: ComplexMatrix,
    /// `||X^dagger X - rho||_F`.
    pub reconstruction_residual: f64,
    /// `||S^dagger S - S S^dagger||_F`.
    pub normality_residual: f64,
    /// `X1` has a numerical null space.
    pub rank_deficient: bool,
    /// `||rho12 - P rho12 P||_F` with `P` the projector onto `range(X1)`.
    pub unexplained_mass: f64,
    rho: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct SpptFactorization3 {
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub x3: ComplexMatrix,
    pub s12: ComplexMatrix,
    pub s13: ComplexMatrix,
    pub s23: ComplexMatrix,
    pub reconstruction_residual: f64,
    /// Normality residuals of `S12`, `S13`, `S23`.
    pub normality_residuals: [f64; 3],
    /// `||S12 S13^dagger - S13^dagger S12||_F`.
    pub cross_residual: f64,
    pub rank_deficient: bool,
    pub unexplained_mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpptVerdict {
    pub is_sppt: bool,
    /// Raw residuals with the threshold each was compared against.
    pub residuals: Vec<Residual>,
    pub rank_deficient: bool,
    /// `false` when `rho12` (or `rho13`, `rho23`) has weight outside the range
    /// of the pivot factor, where the canonical `S` is not defined.
    pub decidable: bool,
    /// Spectral PPT verdict, for the `SPPT => PPT` consistency check.
    pub is_ppt: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Residual {
    pub fn passes(&self) -> bool {
        self.value <= self.threshold
    }
}

impl SpptVerdict {
    /// `is_sppt => is_ppt`; a `false` here falsifies the numerics.
    pub fn consistent(&self) -> bool {
        !self.is_sppt || self.is_ppt
    }
}

struct Pivot {
    root: ComplexMatrix,
    pinv: ComplexMatrix,
    /// Projector onto the range of `root`.
    range: ComplexMatrix,
    rank_deficient: bool,
}

/// Square root of a Schur complement with the `[-eps_psd, 0]` clamp.
fn pivot(block: &ComplexMatrix, tol: &Tolerance, strict: bool) -> Result<Pivot, Error> {
    let eig: HermitianEig = hermitian_eig(&block.hermitian_part())?;
    let min = eig.min_eigenvalue();
    if strict && min < -tol.eps_psd {
        return Err(Error::InconsistentBlocks {
            min_eigenvalue: min,
        });
    }
    // Rank is decided on the block itself: round-off eigenvalues near 1e-17
    // would survive a relative cutoff after the square root.
    let cutoff = tol.eps_rank * eig.max_eigenvalue().max(0.0);
    let root_of = move |l: f64| if l > cutoff && l > 0.0 { l.sqrt() } else { 0.0 };
    let root = eig.map_spectrum(root_of).hermitian_part();
    let root_eig = HermitianEig {
        eigenvalues: eig.eigenvalues.iter().map(|&l| root_of(l)).collect(),
        eigenvectors: eig.eigenvectors.clone(),
    };
    let pinv = pinv_from_eig(&root_eig, 0.0);
    let rank = psd_rank(&root_eig, 0.0);
    let n = block.rows();
    let range = &root * &pinv;
    Ok(Pivot {
        root,
        pinv,
        range,
        rank_deficient: rank < n,
    })
}

fn sandwich(p: &Pivot, m: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let s = &(&p.pinv * m) * &p.pinv;
    let unexplained = if p.rank_deficient {
        (m - &(&(&p.range * m) * &p.range)).fro_norm()
    } else {
        0.0
    };
    (s, unexplained)
}

fn assemble_x2(x1: &ComplexMatrix, s: &ComplexMatrix, x2: &ComplexMatrix) -> ComplexMatrix {
    let n = x1.rows();
    let mut x = ComplexMatrix::zeros(2 * n, 2 * n);
    x.set_submatrix(0, 0, x1);
    x.set_submatrix(0, n, &(s * x1));
    x.set_submatrix(n, n, x2);
    x
}

fn require_dim(state: &BipartiteState, dim_a: usize) -> Result<(), Error> {
    if state.dim_a() != dim_a {
        return Err(Error::UnsupportedDimension {
            dim_a: state.dim_a(),
        });
    }
    Ok(())
}

/// Canonical factorization of a `2 x N` state.
pub fn factorize_2xn(state: &BipartiteState, tol: &Tolerance) -> Result<SpptFactorization2, Error> {
    require_dim(state, 2)?;
    let rho11 = state.block_unchecked(0, 0);
    let rho12 = state.block_unchecked(0, 1);
    let rho22 = state.block_unchecked(1, 1);

    let p1 = pivot(&rho11, tol, true)?;
    let (s, unexplained_mass) = sandwich(&p1, &rho12);
    let decidable = unexplained_mass <= tol.eps_residual;

    let x1 = p1.root;
    let sx1 = &s * &x1;
    let schur = &rho22 - &(&sx1.dagger() * &sx1);
    let x2 = pivot(&schur, tol, decidable)?.root;

    let x = assemble_x2(&x1, &s, &x2);
    let reconstruction_residual = (&(&x.dagger() * &x) - state.rho()).fro_norm();
    let normality_residual = s.normality_residual();
    Ok(SpptFactorization2 {
        x1,
        x2,
        s,
        reconstruction_residual,
        normality_residual,
        rank_deficient: p1.rank_deficient,
        unexplained_mass,
        rho: state.rho().clone(),
    })
}

impl SpptFactorization2 {
    /// The upper block-triangular `X`.
    pub fn x(&self) -> ComplexMatrix {
        assemble_x2(&self.x1, &self.s, &self.x2)
    }

    /// `X^dagger X`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let x = self.x();
        &x.dagger() * &x
    }

    /// The matrix the factorization was computed from.
    pub fn target(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn dim_b(&self) -> usize {
        self.x1.rows()
    }

    /// `eps_sppt * max(1, ||S||_F^2)`.
    pub fn normality_threshold(&self, tol: &Tolerance) -> f64 {
        let s2 = self.s.fro_norm();
        tol.eps_sppt * (s2 * s2).max(1.0)
    }

    /// Applies `X1 -> G1 X1`, `X2 -> G2 X2`, `S -> G1 S G1^-1`.
    pub fn gauge_transform(
        &self,
        g1: &ComplexMatrix,
        g2: &ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<SpptFactorization2, Error> {
        for g in [g1, g2] {
            if g.rows() != self.dim_b() || !g.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: self.dim_b() * self.dim_b(),
                    found: g.rows() * g.cols(),
                });
            }
            let defect = unitarity_defect(g);
            if defect > tol.eps_residual {
                return Err(Error::NotUnitary { defect });
            }
        }
        let x1 = g1 * &self.x1;
        let x2 = g2 * &self.x2;
        let s = &(g1 * &self.s) * &g1.dagger();
        let x = assemble_x2(&x1, &s, &x2);
        let reconstruction_residual = (&(&x.dagger() * &x) - &self.rho).fro_norm();
        let normality_residual = s.normality_residual();
        Ok(SpptFactorization2 {
            x1,
            x2,
            s,
            reconstruction_residual,
            normality_residual,
            rank_deficient: self.rank_deficient,
            unexplained_mass: self.unexplained_mass,
            rho: self.rho.clone(),
        })
    }

    /// `Y^dagger Y` for the canonical candidate `Y`, i.e. `X` with `S` replaced
    /// by `S^dagger`.
    pub fn canonical_y(&self) -> ComplexMatrix {
        let y = assemble_x2(&self.x1, &self.s.dagger(), &self.x2);
        &y.dagger() * &y
    }

    /// `||Y^dagger Y - rho^{T_A}||_F`.
    pub fn canonical_y_residual(&self) -> f64 {
        let pt = partial_transpose_a(&self.rho, 2, self.dim_b());
        (&self.canonical_y() - &pt).fro_norm()
    }
}

/// Canonical factorization of a `3 x N` state, extracted block by block.
pub fn factorize_3xn(state: &BipartiteState, tol: &Tolerance) -> Result<SpptFactorization3, Error> {
    require_dim(state, 3)?;
    let b = state.blocks();

    let p1 = pivot(&b[0][0], tol, true)?;
    let (s12, u12) = sandwich(&p1, &b[0][1]);
    let (s13, u13) = sandwich(&p1, &b[0][2]);
    let x1 = p1.root.clone();
    let s12x1 = &s12 * &x1;
    let s13x1 = &s13 * &x1;

    let mut decidable = u12.max(u13) <= tol.eps_residual;
    let schur2 = &b[1][1] - &(&s12x1.dagger() * &s12x1);
    let p2 = pivot(&schur2, tol, decidable)?;
    let rhs23 = &b[1][2] - &(&s12x1.dagger() * &s13x1);
    let (s23, u23) = sandwich(&p2, &rhs23);
    decidable &= u23 <= tol.eps_residual;
    let x2 = p2.root.clone();
    let s23x2 = &s23 * &x2;

    let schur3 = &(&b[2][2] - &(&s13x1.dagger() * &s13x1)) - &(&s23x2.dagger() * &s23x2);
    let x3 = pivot(&schur3, tol, decidable)?.root;

    let n = state.dim_b();
    let mut x = ComplexMatrix::zeros(3 * n, 3 * n);
    x.set_submatrix(0, 0, &x1);
    x.set_submatrix(0, n, &s12x1);
    x.set_submatrix(0, 2 * n, &s13x1);
    x.set_submatrix(n, n, &x2);
    x.set_submatrix(n, 2 * n, &s23x2);
    x.set_submatrix(2 * n, 2 * n, &x3);
    let reconstruction_residual = (&(&x.dagger() * &x) - state.rho()).fro_norm();

    let cross = (&(&s12 * &s13.dagger()) - &(&s13.dagger() * &s12)).fro_norm();
    Ok(SpptFactorization3 {
        normality_residuals: [
            s12.normality_residual(),
            s13.normality_residual(),
            s23.normality_residual(),
        ],
        cross_residual: cross,
        x1,
        x2,
        x3,
        s12,
        s13,
        s23,
        reconstruction_residual,
        rank_deficient: p1.rank_deficient || p2.rank_deficient,
        unexplained_mass: u12.max(u13).max(u23),
    })
}

fn threshold(tol: &Tolerance, a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    tol.eps_sppt * (a.fro_norm() * b.fro_norm()).max(1.0)
}

/// SPPT verdict from the canonical factorization (canonical SPPT for `M = 3`).
pub fn is_sppt(state: &BipartiteState, tol: &Tolerance) -> Result<SpptVerdict, Error> {
    let is_ppt = state.is_ppt(tol)?.is_ppt;
    let (residuals, rank_deficient, unexplained) = match state.dim_a() {
        2 => {
            let f = factorize_2xn(state, tol)?;
            let r = vec![Residual {
                name: "normality(S)",
                value: f.normality_residual,
                threshold: f.normality_threshold(tol),
            }];
            (r, f.rank_deficient, f.unexplained_mass)
        }
        3 => {
            let f = factorize_3xn(state, tol)?;
            let r = vec![
                Residual {
                    name: "normality(S12)",
                    value: f.normality_residuals[0],
                    threshold: threshold(tol, &f.s12, &f.s12),
                },
                Residual {
                    name: "normality(S13)",
                    value: f.normality_residuals[1],
                    threshold: threshold(tol, &f.s13, &f.s13),
                },
                Residual {
                    name: "normality(S23)",
                    value: f.normality_residuals[2],
                    threshold: threshold(tol, &f.s23, &f.s23),
                },
                Residual {
                    name: "cross(S12,S13)",
                    value: f.cross_residual,
                    threshold: threshold(tol, &f.s12, &f.s13),
                },
            ];
            (r, f.rank_deficient, f.unexplained_mass)
        }
        d => return Err(Error::UnsupportedDimension { dim_a: d }),
    };
    let decidable = unexplained <= tol.eps_residual;
    let is_sppt = decidable && residuals.iter().all(Residual::passes);
    Ok(SpptVerdict {
        is_sppt,
        residuals,
        rank_deficient,
        decidable,
        is_ppt,
    })
}
