//! Named state families and their closed-form predicates.
//!
//! X-states are laid out as
//!
//! ```text
//!     | a11  .    .    a12 |
//!     | .    b11  b12  .   |
//!     | .    b21  b22  .   |
//!     | a21  .    .    a22 |
//! ```
//!
//! in the basis `|00>, |01>, |10>, |11>`. Bell projectors are ordered
//! `P1 = Phi+, P2 = Phi-, P3 = Psi+, P4 = Psi-`.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::bipartite::BipartiteState;
use crate::error::Error;
use crate::linalg::{hermitian_eigenvalues, pseudo_inverse, psd_sqrt, unitarity_defect};
use crate::matrix::{c64, ComplexMatrix, C64};
use crate::tolerance::Tolerance;

/// Slack for the equalities and inequalities in the closed-form predicates.
pub const PREDICATE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XStateParams {
    pub a11: f64,
    pub a22: f64,
    pub b11: f64,
    pub b22: f64,
    pub a12: C64,
    pub b12: C64,
}

impl XStateParams {
    pub fn check(&self) -> Result<(), Error> {
        let diag = [self.a11, self.a22, self.b11, self.b22];
        if diag.iter().chain([self.a12.re, self.a12.im, self.b12.re, self.b12.im].iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite X-state parameter"));
        }
        if diag.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParams("X-state diagonal must be non-negative"));
        }
        if (diag.iter().sum::<f64>() - 1.0).abs() > PREDICATE_EPS {
            return Err(Error::InvalidParams("X-state diagonal must sum to 1"));
        }
        Ok(())
    }

    /// The 4 x 4 matrix, without positivity checks.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::diag_real(&[self.a11, self.b11, self.b22, self.a22]);
        m[(0, 3)] = self.a12;
        m[(3, 0)] = self.a12.conj();
        m[(1, 2)] = self.b12;
        m[(2, 1)] = self.b12.conj();
        m
    }
}

pub fn xstate(params: &XStateParams, tol: &Tolerance) -> Result<BipartiteState, Error> {
    params.check()?;
    BipartiteState::validate(params.matrix(), 2, 2, tol)
}

/// `a11 a22 >= |a12|^2` and `b11 b22 >= |b12|^2`.
pub fn xstate_is_positive(p: &XStateParams) -> Result<bool, Error> {
    p.check()?;
    Ok(p.a11 * p.a22 - p.a12.norm_sqr() >= -PREDICATE_EPS
        && p.b11 * p.b22 - p.b12.norm_sqr() >= -PREDICATE_EPS)
}

/// Positivity plus `a11 a22 >= |b12|^2` and `b11 b22 >= |a12|^2`.
pub fn xstate_is_ppt(p: &XStateParams) -> Result<bool, Error> {
    Ok(xstate_is_positive(p)?
        && p.a11 * p.a22 - p.b12.norm_sqr() >= -PREDICATE_EPS
        && p.b11 * p.b22 - p.a12.norm_sqr() >= -PREDICATE_EPS)
}

/// Positivity plus `|a12| = |b12|`.
pub fn xstate_is_sppt(p: &XStateParams) -> Result<bool, Error> {
    Ok(xstate_is_positive(p)? && (p.a12.norm() - p.b12.norm()).abs() <= PREDICATE_EPS)
}

/// [`xstate_is_sppt`] read at the factorization's tolerance.
///
/// Here `X1 = diag(sqrt a11, sqrt b11)` and `S` is anti-diagonal with entries
/// `a12 / sqrt(a11 b11)` and `b12 / sqrt(a11 b11)`, so
/// `||S^dagger S - S S^dagger||_F = sqrt2 ||a12|^2 - |b12|^2| / (a11 b11)`,
/// compared against `eps_sppt * max(1, ||S||_F^2)`. A singular `rho11`
/// falls back to the exact predicate.
pub fn xstate_is_sppt_tol(p: &XStateParams, tol: &Tolerance) -> Result<bool, Error> {
    if !xstate_is_positive(p)? {
        return Ok(false);
    }
    let d = p.a11 * p.b11;
    if d <= PREDICATE_EPS {
        return xstate_is_sppt(p);
    }
    let (na, nb) = (p.a12.norm_sqr(), p.b12.norm_sqr());
    let residual = core::f64::consts::SQRT_2 * (na - nb).abs() / d;
    Ok(residual <= tol.eps_sppt * ((na + nb) / d).max(1.0))
}

/// Zero discord: either both coherences vanish (the state is diagonal), or
/// `|a12| = |b12| != 0` with `a11 = b22` and `a22 = b11`.
pub fn xstate_zero_discord(p: &XStateParams) -> Result<bool, Error> {
    if !xstate_is_positive(p)? {
        return Ok(false);
    }
    let diagonal = p.a12.norm() <= PREDICATE_EPS && p.b12.norm() <= PREDICATE_EPS;
    let swapped = xstate_is_sppt(p)?
        && (p.a11 - p.b22).abs() <= PREDICATE_EPS
        && (p.a22 - p.b11).abs() <= PREDICATE_EPS;
    Ok(diagonal || swapped)
}

/// `V = [[0, e^{i mu}], [e^{i nu}, 0]]` with `b = V a V^dagger`, if one exists.
///
/// `V a V^dagger = [[a22, e^{i(mu-nu)} conj(a12)], [.., a11]]`, so only
/// `mu - nu` is determined; `nu = 0` is returned.
pub fn xstate_equivalence_unitary(p: &XStateParams) -> Option<ComplexMatrix> {
    let same_moduli = (p.a12.norm() - p.b12.norm()).abs() <= PREDICATE_EPS;
    if !(same_moduli
        && (p.a11 - p.b22).abs() <= PREDICATE_EPS
        && (p.a22 - p.b11).abs() <= PREDICATE_EPS)
    {
        return None;
    }
    let mu = if p.a12.norm() > PREDICATE_EPS {
        p.b12.arg() + p.a12.arg()
    } else {
        0.0
    };
    let mut v = ComplexMatrix::zeros(2, 2);
    v[(0, 1)] = C64::from_polar(1.0, mu);
    v[(1, 0)] = c64(1.0, 0.0);
    Some(v)
}

/// The `a` and `b` 2 x 2 matrices of an X-state.
pub fn xstate_ab(p: &XStateParams) -> (ComplexMatrix, ComplexMatrix) {
    let a = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c64(p.a11, 0.0),
        (1, 1) => c64(p.a22, 0.0),
        (0, 1) => p.a12,
        _ => p.a12.conj(),
    });
    let b = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => c64(p.b11, 0.0),
        (1, 1) => c64(p.b22, 0.0),
        (0, 1) => p.b12,
        _ => p.b12.conj(),
    });
    (a, b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellDiagonalParams {
    pub p: [f64; 4],
}

impl BellDiagonalParams {
    pub fn new(p: [f64; 4]) -> Result<Self, Error> {
        let s = Self { p };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), Error> {
        if self.p.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidParams("Bell weights must be non-negative"));
        }
        if (self.p.iter().sum::<f64>() - 1.0).abs() > PREDICATE_EPS {
            return Err(Error::InvalidParams("Bell weights must sum to 1"));
        }
        Ok(())
    }

    /// Induced X-state: `a11 = a22 = (p1 + p2)/2`, `a12 = (p1 - p2)/2`,
    /// `b11 = b22 = (p3 + p4)/2`, `b12 = (p3 - p4)/2`.
    pub fn to_xstate(&self) -> XStateParams {
        let [p1, p2, p3, p4] = self.p;
        XStateParams {
            a11: 0.5 * (p1 + p2),
            a22: 0.5 * (p1 + p2),
            b11: 0.5 * (p3 + p4),
            b22: 0.5 * (p3 + p4),
            a12: c64(0.5 * (p1 - p2), 0.0),
            b12: c64(0.5 * (p3 - p4), 0.0),
        }
    }
}

pub fn bell_diagonal(params: &BellDiagonalParams, tol: &Tolerance) -> Result<BipartiteState, Error> {
    params.check()?;
    xstate(&params.to_xstate(), tol)
}

/// `|p1 - p2| = |p3 - p4|`.
pub fn bell_is_sppt(params: &BellDiagonalParams) -> Result<bool, Error> {
    params.check()?;
    let [p1, p2, p3, p4] = params.p;
    Ok(((p1 - p2).abs() - (p3 - p4).abs()).abs() <= PREDICATE_EPS)
}

/// `p1 = p3, p2 = p4`, or `p1 = p4, p2 = p3`, or the diagonal case `p1 = p2, p3 = p4`.
pub fn bell_zero_discord(params: &BellDiagonalParams) -> Result<bool, Error> {
    params.check()?;
    let [p1, p2, p3, p4] = params.p;
    let eq = |x: f64, y: f64| (x - y).abs() <= PREDICATE_EPS;
    Ok((eq(p1, p3) && eq(p2, p4)) || (eq(p1, p4) && eq(p2, p3)) || (eq(p1, p2) && eq(p3, p4)))
}

/// Bell projector `k` in `0..4`, ordered `Phi+, Phi-, Psi+, Psi-`.
pub fn bell_projector(k: usize) -> ComplexMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let v = match k {
        0 => [h, 0.0, 0.0, h],
        1 => [h, 0.0, 0.0, -h],
        2 => [0.0, h, h, 0.0],
        3 => [0.0, h, -h, 0.0],
        _ => panic!("Bell projector index {k} out of range"),
    };
    ComplexMatrix::outer(&v.map(|x| c64(x, 0.0)))
}

/// `(1/4) [[1, ., ., q], [., 1, +-q, .], [., +-q, 1, .], [q, ., ., 1]]`.
pub fn zero_discord_bell_state(q: f64, sign: f64, tol: &Tolerance) -> Result<BipartiteState, Error> {
    if !(-1.0..=1.0).contains(&q) || sign.abs() != 1.0 {
        return Err(Error::InvalidParams("need -1 <= q <= 1 and sign = +-1"));
    }
    xstate(
        &XStateParams {
            a11: 0.25,
            a22: 0.25,
            b11: 0.25,
            b22: 0.25,
            a12: c64(0.25 * q, 0.0),
            b12: c64(0.25 * sign * q, 0.0),
        },
        tol,
    )
}

/// Zero-discord state `sum_k |f_k><f_k| (x) sigma_k` with `|f_k> = U |e_k>`.
#[derive(Debug, Clone)]
pub struct CqSpec {
    pub dim_a: usize,
    pub u: ComplexMatrix,
    pub sigmas: Vec<ComplexMatrix>,
}

impl CqSpec {
    pub fn check(&self, tol: &Tolerance) -> Result<(), Error> {
        if !(self.dim_a == 2 || self.dim_a == 3) {
            return Err(Error::UnsupportedDimension { dim_a: self.dim_a });
        }
        if self.u.rows() != self.dim_a || !self.u.is_square() || self.sigmas.len() != self.dim_a {
            return Err(Error::InvalidParams("CQ spec dimensions disagree"));
        }
        if unitarity_defect(&self.u) > 1e-10 {
            return Err(Error::InvalidParams("CQ spec basis is not unitary"));
        }
        let n = self.sigmas[0].rows();
        let mut total = 0.0;
        for s in &self.sigmas {
            if s.rows() != n || !s.is_square() || s.hermiticity_defect() > tol.eps_residual {
                return Err(Error::InvalidParams("conditional state is not Hermitian N x N"));
            }
            if *hermitian_eigenvalues(s)?.last().unwrap() < -tol.eps_psd {
                return Err(Error::InvalidParams("conditional state is not PSD"));
            }
            total += s.trace().re;
        }
        if (total - 1.0).abs() > tol.eps_trace {
            return Err(Error::InvalidParams("conditional traces must sum to 1"));
        }
        Ok(())
    }

    pub fn dim_b(&self) -> usize {
        self.sigmas[0].rows()
    }

    /// `rho_kl = sum_m U_km conj(U_lm) sigma_m`.
    pub fn block(&self, k: usize, l: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.dim_b(), self.dim_b());
        for (m, s) in self.sigmas.iter().enumerate() {
            let w = self.u[(k, m)] * self.u[(l, m)].conj();
            if !w.is_zero() {
                acc = &acc + &s.scale(w);
            }
        }
        acc
    }
}

pub fn build_cq_state(spec: &CqSpec, tol: &Tolerance) -> Result<BipartiteState, Error> {
    spec.check(tol)?;
    let m = spec.dim_a;
    let blocks: Vec<Vec<ComplexMatrix>> = (0..m)
        .map(|k| (0..m).map(|l| spec.block(k, l)).collect())
        .collect();
    let rho = BipartiteState::from_blocks_unchecked(&blocks);
    BipartiteState::validate(rho.hermitian_part(), m, spec.dim_b(), tol)
}

/// Predicted canonical `S` of a `2 x N` CQ state:
/// `U11 conj(U21) X1^+ (sigma_1 - sigma_2) X1^+` with `X1 = rho11^(1/2)`.
pub fn predicted_s(spec: &CqSpec, tol: &Tolerance) -> Result<ComplexMatrix, Error> {
    if spec.dim_a != 2 {
        return Err(Error::UnsupportedDimension { dim_a: spec.dim_a });
    }
    let x1_pinv = pseudo_inverse(&psd_sqrt(&spec.block(0, 0), tol)?, tol)?;
    let diff = &spec.sigmas[0] - &spec.sigmas[1];
    let c = spec.u[(0, 0)] * spec.u[(1, 0)].conj();
    Ok((&(&x1_pinv * &diff) * &x1_pinv).scale(c))
}

/// Generators of the canonical `S12` of a `3 x N` CQ state:
/// `S12 = lambda1 H1 + lambda2 H2` with `lambda1 = U12 conj(U22)`,
/// `lambda2 = U13 conj(U23)`, `H1 = X1^+ (sigma_2 - sigma_1) X1^+`,
/// `H2 = X1^+ (sigma_3 - sigma_1) X1^+`.
#[derive(Debug, Clone)]
pub struct S12Generators {
    pub lambda1: C64,
    pub lambda2: C64,
    pub h1: ComplexMatrix,
    pub h2: ComplexMatrix,
}

impl S12Generators {
    pub fn s12(&self) -> ComplexMatrix {
        &self.h1.scale(self.lambda1) + &self.h2.scale(self.lambda2)
    }

    /// `(lambda1 conj(lambda2) - lambda2 conj(lambda1)) [H1, H2]`.
    pub fn predicted_commutator(&self) -> ComplexMatrix {
        let c = self.lambda1 * self.lambda2.conj() - self.lambda2 * self.lambda1.conj();
        self.h1.commutator(&self.h2).expect("same size").scale(c)
    }
}

pub fn s12_generators(spec: &CqSpec, tol: &Tolerance) -> Result<S12Generators, Error> {
    if spec.dim_a != 3 {
        return Err(Error::UnsupportedDimension { dim_a: spec.dim_a });
    }
    let x1_pinv = pseudo_inverse(&psd_sqrt(&spec.block(0, 0), tol)?, tol)?;
    let gen = |k: usize| &(&x1_pinv * &(&spec.sigmas[k] - &spec.sigmas[0])) * &x1_pinv;
    let u = &spec.u;
    Ok(S12Generators {
        lambda1: u[(0, 1)] * u[(1, 1)].conj(),
        lambda2: u[(0, 2)] * u[(1, 2)].conj(),
        h1: gen(1),
        h2: gen(2),
    })
}
