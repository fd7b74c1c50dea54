//! Entropies, measurement-conditioned states, classical correlation and
//! discord on the A side, and exact detection of classical-quantum states.
//!
//! All entropies are in bits.
//!
//! For `M = 2` the measurement is a rank-one projector pair `|n><n|`,
//! `I - |n><n|` with `|n> = (cos(theta/2), e^{i phi} sin(theta/2))`, and the
//! classical correlation is maximized by a coarse `(theta, phi)` grid followed
//! by simplex refinement. For `M = 3` the measurement is an orthonormal basis
//! of `C^3`, refined by simplex search over `U0 exp(iH)` from several seeds.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Euclid;

use crate::bipartite::{rotate_a, rotate_blocks, BipartiteState};
use crate::error::Error;
use crate::linalg::{
    eigenvalues_2x2, exp_i_hermitian, hermitian_eig, hermitian_eigenvalues, HermitianEig,
};
use crate::matrix::{c64, pauli, ComplexMatrix, C64};
use crate::optimize::nelder_mead;
use crate::random;
use crate::tolerance::Tolerance;

/// `-sum p log2 p` over a spectrum; non-positive entries contribute nothing.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Von Neumann entropy `-tr(sigma log2 sigma)`.
pub fn von_neumann_entropy(sigma: &ComplexMatrix, tol: &Tolerance) -> Result<f64, Error> {
    if !sigma.is_square() {
        return Err(Error::NotDensityMatrix("not square"));
    }
    if sigma.hermiticity_defect() > tol.eps_residual {
        return Err(Error::NotDensityMatrix("not Hermitian"));
    }
    if (sigma.trace().re - 1.0).abs() > tol.eps_residual {
        return Err(Error::NotDensityMatrix("trace differs from 1"));
    }
    let spectrum = hermitian_eigenvalues(sigma)?;
    if *spectrum.last().unwrap() < -tol.eps_psd {
        return Err(Error::NotDensityMatrix("negative eigenvalue"));
    }
    Ok(entropy_of_spectrum(&spectrum))
}

/// `p * S(X / p)` for an unnormalized PSD `X` with `p = tr X`.
fn weighted_entropy(x: &ComplexMatrix, eps_prob: f64) -> f64 {
    let spectrum = if x.rows() == 2 {
        let (hi, lo) = eigenvalues_2x2(x[(0, 0)].re, x[(1, 1)].re, x[(0, 1)]);
        vec![hi, lo]
    } else if x.rows() == 1 {
        vec![x[(0, 0)].re]
    } else {
        hermitian_eigenvalues(&x.hermitian_part()).expect("compression of a valid state")
    };
    let p: f64 = spectrum.iter().map(|l| l.max(0.0)).sum();
    if p <= eps_prob {
        return 0.0;
    }
    spectrum
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * (l / p).log2())
        .sum()
}

fn state_entropy(m: &ComplexMatrix) -> f64 {
    entropy_of_spectrum(&hermitian_eigenvalues(m).expect("reduced operator of a valid state"))
}

/// `I(rho) = S(rho_A) + S(rho_B) - S(rho)`, clamped at zero.
pub fn mutual_information(state: &BipartiteState) -> f64 {
    mutual_information_raw(state).max(0.0)
}

fn mutual_information_raw(state: &BipartiteState) -> f64 {
    state_entropy(&state.partial_trace_b()) + state_entropy(&state.partial_trace_a())
        - state_entropy(state.rho())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitMeasurement {
    theta: f64,
    phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// `Pi_+ = |n><n|`
    Plus,
    /// `Pi_- = I - |n><n|`
    Minus,
}

impl QubitMeasurement {
    /// Angles are folded into `theta` in `[0, pi]`, `phi` in `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        let two_pi = 2.0 * PI;
        let mut t = Euclid::rem_euclid(&theta, &two_pi);
        let mut p = phi;
        if t > PI {
            t = two_pi - t;
            p += PI;
        }
        let mut p = Euclid::rem_euclid(&p, &two_pi);
        if p >= two_pi {
            p = 0.0;
        }
        Self { theta: t, phi: p }
    }

    /// Measurement along the Bloch vector `n` (need not be normalized).
    pub fn from_bloch(n: [f64; 3]) -> Self {
        let r = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if r == 0.0 {
            return Self::new(0.0, 0.0);
        }
        let z = (n[2] / r).clamp(-1.0, 1.0);
        Self::new(z.acos(), n[1].atan2(n[0]))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// `|n>`
    pub fn ket(&self) -> [C64; 2] {
        let (s, c) = (0.5 * self.theta).sin_cos();
        [c64(c, 0.0), C64::from_polar(s, self.phi)]
    }

    /// Unitary with columns `|n>`, `|n_perp>`.
    pub fn basis(&self) -> ComplexMatrix {
        let [a, b] = self.ket();
        let mut u = ComplexMatrix::zeros(2, 2);
        u[(0, 0)] = a;
        u[(1, 0)] = b;
        u[(0, 1)] = -b.conj();
        u[(1, 1)] = a.conj();
        u
    }

    pub fn projector(&self, outcome: Outcome) -> ComplexMatrix {
        let plus = ComplexMatrix::outer(&self.ket());
        match outcome {
            Outcome::Plus => plus,
            Outcome::Minus => &ComplexMatrix::identity(2) - &plus,
        }
    }
}

/// Post-measurement state of B for one outcome.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub probability: f64,
    /// Normalized state of B; `I/N` when the outcome has negligible weight.
    pub sigma: ComplexMatrix,
    /// `probability <= eps_prob`.
    pub negligible: bool,
}

/// `<f|rho|f>_A = sum_ij conj(f_i) f_j block(i, j)`, unnormalized.
fn compress(blocks: &[Vec<ComplexMatrix>], f: &[C64]) -> ComplexMatrix {
    let n = blocks[0][0].rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            let w = f[i].conj() * f[j];
            for r in 0..n {
                for c in 0..n {
                    out[(r, c)] += b[(r, c)] * w;
                }
            }
        }
    }
    out
}

/// `p_k = tr[(Pi_k (x) I) rho]`, `sigma_k = Tr_A[(Pi_k (x) I) rho (Pi_k (x) I)] / p_k`.
pub fn conditional_state(
    state: &BipartiteState,
    m: &QubitMeasurement,
    outcome: Outcome,
    tol: &Tolerance,
) -> Result<ConditionalState, Error> {
    if state.dim_a() != 2 {
        return Err(Error::UnsupportedDimension {
            dim_a: state.dim_a(),
        });
    }
    let basis = m.basis();
    let col = match outcome {
        Outcome::Plus => 0,
        Outcome::Minus => 1,
    };
    let f = [basis[(0, col)], basis[(1, col)]];
    let x = compress(&state.blocks(), &f);
    let p = x.trace().re;
    let n = state.dim_b();
    if p <= tol.eps_prob {
        return Ok(ConditionalState {
            probability: p.max(0.0),
            sigma: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            negligible: true,
        });
    }
    Ok(ConditionalState {
        probability: p,
        sigma: x.scale_real(1.0 / p).hermitian_part(),
        negligible: false,
    })
}

/// `S(rho | {Pi_k}) = sum_k p_k S(sigma_k)`.
pub fn conditional_entropy(
    state: &BipartiteState,
    m: &QubitMeasurement,
    tol: &Tolerance,
) -> Result<f64, Error> {
    if state.dim_a() != 2 {
        return Err(Error::UnsupportedDimension {
            dim_a: state.dim_a(),
        });
    }
    Ok(basis_conditional_entropy(&state.blocks(), &m.basis(), tol.eps_prob))
}

/// Conditional entropy for the measurement in the columns of `u`.
fn basis_conditional_entropy(blocks: &[Vec<ComplexMatrix>], u: &ComplexMatrix, eps_prob: f64) -> f64 {
    let m = u.rows();
    (0..m)
        .map(|k| {
            let f: Vec<C64> = (0..m).map(|i| u[(i, k)]).collect();
            weighted_entropy(&compress(blocks, &f), eps_prob)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    /// Polar grid points, endpoints included.
    pub grid_theta: usize,
    /// Azimuthal grid points over `[0, 2 pi)`.
    pub grid_phi: usize,
    /// Evaluation budget per simplex refinement.
    pub max_evals: usize,
    /// Stop refinement when simplex values agree to this.
    pub f_tol: f64,
    /// Number of best grid points refined.
    pub refine_starts: usize,
    /// Random seed bases for `M = 3` (in addition to the `rho_A` eigenbasis
    /// and the computational basis).
    pub basis_restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_theta: 64,
            grid_phi: 128,
            max_evals: 200,
            f_tol: 1e-9,
            refine_starts: 3,
            basis_restarts: 6,
            seed: 0x5eed,
        }
    }
}

/// The optimal measurement found for `C_A`.
#[derive(Debug, Clone)]
pub struct MeasurementChoice {
    /// Bloch angles when `M = 2`.
    pub qubit: Option<QubitMeasurement>,
    /// Measurement basis as unitary columns.
    pub basis: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct ClassicalCorrelation {
    pub value: f64,
    pub measurement: MeasurementChoice,
    /// Best value on the coarse grid (`M = 2`) or at the seeds (`M = 3`).
    pub coarse_value: f64,
    pub evals: usize,
    pub grid_resolution: usize,
}

fn grid_angles(opt: &OptimizerConfig) -> Vec<(f64, f64)> {
    let nt = opt.grid_theta.max(2);
    let np = opt.grid_phi.max(1);
    let mut pts = Vec::with_capacity(nt * np);
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        let at_pole = i == 0 || i == nt - 1;
        for j in 0..np {
            if at_pole && j > 0 {
                break;
            }
            pts.push((theta, 2.0 * PI * j as f64 / np as f64));
        }
    }
    pts
}

/// `C_A(rho) = sup S(rho_B) - S(rho | {Pi_k})` over projective measurements on A.
pub fn classical_correlation_a(
    state: &BipartiteState,
    opt: &OptimizerConfig,
    tol: &Tolerance,
) -> Result<ClassicalCorrelation, Error> {
    let blocks = state.blocks();
    let s_b = state_entropy(&state.partial_trace_a());
    match state.dim_a() {
        2 => Ok(qubit_search(&blocks, s_b, opt, tol)),
        3 => basis_search(state, &blocks, s_b, opt, tol),
        d => Err(Error::UnsupportedDimension { dim_a: d }),
    }
}

fn qubit_search(
    blocks: &[Vec<ComplexMatrix>],
    s_b: f64,
    opt: &OptimizerConfig,
    tol: &Tolerance,
) -> ClassicalCorrelation {
    let objective = |theta: f64, phi: f64| {
        s_b - basis_conditional_entropy(blocks, &QubitMeasurement::new(theta, phi).basis(), tol.eps_prob)
    };
    let grid = grid_angles(opt);
    let values: Vec<f64> = grid.iter().map(|&(t, p)| objective(t, p)).collect();
    let mut evals = grid.len();

    // Indices of the best grid points; ties keep the earliest (smallest theta, then phi).
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let coarse_value = values[order[0]];

    let mut best = (coarse_value, grid[order[0]]);
    let step = PI / opt.grid_theta.max(2) as f64;
    for &start in order.iter().take(opt.refine_starts.max(1)) {
        let (t0, p0) = grid[start];
        let r = nelder_mead(
            |x| -objective(x[0], x[1]),
            &[t0, p0],
            step,
            opt.max_evals,
            opt.f_tol,
        );
        evals += r.evals;
        if -r.value > best.0 {
            best = (-r.value, (r.x[0], r.x[1]));
        }
    }
    let m = QubitMeasurement::new(best.1 .0, best.1 .1);
    ClassicalCorrelation {
        value: best.0,
        measurement: MeasurementChoice {
            qubit: Some(m),
            basis: m.basis(),
        },
        coarse_value,
        evals,
        grid_resolution: grid.len(),
    }
}

/// Hermitian matrix with zero diagonal and off-diagonal entries from `x`.
fn off_diagonal_hermitian(m: usize, x: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(m, m);
    let mut idx = 0;
    for i in 0..m {
        for j in i + 1..m {
            let z = c64(x[idx], x[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

fn basis_search(
    state: &BipartiteState,
    blocks: &[Vec<ComplexMatrix>],
    s_b: f64,
    opt: &OptimizerConfig,
    tol: &Tolerance,
) -> Result<ClassicalCorrelation, Error> {
    let m = state.dim_a();
    let objective = |u: &ComplexMatrix| s_b - basis_conditional_entropy(blocks, u, tol.eps_prob);

    let mut seeds = vec![
        hermitian_eig(&state.partial_trace_b())?.eigenvectors,
        ComplexMatrix::identity(m),
    ];
    for k in 0..opt.basis_restarts {
        seeds.push(random::random_unitary(m, opt.seed.wrapping_add(k as u64)));
    }

    let dim = m * (m - 1);
    let mut evals = 0;
    let mut coarse_value = f64::NEG_INFINITY;
    let mut best: Option<(f64, ComplexMatrix)> = None;
    for u0 in &seeds {
        let v0 = objective(u0);
        evals += 1;
        coarse_value = coarse_value.max(v0);
        let rotate = |x: &[f64]| -> ComplexMatrix {
            let h = off_diagonal_hermitian(m, x);
            u0 * &exp_i_hermitian(&h).expect("Hermitian by construction")
        };
        let r = nelder_mead(
            |x| -objective(&rotate(x)),
            &vec![0.0; dim],
            0.3,
            opt.max_evals * 4,
            opt.f_tol,
        );
        evals += r.evals;
        let (val, u) = if -r.value > v0 {
            (-r.value, rotate(&r.x))
        } else {
            (v0, u0.clone())
        };
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, u));
        }
    }
    let (value, basis) = best.unwrap();
    Ok(ClassicalCorrelation {
        value,
        measurement: MeasurementChoice { qubit: None, basis },
        coarse_value,
        evals,
        grid_resolution: seeds.len(),
    })
}

#[derive(Debug, Clone)]
pub struct DiscordReport {
    pub mutual_information: f64,
    pub classical_correlation: f64,
    /// `I - C_A`, clamped at zero.
    pub discord: f64,
    /// `I - C_A` before clamping.
    pub raw_discord: f64,
    pub optimal_measurement: MeasurementChoice,
    pub optimizer_evals: usize,
    pub grid_resolution: usize,
}

/// `D_A(rho) = I(rho) - C_A(rho)`.
pub fn discord_a(
    state: &BipartiteState,
    opt: &OptimizerConfig,
    tol: &Tolerance,
) -> Result<DiscordReport, Error> {
    let mi = mutual_information_raw(state);
    let cc = classical_correlation_a(state, opt, tol)?;
    let raw = mi - cc.value;
    Ok(DiscordReport {
        mutual_information: mi.max(0.0),
        classical_correlation: cc.value,
        discord: raw.max(0.0),
        raw_discord: raw,
        optimal_measurement: cc.measurement,
        optimizer_evals: cc.evals,
        grid_resolution: cc.grid_resolution,
    })
}

/// `||[rho, rho_A (x) I_B]||_F`; vanishes on every zero-discord state.
pub fn commutator_criterion(state: &BipartiteState) -> f64 {
    let lifted = state
        .partial_trace_b()
        .kron(&ComplexMatrix::identity(state.dim_b()));
    state
        .rho()
        .commutator(&lifted)
        .expect("same dimensions")
        .fro_norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqRoute {
    /// Rejected by the commutator criterion.
    Commutator,
    /// Tested in the eigenbasis of a nondegenerate `rho_A`.
    ReducedEigenbasis,
    /// Degenerate `rho_A`: exact minimization of the off-diagonal blocks.
    DegenerateMinimization,
}

#[derive(Debug, Clone)]
pub struct CqVerdict {
    pub is_cq: bool,
    /// Columns `f_k` of the best basis found.
    pub basis: Option<ComplexMatrix>,
    /// `||rho - sum_k |f_k><f_k| (x) sigma_k||_F` in that basis.
    pub off_block_residual: Option<f64>,
    /// Unnormalized conditional states `sigma_k` (traces sum to 1) when CQ.
    pub sigmas: Vec<ComplexMatrix>,
    pub commutator: f64,
    pub route: CqRoute,
}

fn off_block_norm(blocks: &[Vec<ComplexMatrix>]) -> f64 {
    let mut acc = 0.0;
    for (k, row) in blocks.iter().enumerate() {
        for (l, b) in row.iter().enumerate() {
            if k != l {
                let f = b.fro_norm();
                acc += f * f;
            }
        }
    }
    acc.sqrt()
}

/// Pauli components `R_i = Tr_A[(sigma_i (x) I) rho]` of a 2 x N block grid.
fn pauli_components(blocks: &[Vec<ComplexMatrix>]) -> [ComplexMatrix; 3] {
    pauli().map(|s| {
        let n = blocks[0][0].rows();
        let mut r = ComplexMatrix::zeros(n, n);
        for (k, row) in blocks.iter().enumerate() {
            for (l, b) in row.iter().enumerate() {
                r = &r + &b.scale(s[(l, k)]);
            }
        }
        r
    })
}

/// Minimizes the off-diagonal block of a `2 x N` grid over qubit bases.
///
/// With `R_i` the Pauli components and `G_ij = tr(R_i R_j)`, the squared
/// off-diagonal norm in the basis `|n+->` is `(tr G - n.G.n) / 4`, so the
/// optimum is the top eigenvector of `G`.
pub fn min_off_block_qubit(blocks: &[Vec<ComplexMatrix>]) -> (QubitMeasurement, f64) {
    let r = pauli_components(blocks);
    let gram = ComplexMatrix::from_fn(3, 3, |i, j| c64((&r[i] * &r[j]).trace().re, 0.0));
    let eig: HermitianEig = hermitian_eig(&gram).expect("real symmetric");
    let v = eig.eigenvector(0);
    // Undo the arbitrary global phase of the eigenvector.
    let pivot = v
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap();
    let phase = pivot.conj() / pivot.norm();
    let n = [0, 1, 2].map(|i| (v[i] * phase).re);
    let predicted = 0.25 * (gram.trace().re - eig.max_eigenvalue());
    (QubitMeasurement::from_bloch(n), predicted.max(0.0).sqrt())
}

/// Groups indices of a descending spectrum into runs separated by gaps > eps.
fn clusters(eigenvalues: &[f64], eps: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..eigenvalues.len() {
        if eigenvalues[i - 1] - eigenvalues[i] > eps {
            out.push(vec![i]);
        } else {
            out.last_mut().unwrap().push(i);
        }
    }
    out
}

/// Blocks of `rho` restricted to A-side indices `idx` (after a rotation).
fn sub_blocks(blocks: &[Vec<ComplexMatrix>], idx: &[usize]) -> Vec<Vec<ComplexMatrix>> {
    idx.iter()
        .map(|&k| idx.iter().map(|&l| blocks[k][l].clone()).collect())
        .collect()
}

/// Basis for a fully degenerate `rho_A` when `M = 3`: the eigenbasis of a
/// generic Hermitian element of the *-algebra spanned by the B-indexed
/// `M x M` slices `A_ab[k][l] = rho[(k, a), (l, b)]`. A CQ state makes these
/// slices commute, and the generic element then shares their eigenbasis.
fn generic_slice_basis(blocks: &[Vec<ComplexMatrix>]) -> Result<ComplexMatrix, Error> {
    let m = blocks.len();
    let n = blocks[0][0].rows();
    let mut h = ComplexMatrix::zeros(m, m);
    for a in 0..n {
        for b in a..n {
            let w = if a == b {
                c64(1.0 + 0.29 * a as f64, 0.0)
            } else {
                C64::from_polar(0.7 + 0.173 * (a + 2 * b) as f64, 0.9 * a as f64 + 1.7 * b as f64)
            };
            for k in 0..m {
                for l in 0..m {
                    let s = blocks[k][l][(a, b)];
                    h[(k, l)] += w * s;
                    if a != b {
                        // adjoint term keeps h Hermitian
                        h[(l, k)] += (w * s).conj();
                    }
                }
            }
        }
    }
    Ok(hermitian_eig(&h.hermitian_part())?.eigenvectors)
}

/// Decides whether `rho = sum_k |f_k><f_k| (x) sigma_k` for an orthonormal
/// basis `{f_k}` of A.
pub fn cq_detect(state: &BipartiteState, tol: &Tolerance) -> Result<CqVerdict, Error> {
    let commutator = commutator_criterion(state);
    if commutator > tol.eps_residual {
        return Ok(CqVerdict {
            is_cq: false,
            basis: None,
            off_block_residual: None,
            sigmas: Vec::new(),
            commutator,
            route: CqRoute::Commutator,
        });
    }
    let m = state.dim_a();
    let eig = hermitian_eig(&state.partial_trace_b())?;
    let groups = clusters(&eig.eigenvalues, tol.eps_degenerate);
    let (basis, route) = if groups.len() == m {
        (eig.eigenvectors.clone(), CqRoute::ReducedEigenbasis)
    } else {
        let v = &eig.eigenvectors;
        let rotated = rotate_a(state, v);
        let mut basis = v.clone();
        for g in groups.iter().filter(|g| g.len() > 1) {
            let sub = sub_blocks(&rotated, g);
            let w = if g.len() == 2 {
                min_off_block_qubit(&sub).0.basis()
            } else {
                generic_slice_basis(&sub)?
            };
            // Replace the columns of this eigenspace by v_g * w.
            for (c_out, &col) in g.iter().enumerate() {
                for i in 0..m {
                    let mut acc = C64::new(0.0, 0.0);
                    for (c_in, &src) in g.iter().enumerate() {
                        acc += v[(i, src)] * w[(c_in, c_out)];
                    }
                    basis[(i, col)] = acc;
                }
            }
        }
        (basis, CqRoute::DegenerateMinimization)
    };
    let rotated = rotate_blocks(&state.blocks(), &basis);
    let residual = off_block_norm(&rotated);
    let is_cq = residual <= tol.eps_cq;
    let sigmas = if is_cq {
        (0..m).map(|k| rotated[k][k].hermitian_part()).collect()
    } else {
        Vec::new()
    };
    Ok(CqVerdict {
        is_cq,
        basis: Some(basis),
        off_block_residual: Some(residual),
        sigmas,
        commutator,
        route,
    })
}
