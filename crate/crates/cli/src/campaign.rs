//! Batch campaigns: random CQ sampling, the 3 x N counterexample search,
//! family comparisons and inclusion scans.
//!
//! Sample `i` of a campaign seeded with `seed` uses [`sample_seed`]`(seed, i)`.
//! Samples run in parallel; results are collected in sample order and
//! reduced with order-independent statistics, so output never depends on
//! scheduling.

use rayon::prelude::*;
use serde::Serialize;
use sppt_core::discord::{commutator_criterion, cq_detect, discord_a, OptimizerConfig};
use sppt_core::factorization::{factorize_3xn, is_sppt};
use sppt_core::families::{
    bell_diagonal, bell_is_sppt, bell_zero_discord, build_cq_state, s12_generators, xstate,
    xstate_is_positive, xstate_is_ppt, xstate_is_sppt_tol, xstate_zero_discord, BellDiagonalParams,
    XStateParams,
};
use sppt_core::random::{random_cq, random_cq_spec, random_ginibre_state, random_sppt};
use sppt_core::{c64, BipartiteState, Error, Tolerance};

use crate::state_file::StateFile;

pub fn sample_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64).wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Summary {
    pub samples: usize,
    pub dim_b: usize,
    pub seed: u64,
    pub passed: usize,
    pub max_normality_residual: f64,
    /// Largest residual / threshold ratio; below 1 on a passing run.
    pub max_threshold_ratio: f64,
    /// Seeds of failing samples.
    pub failures: Vec<u64>,
}

impl Theorem1Summary {
    pub fn all_passed(&self) -> bool {
        self.passed == self.samples
    }
}

/// Samples random `2 x N` CQ states and tests each for SPPT.
pub fn verify_theorem1(samples: usize, dim_b: usize, seed: u64, tol: &Tolerance) -> Result<Theorem1Summary, Error> {
    let results: Vec<(u64, bool, f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = sample_seed(seed, i);
            let state = random_cq(2, dim_b, s, tol)?;
            let v = is_sppt(&state, tol)?;
            let r = v.residuals[0];
            Ok((s, v.is_sppt, r.value, r.value / r.threshold))
        })
        .collect::<Result<_, Error>>()?;
    Ok(Theorem1Summary {
        samples,
        dim_b,
        seed,
        passed: results.iter().filter(|r| r.1).count(),
        max_normality_residual: results.iter().map(|r| r.2).fold(0.0, f64::max),
        max_threshold_ratio: results.iter().map(|r| r.3).fold(0.0, f64::max),
        failures: results.iter().filter(|r| !r.1).map(|r| r.0).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RemarkSample {
    pub seed: u64,
    /// `||[S12, S12^dagger]||_F` of the canonical factorization.
    pub commutator_norm: f64,
    /// `||[S12, S12^dagger] - (l1 conj(l2) - l2 conj(l1)) [H1, H2]||_F`.
    pub identity_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RemarkSummary {
    pub samples: usize,
    pub dim_b: usize,
    pub seed: u64,
    pub threshold: f64,
    pub offenders: usize,
    pub offender_fraction: f64,
    pub max_identity_error: f64,
    pub per_sample: Vec<RemarkSample>,
    /// Sample with the largest commutator norm, if it exceeds `threshold`.
    pub worst: Option<RemarkSample>,
}

pub fn remark_sample(dim_b: usize, seed: u64, tol: &Tolerance) -> Result<(BipartiteState, RemarkSample), Error> {
    let spec = random_cq_spec(3, dim_b, seed);
    let state = build_cq_state(&spec, tol)?;
    let f = factorize_3xn(&state, tol)?;
    let comm = f.s12.commutator(&f.s12.dagger())?;
    let predicted = s12_generators(&spec, tol)?.predicted_commutator();
    Ok((
        state,
        RemarkSample {
            seed,
            commutator_norm: comm.fro_norm(),
            identity_error: (&comm - &predicted).fro_norm(),
        },
    ))
}

/// Samples random `3 x N` CQ states and measures the non-normality of `S12`.
pub fn remark_3xn(samples: usize, dim_b: usize, seed: u64, threshold: f64, tol: &Tolerance) -> Result<RemarkSummary, Error> {
    let per_sample: Vec<RemarkSample> = (0..samples)
        .into_par_iter()
        .map(|i| remark_sample(dim_b, sample_seed(seed, i), tol).map(|r| r.1))
        .collect::<Result<_, Error>>()?;
    let offenders = per_sample.iter().filter(|s| s.commutator_norm > threshold).count();
    let worst = per_sample
        .iter()
        .filter(|s| s.commutator_norm > threshold)
        .max_by(|a, b| a.commutator_norm.total_cmp(&b.commutator_norm))
        .cloned();
    Ok(RemarkSummary {
        samples,
        dim_b,
        seed,
        threshold,
        offenders,
        offender_fraction: if samples == 0 { 0.0 } else { offenders as f64 / samples as f64 },
        max_identity_error: per_sample.iter().map(|s| s.identity_error).fold(0.0, f64::max),
        per_sample,
        worst,
    })
}

/// The witness state of a remark sample as a state file.
pub fn remark_witness(dim_b: usize, sample: &RemarkSample, tol: &Tolerance) -> Result<StateFile, Error> {
    let (state, _) = remark_sample(dim_b, sample.seed, tol)?;
    Ok(StateFile::from_state(&state)
        .with_family(format!("cq-3x{dim_b}"))
        .with_seed(sample.seed)
        .with_label(format!(
            "zero-discord 3x{dim_b} state with non-normal S12 (||[S12, S12^dagger]||_F = {:.6e})",
            sample.commutator_norm
        )))
}

#[derive(Debug, Clone, Serialize)]
pub struct PredicateRow {
    pub name: &'static str,
    pub analytic: bool,
    /// `None` when the numerical pipeline cannot run (non-positive input).
    pub numerical: Option<bool>,
}

impl PredicateRow {
    pub fn agrees(&self) -> bool {
        self.numerical.is_none_or(|n| n == self.analytic)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyComparison {
    pub rows: Vec<PredicateRow>,
    pub discord: Option<f64>,
    pub commutator_criterion: Option<f64>,
}

impl FamilyComparison {
    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| !r.agrees()).count()
    }
}

fn numerical_rows(
    state: &BipartiteState,
    analytic: [bool; 3],
    opt: &OptimizerConfig,
    tol: &Tolerance,
) -> Result<FamilyComparison, Error> {
    let [ppt, sppt, zd] = analytic;
    Ok(FamilyComparison {
        rows: vec![
            PredicateRow { name: "positive", analytic: true, numerical: Some(true) },
            PredicateRow { name: "PPT", analytic: ppt, numerical: Some(state.is_ppt(tol)?.is_ppt) },
            PredicateRow { name: "SPPT", analytic: sppt, numerical: Some(is_sppt(state, tol)?.is_sppt) },
            PredicateRow { name: "zero discord", analytic: zd, numerical: Some(cq_detect(state, tol)?.is_cq) },
        ],
        discord: Some(discord_a(state, opt, tol)?.discord),
        commutator_criterion: Some(commutator_criterion(state)),
    })
}

/// Closed-form X-state predicates next to the numerical pipeline.
pub fn compare_xstate(p: &XStateParams, opt: &OptimizerConfig, tol: &Tolerance) -> Result<FamilyComparison, Error> {
    let positive = xstate_is_positive(p)?;
    let analytic = [xstate_is_ppt(p)?, xstate_is_sppt_tol(p, tol)?, xstate_zero_discord(p)?];
    match xstate(p, tol) {
        Ok(state) => numerical_rows(&state, analytic, opt, tol),
        Err(Error::NotPsd { .. }) => Ok(FamilyComparison {
            rows: vec![
                PredicateRow { name: "positive", analytic: positive, numerical: Some(false) },
                PredicateRow { name: "PPT", analytic: analytic[0], numerical: None },
                PredicateRow { name: "SPPT", analytic: analytic[1], numerical: None },
                PredicateRow { name: "zero discord", analytic: analytic[2], numerical: None },
            ],
            discord: None,
            commutator_criterion: None,
        }),
        Err(e) => Err(e),
    }
}

pub fn compare_bell(p: &BellDiagonalParams, opt: &OptimizerConfig, tol: &Tolerance) -> Result<FamilyComparison, Error> {
    let state = bell_diagonal(p, tol)?;
    let analytic = [xstate_is_ppt(&p.to_xstate())?, bell_is_sppt(p)?, bell_zero_discord(p)?];
    numerical_rows(&state, analytic, opt, tol)
}

/// Membership counts for one family of states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassTally {
    pub family: String,
    pub points: usize,
    pub ppt: usize,
    pub sppt: usize,
    pub zero_discord: usize,
    pub ppt_not_sppt: usize,
    pub sppt_not_zero_discord: usize,
    /// Samples breaking `zero discord => SPPT => PPT`.
    pub inclusion_violations: usize,
    pub max_commutator: f64,
    /// Points with discord above `eps_opt`; only computed for Bell grids.
    pub discord_positive: Option<usize>,
}

pub const SCAN_CSV_HEADER: [&str; 10] = [
    "family",
    "points",
    "ppt",
    "sppt",
    "zero_discord",
    "ppt_not_sppt",
    "sppt_not_zero_discord",
    "inclusion_violations",
    "max_commutator",
    "discord_positive",
];

impl ClassTally {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.family.clone(),
            self.points.to_string(),
            self.ppt.to_string(),
            self.sppt.to_string(),
            self.zero_discord.to_string(),
            self.ppt_not_sppt.to_string(),
            self.sppt_not_zero_discord.to_string(),
            self.inclusion_violations.to_string(),
            format!("{:e}", self.max_commutator),
            self.discord_positive.map(|d| d.to_string()).unwrap_or_default(),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct Membership {
    ppt: bool,
    sppt: bool,
    zero_discord: bool,
    commutator: f64,
    discord_positive: Option<bool>,
}

fn classify(state: &BipartiteState, discord: Option<&OptimizerConfig>, tol: &Tolerance) -> Result<Membership, Error> {
    Ok(Membership {
        ppt: state.is_ppt(tol)?.is_ppt,
        sppt: is_sppt(state, tol)?.is_sppt,
        zero_discord: cq_detect(state, tol)?.is_cq,
        commutator: commutator_criterion(state),
        discord_positive: match discord {
            Some(opt) => Some(discord_a(state, opt, tol)?.discord > tol.eps_opt),
            None => None,
        },
    })
}

fn tally(family: &str, members: &[Membership]) -> ClassTally {
    let count = |f: &dyn Fn(&Membership) -> bool| members.iter().filter(|m| f(m)).count();
    ClassTally {
        family: family.to_owned(),
        points: members.len(),
        ppt: count(&|m| m.ppt),
        sppt: count(&|m| m.sppt),
        zero_discord: count(&|m| m.zero_discord),
        ppt_not_sppt: count(&|m| m.ppt && !m.sppt),
        sppt_not_zero_discord: count(&|m| m.sppt && !m.zero_discord),
        inclusion_violations: count(&|m| (m.zero_discord && !m.sppt) || (m.sppt && !m.ppt)),
        max_commutator: members.iter().map(|m| m.commutator).fold(0.0, f64::max),
        discord_positive: members
            .iter()
            .map(|m| m.discord_positive)
            .collect::<Option<Vec<bool>>>()
            .map(|v| v.iter().filter(|&&b| b).count()),
    }
}

/// All `(k_1, .., k_4)` with `k_i >= 0` and `sum k_i = steps`, scaled by `1/steps`.
pub fn simplex_grid(steps: usize) -> Vec<[f64; 4]> {
    let mut out = Vec::new();
    if steps == 0 {
        return out;
    }
    for i in 0..=steps {
        for j in 0..=steps - i {
            for k in 0..=steps - i - j {
                let l = steps - i - j - k;
                out.push([i, j, k, l].map(|v| v as f64 / steps as f64));
            }
        }
    }
    out
}

/// Positive X-states: diagonals on the simplex grid and real coherences
/// `a12, b12` in `{0, 1/(2 steps), .., 1/2}`, keeping only positive points.
pub fn xstate_grid(steps: usize) -> Vec<XStateParams> {
    let mut out = Vec::new();
    let h = 0.5 / steps.max(1) as f64;
    for [a11, a22, b11, b22] in simplex_grid(steps) {
        for r in 0..=steps {
            for s in 0..=steps {
                let p = XStateParams { a11, a22, b11, b22, a12: c64(r as f64 * h, 0.0), b12: c64(s as f64 * h, 0.0) };
                if xstate_is_positive(&p).unwrap_or(false) {
                    out.push(p);
                }
            }
        }
    }
    out
}

pub struct ScanConfig {
    pub steps: usize,
    pub samples: usize,
    pub dim_b: usize,
    pub seed: u64,
}

/// Membership tallies over the X-state grid, the Bell-diagonal grid and,
/// when `samples > 0`, random Ginibre, CQ and SPPT ensembles.
pub fn scan_inclusions(cfg: &ScanConfig, opt: &OptimizerConfig, tol: &Tolerance) -> Result<Vec<ClassTally>, Error> {
    let mut rows = Vec::new();
    if cfg.steps > 0 {
        let xs: Vec<Membership> = xstate_grid(cfg.steps)
            .par_iter()
            .map(|p| classify(&xstate(p, tol)?, None, tol))
            .collect::<Result<_, Error>>()?;
        rows.push(tally("xstate-grid", &xs));
        let bell: Vec<Membership> = simplex_grid(cfg.steps)
            .par_iter()
            .map(|p| classify(&bell_diagonal(&BellDiagonalParams::new(*p)?, tol)?, Some(opt), tol))
            .collect::<Result<_, Error>>()?;
        rows.push(tally("bell-grid", &bell));
    }
    if cfg.samples > 0 {
        type Gen = fn(usize, u64, &Tolerance) -> Result<BipartiteState, Error>;
        let ensembles: [(&str, Gen); 3] = [
            ("random-ginibre", |n, s, t| random_ginibre_state(2, n, s, t)),
            ("random-cq", |n, s, t| random_cq(2, n, s, t)),
            ("random-sppt", random_sppt),
        ];
        for (e, (name, gen)) in ensembles.iter().enumerate() {
            let base = sample_seed(cfg.seed, usize::MAX - e);
            let members: Vec<Membership> = (0..cfg.samples)
                .into_par_iter()
                .map(|i| classify(&gen(cfg.dim_b, sample_seed(base, i), tol)?, None, tol))
                .collect::<Result<_, Error>>()?;
            rows.push(tally(&format!("{name}-2x{}", cfg.dim_b), &members));
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_scalar_sample_passes() {
        let s = verify_theorem1(1, 1, 3, &Tolerance::default()).unwrap();
        assert!(s.all_passed());
        assert_eq!(s.max_normality_residual, 0.0);
    }

    #[test]
    fn identical_conditional_states_never_offend() {
        let tol = Tolerance::default();
        let spec = sppt_core::families::CqSpec {
            dim_a: 3,
            u: sppt_core::random::random_unitary(3, 8),
            sigmas: vec![sppt_core::random::random_ginibre_density(2, 1).scale_real(1.0 / 3.0); 3],
        };
        let state = build_cq_state(&spec, &tol).unwrap();
        let f = factorize_3xn(&state, &tol).unwrap();
        assert!(f.s12.fro_norm() < 1e-12);
    }

    #[test]
    fn simplex_grid_sizes() {
        assert!(simplex_grid(0).is_empty());
        assert_eq!(simplex_grid(1).len(), 4);
        assert_eq!(simplex_grid(50).len(), 23426);
        let g = xstate_grid(2);
        assert!(g.len() > 10 && g.len() < 10 * 9);
        assert!(g.iter().all(|p| xstate_is_positive(p).unwrap()));
    }

    #[test]
    fn empty_scan_has_no_rows() {
        let cfg = ScanConfig { steps: 0, samples: 0, dim_b: 2, seed: 1 };
        assert!(scan_inclusions(&cfg, &OptimizerConfig::default(), &Tolerance::default()).unwrap().is_empty());
    }

    #[test]
    fn small_scan_witnesses_proper_inclusions() {
        let cfg = ScanConfig { steps: 6, samples: 8, dim_b: 2, seed: 1 };
        let opt = OptimizerConfig { grid_theta: 16, grid_phi: 32, ..OptimizerConfig::default() };
        let rows = scan_inclusions(&cfg, &opt, &Tolerance::default()).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.inclusion_violations == 0), "{rows:?}");
        let x = &rows[0];
        assert!(x.ppt_not_sppt > 0 && x.sppt_not_zero_discord > 0, "{x:?}");
        let bell = &rows[1];
        assert!(bell.max_commutator <= 1e-10);
        assert!(bell.discord_positive.unwrap() > bell.points / 2);
        assert_eq!(rows[3].zero_discord, 8);
        assert_eq!(rows[4].sppt, 8);
    }
}
