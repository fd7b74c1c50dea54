//! Single-state analysis.

use std::fmt::{self, Write as _};

use serde::Serialize;
use sppt_core::discord::{commutator_criterion, cq_detect, discord_a, CqRoute, OptimizerConfig};
use sppt_core::factorization::is_sppt;
use sppt_core::{BipartiteState, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Validation {
    pub trace: f64,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpptReport {
    /// "SPPT" for `M = 2`, "canonical-SPPT" for `M = 3`.
    pub kind: &'static str,
    pub is_sppt: bool,
    pub decidable: bool,
    pub rank_deficient: bool,
    pub residuals: Vec<ResidualReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscordSummary {
    pub discord: f64,
    pub raw_discord: f64,
    pub classical_correlation: f64,
    /// Bloch angles `(theta, phi)` of the optimal measurement when `M = 2`.
    pub optimal_angles: Option<[f64; 2]>,
    /// Optimal basis columns as `[re, im]` rows when `M = 3`.
    pub optimal_basis: Option<Vec<Vec<[f64; 2]>>>,
    pub optimizer_evals: usize,
    pub grid_resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CqSummary {
    pub is_cq: bool,
    pub route: &'static str,
    pub off_block_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub dims: [usize; 2],
    pub validation: Validation,
    pub spectrum: Vec<f64>,
    pub pt_spectrum: Vec<f64>,
    pub ppt: bool,
    pub pt_min_eigenvalue: f64,
    pub sppt: SpptReport,
    pub commutator_criterion: f64,
    pub mutual_information: f64,
    pub discord: DiscordSummary,
    pub cq: CqSummary,
    /// Numerical contradictions of proven implications.
    pub inconsistencies: Vec<String>,
}

impl AnalysisReport {
    pub fn is_consistent(&self) -> bool {
        self.inconsistencies.is_empty()
    }
}

fn route_name(r: CqRoute) -> &'static str {
    match r {
        CqRoute::Commutator => "commutator",
        CqRoute::ReducedEigenbasis => "reduced-eigenbasis",
        CqRoute::DegenerateMinimization => "degenerate-minimization",
    }
}

pub fn analyze(
    state: &BipartiteState,
    opt: &OptimizerConfig,
    tol: &Tolerance,
) -> Result<AnalysisReport, sppt_core::Error> {
    let rho = state.rho();
    let spectrum = state.spectrum()?;
    let ppt = state.is_ppt(tol)?;
    let sppt = is_sppt(state, tol)?;
    let cq = cq_detect(state, tol)?;
    let d = discord_a(state, opt, tol)?;

    let basis = &d.optimal_measurement.basis;
    let optimal_basis = d.optimal_measurement.qubit.is_none().then(|| {
        (0..basis.rows())
            .map(|i| (0..basis.cols()).map(|j| [basis[(i, j)].re, basis[(i, j)].im]).collect())
            .collect()
    });

    let mut inconsistencies = Vec::new();
    if state.dim_a() == 2 && cq.is_cq && !sppt.is_sppt {
        inconsistencies.push("zero-discord (CQ) state reported as not SPPT".to_owned());
    }
    if sppt.is_sppt && !ppt.is_ppt {
        inconsistencies.push("SPPT state reported as not PPT".to_owned());
    }

    Ok(AnalysisReport {
        dims: [state.dim_a(), state.dim_b()],
        validation: Validation {
            trace: rho.trace().re,
            hermiticity_defect: rho.hermiticity_defect(),
            min_eigenvalue: *spectrum.last().unwrap(),
        },
        spectrum,
        pt_min_eigenvalue: ppt.min_eigenvalue,
        pt_spectrum: ppt.spectrum,
        ppt: ppt.is_ppt,
        sppt: SpptReport {
            kind: if state.dim_a() == 2 { "SPPT" } else { "canonical-SPPT" },
            is_sppt: sppt.is_sppt,
            decidable: sppt.decidable,
            rank_deficient: sppt.rank_deficient,
            residuals: sppt
                .residuals
                .iter()
                .map(|r| ResidualReport {
                    name: r.name.to_owned(),
                    value: r.value,
                    threshold: r.threshold,
                    passes: r.passes(),
                })
                .collect(),
        },
        commutator_criterion: commutator_criterion(state),
        mutual_information: d.mutual_information,
        discord: DiscordSummary {
            discord: d.discord,
            raw_discord: d.raw_discord,
            classical_correlation: d.classical_correlation,
            optimal_angles: d.optimal_measurement.qubit.map(|q| [q.theta(), q.phi()]),
            optimal_basis,
            optimizer_evals: d.optimizer_evals,
            grid_resolution: d.grid_resolution,
        },
        cq: CqSummary {
            is_cq: cq.is_cq,
            route: route_name(cq.route),
            off_block_residual: cq.off_block_residual,
        },
        inconsistencies,
    })
}

fn list(values: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write!(s, "{v:.6e}").unwrap();
    }
    s.push(']');
    s
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [m, n] = self.dims;
        writeln!(f, "state: {m} x {n}")?;
        writeln!(
            f,
            "  trace {:.12}  hermiticity defect {:.3e}  min eigenvalue {:.6e}",
            self.validation.trace, self.validation.hermiticity_defect, self.validation.min_eigenvalue
        )?;
        writeln!(f, "spectrum(rho):      {}", list(&self.spectrum))?;
        writeln!(f, "spectrum(rho^T_A):  {}", list(&self.pt_spectrum))?;
        writeln!(f, "PPT:                {} (min eigenvalue {:.6e})", yes(self.ppt), self.pt_min_eigenvalue)?;
        write!(f, "{}:{:width$}{}", self.sppt.kind, "", yes(self.sppt.is_sppt), width = 19 - self.sppt.kind.len())?;
        if !self.sppt.decidable {
            write!(f, " (undecidable: off-diagonal weight outside the pivot range)")?;
        } else if self.sppt.rank_deficient {
            write!(f, " (rank-deficient pivot)")?;
        }
        writeln!(f)?;
        for r in &self.sppt.residuals {
            writeln!(
                f,
                "  {:<18}{:.6e} (threshold {:.3e}) {}",
                r.name,
                r.value,
                r.threshold,
                if r.passes { "ok" } else { "exceeds" }
            )?;
        }
        writeln!(f, "commutator:         {:.6e}", self.commutator_criterion)?;
        writeln!(f, "mutual information: {:.9}", self.mutual_information)?;
        writeln!(f, "classical corr.:    {:.9}", self.discord.classical_correlation)?;
        writeln!(f, "discord D_A:        {:.9}", self.discord.discord)?;
        if let Some([t, p]) = self.discord.optimal_angles {
            writeln!(f, "  optimal measurement theta {t:.6} phi {p:.6}")?;
        }
        writeln!(
            f,
            "  optimizer: {} evaluations, {} starting points",
            self.discord.optimizer_evals, self.discord.grid_resolution
        )?;
        write!(f, "zero discord (CQ):  {} via {}", yes(self.cq.is_cq), self.cq.route)?;
        if let Some(r) = self.cq.off_block_residual {
            write!(f, " (off-block residual {r:.3e})")?;
        }
        writeln!(f)?;
        for msg in &self.inconsistencies {
            writeln!(f, "!! INCONSISTENCY: {msg}")?;
        }
        Ok(())
    }
}
