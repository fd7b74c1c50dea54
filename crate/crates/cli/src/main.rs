use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sppt::campaign::{
    compare_bell, compare_xstate, remark_3xn, remark_witness, scan_inclusions, verify_theorem1,
    FamilyComparison, ScanConfig, SCAN_CSV_HEADER,
};
use sppt::{analyze, AnalysisReport, StateFile};
use sppt_core::discord::OptimizerConfig;
use sppt_core::families::{BellDiagonalParams, XStateParams};
use sppt_core::{c64, Tolerance};

/// Exit status contract: 0 success, 1 a checked claim failed, 2 bad input.
const CLAIM_FAILED: u8 = 1;
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "sppt", version, about = "SPPT, PPT and quantum discord for 2 x N and 3 x N states")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Eigenvalue floor for positivity and PPT
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_psd: f64,
    /// Residual threshold for hermiticity, reconstruction and commutators
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_residual: f64,
    /// Normality threshold for S, relative to max(1, ||S||_F^2)
    #[arg(long, global = true, default_value_t = 1e-7)]
    tol_sppt: f64,
    /// Absolute slack on optimized discord values
    #[arg(long, global = true, default_value_t = 1e-4)]
    tol_discord: f64,
    /// Coarse measurement grid as THETAxPHI
    #[arg(long, global = true, default_value = "64x128", value_parser = parse_grid)]
    grid: (usize, usize),
    /// Number of random samples [default: 1000 verify-theorem1, 100 remark-3xn, 0 scan-inclusions]
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Dimension N of subsystem B [default: 4, 2 for scan-inclusions]
    #[arg(long, global = true)]
    dim_b: Option<usize>,
    /// RNG seed; chosen from the clock and printed when omitted
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (analysis JSON, witness state file or scan table)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis of a state file
    Analyze { path: PathBuf },
    /// Random 2 x N zero-discord states must all be SPPT
    #[command(name = "verify-theorem1")]
    VerifyTheorem1,
    /// Search random 3 x N zero-discord states for a non-normal S12
    #[command(name = "remark-3xn")]
    Remark3xn,
    /// X-state predicates next to the numerical pipeline
    Xstate(XStateArgs),
    /// Bell-diagonal predicates next to the numerical pipeline
    Bell {
        /// Weights of Phi+, Phi-, Psi+, Psi-
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        p: Vec<f64>,
    },
    /// Membership counts for zero discord, SPPT and PPT over grids and ensembles (CSV)
    #[command(name = "scan-inclusions")]
    ScanInclusions {
        /// Grid resolution: simplex step 1/STEPS; 0 gives an empty grid
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
}

#[derive(Args)]
struct XStateArgs {
    #[arg(long)]
    a11: f64,
    #[arg(long)]
    a22: f64,
    #[arg(long)]
    b11: f64,
    #[arg(long)]
    b22: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a12: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a12_im: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b12: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    b12_im: f64,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (t, p) = s.split_once('x').ok_or("expected THETAxPHI, e.g. 64x128")?;
    let t: usize = t.trim().parse().map_err(|e| format!("{e}"))?;
    let p: usize = p.trim().parse().map_err(|e| format!("{e}"))?;
    if t < 2 || p < 1 {
        return Err("grid needs at least 2 polar and 1 azimuthal points".into());
    }
    Ok((t, p))
}

enum Failure {
    Input(anyhow::Error),
    Claim,
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<sppt::StateFileError> for Failure {
    fn from(e: sppt::StateFileError) -> Self {
        Failure::Input(e.into())
    }
}

impl From<sppt_core::Error> for Failure {
    fn from(e: sppt_core::Error) -> Self {
        Failure::Input(e.into())
    }
}

struct Ctx {
    tol: Tolerance,
    opt: OptimizerConfig,
    g: GlobalArgs,
}

impl Ctx {
    fn seed(&self) -> u64 {
        self.g.seed.unwrap_or_else(|| {
            let s = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0);
            eprintln!("seed: {s} (auto-chosen; pass --seed {s} to reproduce)");
            s
        })
    }

    fn emit(&self, human: &str, machine: &impl Serialize) -> anyhow::Result<()> {
        match self.g.format {
            Format::Human => print!("{human}"),
            Format::Machine => println!("{}", serde_json::to_string_pretty(machine)?),
        }
        Ok(())
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_analyze(ctx: &Ctx, path: &Path) -> Result<(), Failure> {
    let file = StateFile::read(path)?;
    let state = file.to_state(&ctx.tol)?;
    let report: AnalysisReport = analyze(&state, &ctx.opt, &ctx.tol)?;
    if let Some(out) = &ctx.g.output {
        write_file(out, &(serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)? + "\n"))?;
    }
    let mut human = String::new();
    if let Some(label) = &file.label {
        writeln!(human, "label: {label}").unwrap();
    }
    write!(human, "{report}").unwrap();
    ctx.emit(&human, &report)?;
    if report.is_consistent() {
        Ok(())
    } else {
        Err(Failure::Claim)
    }
}

fn cmd_theorem1(ctx: &Ctx) -> Result<(), Failure> {
    let samples = ctx.g.samples.unwrap_or(1000);
    let n = ctx.g.dim_b.unwrap_or(4);
    if samples == 0 || n == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--samples and --dim-b must be at least 1")));
    }
    let s = verify_theorem1(samples, n, ctx.seed(), &ctx.tol)?;
    let mut human = format!(
        "random zero-discord 2x{n} states (seed {}): {}/{} SPPT\nmax normality residual {:.3e}, max residual/threshold {:.3e}\n",
        s.seed, s.passed, s.samples, s.max_normality_residual, s.max_threshold_ratio
    );
    for seed in &s.failures {
        writeln!(human, "FAILED: sample seed {seed}").unwrap();
    }
    ctx.emit(&human, &s)?;
    if s.all_passed() {
        Ok(())
    } else {
        Err(Failure::Claim)
    }
}

#[derive(Serialize)]
struct RemarkOutput<'a> {
    samples: usize,
    dim_b: usize,
    seed: u64,
    threshold: f64,
    offenders: usize,
    offender_fraction: f64,
    max_identity_error: f64,
    worst_seed: Option<u64>,
    worst_commutator_norm: Option<f64>,
    witness: Option<&'a AnalysisReport>,
    witness_file: Option<&'a Path>,
}

fn cmd_remark(ctx: &Ctx) -> Result<(), Failure> {
    let samples = ctx.g.samples.unwrap_or(100);
    let n = ctx.g.dim_b.unwrap_or(4);
    if n == 0 {
        return Err(Failure::Input(anyhow::anyhow!("--dim-b must be at least 1")));
    }
    let s = remark_3xn(samples, n, ctx.seed(), ctx.tol.eps_sppt, &ctx.tol)?;
    let mut human = format!(
        "random zero-discord 3x{n} states (seed {}): {}/{} with ||[S12, S12^dagger]||_F > {:.1e} ({:.1}%)\n\
         max error of the S12 commutator identity: {:.3e}\n",
        s.seed,
        s.offenders,
        s.samples,
        s.threshold,
        100.0 * s.offender_fraction,
        s.max_identity_error
    );
    let mut witness = None;
    if let Some(w) = &s.worst {
        let file = remark_witness(n, w, &ctx.tol)?;
        let report = analyze(&file.to_state(&ctx.tol)?, &ctx.opt, &ctx.tol)?;
        writeln!(
            human,
            "worst offender: sample seed {} with ||[S12, S12^dagger]||_F = {:.6e}\n  CQ {}, PPT {}, canonical-SPPT {}, discord {:.3e}",
            w.seed, w.commutator_norm, report.cq.is_cq, report.ppt, report.sppt.is_sppt, report.discord.discord
        )
        .unwrap();
        match &ctx.g.output {
            Some(out) => {
                file.write(out)?;
                writeln!(human, "  witness written to {}", out.display()).unwrap();
            }
            None => writeln!(human, "  pass --output <path> to save the witness state file").unwrap(),
        }
        witness = Some(report);
    } else {
        writeln!(human, "no offender found").unwrap();
    }
    let out = RemarkOutput {
        samples: s.samples,
        dim_b: n,
        seed: s.seed,
        threshold: s.threshold,
        offenders: s.offenders,
        offender_fraction: s.offender_fraction,
        max_identity_error: s.max_identity_error,
        worst_seed: s.worst.as_ref().map(|w| w.seed),
        worst_commutator_norm: s.worst.as_ref().map(|w| w.commutator_norm),
        witness: witness.as_ref(),
        witness_file: ctx.g.output.as_deref().filter(|_| s.worst.is_some()),
    };
    ctx.emit(&human, &out)?;
    if s.worst.is_some() {
        Ok(())
    } else {
        Err(Failure::Claim)
    }
}

fn render_comparison(c: &FamilyComparison) -> String {
    let mut s = format!("{:<14}{:<10}{:<10}{}\n", "predicate", "analytic", "numeric", "agree");
    for r in &c.rows {
        let num = r.numerical.map(|b| b.to_string()).unwrap_or_else(|| "n/a".into());
        let agree = if r.agrees() { "yes" } else { "NO  <-- disagreement" };
        writeln!(s, "{:<14}{:<10}{:<10}{}", r.name, r.analytic, num, agree).unwrap();
    }
    if let Some(d) = c.discord {
        writeln!(s, "discord D_A:  {d:.9}").unwrap();
    }
    if let Some(k) = c.commutator_criterion {
        writeln!(s, "commutator:   {k:.3e}").unwrap();
    }
    s
}

fn finish_comparison(ctx: &Ctx, c: &FamilyComparison) -> Result<(), Failure> {
    ctx.emit(&render_comparison(c), c)?;
    if c.disagreements() == 0 {
        Ok(())
    } else {
        Err(Failure::Claim)
    }
}

fn cmd_xstate(ctx: &Ctx, a: &XStateArgs) -> Result<(), Failure> {
    let p = XStateParams {
        a11: a.a11,
        a22: a.a22,
        b11: a.b11,
        b22: a.b22,
        a12: c64(a.a12, a.a12_im),
        b12: c64(a.b12, a.b12_im),
    };
    let c = compare_xstate(&p, &ctx.opt, &ctx.tol)?;
    finish_comparison(ctx, &c)
}

fn cmd_bell(ctx: &Ctx, p: &[f64]) -> Result<(), Failure> {
    if p.len() != 4 {
        return Err(Failure::Input(anyhow::anyhow!("--p needs 4 comma-separated weights, got {}", p.len())));
    }
    let p = BellDiagonalParams::new([p[0], p[1], p[2], p[3]])?;
    let c = compare_bell(&p, &ctx.opt, &ctx.tol)?;
    finish_comparison(ctx, &c)
}

fn cmd_scan(ctx: &Ctx, steps: usize) -> Result<(), Failure> {
    let cfg = ScanConfig {
        steps,
        samples: ctx.g.samples.unwrap_or(0),
        dim_b: ctx.g.dim_b.unwrap_or(2).max(1),
        seed: if ctx.g.samples.unwrap_or(0) > 0 { ctx.seed() } else { ctx.g.seed.unwrap_or(0) },
    };
    let rows = scan_inclusions(&cfg, &ctx.opt, &ctx.tol)?;
    let text = match ctx.g.format {
        Format::Human => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(SCAN_CSV_HEADER).map_err(anyhow::Error::from)?;
            for r in &rows {
                w.write_record(r.csv_record()).map_err(anyhow::Error::from)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?).expect("utf-8")
        }
        Format::Machine => serde_json::to_string_pretty(&rows).map_err(anyhow::Error::from)? + "\n",
    };
    match &ctx.g.output {
        Some(out) => write_file(out, &text)?,
        None => print!("{text}"),
    }
    if rows.iter().all(|r| r.inclusion_violations == 0) {
        Ok(())
    } else {
        eprintln!("inclusion violated on at least one sample");
        Err(Failure::Claim)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = cli.global;
    let tol = Tolerance {
        eps_psd: g.tol_psd,
        eps_residual: g.tol_residual,
        eps_sppt: g.tol_sppt,
        eps_opt: g.tol_discord,
        ..Tolerance::default()
    };
    tol.validate()?;
    let opt = OptimizerConfig {
        grid_theta: g.grid.0,
        grid_phi: g.grid.1,
        ..OptimizerConfig::default()
    };
    let ctx = Ctx { tol, opt, g };
    match &cli.command {
        Command::Analyze { path } => cmd_analyze(&ctx, path),
        Command::VerifyTheorem1 => cmd_theorem1(&ctx),
        Command::Remark3xn => cmd_remark(&ctx),
        Command::Xstate(a) => cmd_xstate(&ctx, a),
        Command::Bell { p } => cmd_bell(&ctx, p),
        Command::ScanInclusions { steps } => cmd_scan(&ctx, *steps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Claim) => ExitCode::from(CLAIM_FAILED),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    };
    std::io::stdout().flush().ok();
    code
}
