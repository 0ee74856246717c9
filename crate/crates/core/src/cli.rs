//! The `stepfit` command line.
//!
//! Exit codes: 0 when every fit is optimal, 2 when a time limit stopped a
//! fit (the report is still written), 1 on any error.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::build_upper_bound;
use crate::config::FitConfig;
use crate::cost::CostModel;
use crate::data::{Dataset, DuplicatePolicy};
use crate::datagen::{generate, GenConfig, Sampling};
use crate::error::{Error, Result};
use crate::isotonic::suffix_lb_table;
use crate::oracle::{check_agreement, AgreementConfig};
use crate::report::{FitReport, InputDigest};
use crate::solver::bounds::report_gap;
use crate::solver::{solve, FitResult, Status, Strategy};

#[derive(Debug, Parser)]
#[command(
    name = "stepfit",
    version,
    about = "Exact segmented isotonic regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a monotone step curve and write a JSON report.
    Fit(FitArgs),
    /// Print the initial bounds and gap without running the exact search.
    Bounds(BoundsArgs),
    /// Write a synthetic dataset as CSV.
    Gen(GenArgs),
    /// Check the solver against brute-force enumeration on random instances.
    #[command(alias = "oracle-check")]
    Oracle(OracleArgs),
    /// Run a parameter sweep on synthetic data and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Input CSV with columns p,x; `-` reads standard input.
    pub input: PathBuf,
    /// Maximum number of steps.
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub step_min: f64,
    /// l2, l1 or quantile:TAU.
    #[arg(long, default_value_t = CostModel::L2)]
    pub loss: CostModel,
    /// Apply --step-min to the last step too.
    #[arg(long)]
    pub strict_last_block: bool,
    /// Keep repeated prices as observations of one coordinate instead of
    /// rejecting the file.
    #[arg(long)]
    pub merge_duplicates: bool,
}

impl ProblemArgs {
    fn load(&self) -> Result<Dataset> {
        let policy = if self.merge_duplicates {
            DuplicatePolicy::Merge
        } else {
            DuplicatePolicy::Reject
        };
        if self.input.as_os_str() == "-" {
            let mut buf = Vec::new();
            io::stdin().read_to_end(&mut buf)?;
            Dataset::read_csv(buf.as_slice(), policy)
        } else {
            Dataset::open_csv(&self.input, policy)
        }
    }

    fn config(&self) -> FitConfig {
        FitConfig::new(self.k)
            .with_step_min(self.step_min)
            .with_cost(self.loss)
            .with_strict_last_block(self.strict_last_block)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = StrategyArg::Iso)]
    pub strategy: StrategyArg,
    /// Disable the clustering upper bound.
    #[arg(long)]
    pub no_ub: bool,
    /// Disable the isotonic lower bounds.
    #[arg(long)]
    pub no_iso_lb: bool,
    /// Enable the cardinality shortest-path lower bounds.
    #[arg(long)]
    pub relaxed_lb: bool,
    /// Solve the unconstrained segmentation problem (no monotonicity).
    #[arg(long)]
    pub no_monotone: bool,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write a two-column `p value` trace of the fitted curve.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Iso,
    Rlx,
    Raw,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Iso => Strategy::Iso,
            StrategyArg::Rlx => Strategy::Rlx,
            StrategyArg::Raw => Strategy::Raw,
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    /// Also solve the unconstrained problem and report its objective.
    #[arg(long)]
    pub with_relaxed: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Number of observations.
    #[arg(long)]
    pub i: usize,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = SamplingArg::Grid)]
    pub sampling: SamplingArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    Grid,
    Uniform,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Largest K drawn.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Largest instance size drawn.
    #[arg(long, default_value_t = 12)]
    pub max_i: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub sweep: Sweep,
    /// Comma-separated values of the swept parameter.
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<f64>,
    /// Instance size when not swept.
    #[arg(long, default_value_t = 200)]
    pub i: usize,
    /// Noise level when not swept.
    #[arg(long, default_value_t = 5.0)]
    pub sigma: f64,
    /// Step count when not swept.
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub step_min: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Strategies to run; all three by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub strategy: Vec<StrategyArg>,
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sweep {
    Noise,
    Size,
    K,
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(status) => ExitCode::from(exit_code(status)),
        Err(e) => {
            eprintln!("stepfit: {e}");
            ExitCode::from(1)
        }
    }
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Optimal => 0,
        Status::TimeLimit => 2,
    }
}

pub fn run(cli: Cli) -> Result<Status> {
    match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn time_limit(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s)
            .map_err(|_| Error::InvalidConfig(format!("invalid time limit {s}")))
    })
    .transpose()
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_fit(a: &FitArgs) -> Result<Status> {
    let data = a.problem.load()?;
    let strategy = Strategy::from(a.strategy);
    let mut cfg = strategy
        .configure(a.problem.config())
        .with_time_limit(time_limit(a.time_limit)?);
    cfg.use_clustering_ub &= !a.no_ub;
    cfg.use_isotonic_lb &= !a.no_iso_lb;
    cfg.use_relaxed_lb |= a.relaxed_lb;
    let result = if a.no_monotone {
        // Isotonic bounds are only valid for the monotone problem.
        cfg.enforce_monotone = false;
        cfg.use_isotonic_lb = false;
        solve(&data, &cfg)?
    } else {
        strategy.run(&data, &cfg)?
    };
    if let Some(path) = &a.plot {
        std::fs::write(path, result.curve.plot_trace())?;
    }
    eprintln!(
        "{:?}: objective {} with {} steps, {} labels, {:.3}s",
        result.status(),
        result.objective,
        result.curve.num_blocks(),
        result.stats.labels_created,
        result.wall_time.as_secs_f64()
    );
    let status = result.status();
    let source = a.problem.input.to_string_lossy().into_owned();
    let report = FitReport::new(InputDigest::of(&data, Some(source)), cfg, strategy, result);
    let mut out = output(a.out.as_deref())?;
    report.write_json(&mut out)?;
    out.flush()?;
    Ok(status)
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Status> {
    let data = a.problem.load()?;
    let cfg = a.problem.config();
    cfg.validate()?;
    let (_, ub0) = build_upper_bound(&data, &cfg)?;
    let mut out = io::stdout().lock();
    writeln!(out, "ub0 {ub0}")?;
    let mut lb: f64 = 0.0;
    if cfg.cost == CostModel::L2 {
        let lb_iso = suffix_lb_table(&data)[0];
        writeln!(out, "lb_iso {lb_iso}")?;
        lb = lb.max(lb_iso);
    }
    if a.with_relaxed {
        let relaxed = cfg
            .clone()
            .with_monotone(false)
            .with_bounds(false, false, true);
        let lb_relaxed = solve(&data, &relaxed)?.objective;
        writeln!(out, "lb_relaxed {lb_relaxed}")?;
        lb = lb.max(lb_relaxed);
    }
    match report_gap(Some(ub0), lb) {
        Some(g) => writeln!(out, "gap0 {g:.2}")?,
        None => writeln!(out, "gap0 inf")?,
    }
    Ok(Status::Optimal)
}

fn cmd_gen(a: &GenArgs) -> Result<Status> {
    let sampling = match a.sampling {
        SamplingArg::Grid => Sampling::Grid,
        SamplingArg::Uniform => Sampling::Uniform,
    };
    let data = generate(&GenConfig::new(a.i, a.sigma, a.seed).with_sampling(sampling))?;
    let mut out = output(a.out.as_deref())?;
    data.write_csv(&mut out)?;
    out.flush()?;
    Ok(Status::Optimal)
}

fn cmd_oracle(a: &OracleArgs) -> Result<Status> {
    let cfg = AgreementConfig {
        instances: a.instances,
        max_i: a.max_i,
        max_k: a.k,
        seed: a.seed,
        ..Default::default()
    };
    let report = check_agreement(&cfg)?;
    for m in &report.mismatches {
        println!(
            "mismatch instance {} {}: solver {} oracle {}",
            m.instance, m.variant, m.solver, m.oracle
        );
    }
    println!(
        "{} comparisons, {} mismatches",
        report.comparisons,
        report.mismatches.len()
    );
    if report.mismatches.is_empty() {
        Ok(Status::Optimal)
    } else {
        Err(Error::InvalidConfig(format!(
            "{} oracle mismatches",
            report.mismatches.len()
        )))
    }
}

#[derive(Debug, Serialize)]
struct BenchRow {
    sweep: &'static str,
    i: usize,
    sigma: f64,
    k: usize,
    step_min: f64,
    seed: u64,
    strategy: String,
    status: &'static str,
    objective: f64,
    ub0: Option<f64>,
    lb0: f64,
    gap0: Option<f64>,
    best_lb_final: f64,
    blocks: usize,
    labels_created: u64,
    labels_dominated: u64,
    labels_pruned: u64,
    wall_time_s: f64,
}

/// Worker count for `bench`, from `STEPFIT_THREADS` if set.
fn bench_threads() -> Result<usize> {
    match std::env::var("STEPFIT_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::InvalidConfig(format!(
                "STEPFIT_THREADS must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn cmd_bench(a: &BenchArgs) -> Result<Status> {
    let values = if a.values.is_empty() {
        match a.sweep {
            Sweep::Noise => vec![0.0, 1.0, 2.0, 5.0, 10.0],
            Sweep::Size => vec![50.0, 100.0, 200.0, 400.0],
            Sweep::K => (1..=8).map(f64::from).collect(),
        }
    } else {
        a.values.clone()
    };
    let strategies: Vec<Strategy> = if a.strategy.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        a.strategy.iter().map(|&s| s.into()).collect()
    };
    let limit = time_limit(a.time_limit)?;
    let mut cells = Vec::new();
    for &v in &values {
        let (i, sigma, k) = match a.sweep {
            Sweep::Noise => (a.i, v, a.k),
            Sweep::Size => (v as usize, a.sigma, a.k),
            Sweep::K => (a.i, a.sigma, v as usize),
        };
        for &s in &strategies {
            cells.push((i, sigma, k, s));
        }
    }
    let sweep = match a.sweep {
        Sweep::Noise => "noise",
        Sweep::Size => "size",
        Sweep::K => "k",
    };
    let run_cell = |&(i, sigma, k, s): &(usize, f64, usize, Strategy)| -> Result<BenchRow> {
        let data = generate(&GenConfig::new(i, sigma, a.seed))?;
        let cfg = FitConfig::new(k)
            .with_step_min(a.step_min)
            .with_time_limit(limit);
        let r: FitResult = crate::solver::fit(&data, &cfg, s)?;
        Ok(BenchRow {
            sweep,
            i,
            sigma,
            k,
            step_min: a.step_min,
            seed: a.seed,
            strategy: s.to_string(),
            status: match r.status() {
                Status::Optimal => "optimal",
                Status::TimeLimit => "time_limit",
            },
            objective: r.objective,
            ub0: r.bounds.ub0,
            lb0: r.bounds.lb0,
            gap0: r.bounds.gap0,
            best_lb_final: r.bounds.best_lb_final,
            blocks: r.curve.num_blocks(),
            labels_created: r.stats.labels_created,
            labels_dominated: r.stats.labels_dominated,
            labels_pruned: r.stats.labels_pruned,
            wall_time_s: r.wall_time.as_secs_f64(),
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(bench_threads()?)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let rows = pool.install(|| cells.par_iter().map(run_cell).collect::<Result<Vec<_>>>())?;
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    let mut status = Status::Optimal;
    for row in &rows {
        if row.status == "time_limit" {
            status = Status::TimeLimit;
        }
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(status)
}
