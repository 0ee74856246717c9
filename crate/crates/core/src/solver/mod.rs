//! Exact resource-constrained shortest-path fit.
//!
//! Vertices are the distinct price coordinates plus a sink; an arc `(i, h)`
//! is the block covering coordinates `i..h`, costed by its block error. A
//! path of at most `K` arcs whose step values strictly decrease is a
//! feasible curve. Labels `(cost, arcs, last step)` are swept layer by
//! layer in coordinate order, with dominance filtering and pruning against
//! an incumbent upper bound plus per-vertex lower bounds.

pub mod bounds;
pub mod label;
mod search;

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::clustering::build_upper_bound;
use crate::config::FitConfig;
use crate::cost::{CostModel, CostTables};
use crate::curve::{curve_error, sink_coordinate, StepCurve};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::isotonic::{fit_coordinates, pool, suffix_lb_table};

pub use bounds::{cardinality_sp_lb, gap, BoundsReport, CardinalityTable, Status};
pub use label::{dominates, Label, LabelId};

use bounds::report_gap;
use search::{Bounds, Search};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Candidate labels that passed the feasibility and bound tests.
    pub labels_created: u64,
    /// Candidates rejected on insertion plus stored labels they displaced.
    pub labels_dominated: u64,
    /// Extensions cut by the bound test and labels dropped by the
    /// incumbent test.
    pub labels_pruned: u64,
    /// Layers fully swept.
    pub layers_processed: usize,
}

impl AddAssign for SearchStats {
    fn add_assign(&mut self, o: Self) {
        self.labels_created += o.labels_created;
        self.labels_dominated += o.labels_dominated;
        self.labels_pruned += o.labels_pruned;
        self.layers_processed += o.layers_processed;
    }
}

/// Summary of the relaxed first pass of [`try_relaxed_first`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseSummary {
    pub objective: f64,
    pub monotone: bool,
    pub status: Status,
    pub stats: SearchStats,
    #[serde(with = "secs")]
    pub wall_time: Duration,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub curve: StepCurve,
    /// Error of `curve` under the configured loss.
    pub objective: f64,
    pub bounds: BoundsReport,
    pub stats: SearchStats,
    #[serde(with = "secs")]
    pub wall_time: Duration,
    /// Whether `curve` is non-increasing.
    pub monotone: bool,
    pub relaxed_phase: Option<PhaseSummary>,
}

impl FitResult {
    pub fn status(&self) -> Status {
        self.bounds.status
    }
}

#[derive(Clone, Debug)]
struct Seed {
    incumbent: Option<(StepCurve, f64)>,
    lb: f64,
    started: Instant,
    deadline: Option<Instant>,
}

impl Seed {
    fn new(cfg: &FitConfig) -> Self {
        let started = Instant::now();
        Seed {
            incumbent: None,
            lb: 0.0,
            started,
            deadline: cfg.time_limit.map(|d| started + d),
        }
    }
}

/// Solve under `cfg` exactly as configured.
///
/// With `enforce_monotone` the result is the optimal non-increasing curve.
/// Without it, the sweep drops the step-value resource: with the isotonic
/// bound off this is the optimal unconstrained segmentation; with it on,
/// completions are pruned against monotone bounds and the objective is a
/// lower bound on the monotone optimum (and equals it when the returned
/// curve is non-increasing).
pub fn solve(data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    solve_seeded(data, cfg, Seed::new(cfg))
}

fn solve_seeded(data: &Dataset, cfg: &FitConfig, seed: Seed) -> Result<FitResult> {
    cfg.validate()?;
    if min_blocks(data, cfg) > cfg.k {
        return Err(Error::InfeasibleStepMin {
            max_arcs: cfg.k,
            step_min: cfg.step_min,
        });
    }
    let tables = CostTables::new(data, cfg.cost);

    let mut incumbent = seed.incumbent;
    if cfg.use_clustering_ub {
        let (curve, ub) = build_upper_bound(data, cfg)?;
        if incumbent.as_ref().is_none_or(|(_, v)| ub < *v) {
            incumbent = Some((curve, ub));
        }
    }
    let ub0 = incumbent.as_ref().map(|(_, v)| *v);

    let suffix_iso = cfg.isotonic_lb_active().then(|| suffix_lb_table(data));
    let cardinality = if cfg.use_relaxed_lb {
        Some(cardinality_sp_lb(data, cfg)?)
    } else {
        None
    };

    let mut lb0 = seed.lb;
    if cfg.enforce_monotone && cfg.cost == CostModel::L2 {
        let iso = suffix_iso
            .as_ref()
            .map_or_else(|| fit_coordinates(data, 0).1, |t| t[0]);
        lb0 = lb0.max(iso);
    }
    if let Some(t) = &cardinality {
        lb0 = lb0.max(t.get(0, cfg.k));
    }
    if let Some(ub) = ub0 {
        lb0 = lb0.min(ub);
    }

    let outcome = Search {
        data,
        cfg,
        tables,
        bounds: Bounds {
            suffix_iso: suffix_iso.as_deref(),
            cardinality: cardinality.as_ref(),
        },
        incumbent: ub0.unwrap_or(f64::INFINITY),
        deadline: seed.deadline,
    }
    .run();

    let mut best = match outcome.curve(data, &tables, cfg.step_min) {
        Some(curve) => {
            let err = curve_error(data, &curve, cfg.cost)?;
            debug_assert!((err - outcome.incumbent).abs() <= 1e-9 * err.max(1.0));
            Some((curve, err))
        }
        None => incumbent,
    };
    // An interrupted search without the clustering bound may hold nothing,
    // or something worse than it.
    if outcome.status == Status::TimeLimit && !cfg.use_clustering_ub {
        let fallback = build_upper_bound(data, cfg)?;
        if best.as_ref().is_none_or(|(_, v)| fallback.1 < *v) {
            best = Some(fallback);
        }
    }
    let (curve, objective) = match best {
        Some(found) => found,
        None => build_upper_bound(data, cfg)?,
    };

    let best_lb_final = match outcome.status {
        Status::Optimal => objective,
        Status::TimeLimit => lb0.max(outcome.frontier).min(objective),
    };
    Ok(FitResult {
        monotone: curve.is_non_increasing(),
        curve,
        objective,
        bounds: BoundsReport {
            ub0,
            lb0,
            gap0: report_gap(ub0, lb0),
            best_lb_final,
            status: outcome.status,
        },
        stats: outcome.stats,
        wall_time: seed.started.elapsed(),
        relaxed_phase: None,
    })
}

/// Solve the relaxed problem first (with the isotonic bound), and certify
/// its curve when it is already non-increasing. Otherwise rerun with
/// monotonicity enforced, seeded with the better of the clustering bound
/// and a monotone repair of the relaxed curve, and with the relaxed
/// objective as the initial lower bound.
pub fn try_relaxed_first(data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    let seed = Seed::new(cfg);
    let relaxed_cfg = cfg.clone().with_monotone(false);
    let first = solve_seeded(data, &relaxed_cfg, seed.clone())?;
    let summary = PhaseSummary {
        objective: first.objective,
        monotone: first.monotone,
        status: first.status(),
        stats: first.stats,
        wall_time: first.wall_time,
    };
    let relaxed_lb = match first.status() {
        Status::Optimal => first.objective,
        Status::TimeLimit => first.bounds.best_lb_final,
    };

    if first.status() == Status::Optimal && first.monotone {
        let iso = if cfg.cost == CostModel::L2 {
            fit_coordinates(data, 0).1
        } else {
            0.0
        };
        let ub0 = first.bounds.ub0;
        let mut lb0 = iso.max(relaxed_lb);
        if let Some(ub) = ub0 {
            lb0 = lb0.min(ub);
        }
        return Ok(FitResult {
            bounds: BoundsReport {
                ub0,
                lb0,
                gap0: report_gap(ub0, lb0),
                ..first.bounds
            },
            relaxed_phase: Some(summary),
            wall_time: seed.started.elapsed(),
            ..first
        });
    }

    let monotone_cfg = cfg.clone().with_monotone(true);
    let repair = monotone_repair(data, &monotone_cfg, &first.curve)?;
    let second = solve_seeded(
        data,
        &monotone_cfg,
        Seed {
            incumbent: repair,
            lb: relaxed_lb,
            ..seed.clone()
        },
    )?;
    Ok(FitResult {
        relaxed_phase: Some(summary),
        wall_time: seed.started.elapsed(),
        ..second
    })
}

/// Pool the blocks of `curve` into a non-increasing curve over the same
/// breakpoints. `None` when the representatives of the pooled blocks are
/// not non-increasing under a non-squared loss.
fn monotone_repair(
    data: &Dataset,
    cfg: &FitConfig,
    curve: &StepCurve,
) -> Result<Option<(StepCurve, f64)>> {
    let m = data.coordinate_count();
    let mut items = Vec::with_capacity(m);
    for v in 0..m {
        let (a, b) = data.vertex_span(v, v + 1);
        items.push((curve.evaluate(data.vertex_p(v))?, (b - a) as f64));
    }
    let pooled = pool(items);
    let tables = CostTables::new(data, cfg.cost);
    let mut values: Vec<f64> = pooled
        .iter()
        .map(|b| tables.arc(b.start, b.start + b.len).0)
        .collect();
    if !values.windows(2).all(|w| w[0] >= w[1]) {
        if cfg.cost != CostModel::L2 {
            return Ok(None);
        }
        values = pooled.iter().map(|b| b.value).collect();
    }
    let mut breakpoints: Vec<f64> = pooled.iter().map(|b| data.vertex_p(b.start)).collect();
    breakpoints.push(sink_coordinate(data, cfg.step_min));
    let repaired = StepCurve::new(breakpoints, values)?;
    let err = curve_error(data, &repaired, cfg.cost)?;
    Ok(Some((repaired, err)))
}

/// Fewest blocks of any admissible path, `usize::MAX` if none exists.
fn min_blocks(data: &Dataset, cfg: &FitConfig) -> usize {
    let m = data.coordinate_count();
    let p: Vec<f64> = (0..m).map(|v| data.vertex_p(v)).collect();
    let last_p = data.last_p();
    let mut need = vec![usize::MAX; m];
    let mut suffix_min = vec![usize::MAX; m + 1];
    for v in (0..m).rev() {
        let first = v + 1 + p[v + 1..].partition_point(|&q| !cfg.interior_ok(p[v], q));
        let via = suffix_min[first].saturating_add(1);
        need[v] = if cfg.last_ok(p[v], last_p) { 1 } else { via };
        suffix_min[v] = need[v].min(suffix_min[v + 1]);
    }
    need[0]
}

/// Bound configuration of the three benchmarked search variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// No bounds.
    Raw,
    /// Clustering upper bound and isotonic suffix lower bounds.
    Iso,
    /// Relaxed pass first, then `Iso` when the relaxed curve is not
    /// non-increasing.
    Rlx,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Raw, Strategy::Iso, Strategy::Rlx];

    /// Set the bound toggles of `cfg` for this strategy.
    pub fn configure(self, cfg: FitConfig) -> FitConfig {
        match self {
            Strategy::Raw => cfg.with_bounds(false, false, false),
            Strategy::Iso | Strategy::Rlx => cfg.with_bounds(true, false, true),
        }
    }

    /// Run with `cfg` as given (toggles untouched).
    pub fn run(self, data: &Dataset, cfg: &FitConfig) -> Result<FitResult> {
        match self {
            Strategy::Rlx => try_relaxed_first(data, cfg),
            Strategy::Raw | Strategy::Iso => solve(data, cfg),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Raw => "raw",
            Strategy::Iso => "iso",
            Strategy::Rlx => "rlx",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Strategy::Raw),
            "iso" => Ok(Strategy::Iso),
            "rlx" => Ok(Strategy::Rlx),
            _ => Err(Error::InvalidConfig(format!(
                "unknown strategy {s:?}; expected iso, rlx or raw"
            ))),
        }
    }
}

/// Configure `cfg` for `strategy` and run it.
pub fn fit(data: &Dataset, cfg: &FitConfig, strategy: Strategy) -> Result<FitResult> {
    strategy.run(data, &strategy.configure(cfg.clone()))
}

pub(crate) mod secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_secs_f64(f64::deserialize(d)?))
    }
}
