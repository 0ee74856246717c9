//! Lower bounds, optimality gap and the bounds summary of a run.

use serde::{Deserialize, Serialize};

use crate::config::FitConfig;
use crate::cost::CostTables;
use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    TimeLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Initial upper bound; `None` when no feasible curve seeded the search.
    pub ub0: Option<f64>,
    /// Initial global lower bound.
    pub lb0: f64,
    /// `(ub0 - lb0) / lb0 * 100`; `None` without an upper bound or with a
    /// zero lower bound and a positive upper bound.
    pub gap0: Option<f64>,
    /// Best lower bound known at termination.
    pub best_lb_final: f64,
    pub status: Status,
}

/// Relative gap in percent.
pub fn gap(ub: f64, lb: f64) -> Result<f64> {
    if lb > 0.0 {
        Ok((ub - lb) / lb * 100.0)
    } else {
        Err(Error::NonPositiveLB { lb })
    }
}

/// Reported gap: zero when both bounds are zero.
pub(crate) fn report_gap(ub: Option<f64>, lb: f64) -> Option<f64> {
    match ub {
        Some(ub) if ub <= lb => Some(0.0),
        Some(ub) => gap(ub, lb).ok(),
        None => None,
    }
}

/// Shortest-path costs to the sink using at most `r` arcs, ignoring
/// monotonicity.
#[derive(Clone, Debug)]
pub struct CardinalityTable {
    /// `rows[r][v]`
    rows: Vec<Vec<f64>>,
}

impl CardinalityTable {
    /// Minimum completion cost from `vertex` with at most `remaining` arcs;
    /// `+inf` when no admissible completion exists.
    #[inline]
    pub fn get(&self, vertex: usize, remaining: usize) -> f64 {
        self.rows[remaining.min(self.rows.len() - 1)][vertex]
    }

    pub fn max_arcs(&self) -> usize {
        self.rows.len() - 1
    }
}

/// Backward dynamic program over the remaining arc budget, `O(K·I²)`.
/// Arcs that violate the minimum step length are left out.
pub fn cardinality_sp_lb(data: &Dataset, cfg: &FitConfig) -> Result<CardinalityTable> {
    cfg.validate()?;
    let m = data.coordinate_count();
    let tables = CostTables::new(data, cfg.cost);
    let last_p = data.last_p();
    let p: Vec<f64> = (0..m).map(|v| data.vertex_p(v)).collect();

    // completion costs are reused for every budget
    let finish: Vec<f64> = (0..m)
        .map(|v| {
            if cfg.last_ok(p[v], last_p) {
                tables.arc(v, m).1
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let first_ext: Vec<usize> = (0..m)
        .map(|v| v + 1 + p[v + 1..].partition_point(|&q| !cfg.interior_ok(p[v], q)))
        .collect();

    let mut rows = Vec::with_capacity(cfg.k + 1);
    let mut zero = vec![f64::INFINITY; m + 1];
    zero[m] = 0.0;
    rows.push(zero);
    for r in 1..=cfg.k {
        let prev = &rows[r - 1];
        let mut row = vec![0.0; m + 1];
        for v in 0..m {
            let mut best = prev[v].min(finish[v]);
            if r > 1 {
                for (h, &rest) in prev.iter().enumerate().take(m).skip(first_ext[v]) {
                    if rest < best {
                        let c = tables.arc(v, h).1 + rest;
                        if c < best {
                            best = c;
                        }
                    }
                }
            }
            row[v] = best;
        }
        rows.push(row);
    }
    if !rows[cfg.k][0].is_finite() {
        return Err(Error::InfeasibleCardinality {
            vertex: 0,
            arcs: cfg.k,
        });
    }
    Ok(CardinalityTable { rows })
}
