//! The labeling sweep over the forward DAG of price coordinates.

use std::time::Instant;

use crate::config::FitConfig;
use crate::cost::CostTables;
use crate::curve::{sink_coordinate, StepCurve};
use crate::data::Dataset;

use super::bounds::{CardinalityTable, Status};
use super::label::{Entry, Insert, Label, LabelId, LabelStore};
use super::SearchStats;

/// How often (in extracted labels) the deadline is polled.
const DEADLINE_POLL: usize = 256;

pub(crate) struct Bounds<'t> {
    pub suffix_iso: Option<&'t [f64]>,
    pub cardinality: Option<&'t CardinalityTable>,
}

impl Bounds<'_> {
    /// Lower bound on completing from `vertex` after `arcs` arcs.
    #[inline]
    fn completion(&self, vertex: usize, arcs: usize, k: usize) -> f64 {
        let iso = self.suffix_iso.map_or(0.0, |t| t[vertex]);
        let card = self.cardinality.map_or(0.0, |t| t.get(vertex, k - arcs));
        iso.max(card)
    }
}

pub(crate) struct Outcome {
    /// Last label of the best path found by the sweep, with the vertex it
    /// completes from. `None` when nothing beat the initial incumbent.
    pub best: Option<LabelId>,
    pub incumbent: f64,
    pub status: Status,
    /// Lower bound from the open labels at interruption (`+inf` when the
    /// search ran to completion or no labels were open).
    pub frontier: f64,
    pub stats: SearchStats,
    arena: Vec<Label>,
}

pub(crate) struct Search<'a> {
    pub data: &'a Dataset,
    pub cfg: &'a FitConfig,
    pub tables: CostTables<'a>,
    pub bounds: Bounds<'a>,
    pub incumbent: f64,
    pub deadline: Option<Instant>,
}

impl Search<'_> {
    pub(crate) fn run(self) -> Outcome {
        let data = self.data;
        let cfg = self.cfg;
        let k = cfg.k;
        let m = data.coordinate_count();
        let monotone = cfg.enforce_monotone;
        let p: Vec<f64> = (0..m).map(|v| data.vertex_p(v)).collect();
        let last_p = data.last_p();
        let first_ext: Vec<usize> = (0..m)
            .map(|v| v + 1 + p[v + 1..].partition_point(|&q| !cfg.interior_ok(p[v], q)))
            .collect();

        let mut stats = SearchStats::default();
        let mut arena: Vec<Label> = Vec::new();
        let mut store = LabelStore::new(m, k);
        let mut inc = self.incumbent;
        let mut best: Option<LabelId> = None;

        let start_step = if monotone {
            data.max_x() + 1.0
        } else {
            f64::INFINITY
        };
        arena.push(Label {
            cost: 0.0,
            arcs: 0,
            step: start_step,
            pred: None,
            arc: (0, 0),
        });
        store.insert(0, 0, 0.0, start_step, 0);
        stats.labels_created += 1;

        let expired = |d: Option<Instant>| d.is_some_and(|d| Instant::now() >= d);
        let mut polled = 0usize;

        for i in 0..m {
            let mut layer = store.take(i);
            layer.sort_by(|a, b| {
                a.cost
                    .total_cmp(&b.cost)
                    .then(b.step.total_cmp(&a.step))
                    .then(arena[a.id as usize].arcs.cmp(&arena[b.id as usize].arcs))
                    .then(a.id.cmp(&b.id))
            });
            let finish_ok = cfg.last_ok(p[i], last_p);
            let (finish_value, finish_err) = self.tables.arc(i, m);

            for (pos, entry) in layer.iter().enumerate() {
                polled += 1;
                if polled % DEADLINE_POLL == 1 && expired(self.deadline) {
                    let frontier = frontier(&self.bounds, k, &arena, &layer[pos..], i, &store, inc);
                    stats.layers_processed = i;
                    return Outcome {
                        best,
                        incumbent: inc,
                        status: Status::TimeLimit,
                        frontier,
                        stats,
                        arena,
                    };
                }
                let label = arena[entry.id as usize];
                if label.cost > inc {
                    stats.labels_pruned += (layer.len() - pos) as u64;
                    break;
                }
                if finish_ok
                    && label.cost + finish_err < inc
                    && (!monotone || finish_value < label.step)
                {
                    inc = label.cost + finish_err;
                    best = Some(entry.id);
                }
                if label.arcs + 1 >= k {
                    continue;
                }
                for h in first_ext[i]..m {
                    let (value, err) = self.tables.arc(i, h);
                    if monotone && value >= label.step {
                        continue;
                    }
                    let cost = label.cost + err;
                    if cost + self.bounds.completion(h, label.arcs + 1, k) >= inc {
                        stats.labels_pruned += 1;
                        continue;
                    }
                    let id = arena.len() as LabelId;
                    let step = if monotone { value } else { f64::INFINITY };
                    stats.labels_created += 1;
                    match store.insert(h, label.arcs + 1, cost, step, id) {
                        Insert::Rejected => stats.labels_dominated += 1,
                        Insert::Accepted { removed } => {
                            stats.labels_dominated += removed as u64;
                            arena.push(Label {
                                cost,
                                arcs: label.arcs + 1,
                                step,
                                pred: Some(entry.id),
                                arc: (i, h),
                            });
                        }
                    }
                }
            }
        }
        stats.layers_processed = m;
        Outcome {
            best,
            incumbent: inc,
            status: Status::Optimal,
            frontier: f64::INFINITY,
            stats,
            arena,
        }
    }
}

/// Smallest bound-extended cost over labels still open when the sweep
/// stopped at layer `layer`: the unprocessed rest of that layer and
/// everything stored further right.
fn frontier(
    bounds: &Bounds<'_>,
    k: usize,
    arena: &[Label],
    rest_of_layer: &[Entry],
    layer: usize,
    store: &LabelStore,
    incumbent: f64,
) -> f64 {
    let here = rest_of_layer.iter().map(|e| (layer, e));
    let later = store.open_from(layer + 1);
    here.chain(later)
        .map(|(v, e)| e.cost + bounds.completion(v, arena[e.id as usize].arcs, k))
        .fold(incumbent, f64::min)
}

impl Outcome {
    /// Rebuild the curve of the best path, block values and all.
    pub(crate) fn curve(
        &self,
        data: &Dataset,
        tables: &CostTables<'_>,
        step_min: f64,
    ) -> Option<StepCurve> {
        let m = data.coordinate_count();
        let mut starts = Vec::new();
        let mut cur = Some(self.best?);
        while let Some(id) = cur {
            let label = &self.arena[id as usize];
            starts.push(label.arc.1);
            cur = label.pred;
        }
        starts.reverse();
        debug_assert_eq!(starts.first(), Some(&0));
        let mut ends = starts[1..].to_vec();
        ends.push(m);
        let values = starts
            .iter()
            .zip(&ends)
            .map(|(&a, &b)| tables.arc(a, b).0)
            .collect();
        let mut breakpoints: Vec<f64> = starts.iter().map(|&v| data.vertex_p(v)).collect();
        breakpoints.push(sink_coordinate(data, step_min));
        Some(
            StepCurve::new(breakpoints, values)
                .expect("vertex coordinates are strictly increasing"),
        )
    }
}
