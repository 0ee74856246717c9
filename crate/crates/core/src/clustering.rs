//! Contiguity-constrained agglomerative clustering and the feasible
//! upper-bound curve built from it.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::config::FitConfig;
use crate::cost::{CostModel, CostTables};
use crate::curve::{curve_error, sink_coordinate, StepCurve};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::isotonic::fit_coordinates;

/// Contiguous clusters over an index range.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjacentPartition {
    /// `boundaries[c]..boundaries[c + 1]` are the members of cluster `c`.
    pub boundaries: Vec<usize>,
    /// Mean of each cluster's members.
    pub values: Vec<f64>,
}

impl AdjacentPartition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Greedily merge the adjacent pair with the smallest increase in
/// within-cluster squared error until at most `k` clusters remain. Ties go
/// to the leftmost pair.
pub fn adjacency_cluster(values: &[f64], k: usize) -> Result<AdjacentPartition> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let items: Vec<(f64, f64)> = values.iter().map(|&v| (v, 1.0)).collect();
    Ok(cluster_weighted(&items, k.max(1)))
}

#[derive(Clone, Copy)]
struct Cluster {
    sum: f64,
    weight: f64,
    start: usize,
    prev: Option<usize>,
    next: Option<usize>,
    version: u32,
    alive: bool,
}

impl Cluster {
    fn mean(&self) -> f64 {
        self.sum / self.weight
    }
}

#[derive(PartialEq)]
struct Candidate {
    cost: f64,
    start: usize,
    left: usize,
    left_version: u32,
    right_version: u32,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then(self.start.cmp(&other.start))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn merge_cost(a: &Cluster, b: &Cluster) -> f64 {
    let d = a.mean() - b.mean();
    a.weight * b.weight / (a.weight + b.weight) * d * d
}

/// Weighted variant over `(value, weight)` items.
pub(crate) fn cluster_weighted(items: &[(f64, f64)], k: usize) -> AdjacentPartition {
    let n = items.len();
    let mut clusters: Vec<Cluster> = items
        .iter()
        .enumerate()
        .map(|(i, &(v, w))| Cluster {
            sum: v * w,
            weight: w,
            start: i,
            prev: i.checked_sub(1),
            next: (i + 1 < n).then_some(i + 1),
            version: 0,
            alive: true,
        })
        .collect();
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Reverse<Candidate>>, cs: &[Cluster], left: usize| {
        if let Some(right) = cs[left].next {
            heap.push(Reverse(Candidate {
                cost: merge_cost(&cs[left], &cs[right]),
                start: cs[left].start,
                left,
                left_version: cs[left].version,
                right_version: cs[right].version,
            }));
        }
    };
    for i in 0..n {
        push(&mut heap, &clusters, i);
    }
    let mut remaining = n;
    while remaining > k {
        let Reverse(c) = heap
            .pop()
            .expect("a mergeable pair exists while clusters > k");
        let left = c.left;
        let Some(right) = clusters[left].next else {
            continue;
        };
        if !clusters[left].alive
            || clusters[left].version != c.left_version
            || clusters[right].version != c.right_version
        {
            continue;
        }
        let r = clusters[right];
        let l = &mut clusters[left];
        l.sum += r.sum;
        l.weight += r.weight;
        l.next = r.next;
        l.version += 1;
        clusters[right].alive = false;
        if let Some(nn) = r.next {
            clusters[nn].prev = Some(left);
        }
        remaining -= 1;
        push(&mut heap, &clusters, left);
        if let Some(p) = clusters[left].prev {
            push(&mut heap, &clusters, p);
        }
    }

    let mut boundaries = Vec::with_capacity(remaining + 1);
    let mut values = Vec::with_capacity(remaining);
    let mut cur = Some(0);
    while let Some(c) = cur {
        boundaries.push(clusters[c].start);
        // an unmerged cluster keeps its input value exactly
        values.push(if clusters[c].version == 0 {
            items[c].0
        } else {
            clusters[c].mean()
        });
        cur = clusters[c].next;
    }
    boundaries.push(n);
    AdjacentPartition { boundaries, values }
}

/// Feasible non-increasing curve with at most `cfg.k` blocks and its error
/// against the data: isotonic fit, compressed by adjacency clustering.
///
/// When a block violates `step_min`, or (for non-squared losses) the block
/// representatives are not non-increasing, the number of clusters is
/// lowered until a feasible curve appears.
pub fn build_upper_bound(data: &Dataset, cfg: &FitConfig) -> Result<(StepCurve, f64)> {
    cfg.validate()?;
    let m = data.coordinate_count();
    let (iso_blocks, _) = fit_coordinates(data, 0);
    let items: Vec<(f64, f64)> = iso_blocks
        .iter()
        .map(|b| {
            let (a, e) = data.vertex_span(b.start, b.start + b.len);
            (b.value, (e - a) as f64)
        })
        .collect();
    let tables = CostTables::new(data, cfg.cost);
    let sink = sink_coordinate(data, cfg.step_min);
    let last_p = data.last_p();

    for target in (1..=cfg.k.min(items.len())).rev() {
        let part = cluster_weighted(&items, target);
        let starts: Vec<usize> = part.boundaries[..part.len()]
            .iter()
            .map(|&c| iso_blocks[c].start)
            .collect();
        // Merged means of a non-increasing sequence are non-increasing up
        // to rounding; clamp that away.
        let mut values = part.values;
        for c in 1..values.len() {
            values[c] = values[c].min(values[c - 1]);
        }
        let feasible_lengths = starts
            .windows(2)
            .all(|w| cfg.interior_ok(data.vertex_p(w[0]), data.vertex_p(w[1])))
            && cfg.last_ok(data.vertex_p(*starts.last().unwrap()), last_p);
        if !feasible_lengths {
            continue;
        }
        if cfg.cost != CostModel::L2 {
            let mut ends = starts[1..].to_vec();
            ends.push(m);
            values = starts
                .iter()
                .zip(&ends)
                .map(|(&a, &b)| tables.arc(a, b).0)
                .collect();
            if !values.windows(2).all(|w| w[0] >= w[1]) {
                continue;
            }
        }
        let mut breakpoints: Vec<f64> = starts.iter().map(|&v| data.vertex_p(v)).collect();
        breakpoints.push(sink);
        let curve = StepCurve::new(breakpoints, values)?;
        let err = curve_error(data, &curve, cfg.cost)?;
        return Ok((curve, err));
    }
    Err(Error::InfeasibleStepMin {
        max_arcs: cfg.k,
        step_min: cfg.step_min,
    })
}
