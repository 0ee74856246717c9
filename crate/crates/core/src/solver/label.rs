//! Labels of partial paths and the per-vertex store of non-dominated ones.

use serde::{Deserialize, Serialize};

/// Index of a label in the search arena.
pub type LabelId = u32;

/// State of a partial path ending at `arc.1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    /// Accumulated error.
    pub cost: f64,
    /// Number of arcs (blocks) used.
    pub arcs: usize,
    /// Step value of the last block. Irrelevant (`+inf`) without the
    /// monotonicity resource.
    pub step: f64,
    pub pred: Option<LabelId>,
    /// `(origin, destination)` vertices of the last arc.
    pub arc: (usize, usize),
}

/// `a` is no worse than `b` in cost, arcs and last step, and strictly
/// better in at least one.
pub fn dominates(a: &Label, b: &Label) -> bool {
    a.cost <= b.cost
        && a.arcs <= b.arcs
        && a.step >= b.step
        && (a.cost < b.cost || a.arcs < b.arcs || a.step > b.step)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Entry {
    pub step: f64,
    pub cost: f64,
    pub id: LabelId,
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Insert {
    Rejected,
    Accepted { removed: usize },
}

/// Non-dominated labels per vertex.
///
/// Labels at a vertex are bucketed by arc count. Each bucket is a Pareto
/// front sorted by ascending step value, along which cost strictly
/// increases, so dominance checks are binary searches.
#[derive(Debug)]
pub(crate) struct LabelStore {
    fronts: Vec<Vec<Vec<Entry>>>,
    buckets: usize,
    processed: Option<usize>,
}

impl LabelStore {
    pub(crate) fn new(vertices: usize, buckets: usize) -> Self {
        LabelStore {
            fronts: vec![Vec::new(); vertices],
            buckets,
            processed: None,
        }
    }

    /// Insert unless weakly dominated by (or identical to) a stored label;
    /// stored labels the newcomer dominates are removed.
    pub(crate) fn insert(
        &mut self,
        vertex: usize,
        arcs: usize,
        cost: f64,
        step: f64,
        id: LabelId,
    ) -> Insert {
        assert!(
            self.processed.is_none_or(|p| vertex > p),
            "label inserted into processed layer {vertex}"
        );
        let fronts = &mut self.fronts[vertex];
        if fronts.is_empty() {
            fronts.resize(self.buckets, Vec::new());
        }
        for f in &fronts[..=arcs] {
            let pos = f.partition_point(|e| e.step < step);
            if f.get(pos).is_some_and(|e| e.cost <= cost) {
                return Insert::Rejected;
            }
        }
        let mut removed = 0;
        for f in &mut fronts[arcs..] {
            let end = f.partition_point(|e| e.step <= step);
            let start = f[..end].partition_point(|e| e.cost < cost);
            removed += end - start;
            f.drain(start..end);
        }
        let f = &mut fronts[arcs];
        let pos = f.partition_point(|e| e.step < step);
        f.insert(pos, Entry { step, cost, id });
        Insert::Accepted { removed }
    }

    /// Remove and return every label at `vertex`, marking it processed.
    pub(crate) fn take(&mut self, vertex: usize) -> Vec<Entry> {
        self.processed = Some(vertex);
        std::mem::take(&mut self.fronts[vertex])
            .into_iter()
            .flatten()
            .collect()
    }

    /// Labels currently stored at vertices `>= from`, with their vertex.
    pub(crate) fn open_from(&self, from: usize) -> impl Iterator<Item = (usize, &Entry)> {
        self.fronts
            .iter()
            .enumerate()
            .skip(from)
            .flat_map(|(v, fs)| fs.iter().flatten().map(move |e| (v, e)))
    }

    #[cfg(test)]
    pub(crate) fn stored(&self, vertex: usize) -> Vec<(usize, Entry)> {
        self.fronts[vertex]
            .iter()
            .enumerate()
            .flat_map(|(k, f)| f.iter().map(move |e| (k, *e)))
            .collect()
    }
}
