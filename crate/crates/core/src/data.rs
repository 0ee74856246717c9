//! Observations and their precomputed prefix tables.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::OrderIndex;

/// One observation: price coordinate `p` and response `x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub p: f64,
    pub x: f64,
}

impl DataPoint {
    pub fn new(p: f64, x: f64) -> Self {
        DataPoint { p, x }
    }
}

/// What to do with observations that share a price coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DuplicatePolicy {
    #[default]
    Reject,
    /// Keep every observation, attached to the single shared coordinate.
    /// Observations at one coordinate always fall into the same block.
    Merge,
}

/// Observations sorted by `p`, with prefix sums of `x` and `x²` and an
/// order-statistic index for median and quantile queries.
///
/// Observation indices are 0-based. A *coordinate* (graph vertex) is a
/// maximal run of observations with equal `p`; without duplicates every
/// observation is its own coordinate. Vertex `coordinate_count()` is the
/// dummy sink.
#[derive(Clone, Debug)]
pub struct Dataset {
    points: Vec<DataPoint>,
    prefix_x: Vec<f64>,
    prefix_x2: Vec<f64>,
    coords: Vec<usize>,
    order: OrderIndex,
    max_x: f64,
}

impl Dataset {
    /// Build from `(p, x)` rows in any order.
    pub fn from_rows<I>(rows: I, policy: DuplicatePolicy) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::from_points(
            rows.into_iter().map(|(p, x)| DataPoint { p, x }).collect(),
            policy,
        )
    }

    pub fn from_points(mut points: Vec<DataPoint>, policy: DuplicatePolicy) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(row) = points
            .iter()
            .position(|pt| !pt.p.is_finite() || !pt.x.is_finite())
        {
            return Err(Error::NonFiniteValue { row });
        }
        // stable: observations sharing a coordinate keep their input order
        points.sort_by(|a, b| a.p.total_cmp(&b.p));

        let mut coords = vec![0];
        for (i, w) in points.windows(2).enumerate() {
            if w[0].p == w[1].p {
                if policy == DuplicatePolicy::Reject {
                    return Err(Error::DuplicateP { p: w[0].p });
                }
            } else {
                coords.push(i + 1);
            }
        }
        coords.push(points.len());

        let mut prefix_x = Vec::with_capacity(points.len() + 1);
        let mut prefix_x2 = Vec::with_capacity(points.len() + 1);
        let (mut s, mut s2) = (0.0, 0.0);
        prefix_x.push(s);
        prefix_x2.push(s2);
        for pt in &points {
            s += pt.x;
            s2 += pt.x * pt.x;
            prefix_x.push(s);
            prefix_x2.push(s2);
        }
        let xs: Vec<f64> = points.iter().map(|pt| pt.x).collect();
        let max_x = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Dataset {
            order: OrderIndex::new(&xs),
            points,
            prefix_x,
            prefix_x2,
            coords,
            max_x,
        })
    }

    /// Parse `p,x` rows. A single header line is skipped when its first
    /// field is not numeric.
    pub fn read_csv<R: Read>(reader: R, policy: DuplicatePolicy) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (n, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(n + 1, |pos| pos.line() as usize);
            if record.len() == 1 && record[0].is_empty() {
                continue;
            }
            let first = record.get(0).unwrap_or("");
            if n == 0 && first.parse::<f64>().is_err() {
                continue;
            }
            if record.len() != 2 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 2 fields, found {}", record.len()),
                });
            }
            let field = |k: usize| {
                record[k].parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    msg: format!("{:?}: {e}", &record[k]),
                })
            };
            rows.push((field(0)?, field(1)?));
        }
        Self::from_rows(rows, policy)
    }

    pub fn open_csv<P: AsRef<Path>>(path: P, policy: DuplicatePolicy) -> Result<Self> {
        Self::read_csv(File::open(path)?, policy)
    }

    /// Write `p,x` rows with a header, using shortest round-trip formatting.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "p,x")?;
        for pt in &self.points {
            writeln!(w, "{},{}", pt.p, pt.x)?;
        }
        Ok(())
    }

    pub fn points(&self) -> &[DataPoint] {
        &self.points
    }

    /// Number of observations `I`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of distinct price coordinates.
    pub fn coordinate_count(&self) -> usize {
        self.coords.len() - 1
    }

    /// First observation index of vertex `v`; the sink maps to `len()`.
    #[inline]
    pub fn vertex_offset(&self, v: usize) -> usize {
        self.coords[v]
    }

    /// Price coordinate of vertex `v` (not defined for the sink).
    #[inline]
    pub fn vertex_p(&self, v: usize) -> f64 {
        self.points[self.coords[v]].p
    }

    pub fn first_p(&self) -> f64 {
        self.points[0].p
    }

    pub fn last_p(&self) -> f64 {
        self.points[self.points.len() - 1].p
    }

    pub fn max_x(&self) -> f64 {
        self.max_x
    }

    pub fn xs(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.points.iter().map(|pt| pt.x)
    }

    #[inline]
    pub(crate) fn sum_x(&self, start: usize, end: usize) -> f64 {
        self.prefix_x[end] - self.prefix_x[start]
    }

    #[inline]
    pub(crate) fn sum_x2(&self, start: usize, end: usize) -> f64 {
        self.prefix_x2[end] - self.prefix_x2[start]
    }

    pub(crate) fn order(&self) -> &OrderIndex {
        &self.order
    }

    /// Slice of observations covered by vertices `[from, to)`.
    pub(crate) fn vertex_span(&self, from: usize, to: usize) -> (usize, usize) {
        (self.coords[from], self.coords[to])
    }
}
