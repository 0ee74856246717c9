//! Non-increasing least-squares regression by pool-adjacent-violators.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// A maximal constant run of an isotonic fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsoBlock {
    pub start: usize,
    pub len: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsotonicFit {
    pub fitted: Vec<f64>,
    pub sse: f64,
    pub blocks: Vec<IsoBlock>,
}

/// Least-squares non-increasing fit of `x`.
///
/// For a non-decreasing fit, negate the input and the output.
pub fn pava_fit(x: &[f64]) -> Result<IsotonicFit> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            row: x.iter().position(|v| !v.is_finite()).unwrap(),
        });
    }
    let blocks = pool(x.iter().map(|&v| (v, 1.0)));
    let mut fitted = Vec::with_capacity(x.len());
    for b in &blocks {
        fitted.extend(std::iter::repeat_n(b.value, b.len));
    }
    let sse = x.iter().zip(&fitted).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(IsotonicFit {
        fitted,
        sse,
        blocks,
    })
}

/// Weighted pooling over `(value, weight)` items. Each item is pushed once
/// and popped at most once.
pub(crate) fn pool<I>(items: I) -> Vec<IsoBlock>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    // (weighted sum, weight, start, len)
    let mut stack: Vec<(f64, f64, usize, usize)> = Vec::new();
    for (i, (v, w)) in items.into_iter().enumerate() {
        let mut cur = (v * w, w, i, 1usize);
        while let Some(&(s, wt, start, len)) = stack.last() {
            if s / wt <= cur.0 / cur.1 {
                stack.pop();
                cur = (s + cur.0, wt + cur.1, start, len + cur.3);
            } else {
                break;
            }
        }
        stack.push(cur);
    }
    stack
        .into_iter()
        .map(|(s, w, start, len)| IsoBlock {
            start,
            len,
            value: s / w,
        })
        .collect()
}

/// Isotonic fit over the coordinates of `data`, one fitted value per
/// coordinate (observations sharing a price are pooled with their count as
/// weight). Returns the blocks in coordinate units and the SSE over all
/// observations.
pub(crate) fn fit_coordinates(data: &Dataset, from: usize) -> (Vec<IsoBlock>, f64) {
    let m = data.coordinate_count();
    let items = (from..m).map(|v| {
        let (a, b) = data.vertex_span(v, v + 1);
        (data.sum_x(a, b) / (b - a) as f64, (b - a) as f64)
    });
    let mut blocks = pool(items);
    let mut sse = 0.0;
    for b in &mut blocks {
        b.start += from;
        let (a, e) = data.vertex_span(b.start, b.start + b.len);
        sse += data.points()[a..e]
            .iter()
            .map(|pt| (pt.x - b.value) * (pt.x - b.value))
            .sum::<f64>();
    }
    (blocks, sse)
}

/// Isotonic SSE of every suffix, indexed by vertex; the sink entry is 0.
///
/// Each entry lower-bounds the squared error of any non-increasing
/// completion from that vertex, whatever the arc budget or last step value.
pub fn suffix_lb_table(data: &Dataset) -> Vec<f64> {
    let m = data.coordinate_count();
    let mut table: Vec<f64> = (0..m).map(|v| fit_coordinates(data, v).1).collect();
    table.push(0.0);
    table
}
