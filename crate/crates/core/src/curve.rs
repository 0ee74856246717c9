//! Piecewise-constant curves on half-open price intervals.

use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::data::Dataset;
use crate::error::{Error, Result};

/// `f(p) = values[k]` for `breakpoints[k] <= p < breakpoints[k + 1]`.
///
/// Prices at or beyond the last breakpoint take the last value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCurve {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

/// One step of a [`StepCurve`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub start: f64,
    pub end: f64,
    pub value: f64,
}

impl StepCurve {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidCurve(
                "a curve needs at least one block".into(),
            ));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidCurve(format!(
                "{} breakpoints for {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCurve("non-finite breakpoint or value".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve(format!(
                "breakpoints not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        Ok(StepCurve {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_blocks(&self) -> usize {
        self.values.len()
    }

    pub fn blocks(&self) -> impl ExactSizeIterator<Item = Block> + '_ {
        self.values.iter().enumerate().map(|(k, &value)| Block {
            start: self.breakpoints[k],
            end: self.breakpoints[k + 1],
            value,
        })
    }

    pub fn is_non_increasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn evaluate(&self, p: f64) -> Result<f64> {
        let start = self.breakpoints[0];
        if p < start || p.is_nan() {
            return Err(Error::BelowDomain { p, start });
        }
        // number of breakpoints <= p, at least 1
        let k = self.breakpoints.partition_point(|&b| b <= p);
        Ok(self.values[(k - 1).min(self.values.len() - 1)])
    }

    /// Two rows per block, `start value` and `end value`.
    pub fn plot_trace(&self) -> String {
        let mut out = String::new();
        for b in self.blocks() {
            out.push_str(&format!("{} {}\n{} {}\n", b.start, b.value, b.end, b.value));
        }
        out
    }

    /// Inverse of [`StepCurve::plot_trace`].
    pub fn from_plot_trace(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(p)), Some(Ok(v)), None) => rows.push((p, v)),
                _ => {
                    return Err(Error::Parse {
                        line: n + 1,
                        msg: "expected `p value`".into(),
                    })
                }
            }
        }
        if rows.is_empty() || rows.len() % 2 != 0 {
            return Err(Error::InvalidCurve(
                "trace must hold two rows per block".into(),
            ));
        }
        let mut breakpoints = Vec::with_capacity(rows.len() / 2 + 1);
        let mut values = Vec::with_capacity(rows.len() / 2);
        for pair in rows.chunks(2) {
            if pair[0].1 != pair[1].1 {
                return Err(Error::InvalidCurve("block rows disagree on value".into()));
            }
            if let Some(&last) = breakpoints.last() {
                if last != pair[0].0 {
                    return Err(Error::InvalidCurve("blocks are not contiguous".into()));
                }
                breakpoints.pop();
            }
            breakpoints.push(pair[0].0);
            breakpoints.push(pair[1].0);
            values.push(pair[0].1);
        }
        StepCurve::new(breakpoints, values)
    }
}

/// Summed loss of `curve` over all observations, by direct summation per
/// block.
pub fn curve_error(data: &Dataset, curve: &StepCurve, model: CostModel) -> Result<f64> {
    let (lo, hi) = (data.first_p(), data.last_p());
    let bps = curve.breakpoints();
    if bps[0] > lo || bps[bps.len() - 1] < hi {
        return Err(Error::CurveDoesNotCoverData { lo, hi });
    }
    let points = data.points();
    let last = curve.num_blocks() - 1;
    let mut total = 0.0;
    let mut start = 0;
    for (k, block) in curve.blocks().enumerate() {
        let end = if k == last {
            points.len()
        } else {
            start + points[start..].partition_point(|pt| pt.p < block.end)
        };
        total += points[start..end]
            .iter()
            .map(|pt| model.loss(pt.x - block.value))
            .sum::<f64>();
        start = end;
    }
    Ok(total)
}

/// Right end of the last block: the dummy coordinate beyond the data.
pub(crate) fn sink_coordinate(data: &Dataset, step_min: f64) -> f64 {
    let last = data.last_p();
    (last + step_min).max(last.next_up())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DuplicatePolicy;

    fn table_one() -> StepCurve {
        StepCurve::new(
            vec![0.0, 12.0, 30.0, 35.0, 45.0, 50.0, 60.0],
            vec![100.0, 115.0, 102.0, 93.0, 72.0, 50.0],
        )
        .unwrap()
    }

    #[test]
    fn evaluate_half_open() {
        let f = table_one();
        assert_eq!(f.evaluate(31.0).unwrap(), 102.0);
        assert_eq!(f.evaluate(12.0).unwrap(), 115.0);
        assert_eq!(f.evaluate(11.999).unwrap(), 100.0);
        assert_eq!(f.evaluate(60.0).unwrap(), 50.0);
        assert_eq!(f.evaluate(1e9).unwrap(), 50.0);
        assert!(matches!(f.evaluate(-0.1), Err(Error::BelowDomain { .. })));
        assert!(!f.is_non_increasing());
    }

    #[test]
    fn invalid_curves() {
        assert!(StepCurve::new(vec![0.0], vec![]).is_err());
        assert!(StepCurve::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepCurve::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn single_mean_block_error() {
        let d = Dataset::from_rows(
            [(0.0, 4.0), (1.0, 2.0), (2.0, 3.0)],
            DuplicatePolicy::Reject,
        )
        .unwrap();
        let f = StepCurve::new(vec![0.0, 3.0], vec![3.0]).unwrap();
        assert_eq!(curve_error(&d, &f, CostModel::L2).unwrap(), 2.0);
        let g = StepCurve::new(vec![0.0, 3.0], vec![2.0]).unwrap();
        assert_eq!(curve_error(&d, &g, CostModel::L2).unwrap(), 5.0);
        assert_eq!(curve_error(&d, &g, CostModel::L1).unwrap(), 3.0);
    }

    #[test]
    fn interpolating_curve_has_zero_error() {
        let d = Dataset::from_rows(
            [(0.0, 4.0), (1.0, 2.0), (2.0, 3.0)],
            DuplicatePolicy::Reject,
        )
        .unwrap();
        let f = StepCurve::new(vec![0.0, 1.0, 2.0, 2.5], vec![4.0, 2.0, 3.0]).unwrap();
        assert_eq!(curve_error(&d, &f, CostModel::L2).unwrap(), 0.0);
    }

    #[test]
    fn uncovered_data() {
        let d = Dataset::from_rows([(0.0, 4.0), (5.0, 2.0)], DuplicatePolicy::Reject).unwrap();
        let f = StepCurve::new(vec![1.0, 6.0], vec![3.0]).unwrap();
        assert!(matches!(
            curve_error(&d, &f, CostModel::L2),
            Err(Error::CurveDoesNotCoverData { .. })
        ));
        let g = StepCurve::new(vec![0.0, 4.0], vec![3.0]).unwrap();
        assert!(curve_error(&d, &g, CostModel::L2).is_err());
    }

    #[test]
    fn plot_trace_roundtrip() {
        let f = table_one();
        let text = f.plot_trace();
        assert_eq!(text.lines().count(), 12);
        assert_eq!(StepCurve::from_plot_trace(&text).unwrap(), f);
    }

    #[test]
    fn sink_is_beyond_last_point() {
        let d = Dataset::from_rows([(0.0, 1.0), (2.0, 1.0)], DuplicatePolicy::Reject).unwrap();
        assert!(sink_coordinate(&d, 0.0) > 2.0);
        assert_eq!(sink_coordinate(&d, 0.5), 2.5);
    }
}
