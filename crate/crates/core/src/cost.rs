//! Block representatives and block errors.
//!
//! A block is a half-open range `[start, end)` of observation indices. Its
//! representative is the loss-minimizing constant (mean, lower median or
//! empirical quantile) and its error is the loss of that constant.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "tau", rename_all = "lowercase")]
pub enum CostModel {
    /// Squared error; representative is the mean.
    #[default]
    L2,
    /// Absolute error; representative is the lower median.
    L1,
    /// Pinball loss at level `tau`; representative is the order statistic
    /// at rank `ceil(tau * n)`.
    Quantile(f64),
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CostModel::Quantile(tau) if !(tau > 0.0 && tau < 1.0) => Err(Error::InvalidConfig(
                format!("quantile level must lie in (0, 1), got {tau}"),
            )),
            _ => Ok(()),
        }
    }

    /// Loss of a single residual `x - f(p)`.
    #[inline]
    pub fn loss(&self, residual: f64) -> f64 {
        match *self {
            CostModel::L2 => residual * residual,
            CostModel::L1 => residual.abs(),
            CostModel::Quantile(tau) => (tau * residual).max((tau - 1.0) * residual),
        }
    }

    /// 1-based rank of the representative order statistic in a block of `n`.
    fn rank(&self, n: usize) -> usize {
        let tau = match *self {
            CostModel::L2 => unreachable!("mean has no rank"),
            CostModel::L1 => return n.div_ceil(2),
            CostModel::Quantile(tau) => tau,
        };
        let t = tau * n as f64;
        let mut k = t.ceil();
        // tau * n may land just above an integer through rounding
        if k - 1.0 >= t - 1e-12 * n as f64 {
            k -= 1.0;
        }
        (k as usize).clamp(1, n)
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostModel::L2 => f.write_str("l2"),
            CostModel::L1 => f.write_str("l1"),
            CostModel::Quantile(tau) => write!(f, "quantile:{tau}"),
        }
    }
}

impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let model = match s.to_ascii_lowercase().as_str() {
            "l2" => CostModel::L2,
            "l1" => CostModel::L1,
            other => {
                let tau = other
                    .strip_prefix("quantile:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "unknown loss {s:?}; expected l2, l1 or quantile:TAU"
                        ))
                    })?;
                CostModel::Quantile(tau)
            }
        };
        model.validate()?;
        Ok(model)
    }
}

/// Block queries over a [`Dataset`] under one cost model.
#[derive(Clone, Copy, Debug)]
pub struct CostTables<'a> {
    data: &'a Dataset,
    model: CostModel,
}

impl<'a> CostTables<'a> {
    pub fn new(data: &'a Dataset, model: CostModel) -> Self {
        CostTables { data, model }
    }

    pub fn data(&self) -> &'a Dataset {
        self.data
    }

    pub fn model(&self) -> CostModel {
        self.model
    }

    fn check(&self, start: usize, end: usize) -> Result<()> {
        if start < end && end <= self.data.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                start,
                end,
                len: self.data.len(),
            })
        }
    }

    /// Optimal constant for observations `[start, end)`.
    pub fn block_value(&self, start: usize, end: usize) -> Result<f64> {
        self.check(start, end)?;
        Ok(self.value_error(start, end).0)
    }

    /// Loss of the optimal constant over observations `[start, end)`.
    pub fn block_error(&self, start: usize, end: usize) -> Result<f64> {
        self.check(start, end)?;
        Ok(self.value_error(start, end).1)
    }

    /// Representative and error in one pass. Indices are not checked.
    #[inline]
    pub(crate) fn value_error(&self, start: usize, end: usize) -> (f64, f64) {
        debug_assert!(start < end && end <= self.data.len());
        let n = end - start;
        match self.model {
            CostModel::L2 => {
                let s = self.data.sum_x(start, end);
                let mean = s / n as f64;
                let err = self.data.sum_x2(start, end) - s * s / n as f64;
                (mean, err.max(0.0))
            }
            model => {
                let k = model.rank(n);
                let (q, below) = self.data.order().kth(start, end, k);
                let above = self.data.sum_x(start, end) - below;
                let up = above - q * (n - k) as f64;
                let down = q * k as f64 - below;
                let err = match model {
                    CostModel::Quantile(tau) => tau * up + (1.0 - tau) * down,
                    _ => up + down,
                };
                (q, err.max(0.0))
            }
        }
    }

    /// Arc between vertices: the block spanning coordinates `[from, to)`.
    #[inline]
    pub(crate) fn arc(&self, from: usize, to: usize) -> (f64, f64) {
        let (a, b) = self.data.vertex_span(from, to);
        self.value_error(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DuplicatePolicy;
    use proptest::prelude::*;

    fn data(xs: &[f64]) -> Dataset {
        Dataset::from_rows(
            xs.iter().enumerate().map(|(i, &x)| (i as f64, x)),
            DuplicatePolicy::Reject,
        )
        .unwrap()
    }

    #[test]
    fn mean_and_sse() {
        let d = data(&[4.0, 2.0, 3.0]);
        let t = CostTables::new(&d, CostModel::L2);
        assert_eq!(t.block_value(0, 3).unwrap(), 3.0);
        assert_eq!(t.block_error(0, 3).unwrap(), 2.0);
    }

    #[test]
    fn single_point_blocks() {
        let d = data(&[4.0, 2.0, 3.0]);
        for model in [CostModel::L2, CostModel::L1, CostModel::Quantile(0.3)] {
            let t = CostTables::new(&d, model);
            for i in 0..3 {
                assert_eq!(t.block_value(i, i + 1).unwrap(), d.points()[i].x);
                assert_eq!(t.block_error(i, i + 1).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn lower_median_on_even_count() {
        let d = data(&[1.0, 9.0]);
        let t = CostTables::new(&d, CostModel::L1);
        assert_eq!(t.block_value(0, 2).unwrap(), 1.0);
        assert_eq!(t.block_error(0, 2).unwrap(), 8.0);
    }

    #[test]
    fn merged_duplicates_average_all_observations() {
        let d = Dataset::from_rows([(1.0, 7.0), (1.0, 3.0), (2.0, 5.0)], DuplicatePolicy::Merge)
            .unwrap();
        let t = CostTables::new(&d, CostModel::L2);
        assert_eq!(t.block_value(0, 3).unwrap(), 5.0);
        assert_eq!(t.arc(0, 2), (5.0, 8.0));
    }

    #[test]
    fn out_of_range() {
        let d = data(&[1.0, 2.0]);
        let t = CostTables::new(&d, CostModel::L2);
        assert!(matches!(
            t.block_value(1, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            t.block_error(0, 3),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn quantile_rank_rounding() {
        // 0.3 * 10 is 3.0000000000000004 in binary
        assert_eq!(CostModel::Quantile(0.3).rank(10), 3);
        assert_eq!(CostModel::Quantile(0.5).rank(5), 3);
        assert_eq!(CostModel::Quantile(0.01).rank(5), 1);
        assert_eq!(CostModel::Quantile(0.99).rank(5), 5);
        assert_eq!(CostModel::L1.rank(4), 2);
    }

    #[test]
    fn parse_loss() {
        assert_eq!("l2".parse::<CostModel>().unwrap(), CostModel::L2);
        assert_eq!("L1".parse::<CostModel>().unwrap(), CostModel::L1);
        assert_eq!(
            "quantile:0.25".parse::<CostModel>().unwrap(),
            CostModel::Quantile(0.25)
        );
        assert!("quantile:1.5".parse::<CostModel>().is_err());
        assert!("huber".parse::<CostModel>().is_err());
    }

    fn direct(xs: &[f64], model: CostModel) -> (f64, f64) {
        let n = xs.len();
        let value = match model {
            CostModel::L2 => xs.iter().sum::<f64>() / n as f64,
            _ => {
                let mut v = xs.to_vec();
                v.sort_by(f64::total_cmp);
                v[model.rank(n) - 1]
            }
        };
        (value, xs.iter().map(|&x| model.loss(x - value)).sum())
    }

    proptest! {
        #[test]
        fn prefix_queries_match_direct_loops(
            xs in prop::collection::vec(-100.0f64..100.0, 1..30),
            tau in 0.05f64..0.95,
        ) {
            let d = data(&xs);
            for model in [CostModel::L2, CostModel::L1, CostModel::Quantile(tau)] {
                let t = CostTables::new(&d, model);
                for i in 0..xs.len() {
                    for j in i + 1..=xs.len() {
                        let (v, e) = t.value_error(i, j);
                        let (dv, de) = direct(&xs[i..j], model);
                        prop_assert!((v - dv).abs() <= 1e-9 * dv.abs().max(1.0));
                        prop_assert!((e - de).abs() <= 1e-9 * de.abs().max(1.0));
                        prop_assert!(e >= 0.0);
                    }
                }
            }
        }

        #[test]
        fn squared_error_is_superadditive(xs in prop::collection::vec(-10.0f64..10.0, 3..20)) {
            let d = data(&xs);
            let t = CostTables::new(&d, CostModel::L2);
            let n = xs.len();
            for h in 1..n {
                let whole = t.block_error(0, n).unwrap();
                let parts = t.block_error(0, h).unwrap() + t.block_error(h, n).unwrap();
                prop_assert!(whole >= parts - 1e-9);
            }
        }

        #[test]
        fn median_equals_half_quantile_on_odd_blocks(xs in prop::collection::vec(-10.0f64..10.0, 1..25)) {
            let d = data(&xs);
            let l1 = CostTables::new(&d, CostModel::L1);
            let q = CostTables::new(&d, CostModel::Quantile(0.5));
            for i in 0..xs.len() {
                for j in (i + 1..=xs.len()).step_by(2) {
                    prop_assert_eq!(l1.block_value(i, j).unwrap(), q.block_value(i, j).unwrap());
                }
            }
        }
    }
}
