use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::cost::CostModel;
use crate::error::{Error, Result};

/// Problem and search settings for one fit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Maximum number of steps.
    pub k: usize,
    /// Minimum step length on the price axis; 0 disables the constraint.
    pub step_min: f64,
    pub cost: CostModel,
    /// Require non-increasing step values. When false the exact
    /// unconstrained segmentation is sought instead.
    pub enforce_monotone: bool,
    pub use_isotonic_lb: bool,
    pub use_relaxed_lb: bool,
    pub use_clustering_ub: bool,
    #[serde(with = "opt_secs")]
    pub time_limit: Option<Duration>,
    /// Also apply `step_min` to the last block, measured up to the last
    /// observed price.
    pub strict_last_block: bool,
}

impl FitConfig {
    pub fn new(k: usize) -> Self {
        FitConfig {
            k,
            step_min: 0.0,
            cost: CostModel::L2,
            enforce_monotone: true,
            use_isotonic_lb: true,
            use_relaxed_lb: false,
            use_clustering_ub: true,
            time_limit: None,
            strict_last_block: false,
        }
    }

    /// All bounds disabled.
    pub fn raw(k: usize) -> Self {
        FitConfig {
            use_isotonic_lb: false,
            use_relaxed_lb: false,
            use_clustering_ub: false,
            ..FitConfig::new(k)
        }
    }

    pub fn with_step_min(mut self, step_min: f64) -> Self {
        self.step_min = step_min;
        self
    }

    pub fn with_cost(mut self, cost: CostModel) -> Self {
        self.cost = cost;
        self
    }

    pub fn with_monotone(mut self, enforce: bool) -> Self {
        self.enforce_monotone = enforce;
        self
    }

    pub fn with_bounds(mut self, isotonic_lb: bool, relaxed_lb: bool, clustering_ub: bool) -> Self {
        self.use_isotonic_lb = isotonic_lb;
        self.use_relaxed_lb = relaxed_lb;
        self.use_clustering_ub = clustering_ub;
        self
    }

    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn with_strict_last_block(mut self, strict: bool) -> Self {
        self.strict_last_block = strict;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if !(self.step_min >= 0.0 && self.step_min.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step_min must be finite and non-negative, got {}",
                self.step_min
            )));
        }
        self.cost.validate()
    }

    /// Whether a block from `p_from` to the next block's start `p_to`
    /// respects the minimum step length.
    #[inline]
    pub(crate) fn interior_ok(&self, p_from: f64, p_to: f64) -> bool {
        self.step_min <= 0.0 || p_to - p_from >= self.step_min
    }

    /// Whether a last block starting at `p_from` is admissible given the
    /// last observed price `p_last`.
    #[inline]
    pub(crate) fn last_ok(&self, p_from: f64, p_last: f64) -> bool {
        !self.strict_last_block || self.step_min <= 0.0 || p_last - p_from >= self.step_min
    }

    /// Isotonic suffix bounds only hold for squared error.
    pub(crate) fn isotonic_lb_active(&self) -> bool {
        self.use_isotonic_lb && self.cost == CostModel::L2
    }
}

mod opt_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Duration>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(d) => s.serialize_some(&d.as_secs_f64()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Duration>, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.map(Duration::from_secs_f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(FitConfig::new(3).validate().is_ok());
        assert!(FitConfig::new(0).validate().is_err());
        assert!(FitConfig::new(2).with_step_min(-1.0).validate().is_err());
        assert!(FitConfig::new(2)
            .with_cost(CostModel::Quantile(0.0))
            .validate()
            .is_err());
    }

    #[test]
    fn step_length_rules() {
        let cfg = FitConfig::new(2).with_step_min(1.0);
        assert!(cfg.interior_ok(0.0, 1.0));
        assert!(!cfg.interior_ok(0.0, 0.5));
        assert!(cfg.last_ok(9.9, 10.0));
        assert!(!cfg.clone().with_strict_last_block(true).last_ok(9.9, 10.0));
    }
}
