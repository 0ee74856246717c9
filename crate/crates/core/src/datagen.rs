//! Synthetic instances: a fixed six-step curve plus Gaussian noise.
//!
//! Noise comes from `ChaCha8Rng` seeded with `seed_from_u64(seed)` and the
//! ziggurat normal sampler of `rand_distr`, both platform independent, so a
//! given configuration yields the same bytes everywhere.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::curve::StepCurve;
use crate::data::{DataPoint, Dataset, DuplicatePolicy};
use crate::error::{Error, Result};

/// Upper end of the sampled price range.
pub const PRICE_RANGE: f64 = 60.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// `p_i = 60 i / I` for `i = 0..I`.
    #[default]
    Grid,
    /// Uniform on `[0, 60)`, sorted; ties nudged to the next float.
    Uniform,
}

impl FromStr for Sampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(Sampling::Grid),
            "uniform" => Ok(Sampling::Uniform),
            _ => Err(Error::InvalidConfig(format!(
                "unknown sampling {s:?}; expected grid or uniform"
            ))),
        }
    }
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampling::Grid => "grid",
            Sampling::Uniform => "uniform",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub i: usize,
    pub sigma: f64,
    pub seed: u64,
    pub sampling: Sampling,
}

impl GenConfig {
    pub fn new(i: usize, sigma: f64, seed: u64) -> Self {
        GenConfig {
            i,
            sigma,
            seed,
            sampling: Sampling::Grid,
        }
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }
}

/// The six-step response used for the synthetic experiments. It is not
/// monotone: the second step rises above the first.
pub fn true_curve() -> StepCurve {
    StepCurve::new(
        vec![0.0, 12.0, 30.0, 35.0, 45.0, 50.0, 60.0],
        vec![100.0, 115.0, 102.0, 93.0, 72.0, 50.0],
    )
    .expect("static curve is valid")
}

pub fn generate(cfg: &GenConfig) -> Result<Dataset> {
    if cfg.i == 0 {
        return Err(Error::EmptyInput);
    }
    if !(cfg.sigma >= 0.0 && cfg.sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "sigma must be non-negative, got {}",
            cfg.sigma
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.i;
    let mut ps: Vec<f64> = match cfg.sampling {
        Sampling::Grid => (0..n).map(|i| PRICE_RANGE * i as f64 / n as f64).collect(),
        Sampling::Uniform => {
            let mut ps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..PRICE_RANGE)).collect();
            ps.sort_by(f64::total_cmp);
            for i in 1..n {
                if ps[i] <= ps[i - 1] {
                    ps[i] = ps[i - 1].next_up();
                }
            }
            ps
        }
    };
    let f = true_curve();
    let noise = Normal::new(0.0, cfg.sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let points = ps
        .drain(..)
        .map(|p| {
            let eps = if cfg.sigma > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            Ok(DataPoint::new(p, f.evaluate(p)? + eps))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::from_points(points, DuplicatePolicy::Reject)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::CostModel;
    use crate::curve::curve_error;

    #[test]
    fn curve_values() {
        let f = true_curve();
        assert_eq!(f.evaluate(0.0).unwrap(), 100.0);
        assert_eq!(f.evaluate(45.0).unwrap(), 72.0);
        assert_eq!(f.evaluate(59.9).unwrap(), 50.0);
        assert_eq!(f.num_blocks(), 6);
    }

    #[test]
    fn noiseless_grid_lies_on_the_curve() {
        for n in [7, 60, 600] {
            let d = generate(&GenConfig::new(n, 0.0, 1)).unwrap();
            assert_eq!(d.len(), n);
            assert_eq!(curve_error(&d, &true_curve(), CostModel::L2).unwrap(), 0.0);
        }
    }

    #[test]
    fn deterministic() {
        for sampling in [Sampling::Grid, Sampling::Uniform] {
            let cfg = GenConfig::new(300, 5.0, 7).with_sampling(sampling);
            let a = generate(&cfg).unwrap();
            let b = generate(&cfg).unwrap();
            assert_eq!(a.points(), b.points());
        }
        let a = generate(&GenConfig::new(50, 5.0, 1)).unwrap();
        let b = generate(&GenConfig::new(50, 5.0, 2)).unwrap();
        assert_ne!(a.points(), b.points());
    }

    #[test]
    fn uniform_prices_strictly_increase() {
        let d = generate(&GenConfig::new(5000, 1.0, 3).with_sampling(Sampling::Uniform)).unwrap();
        assert!(d.points().windows(2).all(|w| w[0].p < w[1].p));
        assert!(d
            .points()
            .iter()
            .all(|pt| (0.0..PRICE_RANGE).contains(&pt.p)));
    }

    #[test]
    fn noise_variance_concentrates() {
        let (n, sigma) = (10_000, 5.0);
        let d = generate(&GenConfig::new(n, sigma, 11)).unwrap();
        let sse = curve_error(&d, &true_curve(), CostModel::L2).unwrap();
        let expected = n as f64 * sigma * sigma;
        assert!((0.9 * expected..=1.1 * expected).contains(&sse), "{sse}");
    }

    #[test]
    fn invalid() {
        assert!(generate(&GenConfig::new(0, 1.0, 1)).is_err());
        assert!(generate(&GenConfig::new(10, -1.0, 1)).is_err());
    }
}
