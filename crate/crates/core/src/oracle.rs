//! Exhaustive enumeration of contiguous partitions, for small instances.
//!
//! Block statistics are computed by direct sorting and summation rather
//! than through the prefix tables, so the oracle shares no arithmetic with
//! the search beyond the data itself.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::FitConfig;
use crate::cost::CostModel;
use crate::data::Dataset;
use crate::data::DuplicatePolicy;
use crate::error::{Error, Result};
use crate::solver::{fit, solve, Strategy};

pub const MAX_OBSERVATIONS: usize = 15;
pub const MAX_K: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub objective: f64,
    /// Vertex boundaries, starting at 0 and ending at the sink.
    pub partition: Vec<usize>,
    pub values: Vec<f64>,
}

fn representative(xs: &[f64], model: CostModel) -> f64 {
    let n = xs.len();
    match model {
        CostModel::L2 => xs.iter().sum::<f64>() / n as f64,
        CostModel::L1 | CostModel::Quantile(_) => {
            let tau = match model {
                CostModel::Quantile(t) => t,
                _ => 0.5,
            };
            let mut sorted = xs.to_vec();
            sorted.sort_by(f64::total_cmp);
            let rank = (1..=n)
                .find(|&r| r as f64 >= tau * n as f64 - 1e-9)
                .unwrap_or(n);
            sorted[rank - 1]
        }
    }
}

/// Minimum total block error over all partitions into at most `cfg.k`
/// contiguous blocks, each at its optimal representative. In monotone mode
/// only partitions with non-increasing values (ties allowed) count.
pub fn brute_force(data: &Dataset, cfg: &FitConfig) -> Result<OracleResult> {
    cfg.validate()?;
    if data.len() > MAX_OBSERVATIONS || cfg.k > MAX_K {
        return Err(Error::InstanceTooLarge {
            observations: data.len(),
            k: cfg.k,
        });
    }
    let m = data.coordinate_count();
    let xs: Vec<f64> = data.xs().collect();
    let offsets: Vec<usize> = (0..=m).map(|v| data.vertex_offset(v)).collect();
    let p: Vec<f64> = (0..m).map(|v| data.vertex_p(v)).collect();

    let mut best: Option<OracleResult> = None;
    let mut cuts = vec![0usize];
    enumerate(m, cfg.k - 1, 1, &mut cuts, &mut |cuts| {
        let mut bounds = cuts.to_vec();
        bounds.push(m);
        let lengths_ok = bounds
            .windows(2)
            .rev()
            .skip(1)
            .all(|w| cfg.interior_ok(p[w[0]], p[w[1]]))
            && cfg.last_ok(p[bounds[bounds.len() - 2]], data.last_p());
        if !lengths_ok {
            return;
        }
        let mut values = Vec::with_capacity(bounds.len() - 1);
        let mut total = 0.0;
        for w in bounds.windows(2) {
            let block = &xs[offsets[w[0]]..offsets[w[1]]];
            let v = representative(block, cfg.cost);
            total += block.iter().map(|&x| cfg.cost.loss(x - v)).sum::<f64>();
            values.push(v);
        }
        if cfg.enforce_monotone && !values.windows(2).all(|w| w[0] >= w[1]) {
            return;
        }
        if best.as_ref().is_none_or(|b| total < b.objective) {
            best = Some(OracleResult {
                objective: total,
                partition: bounds,
                values,
            });
        }
    });
    best.ok_or(Error::InfeasibleStepMin {
        max_arcs: cfg.k,
        step_min: cfg.step_min,
    })
}

/// Visit every increasing sequence of at most `budget` cut vertices drawn
/// from `next..m`, appended to `cuts`.
fn enumerate(
    m: usize,
    budget: usize,
    next: usize,
    cuts: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    visit(cuts);
    if budget == 0 {
        return;
    }
    for c in next..m {
        cuts.push(c);
        enumerate(m, budget - 1, c + 1, cuts, visit);
        cuts.pop();
    }
}

/// Random small instances for [`check_agreement`]: prices `1..=I`, values
/// uniform on `[0, 10)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgreementConfig {
    pub instances: usize,
    pub min_i: usize,
    pub max_i: usize,
    pub max_k: usize,
    pub seed: u64,
}

impl Default for AgreementConfig {
    fn default() -> Self {
        AgreementConfig {
            instances: 200,
            min_i: 3,
            max_i: 12,
            max_k: 4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub instance: usize,
    pub variant: String,
    pub solver: f64,
    pub oracle: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub comparisons: usize,
    pub mismatches: Vec<Mismatch>,
}

/// Relative agreement test used by [`check_agreement`].
pub fn agrees(solver: f64, oracle: f64) -> bool {
    (solver - oracle).abs() <= 1e-9 * oracle.abs().max(1.0)
}

/// Compare every search strategy against [`brute_force`] on random
/// instances, for L2 and L1 loss, with and without a minimum step length
/// (half the mean price gap), in monotone and unconstrained mode.
pub fn check_agreement(cfg: &AgreementConfig) -> Result<AgreementReport> {
    if cfg.min_i == 0 || cfg.min_i > cfg.max_i || cfg.max_k == 0 {
        return Err(Error::InvalidConfig(
            "need 1 <= min_i <= max_i and max_k >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = AgreementReport::default();
    for instance in 0..cfg.instances {
        let n = rng.gen_range(cfg.min_i..=cfg.max_i);
        let k = rng.gen_range(1..=cfg.max_k);
        let rows: Vec<(f64, f64)> = (1..=n)
            .map(|p| (p as f64, rng.gen_range(0.0..10.0)))
            .collect();
        let data = Dataset::from_rows(rows, DuplicatePolicy::Reject)?;
        for cost in [CostModel::L2, CostModel::L1] {
            for step_min in [0.0, 0.5] {
                let base = FitConfig::new(k).with_cost(cost).with_step_min(step_min);
                let mut compare = |variant: String, got: f64, want: f64| {
                    report.comparisons += 1;
                    if !agrees(got, want) {
                        report.mismatches.push(Mismatch {
                            instance,
                            variant,
                            solver: got,
                            oracle: want,
                        });
                    }
                };
                let want = brute_force(&data, &base)?.objective;
                for s in Strategy::ALL {
                    let got = fit(&data, &base, s)?.objective;
                    compare(
                        format!("monotone {cost} step_min={step_min} {s}"),
                        got,
                        want,
                    );
                }
                let relaxed = base.with_monotone(false);
                let want = brute_force(&data, &relaxed)?.objective;
                for (name, cfg) in [
                    ("raw", relaxed.clone().with_bounds(false, false, false)),
                    ("ub", relaxed.clone().with_bounds(false, false, true)),
                    ("card", relaxed.clone().with_bounds(false, true, true)),
                ] {
                    let got = solve(&data, &cfg)?.objective;
                    compare(
                        format!("relaxed {cost} step_min={step_min} {name}"),
                        got,
                        want,
                    );
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::DuplicatePolicy;

    fn data(xs: &[f64]) -> Dataset {
        Dataset::from_rows(
            xs.iter().enumerate().map(|(i, &x)| ((i + 1) as f64, x)),
            DuplicatePolicy::Reject,
        )
        .unwrap()
    }

    #[test]
    fn two_blocks() {
        let d = data(&[4.0, 4.0, 2.0, 2.0, 1.0]);
        let r = brute_force(&d, &FitConfig::new(2)).unwrap();
        assert!((r.objective - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.partition, vec![0, 2, 5]);
    }

    #[test]
    fn one_point_per_block_relaxed() {
        let xs = [3.0, 9.0, 1.0, 7.0];
        let r = brute_force(&data(&xs), &FitConfig::new(4).with_monotone(false)).unwrap();
        assert_eq!(r.objective, 0.0);
    }

    #[test]
    fn pooled_fit_is_optimal() {
        let r = brute_force(&data(&[1.0, 3.0, 2.0]), &FitConfig::new(3)).unwrap();
        assert_eq!(r.objective, 2.0);
    }

    #[test]
    fn guard() {
        let xs: Vec<f64> = (0..16).map(f64::from).collect();
        assert!(matches!(
            brute_force(&data(&xs), &FitConfig::new(2)),
            Err(Error::InstanceTooLarge { .. })
        ));
        assert!(brute_force(&data(&xs[..3]), &FitConfig::new(6)).is_err());
    }

    #[test]
    fn harness_agrees() {
        let cfg = AgreementConfig {
            instances: 15,
            ..AgreementConfig::default()
        };
        let r = check_agreement(&cfg).unwrap();
        assert_eq!(r.comparisons, 15 * 2 * 2 * 6);
        assert!(r.mismatches.is_empty(), "{:?}", r.mismatches);
    }

    #[test]
    fn enumeration_count() {
        let mut n = 0;
        enumerate(5, 2, 1, &mut vec![0], &mut |_| n += 1);
        // 1 + C(4,1) + C(4,2)
        assert_eq!(n, 11);
    }

    #[test]
    fn monotone_in_k_and_step_min() {
        let xs = [5.0, 7.0, 2.0, 6.0, 1.0, 3.0, 0.5, 2.0];
        let d = data(&xs);
        let mut prev = f64::INFINITY;
        for k in 1..=5 {
            let o = brute_force(&d, &FitConfig::new(k)).unwrap().objective;
            assert!(o <= prev);
            prev = o;
        }
        let mut prev = 0.0;
        for s in [0.0, 1.0, 2.0, 3.0] {
            let o = brute_force(&d, &FitConfig::new(4).with_step_min(s))
                .unwrap()
                .objective;
            assert!(o >= prev);
            prev = o;
        }
    }
}
