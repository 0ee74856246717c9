//! Robust and quantile step fits: absolute error (lower median per step)
//! and pinball loss at a chosen level.

use stepfit::{fit, generate, CostModel, FitConfig, GenConfig, Strategy};

fn main() -> stepfit::Result<()> {
    let data = generate(&GenConfig::new(200, 8.0, 9))?;
    for cost in [
        CostModel::L2,
        CostModel::L1,
        CostModel::Quantile(0.1),
        CostModel::Quantile(0.9),
    ] {
        let r = fit(
            &data,
            &FitConfig::new(4).with_cost(cost).with_step_min(3.0),
            Strategy::Iso,
        )?;
        let values: Vec<String> = r.curve.values().iter().map(|v| format!("{v:.1}")).collect();
        println!(
            "{cost:<14} objective {:>10.2}  steps [{}]",
            r.objective,
            values.join(", ")
        );
    }
    Ok(())
}
