//! File round trip: generate a CSV, read it back, write the JSON report
//! and a plot trace, and re-score the trace.

use std::fs;

use stepfit::report::{FitReport, InputDigest};
use stepfit::{
    curve_error, fit, generate, Dataset, DuplicatePolicy, FitConfig, GenConfig, StepCurve, Strategy,
};

fn main() -> stepfit::Result<()> {
    let dir = std::env::temp_dir().join("stepfit-csv-io");
    fs::create_dir_all(&dir)?;
    let csv = dir.join("data.csv");
    generate(&GenConfig::new(150, 4.0, 2))?.write_csv(fs::File::create(&csv)?)?;

    let data = Dataset::open_csv(&csv, DuplicatePolicy::Reject)?;
    let cfg = FitConfig::new(5);
    let result = fit(&data, &cfg, Strategy::Iso)?;
    let trace = result.curve.plot_trace();
    fs::write(dir.join("curve.txt"), &trace)?;

    let report = FitReport::new(
        InputDigest::of(&data, Some(csv.display().to_string())),
        cfg,
        Strategy::Iso,
        result,
    );
    let json = report.to_json();
    fs::write(dir.join("report.json"), &json)?;

    let back = FitReport::from_json(&json)?;
    let rescored = curve_error(
        &data,
        &StepCurve::from_plot_trace(&trace)?,
        back.config.cost,
    )?;
    println!("wrote {}", dir.display());
    println!(
        "reported {} rescored {} input {}",
        back.result.objective,
        rescored,
        &back.input.sha256[..12]
    );
    Ok(())
}
