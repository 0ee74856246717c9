//! Recover the generating curve from noiseless grid data.
//!
//! The unconstrained six-step fit reproduces the curve exactly; the
//! monotone fit cannot, since the curve rises at p = 12.

use stepfit::{generate, solve, true_curve, FitConfig, GenConfig};

fn main() -> stepfit::Result<()> {
    let data = generate(&GenConfig::new(600, 0.0, 0))?;
    let truth = true_curve();

    let relaxed = solve(
        &data,
        &FitConfig::new(6)
            .with_monotone(false)
            .with_bounds(false, false, true),
    )?;
    println!("unconstrained K=6: objective {:e}", relaxed.objective);
    for (fit, want) in relaxed.curve.blocks().zip(truth.blocks()) {
        println!(
            "  [{:>5}, {:>5}) fitted {:>6}   true [{:>2}, {:>2}) {:>5}",
            fit.start, fit.end, fit.value, want.start, want.end, want.value
        );
    }

    let mono = solve(&data, &FitConfig::new(6))?;
    println!("monotone K=6: objective {:.3}", mono.objective);
    for b in mono.curve.blocks() {
        println!("  [{:>5}, {:>5}) {:.3}", b.start, b.end, b.value);
    }
    Ok(())
}
