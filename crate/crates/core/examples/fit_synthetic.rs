//! Fit a noisy synthetic instance with each search strategy.
//!
//! Usage: `cargo run --release --example fit_synthetic -- [I] [SIGMA] [K] [SEED]`

use std::env;

use stepfit::{fit, generate, FitConfig, GenConfig, Strategy};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> stepfit::Result<()> {
    let (n, sigma, k, seed) = (arg(1, 200usize), arg(2, 5.0), arg(3, 6usize), arg(4, 1u64));
    let data = generate(&GenConfig::new(n, sigma, seed))?;
    println!("I={n} sigma={sigma} K={k} seed={seed}");
    println!(
        "{:<4} {:>14} {:>10} {:>12} {:>10}",
        "", "objective", "gap0 %", "labels", "seconds"
    );
    let strategies: Vec<Strategy> = match env::args().nth(5) {
        Some(s) => vec![s.parse()?],
        None => Strategy::ALL.to_vec(),
    };
    let mut last = None;
    for s in strategies {
        let r = fit(&data, &FitConfig::new(k), s)?;
        println!(
            "{:<4} {:>14.4} {:>10.3} {:>12} {:>10.3}",
            s.to_string(),
            r.objective,
            r.bounds.gap0.unwrap_or(f64::NAN),
            r.stats.labels_created,
            r.wall_time.as_secs_f64()
        );
        last = Some(r);
    }
    if let Some(r) = last {
        for b in r.curve.blocks() {
            println!("  [{:>7.3}, {:>7.3})  {:.3}", b.start, b.end, b.value);
        }
    }
    Ok(())
}
