//! Error as a function of the step budget, solved in parallel.

use rayon::prelude::*;
use stepfit::{fit, generate, FitConfig, GenConfig, Strategy};

fn main() -> stepfit::Result<()> {
    let data = generate(&GenConfig::new(400, 5.0, 4))?;
    let rows = (1..=10usize)
        .into_par_iter()
        .map(|k| fit(&data, &FitConfig::new(k), Strategy::Iso).map(|r| (k, r)))
        .collect::<stepfit::Result<Vec<_>>>()?;
    println!("{:>2} {:>12} {:>9} {:>8}", "K", "objective", "labels", "ms");
    for (k, r) in rows {
        println!(
            "{k:>2} {:>12.2} {:>9} {:>8.2}",
            r.objective,
            r.stats.labels_created,
            r.wall_time.as_secs_f64() * 1e3
        );
    }
    Ok(())
}
