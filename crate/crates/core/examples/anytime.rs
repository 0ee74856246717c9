//! Stop the search at a deadline and read off the certificate: the
//! incumbent's error and a lower bound on the optimum.

use std::time::Duration;

use stepfit::{fit, generate, FitConfig, GenConfig, Strategy};

fn main() -> stepfit::Result<()> {
    let data = generate(&GenConfig::new(2000, 10.0, 5))?;
    let base = FitConfig::new(12);
    let full = fit(&data, &base, Strategy::Iso)?;
    println!(
        "full run: objective {:.3} in {:.3}s",
        full.objective,
        full.wall_time.as_secs_f64()
    );
    for ms in [0, 10, 100, 500, 2000, 4000] {
        let cfg = base
            .clone()
            .with_time_limit(Some(Duration::from_millis(ms)));
        let r = fit(&data, &cfg, Strategy::Iso)?;
        println!(
            "{ms:>4} ms: {:?} incumbent {:.3} lower bound {:.3}",
            r.status(),
            r.objective,
            r.bounds.best_lb_final
        );
    }
    Ok(())
}
