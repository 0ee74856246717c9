//! Initial bounds before the exact search: clustering upper bound,
//! isotonic and cardinality-path lower bounds, and the resulting gap.

use stepfit::{
    build_upper_bound, cardinality_sp_lb, gap, generate, solve, suffix_lb_table, FitConfig,
    GenConfig,
};

fn main() -> stepfit::Result<()> {
    let data = generate(&GenConfig::new(300, 5.0, 3))?;
    println!(
        "{:>2} {:>12} {:>12} {:>12} {:>12} {:>8}",
        "K", "ub0", "lb_iso", "lb_card", "optimum", "gap0 %"
    );
    let lb_iso = suffix_lb_table(&data)[0];
    for k in 1..=8 {
        let cfg = FitConfig::new(k);
        let (_, ub) = build_upper_bound(&data, &cfg)?;
        let lb_card = cardinality_sp_lb(&data, &cfg)?.get(0, k);
        let opt = solve(&data, &cfg)?.objective;
        println!(
            "{k:>2} {ub:>12.2} {lb_iso:>12.2} {lb_card:>12.2} {opt:>12.2} {:>8.3}",
            gap(ub, lb_iso.max(lb_card))?
        );
    }
    Ok(())
}
