//! Repeated prices: rejected by default, or merged so that observations at
//! one price always share a step.

use stepfit::{solve, Dataset, DuplicatePolicy, FitConfig};

fn main() -> stepfit::Result<()> {
    let rows = [
        (10.0, 52.0),
        (10.0, 48.0),
        (12.0, 47.0),
        (15.0, 30.0),
        (15.0, 36.0),
        (15.0, 29.0),
        (18.0, 20.0),
    ];
    match Dataset::from_rows(rows, DuplicatePolicy::Reject) {
        Err(e) => println!("reject: {e}"),
        Ok(_) => unreachable!(),
    }
    let data = Dataset::from_rows(rows, DuplicatePolicy::Merge)?;
    println!(
        "{} observations at {} prices",
        data.len(),
        data.coordinate_count()
    );
    for k in 1..=3 {
        let r = solve(&data, &FitConfig::new(k))?;
        let steps: Vec<String> = r
            .curve
            .blocks()
            .map(|b| format!("[{}, {}) {:.2}", b.start, b.end, b.value))
            .collect();
        println!("K={k} objective {:>8.3}  {}", r.objective, steps.join("  "));
    }
    Ok(())
}
