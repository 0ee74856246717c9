//! The two building blocks of the upper bound on their own.

use stepfit::{adjacency_cluster, pava_fit};

fn main() -> stepfit::Result<()> {
    let x = [9.0, 10.0, 8.5, 6.0, 7.0, 7.2, 3.0, 4.0, 3.5, 1.0];
    let iso = pava_fit(&x)?;
    println!("isotonic fit, sse {:.4}", iso.sse);
    for b in &iso.blocks {
        println!("  x[{}..{}] -> {:.4}", b.start, b.start + b.len, b.value);
    }
    for k in [3, 2] {
        let p = adjacency_cluster(&iso.fitted, k)?;
        println!(
            "{k} clusters: boundaries {:?} means {:.3?}",
            p.boundaries, p.values
        );
    }
    Ok(())
}
