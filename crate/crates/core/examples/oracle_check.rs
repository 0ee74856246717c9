//! Cross-check every strategy against exhaustive enumeration.

use stepfit::oracle::{check_agreement, AgreementConfig};

fn main() -> stepfit::Result<()> {
    let cfg = AgreementConfig {
        instances: 100,
        seed: 42,
        ..AgreementConfig::default()
    };
    let report = check_agreement(&cfg)?;
    println!(
        "{} comparisons, {} mismatches",
        report.comparisons,
        report.mismatches.len()
    );
    for m in report.mismatches.iter().take(10) {
        println!(
            "  #{} {}: {} vs {}",
            m.instance, m.variant, m.solver, m.oracle
        );
    }
    Ok(())
}
