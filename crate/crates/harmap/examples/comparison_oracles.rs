//! Randomized verification of the comparison estimates: triangle comparison
//! on sphere and tripod, midpoint convexity, the four-point quadrilateral
//! estimate with its threshold sweep, and the cubic scale families.
//!
//!   cargo run --release --example comparison_oracles

fn main() -> harmap::Result<()> {
    let dir = std::path::Path::new("out/example_oracles");
    let outcome = harmap::harness::run_oracles(2024, 20_000, false, dir)?;
    for r in &outcome.reports {
        println!(
            "{:28} {:32} violations {:3} worst margin {:+.3e}",
            r.lemma, r.params, r.violations, r.worst_margin
        );
    }
    for (eps, delta) in &outcome.sweep {
        println!("quadrilateral threshold: eps0 {eps:<5} -> delta0 {delta}");
    }
    for (label, slope) in &outcome.slopes {
        println!("{label:32} log-log slope {slope:.3}");
    }
    println!("suite passed: {}", outcome.passed);
    Ok(())
}
