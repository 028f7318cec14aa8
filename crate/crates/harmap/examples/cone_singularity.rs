//! The singular-exponent chain on the 4 pi cone: solve, measure the order,
//! measure the link eigenvalue, and compare with the predicted exponent.
//!
//!   cargo run --release --example cone_singularity

fn main() -> harmap::Result<()> {
    let cfg = harmap::harness::builtin_config("cone_4pi")?;
    let dir = std::path::Path::new("out/example_cone_4pi");
    let outcome = harmap::harness::run_experiment(&cfg, dir)?;
    for line in &outcome.summary {
        println!(
            "[{}] {}: {}",
            if line.pass { "PASS" } else { "FAIL" },
            line.label,
            line.measured
        );
    }
    println!("artifacts in {}", dir.display());
    Ok(())
}
