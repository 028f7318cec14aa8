//! A 3-dimensional local model (cone x interval): tetrahedral meshing and
//! the radial profile of a solved linear map.
//!
//!   cargo run --release --example three_dimensional

fn main() -> harmap::Result<()> {
    let cfg = harmap::harness::builtin_config("dihedral_3pi_interval")?;
    let dir = std::path::Path::new("out/example_3d");
    let outcome = harmap::harness::run_experiment(&cfg, dir)?;
    for line in &outcome.summary {
        println!(
            "[{}] {}: {}",
            if line.pass { "PASS" } else { "FAIL" },
            line.label,
            line.measured
        );
    }
    let profile = std::fs::read_to_string(dir.join("profile.csv")).unwrap_or_default();
    println!("profile.csv:\n{profile}");
    Ok(())
}
