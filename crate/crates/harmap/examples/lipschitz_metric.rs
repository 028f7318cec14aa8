//! A Lipschitz (not smooth) metric field: audit of its declared constants
//! and the full singular-cone experiment under it.
//!
//!   cargo run --release --example lipschitz_metric

use harmap::domain::{audit_metric, build_cone_domain, MetricField};

fn main() -> harmap::Result<()> {
    let field = MetricField::ConformalLipschitz { a: 0.2 };
    let model = build_cone_domain(4.0 * std::f64::consts::PI)?;
    let audit = audit_metric(&field, &model, 1.0, 20_000, 5);
    println!(
        "conformal (1 + 0.2 |x|) metric: sampled Lipschitz ratio {:.4} (declared {:.4})",
        audit.worst_lipschitz_ratio,
        field.lipschitz_constant(2, 1.0)
    );
    println!(
        "sampled ellipticity range [{:.4}, {:.4}] (declared lambda {:.4})",
        audit.worst_lower_ellipticity,
        audit.worst_upper_ellipticity,
        field.ellipticity(2, 1.0)
    );

    let cfg = harmap::harness::builtin_config("cone_4pi_lipschitz")?;
    let outcome = harmap::harness::run_experiment(&cfg, std::path::Path::new("out/example_lipschitz"))?;
    for line in &outcome.summary {
        println!(
            "[{}] {}: {}",
            if line.pass { "PASS" } else { "FAIL" },
            line.label,
            line.measured
        );
    }
    Ok(())
}
