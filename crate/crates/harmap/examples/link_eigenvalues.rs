//! First eigenvalues of link graphs, real- and tripod-valued, with the
//! exponent predictions they imply.
//!
//!   cargo run --release --example link_eigenvalues

use harmap::domain::{build_book, build_cone_domain, MetricField, ModelPoint};
use harmap::link::{extract_link, lambda1, predicted_exponent, LinkTarget};

fn main() -> harmap::Result<()> {
    let field = MetricField::Euclidean;
    let origin = ModelPoint { wedge: 0, coords: vec![0.0, 0.0] };
    for angle_over_pi in [1.5, 2.0, 3.0, 4.0] {
        let model = build_cone_domain(angle_over_pi * std::f64::consts::PI)?;
        let link = extract_link(&model, &field, &origin)?;
        let res = lambda1(&link, LinkTarget::Real, 512)?;
        let pred = predicted_exponent(res.lambda1, 2, 0)?;
        println!(
            "cone {angle_over_pi:>3} pi: circle length {:7.4}, lambda1 {:.6} (exact {:.6}), predicted exponent {:.4}{}",
            link.total_length(),
            res.lambda1,
            (2.0 * std::f64::consts::PI / (angle_over_pi * std::f64::consts::PI)).powi(2),
            pred.alpha,
            if pred.lipschitz { " [lipschitz]" } else { "" }
        );
    }
    // Book link: three arcs of length pi glued at both endpoints.
    let book = build_book(3)?;
    let link = extract_link(&book, &field, &origin)?;
    let real = lambda1(&link, LinkTarget::Real, 512)?;
    let tree = lambda1(&link, LinkTarget::Tripod, 256)?;
    println!(
        "book(3) theta-graph: real lambda1 {:.6}, tripod lambda1 {:.6} (spread {:.2e})",
        real.lambda1, tree.lambda1, tree.spread
    );
    Ok(())
}
