//! Hölder exponent fits on r^k data and blow-up homogeneity checks.
//!
//!   cargo run --release --example holder_and_blowup

use harmap::analytics::{blow_up, holder_fit, homogeneity_deviation, PairPolicy};
use harmap::domain::{build_cone_domain, triangulate, LocalModel, MetricField, ModelPoint};
use harmap::energy::PLMap;
use harmap::target::{BallConstraint, TargetPoint, TargetSpace};

fn homogeneous_map(mesh: &harmap::domain::Mesh, a: f64, k: f64) -> PLMap {
    let values = (0..mesh.vertices.len())
        .map(|i| {
            let (w, c) = &mesh.vertices[i].positions[0];
            let p = ModelPoint { wedge: *w, coords: c.clone() };
            let r = LocalModel::planar_radius(&p);
            let phi = mesh.model.global_angle(&p);
            TargetPoint::Euclidean(vec![a * r.powf(k) * (k * phi).cos()])
        })
        .collect();
    PLMap {
        space: TargetSpace::Euclidean { dim: 1 },
        values,
        ball: BallConstraint::new(TargetPoint::Euclidean(vec![0.0]), 0.7).unwrap(),
    }
}

fn main() -> harmap::Result<()> {
    for (k, angle_over_pi) in [(0.5, 4.0), (2.0 / 3.0, 3.0), (1.0, 2.0)] {
        let model = build_cone_domain(angle_over_pi * std::f64::consts::PI)?;
        let mesh = triangulate(&model, 1.0, 0.03, 1.5)?;
        let map = homogeneous_map(&mesh, 0.5, k);
        let fit = holder_fit(&mesh, &map, &PairPolicy::default())?;
        println!(
            "r^{k:.3} data on the {angle_over_pi} pi cone: fitted exponent {:.4} (residual {:.3})",
            fit.exponent, fit.residual
        );
    }

    // Exactly homogeneous data: deviation at quadrature scale.
    let model = build_cone_domain(2.0 * std::f64::consts::PI)?;
    let mesh = triangulate(&model, 1.0, 0.02, 1.5)?;
    let field = MetricField::Euclidean;
    for k in [1.0, 2.0] {
        let map = homogeneous_map(&mesh, 0.5, k);
        for lambda in [0.4, 0.2] {
            let frame = blow_up(&mesh, &field, &map, lambda, 8, 64, 2048)?;
            println!(
                "k={k}: homogeneity deviation at lambda {lambda}: {:.3e}",
                homogeneity_deviation(&frame, k)
            );
        }
    }
    Ok(())
}
