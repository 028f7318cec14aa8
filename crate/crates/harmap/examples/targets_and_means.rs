//! Target spaces: distances, geodesic interpolation, Fréchet means and ball
//! projection on the sphere and on a metric tree.
//!
//!   cargo run --example targets_and_means

use harmap::target::{BallConstraint, MetricTree, TargetPoint, TargetSpace, TreePoint};

fn main() -> harmap::Result<()> {
    let sphere = TargetSpace::Sphere { dim: 2 };
    let p = TargetPoint::sphere(vec![1.0, 0.0, 0.0])?;
    let q = TargetPoint::sphere(vec![0.0, 1.0, 0.0])?;
    println!("sphere distance P-Q: {}", sphere.distance(&p, &q)?);
    let mid = sphere.interpolate(&p, &q, 0.5)?;
    println!("midpoint: {:?}", mid.coord_vec());

    // Fréchet mean of a symmetric triangle on a cap sits at its center.
    let pts: Vec<TargetPoint> = (0..3)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            TargetPoint::sphere(vec![
                0.2f64.sin() * phi.cos(),
                0.2f64.sin() * phi.sin(),
                0.2f64.cos(),
            ])
            .unwrap()
        })
        .collect();
    let mean = sphere.frechet_mean(&pts, &[1.0, 1.0, 1.0], 1e-12)?;
    println!("cap-triangle mean: {:?}", mean.coord_vec());

    // Projection onto a ball around the north pole.
    let ball = BallConstraint::new(TargetPoint::sphere(vec![0.0, 0.0, 1.0])?, 0.5)?;
    let proj = sphere.project_to_ball(&p, &ball)?;
    println!(
        "projected equator point, distance to center: {}",
        sphere.distance(&proj, &ball.center)?
    );

    // The tripod: branching means.
    let tree = TargetSpace::Tree(MetricTree::tripod());
    let legs: Vec<TargetPoint> = (0..3)
        .map(|e| TargetPoint::Tree(TreePoint { edge: e, offset: 0.5 }))
        .collect();
    let center = tree.frechet_mean(&legs, &[1.0; 3], 1e-12)?;
    println!("tripod symmetric mean: {:?}", center.coord_vec());
    let pulled = tree.frechet_mean(&legs, &[4.0, 1.0, 1.0], 1e-12)?;
    println!("tripod mean with a heavy leg: {:?}", pulled.coord_vec());
    Ok(())
}
