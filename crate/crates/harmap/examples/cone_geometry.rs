//! The metric cone over a target: distances, geodesics through the apex,
//! the lift onto the unit slice and its distance bounds.
//!
//!   cargo run --example cone_geometry

use harmap::cone::{cone_distance, cone_interpolate, lift, project_unit, ConePoint};
use harmap::target::{TargetPoint, TargetSpace};

fn main() -> harmap::Result<()> {
    let base = TargetSpace::Sphere { dim: 2 };
    let p = TargetPoint::sphere(vec![1.0, 0.0, 0.0])?;
    let q = TargetPoint::sphere(vec![0.0, 1.0, 0.0])?;

    let a = ConePoint::new(p.clone(), 1.0);
    let b = ConePoint::new(q.clone(), 1.0);
    println!("D([P,1],[Q,1]) with d = pi/2: {}", cone_distance(&base, &a, &b));

    let mid = cone_interpolate(&base, &a, &b, 0.5)?;
    println!("cone midpoint height: {}", mid.height);

    // Lift band: 1/2 <= D^2/d^2 <= 1 for d < pi/2.
    let mut rng = harmap::comparison::sample_rng(1, 0);
    let mut worst_low = f64::INFINITY;
    let mut worst_high = 0.0f64;
    for _ in 0..100_000 {
        let x = harmap::comparison::random_unit_vector(&mut rng, 3);
        let y = harmap::comparison::random_point_near(&mut rng, &x, 1.57);
        let d = base.distance_unchecked(
            &TargetPoint::Sphere(x.clone()),
            &TargetPoint::Sphere(y.clone()),
        );
        if d < 1e-9 {
            continue;
        }
        let dd = cone_distance(
            &base,
            &lift(&TargetPoint::Sphere(x)),
            &lift(&TargetPoint::Sphere(y)),
        );
        let ratio = dd * dd / (d * d);
        worst_low = worst_low.min(ratio);
        worst_high = worst_high.max(ratio);
    }
    println!("lift ratio D^2/d^2 over 1e5 samples: [{worst_low:.6}, {worst_high:.6}] (band [0.5, 1])");

    let up = project_unit(&ConePoint::new(p, 2.0))?;
    println!("projection of [P,2] has height {}", up.height);
    Ok(())
}
