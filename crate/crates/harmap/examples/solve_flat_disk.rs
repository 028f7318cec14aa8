//! Solve the flat-disk problem with linear boundary data and compare the
//! metric-space relaxation against the classical finite-element route.
//!
//!   cargo run --release --example solve_flat_disk

use harmap::domain::ModelPoint;
use harmap::energy::{fem, minimize, SolveOptions};
use harmap::target::{BallConstraint, TargetPoint, TargetSpace};

fn main() -> harmap::Result<()> {
    let model = harmap::domain::build_cone_domain(2.0 * std::f64::consts::PI)?;
    let mesh = harmap::domain::triangulate(&model, 1.0, 0.05, 1.0)?;
    let field = harmap::domain::MetricField::Euclidean;
    let space = TargetSpace::Euclidean { dim: 1 };
    let value = |p: &ModelPoint| {
        let r = harmap::domain::LocalModel::planar_radius(p);
        0.5 * r * mesh.model.global_angle(p).cos()
    };
    let trace: Vec<(usize, TargetPoint)> = (0..mesh.vertices.len())
        .filter(|&i| mesh.vertices[i].boundary)
        .map(|i| {
            let (w, c) = &mesh.vertices[i].positions[0];
            let p = ModelPoint { wedge: *w, coords: c.clone() };
            (i, TargetPoint::Euclidean(vec![value(&p)]))
        })
        .collect();
    let ball = BallConstraint::new(TargetPoint::Euclidean(vec![0.0]), 0.7)?;
    let opts = SolveOptions {
        tol: 1e-13,
        relaxation: 1.9,
        ..Default::default()
    };
    let (map, report) = minimize(&mesh, &field, &space, &trace, &ball, &opts)?;
    println!(
        "relaxation: energy {} in {} sweeps (exact pi/4 = {})",
        report.total,
        report.sweeps,
        std::f64::consts::PI / 4.0
    );

    let boundary: Vec<(usize, f64)> = trace
        .iter()
        .map(|(i, p)| (*i, p.coord_vec()[0]))
        .collect();
    let oracle = fem::solve_scalar(&mesh, &field, &boundary, 1e-14)?;
    let ours: Vec<f64> = map.values.iter().map(|v| v.coord_vec()[0]).collect();
    let gap = fem::energy_norm_diff(&mesh, &field, &ours, &oracle)?;
    println!("energy-norm gap to the finite-element oracle: {gap:.3e}");
    Ok(())
}
