use super::*;
use crate::domain::{build_book, build_cone_domain, parse_mesh, triangulate, ModelPoint};
use crate::target::{MetricTree, TreePoint};
use rand::Rng;

fn flat_disk(h: f64) -> Mesh {
    let model = build_cone_domain(2.0 * std::f64::consts::PI).unwrap();
    triangulate(&model, 1.0, h, 1.0).unwrap()
}

/// One unit right triangle as a standalone mesh.
fn unit_triangle_mesh() -> Mesh {
    let text = "harmap-mesh v1\n\
                model book2 1\n\
                dims n=2 nu=1 radius=2 h=0.4 grading=1\n\
                rings 2\n\
                vertex 0 0 0 0 1 i\n\
                vertex 1 0 1 0 1 i\n\
                vertex 2 0 0 1 1 i\n\
                simplex 0 1 2 0\n";
    parse_mesh(text).unwrap()
}

fn arc_map(space_len: f64, values: Vec<f64>) -> PLMap {
    let space = TargetSpace::Arc { length: space_len };
    PLMap {
        space,
        values: values.into_iter().map(TargetPoint::Arc).collect(),
        ball: BallConstraint::new(TargetPoint::Arc(space_len / 2.0), 0.7).unwrap(),
    }
}

#[test]
fn constant_map_has_zero_energy() {
    let mesh = flat_disk(0.1);
    let map = arc_map(1.0, vec![0.5; mesh.vertices.len()]);
    let rep = total_energy(&mesh, &MetricField::Euclidean, &map).unwrap();
    assert!(rep.total.abs() < 1e-14);
}

#[test]
fn unit_triangle_linear_energy() {
    // Arclength embedding of x^1 on the flat unit right triangle:
    // |grad u|^2 = 1, energy = area = 1/2.
    let mesh = unit_triangle_mesh();
    let map = arc_map(1.0, vec![0.0, 1.0, 0.0]);
    let e = simplex_energy(&mesh, &MetricField::Euclidean, &map, 0).unwrap();
    assert!((e - 0.5).abs() < 1e-14, "energy {e}");
}

#[test]
fn matches_fem_stiffness_on_random_triangles() {
    // Real-valued energy agrees with the classical cotangent form.
    let mut rng = crate::comparison::sample_rng(31, 0);
    for _ in 0..200 {
        let coords: Vec<Vec<f64>> = (0..3)
            .map(|_| vec![rng.gen::<f64>() * 2.0, rng.gen::<f64>() * 2.0])
            .collect();
        let pos: Vec<&[f64]> = coords.iter().map(|c| c.as_slice()).collect();
        let area = crate::domain::signed_volume(&pos).abs();
        if area < 1e-3 {
            continue;
        }
        let mut text = String::from(
            "harmap-mesh v1\nmodel book2 1\ndims n=2 nu=1 radius=5 h=1 grading=1\nrings 5\n",
        );
        for (i, c) in coords.iter().enumerate() {
            text.push_str(&format!("vertex {i} 0 {} {} 1 i\n", c[0], c[1]));
        }
        text.push_str("simplex 0 1 2 0\n");
        let mesh = parse_mesh(&text).unwrap();
        let u = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        let map = PLMap {
            space: TargetSpace::Euclidean { dim: 1 },
            values: u.iter().map(|&x| TargetPoint::Euclidean(vec![x * 0.2])).collect(),
            ball: BallConstraint::new(TargetPoint::Euclidean(vec![0.1]), 0.7).unwrap(),
        };
        let ours = simplex_energy(&mesh, &MetricField::Euclidean, &map, 0).unwrap();
        let scaled: Vec<f64> = u.iter().map(|&x| x * 0.2).collect();
        let fem = fem::scalar_energy(&mesh, &MetricField::Euclidean, &scaled).unwrap();
        assert!(
            (ours - fem).abs() < 1e-12 * (1.0 + fem.abs()),
            "gram {ours} vs cotangent {fem}"
        );
    }
}

/// Global plane coordinate of a vertex on a cone model (x = r cos phi with
/// phi the global angle across wedges).
fn global_x(mesh: &Mesh, i: usize) -> f64 {
    let (w, c) = &mesh.vertices[i].positions[0];
    let p = ModelPoint {
        wedge: *w,
        coords: c.clone(),
    };
    let r = crate::domain::LocalModel::planar_radius(&p);
    r * mesh.model.global_angle(&p).cos()
}

#[test]
fn linear_map_energy_on_disk() {
    // u = a x on the unit disk: energy = pi a^2, within 2% at h = 0.05.
    let mesh = flat_disk(0.05);
    let a = 0.4;
    let values: Vec<TargetPoint> = (0..mesh.vertices.len())
        .map(|i| TargetPoint::Euclidean(vec![a * global_x(&mesh, i)]))
        .collect();
    let map = PLMap {
        space: TargetSpace::Euclidean { dim: 1 },
        values,
        ball: BallConstraint::new(TargetPoint::Euclidean(vec![0.0]), 0.7).unwrap(),
    };
    let rep = total_energy(&mesh, &MetricField::Euclidean, &map).unwrap();
    let exact = std::f64::consts::PI * a * a;
    assert!(
        (rep.total - exact).abs() < 0.02 * exact,
        "{} vs {exact}",
        rep.total
    );
}

#[test]
fn directional_energy_cases() {
    // Single half-plane page so the chart coordinates are global and a
    // constant vector field makes sense across the whole mesh.
    let model = build_book(1).unwrap();
    let mesh = triangulate(&model, 1.0, 0.08, 1.0).unwrap();
    let a = 0.3;
    let values: Vec<TargetPoint> = (0..mesh.vertices.len())
        .map(|i| TargetPoint::Euclidean(vec![a * mesh.vertices[i].positions[0].1[0]]))
        .collect();
    let map = PLMap {
        space: TargetSpace::Euclidean { dim: 1 },
        values,
        ball: BallConstraint::new(TargetPoint::Euclidean(vec![0.0]), 0.7).unwrap(),
    };
    let field = MetricField::Euclidean;
    // Z = 0 gives 0.
    let zero = directional_energy(&mesh, &field, &map, &|_| vec![0.0, 0.0]).unwrap();
    assert!(zero.abs() < 1e-15);
    // Z = e1 on a linear map: |du/dx|^2 * area (half disk).
    let e1 = directional_energy(&mesh, &field, &map, &|_| vec![1.0, 0.0]).unwrap();
    let exact = a * a * std::f64::consts::FRAC_PI_2;
    assert!((e1 - exact).abs() < 0.02 * exact, "{e1} vs {exact}");
    // Z = e2 is orthogonal to the gradient.
    let e2 = directional_energy(&mesh, &field, &map, &|_| vec![0.0, 1.0]).unwrap();
    assert!(e2.abs() < 1e-12, "{e2}");
}

#[test]
fn pullback_form_identities() {
    // Random sphere-valued map on a coarse disk: polarization symmetry and
    // the parallelogram identity hold to roundoff.
    let mesh = flat_disk(0.15);
    let mut rng = crate::comparison::sample_rng(32, 1);
    let pole = vec![0.0, 0.0, 1.0];
    let values: Vec<TargetPoint> = (0..mesh.vertices.len())
        .map(|_| TargetPoint::Sphere(crate::comparison::random_point_near(&mut rng, &pole, 0.3)))
        .collect();
    let map = PLMap {
        space: TargetSpace::Sphere { dim: 2 },
        values,
        ball: BallConstraint::new(TargetPoint::Sphere(pole), 0.7).unwrap(),
    };
    let field = MetricField::Euclidean;
    let z = |s: usize| vec![(s % 7) as f64 * 0.1 - 0.3, 0.4];
    let w = |s: usize| vec![0.2, (s % 5) as f64 * 0.1 - 0.2];
    let pzw = pullback_form(&mesh, &field, &map, &z, &w).unwrap();
    let pwz = pullback_form(&mesh, &field, &map, &w, &z).unwrap();
    assert!((pzw - pwz).abs() < 1e-12, "symmetry {pzw} vs {pwz}");
    // Parallelogram identity.
    let zw_plus = directional_energy(&mesh, &field, &map, &|s| {
        z(s).iter().zip(w(s)).map(|(a, b)| a + b).collect()
    })
    .unwrap();
    let zw_minus = directional_energy(&mesh, &field, &map, &|s| {
        z(s).iter().zip(w(s)).map(|(a, b)| a - b).collect()
    })
    .unwrap();
    let ez = directional_energy(&mesh, &field, &map, &z).unwrap();
    let ew = directional_energy(&mesh, &field, &map, &w).unwrap();
    assert!(
        (zw_plus + zw_minus - 2.0 * ez - 2.0 * ew).abs() < 1e-12,
        "parallelogram identity"
    );
}

fn boundary_trace(
    mesh: &Mesh,
    f: impl Fn(&ModelPoint) -> TargetPoint,
) -> Vec<(usize, TargetPoint)> {
    (0..mesh.vertices.len())
        .filter(|&i| mesh.vertices[i].boundary)
        .map(|i| {
            let (w, c) = &mesh.vertices[i].positions[0];
            (
                i,
                f(&ModelPoint {
                    wedge: *w,
                    coords: c.clone(),
                }),
            )
        })
        .collect()
}

#[test]
fn constant_trace_solves_immediately() {
    let mesh = flat_disk(0.1);
    let space = TargetSpace::Arc { length: 1.0 };
    let trace = boundary_trace(&mesh, |_| TargetPoint::Arc(0.5));
    let ball = BallConstraint::new(TargetPoint::Arc(0.5), 0.7).unwrap();
    let (map, rep) = minimize(
        &mesh,
        &MetricField::Euclidean,
        &space,
        &trace,
        &ball,
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(rep.converged);
    assert!(rep.sweeps <= 2);
    assert!(rep.total < 1e-20);
    assert!(map.values.iter().all(|v| matches!(v, TargetPoint::Arc(s) if (*s - 0.5).abs() < 1e-15)));
}

#[test]
fn arc_valued_solver_matches_scalar_oracle() {
    // Linear boundary data scaled into an arc: the minimizer composes the
    // scalar harmonic solution with the arclength embedding.
    let h = 0.1;
    let mesh = flat_disk(h);
    let field = MetricField::Euclidean;
    let space = TargetSpace::Arc { length: 0.5 };
    let value = |p: &ModelPoint| 0.25 + 0.2 * p.coords[0];
    let trace = boundary_trace(&mesh, |p| TargetPoint::Arc(value(p)));
    let ball = BallConstraint::new(TargetPoint::Arc(0.25), 0.6).unwrap();
    let opts = SolveOptions {
        tol: 1e-11,
        ..Default::default()
    };
    let (map, rep) = minimize(&mesh, &field, &space, &trace, &ball, &opts).unwrap();
    assert!(rep.converged, "sweeps {}", rep.sweeps);
    // Energy history is nonincreasing.
    for w in rep.history.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0].abs()), "history rises");
    }
    // Scalar oracle on the same boundary data.
    let boundary: Vec<(usize, f64)> = (0..mesh.vertices.len())
        .filter(|&i| mesh.vertices[i].boundary)
        .map(|i| {
            let (w, c) = &mesh.vertices[i].positions[0];
            let _ = w;
            (
                i,
                value(&ModelPoint {
                    wedge: 0,
                    coords: c.clone(),
                }),
            )
        })
        .collect();
    let oracle = fem::solve_scalar(&mesh, &field, &boundary, 1e-14).unwrap();
    let mut sup = 0.0f64;
    for (i, v) in map.values.iter().enumerate() {
        let s = match v {
            TargetPoint::Arc(s) => *s,
            _ => unreachable!(),
        };
        sup = sup.max((s - oracle[i]).abs());
    }
    assert!(sup < 3.0 * h * h, "sup distance {sup} vs 3h^2 {}", 3.0 * h * h);
}

#[test]
fn solution_is_a_discrete_critical_point() {
    let mesh = flat_disk(0.12);
    let field = MetricField::Euclidean;
    let space = TargetSpace::Sphere { dim: 2 };
    let pole = vec![0.0, 0.0, 1.0];
    let trace = boundary_trace(&mesh, |p| {
        let phi = p.coords[1].atan2(p.coords[0]);
        let rho = 0.3 + 0.1 * phi.cos();
        let v = vec![
            rho.sin() * phi.cos(),
            rho.sin() * phi.sin(),
            rho.cos(),
        ];
        TargetPoint::Sphere(v)
    });
    let ball = BallConstraint::new(TargetPoint::Sphere(pole), 0.7).unwrap();
    let opts = SolveOptions {
        tol: 1e-10,
        ..Default::default()
    };
    let (map, rep) = minimize(&mesh, &field, &space, &trace, &ball, &opts).unwrap();
    assert!(rep.converged);
    let form = EnergyForm::assemble(&mesh, &field).unwrap();
    // Re-running any single vertex update moves it less than tol.
    for v in (0..mesh.vertices.len()).filter(|&i| !mesh.vertices[i].boundary) {
        let target = space
            .frechet_mean_seeded(
                &form.adjacency[v]
                    .iter()
                    .map(|&(j, _)| map.values[j].clone())
                    .collect::<Vec<_>>(),
                &form.adjacency[v].iter().map(|&(_, w)| w).collect::<Vec<_>>(),
                1e-12,
                &map.values[v],
            )
            .unwrap();
        let target = space.project_to_ball(&target, &ball).unwrap();
        let moved = space.distance_unchecked(&map.values[v], &target);
        // Neighbors later in the sweep order moved by up to tol each after
        // v's last update, so the re-run can move v by a small multiple.
        assert!(moved < 1e-8, "vertex {v} moved {moved}");
    }
    // Comparison maps: random admissible perturbations never decrease energy.
    let mut rng = crate::comparison::sample_rng(33, 2);
    let base = form.total(&space, &map.values);
    for _ in 0..100 {
        let mut values = map.values.clone();
        for _ in 0..3 {
            let v = loop {
                let cand = rng.gen_range(0..values.len());
                if !mesh.vertices[cand].boundary {
                    break cand;
                }
            };
            let dir = crate::comparison::random_tangent(
                &mut rng,
                match &values[v] {
                    TargetPoint::Sphere(x) => x,
                    _ => unreachable!(),
                },
            );
            let eps = 1e-3 * rng.gen::<f64>();
            let moved = crate::target::sphere_exp(
                match &values[v] {
                    TargetPoint::Sphere(x) => x,
                    _ => unreachable!(),
                },
                &dir.iter().map(|d| d * eps).collect::<Vec<_>>(),
            );
            let cand = TargetPoint::Sphere(moved);
            values[v] = space.project_to_ball(&cand, &ball).unwrap();
        }
        let perturbed = form.total(&space, &values);
        assert!(
            perturbed >= base - 1e-10,
            "perturbation decreased energy: {perturbed} < {base}"
        );
    }
}

#[test]
fn lifted_energy_band_per_edge() {
    let mesh = flat_disk(0.12);
    let field = MetricField::Euclidean;
    let space = TargetSpace::Sphere { dim: 2 };
    let mut rng = crate::comparison::sample_rng(34, 3);
    let pole = vec![0.0, 0.0, 1.0];
    let values: Vec<TargetPoint> = (0..mesh.vertices.len())
        .map(|_| TargetPoint::Sphere(crate::comparison::random_point_near(&mut rng, &pole, 0.4)))
        .collect();
    let map = PLMap {
        space: space.clone(),
        values,
        ball: BallConstraint::new(TargetPoint::Sphere(pole), 0.7).unwrap(),
    };
    let lifted = map.lift();
    let form = EnergyForm::assemble(&mesh, &field).unwrap();
    let mut lower_total = 0.0;
    let mut upper_total = 0.0;
    for &(a, b, w) in &form.edges {
        let d = space.distance_unchecked(&map.values[a], &map.values[b]);
        let dd = lifted
            .space
            .distance_unchecked(&lifted.values[a], &lifted.values[b]);
        // Per-edge band: max(d^2/2, d^2 (1 - d^2)) <= D^2 <= d^2.
        let lo = (0.5 * d * d).max(d * d * (1.0 - d * d));
        assert!(
            dd * dd >= lo - 1e-12 && dd * dd <= d * d + 1e-12,
            "edge band violated: d2 {} D2 {}",
            d * d,
            dd * dd
        );
        if w >= 0.0 {
            lower_total += w * lo;
            upper_total += w * d * d;
        } else {
            lower_total += w * d * d;
            upper_total += w * lo;
        }
    }
    let e_lift = form.total(&lifted.space, &lifted.values);
    assert!(
        e_lift >= lower_total - 1e-10 && e_lift <= upper_total + 1e-10,
        "lifted energy {e_lift} outside [{lower_total}, {upper_total}]"
    );
}

#[test]
fn tree_valued_solver_runs() {
    // Book domain into the tripod: boundary data per page pulls into the
    // matching leg; the spine maps near the branch point.
    let model = build_book(3).unwrap();
    let mesh = triangulate(&model, 1.0, 0.15, 1.0).unwrap();
    let tree = MetricTree::tripod();
    let space = TargetSpace::Tree(tree);
    let trace = boundary_trace(&mesh, |p| {
        let depth = (p.coords[1] / 1.0) * 0.5;
        TargetPoint::Tree(TreePoint {
            edge: p.wedge,
            offset: depth.max(0.0),
        })
    });
    let center = TargetPoint::Tree(TreePoint { edge: 0, offset: 0.0 });
    let ball = BallConstraint::new(center, 0.7).unwrap();
    let (map, rep) = minimize(
        &mesh,
        &MetricField::Euclidean,
        &space,
        &trace,
        &ball,
        &SolveOptions::default(),
    )
    .unwrap();
    assert!(rep.converged);
    assert!(rep.total > 0.0);
    map.validate(&mesh).unwrap();
    for w in rep.history.windows(2) {
        assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()));
    }
}

#[test]
fn trace_outside_ball_rejected() {
    let mesh = flat_disk(0.15);
    let space = TargetSpace::Arc { length: 1.0 };
    let trace = boundary_trace(&mesh, |_| TargetPoint::Arc(1.0));
    let ball = BallConstraint::new(TargetPoint::Arc(0.0), 0.5).unwrap();
    assert!(matches!(
        minimize(
            &mesh,
            &MetricField::Euclidean,
            &space,
            &trace,
            &ball,
            &SolveOptions::default()
        ),
        Err(Error::Invariant(_))
    ));
}

#[test]
fn nonconvergence_is_flagged_not_hidden() {
    let mesh = flat_disk(0.08);
    let space = TargetSpace::Arc { length: 0.5 };
    let trace = boundary_trace(&mesh, |p| TargetPoint::Arc(0.25 + 0.2 * p.coords[0]));
    let ball = BallConstraint::new(TargetPoint::Arc(0.25), 0.6).unwrap();
    let opts = SolveOptions {
        tol: 1e-12,
        max_sweeps: 3,
        ..Default::default()
    };
    let (_, rep) = minimize(&mesh, &MetricField::Euclidean, &space, &trace, &ball, &opts).unwrap();
    assert!(!rep.converged);
    assert_eq!(rep.sweeps, 3);
}

#[test]
fn checkpoint_roundtrip_and_resume() {
    let mesh = flat_disk(0.15);
    let space = TargetSpace::Arc { length: 0.5 };
    let trace = boundary_trace(&mesh, |p| TargetPoint::Arc(0.25 + 0.2 * p.coords[0]));
    let ball = BallConstraint::new(TargetPoint::Arc(0.25), 0.6).unwrap();
    let (map, _) = minimize(
        &mesh,
        &MetricField::Euclidean,
        &space,
        &trace,
        &ball,
        &SolveOptions::default(),
    )
    .unwrap();
    let text = checkpoint::write_checkpoint_string(&map);
    let back = checkpoint::parse_checkpoint(&text).unwrap();
    assert_eq!(back.values, map.values);
    assert_eq!(checkpoint::write_checkpoint_string(&back), text);
    // Resuming from the checkpoint converges immediately.
    let (resumed, rep) = minimize_with_init(
        &mesh,
        &MetricField::Euclidean,
        &space,
        &trace,
        &ball,
        &SolveOptions::default(),
        Some(&back),
    )
    .unwrap();
    assert!(rep.converged);
    assert!(rep.sweeps <= 2, "resume should converge at once, took {}", rep.sweeps);
    assert_eq!(resumed.values.len(), map.values.len());
}

#[test]
fn cone_minimizer_matches_separation_of_variables() {
    // Fundamental-mode trace on the 4 pi cone: the continuum minimizer is
    // a r^(1/2) cos(phi/2); the solved map must reproduce it.
    let model = build_cone_domain(4.0 * std::f64::consts::PI).unwrap();
    let mesh = triangulate(&model, 1.0, 0.04, 1.5).unwrap();
    let field = MetricField::Euclidean;
    let space = TargetSpace::Euclidean { dim: 1 };
    let a = 0.45;
    let exact = |p: &ModelPoint| {
        let r = crate::domain::LocalModel::planar_radius(p);
        let phi = mesh.model.global_angle(p);
        a * r.sqrt() * (phi / 2.0).cos()
    };
    let trace = boundary_trace(&mesh, |p| TargetPoint::Euclidean(vec![exact(p)]));
    let ball = BallConstraint::new(TargetPoint::Euclidean(vec![0.0]), 0.7).unwrap();
    let opts = SolveOptions {
        tol: 1e-11,
        relaxation: 1.9,
        ..Default::default()
    };
    let (map, rep) = minimize(&mesh, &field, &space, &trace, &ball, &opts).unwrap();
    assert!(rep.converged);
    let mut sup = 0.0f64;
    for (i, v) in map.values.iter().enumerate() {
        let (w, c) = &mesh.vertices[i].positions[0];
        let p = ModelPoint {
            wedge: *w,
            coords: c.clone(),
        };
        sup = sup.max((v.coord_vec()[0] - exact(&p)).abs());
    }
    assert!(sup < 0.01, "sup distance to the separated solution: {sup}");
}
