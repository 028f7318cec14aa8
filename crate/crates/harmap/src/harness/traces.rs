//! Named boundary data, resolved from config strings.

use crate::domain::{LocalModel, Mesh, ModelPoint};
use crate::error::{Error, Result};
use crate::target::{TargetPoint, TargetSpace, TreePoint};

/// Evaluate a named trace at a model point.
///
/// Scalar-valued traces ("constant", "linear", "linear_z", "cone_harmonic",
/// "book_wave") feed arc and 1d euclidean targets; "sphere_cap" produces
/// sphere points around the ball center; "tripod_pages" maps book pages to
/// tree legs.
pub fn evaluate_trace(
    name: &str,
    params: &[f64],
    model: &LocalModel,
    space: &TargetSpace,
    point: &ModelPoint,
) -> Result<TargetPoint> {
    match name {
        "constant" => space.point_from_coords(params),
        "linear" | "linear_z" | "cone_harmonic" | "book_wave" => {
            let value = scalar_trace(name, params, model, point)?;
            match space {
                TargetSpace::Arc { .. } => Ok(TargetPoint::Arc(value)),
                TargetSpace::Euclidean { dim: 1 } => Ok(TargetPoint::Euclidean(vec![value])),
                _ => Err(Error::Config(format!(
                    "trace '{name}' is scalar-valued; target must be an arc or 1d euclidean"
                ))),
            }
        }
        "sphere_cap" => {
            if !matches!(space, TargetSpace::Sphere { dim: 2 }) {
                return Err(Error::Config(
                    "trace 'sphere_cap' needs the S^2 target".into(),
                ));
            }
            let (rho0, rho1) = (param(params, 0)?, param(params, 1)?);
            let phi = model.global_angle(point);
            let rho = rho0 + rho1 * phi.cos();
            let pole = [0.0, 0.0, 1.0];
            let tangent = [rho * phi.cos(), rho * phi.sin(), 0.0];
            Ok(TargetPoint::Sphere(crate::target::sphere_exp(
                &pole, &tangent,
            )))
        }
        "tripod_pages" => {
            let tree = match space {
                TargetSpace::Tree(t) => t,
                _ => {
                    return Err(Error::Config(
                        "trace 'tripod_pages' needs a tree target".into(),
                    ))
                }
            };
            let depth = param(params, 0)?;
            let theta = point.coords[1].atan2(point.coords[0]).max(0.0);
            let edge = point.wedge % tree.edge_count();
            let offset = (depth * theta.sin()).clamp(0.0, tree.edge(edge).2);
            Ok(TargetPoint::Tree(TreePoint { edge, offset }))
        }
        other => Err(Error::Config(format!("unknown trace '{other}'"))),
    }
}

fn scalar_trace(name: &str, params: &[f64], model: &LocalModel, point: &ModelPoint) -> Result<f64> {
    match name {
        // offset + slope * x (global plane coordinate).
        "linear" => {
            let r = LocalModel::planar_radius(point);
            let phi = model.global_angle(point);
            Ok(param(params, 0)? + param(params, 1)? * r * phi.cos())
        }
        // offset + slope * z (3-dimensional models).
        "linear_z" => {
            if model.dimension != 3 {
                return Err(Error::Config("trace 'linear_z' needs a 3d model".into()));
            }
            Ok(param(params, 0)? + param(params, 1)? * point.coords[2])
        }
        // offset + amp1 cos(k1 w phi) + amp2 cos(k2 w phi), w = 2 pi / theta:
        // link harmonics of the cone; the optional second mode makes the
        // minimizer inhomogeneous so blow-ups have a visible trend.
        "cone_harmonic" => {
            let phi = model.global_angle(point);
            let w = 2.0 * std::f64::consts::PI / model.total_angle();
            let k1 = param(params, 2).unwrap_or(1.0);
            let mut value = param(params, 0)? + param(params, 1)? * (k1 * w * phi).cos();
            if let (Ok(amp2), Ok(k2)) = (param(params, 3), param(params, 4)) {
                value += amp2 * (k2 * w * phi).cos();
            }
            Ok(value)
        }
        // Per-page generic wave, continuous across the spine junctions:
        // offset + amp * (cos theta + beta_page * sin theta).
        "book_wave" => {
            let theta = point.coords[1].atan2(point.coords[0]).max(0.0);
            let beta = param(params, 2 + point.wedge).unwrap_or(0.0);
            Ok(param(params, 0)? + param(params, 1)? * (theta.cos() + beta * theta.sin()))
        }
        _ => unreachable!(),
    }
}

fn param(params: &[f64], i: usize) -> Result<f64> {
    params
        .get(i)
        .copied()
        .ok_or_else(|| Error::Config(format!("trace needs parameter {i}")))
}

/// Trace values at every boundary vertex of a mesh.
pub fn boundary_values(
    name: &str,
    params: &[f64],
    mesh: &Mesh,
    space: &TargetSpace,
) -> Result<Vec<(usize, TargetPoint)>> {
    let mut out = Vec::new();
    for (i, v) in mesh.vertices.iter().enumerate() {
        if !v.boundary {
            continue;
        }
        let (w, c) = &v.positions[0];
        let p = ModelPoint {
            wedge: *w,
            coords: c.clone(),
        };
        out.push((i, evaluate_trace(name, params, &mesh.model, space, &p)?));
    }
    Ok(out)
}
