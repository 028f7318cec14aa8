//! Discrete energy of piecewise-linear maps into metric targets and the
//! constrained minimizer.
//!
//! Per simplex the energy is
//!
//!   E(s) = vol_g(s) * sum_{i<j} w_ij(s) d^2(u_i, u_j),
//!
//! with w_ij = -<grad lambda_i, grad lambda_j>_{g^{-1}(barycenter)} from the
//! affine-gradient Gram identity. For a real-valued map this reproduces the
//! finite-element Dirichlet energy of the affine interpolant exactly; for
//! metric targets the squared coordinate differences become squared target
//! distances.
//!
//! The minimizer runs Gauss-Seidel sweeps in a fixed vertex order: each
//! interior vertex moves to the weighted Fréchet mean of its neighbors and
//! is projected back into the constraint ball. Each such update minimizes
//! the local energy exactly (the local energy *is* the Fréchet objective),
//! so the energy history is nonincreasing.

pub mod checkpoint;
pub mod fem;

use crate::domain::{simplex_weights, Mesh, MetricField};
use crate::error::{Error, Result};
use crate::target::{BallConstraint, CurvatureClass, TargetPoint, TargetSpace};

/// Piecewise-linear map: one target point per mesh vertex, boundary pinned.
#[derive(Debug, Clone)]
pub struct PLMap {
    pub space: TargetSpace,
    pub values: Vec<TargetPoint>,
    pub ball: BallConstraint,
}

impl PLMap {
    /// Validate the ball invariant and value count against a mesh.
    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.values.len() != mesh.vertices.len() {
            return Err(Error::Degenerate(format!(
                "map has {} values for {} vertices",
                self.values.len(),
                mesh.vertices.len()
            )));
        }
        for (i, v) in self.values.iter().enumerate() {
            let d = self.space.distance(&self.ball.center, v)?;
            if d > self.ball.radius + 1e-9 {
                return Err(Error::Invariant(format!(
                    "vertex {i} image lies outside the constraint ball (d = {d:.6})"
                )));
            }
        }
        Ok(())
    }

    /// Lift into the cone over the target: x -> [u(x), 1].
    pub fn lift(&self) -> PLMap {
        let space = TargetSpace::Cone {
            base: Box::new(self.space.clone()),
        };
        let values = self
            .values
            .iter()
            .map(|p| TargetPoint::Cone(Box::new(crate::cone::lift(p))))
            .collect();
        let center = TargetPoint::Cone(Box::new(crate::cone::lift(&self.ball.center)));
        PLMap {
            space,
            values,
            ball: BallConstraint {
                center,
                radius: self.ball.radius,
            },
        }
    }

    /// Evaluate at a model point by barycentric combination (nested geodesic
    /// interpolation; exact for flat targets).
    pub fn eval(&self, mesh: &Mesh, point: &crate::domain::ModelPoint) -> Result<TargetPoint> {
        let (si, lam) = mesh
            .locate(point)
            .ok_or_else(|| Error::OutsideDomain(point.coords[0]))?;
        let ids = &mesh.simplices[si].vertices;
        let mut acc = self.values[ids[0]].clone();
        let mut wacc = lam[0];
        for k in 1..ids.len() {
            let w = lam[k];
            if w <= 0.0 {
                continue;
            }
            if wacc <= 0.0 {
                acc = self.values[ids[k]].clone();
                wacc = w;
                continue;
            }
            acc = self
                .space
                .interpolate(&acc, &self.values[ids[k]], w / (wacc + w))?;
            wacc += w;
        }
        Ok(acc)
    }
}

/// Assembled discretization of the Dirichlet form on a mesh.
#[derive(Debug, Clone)]
pub struct EnergyForm {
    /// Assembled edge weights (global vertex pairs, i < j).
    pub edges: Vec<(usize, usize, f64)>,
    /// Neighbor lists with assembled weights.
    pub adjacency: Vec<Vec<(usize, f64)>>,
}

impl EnergyForm {
    pub fn assemble(mesh: &Mesh, field: &MetricField) -> Result<EnergyForm> {
        let dim = mesh.dimension();
        let mut edge_map: std::collections::HashMap<(usize, usize), f64> =
            std::collections::HashMap::new();
        for s in &mesh.simplices {
            let pos = mesh.simplex_positions(s);
            let bary = mesh.barycenter(s);
            let (_, sqrt_det, ginv) = field.eval_full(dim, &bary)?;
            let vol = crate::domain::signed_volume(&pos).abs() * sqrt_det;
            let mut pairs = simplex_weights(&pos, &ginv);
            for p in &mut pairs {
                p.2 *= vol;
            }
            for &(i, j, w) in &pairs {
                let (a, b) = (
                    s.vertices[i].min(s.vertices[j]),
                    s.vertices[i].max(s.vertices[j]),
                );
                *edge_map.entry((a, b)).or_insert(0.0) += w;
            }
        }
        let mut edges: Vec<(usize, usize, f64)> =
            edge_map.into_iter().map(|((a, b), w)| (a, b, w)).collect();
        edges.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut adjacency = vec![Vec::new(); mesh.vertices.len()];
        for &(a, b, w) in &edges {
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        Ok(EnergyForm { edges, adjacency })
    }

    /// Total energy over the assembled edges.
    pub fn total(&self, space: &TargetSpace, values: &[TargetPoint]) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b, w)| {
                let d = space.distance_unchecked(&values[a], &values[b]);
                w * d * d
            })
            .sum()
    }

    /// Energy contribution of one vertex (its incident edges).
    pub fn local_energy(&self, space: &TargetSpace, values: &[TargetPoint], v: usize) -> f64 {
        self.adjacency[v]
            .iter()
            .map(|&(n, w)| {
                let d = space.distance_unchecked(&values[v], &values[n]);
                w * d * d
            })
            .sum()
    }
}

/// Energy of one simplex of a PL map.
pub fn simplex_energy(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    simplex: usize,
) -> Result<f64> {
    let s = &mesh.simplices[simplex];
    let pos = mesh.simplex_positions(s);
    let vol_euclid = crate::domain::signed_volume(&pos).abs();
    if vol_euclid <= 1e-14 {
        return Err(Error::Degenerate(format!("simplex {simplex} degenerate")));
    }
    let bary = mesh.barycenter(s);
    let (_, sqrt_det, ginv) = field.eval_full(mesh.dimension(), &bary)?;
    let pairs = simplex_weights(&pos, &ginv);
    let mut e = 0.0;
    for (i, j, w) in pairs {
        let d = map
            .space
            .distance_unchecked(&map.values[s.vertices[i]], &map.values[s.vertices[j]]);
        e += w * d * d;
    }
    Ok(e * vol_euclid * sqrt_det)
}

/// Total energy with the per-simplex breakdown.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub total: f64,
    pub per_simplex: Vec<f64>,
    pub sweeps: usize,
    pub final_move: f64,
    /// Energy after each sweep (nonincreasing).
    pub history: Vec<f64>,
    pub converged: bool,
}

pub fn total_energy(mesh: &Mesh, field: &MetricField, map: &PLMap) -> Result<EnergyReport> {
    let mut per_simplex = Vec::with_capacity(mesh.simplices.len());
    let mut total = 0.0;
    for i in 0..mesh.simplices.len() {
        let e = simplex_energy(mesh, field, map, i)?;
        per_simplex.push(e);
        total += e;
    }
    Ok(EnergyReport {
        total,
        per_simplex,
        sweeps: 0,
        final_move: 0.0,
        history: Vec::new(),
        converged: true,
    })
}

/// Directional energy of a per-simplex constant vector field Z:
/// integral of |u_* Z|^2 d mu_g, via the same Gram identity with
/// coefficients c_i = <Z, grad lambda_i>.
pub fn directional_energy(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    z: &dyn Fn(usize) -> Vec<f64>,
) -> Result<f64> {
    let dim = mesh.dimension();
    let mut total = 0.0;
    for (si, s) in mesh.simplices.iter().enumerate() {
        let pos = mesh.simplex_positions(s);
        let bary = mesh.barycenter(s);
        let (_, sqrt_det, _) = field.eval_full(dim, &bary)?;
        let vol = crate::domain::signed_volume(&pos).abs() * sqrt_det;
        let grads = barycentric_gradients(&pos);
        let zs = z(si);
        let c: Vec<f64> = grads
            .iter()
            .map(|gr| gr.iter().zip(&zs).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        let mut q = 0.0;
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d = map
                    .space
                    .distance_unchecked(&map.values[s.vertices[i]], &map.values[s.vertices[j]]);
                q -= c[i] * c[j] * d * d;
            }
        }
        total += vol * q;
    }
    Ok(total)
}

/// Pullback form by polarization:
/// pi(Z, W) = 1/2 |u_*(Z+W)|^2 - 1/2 |u_*(Z-W)|^2. Symmetric and bilinear
/// by construction; the parallelogram identity holds exactly because the
/// directional energy is a quadratic form in Z.
pub fn pullback_form(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    z: &dyn Fn(usize) -> Vec<f64>,
    w: &dyn Fn(usize) -> Vec<f64>,
) -> Result<f64> {
    let plus = directional_energy(mesh, field, map, &|s| {
        z(s).iter().zip(w(s)).map(|(a, b)| a + b).collect()
    })?;
    let minus = directional_energy(mesh, field, map, &|s| {
        z(s).iter().zip(w(s)).map(|(a, b)| a - b).collect()
    })?;
    Ok(0.5 * plus - 0.5 * minus)
}

fn barycentric_gradients(pos: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = pos[0].len();
    let k = pos.len();
    let mut e = nalgebra::DMatrix::zeros(n, n);
    for col in 0..n {
        for row in 0..n {
            e[(row, col)] = pos[col + 1][row] - pos[0][row];
        }
    }
    let einv = e.try_inverse().expect("nondegenerate simplex");
    let mut grads = vec![vec![0.0; n]; k];
    for i in 1..k {
        for d in 0..n {
            grads[i][d] = einv[(i - 1, d)];
        }
    }
    let (first, rest) = grads.split_first_mut().expect("k >= 1 gradients");
    for (d, g0) in first.iter_mut().enumerate() {
        *g0 = -rest.iter().map(|gr| gr[d]).sum::<f64>();
    }
    grads
}

/// Options for [`minimize`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Terminate when the largest vertex move in a sweep drops below this.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Over-relaxation factor, applied to flat targets only (the energy
    /// decrease per update stays exact there); curved targets always use
    /// plain mean updates.
    pub relaxation: f64,
    /// Tolerance of the inner Fréchet-mean iterations.
    pub inner_tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-9,
            max_sweeps: 100_000,
            relaxation: 1.0,
            inner_tol: 1e-12,
        }
    }
}

/// Energy minimizer with pinned boundary values and the ball constraint.
///
/// `trace` must provide a value for every boundary vertex, all inside the
/// closed ball. Non-convergence within `max_sweeps` is reported through the
/// `converged` flag, never silently.
pub fn minimize(
    mesh: &Mesh,
    field: &MetricField,
    space: &TargetSpace,
    trace: &[(usize, TargetPoint)],
    ball: &BallConstraint,
    opts: &SolveOptions,
) -> Result<(PLMap, EnergyReport)> {
    minimize_with_init(mesh, field, space, trace, ball, opts, None)
}

/// [`minimize`] resumed from a checkpointed state: interior values start
/// from `init` (projected into the ball) instead of the trace mean.
pub fn minimize_with_init(
    mesh: &Mesh,
    field: &MetricField,
    space: &TargetSpace,
    trace: &[(usize, TargetPoint)],
    ball: &BallConstraint,
    opts: &SolveOptions,
    init: Option<&PLMap>,
) -> Result<(PLMap, EnergyReport)> {
    if !(ball.radius > 0.0 && ball.radius < std::f64::consts::FRAC_PI_4) {
        return Err(Error::InvalidBallRadius { tau: ball.radius });
    }
    let form = EnergyForm::assemble(mesh, field)?;
    // Validate the trace: covers exactly the boundary, values in the ball.
    let mut values: Vec<Option<TargetPoint>> = vec![None; mesh.vertices.len()];
    for (v, p) in trace {
        if !mesh.vertices[*v].boundary {
            return Err(Error::Degenerate(format!(
                "trace value given for interior vertex {v}"
            )));
        }
        let d = space.distance(&ball.center, p)?;
        if d > ball.radius + 1e-12 {
            return Err(Error::Invariant(format!(
                "trace value at vertex {v} outside the ball (d = {d:.6} > tau = {})",
                ball.radius
            )));
        }
        values[*v] = Some(p.clone());
    }
    for (i, v) in mesh.vertices.iter().enumerate() {
        if v.boundary && values[i].is_none() {
            return Err(Error::Degenerate(format!(
                "boundary vertex {i} has no trace value"
            )));
        }
    }
    // Interior initialization: a checkpointed state when given, otherwise
    // the Fréchet mean of the trace.
    let mut values: Vec<TargetPoint> = match init {
        Some(prev) => {
            if prev.values.len() != mesh.vertices.len() {
                return Err(Error::Degenerate(format!(
                    "checkpoint has {} values for {} vertices",
                    prev.values.len(),
                    mesh.vertices.len()
                )));
            }
            values
                .into_iter()
                .zip(&prev.values)
                .map(|(pinned, prev)| match pinned {
                    Some(p) => Ok(p),
                    None => space.project_to_ball(prev, ball),
                })
                .collect::<Result<_>>()?
        }
        None => {
            let trace_points: Vec<TargetPoint> = trace.iter().map(|(_, p)| p.clone()).collect();
            let start = space
                .frechet_mean(&trace_points, &vec![1.0; trace_points.len()], 1e-12)
                .unwrap_or_else(|_| trace_points[0].clone());
            let start = space.project_to_ball(&start, ball)?;
            values
                .into_iter()
                .map(|v| v.unwrap_or_else(|| start.clone()))
                .collect()
        }
    };
    let interior: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&i| !mesh.vertices[i].boundary)
        .collect();

    let flat = matches!(
        space,
        TargetSpace::Arc { .. } | TargetSpace::Euclidean { .. }
    );
    let omega = if flat { opts.relaxation } else { 1.0 };
    let curved = space.curvature_class() == CurvatureClass::Cat1;

    let mut history = Vec::new();
    let mut sweeps = 0;
    let mut final_move = f64::INFINITY;
    let mut converged = false;
    while sweeps < opts.max_sweeps {
        let mut max_move = 0.0f64;
        for &v in &interior {
            let nbrs = &form.adjacency[v];
            if nbrs.is_empty() {
                continue;
            }
            let current = values[v].clone();
            let target = local_minimizer(space, &values, nbrs, &current, opts.inner_tol)?;
            let mut candidate = if omega != 1.0 {
                space.interpolate(&current, &target, omega)?
            } else {
                target
            };
            let d_center = space.distance_unchecked(&ball.center, &candidate);
            if d_center > ball.radius {
                candidate = space.interpolate(&ball.center, &candidate, ball.radius / d_center)?;
                // Projection is a heuristic for the constrained minimizer;
                // never let it increase the local energy.
                if curved
                    && form.local_energy(space, &values, v)
                        < local_energy_at(space, &values, nbrs, &candidate) - 1e-15
                {
                    continue;
                }
            }
            let moved = space.distance_unchecked(&values[v], &candidate);
            max_move = max_move.max(moved);
            values[v] = candidate;
        }
        sweeps += 1;
        history.push(form.total(space, &values));
        final_move = max_move;
        if max_move < opts.tol {
            converged = true;
            break;
        }
    }

    let map = PLMap {
        space: space.clone(),
        values,
        ball: ball.clone(),
    };
    let mut report = total_energy(mesh, field, &map)?;
    report.sweeps = sweeps;
    report.final_move = final_move;
    report.history = history;
    report.converged = converged;
    Ok((map, report))
}

fn local_energy_at(
    space: &TargetSpace,
    values: &[TargetPoint],
    nbrs: &[(usize, f64)],
    p: &TargetPoint,
) -> f64 {
    nbrs.iter()
        .map(|&(n, w)| {
            let d = space.distance_unchecked(p, &values[n]);
            w * d * d
        })
        .sum()
}

/// Minimizer of the local objective sum_j w_j d^2(., u_j).
///
/// With nonnegative weights this is the weighted Fréchet mean. Obtuse
/// simplices can contribute negative weights; the diagonal sum stays
/// positive, so flat targets keep the closed-form mean and curved targets
/// fall back to guarded gradient steps.
fn local_minimizer(
    space: &TargetSpace,
    values: &[TargetPoint],
    nbrs: &[(usize, f64)],
    current: &TargetPoint,
    inner_tol: f64,
) -> Result<TargetPoint> {
    let total: f64 = nbrs.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::Degenerate(
            "vertex with nonpositive total edge weight".into(),
        ));
    }
    match space {
        TargetSpace::Arc { .. } | TargetSpace::Euclidean { .. } => {
            // Closed form, valid for signed weights.
            let n = space.coord_len();
            let mut mean = vec![0.0; n];
            for &(j, w) in nbrs {
                let c = values[j].coord_vec();
                for (m, x) in mean.iter_mut().zip(&c) {
                    *m += w / total * x;
                }
            }
            Ok(match space {
                TargetSpace::Arc { .. } => TargetPoint::Arc(mean[0]),
                _ => TargetPoint::Euclidean(mean),
            })
        }
        _ => {
            let points: Vec<TargetPoint> = nbrs.iter().map(|&(j, _)| values[j].clone()).collect();
            let weights: Vec<f64> = nbrs.iter().map(|&(_, w)| w).collect();
            if weights.iter().all(|w| *w >= 0.0) {
                return space.frechet_mean_seeded(&points, &weights, inner_tol, current);
            }
            // Guarded gradient descent on the signed local objective.
            let objective = |p: &TargetPoint| -> f64 {
                points
                    .iter()
                    .zip(&weights)
                    .map(|(q, w)| {
                        let d = space.distance_unchecked(p, q);
                        w * d * d
                    })
                    .sum()
            };
            let mut q = current.clone();
            let mut f_q = objective(&q);
            for _ in 0..200 {
                let step = space.signed_mean_step(&q, &points, &weights, total)?;
                let mut t = 1.0;
                let mut accepted = false;
                for _ in 0..30 {
                    let cand = space.interpolate(&q, &step, t)?;
                    let f_c = objective(&cand);
                    if f_c <= f_q {
                        let moved = space.distance_unchecked(&q, &cand);
                        q = cand;
                        f_q = f_c;
                        accepted = moved > inner_tol;
                        break;
                    }
                    t *= 0.5;
                }
                if !accepted {
                    break;
                }
            }
            Ok(q)
        }
    }
}

#[cfg(test)]
mod tests;
