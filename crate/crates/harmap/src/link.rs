//! Links of skeleton points as metric graphs and their first eigenvalues.
//!
//! For a 2-dimensional model the link of the origin is a metric graph: a
//! circle of circumference theta for the cone (measured under g), or k arcs
//! of length pi glued at both endpoints for a book spine. The first
//! eigenvalue with values in a target T is the Rayleigh quotient
//!
//!   lambda_1 = inf_u  E(u) / integral d^2(u, mean u),
//!
//! discretized with P1 elements on a subdivided graph. Real targets reduce
//! to the generalized symmetric eigenproblem K x = lambda M x with the
//! zero-mean constraint; tree targets are minimized by alternating
//! relaxation with the tree Fréchet mean, restarted from random maps, and
//! reported as an upper bound with spread.
//!
//! The predicted Hölder exponent at a codimension-(n-k) point with link
//! eigenvalue beta is the positive root of alpha (alpha + n - k - 2) = beta.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::domain::{LocalModel, MetricField, ModelKind, ModelPoint};
use crate::error::{Error, Result};
use crate::target::{MetricTree, TargetPoint, TargetSpace, TreePoint};

/// Metric graph of directions at a skeleton point.
#[derive(Debug, Clone)]
pub struct LinkGraph {
    pub vertices: usize,
    /// (endpoint, endpoint, length); lengths measured under g at the point.
    pub edges: Vec<(usize, usize, f64)>,
    pub label: String,
}

impl LinkGraph {
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    fn connected(&self) -> bool {
        if self.vertices == 0 {
            return false;
        }
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b, _) in &self.edges {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Value target for the Rayleigh quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkTarget {
    Real,
    Tripod,
}

impl LinkTarget {
    pub fn name(&self) -> &'static str {
        match self {
            LinkTarget::Real => "real",
            LinkTarget::Tripod => "tripod",
        }
    }
}

/// First-eigenvalue estimate with its refinement trend.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda1: f64,
    pub subdivision: usize,
    pub target: LinkTarget,
    /// (subdivision, estimate) at coarser refinements, coarse to fine.
    pub trend: Vec<(usize, f64)>,
    /// Eigenfunction node samples as flat target coordinates.
    pub eigenfunction: Vec<Vec<f64>>,
    /// Spread of restart minima (tree targets; 0 for real).
    pub spread: f64,
}

/// Link of a skeleton point of a 2-dimensional model, with edge lengths
/// induced by the metric field at that point.
pub fn extract_link(model: &LocalModel, field: &MetricField, at: &ModelPoint) -> Result<LinkGraph> {
    if model.dimension != 2 {
        return Err(Error::Unsupported(
            "links of 3-dimensional models are spherical complexes, not graphs".into(),
        ));
    }
    let radius = LocalModel::planar_radius(at);
    let quad = 4096usize;
    if radius < 1e-14 {
        // Link of the origin: each wedge contributes an arc of directions.
        let mut arc_lengths = Vec::with_capacity(model.wedges.len());
        for (w, wedge) in model.wedges.iter().enumerate() {
            let mut len = 0.0;
            let dphi = wedge.angle / quad as f64;
            for k in 0..quad {
                let phi = (k as f64 + 0.5) * dphi;
                let tangent = [-phi.sin(), phi.cos()];
                len += dphi * field.line_density(&at.coords, &tangent);
            }
            let _ = w;
            arc_lengths.push(len);
        }
        match model.kind {
            ModelKind::Cone2 { .. } => {
                // Circle: two vertices, the arcs split into two chains.
                let half: usize = model.wedges.len() / 2;
                let first: f64 = arc_lengths[..half.max(1)].iter().sum();
                let second: f64 = arc_lengths[half.max(1)..].iter().sum();
                Ok(LinkGraph {
                    vertices: 2,
                    edges: vec![(0, 1, first), (1, 0, second.max(1e-12))],
                    label: "cone_vertex_circle".into(),
                })
            }
            ModelKind::Book2 { pages } => {
                // Theta-like graph: one arc of length pi per page, glued at
                // the two spine directions.
                let edges = (0..pages).map(|p| (0, 1, arc_lengths[p])).collect();
                Ok(LinkGraph {
                    vertices: 2,
                    edges,
                    label: "book_origin_theta".into(),
                })
            }
            _ => unreachable!("2d models only"),
        }
    } else {
        // Book spine point away from the origin: directions normal to and
        // along the page, a half-circle per page.
        match model.kind {
            ModelKind::Book2 { pages } => {
                if at.coords[1].abs() > 1e-12 {
                    return Err(Error::Degenerate(format!(
                        "point {:?} is not on the skeleton",
                        at.coords
                    )));
                }
                let mut edges = Vec::with_capacity(pages);
                for _p in 0..pages {
                    let mut len = 0.0;
                    let dpsi = std::f64::consts::PI / quad as f64;
                    for k in 0..quad {
                        let psi = (k as f64 + 0.5) * dpsi;
                        let tangent = [-psi.sin(), psi.cos()];
                        len += dpsi * field.line_density(&at.coords, &tangent);
                    }
                    edges.push((0, 1, len));
                }
                Ok(LinkGraph {
                    vertices: 2,
                    edges,
                    label: "book_spine_theta".into(),
                })
            }
            _ => Err(Error::Degenerate(format!(
                "point {:?} is not a skeleton point of the model",
                at.coords
            ))),
        }
    }
}

/// Subdivided graph: nodes and segments with lengths.
struct Subdivided {
    nodes: usize,
    segments: Vec<(usize, usize, f64)>,
}

fn subdivide(link: &LinkGraph, subdivision: usize) -> Result<Subdivided> {
    if !link.connected() {
        return Err(Error::Degenerate("link graph is not connected".into()));
    }
    let total = link.total_length();
    let mut segments = Vec::new();
    let mut nodes = link.vertices;
    let mut min_per_unit = f64::INFINITY;
    for &(a, b, len) in &link.edges {
        if !(len > 0.0) {
            return Err(Error::Degenerate("link edge of nonpositive length".into()));
        }
        let m = ((subdivision as f64 * len / total).round() as usize).max(2);
        min_per_unit = min_per_unit.min(m as f64 / len);
        let mut prev = a;
        for k in 1..m {
            let node = nodes;
            nodes += 1;
            segments.push((prev, node, len / m as f64));
            prev = node;
            let _ = k;
        }
        segments.push((prev, b, len / m as f64));
    }
    if min_per_unit < 16.0 {
        return Err(Error::Resolution(format!(
            "subdivision gives {min_per_unit:.1} nodes per unit length, need >= 16"
        )));
    }
    Ok(Subdivided { nodes, segments })
}

/// First eigenvalue estimate for the given target.
pub fn lambda1(link: &LinkGraph, target: LinkTarget, subdivision: usize) -> Result<EigenResult> {
    let mut trend = Vec::new();
    for div in [subdivision / 4, subdivision / 2, subdivision] {
        if div == 0 {
            continue;
        }
        // Coarser trend levels below the per-unit-length floor are skipped.
        let sub = match subdivide(link, div) {
            Ok(sub) => sub,
            Err(Error::Resolution(_)) => continue,
            Err(e) => return Err(e),
        };
        let lam = match target {
            LinkTarget::Real => real_lambda1(&sub)?.0,
            LinkTarget::Tripod => tripod_lambda1(&sub, 50, 7)?.0,
        };
        trend.push((div, lam));
    }
    let sub = subdivide(link, subdivision)?;
    let (lambda, eigenfunction, spread) = match target {
        LinkTarget::Real => {
            let (lam, eig) = real_lambda1(&sub)?;
            (lam, eig.into_iter().map(|x| vec![x]).collect(), 0.0)
        }
        LinkTarget::Tripod => {
            let (lam, values) = tripod_lambda1(&sub, 50, 7)?;
            let coords = values.iter().map(|p| vec![p.edge as f64, p.offset]).collect();
            (lam, coords, tripod_spread(&sub, 50, 7)?)
        }
    };
    Ok(EigenResult {
        lambda1: lambda,
        subdivision,
        target,
        trend,
        eigenfunction,
        spread,
    })
}

/// Real target: P1 stiffness and consistent mass, second-smallest
/// generalized eigenvalue (the smallest is 0 on constants, removed by the
/// center-of-mass constraint).
fn real_lambda1(sub: &Subdivided) -> Result<(f64, Vec<f64>)> {
    let n = sub.nodes;
    let mut k = DMatrix::<f64>::zeros(n, n);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for &(a, b, len) in &sub.segments {
        k[(a, a)] += 1.0 / len;
        k[(b, b)] += 1.0 / len;
        k[(a, b)] -= 1.0 / len;
        k[(b, a)] -= 1.0 / len;
        m[(a, a)] += len / 3.0;
        m[(b, b)] += len / 3.0;
        m[(a, b)] += len / 6.0;
        m[(b, a)] += len / 6.0;
    }
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("mass matrix not positive definite".into()))?;
    // A = L^-1 K L^-T, symmetric, same eigenvalues as the pencil.
    let l = chol.l();
    let linv_k = l.clone().solve_lower_triangular(&k).ok_or_else(|| {
        Error::Degenerate("mass factor is singular".into())
    })?;
    let a = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or_else(|| Error::Degenerate("mass factor is singular".into()))?;
    let a = (a.clone() + a.transpose()) * 0.5;
    let eig = a.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lam = eig.eigenvalues[order[1]];
    // Back-substitute the eigenvector: x = L^-T y.
    let y = eig.eigenvectors.column(order[1]).into_owned();
    let x = l
        .transpose()
        .solve_upper_triangular(&DVector::from_column_slice(y.as_slice()))
        .ok_or_else(|| Error::Degenerate("mass factor is singular".into()))?;
    Ok((lam, x.iter().cloned().collect()))
}

/// Tripod target: alternating relaxation with the tree Fréchet mean; the
/// smallest Rayleigh quotient over random restarts is an upper bound.
fn tripod_lambda1(sub: &Subdivided, restarts: usize, seed: u64) -> Result<(f64, Vec<TreePoint>)> {
    let mut best = f64::INFINITY;
    let mut best_map = Vec::new();
    for r in 0..restarts {
        let (lam, map) = tripod_restart(sub, seed, r as u64)?;
        if lam < best {
            best = lam;
            best_map = map;
        }
    }
    Ok((best, best_map))
}

fn tripod_spread(sub: &Subdivided, restarts: usize, seed: u64) -> Result<f64> {
    let mut lams = Vec::with_capacity(restarts);
    for r in 0..restarts {
        lams.push(tripod_restart(sub, seed, r as u64)?.0);
    }
    let lo = lams.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lams.iter().cloned().fold(0.0f64, f64::max);
    Ok(hi - lo)
}

fn tripod_restart(sub: &Subdivided, seed: u64, restart: u64) -> Result<(f64, Vec<TreePoint>)> {
    let tree = MetricTree::tripod();
    let space = TargetSpace::Tree(tree.clone());
    let n = sub.nodes;
    // Lumped node masses and adjacency.
    let mut mass = vec![0.0; n];
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for &(a, b, len) in &sub.segments {
        mass[a] += len / 2.0;
        mass[b] += len / 2.0;
        adj[a].push((b, 1.0 / len));
        adj[b].push((a, 1.0 / len));
    }
    let total_mass: f64 = mass.iter().sum();
    let mut rng = crate::comparison::sample_rng(seed, restart);
    let mut values: Vec<TargetPoint> = (0..n)
        .map(|_| {
            TargetPoint::Tree(TreePoint {
                edge: rng.gen_range(0..3),
                offset: 0.5 * rng.gen::<f64>(),
            })
        })
        .collect();
    let energy = |vals: &[TargetPoint]| -> f64 {
        sub.segments
            .iter()
            .map(|&(a, b, len)| {
                let d = space.distance_unchecked(&vals[a], &vals[b]);
                d * d / len
            })
            .sum()
    };
    let moment = |vals: &[TargetPoint], mean: &TargetPoint| -> f64 {
        vals.iter()
            .zip(&mass)
            .map(|(v, m)| {
                let d = space.distance_unchecked(v, mean);
                m * d * d
            })
            .sum()
    };
    let mut best = f64::INFINITY;
    let mut last = f64::INFINITY;
    for _iter in 0..600 {
        // Smoothing sweep: local means of graph neighbors.
        for v in 0..n {
            let pts: Vec<TargetPoint> = adj[v].iter().map(|&(u, _)| values[u].clone()).collect();
            let ws: Vec<f64> = adj[v].iter().map(|&(_, w)| w).collect();
            values[v] = space.frechet_mean_seeded(&pts, &ws, 1e-11, &values[v])?;
        }
        // Recenter and renormalize against the tree center of mass. The
        // moment target keeps values well inside the legs (distance ~ 0.3
        // from the mean), away from the clamping at the leg tips.
        let mean = space.frechet_mean_seeded(&values, &mass, 1e-11, &values[0])?;
        let d2 = moment(&values, &mean);
        if d2 < 1e-24 {
            break;
        }
        let scale = (0.09 * total_mass / d2).sqrt().min(4.0);
        for v in values.iter_mut() {
            *v = space.interpolate(&mean, v, scale)?;
        }
        let mean2 = space.frechet_mean_seeded(&values, &mass, 1e-11, &mean)?;
        let lam = energy(&values) / moment(&values, &mean2);
        best = best.min(lam);
        if (last - lam).abs() < 1e-9 * lam.max(1e-12) {
            break;
        }
        last = lam;
    }
    let out = values
        .into_iter()
        .map(|p| match p {
            TargetPoint::Tree(t) => t,
            _ => unreachable!(),
        })
        .collect();
    Ok((best, out))
}

/// Predicted Hölder exponent bound from the link eigenvalue:
/// the positive root of alpha (alpha + n - k - 2) = beta, plus the
/// Lipschitz criterion lambda_1 >= n - k - 1.
#[derive(Debug, Clone, Copy)]
pub struct ExponentPrediction {
    pub alpha: f64,
    pub lipschitz: bool,
}

pub fn predicted_exponent(beta: f64, n: usize, k: usize) -> Result<ExponentPrediction> {
    if beta < 0.0 {
        return Err(Error::Degenerate(format!("negative eigenvalue {beta}")));
    }
    if n < 2 || k > n - 2 {
        return Err(Error::Degenerate(format!(
            "skeleton dimension k={k} invalid for n={n}"
        )));
    }
    let c = (n - k) as f64 - 2.0;
    let alpha = 0.5 * (-c + (c * c + 4.0 * beta).sqrt());
    Ok(ExponentPrediction {
        alpha,
        lipschitz: beta >= (n - k) as f64 - 1.0,
    })
}
