//! Classical linear finite-element route for real-valued problems.
//!
//! Deliberately independent of the Gram-identity discretization next door:
//! the stiffness matrix is assembled from the cotangent formula on the
//! metric-mapped triangle (map vertices by g^{1/2} at the barycenter, then
//! w_ij = cot(opposite angle) / 2), and the system is solved by conjugate
//! gradients rather than nonlinear relaxation. Used as the oracle that the
//! metric-space solver must reproduce on flat targets.

use crate::domain::{Mesh, MetricField};
use crate::error::{Error, Result};

/// Cotangent stiffness edges (i < j, assembled) of a 2d mesh under g.
pub fn cotangent_edges(mesh: &Mesh, field: &MetricField) -> Result<Vec<(usize, usize, f64)>> {
    if mesh.dimension() != 2 {
        return Err(Error::Unsupported(
            "the finite-element oracle covers 2-dimensional meshes".into(),
        ));
    }
    let mut edge_map: std::collections::HashMap<(usize, usize), f64> =
        std::collections::HashMap::new();
    for s in &mesh.simplices {
        let pos = mesh.simplex_positions(s);
        let bary = mesh.barycenter(s);
        let g = field.eval(2, &bary);
        let sq = sym_sqrt_2x2(g[(0, 0)], g[(0, 1)], g[(1, 1)]);
        let mapped: Vec<[f64; 2]> = pos
            .iter()
            .map(|p| {
                [
                    sq[0] * p[0] + sq[1] * p[1],
                    sq[1] * p[0] + sq[2] * p[1],
                ]
            })
            .collect();
        // Cotangent of the angle at vertex k weights the opposite edge (i, j).
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let u = [mapped[i][0] - mapped[k][0], mapped[i][1] - mapped[k][1]];
            let v = [mapped[j][0] - mapped[k][0], mapped[j][1] - mapped[k][1]];
            let dot = u[0] * v[0] + u[1] * v[1];
            let cross = (u[0] * v[1] - u[1] * v[0]).abs();
            if cross < 1e-30 {
                return Err(Error::Degenerate("degenerate mapped triangle".into()));
            }
            let w = 0.5 * dot / cross;
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
    Ok(edges)
}

/// Symmetric square root of a 2x2 SPD matrix [[a, b], [b, c]], returned as
/// (s00, s01, s11).
fn sym_sqrt_2x2(a: f64, b: f64, c: f64) -> [f64; 3] {
    let det = (a * c - b * b).max(0.0);
    let s = det.sqrt();
    let t = (a + c + 2.0 * s).sqrt();
    [(a + s) / t, b / t, (c + s) / t]
}

/// Solve the weighted Laplace problem with pinned boundary values by
/// Jacobi-preconditioned conjugate gradients on the interior unknowns.
pub fn solve_scalar(
    mesh: &Mesh,
    field: &MetricField,
    boundary: &[(usize, f64)],
    rtol: f64,
) -> Result<Vec<f64>> {
    let edges = cotangent_edges(mesh, field)?;
    let n = mesh.vertices.len();
    let mut adjacency = vec![Vec::new(); n];
    for &(a, b, w) in &edges {
        adjacency[a].push((b, w));
        adjacency[b].push((a, w));
    }
    let mut fixed = vec![None; n];
    for &(v, x) in boundary {
        fixed[v] = Some(x);
    }
    for (i, v) in mesh.vertices.iter().enumerate() {
        if v.boundary && fixed[i].is_none() {
            return Err(Error::Degenerate(format!(
                "boundary vertex {i} has no prescribed value"
            )));
        }
    }
    let interior: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let index: std::collections::HashMap<usize, usize> = interior
        .iter()
        .enumerate()
        .map(|(k, &v)| (v, k))
        .collect();
    let m = interior.len();
    // Right-hand side from eliminated boundary values.
    let mut rhs = vec![0.0; m];
    let mut diag = vec![0.0; m];
    for (k, &v) in interior.iter().enumerate() {
        for &(nb, w) in &adjacency[v] {
            diag[k] += w;
            if let Some(x) = fixed[nb] {
                rhs[k] += w * x;
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for (k, &v) in interior.iter().enumerate() {
            let mut acc = diag[k] * x[k];
            for &(nb, w) in &adjacency[v] {
                if let Some(&kk) = index.get(&nb) {
                    acc -= w * x[kk];
                }
            }
            out[k] = acc;
        }
    };
    // Preconditioned CG.
    let mut x = vec![0.0; m];
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let b_norm: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = (rtol * b_norm).max(1e-300);
    let mut ap = vec![0.0; m];
    for _ in 0..20 * m.max(50) {
        let r_norm: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= target {
            break;
        }
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap.abs() < 1e-300 {
            break;
        }
        let alpha = rz / pap;
        for k in 0..m {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        for k in 0..m {
            z[k] = r[k] / diag[k];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..m {
            p[k] = z[k] + beta * p[k];
        }
    }
    let mut out = vec![0.0; n];
    for (i, f) in fixed.iter().enumerate() {
        if let Some(v) = f {
            out[i] = *v;
        }
    }
    for (k, &v) in interior.iter().enumerate() {
        out[v] = x[k];
    }
    Ok(out)
}

/// Discrete energy seminorm of the difference of two scalar fields, taken
/// with the oracle's own cotangent stiffness.
pub fn energy_norm_diff(
    mesh: &Mesh,
    field: &MetricField,
    u: &[f64],
    v: &[f64],
) -> Result<f64> {
    let edges = cotangent_edges(mesh, field)?;
    let mut acc = 0.0;
    for (a, b, w) in edges {
        let d = (u[a] - v[a]) - (u[b] - v[b]);
        acc += w * d * d;
    }
    Ok(acc.max(0.0).sqrt())
}

/// Dirichlet energy of a scalar field in the oracle's stiffness form.
pub fn scalar_energy(mesh: &Mesh, field: &MetricField, u: &[f64]) -> Result<f64> {
    let edges = cotangent_edges(mesh, field)?;
    Ok(edges
        .iter()
        .map(|&(a, b, w)| w * (u[a] - u[b]) * (u[a] - u[b]))
        .sum())
}
