//! Admissible local models and Lipschitz Riemannian metric fields.
//!
//! A local model is a finite union of conical wedges glued along boundary
//! cells: 2-dimensional cones (sectors glued in a cycle, total angle theta)
//! and books (half-plane pages glued along a spine line), plus their
//! products with an interval in dimension 3. Only the orthogonal, radial
//! identifications arising in these constructions are supported; exotic
//! gluings are rejected at load time.

mod mesh;
mod meshio;

pub use mesh::{
    circle_polygon_area, local_edge_target, signed_volume, simplex_weights, triangulate,
    BallDecomposition, GlueMark, Mesh, MeshAudit, Simplex, SphereSampling, Vertex,
};
pub use meshio::{parse_mesh, read_mesh, write_mesh, write_mesh_string};

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Which boundary ray of a sector a gluing attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayId {
    /// theta = 0 edge of the sector.
    Low,
    /// theta = angle edge of the sector.
    High,
}

/// One identification class of boundary cells (two for interior sector
/// interfaces, all pages at once for a book spine ray).
#[derive(Debug, Clone, PartialEq)]
pub struct Gluing {
    pub cells: Vec<(usize, RayId)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// n = 2 cone of the given total angle, split into sectors <= pi/2.
    Cone2 { total_angle: f64 },
    /// n = 2 book: `pages` half-planes glued along a spine line.
    Book2 { pages: usize },
    /// n = 3 product of the 2-dimensional cone with an interval.
    Cone3 { total_angle: f64 },
    /// n = 3 product of the book with an interval.
    Book3 { pages: usize },
}

/// A wedge: a planar sector (n = 2) or the dihedral wedge sector x R (n = 3).
#[derive(Debug, Clone, PartialEq)]
pub struct Wedge {
    pub angle: f64,
}

/// A point of a local model: wedge id plus Euclidean coordinates in that
/// wedge's chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    pub wedge: usize,
    pub coords: Vec<f64>,
}

/// Admissible polyhedral local model.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalModel {
    pub kind: ModelKind,
    pub dimension: usize,
    pub codimension: usize,
    pub wedges: Vec<Wedge>,
    pub gluings: Vec<Gluing>,
    pub admissible: bool,
}

/// `pages` half-planes glued along a common spine line.
pub fn build_book(pages: usize) -> Result<LocalModel> {
    if pages == 0 {
        return Err(Error::Degenerate("book needs at least one page".into()));
    }
    let wedges = vec![
        Wedge {
            angle: std::f64::consts::PI
        };
        pages
    ];
    let gluings = vec![
        Gluing {
            cells: (0..pages).map(|p| (p, RayId::Low)).collect(),
        },
        Gluing {
            cells: (0..pages).map(|p| (p, RayId::High)).collect(),
        },
    ];
    let mut model = LocalModel {
        kind: ModelKind::Book2 { pages },
        dimension: 2,
        codimension: 1,
        wedges,
        gluings,
        admissible: false,
    };
    model.admissible = model.check_admissible();
    Ok(model)
}

/// 2-dimensional cone of total angle theta, realized as ceil(theta / (pi/2))
/// sectors glued cyclically; the vertex is the 0-skeleton.
pub fn build_cone_domain(total_angle: f64) -> Result<LocalModel> {
    if !(total_angle > 0.0) {
        return Err(Error::Degenerate(format!("cone angle {total_angle}")));
    }
    let count = (total_angle / std::f64::consts::FRAC_PI_2).ceil() as usize;
    let count = count.max(2);
    let angle = total_angle / count as f64;
    let wedges = vec![Wedge { angle }; count];
    let gluings = (0..count)
        .map(|i| Gluing {
            cells: vec![(i, RayId::High), ((i + 1) % count, RayId::Low)],
        })
        .collect();
    let mut model = LocalModel {
        kind: ModelKind::Cone2 { total_angle },
        dimension: 2,
        codimension: 2,
        wedges,
        gluings,
        admissible: false,
    };
    model.admissible = model.check_admissible();
    Ok(model)
}

/// Product of a 2-dimensional model with an interval: wedges become dihedral
/// sectors around the z-axis, gluings are inherited.
pub fn product_with_interval(base: &LocalModel) -> Result<LocalModel> {
    let kind = match base.kind {
        ModelKind::Cone2 { total_angle } => ModelKind::Cone3 { total_angle },
        ModelKind::Book2 { pages } => ModelKind::Book3 { pages },
        _ => {
            return Err(Error::Unsupported(
                "products are taken over 2-dimensional models".into(),
            ))
        }
    };
    Ok(LocalModel {
        kind,
        dimension: 3,
        codimension: base.codimension,
        wedges: base.wedges.clone(),
        gluings: base.gluings.clone(),
        admissible: base.admissible,
    })
}

impl LocalModel {
    /// Admissibility: the wedge graph stays connected after removing the
    /// (n-2)-skeleton. Boundary rays minus the skeleton still connect the
    /// wedges they glue, so this reduces to connectivity of the gluing graph.
    fn check_admissible(&self) -> bool {
        let n = self.wedges.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(w) = stack.pop() {
            for g in &self.gluings {
                if g.cells.iter().any(|&(cw, _)| cw == w) {
                    for &(other, _) in &g.cells {
                        if !seen[other] {
                            seen[other] = true;
                            stack.push(other);
                        }
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Start of each wedge's angular range in the global cone coordinate.
    pub fn wedge_angle_offset(&self, wedge: usize) -> f64 {
        self.wedges[..wedge].iter().map(|w| w.angle).sum()
    }

    pub fn total_angle(&self) -> f64 {
        self.wedges.iter().map(|w| w.angle).sum()
    }

    /// Global angle coordinate of a point (cone models; pages of a book get
    /// consecutive ranges of length pi).
    pub fn global_angle(&self, p: &ModelPoint) -> f64 {
        let local = p.coords[1].atan2(p.coords[0]);
        self.wedge_angle_offset(p.wedge) + local.max(0.0)
    }

    /// In-plane radius (distance to the z-axis for n = 3).
    pub fn planar_radius(p: &ModelPoint) -> f64 {
        (p.coords[0] * p.coords[0] + p.coords[1] * p.coords[1]).sqrt()
    }

    /// Geodesic distance in the model's Euclidean cone structure.
    pub fn distance(&self, a: &ModelPoint, b: &ModelPoint) -> f64 {
        match self.kind {
            ModelKind::Cone2 { .. } => self.cone_plane_distance(a, b, 0.0),
            ModelKind::Book2 { .. } => self.book_plane_distance(a, b, 0.0),
            ModelKind::Cone3 { .. } => {
                let dz = a.coords[2] - b.coords[2];
                self.cone_plane_distance(a, b, dz)
            }
            ModelKind::Book3 { .. } => {
                let dz = a.coords[2] - b.coords[2];
                self.book_plane_distance(a, b, dz)
            }
        }
    }

    fn cone_plane_distance(&self, a: &ModelPoint, b: &ModelPoint, dz: f64) -> f64 {
        let (ra, rb) = (Self::planar_radius(a), Self::planar_radius(b));
        let theta = self.total_angle();
        let mut dphi = (self.global_angle(a) - self.global_angle(b)).abs();
        dphi = dphi.min(theta - dphi);
        let planar_sq = if dphi >= std::f64::consts::PI {
            (ra + rb) * (ra + rb)
        } else {
            ra * ra + rb * rb - 2.0 * ra * rb * dphi.cos()
        };
        (planar_sq + dz * dz).sqrt()
    }

    fn book_plane_distance(&self, a: &ModelPoint, b: &ModelPoint, dz: f64) -> f64 {
        let planar_sq = if a.wedge == b.wedge {
            let dx = a.coords[0] - b.coords[0];
            let dy = a.coords[1] - b.coords[1];
            dx * dx + dy * dy
        } else {
            // Unfold the two pages across the spine.
            let dx = a.coords[0] - b.coords[0];
            let dy = a.coords[1] + b.coords[1];
            dx * dx + dy * dy
        };
        (planar_sq + dz * dz).sqrt()
    }
}

/// Closed-form Lipschitz metric fields, registered by name in configs.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricField {
    Euclidean,
    /// g_ij(x) = (1 + a |x|) delta_ij: Lipschitz but not smooth at the
    /// skeleton; normalized (g(0) = identity).
    ConformalLipschitz { a: f64 },
    /// Constant diagonal metric per wedge (not normalized unless identity).
    AnisotropicConstant { diag: Vec<f64> },
}

impl MetricField {
    pub fn by_name(name: &str, params: &[f64], dim: usize) -> Result<Self> {
        match name {
            "euclidean" => Ok(MetricField::Euclidean),
            "conformal_lipschitz" => {
                let a = *params
                    .first()
                    .ok_or_else(|| Error::Config("conformal_lipschitz needs parameter a".into()))?;
                if a < 0.0 {
                    return Err(Error::Config(format!("conformal slope a={a} < 0")));
                }
                Ok(MetricField::ConformalLipschitz { a })
            }
            "anisotropic" => {
                if params.len() != dim {
                    return Err(Error::Config(format!(
                        "anisotropic needs {dim} diagonal entries"
                    )));
                }
                if params.iter().any(|d| *d <= 0.0) {
                    return Err(Error::Config("anisotropic entries must be positive".into()));
                }
                Ok(MetricField::AnisotropicConstant {
                    diag: params.to_vec(),
                })
            }
            other => Err(Error::Config(format!("unknown metric field '{other}'"))),
        }
    }

    /// Metric matrix at a point of a wedge chart.
    pub fn eval(&self, dim: usize, x: &[f64]) -> DMatrix<f64> {
        match self {
            MetricField::Euclidean => DMatrix::identity(dim, dim),
            MetricField::ConformalLipschitz { a } => {
                let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
                DMatrix::identity(dim, dim) * (1.0 + a * r)
            }
            MetricField::AnisotropicConstant { diag } => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&diag[..dim]))
            }
        }
    }

    /// (matrix, volume density sqrt det g, inverse) at a point; errors if the
    /// matrix fails the positivity check.
    pub fn eval_full(&self, dim: usize, x: &[f64]) -> Result<(DMatrix<f64>, f64, DMatrix<f64>)> {
        let g = self.eval(dim, x);
        let det = g.determinant();
        if !(det > 0.0) || g.clone().cholesky().is_none() {
            return Err(Error::Degenerate(format!(
                "metric not positive definite at {x:?}"
            )));
        }
        let inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Degenerate("metric not invertible".into()))?;
        Ok((g, det.sqrt(), inv))
    }

    /// Line density sqrt(t^T g t) for a unit tangent t at x.
    pub fn line_density(&self, x: &[f64], tangent: &[f64]) -> f64 {
        let g = self.eval(x.len(), x);
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in 0..x.len() {
                s += g[(i, j)] * tangent[i] * tangent[j];
            }
        }
        s.sqrt()
    }

    /// Declared entrywise Lipschitz constant on a ball of radius r.
    pub fn lipschitz_constant(&self, dim: usize, _r: f64) -> f64 {
        match self {
            MetricField::Euclidean | MetricField::AnisotropicConstant { .. } => 0.0,
            MetricField::ConformalLipschitz { a } => a * dim as f64,
        }
    }

    /// Declared ellipticity constant lambda in (0, 1] on a ball of radius r.
    pub fn ellipticity(&self, _dim: usize, r: f64) -> f64 {
        match self {
            MetricField::Euclidean => 1.0,
            MetricField::ConformalLipschitz { a } => 1.0 / (1.0 + a * r),
            MetricField::AnisotropicConstant { diag } => {
                let hi = diag.iter().cloned().fold(f64::MIN, f64::max);
                let lo = diag.iter().cloned().fold(f64::MAX, f64::min);
                (1.0 / hi).min(lo).min(1.0)
            }
        }
    }

    pub fn is_normalized(&self, dim: usize) -> bool {
        let g = self.eval(dim, &vec![0.0; dim]);
        (g - DMatrix::<f64>::identity(dim, dim)).abs().max() < 1e-14
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricField::Euclidean => "euclidean",
            MetricField::ConformalLipschitz { .. } => "conformal_lipschitz",
            MetricField::AnisotropicConstant { .. } => "anisotropic",
        }
    }
}

/// Worst sampled ratios for the Lipschitz and ellipticity declarations.
#[derive(Debug, Clone, Copy)]
pub struct MetricAudit {
    pub worst_lipschitz_ratio: f64,
    pub worst_lower_ellipticity: f64,
    pub worst_upper_ellipticity: f64,
}

/// Sampled audit of a metric field on B(r) of a model.
pub fn audit_metric(
    field: &MetricField,
    model: &LocalModel,
    r: f64,
    samples: usize,
    seed: u64,
) -> MetricAudit {
    use rand::Rng;
    let dim = model.dimension;
    let mut worst_lip = 0.0f64;
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi = 0.0f64;
    for i in 0..samples {
        let mut rng = crate::comparison::sample_rng(seed, i as u64);
        let wedge = rng.gen_range(0..model.wedges.len());
        let sample_point = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            let rho = r * rng.gen::<f64>();
            let phi = model.wedges[wedge].angle * rng.gen::<f64>();
            let mut v = vec![rho * phi.cos(), rho * phi.sin()];
            if dim == 3 {
                v.push(r * (2.0 * rng.gen::<f64>() - 1.0));
            }
            v
        };
        let x = sample_point(&mut rng);
        let y = sample_point(&mut rng);
        let gx = field.eval(dim, &x);
        let gy = field.eval(dim, &y);
        let dist = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if dist > 1e-9 {
            let dg = (gx.clone() - gy).abs().max();
            worst_lip = worst_lip.max(dg / dist);
        }
        // Rayleigh quotients along a random direction.
        let dir = crate::comparison::random_unit_vector(&mut rng, dim);
        let mut q = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                q += gx[(a, b)] * dir[a] * dir[b];
            }
        }
        worst_lo = worst_lo.min(q);
        worst_hi = worst_hi.max(q);
    }
    MetricAudit {
        worst_lipschitz_ratio: worst_lip,
        worst_lower_ellipticity: worst_lo,
        worst_upper_ellipticity: worst_hi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn book_construction() {
        for pages in [1usize, 2, 3] {
            let m = build_book(pages).unwrap();
            assert!(m.admissible, "book {pages} admissible");
            assert_eq!(m.wedges.len(), pages);
            assert_eq!(m.codimension, 1);
        }
        assert!(build_book(0).is_err());
    }

    #[test]
    fn cone_construction() {
        let flat = build_cone_domain(2.0 * std::f64::consts::PI).unwrap();
        assert_eq!(flat.wedges.len(), 4);
        assert!((flat.total_angle() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
        assert!(flat.admissible);
        let branched = build_cone_domain(4.0 * std::f64::consts::PI).unwrap();
        assert_eq!(branched.wedges.len(), 8);
        assert!((branched.total_angle() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        let convex = build_cone_domain(1.5 * std::f64::consts::PI).unwrap();
        assert!((convex.total_angle() - 1.5 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn cone_distance_unfolds() {
        let flat = build_cone_domain(2.0 * std::f64::consts::PI).unwrap();
        // Quarter turn on the flat plane.
        let a = ModelPoint {
            wedge: 0,
            coords: vec![1.0, 0.0],
        };
        let b = ModelPoint {
            wedge: 1,
            coords: vec![1.0, 0.0],
        };
        assert!((flat.distance(&a, &b) - 2f64.sqrt()).abs() < 1e-12);
        // On a 4 pi cone, points with angular separation 2 pi connect
        // through the vertex.
        let wide = build_cone_domain(4.0 * std::f64::consts::PI).unwrap();
        let c = ModelPoint {
            wedge: 0,
            coords: vec![1.0, 0.0],
        };
        let d = ModelPoint {
            wedge: 4,
            coords: vec![1.0, 0.0],
        };
        assert!((wide.distance(&c, &d) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn book_distance_unfolds_across_spine() {
        let book = build_book(3).unwrap();
        let a = ModelPoint {
            wedge: 0,
            coords: vec![0.5, 0.3],
        };
        let b = ModelPoint {
            wedge: 2,
            coords: vec![0.5, 0.4],
        };
        assert!((book.distance(&a, &b) - 0.7).abs() < 1e-12);
        let c = ModelPoint {
            wedge: 0,
            coords: vec![0.1, 0.3],
        };
        assert!((book.distance(&a, &c) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn metric_fields_behave() {
        let field = MetricField::ConformalLipschitz { a: 0.1 };
        assert!(field.is_normalized(2));
        let g = field.eval(2, &[3.0, 4.0]);
        assert!((g[(0, 0)] - 1.5).abs() < 1e-15);
        assert!((g[(0, 1)]).abs() < 1e-15);
        let model = build_cone_domain(2.0 * std::f64::consts::PI).unwrap();
        let audit = audit_metric(&field, &model, 1.0, 4000, 7);
        // Entrywise Lipschitz slope is a, within the declared a * n budget.
        assert!(audit.worst_lipschitz_ratio <= field.lipschitz_constant(2, 1.0) + 1e-12);
        let lambda = field.ellipticity(2, 1.0);
        assert!(audit.worst_lower_ellipticity >= lambda - 1e-12);
        assert!(audit.worst_upper_ellipticity <= 1.0 / lambda + 1e-12);
        assert!(!MetricField::AnisotropicConstant {
            diag: vec![2.0, 0.5]
        }
        .is_normalized(2));
        assert!(MetricField::by_name("nope", &[], 2).is_err());
    }
}
