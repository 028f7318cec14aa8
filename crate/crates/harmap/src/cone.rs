//! The metric cone over a target space.
//!
//! Points are pairs `[P, t]` with P in the base and height t >= 0; all points
//! of height 0 are identified (the apex). The distance is
//!
//! ```text
//!   D^2([P,t], [Q,s]) = t^2 + s^2 - 2 t s cos(min(d_PQ, pi))
//! ```
//!
//! which makes the cone an NPC space whenever the base is CAT(1). Geodesics
//! come from unrolling the two rays through the base geodesic into a planar
//! sector of angle min(d_PQ, pi) and interpolating linearly there.

use crate::error::{Error, Result};
use crate::target::{TargetPoint, TargetSpace};

/// A point [base, height] of the cone; all height-0 points compare equal.
#[derive(Debug, Clone)]
pub struct ConePoint {
    pub base: TargetPoint,
    pub height: f64,
}

impl ConePoint {
    pub fn new(base: TargetPoint, height: f64) -> Self {
        Self { base, height }
    }

    pub fn is_apex(&self) -> bool {
        self.height == 0.0
    }
}

impl PartialEq for ConePoint {
    fn eq(&self, other: &Self) -> bool {
        if self.is_apex() && other.is_apex() {
            return true;
        }
        self.height == other.height && self.base == other.base
    }
}

/// The lifted point [P, 1] on the unit-height slice.
pub fn lift(p: &TargetPoint) -> ConePoint {
    ConePoint::new(p.clone(), 1.0)
}

/// Cone distance by the defining formula, evaluated in the cancellation-free
/// form (t - s)^2 + 4 t s sin^2(d/2).
pub fn cone_distance(base: &TargetSpace, a: &ConePoint, b: &ConePoint) -> f64 {
    let (t, s) = (a.height, b.height);
    if t == 0.0 {
        return s;
    }
    if s == 0.0 {
        return t;
    }
    let d = base
        .distance_unchecked(&a.base, &b.base)
        .min(std::f64::consts::PI);
    let half_sin = (d / 2.0).sin();
    let sq = (t - s) * (t - s) + 4.0 * t * s * half_sin * half_sin;
    sq.max(0.0).sqrt()
}

/// Geodesic interpolation in the cone via planar unrolling.
///
/// For base distance >= pi (or a segment through the origin) the geodesic is
/// the broken two-ray path through the apex.
pub fn cone_interpolate(
    base: &TargetSpace,
    a: &ConePoint,
    b: &ConePoint,
    frac: f64,
) -> Result<ConePoint> {
    if a.is_apex() && b.is_apex() {
        return Ok(a.clone());
    }
    if a.is_apex() {
        return Ok(ConePoint::new(b.base.clone(), frac * b.height));
    }
    if b.is_apex() {
        return Ok(ConePoint::new(a.base.clone(), (1.0 - frac) * a.height));
    }
    let d = base.distance(&a.base, &b.base)?;
    if d >= std::f64::consts::PI {
        // Broken geodesic through the apex.
        let total = a.height + b.height;
        let s = frac * total;
        return Ok(if s <= a.height {
            ConePoint::new(a.base.clone(), a.height - s)
        } else {
            ConePoint::new(b.base.clone(), s - a.height)
        });
    }
    if d < 1e-15 {
        // Same ray.
        return Ok(ConePoint::new(
            a.base.clone(),
            a.height + frac * (b.height - a.height),
        ));
    }
    // Unroll: a at angle 0, b at angle d, interpolate in the plane.
    let (ax, ay) = (a.height, 0.0);
    let (bx, by) = (b.height * d.cos(), b.height * d.sin());
    let (mx, my) = (ax + frac * (bx - ax), ay + frac * (by - ay));
    let rho = (mx * mx + my * my).sqrt();
    if rho < 1e-15 {
        return Ok(ConePoint::new(a.base.clone(), 0.0));
    }
    let phi = my.atan2(mx).clamp(0.0, d);
    let base_pt = base.interpolate(&a.base, &b.base, phi / d)?;
    Ok(ConePoint::new(base_pt, rho))
}

/// Projection onto the unit-height slice: [P, t] -> [P, 1]. The apex has no
/// canonical base, so it is rejected.
pub fn project_unit(a: &ConePoint) -> Result<ConePoint> {
    if a.height <= 0.0 {
        return Err(Error::Degenerate(
            "cannot project the cone apex to the unit slice".into(),
        ));
    }
    Ok(ConePoint::new(a.base.clone(), 1.0))
}

/// One Fréchet-mean gradient step in the cone. Exact (single-step) for bases
/// where the cone has a flat model: spheres (cone = Euclidean space) and arcs
/// (cone = convex planar sector).
pub(crate) fn mean_step(
    base: &TargetSpace,
    _q: &ConePoint,
    points: &[&ConePoint],
    weights: &[f64],
    total: f64,
) -> Result<ConePoint> {
    match base {
        TargetSpace::Sphere { dim } => {
            let mut mean = vec![0.0; dim + 1];
            for (p, w) in points.iter().zip(weights) {
                let v = match &p.base {
                    TargetPoint::Sphere(v) => v,
                    _ => unreachable!(),
                };
                for (m, x) in mean.iter_mut().zip(v) {
                    *m += w / total * p.height * x;
                }
            }
            let norm = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-15 {
                return Ok(ConePoint::new(points[0].base.clone(), 0.0));
            }
            for x in &mut mean {
                *x /= norm;
            }
            Ok(ConePoint::new(TargetPoint::Sphere(mean), norm))
        }
        TargetSpace::Arc { length } => {
            let (mut mx, mut my) = (0.0, 0.0);
            for (p, w) in points.iter().zip(weights) {
                let phi = match p.base {
                    TargetPoint::Arc(s) => s,
                    _ => unreachable!(),
                };
                mx += w / total * p.height * phi.cos();
                my += w / total * p.height * phi.sin();
            }
            let rho = (mx * mx + my * my).sqrt();
            if rho < 1e-15 {
                return Ok(ConePoint::new(points[0].base.clone(), 0.0));
            }
            let phi = my.atan2(mx).clamp(0.0, *length);
            Ok(ConePoint::new(TargetPoint::Arc(phi), rho))
        }
        _ => Err(Error::Unsupported(
            "Fréchet means in cones are implemented for sphere and arc bases only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::{TargetPoint, TargetSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s2() -> TargetSpace {
        TargetSpace::Sphere { dim: 2 }
    }

    fn sp(x: f64, y: f64, z: f64) -> TargetPoint {
        TargetPoint::sphere(vec![x, y, z]).unwrap()
    }

    #[test]
    fn defining_formula_cases() {
        let base = s2();
        let p = ConePoint::new(sp(1.0, 0.0, 0.0), 1.0);
        let q = ConePoint::new(sp(0.0, 1.0, 0.0), 1.0);
        // d = pi/2: D^2 = 1 + 1 - 0 = 2.
        assert!((cone_distance(&base, &p, &q) - 2f64.sqrt()).abs() < 1e-15);
        // Apex distance equals height.
        let apex = ConePoint::new(sp(0.0, 0.0, 1.0), 0.0);
        assert_eq!(cone_distance(&base, &p, &apex), 1.0);
        // Same ray.
        let p2 = ConePoint::new(sp(1.0, 0.0, 0.0), 2.0);
        let p3 = ConePoint::new(sp(1.0, 0.0, 0.0), 3.0);
        assert!((cone_distance(&base, &p2, &p3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interpolation_endpoints_and_same_ray() {
        let base = s2();
        let a = ConePoint::new(sp(1.0, 0.0, 0.0), 1.0);
        let b = ConePoint::new(sp(1.0, 0.0, 0.0), 3.0);
        let m = cone_interpolate(&base, &a, &b, 0.5).unwrap();
        assert!((m.height - 2.0).abs() < 1e-14);
        let e0 = cone_interpolate(&base, &a, &b, 0.0).unwrap();
        assert_eq!(e0, a);
    }

    #[test]
    fn interpolation_distance_postconditions() {
        let base = s2();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let a = ConePoint::new(
                TargetPoint::Sphere(crate::comparison::random_unit_vector(&mut rng, 3)),
                0.5 + 1.5 * rand::Rng::gen::<f64>(&mut rng),
            );
            let b = ConePoint::new(
                TargetPoint::Sphere(crate::comparison::random_unit_vector(&mut rng, 3)),
                0.5 + 1.5 * rand::Rng::gen::<f64>(&mut rng),
            );
            let d = cone_distance(&base, &a, &b);
            let t: f64 = rand::Rng::gen(&mut rng);
            let m = cone_interpolate(&base, &a, &b, t).unwrap();
            assert!(
                (cone_distance(&base, &a, &m) - t * d).abs() < 1e-10,
                "first-leg distance"
            );
            assert!(
                (cone_distance(&base, &m, &b) - (1.0 - t) * d).abs() < 1e-10,
                "second-leg distance"
            );
        }
    }

    #[test]
    fn unit_projection() {
        let base = s2();
        let p = ConePoint::new(sp(1.0, 0.0, 0.0), 2.0);
        let u = project_unit(&p).unwrap();
        assert_eq!(u.height, 1.0);
        assert_eq!(u.base, p.base);
        let idem = project_unit(&u).unwrap();
        assert_eq!(idem, u);
        assert!(project_unit(&ConePoint::new(sp(1.0, 0.0, 0.0), 0.0)).is_err());
        let _ = base;
    }

    #[test]
    fn broken_geodesic_through_apex() {
        // Tripod base: two points on different legs at distance 2 >= ... use
        // arc distance >= pi via a long tree instead.
        let tree = crate::target::MetricTree::star(2, 2.0).unwrap();
        let base = TargetSpace::Tree(tree);
        let p = ConePoint::new(
            TargetPoint::Tree(crate::target::TreePoint {
                edge: 0,
                offset: 1.8,
            }),
            1.0,
        );
        let q = ConePoint::new(
            TargetPoint::Tree(crate::target::TreePoint {
                edge: 1,
                offset: 1.8,
            }),
            1.0,
        );
        // Base distance 3.6 > pi: geodesic passes the apex; D = t + s.
        assert!((cone_distance(&base, &p, &q) - 2.0).abs() < 1e-14);
        let m = cone_interpolate(&base, &p, &q, 0.5).unwrap();
        assert!(m.is_apex());
        let m1 = cone_interpolate(&base, &p, &q, 0.25).unwrap();
        assert!((m1.height - 0.5).abs() < 1e-14);
        assert_eq!(m1.base, p.base);
    }
}
