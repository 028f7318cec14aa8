//! Randomized brute-force checks of the comparison estimates that the
//! regularity theory rests on, run on the model sphere S^2 (and on trees,
//! which are CAT(k) for every k).
//!
//! Margins are oriented so that "inequality holds" means margin >= 0; a
//! sample counts as a violation only when its margin drops below -1e-9,
//! which separates genuine failures from roundoff.
//!
//! Cubic error terms are not testable pointwise. They are tested as scale
//! families: shrink a fixed triangle shape through diameters h and require
//! the envelope of |RHS - LHS| to decay like h^3 in log-log.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{self, ConePoint};
use crate::error::{Error, Result};
use crate::target::{dot, slerp, sphere_distance, sphere_exp, TargetPoint, TargetSpace};

/// Numeric tolerance below which a negative margin counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Outcome of one randomized oracle run.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub lemma: String,
    pub samples: usize,
    pub violations: usize,
    /// Most negative margin seen (positive when every sample had slack).
    pub worst_margin: f64,
    pub params: String,
}

impl OracleReport {
    fn new(lemma: &str, params: String) -> Self {
        Self {
            lemma: lemma.to_string(),
            samples: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            params,
        }
    }

    fn record(&mut self, margin: f64) {
        self.samples += 1;
        if margin < -VIOLATION_TOL {
            self.violations += 1;
        }
        if margin < self.worst_margin {
            self.worst_margin = margin;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Deterministic per-sample RNG so reports do not depend on worker count.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed ^ index
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(0x6A09_E667_F3BC_C909),
    )
}

/// Uniform point on S^{n-1} via normalized Gaussians (Box-Muller).
pub fn random_unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen::<f64>().max(1e-300);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Unit tangent vector at a point of the sphere.
pub fn random_tangent(rng: &mut impl Rng, at: &[f64]) -> Vec<f64> {
    loop {
        let v = random_unit_vector(rng, at.len());
        let c = dot(&v, at);
        let mut t: Vec<f64> = v.iter().zip(at).map(|(x, a)| x - c * a).collect();
        let norm = t.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for x in &mut t {
                *x /= norm;
            }
            return t;
        }
    }
}

/// Point at distance uniform in (0, max_dist] from `center`.
pub fn random_point_near(rng: &mut impl Rng, center: &[f64], max_dist: f64) -> Vec<f64> {
    let t = random_tangent(rng, center);
    let d = rng.gen::<f64>() * max_dist;
    let v: Vec<f64> = t.iter().map(|x| x * d).collect();
    sphere_exp(center, &v)
}

/// Comparison triangle on S^2 with the three prescribed side lengths.
///
/// Places P at the pole, Q in the xz-plane, and recovers the angle at P by
/// the spherical law of cosines. Errors when the triangle inequality fails
/// or the perimeter reaches 2 pi.
pub fn comparison_triangle(d_pq: f64, d_qr: f64, d_rp: f64) -> Result<[Vec<f64>; 3]> {
    let sides = [d_pq, d_qr, d_rp];
    if sides.iter().any(|s| *s < 0.0 || *s > std::f64::consts::PI) {
        return Err(Error::Degenerate(format!("side lengths {sides:?}")));
    }
    if d_pq + d_qr + d_rp >= 2.0 * std::f64::consts::PI {
        return Err(Error::Degenerate("perimeter >= 2 pi".into()));
    }
    if d_pq > d_qr + d_rp + 1e-14 || d_qr > d_pq + d_rp + 1e-14 || d_rp > d_pq + d_qr + 1e-14 {
        return Err(Error::Degenerate("triangle inequality fails".into()));
    }
    let p = vec![0.0, 0.0, 1.0];
    let q = vec![d_pq.sin(), 0.0, d_pq.cos()];
    let denom = d_pq.sin() * d_rp.sin();
    let angle_at_p = if denom < 1e-14 {
        0.0
    } else {
        ((d_qr.cos() - d_pq.cos() * d_rp.cos()) / denom)
            .clamp(-1.0, 1.0)
            .acos()
    };
    let r = vec![
        d_rp.sin() * angle_at_p.cos(),
        d_rp.sin() * angle_at_p.sin(),
        d_rp.cos(),
    ];
    Ok([p, q, r])
}

/// CAT(1) triangle-comparison margin for interpolants toward Q:
/// d~(P~_t, R~_s) - d(P_t, R_s). Nonnegative in a CAT(1) space, zero on the
/// sphere itself.
pub fn check_cat1_condition(
    space: &TargetSpace,
    p: &TargetPoint,
    q: &TargetPoint,
    r: &TargetPoint,
    t: f64,
    s: f64,
) -> Result<f64> {
    let d_pq = space.distance(p, q)?;
    let d_qr = space.distance(q, r)?;
    let d_rp = space.distance(r, p)?;
    if d_pq + d_qr + d_rp >= 2.0 * std::f64::consts::PI {
        return Err(Error::Degenerate("perimeter >= 2 pi".into()));
    }
    let p_t = space.interpolate(p, q, t)?;
    let r_s = space.interpolate(r, q, s)?;
    let inner = space.distance(&p_t, &r_s)?;
    let [cp, cq, cr] = comparison_triangle(d_pq, d_qr, d_rp)?;
    let cp_t = slerp(&cp, &cq, t)?;
    let cr_s = slerp(&cr, &cq, s)?;
    Ok(sphere_distance(&cp_t, &cr_s) - inner)
}

/// Quadrilateral margin of the four-point estimate with slack eps0 * delta0^2:
/// sum of squared sides + slack - sum of squared diagonals.
pub fn quadrilateral_margin(
    pts: [&[f64]; 4],
    eps0: f64,
    delta0: f64,
    perturb: f64,
) -> f64 {
    let [p, q, r, s] = pts;
    let sq = |a: &[f64], b: &[f64]| {
        let d = sphere_distance(a, b);
        d * d
    };
    sq(p, q) + sq(q, r) + sq(r, s) + sq(p, s) + eps0 * delta0 * delta0 - perturb
        - sq(p, r)
        - sq(q, s)
}

/// Randomized quadrilateral report at one (eps0, delta0) pair. Sides are
/// kept below delta0 by construction.
pub fn quadrilateral_report(seed: u64, samples: usize, eps0: f64, delta0: f64, perturb: f64) -> OracleReport {
    let mut report = OracleReport::new(
        "four_point_quadrilateral",
        format!("eps0={eps0};delta0={delta0}"),
    );
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let p = random_unit_vector(&mut rng, 3);
        let q = random_point_near(&mut rng, &p, delta0);
        let (r, s) = loop {
            let r = random_point_near(&mut rng, &q, delta0);
            let s = random_point_near(&mut rng, &p, delta0);
            if sphere_distance(&r, &s) <= delta0 {
                break (r, s);
            }
        };
        report.record(quadrilateral_margin([&p, &q, &r, &s], eps0, delta0, perturb));
    }
    report
}

/// Sweep delta0 downward for each eps0 and record the largest grid value of
/// delta0 with a violation-free run (the empirical threshold).
pub fn quadrilateral_sweep(
    seed: u64,
    samples: usize,
    eps_grid: &[f64],
    delta_grid: &[f64],
) -> Vec<(f64, f64, Vec<OracleReport>)> {
    let mut out = Vec::new();
    for &eps0 in eps_grid {
        let mut threshold = 0.0;
        let mut reports = Vec::new();
        let mut deltas = delta_grid.to_vec();
        deltas.sort_by(|a, b| b.total_cmp(a));
        for &delta0 in &deltas {
            let rep = quadrilateral_report(seed, samples, eps0, delta0, 0.0);
            let ok = rep.passed();
            reports.push(rep);
            if ok && threshold == 0.0 {
                threshold = delta0;
            }
        }
        out.push((eps0, threshold, reports));
    }
    out
}

/// Margin of the interpolation estimate (sine-ratio form) on sphere points:
/// RHS - d^2(P_eta', S_eta) with P_eta' = (1-eta')P + eta'Q and
/// S_eta = (1-eta)S + eta Q.
pub fn interpolation_margin(
    p: &[f64],
    q: &[f64],
    s: &[f64],
    eta: f64,
    eta_p: f64,
) -> Result<f64> {
    let d_qs = sphere_distance(q, s);
    let d_qp = sphere_distance(q, p);
    let d_ps = sphere_distance(p, s);
    let sin_ratio = if d_qs.sin().abs() < 1e-12 {
        (1.0 - eta) * (1.0 - eta)
    } else {
        let r = (((1.0 - eta) * d_qs).sin()) / d_qs.sin();
        r * r
    };
    let rhs = sin_ratio * (d_ps * d_ps - (d_qs - d_qp) * (d_qs - d_qp))
        + ((1.0 - eta) * (d_qs - d_qp) + (eta_p - eta) * d_qs).powi(2);
    let p_eta = slerp(p, q, eta_p)?;
    let s_eta = slerp(s, q, eta)?;
    let lhs = sphere_distance(&p_eta, &s_eta).powi(2);
    Ok(rhs - lhs)
}

/// Margin of the expanded (Taylor) interpolation estimate, omitting the
/// unknown Quad and Cub remainders. Meaningful only in scale families where
/// eta and eta' shrink with the triangle.
pub fn interpolation_margin_expanded(
    p: &[f64],
    q: &[f64],
    s: &[f64],
    eta: f64,
    eta_p: f64,
) -> Result<f64> {
    let d_qs = sphere_distance(q, s);
    let d_qp = sphere_distance(q, p);
    let d_ps = sphere_distance(p, s);
    let rhs = (1.0 - 2.0 * eta + eta * d_qs * d_qs) * d_ps * d_ps
        - 2.0 * (eta - eta_p) * (d_qs - d_qp) * d_qs
        + (eta_p - eta) * (eta_p - eta) * d_qs * d_qs;
    let p_eta = slerp(p, q, eta_p)?;
    let s_eta = slerp(s, q, eta)?;
    let lhs = sphere_distance(&p_eta, &s_eta).powi(2);
    Ok(rhs - lhs)
}

/// Midpoint convexity margin: RHS - LHS of
///   1/8 cos(d(Q_1/2, P)) d_QR^2  <=  1/2 (d_RP^2 + d_QP^2) - d(Q_1/2, P)^2
/// with Q_1/2 the midpoint of Q and R. Requires d_PQ, d_PR < pi/2.
pub fn check_midpoint_convexity(
    space: &TargetSpace,
    p: &TargetPoint,
    q: &TargetPoint,
    r: &TargetPoint,
) -> Result<f64> {
    let d_qp = space.distance(q, p)?;
    let d_rp = space.distance(r, p)?;
    if d_qp >= std::f64::consts::FRAC_PI_2 || d_rp >= std::f64::consts::FRAC_PI_2 {
        return Err(Error::Degenerate(
            "midpoint convexity needs d_PQ, d_PR < pi/2".into(),
        ));
    }
    let d_qr = space.distance(q, r)?;
    let mid = space.interpolate(q, r, 0.5)?;
    let d_mid = space.distance(&mid, p)?;
    let lhs = 0.125 * d_mid.cos() * d_qr * d_qr;
    let rhs = 0.5 * (d_rp * d_rp + d_qp * d_qp) - d_mid * d_mid;
    Ok(rhs - lhs)
}

/// Fixed-seed report for the midpoint convexity estimate on a space.
pub fn midpoint_convexity_report(
    space: &TargetSpace,
    seed: u64,
    samples: usize,
    perturb: f64,
) -> OracleReport {
    let mut report = OracleReport::new("midpoint_convexity", format!("space={}", space_tag(space)));
    let mut i = 0u64;
    while report.samples < samples {
        let mut rng = sample_rng(seed, i);
        i += 1;
        let (p, q, r) = random_triple(space, &mut rng, std::f64::consts::FRAC_PI_2 * 0.98);
        match check_midpoint_convexity(space, &p, &q, &r) {
            Ok(m) => report.record(m - perturb),
            Err(_) => continue,
        }
    }
    report
}

/// Fixed-seed report for the CAT(1) interpolation comparison on a space.
pub fn cat1_condition_report(
    space: &TargetSpace,
    seed: u64,
    samples: usize,
    perturb: f64,
) -> OracleReport {
    let mut report = OracleReport::new("cat1_comparison", format!("space={}", space_tag(space)));
    let mut i = 0u64;
    while report.samples < samples {
        let mut rng = sample_rng(seed, i);
        i += 1;
        let (p, q, r) = random_triple(space, &mut rng, 1.2);
        let t: f64 = rng.gen();
        let s: f64 = rng.gen();
        match check_cat1_condition(space, &p, &q, &r, t, s) {
            Ok(m) => report.record(m - perturb),
            Err(_) => continue,
        }
    }
    report
}

fn space_tag(space: &TargetSpace) -> &'static str {
    match space {
        TargetSpace::Sphere { .. } => "sphere",
        TargetSpace::Tree(_) => "tree",
        TargetSpace::Arc { .. } => "arc",
        TargetSpace::Euclidean { .. } => "euclidean",
        TargetSpace::Cone { .. } => "cone",
    }
}

/// Random triple with pairwise distances bounded by `scale` (sphere samples
/// cluster around a random pole; tree samples are uniform over edges).
fn random_triple(
    space: &TargetSpace,
    rng: &mut impl Rng,
    scale: f64,
) -> (TargetPoint, TargetPoint, TargetPoint) {
    match space {
        TargetSpace::Sphere { dim } => {
            let c = random_unit_vector(rng, dim + 1);
            let mut mk = || TargetPoint::Sphere(random_point_near(rng, &c, scale / 2.0));
            let (p, q, r) = (mk(), mk(), mk());
            (p, q, r)
        }
        TargetSpace::Tree(t) => {
            let mut mk = || {
                let e = (rng.gen::<f64>() * t.edge_count() as f64) as usize % t.edge_count();
                let len = t.edge(e).2;
                TargetPoint::Tree(crate::target::TreePoint {
                    edge: e,
                    offset: rng.gen::<f64>() * len.min(scale / 2.0),
                })
            };
            let (p, q, r) = (mk(), mk(), mk());
            (p, q, r)
        }
        _ => unimplemented!("oracle sampling targets sphere and tree models"),
    }
}

/// Metric-axiom report: symmetry, identity, triangle inequality on random
/// triples.
pub fn metric_axioms_report(space: &TargetSpace, seed: u64, samples: usize) -> OracleReport {
    let mut report = OracleReport::new("metric_axioms", format!("space={}", space_tag(space)));
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let (p, q, r) = random_triple(space, &mut rng, 2.0);
        let d_pq = space.distance_unchecked(&p, &q);
        let d_qp = space.distance_unchecked(&q, &p);
        let d_qr = space.distance_unchecked(&q, &r);
        let d_pr = space.distance_unchecked(&p, &r);
        let d_pp = space.distance_unchecked(&p, &p);
        let sym = -(d_pq - d_qp).abs();
        let ident = -d_pp.abs();
        let tri = d_pq + d_qr - d_pr;
        report.record(sym.min(ident).min(tri));
    }
    report
}

/// Cone-bound report over a sphere base: the lift band, the infinitesimal
/// isometry, the small-distance lower bound and the projection inequality.
pub fn cone_bounds_report(seed: u64, samples: usize, perturb: f64) -> OracleReport {
    let base = TargetSpace::Sphere { dim: 2 };
    let mut report = OracleReport::new("cone_bounds", "base=sphere".into());
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let p = random_unit_vector(&mut rng, 3);
        let q = random_point_near(&mut rng, &p, std::f64::consts::FRAC_PI_2 * 0.999);
        let d = sphere_distance(&p, &q);
        if d < 1e-9 {
            report.record(0.0);
            continue;
        }
        let lift_p = cone::lift(&TargetPoint::Sphere(p.clone()));
        let lift_q = cone::lift(&TargetPoint::Sphere(q.clone()));
        let dd = cone::cone_distance(&base, &lift_p, &lift_q);
        let ratio = dd * dd / (d * d);
        // Band 1/2 <= D^2/d^2 <= 1 for d < pi/2.
        let band = (ratio - 0.5).min(1.0 - ratio);
        // Infinitesimal isometry: |1 - ratio| <= d^2/4 comfortably.
        let iso = d * d / 4.0 - (1.0 - ratio).abs();
        // Lower bound d^2 (1 - d^2) <= D^2 for d small.
        let lower = if d <= 1.0 {
            dd * dd - d * d * (1.0 - d * d)
        } else {
            f64::INFINITY
        };
        // Projection inequality D^2([P,t],[Q,s]) >= s t D^2(Pi a, Pi b).
        let t = 0.5 + 1.5 * rng.gen::<f64>();
        let s = 0.5 + 1.5 * rng.gen::<f64>();
        let a = ConePoint::new(TargetPoint::Sphere(p), t);
        let b = ConePoint::new(TargetPoint::Sphere(q), s);
        let dab = cone::cone_distance(&base, &a, &b);
        let proj = dab * dab - s * t * dd * dd;
        report.record(band.min(iso).min(lower).min(proj) - perturb);
    }
    report
}

/// CAT(0) four-point condition for cones over a CAT(1) base; run on the
/// tripod base where the cone genuinely branches.
pub fn cone_four_point_report(seed: u64, samples: usize, perturb: f64) -> OracleReport {
    let tree = crate::target::MetricTree::tripod();
    let base = TargetSpace::Tree(tree.clone());
    let mut report = OracleReport::new("cone_four_point", "base=tripod".into());
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let pt = |rng: &mut ChaCha8Rng| {
            let e = rng.gen_range(0..tree.edge_count());
            let len = tree.edge(e).2;
            ConePoint::new(
                TargetPoint::Tree(crate::target::TreePoint {
                    edge: e,
                    offset: rng.gen::<f64>() * len,
                }),
                rng.gen::<f64>() * 2.0,
            )
        };
        let (p, q, r, s) = (pt(&mut rng), pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let sq = |a: &ConePoint, b: &ConePoint| {
            let d = cone::cone_distance(&base, a, b);
            d * d
        };
        let margin =
            sq(&p, &q) + sq(&q, &r) + sq(&r, &s) + sq(&p, &s) - sq(&p, &r) - sq(&q, &s) - perturb;
        report.record(margin);
    }
    report
}

/// One shrinking-shape family: a fixed tangent configuration at a base point
/// evaluated at every diameter in `hs`.
#[derive(Debug, Clone, Copy)]
pub enum ScaleFamily {
    /// Interpolation estimate with eta = eta' held fixed.
    SineRatioFixed { eta: f64 },
    /// Interpolation estimate with a shrinking eta gap: eta' = eta + gap * h.
    SineRatioShrinkingGap { eta: f64, gap: f64 },
    /// Expanded estimate with eta = a h, eta' = b h.
    ExpandedScaled { a: f64, b: f64 },
}

/// Envelope of |RHS - LHS| over random shapes, per diameter.
pub fn interpolation_scale_envelope(
    seed: u64,
    shapes: usize,
    hs: &[f64],
    family: ScaleFamily,
) -> Vec<(f64, f64)> {
    let mut env = vec![0.0f64; hs.len()];
    for i in 0..shapes {
        let mut rng = sample_rng(seed, i as u64);
        let center = random_unit_vector(&mut rng, 3);
        let dirs: Vec<Vec<f64>> = (0..3).map(|_| random_tangent(&mut rng, &center)).collect();
        let mags: Vec<f64> = (0..3).map(|_| 0.5 + 0.5 * rng.gen::<f64>()).collect();
        for (j, &h) in hs.iter().enumerate() {
            let pts: Vec<Vec<f64>> = dirs
                .iter()
                .zip(&mags)
                .map(|(d, m)| {
                    let v: Vec<f64> = d.iter().map(|x| x * m * h).collect();
                    sphere_exp(&center, &v)
                })
                .collect();
            let (p, q, s) = (&pts[0], &pts[1], &pts[2]);
            let margin = match family {
                ScaleFamily::SineRatioFixed { eta } => {
                    interpolation_margin(p, q, s, eta, eta).unwrap()
                }
                ScaleFamily::SineRatioShrinkingGap { eta, gap } => {
                    interpolation_margin(p, q, s, eta, (eta + gap * h).min(1.0)).unwrap()
                }
                ScaleFamily::ExpandedScaled { a, b } => {
                    interpolation_margin_expanded(p, q, s, a * h, b * h).unwrap()
                }
            };
            env[j] = env[j].max(margin.abs());
        }
    }
    hs.iter().copied().zip(env).collect()
}

/// Least-squares slope of log y against log x.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.max(1e-300).ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
