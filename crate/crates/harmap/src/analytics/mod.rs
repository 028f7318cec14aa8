//! Regularity diagnostics measured on solved maps.
//!
//! For a map u on B(r) and radii sigma the profile records
//!
//!   E(sigma) = integral of |grad u|^2_g over B(sigma),
//!   I(sigma) = integral of d^2(u, Q_sigma) over the boundary sphere,
//!   alpha(sigma) = sigma E(sigma) / I(sigma),
//!
//! with Q_sigma the optimal (Fréchet) center of the boundary values. The
//! order is the sigma -> 0 limit of alpha; monotonicity of
//! E(sigma) / sigma^(n-2+2 alpha) is checked per octave. Hölder exponents
//! are fit as upper envelopes over sampled point pairs, and blow-up frames
//! rescale the map by mu_lambda = (lambda^(1-n) I(lambda))^(1/2) to test
//! homogeneity of the tangent map.

use rand::Rng;

use crate::domain::{LocalModel, Mesh, MetricField, ModelPoint};
use crate::energy::{EnergyReport, PLMap};
use crate::error::{Error, Result};
use crate::target::TargetPoint;

/// sigma-profile of energy, boundary moment, optimal centers and order.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub energy: Vec<f64>,
    pub moment: Vec<f64>,
    pub centers: Vec<TargetPoint>,
    pub alpha: Vec<f64>,
}

/// Extrapolated order with an honest uncertainty.
#[derive(Debug, Clone, Copy)]
pub struct OrderEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

/// Upper-envelope Hölder fit.
#[derive(Debug, Clone)]
pub struct HolderFit {
    pub exponent: f64,
    pub constant: f64,
    pub residual: f64,
    pub pairs: usize,
    pub bins: usize,
}

/// Region and sampling policy for Hölder fits.
#[derive(Debug, Clone)]
pub struct PairPolicy {
    /// Radius band [inner, outer] both endpoints must lie in.
    pub inner: f64,
    pub outer: f64,
    pub pairs: usize,
    pub bins: usize,
    pub seed: u64,
}

impl Default for PairPolicy {
    fn default() -> Self {
        PairPolicy {
            inner: 0.0,
            outer: 0.8,
            pairs: 20_000,
            bins: 24,
            seed: 17,
        }
    }
}

/// Rescaled samples of the map at scale lambda on a fixed polar grid.
#[derive(Debug, Clone)]
pub struct BlowUpFrame {
    pub lambda: f64,
    pub mu: f64,
    pub moment: f64,
    /// Grid radii as fractions of lambda (0, 1].
    pub grid_radii: Vec<f64>,
    /// Global angles of the grid columns.
    pub grid_angles: Vec<f64>,
    /// d_lambda(u(lambda x), u(0)) per (radius, angle), row-major.
    pub dist_to_center: Vec<f64>,
    /// d_lambda(u(lambda x/|x|), u(0)) per angle.
    pub boundary_dist: Vec<f64>,
}

impl BlowUpFrame {
    /// mu_lambda must match its defining formula to 1e-10.
    pub fn validate(&self, dimension: usize) -> Result<()> {
        let mu = (self.lambda.powi(1 - dimension as i32) * self.moment).sqrt();
        if (mu - self.mu).abs() > 1e-10 * (1.0 + mu) {
            return Err(Error::Invariant(format!(
                "mu_lambda {} disagrees with its formula {mu}",
                self.mu
            )));
        }
        Ok(())
    }
}

/// E(sigma) for each radius: per-simplex energies clipped to B(sigma).
pub fn energy_profile(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    radii: &[f64],
) -> Result<Vec<f64>> {
    let report = crate::energy::total_energy(mesh, field, map)?;
    energy_profile_from_report(mesh, &report, radii)
}

/// Same, reusing an existing per-simplex energy report.
pub fn energy_profile_from_report(
    mesh: &Mesh,
    report: &EnergyReport,
    radii: &[f64],
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(radii.len());
    for &sigma in radii {
        check_resolution(mesh, sigma)?;
        let dec = mesh.ball_decomposition(sigma)?;
        let mut e = 0.0;
        for &i in &dec.inside {
            e += report.per_simplex[i];
        }
        for &(i, f) in &dec.partial {
            e += f * report.per_simplex[i];
        }
        out.push(e);
    }
    Ok(out)
}

fn check_resolution(mesh: &Mesh, sigma: f64) -> Result<()> {
    if sigma <= 0.0 || sigma > mesh.radius {
        return Err(Error::Resolution(format!(
            "sigma {sigma} outside (0, {}]",
            mesh.radius
        )));
    }
    // At least 8 simplices must lie across the smallest ball.
    let count = mesh
        .simplices
        .iter()
        .filter(|s| {
            s.vertices
                .iter()
                .all(|&v| mesh.vertex_radius(v) <= sigma + 1e-12)
        })
        .count();
    if count < 8 {
        return Err(Error::Resolution(format!(
            "only {count} simplices inside sigma = {sigma}"
        )));
    }
    Ok(())
}

/// Boundary moment I(sigma, Q) with Q either prescribed or the optimal
/// center Q_sigma (returned alongside).
pub fn boundary_moment(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    sigma: f64,
    q: Option<&TargetPoint>,
    angular: usize,
) -> Result<(f64, TargetPoint)> {
    let sampling = mesh.sphere_sampling(field, sigma, angular)?;
    let mut values = Vec::with_capacity(sampling.points.len());
    for p in &sampling.points {
        values.push(map.eval(mesh, p)?);
    }
    let center = match q {
        Some(q) => q.clone(),
        None => map
            .space
            .frechet_mean_seeded(&values, &sampling.weights, 1e-12, &values[0])?,
    };
    let mut moment = 0.0;
    for (v, w) in values.iter().zip(&sampling.weights) {
        let d = map.space.distance_unchecked(v, &center);
        moment += w * d * d;
    }
    Ok((moment, center))
}

/// Full sigma-profile with optimal centers.
pub fn radial_profile(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    radii: &[f64],
    angular: usize,
) -> Result<RadialProfile> {
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let energy = energy_profile(mesh, field, map, &sorted)?;
    let mut moment = Vec::with_capacity(sorted.len());
    let mut centers = Vec::with_capacity(sorted.len());
    let mut alpha = Vec::with_capacity(sorted.len());
    for (j, &sigma) in sorted.iter().enumerate() {
        let (m, c) = boundary_moment(mesh, field, map, sigma, None, angular)?;
        if m <= 0.0 {
            return Err(Error::Degenerate(format!(
                "I(sigma) = 0 at sigma = {sigma}: constant boundary values, order undefined"
            )));
        }
        alpha.push(sigma * energy[j] / m);
        moment.push(m);
        centers.push(c);
    }
    Ok(RadialProfile {
        radii: sorted,
        energy,
        moment,
        centers,
        alpha,
    })
}

/// Order values alpha(sigma) with the extrapolated sigma -> 0 limit.
///
/// Aitken extrapolation over the three smallest radii; when the sequence is
/// already flat the smallest-radius value is reported with the observed
/// spread as uncertainty.
pub fn order_profile(profile: &RadialProfile) -> (Vec<f64>, OrderEstimate) {
    let a = &profile.alpha;
    let est = if a.len() >= 3 {
        let (a1, a2, a3) = (a[0], a[1], a[2]);
        let denom = a3 - 2.0 * a2 + a1;
        let gap_sq = (a2 - a1) * (a2 - a1);
        if denom.abs() < 1e-12 || gap_sq / denom.abs() > 10.0 * (a1.abs() + 1.0) {
            OrderEstimate {
                value: a1,
                uncertainty: (a1 - a2).abs().max(1e-12),
            }
        } else {
            let value = a1 - gap_sq / denom;
            OrderEstimate {
                value,
                uncertainty: (value - a1).abs().max((a1 - a2).abs()),
            }
        }
    } else {
        OrderEstimate {
            value: a[0],
            uncertainty: f64::INFINITY,
        }
    };
    (a.clone(), est)
}

/// Monotonicity diagnostic for sigma -> E(sigma) / sigma^q over octaves.
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub exponent: f64,
    /// Worst relative decrease of the ratio from sigma to 2 sigma.
    pub worst_violation: f64,
    pub octave_pairs: usize,
}

pub fn monotonicity_check(profile: &RadialProfile, q: f64) -> MonotonicityReport {
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for (j, &sj) in profile.radii.iter().enumerate() {
        // Find the octave partner 2 sigma within 2%.
        if let Some(k) = profile
            .radii
            .iter()
            .position(|&sk| (sk / sj - 2.0).abs() < 0.02)
        {
            pairs += 1;
            let rj = profile.energy[j] / sj.powf(q);
            let rk = profile.energy[k] / profile.radii[k].powf(q);
            if rk < rj {
                worst = worst.max((rj - rk) / rj);
            }
        }
    }
    MonotonicityReport {
        exponent: q,
        worst_violation: worst,
        octave_pairs: pairs,
    }
}

/// Log-spaced radii with `per_octave` points per octave from sigma_min up
/// to sigma_max, including exact doubling partners.
pub fn octave_radii(sigma_min: f64, sigma_max: f64, per_octave: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let octaves = (sigma_max / sigma_min).log2();
    let steps = (octaves * per_octave as f64).floor() as usize;
    for k in 0..=steps {
        out.push(sigma_min * 2f64.powf(k as f64 / per_octave as f64));
    }
    out
}

/// Uniform sample point in the radius band of a model (2d and 3d).
fn sample_region_point(
    model: &LocalModel,
    rng: &mut rand_chacha::ChaCha8Rng,
    inner: f64,
    outer: f64,
) -> ModelPoint {
    let wedge = rng.gen_range(0..model.wedges.len());
    let omega = model.wedges[wedge].angle;
    let lo = inner.max(1e-4 * outer).ln();
    let hi = outer.ln();
    let radius = (lo + (hi - lo) * rng.gen::<f64>()).exp();
    if model.dimension == 2 {
        let phi = omega * rng.gen::<f64>();
        ModelPoint {
            wedge,
            coords: vec![radius * phi.cos(), radius * phi.sin()],
        }
    } else {
        let phi = omega * rng.gen::<f64>();
        let z = 2.0 * rng.gen::<f64>() - 1.0;
        let s = (1.0 - z * z).sqrt();
        ModelPoint {
            wedge,
            coords: vec![radius * s * phi.cos(), radius * s * phi.sin(), radius * z],
        }
    }
}

/// Upper-envelope Hölder fit over sampled pairs: bin by log distance, take
/// the per-bin maximum of d(u(x), u(y)), regress log-log.
pub fn holder_fit(mesh: &Mesh, map: &PLMap, policy: &PairPolicy) -> Result<HolderFit> {
    if policy.pairs < 1000 {
        return Err(Error::Degenerate(
            "holder_fit needs at least 1000 sample pairs".into(),
        ));
    }
    let model = &mesh.model;
    let mut rng = crate::comparison::sample_rng(policy.seed, 0);
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(policy.pairs);
    let mut attempts = 0usize;
    // Below the mesh resolution the PL interpolant is linear no matter what
    // the map does, so pairs are confined to resolved scales: radii a few
    // rings out, separations a few local cells wide.
    let floor_r = mesh.ring_radii[0] * 3.0;
    let inner_eff = policy.inner.max(floor_r);
    while samples.len() < policy.pairs && attempts < policy.pairs * 50 {
        attempts += 1;
        let x = sample_region_point(model, &mut rng, inner_eff, policy.outer);
        // Separation proportional to the base radius, so every distance bin
        // sees pairs at the matching scale (where Hölder envelopes peak).
        let rx: f64 = x.coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        let hloc = crate::domain::local_edge_target(rx, mesh.radius, mesh.h, mesh.grading);
        let sep_lo = (2.5 * hloc).max(0.05 * rx);
        let sep_hi = (2.0 * rx).min(0.6 * policy.outer);
        if sep_lo >= sep_hi {
            continue;
        }
        let sep = (sep_lo.ln() + (sep_hi / sep_lo).ln() * rng.gen::<f64>()).exp();
        // Displace in the chart plane, then re-embed through the global
        // angle: the unfolding across a boundary ray is an isometry, so
        // cross-wedge pairs come out geometrically correct.
        let y = if model.dimension == 2 {
            let ang = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
            let plane = [x.coords[0] + sep * ang.cos(), x.coords[1] + sep * ang.sin()];
            let ry = (plane[0] * plane[0] + plane[1] * plane[1]).sqrt();
            let global = model.wedge_angle_offset(x.wedge) + plane[1].atan2(plane[0]);
            from_polar(model, ry, global)
        } else {
            let dir = crate::comparison::random_unit_vector(&mut rng, 3);
            let coords: Vec<f64> = (0..3).map(|d| x.coords[d] + sep * dir[d]).collect();
            let py = ModelPoint {
                wedge: x.wedge,
                coords,
            };
            // Keep 3d displacements inside the chart sector.
            let omega = model.wedges[py.wedge].angle;
            let ang = py.coords[1].atan2(py.coords[0]);
            if !(0.0..=omega).contains(&ang) {
                continue;
            }
            py
        };
        let ry: f64 = y.coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if ry < policy.inner || ry > policy.outer {
            continue;
        }
        let ux = map.eval(mesh, &x)?;
        let uy = map.eval(mesh, &y)?;
        let dist = model.distance(&x, &y);
        if dist < 1e-12 {
            continue;
        }
        samples.push((dist, map.space.distance_unchecked(&ux, &uy)));
    }
    if samples.len() < 1000 {
        return Err(Error::Degenerate(format!(
            "pair sampling starved: {} of {} pairs accepted",
            samples.len(),
            policy.pairs
        )));
    }
    let max_val = samples.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    if max_val < 1e-13 {
        return Err(Error::Degenerate(
            "constant map: Hölder fit undefined".into(),
        ));
    }
    // Log-spaced bins over the trusted separation range: below a couple of
    // radius floors the envelope's maximizing pairs cannot exist on the
    // mesh. The floor is capped so coarse meshes keep a usable fit window.
    let bin_floor = (2.2 * inner_eff).min(0.3 * policy.outer);
    let lo = samples
        .iter()
        .map(|&(d, _)| d)
        .fold(f64::INFINITY, f64::min)
        .max(bin_floor);
    let hi = samples.iter().map(|&(d, _)| d).fold(0.0, f64::max);
    samples.retain(|&(d, _)| d >= lo);
    let (llo, lhi) = (lo.ln(), hi.ln() + 1e-12);
    let nb = policy.bins;
    let mut env = vec![0.0f64; nb];
    let mut mid = vec![0.0f64; nb];
    for (b, m) in mid.iter_mut().enumerate() {
        *m = (llo + (b as f64 + 0.5) / nb as f64 * (lhi - llo)).exp();
    }
    for &(d, v) in &samples {
        let b = (((d.ln() - llo) / (lhi - llo) * nb as f64) as usize).min(nb - 1);
        env[b] = env[b].max(v);
    }
    let points: Vec<(f64, f64)> = mid
        .iter()
        .zip(&env)
        .filter(|&(_, &e)| e > 1e-13)
        .map(|(&m, &e)| (m, e))
        .collect();
    if points.len() < 4 {
        return Err(Error::Degenerate("too few populated bins".into()));
    }
    let exponent = crate::comparison::fit_loglog_slope(&points);
    let n = points.len() as f64;
    let mean_x: f64 = points.iter().map(|&(x, _)| x.ln()).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|&(_, y)| y.ln()).sum::<f64>() / n;
    let intercept = mean_y - exponent * mean_x;
    let residual = (points
        .iter()
        .map(|&(x, y)| {
            let r = y.ln() - (intercept + exponent * x.ln());
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    // Exponents outside (0, 1.5] are outside the regime the fit is meant
    // for; surface them as errors (with the value) instead of returning a
    // fit that violates the type's invariant.
    if !(exponent > 0.0 && exponent <= 1.5) {
        return Err(Error::Invariant(format!(
            "Hölder fit exponent {exponent} outside (0, 1.5] (residual {residual})"
        )));
    }
    Ok(HolderFit {
        exponent,
        constant: intercept.exp(),
        residual,
        pairs: samples.len(),
        bins: points.len(),
    })
}

/// Blow-up frame at scale lambda around the origin.
pub fn blow_up(
    mesh: &Mesh,
    field: &MetricField,
    map: &PLMap,
    lambda: f64,
    radial_samples: usize,
    angular_samples: usize,
    moment_angular: usize,
) -> Result<BlowUpFrame> {
    if mesh.dimension() != 2 {
        return Err(Error::Unsupported(
            "blow-up frames are implemented for 2-dimensional models".into(),
        ));
    }
    check_resolution(mesh, lambda)?;
    let (moment, _center) = boundary_moment(mesh, field, map, lambda, None, moment_angular)?;
    if moment <= 1e-28 {
        return Err(Error::Degenerate(
            "mu_lambda = 0: map constant on the sphere, blow-up degenerate".into(),
        ));
    }
    let n = mesh.dimension() as i32;
    let mu = (lambda.powi(1 - n) * moment).sqrt();
    let center_val = map.eval(
        mesh,
        &ModelPoint {
            wedge: 0,
            coords: vec![0.0; mesh.dimension()],
        },
    )?;
    let total_angle = mesh.model.total_angle();
    let grid_radii: Vec<f64> = (1..=radial_samples)
        .map(|k| k as f64 / radial_samples as f64)
        .collect();
    let grid_angles: Vec<f64> = (0..angular_samples)
        .map(|k| (k as f64 + 0.5) / angular_samples as f64 * total_angle)
        .collect();
    let mut dist_to_center = Vec::with_capacity(grid_radii.len() * grid_angles.len());
    let mut boundary_dist = Vec::with_capacity(grid_angles.len());
    for &phi in &grid_angles {
        let p = from_polar(&mesh.model, lambda, phi);
        let v = map.eval(mesh, &p)?;
        boundary_dist.push(map.space.distance_unchecked(&v, &center_val) / mu);
    }
    for &rho in &grid_radii {
        for &phi in &grid_angles {
            let p = from_polar(&mesh.model, rho * lambda, phi);
            let v = map.eval(mesh, &p)?;
            dist_to_center.push(map.space.distance_unchecked(&v, &center_val) / mu);
        }
    }
    Ok(BlowUpFrame {
        lambda,
        mu,
        moment,
        grid_radii,
        grid_angles,
        dist_to_center,
        boundary_dist,
    })
}

/// Chart point at global polar coordinates of a 2d model.
pub fn from_polar(model: &LocalModel, r: f64, phi_global: f64) -> ModelPoint {
    let mut phi = phi_global.rem_euclid(model.total_angle());
    let mut wedge = 0;
    for (w, wd) in model.wedges.iter().enumerate() {
        if phi <= wd.angle || w == model.wedges.len() - 1 {
            wedge = w;
            break;
        }
        phi -= wd.angle;
    }
    let phi = phi.min(model.wedges[wedge].angle);
    ModelPoint {
        wedge,
        coords: vec![r * phi.cos(), r * phi.sin()],
    }
}

/// Max deviation from alpha-homogeneity over the frame grid:
/// | d_l(u_l(x), u_l(0)) - |x|^alpha d_l(u_l(x/|x|), u_l(0)) |.
pub fn homogeneity_deviation(frame: &BlowUpFrame, alpha: f64) -> f64 {
    let mut worst = 0.0f64;
    let na = frame.grid_angles.len();
    for (i, &rho) in frame.grid_radii.iter().enumerate() {
        for a in 0..na {
            let measured = frame.dist_to_center[i * na + a];
            let predicted = rho.powf(alpha) * frame.boundary_dist[a];
            worst = worst.max((measured - predicted).abs());
        }
    }
    worst
}
