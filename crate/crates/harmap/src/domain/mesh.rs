//! Simplicial meshes of the Euclidean ball B(r) in a local model.
//!
//! The construction is radial: graded ring radii shared by all wedges, per
//! ring an angular sampling matched to the local target edge length, strips
//! between consecutive rings triangulated by an angle-sorted merge (2d) or
//! prisms split into tetrahedra (3d). Glued boundary cells share vertex ids,
//! so the complex is conforming across wedges by construction.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::{LocalModel, MetricField, ModelPoint, RayId};
use crate::error::{Error, Result};

/// Nondegeneracy threshold for Euclidean simplex volumes.
const VOLUME_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum GlueMark {
    Interior,
    /// On the glued boundary cell of the given gluing class.
    Class(usize),
    /// On the (n-2)-skeleton: the origin (n = 2) or the axis (n = 3).
    Skeleton,
}

#[derive(Debug, Clone)]
pub struct Vertex {
    /// One chart position per wedge the vertex belongs to.
    pub positions: Vec<(usize, Vec<f64>)>,
    pub boundary: bool,
    pub glue: GlueMark,
}

#[derive(Debug, Clone)]
pub struct Simplex {
    pub vertices: Vec<usize>,
    pub wedge: usize,
}

pub struct Mesh {
    pub model: LocalModel,
    pub radius: f64,
    pub h: f64,
    pub grading: f64,
    pub vertices: Vec<Vertex>,
    pub simplices: Vec<Simplex>,
    /// Structured ring radii (ascending, last = radius; origin excluded).
    pub ring_radii: Vec<f64>,
    locator: OnceLock<Locator>,
}

impl Clone for Mesh {
    fn clone(&self) -> Self {
        Mesh {
            model: self.model.clone(),
            radius: self.radius,
            h: self.h,
            grading: self.grading,
            vertices: self.vertices.clone(),
            simplices: self.simplices.clone(),
            ring_radii: self.ring_radii.clone(),
            locator: OnceLock::new(),
        }
    }
}

/// Polygonal sphere approximation of the boundary circle/sphere of B(sigma),
/// with metric-induced quadrature weights.
#[derive(Debug, Clone)]
pub struct SphereSampling {
    pub sigma: f64,
    pub points: Vec<ModelPoint>,
    pub weights: Vec<f64>,
}

impl SphereSampling {
    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Simplices of the ball B(sigma): fully interior ones and boundary-crossing
/// ones with their (Euclidean) volume fraction inside.
#[derive(Debug, Clone)]
pub struct BallDecomposition {
    pub sigma: f64,
    pub inside: Vec<usize>,
    pub partial: Vec<(usize, f64)>,
}

/// Target local edge length at radius rho for grading exponent p: edges
/// scale like (rho / r)^(p - 1), floored at rho = h.
pub fn local_edge_target(rho: f64, r: f64, h: f64, grading: f64) -> f64 {
    h * (rho.max(h) / r).powf(grading - 1.0)
}

/// Conforming mesh of B(r) with radial grading. `h` is the target edge
/// length at the outer boundary; pre: h < r / 4.
pub fn triangulate(model: &LocalModel, r: f64, h: f64, grading: f64) -> Result<Mesh> {
    if !(r > 0.0) || !(h > 0.0) || h >= r / 4.0 {
        return Err(Error::Degenerate(format!(
            "triangulate needs 0 < h < r/4, got h={h}, r={r}"
        )));
    }
    if !model.admissible {
        return Err(Error::Degenerate("model is not admissible".into()));
    }
    let rings = ring_radii(r, h, grading);
    match model.dimension {
        2 => triangulate_2d(model, r, h, grading, rings),
        3 => triangulate_3d(model, r, h, grading, rings),
        d => Err(Error::Unsupported(format!("dimension {d} meshes"))),
    }
}

fn ring_radii(r: f64, h: f64, grading: f64) -> Vec<f64> {
    let mut rings = vec![r];
    loop {
        let cur = *rings.last().unwrap();
        let next = cur - local_edge_target(cur, r, h, grading);
        if next <= 0.6 * local_edge_target(next.max(0.0), r, h, grading) {
            break;
        }
        rings.push(next);
    }
    rings.reverse();
    rings
}

/// Ray-class lookup: gluing class owning (wedge, ray), if any.
fn ray_class(model: &LocalModel, wedge: usize, ray: RayId) -> Option<usize> {
    model
        .gluings
        .iter()
        .position(|g| g.cells.contains(&(wedge, ray)))
}

struct Builder {
    vertices: Vec<Vertex>,
    shared: HashMap<(usize, usize), usize>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            vertices: Vec::new(),
            shared: HashMap::new(),
        }
    }

    fn fresh(&mut self, wedge: usize, coords: Vec<f64>, boundary: bool, glue: GlueMark) -> usize {
        self.vertices.push(Vertex {
            positions: vec![(wedge, coords)],
            boundary,
            glue,
        });
        self.vertices.len() - 1
    }

    /// Vertex shared under a dedup key; extra wedge positions accumulate.
    fn shared(
        &mut self,
        key: (usize, usize),
        wedge: usize,
        coords: Vec<f64>,
        boundary: bool,
        glue: GlueMark,
    ) -> usize {
        if let Some(&id) = self.shared.get(&key) {
            if !self.vertices[id].positions.iter().any(|(w, _)| *w == wedge) {
                self.vertices[id].positions.push((wedge, coords));
            }
            return id;
        }
        let id = self.fresh(wedge, coords, boundary, glue);
        self.shared.insert(key, id);
        id
    }
}

// Dedup key namespaces.
const KEY_CENTER: usize = 0;
const KEY_RAY: usize = 1; // (KEY_RAY + class, ring)
const KEY_POLE_N: usize = 1 << 20;
const KEY_POLE_S: usize = (1 << 20) + 1;

fn triangulate_2d(
    model: &LocalModel,
    r: f64,
    h: f64,
    grading: f64,
    rings: Vec<f64>,
) -> Result<Mesh> {
    let mut b = Builder::new();
    let center = b.shared(
        (KEY_CENTER, 0),
        0,
        vec![0.0, 0.0],
        false,
        GlueMark::Skeleton,
    );
    for w in 1..model.wedges.len() {
        b.shared((KEY_CENTER, 0), w, vec![0.0, 0.0], false, GlueMark::Skeleton);
    }
    let last_ring = rings.len() - 1;
    let mut simplices = Vec::new();
    for (w, wedge) in model.wedges.iter().enumerate() {
        let omega = wedge.angle;
        let low_class = ray_class(model, w, RayId::Low);
        let high_class = ray_class(model, w, RayId::High);
        // Ring vertex lists (ids + angles), inner to outer.
        let mut ring_lists: Vec<Vec<(usize, f64)>> = Vec::with_capacity(rings.len());
        for (j, &rho) in rings.iter().enumerate() {
            let count = ((omega * rho / local_edge_target(rho, r, h, grading)).ceil() as usize)
                .max(2);
            let boundary = j == last_ring;
            let mut list = Vec::with_capacity(count + 1);
            for k in 0..=count {
                let theta = omega * k as f64 / count as f64;
                let coords = vec![rho * theta.cos(), rho * theta.sin()];
                let id = if k == 0 {
                    match low_class {
                        Some(c) => b.shared(
                            (KEY_RAY + c, j + 1),
                            w,
                            vec![rho, 0.0],
                            boundary,
                            GlueMark::Class(c),
                        ),
                        None => b.fresh(w, vec![rho, 0.0], boundary, GlueMark::Interior),
                    }
                } else if k == count {
                    match high_class {
                        Some(c) => {
                            b.shared((KEY_RAY + c, j + 1), w, coords, boundary, GlueMark::Class(c))
                        }
                        None => b.fresh(w, coords, boundary, GlueMark::Interior),
                    }
                } else {
                    b.fresh(w, coords, boundary, GlueMark::Interior)
                };
                list.push((id, theta));
            }
            ring_lists.push(list);
        }
        // Fan from the center to the innermost ring.
        let first = &ring_lists[0];
        for k in 0..first.len() - 1 {
            simplices.push(Simplex {
                vertices: vec![center, first[k].0, first[k + 1].0],
                wedge: w,
            });
        }
        // Strips between consecutive rings: angle-sorted merge.
        for j in 0..rings.len() - 1 {
            let inner = &ring_lists[j];
            let outer = &ring_lists[j + 1];
            let (mut i, mut k) = (0usize, 0usize);
            while i + 1 < inner.len() || k + 1 < outer.len() {
                let advance_outer = if i + 1 >= inner.len() {
                    true
                } else if k + 1 >= outer.len() {
                    false
                } else {
                    outer[k + 1].1 <= inner[i + 1].1
                };
                if advance_outer {
                    simplices.push(Simplex {
                        vertices: vec![inner[i].0, outer[k].0, outer[k + 1].0],
                        wedge: w,
                    });
                    k += 1;
                } else {
                    simplices.push(Simplex {
                        vertices: vec![inner[i].0, outer[k].0, inner[i + 1].0],
                        wedge: w,
                    });
                    i += 1;
                }
            }
        }
    }
    let mut mesh = Mesh {
        model: model.clone(),
        radius: r,
        h,
        grading,
        vertices: b.vertices,
        simplices,
        ring_radii: rings,
        locator: OnceLock::new(),
    };
    mesh.normalize_orientations();
    mesh.reject_degenerate()?;
    Ok(mesh)
}

fn triangulate_3d(
    model: &LocalModel,
    r: f64,
    h: f64,
    grading: f64,
    rings: Vec<f64>,
) -> Result<Mesh> {
    let dang = (h / r).min(0.8);
    let npsi = ((std::f64::consts::PI / dang).ceil() as usize).max(4);
    let mut b = Builder::new();
    let center = b.shared(
        (KEY_CENTER, 0),
        0,
        vec![0.0, 0.0, 0.0],
        false,
        GlueMark::Skeleton,
    );
    for w in 1..model.wedges.len() {
        b.shared(
            (KEY_CENTER, 0),
            w,
            vec![0.0, 0.0, 0.0],
            false,
            GlueMark::Skeleton,
        );
    }
    let last_ring = rings.len() - 1;
    let mut simplices = Vec::new();
    for (w, wedge) in model.wedges.iter().enumerate() {
        let omega = wedge.angle;
        let nphi = ((omega / dang).ceil() as usize).max(2);
        let low_class = ray_class(model, w, RayId::Low);
        let high_class = ray_class(model, w, RayId::High);
        // Link directions: grid over (phi, psi) with pole rows collapsed.
        let dir = |a: usize, bb: usize| -> [f64; 3] {
            let phi = omega * a as f64 / nphi as f64;
            let psi = std::f64::consts::PI * bb as f64 / npsi as f64;
            [psi.sin() * phi.cos(), psi.sin() * phi.sin(), psi.cos()]
        };
        // Vertex ids per layer: layers[j][(a, bb)] with poles stored at a=0.
        let mut layers: Vec<HashMap<(usize, usize), usize>> = Vec::with_capacity(rings.len());
        for (j, &rho) in rings.iter().enumerate() {
            let boundary = j == last_ring;
            let mut layer = HashMap::new();
            for bb in 0..=npsi {
                if bb == 0 || bb == npsi {
                    let key = if bb == 0 { KEY_POLE_N } else { KEY_POLE_S };
                    let d = dir(0, bb);
                    let id = b.shared(
                        (key, j + 1),
                        w,
                        vec![rho * d[0], rho * d[1], rho * d[2]],
                        boundary,
                        GlueMark::Skeleton,
                    );
                    layer.insert((0, bb), id);
                    continue;
                }
                for a in 0..=nphi {
                    let d = dir(a, bb);
                    let coords = vec![rho * d[0], rho * d[1], rho * d[2]];
                    let meridian = if a == 0 {
                        low_class
                    } else if a == nphi {
                        high_class
                    } else {
                        None
                    };
                    let id = match meridian {
                        Some(c) => b.shared(
                            (KEY_RAY + (c + 1) * (npsi + 1) + bb, j + 1),
                            w,
                            coords,
                            boundary,
                            GlueMark::Class(c),
                        ),
                        None => b.fresh(w, coords, boundary, GlueMark::Interior),
                    };
                    layer.insert((a, bb), id);
                }
            }
            layers.push(layer);
        }
        // Link triangles as vertex-key triples.
        let mut link_tris: Vec<[(usize, usize); 3]> = Vec::new();
        for a in 0..nphi {
            link_tris.push([(0, 0), (a, 1), (a + 1, 1)]);
            link_tris.push([(0, npsi), (a + 1, npsi - 1), (a, npsi - 1)]);
            for bb in 1..npsi - 1 {
                link_tris.push([(a, bb), (a + 1, bb), (a + 1, bb + 1)]);
                link_tris.push([(a, bb), (a + 1, bb + 1), (a, bb + 1)]);
            }
        }
        // Core tets and prism layers.
        for tri in &link_tris {
            let t0 = layers[0][&tri[0]];
            let t1 = layers[0][&tri[1]];
            let t2 = layers[0][&tri[2]];
            simplices.push(Simplex {
                vertices: vec![center, t0, t1, t2],
                wedge: w,
            });
            for j in 0..rings.len() - 1 {
                let bot = [layers[j][&tri[0]], layers[j][&tri[1]], layers[j][&tri[2]]];
                let top = [
                    layers[j + 1][&tri[0]],
                    layers[j + 1][&tri[1]],
                    layers[j + 1][&tri[2]],
                ];
                for tet in split_prism(bot, top) {
                    simplices.push(Simplex {
                        vertices: tet.to_vec(),
                        wedge: w,
                    });
                }
            }
        }
    }
    let mut mesh = Mesh {
        model: model.clone(),
        radius: r,
        h,
        grading,
        vertices: b.vertices,
        simplices,
        ring_radii: rings,
        locator: OnceLock::new(),
    };
    mesh.normalize_orientations();
    mesh.reject_degenerate()?;
    Ok(mesh)
}

/// Split a prism (bottom triangle b0 b1 b2, top t0 t1 t2, ti above bi) into
/// three tetrahedra with quad-face diagonals through each face's smallest
/// global vertex id, so neighboring prisms split shared faces identically.
fn split_prism(bot: [usize; 3], top: [usize; 3]) -> [[usize; 4]; 3] {
    // Rotate so the smallest id sits at bottom slot 0 or top slot 0.
    let mut ids = [bot[0], bot[1], bot[2], top[0], top[1], top[2]];
    let min_pos = (0..6).min_by_key(|&i| ids[i]).unwrap();
    let rot = min_pos % 3;
    // Cyclic rotation keeps the prism orientation.
    ids = [
        ids[rot % 3],
        ids[(rot + 1) % 3],
        ids[(rot + 2) % 3],
        ids[3 + rot % 3],
        ids[3 + (rot + 1) % 3],
        ids[3 + (rot + 2) % 3],
    ];
    if min_pos >= 3 {
        // Flip upside down: swap bottom and top, reversing winding to keep
        // a consistent outward orientation.
        ids = [ids[3], ids[5], ids[4], ids[0], ids[2], ids[1]];
    }
    let [v0, v1, v2, v3, v4, v5] = ids;
    // v0 is now the global minimum; both quad faces at v0 take diagonals
    // through v0. The third quad (v1 v2 v5 v4) takes the diagonal through
    // its smallest vertex.
    if v1.min(v5) < v2.min(v4) {
        [[v0, v1, v2, v5], [v0, v1, v5, v4], [v0, v4, v5, v3]]
    } else {
        [[v0, v1, v2, v4], [v0, v4, v2, v5], [v0, v4, v5, v3]]
    }
}

/// Report of the structural mesh audit.
#[derive(Debug, Clone, Default)]
pub struct MeshAudit {
    pub orphan_vertices: usize,
    pub degenerate_simplices: usize,
    pub bad_faces: usize,
    pub glue_radius_mismatches: usize,
    pub obtuse_simplices: usize,
    pub edge_band_violations: usize,
    pub min_edge: f64,
    pub max_edge: f64,
}

impl MeshAudit {
    pub fn ok(&self) -> bool {
        self.orphan_vertices == 0
            && self.degenerate_simplices == 0
            && self.bad_faces == 0
            && self.glue_radius_mismatches == 0
    }
}

impl Mesh {
    pub fn dimension(&self) -> usize {
        self.model.dimension
    }

    pub fn position(&self, v: usize, wedge: usize) -> Option<&[f64]> {
        self.vertices[v]
            .positions
            .iter()
            .find(|(w, _)| *w == wedge)
            .map(|(_, c)| c.as_slice())
    }

    pub fn vertex_radius(&self, v: usize) -> f64 {
        let c = &self.vertices[v].positions[0].1;
        c.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn simplex_positions(&self, s: &Simplex) -> Vec<&[f64]> {
        s.vertices
            .iter()
            .map(|&v| {
                self.position(v, s.wedge)
                    .expect("simplex vertex must have a chart in its wedge")
            })
            .collect()
    }

    /// Euclidean volume of a simplex in its wedge chart.
    pub fn simplex_volume(&self, s: &Simplex) -> f64 {
        let pos = self.simplex_positions(s);
        signed_volume(&pos).abs()
    }

    pub fn barycenter(&self, s: &Simplex) -> Vec<f64> {
        let pos = self.simplex_positions(s);
        let n = pos[0].len();
        let mut c = vec![0.0; n];
        for p in &pos {
            for (ci, pi) in c.iter_mut().zip(*p) {
                *ci += pi / pos.len() as f64;
            }
        }
        c
    }

    fn normalize_orientations(&mut self) {
        let flips: Vec<usize> = (0..self.simplices.len())
            .filter(|&i| {
                let pos = self.simplex_positions(&self.simplices[i]);
                signed_volume(&pos) < 0.0
            })
            .collect();
        for i in flips {
            let n = self.simplices[i].vertices.len();
            self.simplices[i].vertices.swap(n - 2, n - 1);
        }
    }

    fn reject_degenerate(&self) -> Result<()> {
        for (i, s) in self.simplices.iter().enumerate() {
            if self.simplex_volume(s) <= VOLUME_EPS {
                return Err(Error::Degenerate(format!(
                    "simplex {i} has volume <= {VOLUME_EPS}"
                )));
            }
        }
        Ok(())
    }

    /// Structural audit: orphans, degeneracies, face incidence counts
    /// (gluing-aware), exact glued radii, obtuse simplices under g, and the
    /// edge-length band relative to the graded local target.
    pub fn audit(&self, field: &MetricField) -> MeshAudit {
        let mut audit = MeshAudit {
            min_edge: f64::INFINITY,
            ..Default::default()
        };
        let mut seen = vec![false; self.vertices.len()];
        for s in &self.simplices {
            for &v in &s.vertices {
                seen[v] = true;
            }
        }
        audit.orphan_vertices = seen.iter().filter(|s| !**s).count();
        for s in &self.simplices {
            if self.simplex_volume(s) <= VOLUME_EPS {
                audit.degenerate_simplices += 1;
            }
        }
        // Face incidence counts.
        let mut faces: HashMap<Vec<usize>, usize> = HashMap::new();
        for s in &self.simplices {
            let k = s.vertices.len();
            for skip in 0..k {
                let mut face: Vec<usize> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| *v)
                    .collect();
                face.sort_unstable();
                *faces.entry(face).or_insert(0) += 1;
            }
        }
        for (face, count) in &faces {
            let expected = self.expected_face_count(face);
            if *count != expected {
                audit.bad_faces += 1;
            }
        }
        // Glued vertices: radii agree exactly across charts.
        for v in &self.vertices {
            if v.positions.len() > 1 {
                let r0: f64 = v.positions[0].1.iter().map(|x| x * x).sum::<f64>().sqrt();
                for (_, c) in &v.positions[1..] {
                    let r1: f64 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if (r0 - r1).abs() > 1e-12 * (1.0 + r0) {
                        audit.glue_radius_mismatches += 1;
                    }
                }
            }
        }
        // Edge lengths against the graded band, and obtuseness under g.
        for s in &self.simplices {
            let pos = self.simplex_positions(s);
            let k = pos.len();
            let bary = self.barycenter(s);
            let ginv = match field.eval_full(self.dimension(), &bary) {
                Ok((_, _, inv)) => inv,
                Err(_) => continue,
            };
            let weights = simplex_weights(&pos, &ginv);
            if weights.iter().any(|&(_, _, w)| w < -1e-12) {
                audit.obtuse_simplices += 1;
            }
            for i in 0..k {
                for j in i + 1..k {
                    let len = crate::target::euclidean_distance(pos[i], pos[j]);
                    audit.min_edge = audit.min_edge.min(len);
                    audit.max_edge = audit.max_edge.max(len);
                    let mid: f64 = pos[i]
                        .iter()
                        .zip(pos[j])
                        .map(|(a, b)| (a + b) / 2.0)
                        .map(|x| x * x)
                        .sum::<f64>()
                        .sqrt();
                    let target = local_edge_target(mid, self.radius, self.h, self.grading);
                    if len < target / 3.0 || len > 2.0 * target {
                        audit.edge_band_violations += 1;
                    }
                }
            }
        }
        audit
    }

    fn expected_face_count(&self, face: &[usize]) -> usize {
        if face.iter().all(|&v| self.vertices[v].boundary) {
            return 1;
        }
        // Faces inside a glued cell: all non-skeleton vertices in one class.
        let mut class: Option<usize> = None;
        let mut all_glued = true;
        for &v in face {
            match &self.vertices[v].glue {
                GlueMark::Skeleton => {}
                GlueMark::Class(c) => match class {
                    None => class = Some(*c),
                    Some(c0) if c0 == *c => {}
                    _ => {
                        all_glued = false;
                        break;
                    }
                },
                GlueMark::Interior => {
                    all_glued = false;
                    break;
                }
            }
        }
        if all_glued {
            if let Some(c) = class {
                return self.model.gluings[c].cells.len();
            }
        }
        2
    }

    /// Sum of the apex angles at the origin over all center-fan simplices
    /// (2d): the link length of the vertex in the mesh metric.
    pub fn link_angle_at_origin(&self) -> f64 {
        let mut total = 0.0;
        for s in &self.simplices {
            let pos = self.simplex_positions(s);
            if self.dimension() != 2 {
                continue;
            }
            // Does this simplex touch the origin?
            let at_origin: Vec<usize> = (0..pos.len())
                .filter(|&i| pos[i].iter().map(|x| x * x).sum::<f64>() < 1e-28)
                .collect();
            if at_origin.len() != 1 {
                continue;
            }
            let others: Vec<&[f64]> = (0..pos.len())
                .filter(|i| *i != at_origin[0])
                .map(|i| pos[i])
                .collect();
            let (a, b) = (others[0], others[1]);
            let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            let cosang = (crate::target::dot(a, b) / (na * nb)).clamp(-1.0, 1.0);
            total += cosang.acos();
        }
        total
    }

    /// Interior submesh of B(sigma) plus clipped boundary simplices.
    ///
    /// In 2d the crossing fractions are exact circle-polygon intersection
    /// areas; in 3d they come from a barycentric-lattice estimate.
    pub fn ball_decomposition(&self, sigma: f64) -> Result<BallDecomposition> {
        if sigma > self.radius + 1e-12 {
            return Err(Error::Resolution(format!(
                "sigma {sigma} exceeds mesh radius {}",
                self.radius
            )));
        }
        let mut inside = Vec::new();
        let mut partial = Vec::new();
        for (i, s) in self.simplices.iter().enumerate() {
            let pos = self.simplex_positions(s);
            let radii: Vec<f64> = pos
                .iter()
                .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            let rmax = radii.iter().cloned().fold(0.0, f64::max);
            let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min);
            if rmax <= sigma + 1e-14 {
                inside.push(i);
                continue;
            }
            // Any point of the simplex is within its diameter of a vertex.
            let diam = simplex_diameter(&pos);
            if rmin - diam > sigma {
                continue;
            }
            let frac = if self.dimension() == 2 {
                let poly: Vec<(f64, f64)> = pos.iter().map(|p| (p[0], p[1])).collect();
                let total = signed_volume(&pos).abs();
                (circle_polygon_area(&poly, sigma) / total).clamp(0.0, 1.0)
            } else {
                lattice_fraction(&pos, sigma)
            };
            if frac > 1e-14 {
                partial.push((i, frac));
            }
        }
        Ok(BallDecomposition {
            sigma,
            inside,
            partial,
        })
    }

    /// Dense angular sampling of the boundary sphere of B(sigma) with
    /// g-induced line (2d) or area (3d) weights. `angular` is the sample
    /// count per full turn.
    pub fn sphere_sampling(
        &self,
        field: &MetricField,
        sigma: f64,
        angular: usize,
    ) -> Result<SphereSampling> {
        if sigma <= 0.0 || sigma > self.radius + 1e-12 {
            return Err(Error::Resolution(format!(
                "sphere radius {sigma} outside (0, {}]",
                self.radius
            )));
        }
        if sigma < self.ring_radii[0] {
            return Err(Error::Resolution(format!(
                "sigma {sigma} below innermost ring {}",
                self.ring_radii[0]
            )));
        }
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let tau = 2.0 * std::f64::consts::PI;
        for (w, wedge) in self.model.wedges.iter().enumerate() {
            let omega = wedge.angle;
            if self.dimension() == 2 {
                let m = ((angular as f64 * omega / tau).ceil() as usize).max(8);
                let dtheta = omega / m as f64;
                for k in 0..m {
                    let theta = (k as f64 + 0.5) * dtheta;
                    let x = vec![sigma * theta.cos(), sigma * theta.sin()];
                    let t = [-theta.sin(), theta.cos()];
                    let density = field.line_density(&x, &t);
                    points.push(ModelPoint {
                        wedge: w,
                        coords: x,
                    });
                    weights.push(dtheta * sigma * density);
                }
            } else {
                let mphi = ((angular as f64 * omega / tau).ceil() as usize).max(4);
                let mpsi = (angular / 2).max(8);
                let (dphi, dpsi) = (omega / mphi as f64, std::f64::consts::PI / mpsi as f64);
                for a in 0..mphi {
                    let phi = (a as f64 + 0.5) * dphi;
                    for bb in 0..mpsi {
                        let psi = (bb as f64 + 0.5) * dpsi;
                        let x = vec![
                            sigma * psi.sin() * phi.cos(),
                            sigma * psi.sin() * phi.sin(),
                            sigma * psi.cos(),
                        ];
                        let tphi = [
                            -sigma * psi.sin() * phi.sin(),
                            sigma * psi.sin() * phi.cos(),
                            0.0,
                        ];
                        let tpsi = [
                            sigma * psi.cos() * phi.cos(),
                            sigma * psi.cos() * phi.sin(),
                            -sigma * psi.sin(),
                        ];
                        let g = field.eval(3, &x);
                        let mut gram = [[0.0f64; 2]; 2];
                        let ts = [&tphi, &tpsi];
                        for i in 0..2 {
                            for j in 0..2 {
                                let mut v = 0.0;
                                for p in 0..3 {
                                    for q in 0..3 {
                                        v += g[(p, q)] * ts[i][p] * ts[j][q];
                                    }
                                }
                                gram[i][j] = v;
                            }
                        }
                        let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
                        points.push(ModelPoint {
                            wedge: w,
                            coords: x,
                        });
                        weights.push(dphi * dpsi * det.max(0.0).sqrt());
                    }
                }
            }
        }
        Ok(SphereSampling {
            sigma,
            points,
            weights,
        })
    }

    /// Locate a model point: (simplex id, barycentric coordinates).
    pub fn locate(&self, p: &ModelPoint) -> Option<(usize, Vec<f64>)> {
        let locator = self.locator.get_or_init(|| Locator::build(self));
        locator.locate(self, p)
    }
}

fn simplex_diameter(pos: &[&[f64]]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..pos.len() {
        for j in i + 1..pos.len() {
            d = d.max(crate::target::euclidean_distance(pos[i], pos[j]));
        }
    }
    d
}

/// Signed volume of a simplex from its vertex positions.
pub fn signed_volume(pos: &[&[f64]]) -> f64 {
    match pos.len() {
        3 => {
            let (a, b, c) = (pos[0], pos[1], pos[2]);
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        }
        4 => {
            let (a, b, c, d) = (pos[0], pos[1], pos[2], pos[3]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let w = [d[0] - a[0], d[1] - a[1], d[2] - a[2]];
            let det = u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0])
                + u[2] * (v[0] * w[1] - v[1] * w[0]);
            det / 6.0
        }
        _ => 0.0,
    }
}

/// Edge weights of the affine-gradient Gram identity: pairs (i, j, w_ij)
/// with w_ij = -<grad lambda_i, grad lambda_j>_{g^{-1}}. For a real-valued
/// map, vol_g * sum w_ij (u_i - u_j)^2 is exactly the Dirichlet energy of
/// the affine interpolant.
pub fn simplex_weights(pos: &[&[f64]], ginv: &nalgebra::DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let n = pos[0].len();
    let k = pos.len();
    // Barycentric gradients: rows of E^{-1} for i = 1..n, remainder for 0.
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
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let mut dot = 0.0;
            for a in 0..n {
                for bcol in 0..n {
                    dot += grads[i][a] * ginv[(a, bcol)] * grads[j][bcol];
                }
            }
            out.push((i, j, -dot));
        }
    }
    out
}

/// Exact area of (convex or not) polygon intersected with the disk of the
/// given radius centered at the origin. Green's theorem over directed edges:
/// each edge contributes the clipped triangle (O, a, b).
pub fn circle_polygon_area(poly: &[(f64, f64)], radius: f64) -> f64 {
    let mut area = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        area += clipped_triangle_area(a, b, radius);
    }
    area.abs()
}

fn clipped_triangle_area(a: (f64, f64), b: (f64, f64), r: f64) -> f64 {
    let cross = |u: (f64, f64), v: (f64, f64)| u.0 * v.1 - u.1 * v.0;
    let sector = |u: (f64, f64), v: (f64, f64)| {
        let ang = cross(u, v).atan2(u.0 * v.0 + u.1 * v.1);
        0.5 * r * r * ang
    };
    let na = (a.0 * a.0 + a.1 * a.1).sqrt();
    let nb = (b.0 * b.0 + b.1 * b.1).sqrt();
    let inside_a = na <= r;
    let inside_b = nb <= r;
    if inside_a && inside_b {
        return 0.5 * cross(a, b);
    }
    // Segment-circle intersections: |a + t (b - a)|^2 = r^2.
    let d = (b.0 - a.0, b.1 - a.1);
    let qa = d.0 * d.0 + d.1 * d.1;
    let qb = 2.0 * (a.0 * d.0 + a.1 * d.1);
    let qc = na * na - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    let at = |t: f64| (a.0 + t * d.0, a.1 + t * d.1);
    if inside_a && !inside_b {
        let t = (-qb + disc.max(0.0).sqrt()) / (2.0 * qa);
        let p = at(t);
        return 0.5 * cross(a, p) + sector(p, b);
    }
    if !inside_a && inside_b {
        let t = (-qb - disc.max(0.0).sqrt()) / (2.0 * qa);
        let p = at(t);
        return sector(a, p) + 0.5 * cross(p, b);
    }
    // Both endpoints outside.
    if disc <= 0.0 {
        return sector(a, b);
    }
    let sq = disc.sqrt();
    let t1 = (-qb - sq) / (2.0 * qa);
    let t2 = (-qb + sq) / (2.0 * qa);
    if t1 >= 1.0 || t2 <= 0.0 || t1 >= t2 {
        return sector(a, b);
    }
    let (p1, p2) = (at(t1.max(0.0)), at(t2.min(1.0)));
    sector(a, p1) + 0.5 * cross(p1, p2) + sector(p2, b)
}

/// Interior volume fraction of a tetrahedron by a barycentric lattice.
fn lattice_fraction(pos: &[&[f64]], sigma: f64) -> f64 {
    const N: usize = 20;
    let mut inside = 0usize;
    let mut total = 0usize;
    for i in 0..=N {
        for j in 0..=N - i {
            for k in 0..=N - i - j {
                let l = N - i - j - k;
                let lam = [i as f64, j as f64, k as f64, l as f64].map(|x| (x + 0.25) / (N as f64 + 1.0));
                let mut p = [0.0; 3];
                for (v, pv) in pos.iter().enumerate() {
                    for d in 0..3 {
                        p[d] += lam[v] * pv[d];
                    }
                }
                total += 1;
                if p.iter().map(|x| x * x).sum::<f64>().sqrt() <= sigma {
                    inside += 1;
                }
            }
        }
    }
    inside as f64 / total as f64
}

/// Structured point locator: simplices bucketed per wedge and radial band,
/// sorted by minimum angle for a windowed scan.
struct Locator {
    /// bands[wedge][band] -> sorted (min_angle, simplex id); band 0 is the
    /// center fan.
    bands: Vec<Vec<Vec<(f64, usize)>>>,
    /// Maximum angular span of any simplex per (wedge, band).
    spans: Vec<Vec<f64>>,
    radii: Vec<f64>,
}

impl Locator {
    fn build(mesh: &Mesh) -> Self {
        let nw = mesh.model.wedges.len();
        let nbands = mesh.ring_radii.len();
        let mut bands = vec![vec![Vec::new(); nbands]; nw];
        let mut spans = vec![vec![0.0f64; nbands]; nw];
        for (i, s) in mesh.simplices.iter().enumerate() {
            let pos = mesh.simplex_positions(s);
            let radii: Vec<f64> = pos
                .iter()
                .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
                .collect();
            let rmax = radii.iter().cloned().fold(0.0, f64::max);
            // Band index: first ring radius >= rmax (within tolerance).
            let band = mesh
                .ring_radii
                .iter()
                .position(|&rr| rmax <= rr * (1.0 + 1e-9))
                .unwrap_or(nbands - 1);
            let (amin, amax) = angle_range(&pos);
            bands[s.wedge][band].push((amin, i));
            spans[s.wedge][band] = spans[s.wedge][band].max(amax - amin);
        }
        for wb in &mut bands {
            for b in wb.iter_mut() {
                b.sort_by(|x, y| x.0.total_cmp(&y.0));
            }
        }
        Locator {
            bands,
            spans,
            radii: mesh.ring_radii.clone(),
        }
    }

    fn locate(&self, mesh: &Mesh, p: &ModelPoint) -> Option<(usize, Vec<f64>)> {
        if p.wedge >= self.bands.len() {
            return None;
        }
        let r = p.coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > *self.radii.last().unwrap() * (1.0 + 1e-9) {
            return None;
        }
        let band = self
            .radii
            .iter()
            .position(|&rr| r <= rr * (1.0 + 1e-9))
            .unwrap_or(self.radii.len() - 1);
        let phi = planar_angle(&p.coords);
        // A point numerically on a ring may belong to either adjacent band.
        for b in [band, band + 1, band.wrapping_sub(1)] {
            if b >= self.bands[p.wedge].len() {
                continue;
            }
            let list = &self.bands[p.wedge][b];
            if list.is_empty() {
                continue;
            }
            let span = self.spans[p.wedge][b] + 1e-9;
            let start = list.partition_point(|&(a, _)| a <= phi + 1e-12);
            let mut idx = start;
            while idx > 0 {
                idx -= 1;
                let (amin, si) = list[idx];
                if phi - amin > span {
                    break;
                }
                if let Some(bary) = barycentric(mesh, si, &p.coords) {
                    return Some((si, bary));
                }
            }
        }
        // Fallback: exhaustive scan of the wedge (robust for loaded meshes).
        for (si, s) in mesh.simplices.iter().enumerate() {
            if s.wedge != p.wedge {
                continue;
            }
            if let Some(bary) = barycentric(mesh, si, &p.coords) {
                return Some((si, bary));
            }
        }
        None
    }
}

fn planar_angle(coords: &[f64]) -> f64 {
    let a = coords[1].atan2(coords[0]);
    a.max(0.0)
}

fn angle_range(pos: &[&[f64]]) -> (f64, f64) {
    let mut amin = f64::INFINITY;
    let mut amax = 0.0f64;
    for p in pos {
        let planar = p[0] * p[0] + p[1] * p[1];
        if planar < 1e-28 {
            continue;
        }
        let a = planar_angle(p);
        amin = amin.min(a);
        amax = amax.max(a);
    }
    if amin.is_infinite() {
        (0.0, std::f64::consts::PI)
    } else {
        (amin, amax)
    }
}

/// Barycentric coordinates of x in the simplex, if inside (tolerance 1e-9).
fn barycentric(mesh: &Mesh, simplex: usize, x: &[f64]) -> Option<Vec<f64>> {
    let s = &mesh.simplices[simplex];
    let pos = mesh.simplex_positions(s);
    let n = x.len();
    let mut lam = vec![0.0; n + 1];
    if n == 2 {
        let (a, b, c) = (pos[0], pos[1], pos[2]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if det.abs() < 1e-30 {
            return None;
        }
        lam[1] = ((x[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (x[1] - a[1])) / det;
        lam[2] = ((b[0] - a[0]) * (x[1] - a[1]) - (x[0] - a[0]) * (b[1] - a[1])) / det;
        lam[0] = 1.0 - lam[1] - lam[2];
    } else {
        let a = pos[0];
        let mut m = nalgebra::Matrix3::zeros();
        for col in 0..3 {
            for row in 0..3 {
                m[(row, col)] = pos[col + 1][row] - a[row];
            }
        }
        let rhs = nalgebra::Vector3::new(x[0] - a[0], x[1] - a[1], x[2] - a[2]);
        let sol = m.lu().solve(&rhs)?;
        lam[1] = sol[0];
        lam[2] = sol[1];
        lam[3] = sol[2];
        lam[0] = 1.0 - lam[1] - lam[2] - lam[3];
    }
    let tol = -1e-9;
    if lam.iter().all(|&l| l >= tol) {
        for l in &mut lam {
            *l = l.max(0.0);
        }
        let sum: f64 = lam.iter().sum();
        for l in &mut lam {
            *l /= sum;
        }
        Some(lam)
    } else {
        None
    }
}

pub(crate) use meshio_support::*;

mod meshio_support {
    use super::*;

    /// Rebuild a mesh loaded from a file (ring radii recovered by clustering
    /// vertex radii) so the locator works on foreign meshes too.
    pub(crate) fn finish_loaded_mesh(mut mesh: Mesh) -> Result<Mesh> {
        if mesh.ring_radii.is_empty() {
            let mut radii: Vec<f64> = mesh
                .vertices
                .iter()
                .map(|v| {
                    v.positions[0]
                        .1
                        .iter()
                        .map(|x| x * x)
                        .sum::<f64>()
                        .sqrt()
                })
                .filter(|r| *r > 1e-14)
                .collect();
            radii.sort_by(|a, b| a.total_cmp(b));
            let mut rings: Vec<f64> = Vec::new();
            for r in radii {
                if rings.last().is_none_or(|&last| r > last * (1.0 + 1e-9)) {
                    rings.push(r);
                }
            }
            mesh.ring_radii = rings;
        }
        mesh.reject_degenerate()?;
        Ok(mesh)
    }

    pub(crate) fn raw_mesh(
        model: LocalModel,
        radius: f64,
        h: f64,
        grading: f64,
        vertices: Vec<Vertex>,
        simplices: Vec<Simplex>,
        ring_radii: Vec<f64>,
    ) -> Mesh {
        Mesh {
            model,
            radius,
            h,
            grading,
            vertices,
            simplices,
            ring_radii,
            locator: OnceLock::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_book, build_cone_domain, product_with_interval};

    fn flat_disk(h: f64) -> Mesh {
        let model = build_cone_domain(2.0 * std::f64::consts::PI).unwrap();
        triangulate(&model, 1.0, h, 1.0).unwrap()
    }

    #[test]
    fn disk_mesh_is_sane() {
        let mesh = flat_disk(0.1);
        // O(1/h^2) triangles, all nondegenerate.
        assert!(mesh.simplices.len() > 300 && mesh.simplices.len() < 3000);
        let audit = mesh.audit(&MetricField::Euclidean);
        assert!(audit.ok(), "{audit:?}");
        assert_eq!(audit.edge_band_violations, 0, "{audit:?}");
        // Total area approximates pi.
        let total: f64 = mesh
            .simplices
            .iter()
            .map(|s| mesh.simplex_volume(s))
            .sum();
        assert!((total - std::f64::consts::PI).abs() < 0.02, "area {total}");
    }

    #[test]
    fn rejects_coarse_h() {
        let model = build_cone_domain(2.0 * std::f64::consts::PI).unwrap();
        assert!(triangulate(&model, 1.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn book_spine_is_shared() {
        let model = build_book(3).unwrap();
        let mesh = triangulate(&model, 1.0, 0.1, 1.0).unwrap();
        let audit = mesh.audit(&MetricField::Euclidean);
        assert!(audit.ok(), "{audit:?}");
        // Spine vertices carry one chart per page.
        let spine_vertex = mesh
            .vertices
            .iter()
            .find(|v| matches!(v.glue, GlueMark::Class(_)))
            .unwrap();
        assert_eq!(spine_vertex.positions.len(), 3);
    }

    #[test]
    fn cone_link_angle() {
        let model = build_cone_domain(4.0 * std::f64::consts::PI).unwrap();
        let mesh = triangulate(&model, 1.0, 0.1, 1.0).unwrap();
        let angle = mesh.link_angle_at_origin();
        assert!(
            (angle - 4.0 * std::f64::consts::PI).abs() < 1e-6,
            "link angle {angle}"
        );
        assert!(mesh.audit(&MetricField::Euclidean).ok());
    }

    #[test]
    fn graded_mesh_still_conforming() {
        let model = build_cone_domain(4.0 * std::f64::consts::PI).unwrap();
        let mesh = triangulate(&model, 1.0, 0.05, 1.5).unwrap();
        let audit = mesh.audit(&MetricField::Euclidean);
        assert!(audit.ok(), "{audit:?}");
        // Grading concentrates resolution near the vertex.
        assert!(mesh.ring_radii[0] < 0.02);
    }

    #[test]
    fn sphere_sampling_measures() {
        let mesh = flat_disk(0.05);
        let s = mesh
            .sphere_sampling(&MetricField::Euclidean, 0.5, 10_000)
            .unwrap();
        // Flat circumference 2 pi sigma = pi.
        assert!(
            (s.total_measure() - std::f64::consts::PI).abs() < 1e-6,
            "len {}",
            s.total_measure()
        );
        // Cone of angle 4 pi: circumference sigma * theta = 2 pi.
        let model = build_cone_domain(4.0 * std::f64::consts::PI).unwrap();
        let cone = triangulate(&model, 1.0, 0.05, 1.0).unwrap();
        let s = cone
            .sphere_sampling(&MetricField::Euclidean, 0.5, 10_000)
            .unwrap();
        assert!(
            (s.total_measure() - 0.5 * 4.0 * std::f64::consts::PI).abs() < 1e-6,
            "{}",
            s.total_measure()
        );
        // Book with 3 pages: three half-circles, 3 pi sigma.
        let book = build_book(3).unwrap();
        let bm = triangulate(&book, 1.0, 0.05, 1.0).unwrap();
        let s = bm
            .sphere_sampling(&MetricField::Euclidean, 0.5, 10_000)
            .unwrap();
        assert!(
            (s.total_measure() - 3.0 * std::f64::consts::PI * 0.5).abs() < 1e-6,
            "{}",
            s.total_measure()
        );
    }

    #[test]
    fn sphere_measure_converges_first_order() {
        // Anisotropic metric so the line density varies with the angle.
        let mesh = flat_disk(0.05);
        let field = MetricField::AnisotropicConstant {
            diag: vec![1.5, 0.7],
        };
        let coarse = mesh.sphere_sampling(&field, 0.5, 64).unwrap().total_measure();
        let fine = mesh.sphere_sampling(&field, 0.5, 4096).unwrap().total_measure();
        let finest = mesh
            .sphere_sampling(&field, 0.5, 32768)
            .unwrap()
            .total_measure();
        assert!((fine - finest).abs() < (coarse - finest).abs());
        assert!((fine - finest).abs() < 1e-6);
    }

    #[test]
    fn circle_clip_known_areas() {
        // Triangle fully inside.
        let tri = [(0.1, 0.1), (0.3, 0.1), (0.1, 0.3)];
        let a = circle_polygon_area(&tri, 1.0);
        assert!((a - 0.02).abs() < 1e-14);
        // Disk fully inside a big triangle.
        let big = [(-10.0, -10.0), (10.0, -10.0), (0.0, 15.0)];
        let a = circle_polygon_area(&big, 1.0);
        assert!((a - std::f64::consts::PI).abs() < 1e-12);
        // Half-plane cut: square straddling the circle center.
        let sq = [(0.0, -2.0), (2.0, -2.0), (2.0, 2.0), (0.0, 2.0)];
        let a = circle_polygon_area(&sq, 1.0);
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn ball_decomposition_area() {
        let mesh = flat_disk(0.05);
        for sigma in [0.3, 0.55, 0.8] {
            let dec = mesh.ball_decomposition(sigma).unwrap();
            let mut area = 0.0;
            for &i in &dec.inside {
                area += mesh.simplex_volume(&mesh.simplices[i]);
            }
            for &(i, f) in &dec.partial {
                area += f * mesh.simplex_volume(&mesh.simplices[i]);
            }
            let exact = std::f64::consts::PI * sigma * sigma;
            assert!(
                (area - exact).abs() < 1e-3 * exact,
                "sigma {sigma}: {area} vs {exact}"
            );
        }
    }

    #[test]
    fn locate_random_points() {
        let mesh = flat_disk(0.08);
        let mut rng = crate::comparison::sample_rng(3, 0);
        use rand::Rng;
        for _ in 0..2000 {
            let wedge = rng.gen_range(0..mesh.model.wedges.len());
            let rho = 0.999 * rng.gen::<f64>();
            let phi = mesh.model.wedges[wedge].angle * rng.gen::<f64>();
            let p = ModelPoint {
                wedge,
                coords: vec![rho * phi.cos(), rho * phi.sin()],
            };
            let (si, lam) = mesh.locate(&p).expect("point inside must locate");
            // Reconstruct the position from barycentric coordinates.
            let pos = mesh.simplex_positions(&mesh.simplices[si]);
            let mut x = [0.0, 0.0];
            for (l, v) in lam.iter().zip(&pos) {
                x[0] += l * v[0];
                x[1] += l * v[1];
            }
            assert!(
                (x[0] - p.coords[0]).abs() + (x[1] - p.coords[1]).abs() < 1e-9,
                "barycentric reconstruction"
            );
        }
        // Points outside return None.
        let out = ModelPoint {
            wedge: 0,
            coords: vec![1.5, 0.0],
        };
        assert!(mesh.locate(&out).is_none());
    }

    #[test]
    fn product_mesh_tets() {
        let base = build_cone_domain(1.5 * std::f64::consts::PI).unwrap();
        let model = product_with_interval(&base).unwrap();
        let mesh = triangulate(&model, 1.0, 0.2, 1.0).unwrap();
        let audit = mesh.audit(&MetricField::Euclidean);
        assert_eq!(audit.orphan_vertices, 0);
        assert_eq!(audit.degenerate_simplices, 0);
        assert_eq!(audit.bad_faces, 0, "{audit:?}");
        assert_eq!(audit.glue_radius_mismatches, 0);
        // Volume of the ball portion: (theta / 2pi) * 4/3 pi r^3.
        let total: f64 = mesh
            .simplices
            .iter()
            .map(|s| mesh.simplex_volume(s))
            .sum();
        let exact = 1.5 * std::f64::consts::PI / (2.0 * std::f64::consts::PI) * 4.0 / 3.0
            * std::f64::consts::PI;
        assert!((total - exact).abs() < 0.05 * exact, "vol {total} vs {exact}");
        // Locate a 3d point.
        let p = ModelPoint {
            wedge: 0,
            coords: vec![0.3, 0.2, -0.4],
        };
        assert!(mesh.locate(&p).is_some());
    }
}
