//! Plain-text mesh file format with bit-exact round-trip.
//!
//! Layout:
//!
//! ```text
//! harmap-mesh v1
//! model <cone2|book2|cone3|book3> <parameter>
//! dims n=<n> nu=<nu> radius=<r> h=<h> grading=<g>
//! rings <r1> <r2> ...
//! gluing <class> radial <wedge>:<low|high> ...
//! vertex <id> <wedge> <coords...> <boundary 0|1> <glue i|c<class>|s>
//! simplex <v...> <wedge>
//! ```
//!
//! Floats print with Rust's shortest round-trip formatting, so writing and
//! re-reading reproduces identical bytes and identical values. Vertices
//! shared across wedges repeat their `vertex` line once per chart.

use std::fmt::Write as _;
use std::path::Path;

use super::mesh::{finish_loaded_mesh, raw_mesh, GlueMark, Simplex, Vertex};
use super::{build_book, build_cone_domain, product_with_interval, LocalModel, Mesh, RayId};
use crate::error::{Error, Result};

pub fn write_mesh_string(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("harmap-mesh v1\n");
    let (kind, param) = match mesh.model.kind {
        super::ModelKind::Cone2 { total_angle } => ("cone2", format!("{total_angle}")),
        super::ModelKind::Book2 { pages } => ("book2", format!("{pages}")),
        super::ModelKind::Cone3 { total_angle } => ("cone3", format!("{total_angle}")),
        super::ModelKind::Book3 { pages } => ("book3", format!("{pages}")),
    };
    let _ = writeln!(out, "model {kind} {param}");
    let _ = writeln!(
        out,
        "dims n={} nu={} radius={} h={} grading={}",
        mesh.model.dimension, mesh.model.codimension, mesh.radius, mesh.h, mesh.grading
    );
    out.push_str("rings");
    for r in &mesh.ring_radii {
        let _ = write!(out, " {r}");
    }
    out.push('\n');
    for (c, g) in mesh.model.gluings.iter().enumerate() {
        let _ = write!(out, "gluing {c} radial");
        for (w, ray) in &g.cells {
            let tag = match ray {
                RayId::Low => "low",
                RayId::High => "high",
            };
            let _ = write!(out, " {w}:{tag}");
        }
        out.push('\n');
    }
    for (id, v) in mesh.vertices.iter().enumerate() {
        for (w, coords) in &v.positions {
            let _ = write!(out, "vertex {id} {w}");
            for c in coords {
                let _ = write!(out, " {c}");
            }
            let glue = match &v.glue {
                GlueMark::Interior => "i".to_string(),
                GlueMark::Class(c) => format!("c{c}"),
                GlueMark::Skeleton => "s".to_string(),
            };
            let _ = writeln!(out, " {} {glue}", if v.boundary { 1 } else { 0 });
        }
    }
    for s in &mesh.simplices {
        out.push_str("simplex");
        for v in &s.vertices {
            let _ = write!(out, " {v}");
        }
        let _ = writeln!(out, " {}", s.wedge);
    }
    out
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    std::fs::write(path, write_mesh_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let err = |line: usize, message: &str| Error::Parse {
        line: line + 1,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (l0, header) = lines
        .next()
        .ok_or_else(|| err(0, "empty mesh file"))?;
    if header.trim() != "harmap-mesh v1" {
        return Err(err(l0, "expected 'harmap-mesh v1' header"));
    }
    let mut model: Option<LocalModel> = None;
    let mut dims: Option<(usize, usize, f64, f64, f64)> = None;
    let mut rings: Vec<f64> = Vec::new();
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut simplices: Vec<Simplex> = Vec::new();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next().unwrap() {
            "model" => {
                let kind = tok.next().ok_or_else(|| err(ln, "model kind"))?;
                let param = tok.next().ok_or_else(|| err(ln, "model parameter"))?;
                let m = match kind {
                    "cone2" => build_cone_domain(
                        param.parse().map_err(|_| err(ln, "cone angle"))?,
                    )?,
                    "book2" => build_book(param.parse().map_err(|_| err(ln, "page count"))?)?,
                    "cone3" => product_with_interval(&build_cone_domain(
                        param.parse().map_err(|_| err(ln, "cone angle"))?,
                    )?)?,
                    "book3" => product_with_interval(&build_book(
                        param.parse().map_err(|_| err(ln, "page count"))?,
                    )?)?,
                    other => {
                        return Err(err(ln, &format!("unknown model kind '{other}'")));
                    }
                };
                model = Some(m);
            }
            "dims" => {
                let mut vals = [0.0f64; 5];
                for (slot, key) in ["n", "nu", "radius", "h", "grading"].iter().enumerate() {
                    let t = tok.next().ok_or_else(|| err(ln, "dims fields"))?;
                    let (k, v) = t
                        .split_once('=')
                        .ok_or_else(|| err(ln, "dims key=value"))?;
                    if k != *key {
                        return Err(err(ln, &format!("expected {key}=")));
                    }
                    vals[slot] = v.parse().map_err(|_| err(ln, "dims number"))?;
                }
                dims = Some((
                    vals[0] as usize,
                    vals[1] as usize,
                    vals[2],
                    vals[3],
                    vals[4],
                ));
            }
            "rings" => {
                for t in tok {
                    rings.push(t.parse().map_err(|_| err(ln, "ring radius"))?);
                }
            }
            "gluing" => {
                // Validated against the reconstructed model below.
                let _class: usize = tok
                    .next()
                    .ok_or_else(|| err(ln, "gluing class"))?
                    .parse()
                    .map_err(|_| err(ln, "gluing class"))?;
                let spec = tok.next().ok_or_else(|| err(ln, "isometry spec"))?;
                if spec != "radial" {
                    return Err(Error::Unsupported(format!(
                        "exotic gluing isometry '{spec}' (only radial identifications are supported)"
                    )));
                }
            }
            "vertex" => {
                let model = model
                    .as_ref()
                    .ok_or_else(|| err(ln, "vertex before model"))?;
                let n = model.dimension;
                let id: usize = tok
                    .next()
                    .ok_or_else(|| err(ln, "vertex id"))?
                    .parse()
                    .map_err(|_| err(ln, "vertex id"))?;
                let wedge: usize = tok
                    .next()
                    .ok_or_else(|| err(ln, "vertex wedge"))?
                    .parse()
                    .map_err(|_| err(ln, "vertex wedge"))?;
                let mut coords = Vec::with_capacity(n);
                for _ in 0..n {
                    coords.push(
                        tok.next()
                            .ok_or_else(|| err(ln, "vertex coords"))?
                            .parse()
                            .map_err(|_| err(ln, "vertex coords"))?,
                    );
                }
                let boundary = tok.next().ok_or_else(|| err(ln, "boundary flag"))? == "1";
                let glue_tok = tok.next().ok_or_else(|| err(ln, "glue mark"))?;
                let glue = match glue_tok {
                    "i" => GlueMark::Interior,
                    "s" => GlueMark::Skeleton,
                    c if c.starts_with('c') => GlueMark::Class(
                        c[1..].parse().map_err(|_| err(ln, "glue class"))?,
                    ),
                    _ => return Err(err(ln, "glue mark")),
                };
                if id == vertices.len() {
                    vertices.push(Vertex {
                        positions: vec![(wedge, coords)],
                        boundary,
                        glue,
                    });
                } else if id < vertices.len() {
                    vertices[id].positions.push((wedge, coords));
                } else {
                    return Err(err(ln, "vertex ids must be dense and ordered"));
                }
            }
            "simplex" => {
                let model = model
                    .as_ref()
                    .ok_or_else(|| err(ln, "simplex before model"))?;
                let toks: Vec<&str> = tok.collect();
                if toks.len() != model.dimension + 2 {
                    return Err(err(ln, "simplex arity"));
                }
                let mut ids = Vec::with_capacity(model.dimension + 1);
                for t in &toks[..toks.len() - 1] {
                    ids.push(t.parse().map_err(|_| err(ln, "simplex vertex id"))?);
                }
                let wedge = toks[toks.len() - 1]
                    .parse()
                    .map_err(|_| err(ln, "simplex wedge"))?;
                simplices.push(Simplex {
                    vertices: ids,
                    wedge,
                });
            }
            other => return Err(err(ln, &format!("unknown record '{other}'"))),
        }
    }
    let model = model.ok_or_else(|| err(0, "missing model record"))?;
    let (n, nu, radius, h, grading) =
        dims.ok_or_else(|| err(0, "missing dims record"))?;
    if n != model.dimension || nu != model.codimension {
        return Err(Error::Parse {
            line: 0,
            message: "dims disagree with the model record".into(),
        });
    }
    let mesh = raw_mesh(model, radius, h, grading, vertices, simplices, rings);
    finish_loaded_mesh(mesh)
}
