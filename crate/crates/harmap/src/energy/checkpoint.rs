//! Resumable solver state: target description, ball, and one line of target
//! coordinates per vertex. Plain text, shortest round-trip float formatting.

use std::fmt::Write as _;
use std::path::Path;

use super::PLMap;
use crate::error::{Error, Result};
use crate::target::{BallConstraint, MetricTree, TargetSpace};

pub fn space_tokens(space: &TargetSpace) -> String {
    match space {
        TargetSpace::Sphere { dim } => format!("sphere {dim}"),
        TargetSpace::Arc { length } => format!("arc {length}"),
        TargetSpace::Euclidean { dim } => format!("euclidean {dim}"),
        TargetSpace::Tree(t) => {
            let mut s = format!("tree {} {}", t.vertex_count(), t.edge_count());
            for e in 0..t.edge_count() {
                let (a, b, len) = t.edge(e);
                let _ = write!(s, " {a} {b} {len}");
            }
            s
        }
        TargetSpace::Cone { base } => format!("cone {}", space_tokens(base)),
    }
}

pub fn parse_space(tokens: &mut std::iter::Peekable<std::str::SplitWhitespace>) -> Result<TargetSpace> {
    let bad = |m: &str| Error::Parse {
        line: 0,
        message: m.to_string(),
    };
    match tokens.next().ok_or_else(|| bad("missing target kind"))? {
        "sphere" => Ok(TargetSpace::Sphere {
            dim: tokens
                .next()
                .ok_or_else(|| bad("sphere dim"))?
                .parse()
                .map_err(|_| bad("sphere dim"))?,
        }),
        "arc" => Ok(TargetSpace::Arc {
            length: tokens
                .next()
                .ok_or_else(|| bad("arc length"))?
                .parse()
                .map_err(|_| bad("arc length"))?,
        }),
        "euclidean" => Ok(TargetSpace::Euclidean {
            dim: tokens
                .next()
                .ok_or_else(|| bad("euclidean dim"))?
                .parse()
                .map_err(|_| bad("euclidean dim"))?,
        }),
        "tree" => {
            let nv: usize = tokens
                .next()
                .ok_or_else(|| bad("tree vertices"))?
                .parse()
                .map_err(|_| bad("tree vertices"))?;
            let ne: usize = tokens
                .next()
                .ok_or_else(|| bad("tree edges"))?
                .parse()
                .map_err(|_| bad("tree edges"))?;
            let mut edges = Vec::with_capacity(ne);
            for _ in 0..ne {
                let a = tokens
                    .next()
                    .ok_or_else(|| bad("tree edge"))?
                    .parse()
                    .map_err(|_| bad("tree edge"))?;
                let b = tokens
                    .next()
                    .ok_or_else(|| bad("tree edge"))?
                    .parse()
                    .map_err(|_| bad("tree edge"))?;
                let len = tokens
                    .next()
                    .ok_or_else(|| bad("tree edge"))?
                    .parse()
                    .map_err(|_| bad("tree edge"))?;
                edges.push((a, b, len));
            }
            Ok(TargetSpace::Tree(MetricTree::new(nv, edges)?))
        }
        "cone" => Ok(TargetSpace::Cone {
            base: Box::new(parse_space(tokens)?),
        }),
        other => Err(bad(&format!("unknown target kind '{other}'"))),
    }
}

pub fn write_checkpoint_string(map: &PLMap) -> String {
    let mut out = String::new();
    out.push_str("harmap-checkpoint v1\n");
    let _ = writeln!(out, "target {}", space_tokens(&map.space));
    let _ = write!(out, "ball {}", map.ball.radius);
    for c in map.ball.center.coord_vec() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    for (i, v) in map.values.iter().enumerate() {
        let _ = write!(out, "vertex {i}");
        for c in v.coord_vec() {
            let _ = write!(out, " {c}");
        }
        out.push('\n');
    }
    out
}

pub fn write_checkpoint(map: &PLMap, path: &Path) -> Result<()> {
    std::fs::write(path, write_checkpoint_string(map))?;
    Ok(())
}

pub fn parse_checkpoint(text: &str) -> Result<PLMap> {
    let err = |line: usize, m: &str| Error::Parse {
        line: line + 1,
        message: m.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (l0, header) = lines.next().ok_or_else(|| err(0, "empty checkpoint"))?;
    if header.trim() != "harmap-checkpoint v1" {
        return Err(err(l0, "expected 'harmap-checkpoint v1' header"));
    }
    let (ln, target_line) = lines.next().ok_or_else(|| err(1, "missing target line"))?;
    let mut tok = target_line.split_whitespace().peekable();
    if tok.next() != Some("target") {
        return Err(err(ln, "expected target line"));
    }
    let space = parse_space(&mut tok)?;
    let (ln, ball_line) = lines.next().ok_or_else(|| err(2, "missing ball line"))?;
    let mut tok = ball_line.split_whitespace();
    if tok.next() != Some("ball") {
        return Err(err(ln, "expected ball line"));
    }
    let radius: f64 = tok
        .next()
        .ok_or_else(|| err(ln, "ball radius"))?
        .parse()
        .map_err(|_| err(ln, "ball radius"))?;
    let center_coords: Vec<f64> = tok
        .map(|t| t.parse().map_err(|_| err(ln, "ball center")))
        .collect::<Result<_>>()?;
    let center = space.point_from_coords(&center_coords)?;
    let ball = BallConstraint::new(center, radius)?;
    let mut values = Vec::new();
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        if tok.next() != Some("vertex") {
            return Err(err(ln, "expected vertex line"));
        }
        let id: usize = tok
            .next()
            .ok_or_else(|| err(ln, "vertex id"))?
            .parse()
            .map_err(|_| err(ln, "vertex id"))?;
        if id != values.len() {
            return Err(err(ln, "vertex ids must be dense and ordered"));
        }
        let coords: Vec<f64> = tok
            .map(|t| t.parse().map_err(|_| err(ln, "vertex coords")))
            .collect::<Result<_>>()?;
        values.push(space.point_from_coords(&coords)?);
    }
    Ok(PLMap {
        space,
        values,
        ball,
    })
}

pub fn read_checkpoint(path: &Path) -> Result<PLMap> {
    parse_checkpoint(&std::fs::read_to_string(path)?)
}
