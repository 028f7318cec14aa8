//! Local models and their graded meshes: books, cones, a 3-dimensional
//! product, structural audits and the bit-exact mesh file round-trip.
//!
//!   cargo run --example mesh_domains

use harmap::domain::{
    build_book, build_cone_domain, parse_mesh, product_with_interval, triangulate, MetricField,
    write_mesh_string,
};

fn main() -> harmap::Result<()> {
    let field = MetricField::Euclidean;

    let book = build_book(3)?;
    let mesh = triangulate(&book, 1.0, 0.08, 1.2)?;
    let audit = mesh.audit(&field);
    println!(
        "book(3): {} vertices, {} triangles, audit ok: {}",
        mesh.vertices.len(),
        mesh.simplices.len(),
        audit.ok()
    );

    let cone = build_cone_domain(4.0 * std::f64::consts::PI)?;
    let mesh = triangulate(&cone, 1.0, 0.05, 1.5)?;
    println!(
        "cone(4pi): {} vertices, link angle at origin {:.6} (expect {:.6})",
        mesh.vertices.len(),
        mesh.link_angle_at_origin(),
        4.0 * std::f64::consts::PI
    );
    let text = write_mesh_string(&mesh);
    let back = parse_mesh(&text)?;
    println!(
        "mesh file round-trip bit-exact: {}",
        write_mesh_string(&back) == text
    );

    let solid = product_with_interval(&build_cone_domain(1.5 * std::f64::consts::PI)?)?;
    let mesh3 = triangulate(&solid, 1.0, 0.2, 1.0)?;
    let vol: f64 = mesh3.simplices.iter().map(|s| mesh3.simplex_volume(s)).sum();
    println!(
        "dihedral 3d: {} tets, ball volume {:.4} (exact {:.4})",
        mesh3.simplices.len(),
        vol,
        std::f64::consts::PI  // (3pi/2 of 2pi) * (4/3) pi r^3
    );
    Ok(())
}
