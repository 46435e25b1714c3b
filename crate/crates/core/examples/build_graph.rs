//! Build G_{7,5}, report its size and degree, and export a small graph's
//! edge list.

use qec::{sphere_table, GraphParams, Modulus, QuadranceGraph, DEFAULT_MATERIALIZE_LIMIT};

fn main() -> qec::Result<()> {
    let g = QuadranceGraph::build(GraphParams::canonical(7, 5)?, DEFAULT_MATERIALIZE_LIMIT)?;
    println!(
        "G_7,5: {} vertices, degree {}, edge values {:?}",
        g.vertex_count(),
        g.degree(),
        g.params().edge_values()
    );
    let spheres = sphere_table(Modulus::new(7)?, 5)?;
    println!("degree from sphere sizes: {}", spheres.degree(g.params().edge_values()));

    // composite modulus, explicit edge values
    let g9 = QuadranceGraph::build(
        GraphParams::with_edge_values(Modulus::new(9)?, 2, vec![0, 1, 2, 3, 4])?,
        DEFAULT_MATERIALIZE_LIMIT,
    )?;
    println!("G_9,2: {} vertices, degree {}", g9.vertex_count(), g9.degree());

    let tiny = QuadranceGraph::canonical(3, 1)?;
    let mut out = Vec::new();
    tiny.write_edge_list(&mut out)?;
    print!("G_3,1 edges:\n{}", String::from_utf8_lossy(&out));
    Ok(())
}
