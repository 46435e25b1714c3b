//! Sphere sizes N_d(u) over Z_p^d by convolution, with the induced degree.

use qec::{sphere_table, GraphParams, Modulus};

fn main() -> qec::Result<()> {
    for (p, d) in [(7, 1), (7, 2), (7, 5), (11, 5)] {
        let t = sphere_table(Modulus::new(p)?, d)?;
        let params = GraphParams::canonical(p, d)?;
        println!(
            "p={p} d={d} N={:?} total={} degree={}",
            t.counts(),
            t.total(),
            t.degree(params.edge_values())
        );
    }
    Ok(())
}
