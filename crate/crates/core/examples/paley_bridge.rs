//! The d = 2 graph with nonzero-square edge values against the Paley graph
//! of order p^2, for p = 3 (mod 4).

use qec::paley::{adjacency_rows, build_paley, build_quadratic_residue_graph, srg_parameters, verify_isomorphism};

fn main() -> qec::Result<()> {
    for p in [3, 7, 11] {
        let iso = verify_isomorphism(p)?;
        let qr = srg_parameters(&adjacency_rows(&build_quadratic_residue_graph(p)?)?);
        let paley = srg_parameters(build_paley(p)?.rows());
        println!(
            "p={p}: isomorphic={} pairs={} srg(quadrance)={qr:?} srg(paley)={paley:?}",
            iso.isomorphic, iso.pairs_checked
        );
    }
    match verify_isomorphism(5) {
        Ok(_) => println!("p=5 unexpectedly supported"),
        Err(e) => println!("p=5: {e}"),
    }
    Ok(())
}
