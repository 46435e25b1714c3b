//! Sampled 3-e.c. check over the composite modulus m = 9.

use qec::{check_ec, CheckOptions, QuadranceGraph};

fn main() -> qec::Result<()> {
    let g = QuadranceGraph::canonical(9, 5)?;
    let r = check_ec(&g, 3, CheckOptions::sampled(10_000, 7))?;
    println!("{}", r.to_json(true));
    if let Some(cert) = r.verdict.certificate() {
        println!("certificate re-verified: {}", cert.verify(&g));
    }
    Ok(())
}
