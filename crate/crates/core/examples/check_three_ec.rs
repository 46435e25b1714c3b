//! Sampled 3-e.c. check of G_{p,d}.
//!
//! ```bash
//! cargo run --release -p qec --example check_three_ec -- 7 5 100000 42
//! ```

use qec::{check_ec, CheckOptions, QuadranceGraph};

fn main() -> qec::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).map(|a| a.parse().expect("integer")).collect();
    let p = args.first().copied().unwrap_or(7);
    let d = args.get(1).copied().unwrap_or(5) as usize;
    let samples = args.get(2).copied().unwrap_or(10_000) as usize;
    let seed = args.get(3).copied().unwrap_or(42);

    let g = QuadranceGraph::canonical(p, d)?;
    let report = check_ec(&g, 3, CheckOptions::sampled(samples, seed))?;
    println!("{}", report.to_json(true));
    if let Some(cert) = report.verdict.certificate() {
        println!("certificate re-verified: {}", cert.verify(&g));
    }
    Ok(())
}
