//! Exhaustive 3-e.c. checks in small dimension, outside the range where
//! existence is proved. Prints one row per graph; no outcome is assumed.

use qec::{check_ec, CheckOptions, QuadranceGraph};

fn main() -> qec::Result<()> {
    println!("m,d,n,verdict,queries_checked,pattern,certificate_ok");
    for (m, d) in [(7, 2), (7, 3), (11, 2)] {
        let g = QuadranceGraph::canonical(m, d)?;
        let r = check_ec(&g, 3, CheckOptions::exhaustive())?;
        let (pattern, ok) = match r.verdict.certificate() {
            Some(c) => (c.pattern.to_string(), c.verify(&g).to_string()),
            None => (String::new(), String::new()),
        };
        println!(
            "{m},{d},3,{},{},{pattern},{ok}",
            if r.is_pass() { "pass" } else { "fail" },
            r.queries_checked
        );
    }
    Ok(())
}
