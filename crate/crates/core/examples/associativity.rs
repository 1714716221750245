//! Both bracketings of every triple product over small points of B(Z).
//!
//!     cargo run --release --example associativity -- paper-example 6

use std::time::Instant;

use mirage::{LogCYSurfacePair, MirrorAlgebra};

fn main() -> mirage::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "paper-example".into());
    let deg: i64 = args.next().map(|s| s.parse().expect("degree")).unwrap_or(6);

    let pair = LogCYSurfacePair::preset(&name)?;
    let alg = MirrorAlgebra::new(&pair, deg)?;
    let pts: Vec<_> = pair.fan().enumerate_b_points(&pair.good(), 1).into_iter().map(|p| p.vector).collect();
    let start = Instant::now();
    let mut failures = 0;
    let mut triples = 0;
    for a in &pts {
        for b in &pts {
            for c in &pts {
                triples += 1;
                if let Some((r, cls, l, rr)) = alg.associativity_mismatch(*a, *b, *c)? {
                    failures += 1;
                    println!("{a} {b} {c}: at r={r}, class {cls:?}: {l} vs {rr}");
                }
            }
        }
    }
    println!("{name}, degree {deg}: {triples} triples, {failures} mismatches ({:.1?})", start.elapsed());
    Ok(())
}
