//! Products of theta functions: the relation theta_D1 theta_D2 theta_D3 =
//! z^L + z^(L-E) theta_D1 and the constants around the Case 1 discussion.
//!
//!     cargo run --example structure_constants

use mirage::notation::{format_class, parse_class};
use mirage::{LatticePoint, LogCYSurfacePair, MirrorAlgebra};

fn main() -> mirage::Result<()> {
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let alg = MirrorAlgebra::new(&pair, 6)?;
    let pt = |s: &str| pair.parse_point(s).unwrap();

    let (d1, d2, d3) = (pt("D1"), pt("D2"), pt("D3"));
    println!("theta_D1 theta_D2 theta_D3 = {}", alg.product_left(&[d1, d2, d3])?.display(&pair));

    let (p1, p) = (pt("D1+D3"), pt("2D2+D3"));
    println!("theta_p1 theta_p = {}", alg.structure_constants(p1, p)?.display(&pair));
    for (c, n) in alg.n(p1, p, LatticePoint::ZERO)? {
        println!("  N_(p1,p,0)^({}) = {n}", format_class(&pair, &c));
    }

    let p2 = pt("3D2+2D3");
    let a = parse_class(&pair, "3L-2E")?;
    let n = alg.n(p1, p2, LatticePoint::ZERO)?.get(&a).copied().unwrap_or(0);
    println!("N_(p1,p2,0)^(3L-2E) = {n}");
    Ok(())
}
