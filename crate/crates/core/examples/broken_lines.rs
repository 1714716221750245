//! The broken lines behind theta_p for p = 2D2 + D3, ending in the chamber
//! spanned by D1 and D3 (the layout of Figure 1).
//!
//!     cargo run --example broken_lines

use mirage::notation::{format_class, format_in_cone, format_rat_point};
use mirage::theta::{enumerate_broken_lines, generic_point_in_cone, theta_expansion};
use mirage::{LogCYSurfacePair, ScatteringDiagram};

fn main() -> mirage::Result<()> {
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let trunc = pair.truncation(6);
    let d = ScatteringDiagram::initial(&pair).complete(&trunc)?;
    let p = pair.parse_point("2D2+D3")?;
    // Cone 1 is spanned by D3 and D1.
    let q = generic_point_in_cone(&d, 1, 0);

    for (i, line) in enumerate_broken_lines(&d, p, &q, &trunc)?.iter().enumerate() {
        println!("line {} with {} bend(s):", i + 1, line.bends());
        for s in &line.segments {
            let from = s.start.as_ref().map(format_rat_point).unwrap_or_else(|| "infinity".into());
            println!(
                "  {from} -> {}   x^{{{}}} z^{{{}}}",
                format_rat_point(&s.end),
                format_in_cone(&pair, 1, &s.monomial.exponent),
                format_class(&pair, &s.monomial.class)
            );
        }
    }

    let terms: Vec<String> = theta_expansion(&d, p, &q, &trunc)?
        .iter()
        .map(|m| format!("x^{{{}}} z^{{{}}}", format_in_cone(&pair, 1, &m.exponent), format_class(&pair, &m.class)))
        .collect();
    println!("theta_p = {}", terms.join(" + "));
    // theta_p = x^{-D1-D3} z^{2L-E} + x^{-2D1-D3} z^{2L}
    Ok(())
}
