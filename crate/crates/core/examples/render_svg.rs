//! Writes the diagram of `paper-example` with the broken lines of
//! theta_{3D2+2D3} to `figure1.svg` (or the path given).
//!
//!     cargo run --example render_svg -- /tmp/figure1.svg

use mirage::svg::{render, SvgOptions};
use mirage::theta::{enumerate_broken_lines, generic_point_in_cone};
use mirage::{LogCYSurfacePair, ScatteringDiagram};

fn main() -> mirage::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "figure1.svg".into());
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let trunc = pair.truncation(9);
    let d = ScatteringDiagram::initial(&pair).complete(&trunc)?;
    let q = generic_point_in_cone(&d, 1, 0);
    let lines = enumerate_broken_lines(&d, pair.parse_point("3D2+2D3")?, &q, &trunc)?;
    let svg = render(&d, &lines, &SvgOptions { radius: Some(4.0), size: 600 });
    std::fs::write(&path, svg)?;
    println!("wrote {path} ({} broken lines)", lines.len());
    Ok(())
}
