//! Completes the canonical scattering diagram and checks it around a loop.
//!
//!     cargo run --example scattering_diagram -- two-blowup 6

use mirage::notation::format_class;
use mirage::{LogCYSurfacePair, ScatteringDiagram};

fn main() -> mirage::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "two-blowup".into());
    let deg: i64 = args.next().map(|s| s.parse().expect("degree")).unwrap_or(6);

    let pair = LogCYSurfacePair::preset(&name)?;
    let d = ScatteringDiagram::initial(&pair).complete(&pair.truncation(deg))?;
    println!("{name}: {} walls through order {}", d.walls().len(), d.order());
    for w in d.walls() {
        let terms: Vec<String> = w
            .function
            .terms
            .iter()
            .map(|((c, m), k)| format!("{k}*z^{{{}}}x^{m}", format_class(&pair, c)))
            .collect();
        println!("  {:?} {}: 1 + {}", w.support, w.direction, terms.join(" + "));
    }
    let report = d.check_consistency(None, d.order());
    println!("consistent: {}", report.consistent);

    // Dropping a wall breaks consistency at the order of its first term.
    if d.walls().len() > 1 {
        let mut json: serde_json::Value = serde_json::from_str(&d.to_json())?;
        json["walls"].as_array_mut().unwrap().pop();
        let broken = ScatteringDiagram::from_json(&pair, &json.to_string())?;
        let r = broken.check_consistency(None, d.order());
        println!("without the last wall: consistent = {}, first failure {:?}", r.consistent, r.first_failure.map(|f| f.order));
    }
    Ok(())
}
