//! Exact realizability of the tropical types in `fixtures/types`.
//!
//!     cargo run --example tropical_realizability

use mirage::notation::format_rat_point;
use mirage::{LogCYSurfacePair, TropicalType};

fn main() -> mirage::Result<()> {
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/types");
    for name in ["case1", "figure_m2", "point"] {
        let t = TropicalType::from_json(&std::fs::read_to_string(format!("{dir}/{name}.json"))?)?;
        let res = t.realizability(pair.fan())?;
        print!("{name}: {}", res.status);
        if let Some(dim) = res.dim_tau {
            print!(", dim_tau = {dim}");
        }
        println!();
        if let Some(w) = &res.witness {
            let pos: Vec<String> = w.positions.iter().map(format_rat_point).collect();
            println!("  positions {}", pos.join(" "));
        }
    }

    // Cutting the bounded edge of the Figure m2 type and gluing back.
    let m2 = TropicalType::from_json(&std::fs::read_to_string(format!("{dir}/figure_m2.json"))?)?;
    let (a, b) = m2.cut_edge(1)?;
    println!("cut: {} + {} vertices", a.vertices.len(), b.vertices.len());
    let g = TropicalType::glue(&a, a.legs.len() - 1, &b, b.legs.len() - 1)?;
    println!("glued back isomorphic: {}", g.is_isomorphic(&m2));
    Ok(())
}
