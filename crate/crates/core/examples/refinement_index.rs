//! Refinement indices of a tropical type under ray-lattice refinements: how
//! much of the moduli lattice survives, and the divisibility r | k.
//!
//!     cargo run --example refinement_index

use mirage::{LogCYSurfacePair, TropicalType};

fn main() -> mirage::Result<()> {
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let fan = pair.fan();
    // One vertex on D2 with a leg of slope 6 D2 and a leg into <D2, D3>.
    let t = TropicalType::from_json(
        r#"{"vertices": [{"cone": [0]}],
            "legs": [{"vertex": 0, "cone": [0], "u": [6, 0]},
                     {"vertex": 0, "cone": [0, 1], "u": [0, 1]}]}"#,
    )?;
    for k in 1..=6u64 {
        let refined = fan.refine_ray_lattice(0, k)?;
        match t.refinement_index(fan, &refined) {
            Ok(r) => println!("k = {k}: r = {r}, r | k: {}", k % r == 0),
            Err(e) => println!("k = {k}: {e}"),
        }
    }
    Ok(())
}
