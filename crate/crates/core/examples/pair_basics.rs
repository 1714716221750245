//! Intersection numbers, boundary classes and the integral points of B for
//! the built-in pairs.
//!
//!     cargo run --example pair_basics

use mirage::notation::{format_class, format_point};
use mirage::LogCYSurfacePair;

fn main() -> mirage::Result<()> {
    for name in ["paper-example", "p2", "two-blowup"] {
        let pair = LogCYSurfacePair::preset(name)?;
        println!("== {name}: classes {}", pair.class_names().join(", "));
        for i in 0..pair.fan().n_rays() {
            let d = pair.divisor_class(i);
            println!("  {} = {}  D^2 = {}", pair.ray_names()[i], format_class(&pair, &d), pair.intersect(&d, &d)?);
        }
        let trunc = pair.truncation(3);
        let classes: Vec<String> = pair.effective_classes_up_to(&trunc)?.iter().map(|c| format_class(&pair, c)).collect();
        println!("  effective classes of degree <= 3: {}", classes.join(", "));
        let pts: Vec<String> = pair.fan().enumerate_b_points(&pair.good(), 1).iter().map(|p| format_point(&pair, &p.vector)).collect();
        println!("  B(Z), norm <= 1: {}", pts.join(", "));
    }
    // On paper-example, 3L-2E meets D2 three times: the contact 3D2 of p2.
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let a = mirage::notation::parse_class(&pair, "3L-2E")?;
    println!("D2 . (3L-2E) = {}", pair.intersect_boundary(0, &a)?);
    Ok(())
}
