//! The theta_0 coefficient of an iterated product, nested from the left and
//! from the right. This is the finite-sum shadow of the reduced TRR.
//!
//!     cargo run --example frobenius_identity

use mirage::notation::{format_class, format_point};
use mirage::{LogCYSurfacePair, MirrorAlgebra};

fn main() -> mirage::Result<()> {
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let alg = MirrorAlgebra::new(&pair, 6)?;
    let pt = |s: &str| pair.parse_point(s).unwrap();
    let tuples = [vec![pt("D1"), pt("D2"), pt("D3")], vec![pt("D1+D3"), pt("2D2+D3")], vec![pt("D1"), pt("D1"), pt("D2"), pt("D3")]];
    let classes = pair.effective_classes_up_to(&pair.truncation(6))?;
    for ps in &tuples {
        for a in &classes {
            let (l, r) = alg.iterated_theta0_coefficient(ps, a)?;
            if l != 0 || r != 0 {
                let names: Vec<String> = ps.iter().map(|p| format!("ϑ_{{{}}}", format_point(&pair, p))).collect();
                println!("{} at z^{{{}}}: left {l}, right {r}", names.join(" * "), format_class(&pair, a));
            }
        }
    }
    Ok(())
}
