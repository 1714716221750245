//! Structure constants before and after blowing up the corner D2 n D3:
//! N_{p,q,r}^A on the pair equals the sum of N_{p,q,r}^B over classes B on
//! the blowup with pi_* B = A.
//!
//!     cargo run --release --example corner_blowup

use mirage::modify::{compare_structure_constants, Modification};
use mirage::notation::{format_class, format_point};
use mirage::{ConeId, LogCYSurfacePair, MirrorAlgebra};

fn main() -> mirage::Result<()> {
    let pair = LogCYSurfacePair::preset("paper-example")?;
    let m = Modification::corner_blowup(&pair, ConeId::Cone(0))?;
    println!("target rays: {}", m.target.ray_names().join(", "));
    println!("lifts of L: {:?}", m.lift_classes(&mirage::notation::parse_class(&pair, "L")?)?.iter().map(|c| format_class(&m.target, c)).collect::<Vec<_>>());

    let src = MirrorAlgebra::new(&pair, 4)?;
    let tgt = MirrorAlgebra::new(&m.target, 10)?;
    let pts: Vec<_> = pair.fan().enumerate_b_points(&pair.good(), 1).into_iter().map(|p| p.vector).filter(|v| !v.is_zero()).collect();
    let (mut checked, mut nonzero) = (0, 0);
    for p in &pts {
        for q in &pts {
            for r in src.candidate_outputs(*p, *q) {
                for a in src.classes() {
                    let c = compare_structure_constants(&m, &src, &tgt, *p, *q, r, a)?;
                    assert!(c.equal(), "{p} {q} {r} {a:?}: {c:?}");
                    checked += 1;
                    if c.source != 0 {
                        nonzero += 1;
                        if nonzero <= 5 {
                            println!(
                                "N_({},{},{})^({}) = {} = {}",
                                format_point(&pair, p),
                                format_point(&pair, q),
                                format_point(&pair, &r),
                                format_class(&pair, a),
                                c.source,
                                c.ledger.iter().filter(|(_, n)| *n != 0).map(|(b, n)| format!("{n}[{}]", format_class(&m.target, b))).collect::<Vec<_>>().join(" + ")
                            );
                        }
                    }
                }
            }
        }
    }
    println!("{checked} comparisons ({nonzero} nonzero), all equal");
    Ok(())
}
