//! Acceptance criteria 1 to 12. Runs without the libtest harness so that each
//! criterion prints exactly one line; the process fails if any line is FAIL.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use mirage::lattice_fan::ConeComplex;
use mirage::modify::{compare_structure_constants, Modification};
use mirage::notation::{format_class, format_in_cone, parse_class};
use mirage::scattering::Support;
use mirage::theta::{enumerate_broken_lines, generic_point_in_cone, theta_expansion};
use mirage::troptype::{TropEdge, TropLeg, TropVertex};
use mirage::{
    q, ConeId, CurveClass, IntegralPointB, LatticePoint, LogCYSurfacePair, MirrorAlgebra, RatPoint, ScatteringDiagram, ThetaElement,
    TropicalType,
};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn paper() -> LogCYSurfacePair {
    LogCYSurfacePair::preset("paper-example").unwrap()
}

fn cls(pair: &LogCYSurfacePair, s: &str) -> CurveClass {
    parse_class(pair, s).unwrap()
}

fn pt(pair: &LogCYSurfacePair, s: &str) -> LatticePoint {
    pair.parse_point(s).unwrap()
}

/// The truncation degree of `A`, to express cutoffs like deg(3L).
fn deg_of(pair: &LogCYSurfacePair, s: &str) -> i64 {
    pair.degree(&cls(pair, s))
}

fn nonzero(m: BTreeMap<CurveClass, i64>) -> BTreeMap<CurveClass, i64> {
    m.into_iter().filter(|(_, v)| *v != 0).collect()
}

fn theta_fixture() -> Outcome {
    let pair = paper();
    let trunc = pair.truncation(deg_of(&pair, "2L"));
    let d = ScatteringDiagram::initial(&pair).complete(&trunc).map_err(|e| e.to_string())?;
    let q = generic_point_in_cone(&d, 1, 0);
    let got: Vec<String> = theta_expansion(&d, pt(&pair, "2D2+D3"), &q, &trunc)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|m| format!("{} x^{{{}}} z^{{{}}}", m.coefficient, format_in_cone(&pair, 1, &m.exponent), format_class(&pair, &m.class)))
        .collect();
    let want = ["1 x^{-D1-D3} z^{2L-E}", "1 x^{-2D1-D3} z^{2L}"];
    ensure(got == want, format!("got {got:?}"))?;
    Ok(got.join(" + "))
}

fn broken_line_counts() -> Outcome {
    let pair = paper();
    let trunc = pair.truncation(deg_of(&pair, "3L"));
    let d = ScatteringDiagram::initial(&pair).complete(&trunc).map_err(|e| e.to_string())?;
    let q = generic_point_in_cone(&d, 1, 0);
    let l1 = enumerate_broken_lines(&d, pt(&pair, "D1+D3"), &q, &trunc).map_err(|e| e.to_string())?;
    ensure(l1.len() == 1, format!("{} lines for p1", l1.len()))?;
    let l2 = enumerate_broken_lines(&d, pt(&pair, "3D2+2D3"), &q, &trunc).map_err(|e| e.to_string())?;
    let slopes: BTreeSet<LatticePoint> = l2.iter().map(|l| l.final_slope()).collect();
    let want: BTreeSet<LatticePoint> = [LatticePoint::new(-2, -1), LatticePoint::new(-3, -2)].into();
    ensure(l2.len() == 2 && slopes == want, format!("{} lines for p2, final slopes {slopes:?}", l2.len()))?;
    Ok("p1: 1 line; p2: 2 lines with final slopes (-2,-1), (-3,-2)".into())
}

fn vanishing_constant() -> Outcome {
    let pair = paper();
    let a = cls(&pair, "3L-2E");
    let alg = MirrorAlgebra::new(&pair, pair.degree(&a)).map_err(|e| e.to_string())?;
    let n = alg.n(pt(&pair, "D1+D3"), pt(&pair, "3D2+2D3"), LatticePoint::ZERO).map_err(|e| e.to_string())?;
    let v = n.get(&a).copied().unwrap_or(0);
    ensure(v == 0, format!("N = {v}"))?;
    Ok("N_{p1,p2,0}^{3L-2E} = 0".into())
}

fn nonvanishing_constant() -> Outcome {
    let pair = paper();
    let alg = MirrorAlgebra::new(&pair, deg_of(&pair, "3L")).map_err(|e| e.to_string())?;
    let n = nonzero(alg.n(pt(&pair, "D1+D3"), pt(&pair, "2D2+D3"), LatticePoint::ZERO).map_err(|e| e.to_string())?);
    let want: BTreeMap<CurveClass, i64> = [(cls(&pair, "2L-E"), 1)].into();
    ensure(n == want, format!("got {n:?}"))?;
    Ok("theta_p1 theta_p [theta_0] = z^{2L-E}".into())
}

fn presentation_relation() -> Outcome {
    let pair = paper();
    let ps = [pt(&pair, "D1"), pt(&pair, "D2"), pt(&pair, "D3")];
    let mut want = ThetaElement::default();
    want.add(IntegralPointB::origin(), cls(&pair, "L"), 1);
    want.add(IntegralPointB::new(pair.fan(), ps[0]), cls(&pair, "L-E"), 1);
    for deg in [deg_of(&pair, "L"), deg_of(&pair, "3L")] {
        let alg = MirrorAlgebra::new(&pair, deg).map_err(|e| e.to_string())?;
        for (side, got) in [("left", alg.product_left(&ps)), ("right", alg.product_right(&ps))] {
            let got = got.map_err(|e| e.to_string())?;
            ensure(got == want, format!("degree {deg}, {side} nesting: {}", got.display(&pair)))?;
        }
    }
    Ok(format!("theta_D1 theta_D2 theta_D3 = {}", want.display(&pair)))
}

fn associativity_suite() -> Outcome {
    let pair = paper();
    let alg = MirrorAlgebra::new(&pair, deg_of(&pair, "3L")).map_err(|e| e.to_string())?;
    let pts: Vec<LatticePoint> = pair.fan().enumerate_b_points(&pair.good(), 2).into_iter().map(|p| p.vector).collect();
    let mut checked = 0usize;
    let mut spot = 0usize;
    for (i, &p1) in pts.iter().enumerate() {
        for &p2 in &pts {
            for &p3 in &pts {
                let left = alg.product_right(&[p1, p2, p3]).map_err(|e| e.to_string())?;
                let right = alg.product_left(&[p1, p2, p3]).map_err(|e| e.to_string())?;
                for a in alg.classes() {
                    for r in pair.admissible_outputs(a, &[p1, p2, p3]) {
                        let (l, rr) = (left.get(r.vector, a), right.get(r.vector, a));
                        ensure(l == rr, format!("({p1},{p2},{p3}) r={} A={a:?}: {l} != {rr}", r.vector))?;
                        checked += 1;
                        // The public checker agrees on a deterministic sample.
                        if l != 0 && (checked + i) % 97 == 0 {
                            let rep = alg.check_associativity(p1, p2, p3, r.vector, a).map_err(|e| e.to_string())?;
                            ensure(rep.holds && rep.lhs == l, format!("check_associativity disagrees at ({p1},{p2},{p3})"))?;
                            spot += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{} triples, {checked} admissible (r, A) below deg 3L, {spot} spot checks", pts.len().pow(3)))
}

fn birational_invariance() -> Outcome {
    let pair = paper();
    let cutoff = deg_of(&pair, "2L");
    let src = MirrorAlgebra::new(&pair, cutoff).map_err(|e| e.to_string())?;
    let pts: Vec<LatticePoint> = pair.fan().enumerate_b_points(&pair.good(), 2).into_iter().map(|p| p.vector).collect();
    let mut summary = Vec::new();
    for cone in 0..pair.fan().n_rays() {
        let m = Modification::corner_blowup(&pair, ConeId::Cone(cone)).map_err(|e| e.to_string())?;
        // The blowup's ample class 2H - F doubles degrees; lifts carry extra F.
        let tgt = MirrorAlgebra::new(&m.target, 2 * cutoff + 2).map_err(|e| e.to_string())?;
        let (mut n, mut nz) = (0, 0);
        for &p in &pts {
            for &qq in &pts {
                let mut rs = src.candidate_outputs(p, qq);
                rs.extend(tgt.candidate_outputs(p, qq));
                for r in rs {
                    for a in src.classes() {
                        if pair.admissible_outputs(a, &[p, qq]).iter().all(|x| x.vector != r) {
                            continue;
                        }
                        let c = compare_structure_constants(&m, &src, &tgt, p, qq, r, a).map_err(|e| format!("cone {cone}: {e}"))?;
                        ensure(c.equal(), format!("cone {cone}, ({p},{qq},{r}) A={a:?}: {} != {}", c.source, c.target))?;
                        n += 1;
                        nz += usize::from(c.source != 0);
                    }
                }
            }
        }
        summary.push(format!("corner {cone}: {n} tuples ({nz} nonzero)"));
    }
    Ok(summary.join("; "))
}

fn realizability_fixtures() -> Outcome {
    let pair = paper();
    let load = |name: &str| {
        let path = format!("{}/fixtures/types/{name}.json", env!("CARGO_MANIFEST_DIR"));
        TropicalType::from_json(&std::fs::read_to_string(path).unwrap()).unwrap().realizability(pair.fan()).map_err(|e| e.to_string())
    };
    let c1 = load("case1")?;
    ensure(!c1.is_realizable(), "case 1 type is realizable")?;
    let m2 = load("figure_m2")?;
    ensure(m2.is_realizable(), "figure m2 type is infeasible")?;
    let point = load("point")?;
    ensure(point.is_realizable() && point.dim_tau == Some(0), format!("point type: {:?} dim {:?}", point.status, point.dim_tau))?;
    Ok(format!("case 1 {}; figure m2 {} (dim {}); point {} (dim 0)", c1.status, m2.status, m2.dim_tau.unwrap(), point.status))
}

fn virtual_dimensions() -> Outcome {
    let pair = paper();
    let a = cls(&pair, "L");
    // c1 . A = sum -a_i D_i . A vanishes: every boundary divisor is good.
    ensure(pair.c1_log_degree(&a).map_err(|e| e.to_string())? == q(0), "c1 . L is not 0")?;
    let oracle = |n: i64, e: i64| 0 + (2 - 3) * (1 - 0) + n - e;
    let mut got = Vec::new();
    for (n, es) in [(3, vec![1, 1]), (3, vec![1]), (2, vec![])] {
        let v = pair.virtual_dimension(0, n, &a, &es).map_err(|e| e.to_string())?;
        ensure(v == q(oracle(n, es.iter().sum())), format!("n={n}, e={es:?}: {v}"))?;
        got.push(v.to_string());
    }
    ensure(got == ["0", "1", "1"], format!("got {got:?}"))?;
    ensure(pair.virtual_dimension(1, 3, &a, &[]).is_err(), "genus 1 accepted")?;
    Ok(format!("vdim = {}", got.join(", ")))
}

/// Laurent polynomials in `x, y` over `Z[a, b]`, keyed by `[i, j, mx, my]`
/// for `a^i b^j x^(mx, my)` and truncated at total `a, b` order `n`.
type Poly = BTreeMap<[i64; 4], i64>;

fn poly_mul(f: &Poly, g: &Poly, n: i64) -> Poly {
    let mut out = Poly::new();
    for (k1, c1) in f {
        for (k2, c2) in g {
            if k1[0] + k2[0] + k1[1] + k2[1] > n {
                continue;
            }
            let k = [k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2], k1[3] + k2[3]];
            *out.entry(k).or_insert(0) += c1 * c2;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn poly_pow(f: &Poly, k: i64, n: i64) -> Poly {
    let one: Poly = [([0, 0, 0, 0], 1)].into();
    let base = if k >= 0 {
        f.clone()
    } else {
        // 1 / (1 + g) = sum (-g)^j; g has positive order.
        let mut g = f.clone();
        *g.get_mut(&[0, 0, 0, 0]).unwrap() -= 1;
        g.retain(|_, c| *c != 0);
        let neg: Poly = g.iter().map(|(k, c)| (*k, -c)).collect();
        let mut sum = one.clone();
        let mut term = one.clone();
        for _ in 0..n {
            term = poly_mul(&term, &neg, n);
            for (k, c) in &term {
                *sum.entry(*k).or_insert(0) += c;
            }
        }
        sum.retain(|_, c| *c != 0);
        sum
    };
    (0..k.abs()).fold(one, |acc, _| poly_mul(&acc, &base, n))
}

/// Composes wall crossings along a counterclockwise loop and reports whether
/// `x` and `y` come back unchanged. Walls are half-rays `(d, f)`; crossing
/// sends `x^m` to `x^m f^<n, m>` with `n` orthogonal to `d` and negative on
/// the direction of travel.
fn loop_is_identity(walls: &[(LatticePoint, Poly)], n: i64) -> (bool, i64) {
    let start = 0.3f64;
    let angle = |d: &LatticePoint| {
        let t = (d.y as f64).atan2(d.x as f64);
        (t - start).rem_euclid(std::f64::consts::TAU)
    };
    let mut order: Vec<&(LatticePoint, Poly)> = walls.iter().collect();
    order.sort_by(|a, b| angle(&a.0).partial_cmp(&angle(&b.0)).unwrap());
    let apply = |p: &Poly, d: &LatticePoint, f: &Poly| -> Poly {
        let mut out = Poly::new();
        for (k, c) in p {
            let e = d.y * k[2] - d.x * k[3];
            let mono: Poly = [(*k, *c)].into();
            for (kk, cc) in poly_mul(&mono, &poly_pow(f, e, n), n) {
                *out.entry(kk).or_insert(0) += cc;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    };
    let mut lowest = i64::MAX;
    for start_mono in [[0, 0, 1, 0], [0, 0, 0, 1]] {
        let mut p: Poly = [(start_mono, 1)].into();
        for (d, f) in &order {
            p = apply(&p, d, f);
        }
        for (k, c) in &p {
            if *k != start_mono || *c != 1 {
                lowest = lowest.min(k[0] + k[1]);
            }
        }
    }
    (lowest == i64::MAX, lowest)
}

fn scattering_consistency() -> Outcome {
    let mut lines = Vec::new();
    for name in ["paper-example", "p2", "two-blowup"] {
        let pair = LogCYSurfacePair::preset(name).unwrap();
        let cutoff = deg_of(&pair, if name == "two-blowup" { "3A" } else { "3L" });
        let d = ScatteringDiagram::initial(&pair).complete(&pair.truncation(cutoff)).map_err(|e| e.to_string())?;
        for base in [None, Some(LatticePoint::new(2, 1)), Some(LatticePoint::new(-3, 1))] {
            for k in 1..=d.order() {
                let rep = d.check_consistency(base, k);
                ensure(rep.consistent, format!("{name}: order {k}, base {base:?}: {:?}", rep.first_failure))?;
            }
        }
        lines.push(format!("{name} through order {}", d.order()));
    }

    // Two transverse lines f1 = 1 + a x, f2 = 1 + b y: the oracle says the
    // loop fails at order 2 and is repaired by the ray 1 + ab xy along -(1,1).
    let line = |d: LatticePoint, k: [i64; 4]| -> [(LatticePoint, Poly); 2] {
        let f: Poly = [([0, 0, 0, 0], 1), (k, 1)].into();
        [(d, f.clone()), (-d, f)]
    };
    let mut walls: Vec<(LatticePoint, Poly)> = Vec::new();
    walls.extend(line(LatticePoint::new(-1, 0), [1, 0, 1, 0]));
    walls.extend(line(LatticePoint::new(0, -1), [0, 1, 0, 1]));
    let (ok, lowest) = loop_is_identity(&walls, 2);
    ensure(!ok && lowest == 2, format!("oracle: bare lines consistent={ok}, lowest order {lowest}"))?;
    let ray: Poly = [([0, 0, 0, 0], 1), ([1, 1, 1, 1], 1)].into();
    walls.push((LatticePoint::new(-1, -1), ray));
    for n in [2, 5] {
        ensure(loop_is_identity(&walls, n).0, format!("oracle: completed loop fails at truncation {n}"))?;
    }

    let pair = LogCYSurfacePair::preset("two-blowup").unwrap();
    let init = ScatteringDiagram::initial(&pair);
    let line_terms: Vec<(CurveClass, LatticePoint)> = init.walls().iter().flat_map(|w| w.function.terms.keys().cloned()).collect();
    ensure(line_terms.len() == 2, "two-blowup should start with two single-term lines")?;
    let expected_class = &line_terms[0].0 + &line_terms[1].0;
    let before = init.check_consistency(None, 2);
    let f = before.first_failure.ok_or("initial two-blowup diagram passes")?;
    ensure(!before.consistent && f.order == 2 && f.direction == LatticePoint::new(-1, -1), format!("failing term {f:?}"))?;
    let done = init.complete_to_order(2).map_err(|e| e.to_string())?;
    ensure(done.check_consistency(None, 2).consistent, "completed two-blowup diagram fails")?;
    let added: Vec<_> = done.walls().iter().filter(|w| !init.walls().contains(w)).collect();
    let want: BTreeMap<(CurveClass, LatticePoint), i64> = [((expected_class.clone(), LatticePoint::new(1, 1)), 1)].into();
    ensure(
        added.len() == 1 && added[0].support == Support::Ray && added[0].direction == LatticePoint::new(-1, -1) && added[0].function.terms == want,
        format!("added walls {added:?}"),
    )?;
    lines.push(format!("two-blowup fails at order 2 on the antidiagonal, repaired by 1 + z^{{{}}} x^(1,1)", format_class(&pair, &expected_class)));
    Ok(lines.join("; "))
}

/// A random tree type built from an actual tropical map, so it is realizable,
/// with every slope in the lattice of `refined`.
fn random_type(rng: &mut ChaCha8Rng, fan: &ConeComplex, refined: &ConeComplex) -> TropicalType {
    let ids = |c: ConeId| fan.cone_ray_indices(c);
    let pick_dir = |rng: &mut ChaCha8Rng, at: &RatPoint| -> (usize, LatticePoint) {
        loop {
            let c = rng.gen_range(0..fan.n_rays());
            let (x, y) = fan.cone_coords(c, at);
            if x.is_negative() || y.is_negative() {
                continue;
            }
            let (ga, gb) = (fan.generators(ConeId::Cone(c))[0], fan.generators(ConeId::Cone(c))[1]);
            let u = ga.scale(rng.gen_range(0..=4)) + gb.scale(rng.gen_range(0..=4));
            if !u.is_zero() && refined.in_refined_lattice(&u) {
                return (c, u);
            }
        }
    };
    let root = if rng.gen_bool(0.5) { LatticePoint::ZERO } else { LatticePoint::new(rng.gen_range(-3..=3), rng.gen_range(-3..=3)) };
    let mut pos = vec![root.to_rat()];
    let mut t = TropicalType::default();
    for _ in 1..rng.gen_range(1..=4) {
        let parent = rng.gen_range(0..pos.len());
        let (c, u) = pick_dir(rng, &pos[parent]);
        let len = q(rng.gen_range(1..=2));
        // Move inward or outward, staying in the closed cone `c`.
        let (child, u) = {
            let fwd = pos[parent].add_scaled(&len, &u);
            let back = pos[parent].add_scaled(&-len.clone(), &u);
            let (bx, by) = fan.cone_coords(c, &back);
            if rng.gen_bool(0.5) && !bx.is_negative() && !by.is_negative() {
                (back, -u)
            } else {
                (fwd, u)
            }
        };
        let mid = pos[parent].add(&child).scale(&Q::new(1.into(), 2.into()));
        t.edges.push(TropEdge { from: parent, to: pos.len(), cone: ids(fan.minimal_cone(&mid)), u });
        pos.push(child);
    }
    for (v, p) in pos.iter().enumerate() {
        let legs = rng.gen_range(0..=2) + usize::from(pos.len() == 1 && v == 0);
        for _ in 0..legs {
            let (_, u) = pick_dir(rng, p);
            t.legs.push(TropLeg { vertex: v, cone: ids(fan.minimal_cone(&p.add_scaled(&q(1), &u))), u, punctured: false });
        }
    }
    t.vertices = pos.iter().map(|p| TropVertex { cone: ids(fan.minimal_cone(p)), class: None }).collect();
    t
}

type Q = mirage::Q;

fn refinement_divisibility() -> Outcome {
    let pair = paper();
    let fan = pair.fan();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let mut hist: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for i in 0..50 {
        let k = [2u64, 3, 4][i % 3];
        let ray = rng.gen_range(0..fan.n_rays());
        let refined = fan.refine_ray_lattice(ray, k).map_err(|e| e.to_string())?;
        let t = random_type(&mut rng, fan, &refined);
        let res = t.realizability(fan).map_err(|e| format!("type {i}: {e}\n{}", t.to_json()))?;
        ensure(res.is_realizable(), format!("type {i} built from a map is infeasible:\n{}", t.to_json()))?;
        let r = t.refinement_index(fan, &refined).map_err(|e| format!("type {i}: {e}"))?;
        ensure(r >= 1 && k % r == 0, format!("type {i}: r = {r} does not divide k = {k}\n{}", t.to_json()))?;
        *hist.entry((k, r)).or_insert(0) += 1;
    }
    let parts: Vec<String> = hist.iter().map(|((k, r), n)| format!("k={k} r={r}: {n}")).collect();
    Ok(format!("50 types; {}", parts.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("theta_p expansion fixture", theta_fixture),
        ("broken-line counts", broken_line_counts),
        ("vanishing constant", vanishing_constant),
        ("nonvanishing constant", nonvanishing_constant),
        ("presentation relation", presentation_relation),
        ("associativity suite", associativity_suite),
        ("birational invariance suite", birational_invariance),
        ("realizability fixtures", realizability_fixtures),
        ("virtual dimension", virtual_dimensions),
        ("scattering consistency", scattering_consistency),
        ("refinement divisibility", refinement_divisibility),
    ];
    // Keep panic messages out of the one-line-per-criterion report.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {} ({secs:.1}s)", i + 1, why.replace('\n', " "));
            }
        }
    }
    println!("criterion 12 not computed (stated)  virtual-class statements and orbifold invariants are out of desk scale");
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
