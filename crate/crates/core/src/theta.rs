//! Broken lines and theta functions.
//!
//! The diagram is conical, so a broken line ending at `Q` is a rescaling of a
//! broken line whose initial line is `x0 - t p` with `x0 = +-rot(p)`.
//! Enumeration therefore runs *forward* from those two initial lines,
//! branching over the terms of `f^<n,m>` at every wall, and records every
//! place where the rescaled trajectory can pass through `Q`. A trajectory is
//! stopped once its class order or degree leaves the truncation.
//!
//! Exponents are kept in the toric chart. Monomials reported at `Q` carry
//! the actual class there; see [`crate::scattering`] for the normalization.

mod algebra;

pub use algebra::{parse_table, AssociativityReport, MirrorAlgebra, TableRow, ThetaElement};

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::lattice_fan::{angle_cmp, IntegralPointB, LatticePoint, RatPoint};
use crate::pair::{CurveClass, LogCYSurfacePair, Truncation};
use crate::scattering::{HalfWall, ScatteringDiagram};
use crate::series::{Grading, Series};
use crate::{q, Error, Result, Q};

/// A decorated monomial `coefficient * z^class * x^exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coefficient: i64,
    pub class: CurveClass,
    pub exponent: LatticePoint,
}

/// One linear piece of a broken line. `start == None` means the piece comes
/// in from infinity. The monomial's class is the actual class at `end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: Option<RatPoint>,
    pub end: RatPoint,
    pub monomial: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenLine {
    pub asymptotic: IntegralPointB,
    pub segments: Vec<Segment>,
    pub endpoint: RatPoint,
}

impl BrokenLine {
    pub fn final_monomial(&self) -> &Monomial {
        &self.segments.last().expect("a broken line has a segment").monomial
    }

    /// Direction of travel of the last segment.
    pub fn final_slope(&self) -> LatticePoint {
        -self.final_monomial().exponent
    }

    pub fn bends(&self) -> usize {
        self.segments.len() - 1
    }
}

/// Where the trajectory currently is.
#[derive(Clone)]
struct State {
    /// Last wall point, or `None` while still on the initial line.
    at: Option<RatPoint>,
    class: CurveClass,
    exp: LatticePoint,
    coeff: i64,
    /// Bend points so far with the normalized monomial before each bend.
    bends: Vec<(RatPoint, CurveClass, LatticePoint, i64)>,
}

struct Enumerator<'a> {
    pair: &'a LogCYSurfacePair,
    halves: Vec<HalfWall>,
    grading: Grading,
    trunc: &'a Truncation,
    q: RatPoint,
    q_cone: usize,
    p: IntegralPointB,
    x0: RatPoint,
    powers: HashMap<(usize, i64), Series>,
    out: Vec<BrokenLine>,
}

/// The special directions of a diagram: wall halves and fan rays.
pub fn special_directions(diagram: &ScatteringDiagram) -> Vec<LatticePoint> {
    let g = diagram.grading(1);
    let mut dirs: Vec<LatticePoint> = diagram.half_walls(&g).into_iter().map(|h| h.direction).collect();
    dirs.extend(diagram.pair().fan().rays().iter().copied());
    dirs.sort_by(angle_cmp);
    dirs.dedup();
    dirs
}

fn check_generic(diagram: &ScatteringDiagram, q: &RatPoint) -> Result<()> {
    if q.is_zero() {
        return Err(Error::NonGeneric("Q is the origin".into()));
    }
    if let Some(d) = special_directions(diagram).iter().find(|d| q.on_ray(d)) {
        return Err(Error::NonGeneric(format!("Q = {q} lies on the ray through {d}")));
    }
    Ok(())
}

/// `Q = a u + b v`; `None` if `u, v` are parallel.
fn cone_coefficients(q: &RatPoint, u: &RatPoint, v: &RatPoint) -> Option<(Q, Q)> {
    let d = u.det(v);
    if d.is_zero() {
        return None;
    }
    Some((q.det(v) / &d, u.det(q) / d))
}

impl Enumerator<'_> {
    /// Is `Q` a rescaling of a point of the piece? Returns that point.
    fn hit(&self, start: Option<&RatPoint>, end: Option<&RatPoint>, m: &LatticePoint) -> Result<Option<RatPoint>> {
        let mr = m.to_rat();
        let qp = &self.q;
        let degenerate = || Error::NonGeneric(format!("Q = {qp} is on the boundary of a broken-line region"));
        match (start, end) {
            (Some(a), Some(b)) => {
                let Some((al, be)) = cone_coefficients(qp, a, b) else {
                    return Ok(None);
                };
                if al.is_positive() && be.is_positive() {
                    let lambda = &al + &be;
                    return Ok(Some(qp.scale(&(q(1) / lambda))));
                }
                if (al.is_zero() && be.is_positive()) || (be.is_zero() && al.is_positive()) {
                    return Err(degenerate());
                }
                Ok(None)
            }
            (None, Some(b)) | (Some(b), None) => {
                let dir = if start.is_none() { mr.clone() } else { mr.scale(&q(-1)) };
                let Some((al, be)) = cone_coefficients(qp, b, &dir) else {
                    return Ok(None);
                };
                if al.is_positive() && be.is_positive() {
                    return Ok(Some(b.add(&dir.scale(&(be / &al)))));
                }
                if (al.is_zero() && be.is_positive()) || (be.is_zero() && al.is_positive()) {
                    return Err(degenerate());
                }
                Ok(None)
            }
            (None, None) => {
                let side = mr.det(&self.x0);
                let qs = mr.det(qp);
                if qs.is_zero() {
                    return Err(degenerate());
                }
                if qs.is_positive() == side.is_positive() {
                    let lambda = qs / side;
                    return Ok(Some(qp.scale(&(q(1) / lambda))));
                }
                Ok(None)
            }
        }
    }

    /// Next wall crossing after the current point: `(param, half index, point)`.
    fn crossings(&self, from: &RatPoint, m: &LatticePoint, initial: bool) -> Vec<(Q, usize, RatPoint)> {
        let mut v = Vec::new();
        for (i, h) in self.halves.iter().enumerate() {
            let d = h.direction;
            let det = m.det(&d);
            if det == 0 {
                continue;
            }
            let t = from.det_lat(&d) / q(det);
            let s = -from.det_lat(m) / q(det);
            if s.is_positive() && (initial || t.is_positive()) {
                v.push((t, i, RatPoint::new(q(d.x) * &s, q(d.y) * &s)));
            }
        }
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    fn actual(&self, cone: usize, class: &CurveClass, m: &LatticePoint) -> CurveClass {
        class + &self.pair.kink_function().on_cone(cone, m)
    }

    fn record(&mut self, st: &State, point: RatPoint) {
        let fan = self.pair.fan();
        let lambda = if point.x.is_zero() { &self.q.y / &point.y } else { &self.q.x / &point.x };
        let mut segments = Vec::new();
        let mut start = None;
        for (b, c, m, coeff) in &st.bends {
            let end = b.scale(&lambda);
            let cone = fan.cone_after(&end, m);
            segments.push(Segment {
                start: start.clone(),
                end: end.clone(),
                monomial: Monomial { coefficient: *coeff, class: self.actual(cone, c, m), exponent: *m },
            });
            start = Some(end);
        }
        segments.push(Segment {
            start,
            end: self.q.clone(),
            monomial: Monomial { coefficient: st.coeff, class: self.actual(self.q_cone, &st.class, &st.exp), exponent: st.exp },
        });
        self.out.push(BrokenLine { asymptotic: self.p, segments, endpoint: self.q.clone() });
    }

    fn walk(&mut self, st: State) -> Result<()> {
        let initial = st.at.is_none();
        let from = st.at.clone().unwrap_or_else(|| self.x0.clone());
        let cr = self.crossings(&from, &st.exp, initial);
        // Pieces between consecutive crossings (and the unbounded ends).
        let mut prev: Option<RatPoint> = st.at.clone();
        let mut reached_end = true;
        for (_, idx, x) in cr.iter() {
            if let Some(pt) = self.hit(prev.as_ref(), Some(x), &st.exp)? {
                self.record(&st, pt);
            }
            // Branch: bend here with a nontrivial term.
            let n_sign = self.halves[*idx].direction.cw_normal().dot(&st.exp);
            let kpow = n_sign.abs();
            let key = (*idx, kpow);
            if !self.powers.contains_key(&key) {
                let p = self.halves[*idx].f.pow(kpow, &self.grading);
                self.powers.insert(key, p);
            }
            let terms: Vec<_> = self.powers[&key].terms.iter().map(|(k, v)| (k.clone(), *v)).collect();
            for ((c, w), v) in terms {
                if w.is_zero() && c.is_zero() {
                    continue;
                }
                let class = &st.class + &c;
                if !self.grading.keeps(&class) {
                    continue;
                }
                let exp = st.exp + w;
                let cone = self.pair.fan().cone_after(x, &(-exp));
                let deg = self.pair.truncation_degree(self.trunc, &self.actual(cone, &class, &exp));
                if deg > self.trunc.max_degree {
                    continue;
                }
                let mut bends = st.bends.clone();
                bends.push((x.clone(), st.class.clone(), st.exp, st.coeff));
                let coeff = crate::lattice_fan::checked(st.coeff.checked_mul(v));
                self.walk(State { at: Some(x.clone()), class, exp, coeff, bends })?;
            }
            prev = Some(x.clone());
            // Stop if this straight continuation already violates the degree cutoff.
            let cone = self.pair.fan().cone_after(x, &(-st.exp));
            let deg = self.pair.truncation_degree(self.trunc, &self.actual(cone, &st.class, &st.exp));
            if deg > self.trunc.max_degree {
                reached_end = false;
                break;
            }
        }
        if reached_end {
            if let Some(pt) = self.hit(prev.as_ref(), None, &st.exp)? {
                self.record(&st, pt);
            }
        }
        Ok(())
    }
}

/// Every broken line for `p` ending at `Q` whose final class has degree at
/// most the cutoff.
pub fn enumerate_broken_lines(
    diagram: &ScatteringDiagram,
    p: LatticePoint,
    q_point: &RatPoint,
    trunc: &Truncation,
) -> Result<Vec<BrokenLine>> {
    let pair = diagram.pair();
    if p.is_zero() {
        return invalid("theta_0 = 1 has no broken lines");
    }
    check_generic(diagram, q_point)?;
    let max_order = pair.order_bound(trunc)?;
    if diagram.has_rays() && diagram.order() < max_order {
        return invalid(format!(
            "diagram is complete only to order {}, but the truncation needs order {max_order}",
            diagram.order()
        ));
    }
    let grading = diagram.grading(max_order);
    let fan = pair.fan();
    let p_cone = fan.locate_max(&p.to_rat());
    let class0 = -&pair.kink_function().on_cone(p_cone, &p);
    let mut e = Enumerator {
        pair,
        halves: diagram.half_walls(&grading),
        grading,
        trunc,
        q: q_point.clone(),
        q_cone: fan.locate_max(q_point),
        p: IntegralPointB::new(fan, p),
        x0: RatPoint::zero(),
        powers: HashMap::new(),
        out: vec![],
    };
    for sign in [1, -1] {
        e.x0 = RatPoint::new(q(-p.y * sign), q(p.x * sign));
        e.walk(State { at: None, class: class0.clone(), exp: p, coeff: 1, bends: vec![] })?;
    }
    let mut out = e.out;
    out.retain(|b| pair.truncation_degree(trunc, &b.final_monomial().class) <= trunc.max_degree);
    Ok(out)
}

/// Sum of the final monomials of all broken lines for `p` at `Q`.
pub fn theta_expansion(
    diagram: &ScatteringDiagram,
    p: LatticePoint,
    q_point: &RatPoint,
    trunc: &Truncation,
) -> Result<Vec<Monomial>> {
    if p.is_zero() {
        check_generic(diagram, q_point)?;
        let zero = diagram.pair().zero_class();
        return Ok(vec![Monomial { coefficient: 1, class: zero, exponent: p }]);
    }
    let lines = enumerate_broken_lines(diagram, p, q_point, trunc)?;
    let mut sum: BTreeMap<(CurveClass, LatticePoint), i64> = BTreeMap::new();
    for l in &lines {
        let m = l.final_monomial();
        *sum.entry((m.class.clone(), m.exponent)).or_insert(0) += m.coefficient;
    }
    let pair = diagram.pair();
    let mut out: Vec<Monomial> = sum
        .into_iter()
        .filter(|(_, v)| *v != 0)
        .map(|((class, exponent), coefficient)| Monomial { coefficient, class, exponent })
        .collect();
    out.sort_by_key(|m| (pair.degree(&m.class), m.exponent, m.class.clone()));
    Ok(out)
}

/// Which side of a special ray to place a point on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Ccw,
    Cw,
}

/// Large prime used as the denominator of generic perturbations.
const GENERIC_PRIME: i64 = 1009;

/// A generic point near `r`: `r` itself if it lies in the interior of a
/// chamber, otherwise `r` pushed slightly to the chosen side. No special
/// ray lies strictly between the angles of `r` and the returned point.
pub fn generic_point_near(diagram: &ScatteringDiagram, r: LatticePoint, side: Side, attempt: u32) -> RatPoint {
    let specials = special_directions(diagram);
    if r.is_zero() {
        return generic_point_in_gap(&specials, 0, attempt);
    }
    let rot = match side {
        Side::Ccw => LatticePoint::new(-r.y, r.x),
        Side::Cw => LatticePoint::new(r.y, -r.x),
    };
    let rr = r.to_rat();
    let mut delta = q(attempt as i64 + 1) / q(GENERIC_PRIME);
    loop {
        let cand = rr.add_scaled(&delta, &rot);
        // No special direction may lie in the half-open sector (r, cand].
        let blocked = specials.iter().any(|s| {
            let sr = s.to_rat();
            match side {
                Side::Ccw => rr.det(&sr).is_positive() && !sr.det(&cand).is_negative(),
                Side::Cw => sr.det(&rr).is_positive() && !cand.det(&sr).is_negative(),
            }
        });
        if !blocked {
            return cand;
        }
        delta /= q(GENERIC_PRIME);
    }
}

/// A generic point inside the `k`-th gap between consecutive special directions.
fn generic_point_in_gap(specials: &[LatticePoint], k: usize, attempt: u32) -> RatPoint {
    let n = specials.len();
    if n == 0 {
        return RatPoint::new(q(1), q(1) / q(GENERIC_PRIME));
    }
    let a = specials[k % n];
    let b = specials[(k + 1) % n];
    let t = q(1) / q(GENERIC_PRIME) * q(attempt as i64 + 1);
    // a + b lies strictly inside a gap of angle < pi; tilt it a little towards b.
    (a + b).to_rat().add_scaled(&t, &b)
}

/// A generic point strictly inside the maximal cone spanned by rays `i, i+1`.
pub fn generic_point_in_cone(diagram: &ScatteringDiagram, cone: usize, attempt: u32) -> RatPoint {
    let fan = diagram.pair().fan();
    let (a, b) = fan.cone_rays(cone);
    let (va, vb) = (fan.ray(a), fan.ray(b));
    let mut specials: Vec<LatticePoint> = special_directions(diagram)
        .into_iter()
        .filter(|d| va.det(d) >= 0 && d.det(&vb) >= 0)
        .collect();
    specials.sort_by(|s, t| 0.cmp(&s.det(t)));
    generic_point_in_gap(&specials, 0, attempt)
}

/// Retries `f` on successive generic points until none is degenerate.
pub(crate) fn with_generic<T>(mut point: impl FnMut(u32) -> RatPoint, mut f: impl FnMut(&RatPoint) -> Result<T>) -> Result<T> {
    let mut last = None;
    for attempt in 0..12 {
        match f(&point(attempt)) {
            Err(Error::NonGeneric(msg)) => last = Some(msg),
            other => return other,
        }
    }
    Err(Error::NonGeneric(last.unwrap_or_default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_class;

    fn setup() -> (LogCYSurfacePair, ScatteringDiagram) {
        let p = LogCYSurfacePair::preset("paper-example").unwrap();
        let d = ScatteringDiagram::initial(&p);
        (p, d)
    }

    #[test]
    fn figure_one_lines() {
        let (pair, d) = setup();
        let t = pair.truncation(9);
        let qp = generic_point_in_cone(&d, 1, 0);
        let l = LatticePoint::new;
        assert_eq!(enumerate_broken_lines(&d, l(-1, 0), &qp, &t).unwrap().len(), 1);
        let two = enumerate_broken_lines(&d, l(3, 2), &qp, &t).unwrap();
        let mut slopes: Vec<_> = two.iter().map(|b| b.final_slope()).collect();
        slopes.sort();
        assert_eq!(slopes, vec![l(-3, -2), l(-2, -1)]);
    }

    #[test]
    fn theta_p_expansion() {
        let (pair, d) = setup();
        let qp = generic_point_in_cone(&d, 1, 0);
        let got = theta_expansion(&d, LatticePoint::new(2, 1), &qp, &pair.truncation(6)).unwrap();
        let want = vec![
            Monomial { coefficient: 1, class: parse_class(&pair, "2L-E").unwrap(), exponent: LatticePoint::new(1, 0) },
            Monomial { coefficient: 1, class: parse_class(&pair, "2L").unwrap(), exponent: LatticePoint::new(2, 1) },
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn toric_lines_are_straight() {
        let pair = LogCYSurfacePair::preset("p2").unwrap();
        let d = ScatteringDiagram::initial(&pair);
        let qp = generic_point_in_cone(&d, 2, 0);
        let lines = enumerate_broken_lines(&d, LatticePoint::new(5, -3), &qp, &pair.truncation(10)).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].bends(), 0);
    }

    #[test]
    fn wall_point_is_rejected() {
        let (pair, d) = setup();
        let on_wall = RatPoint::new(q(2), q(2));
        let err = enumerate_broken_lines(&d, LatticePoint::new(1, 0), &on_wall, &pair.truncation(3)).unwrap_err();
        assert!(matches!(err, Error::NonGeneric(_)));
    }
}
