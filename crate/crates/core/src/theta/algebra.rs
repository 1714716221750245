//! The mirror algebra `R = (+)_p theta_p S`: structure constants from pairs of
//! broken lines, the product, and the identity checkers built on it.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{generic_point_near, theta_expansion, with_generic, Monomial, Side};
use crate::lattice_fan::{checked, IntegralPointB, LatticePoint, RatPoint};
use crate::pair::{CurveClass, LogCYSurfacePair, SignedPoint, Truncation};
use crate::scattering::ScatteringDiagram;
use crate::{Result, Q};

/// A finite sum `sum c_{p,A} z^A theta_p`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThetaElement {
    pub coeffs: BTreeMap<IntegralPointB, BTreeMap<CurveClass, i64>>,
}

impl ThetaElement {
    pub fn theta(pair: &LogCYSurfacePair, p: LatticePoint) -> Self {
        let mut e = ThetaElement::default();
        e.add(IntegralPointB::new(pair.fan(), p), pair.zero_class(), 1);
        e
    }

    pub fn add(&mut self, p: IntegralPointB, c: CurveClass, v: i64) {
        if v == 0 {
            return;
        }
        let inner = self.coeffs.entry(p).or_default();
        let e = inner.entry(c.clone()).or_insert(0);
        *e = checked(e.checked_add(v));
        if *e == 0 {
            inner.remove(&c);
            if inner.is_empty() {
                self.coeffs.remove(&p);
            }
        }
    }

    /// Coefficient of `z^A theta_r`.
    pub fn get(&self, r: LatticePoint, a: &CurveClass) -> i64 {
        self.coeffs
            .iter()
            .find(|(p, _)| p.vector == r)
            .and_then(|(_, m)| m.get(a).copied())
            .unwrap_or(0)
    }

    /// All `z^A` coefficients of `theta_r`.
    pub fn at(&self, r: LatticePoint) -> BTreeMap<CurveClass, i64> {
        self.coeffs.iter().find(|(p, _)| p.vector == r).map(|(_, m)| m.clone()).unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Text in the form `z^L theta_0 + z^(L-E) theta_(D1)`.
    pub fn display(&self, pair: &LogCYSurfacePair) -> String {
        let mut parts = Vec::new();
        for (p, m) in &self.coeffs {
            for (c, v) in m {
                let z = if c.is_zero() { String::new() } else { format!("z^{{{}}} ", crate::notation::format_class(pair, c)) };
                let coeff = match *v {
                    1 => String::new(),
                    -1 => "-".to_string(),
                    v => format!("{v} "),
                };
                let th = format!("ϑ_{{{}}}", crate::notation::format_point(pair, &p.vector));
                parts.push(format!("{coeff}{z}{th}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ").replace("+ -", "- ")
        }
    }
}

/// One nonzero entry `N_{p,q,r}^A` of an exported table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableRow {
    pub p: LatticePoint,
    pub q: LatticePoint,
    pub r: LatticePoint,
    pub class: CurveClass,
    pub n: i64,
}

/// Reads back the output of [`MirrorAlgebra::table_json`].
pub fn parse_table(s: &str) -> Result<Vec<TableRow>> {
    Ok(serde_json::from_str(s)?)
}

/// Both sides of the associativity identity for one `(r, A)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssociativityReport {
    pub holds: bool,
    /// `theta_p1 (theta_p2 theta_p3)` coefficient.
    pub lhs: i64,
    /// `(theta_p1 theta_p2) theta_p3` coefficient.
    pub rhs: i64,
}

type ThetaKey = (LatticePoint, RatPoint);

/// Structure constants of one pair below a degree cutoff, with caches.
///
/// Safe to share between threads; caches sit behind mutexes.
pub struct MirrorAlgebra {
    diagram: ScatteringDiagram,
    trunc: Truncation,
    classes: Vec<CurveClass>,
    thetas: Mutex<HashMap<ThetaKey, Arc<Vec<Monomial>>>>,
    products: Mutex<HashMap<(LatticePoint, LatticePoint), Arc<ThetaElement>>>,
}

impl MirrorAlgebra {
    /// Completes the canonical diagram of `pair` to the order the cutoff needs.
    pub fn new(pair: &LogCYSurfacePair, max_degree: i64) -> Result<Self> {
        let trunc = pair.truncation(max_degree);
        let diagram = ScatteringDiagram::initial(pair).complete(&trunc)?;
        Self::with_diagram(diagram, trunc)
    }

    pub fn with_diagram(diagram: ScatteringDiagram, trunc: Truncation) -> Result<Self> {
        let classes = diagram.pair().effective_classes_up_to(&trunc)?;
        Ok(MirrorAlgebra {
            diagram,
            trunc,
            classes,
            thetas: Mutex::new(HashMap::new()),
            products: Mutex::new(HashMap::new()),
        })
    }

    pub fn pair(&self) -> &LogCYSurfacePair {
        self.diagram.pair()
    }

    pub fn diagram(&self) -> &ScatteringDiagram {
        &self.diagram
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    /// Effective classes below the cutoff.
    pub fn classes(&self) -> &[CurveClass] {
        &self.classes
    }

    fn within(&self, c: &CurveClass) -> bool {
        self.pair().truncation_degree(&self.trunc, c) <= self.trunc.max_degree
    }

    /// `theta_p(Q)`, cached.
    pub fn theta_at(&self, p: LatticePoint, q: &RatPoint) -> Result<Arc<Vec<Monomial>>> {
        let key = (p, q.clone());
        if let Some(v) = self.thetas.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = Arc::new(theta_expansion(&self.diagram, p, q, &self.trunc)?);
        self.thetas.lock().unwrap().insert(key, v.clone());
        Ok(v)
    }

    /// `z^A` coefficients of `x^r` in `theta_p(Q) theta_q(Q)`.
    pub fn product_coefficient_at(&self, p: LatticePoint, q: LatticePoint, r: LatticePoint, pt: &RatPoint) -> Result<BTreeMap<CurveClass, i64>> {
        let tp = self.theta_at(p, pt)?;
        let tq = self.theta_at(q, pt)?;
        let mut out: BTreeMap<CurveClass, i64> = BTreeMap::new();
        for a in tp.iter() {
            for b in tq.iter().filter(|b| a.exponent + b.exponent == r) {
                let c = &a.class + &b.class;
                if self.within(&c) {
                    let e = out.entry(c).or_insert(0);
                    *e = checked(e.checked_add(checked(a.coefficient.checked_mul(b.coefficient))));
                }
            }
        }
        out.retain(|_, v| *v != 0);
        Ok(out)
    }

    /// `N_{p,q,r}^A` for every `A`, computed at a generic point next to `r`
    /// on the given side.
    pub fn structure_constant_near(&self, p: LatticePoint, q: LatticePoint, r: LatticePoint, side: Side) -> Result<BTreeMap<CurveClass, i64>> {
        with_generic(|a| generic_point_near(&self.diagram, r, side, a), |pt| self.product_coefficient_at(p, q, r, pt))
    }

    /// Outputs `r` allowed by balancing for some class below the cutoff.
    pub fn candidate_outputs(&self, p: LatticePoint, q: LatticePoint) -> BTreeSet<LatticePoint> {
        let pair = self.pair();
        self.classes
            .iter()
            .flat_map(|a| pair.admissible_outputs(a, &[p, q]))
            .map(|s| s.vector)
            .collect()
    }

    /// `theta_p theta_q` as a sum `sum_{r,A} N_{p,q,r}^A z^A theta_r`.
    pub fn structure_constants(&self, p: LatticePoint, q: LatticePoint) -> Result<Arc<ThetaElement>> {
        let key = if p <= q { (p, q) } else { (q, p) };
        if let Some(v) = self.products.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let pair = self.pair();
        let mut e = ThetaElement::default();
        if p.is_zero() || q.is_zero() {
            e.add(IntegralPointB::new(pair.fan(), p + q), pair.zero_class(), 1);
        } else {
            for r in self.candidate_outputs(p, q) {
                for (c, v) in self.structure_constant_near(key.0, key.1, r, Side::Ccw)? {
                    debug_assert!(pair.balancing_check(&c, &[SignedPoint::pos(p), SignedPoint::pos(q), SignedPoint::neg(r)]));
                    e.add(IntegralPointB::new(pair.fan(), r), c, v);
                }
            }
        }
        let e = Arc::new(e);
        self.products.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    /// `N_{p,q,r}^A` for every `A` below the cutoff.
    pub fn n(&self, p: LatticePoint, q: LatticePoint, r: LatticePoint) -> Result<BTreeMap<CurveClass, i64>> {
        Ok(self.structure_constants(p, q)?.at(r))
    }

    pub fn theta(&self, p: LatticePoint) -> ThetaElement {
        ThetaElement::theta(self.pair(), p)
    }

    /// Bilinear extension of the structure constants, truncated.
    pub fn multiply(&self, a: &ThetaElement, b: &ThetaElement) -> Result<ThetaElement> {
        let mut out = ThetaElement::default();
        for (p, ca) in &a.coeffs {
            for (q, cb) in &b.coeffs {
                let prod = self.structure_constants(p.vector, q.vector)?;
                for (r, cr) in &prod.coeffs {
                    for (x, vx) in ca {
                        for (y, vy) in cb {
                            let xy = x + y;
                            if !self.within(&xy) {
                                continue;
                            }
                            for (z, vz) in cr {
                                let c = &xy + z;
                                if self.within(&c) {
                                    out.add(*r, c, checked(vx.checked_mul(*vy).and_then(|t| t.checked_mul(*vz))));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Product of several thetas, nested from the left.
    pub fn product_left(&self, ps: &[LatticePoint]) -> Result<ThetaElement> {
        let mut acc = self.theta(ps[0]);
        for p in &ps[1..] {
            acc = self.multiply(&acc, &self.theta(*p))?;
        }
        Ok(acc)
    }

    /// Product of several thetas, nested from the right.
    pub fn product_right(&self, ps: &[LatticePoint]) -> Result<ThetaElement> {
        let mut acc = self.theta(*ps.last().expect("at least one factor"));
        for p in ps[..ps.len() - 1].iter().rev() {
            acc = self.multiply(&self.theta(*p), &acc)?;
        }
        Ok(acc)
    }

    /// Compares the `z^A theta_r` coefficients of both bracketings of a triple product.
    pub fn check_associativity(&self, p1: LatticePoint, p2: LatticePoint, p3: LatticePoint, r: LatticePoint, a: &CurveClass) -> Result<AssociativityReport> {
        let inner = self.multiply(&self.theta(p2), &self.theta(p3))?;
        let lhs = self.multiply(&self.theta(p1), &inner)?.get(r, a);
        let outer = self.multiply(&self.theta(p1), &self.theta(p2))?;
        let rhs = self.multiply(&outer, &self.theta(p3))?.get(r, a);
        Ok(AssociativityReport { holds: lhs == rhs, lhs, rhs })
    }

    /// Whole-product associativity of a triple; returns the first mismatch.
    pub fn associativity_mismatch(&self, p1: LatticePoint, p2: LatticePoint, p3: LatticePoint) -> Result<Option<(LatticePoint, CurveClass, i64, i64)>> {
        let left = self.product_right(&[p1, p2, p3])?;
        let right = self.product_left(&[p1, p2, p3])?;
        let keys: BTreeSet<(LatticePoint, CurveClass)> = left
            .coeffs
            .iter()
            .chain(&right.coeffs)
            .flat_map(|(p, m)| m.keys().map(move |c| (p.vector, c.clone())))
            .collect();
        for (r, c) in keys {
            let (l, rr) = (left.get(r, &c), right.get(r, &c));
            if l != rr {
                return Ok(Some((r, c, l, rr)));
            }
        }
        Ok(None)
    }

    /// The `z^A theta_0` coefficient of `theta_p1 ... theta_pk`, nested from
    /// the left and from the right.
    pub fn iterated_theta0_coefficient(&self, ps: &[LatticePoint], a: &CurveClass) -> Result<(i64, i64)> {
        assert!(ps.len() >= 2, "need at least two factors");
        let l = self.product_left(ps)?.get(LatticePoint::ZERO, a);
        let r = self.product_right(ps)?.get(LatticePoint::ZERO, a);
        Ok((l, r))
    }

    /// Table rows `(p, q, r, A, N)` for all pairs from `points`, as JSON.
    pub fn table_json(&self, points: &[LatticePoint]) -> Result<String> {
        let mut rows = Vec::new();
        for (i, p) in points.iter().enumerate() {
            for q in &points[i..] {
                for (r, m) in &self.structure_constants(*p, *q)?.coeffs {
                    for (c, v) in m {
                        rows.push(TableRow { p: *p, q: *q, r: r.vector, class: c.clone(), n: *v });
                    }
                }
            }
        }
        let mut s = serde_json::to_string_pretty(&rows)?;
        s.push('\n');
        Ok(s)
    }

    pub fn max_degree(&self) -> &Q {
        &self.trunc.max_degree
    }
}
