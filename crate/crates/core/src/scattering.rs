//! Canonical scattering diagrams in the toric-model chart.
//!
//! # Conventions
//!
//! Let `phi` be the class-valued PL function with bend `kappa_v` across each
//! fan ray ([`crate::lattice_fan::KinkFunction`]). A monomial `z^A x^m` sitting
//! at a point of cone `sigma` is stored *normalized* as `z^(A - phi_sigma(m)) x^m`.
//! In normalized form the fan rays become invisible: crossing a ray changes
//! the actual class by exactly the kink contribution and the normalized class
//! not at all. Only walls act on normalized monomials.
//!
//! A wall has a primitive direction `d` and a function whose exponents are
//! negative multiples of `d`. Wall classes are reported as the actual classes
//! on the half with direction `d`. A blowup `E` on the divisor with ray `v`
//! contributes the full line `R v` with term `z^(C - E) x^v` at the half
//! `-v`, where `C - E` is the class of the curve through the blown-up point
//! meeting the boundary at `-v`. For the blowup of `P^2` on `D_1` that is
//! `1 + z^(L-E) x^(-1,-1)` on the half through `(1,1)`.
//!
//! Crossing a wall multiplies `x^m` by `f^<n,m>` where `n` is the primitive
//! normal of the wall that is positive on the side being left.
//!
//! Orders: the order of a normalized class is minus the sum of its `E`
//! coefficients. Wall terms have positive order, and completion works one
//! order at a time.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::lattice_fan::{angle_cmp, LatticePoint};
use crate::pair::{CurveClass, LogCYSurfacePair, Truncation};
use crate::series::{Grading, Series};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    Line,
    Ray,
}

/// `1 + sum c z^A x^m` with actual classes on the wall's `d` half.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WallFunction {
    pub terms: BTreeMap<(CurveClass, LatticePoint), i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub support: Support,
    pub direction: LatticePoint,
    pub function: WallFunction,
}

/// A wall half as seen by path-ordered products: a ray from the origin
/// carrying a normalized function.
#[derive(Clone, Debug)]
pub(crate) struct HalfWall {
    pub direction: LatticePoint,
    pub f: Series,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScatteringDiagram {
    pair: LogCYSurfacePair,
    walls: Vec<Wall>,
    /// Order up to which ray functions are known. Lines are exact.
    order: i64,
}

/// The first term of a failed loop check: the wall that would cancel it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailingTerm {
    pub order: i64,
    pub direction: LatticePoint,
    pub exponent: LatticePoint,
    pub class: CurveClass,
    pub coefficient: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub first_failure: Option<FailingTerm>,
}

impl ScatteringDiagram {
    /// One line per blowup; no rays.
    pub fn initial(pair: &LogCYSurfacePair) -> Self {
        let fan = pair.fan();
        let mut walls = Vec::new();
        for (j, b) in pair.blowups().iter().enumerate() {
            let v = fan.ray(b.ray);
            let normalized = &(-&pair.exceptional(j)) - &pair.kink_function().on_cone(fan.locate_max(&v.to_rat()), &v);
            let mut f = Series::default();
            f.add_term(normalized, v, 1);
            walls.push(Wall { support: Support::Line, direction: -v, function: WallFunction::default() });
            let w = walls.last_mut().unwrap();
            w.function = actual_function(pair, w.direction, &f);
        }
        let mut d = ScatteringDiagram { pair: pair.clone(), walls, order: 0 };
        d.sort();
        d
    }

    pub fn pair(&self) -> &LogCYSurfacePair {
        &self.pair
    }

    pub fn walls(&self) -> &[Wall] {
        &self.walls
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn has_rays(&self) -> bool {
        self.walls.iter().any(|w| w.support == Support::Ray)
    }

    fn sort(&mut self) {
        self.walls.sort_by(|a, b| {
            a.support
                .cmp(&b.support)
                .then_with(|| angle_cmp(&a.direction, &b.direction))
                .then_with(|| a.function.terms.iter().cmp(b.function.terms.iter()))
        });
    }

    pub(crate) fn grading(&self, max_order: i64) -> Grading {
        Grading { toric_rank: self.pair.toric_rank(), max_order }
    }

    /// Normalized function of a wall.
    pub(crate) fn normalized(&self, w: &Wall) -> Series {
        let fan = self.pair.fan();
        let i = fan.locate_max(&w.direction.to_rat());
        let mut s = Series::one(self.pair.class_len());
        for ((c, m), v) in &w.function.terms {
            s.add_term(c - &self.pair.kink_function().on_cone(i, m), *m, *v);
        }
        s
    }

    /// All wall halves, merged by direction, in counterclockwise order.
    pub(crate) fn half_walls(&self, g: &Grading) -> Vec<HalfWall> {
        let mut by_dir: Vec<HalfWall> = Vec::new();
        for w in &self.walls {
            let f = self.normalized(w);
            let dirs = match w.support {
                Support::Line => vec![w.direction, -w.direction],
                Support::Ray => vec![w.direction],
            };
            for d in dirs {
                match by_dir.iter_mut().find(|h| h.direction == d) {
                    Some(h) => h.f = h.f.mul(&f, g),
                    None => by_dir.push(HalfWall { direction: d, f: f.clone() }),
                }
            }
        }
        by_dir.sort_by(|a, b| angle_cmp(&a.direction, &b.direction));
        by_dir
    }

    /// The order needed so that every term of class degree up to the cutoff is present.
    pub fn required_order(pair: &LogCYSurfacePair, trunc: &Truncation) -> Result<i64> {
        pair.order_bound(trunc)
    }

    /// Completes the diagram with rays so that the loop around the origin is
    /// the identity up to the order required by `trunc`.
    pub fn complete(&self, trunc: &Truncation) -> Result<Self> {
        self.complete_to_order(Self::required_order(&self.pair, trunc)?)
    }

    pub fn complete_to_order(&self, max_order: i64) -> Result<Self> {
        let mut d = self.clone();
        for k in 1..=max_order {
            let g = d.grading(k);
            let corrections = d.loop_discrepancy(&g, None);
            for (exp, class, coefficient) in corrections {
                let dir = (-exp).primitive();
                let actual = &class + &d.pair.kink_function().on_cone(d.pair.fan().locate_max(&dir.to_rat()), &exp);
                match d.walls.iter_mut().find(|w| w.support == Support::Ray && w.direction == dir) {
                    Some(w) => {
                        let e = w.function.terms.entry((actual, exp)).or_insert(0);
                        *e += coefficient;
                        if *e == 0 {
                            w.function.terms.retain(|_, v| *v != 0);
                        }
                    }
                    None => {
                        let mut f = WallFunction::default();
                        f.terms.insert((actual, exp), coefficient);
                        d.walls.push(Wall { support: Support::Ray, direction: dir, function: f });
                    }
                }
            }
            d.walls.retain(|w| !w.function.terms.is_empty());
            d.sort();
        }
        d.order = d.order.max(max_order);
        Ok(d)
    }

    /// Order-`g.max_order` terms of the loop composite, as the ray terms
    /// `(exponent, normalized class, coefficient)` that would cancel them.
    /// Lower orders are assumed to vanish already.
    fn loop_discrepancy(&self, g: &Grading, base: Option<LatticePoint>) -> Vec<(LatticePoint, CurveClass, i64)> {
        let halves = self.half_walls(g);
        let start = match base {
            Some(b) => halves.iter().position(|h| angle_cmp(&h.direction, &b).is_gt()).unwrap_or(0),
            None => 0,
        };
        let len = self.pair.class_len();
        let zero = CurveClass::zeros(len);
        let mut disc: BTreeMap<(LatticePoint, CurveClass), [i64; 2]> = BTreeMap::new();
        for (i, e) in [LatticePoint::new(1, 0), LatticePoint::new(0, 1)].into_iter().enumerate() {
            let mut s = Series::monomial(zero.clone(), e, 1);
            for h in halves[start..].iter().chain(&halves[..start]) {
                s = apply_crossing(&s, &h.f, h.direction.cw_normal(), g);
            }
            for ((c, m), v) in s.terms {
                let w = m - e;
                if w.is_zero() && c.is_zero() {
                    assert_eq!(v, 1, "loop composite lost its leading term");
                    continue;
                }
                let o = g.order(&c);
                assert!(o >= g.max_order, "loop composite is not the identity below order {}", g.max_order);
                disc.entry((w, c)).or_insert([0, 0])[i] = v;
            }
        }
        let mut out = Vec::new();
        for ((w, c), [c1, c2]) in disc {
            assert!(!w.is_zero(), "loop discrepancy with zero exponent");
            let n = (-w).primitive().cw_normal();
            // Crossing the new ray contributes a * <n, e_i>; it must cancel c_i.
            let (num, den) = if n.x != 0 { (-c1, n.x) } else { (-c2, n.y) };
            assert!(num % den == 0, "non-integral scattering coefficient");
            let a = num / den;
            assert!(c1 + a * n.x == 0 && c2 + a * n.y == 0, "loop discrepancy is not a wall term");
            out.push((w, c, a));
        }
        out
    }

    /// Composes the crossings along a counterclockwise loop starting just
    /// after `loop_base` and compares with the identity up to `max_order`.
    pub fn check_consistency(&self, loop_base: Option<LatticePoint>, max_order: i64) -> ConsistencyReport {
        for k in 1..=max_order {
            let g = self.grading(k);
            let disc = self.loop_discrepancy(&g, loop_base);
            if let Some((w, c, a)) = disc.into_iter().next() {
                let dir = (-w).primitive();
                let actual = &c + &self.pair.kink_function().on_cone(self.pair.fan().locate_max(&dir.to_rat()), &w);
                return ConsistencyReport {
                    consistent: false,
                    first_failure: Some(FailingTerm { order: k, direction: dir, exponent: w, class: actual, coefficient: a }),
                };
            }
        }
        ConsistencyReport { consistent: true, first_failure: None }
    }

    pub fn to_json(&self) -> String {
        let file = DiagramFile {
            order: self.order,
            walls: self
                .walls
                .iter()
                .map(|w| {
                    let mut terms: Vec<TermFile> = w
                        .function
                        .terms
                        .iter()
                        .map(|((c, m), v)| TermFile { class: c.clone(), exponent: *m, coefficient: *v })
                        .collect();
                    terms.sort_by_key(|t| (self.pair.degree(&t.class), angle_key(t.exponent), t.class.clone()));
                    WallFile { support: w.support, direction: w.direction, terms }
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("diagram serializes");
        s.push('\n');
        s
    }

    pub fn from_json(pair: &LogCYSurfacePair, s: &str) -> Result<Self> {
        let file: DiagramFile = serde_json::from_str(s)?;
        let mut walls = Vec::new();
        for w in file.walls {
            if !w.direction.is_primitive() {
                return invalid(format!("wall direction {} is not primitive", w.direction));
            }
            let mut f = WallFunction::default();
            for t in w.terms {
                if t.class.len() != pair.class_len() {
                    return invalid("wall term class has the wrong length");
                }
                if t.exponent.det(&w.direction) != 0 || t.exponent.dot(&w.direction) >= 0 {
                    return invalid(format!("exponent {} is not a negative multiple of {}", t.exponent, w.direction));
                }
                f.terms.insert((t.class, t.exponent), t.coefficient);
            }
            walls.push(Wall { support: w.support, direction: w.direction, function: f });
        }
        let mut d = ScatteringDiagram { pair: pair.clone(), walls, order: file.order };
        d.sort();
        Ok(d)
    }
}

fn angle_key(m: LatticePoint) -> (i64, i64) {
    (m.x.abs() + m.y.abs(), m.x)
}

/// Actual-class form on the `d` half of a normalized function.
fn actual_function(pair: &LogCYSurfacePair, d: LatticePoint, f: &Series) -> WallFunction {
    let i = pair.fan().locate_max(&d.to_rat());
    let mut out = WallFunction::default();
    for ((c, m), v) in &f.terms {
        if m.is_zero() {
            continue;
        }
        out.terms.insert((c + &pair.kink_function().on_cone(i, m), *m), *v);
    }
    out
}

/// `x^m -> x^m f^<n,m>` applied to every term of `s`.
pub(crate) fn apply_crossing(s: &Series, f: &Series, n: LatticePoint, g: &Grading) -> Series {
    let mut powers: BTreeMap<i64, Series> = BTreeMap::new();
    let mut out = Series::default();
    for ((c, m), v) in &s.terms {
        let k = n.dot(m);
        let p = powers.entry(k).or_insert_with(|| f.pow(k, g));
        let mut t = p.shift(c, *m);
        t.terms.retain(|(c, _), _| g.keeps(c));
        for ((c2, m2), v2) in t.terms {
            out.add_term(c2, m2, v * v2);
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramFile {
    order: i64,
    walls: Vec<WallFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WallFile {
    support: Support,
    direction: LatticePoint,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    class: CurveClass,
    exponent: LatticePoint,
    coefficient: i64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: &[i64]) -> CurveClass {
        CurveClass::new(v.to_vec())
    }

    #[test]
    fn preset_line() {
        let p = LogCYSurfacePair::preset("paper-example").unwrap();
        let d = ScatteringDiagram::initial(&p);
        assert_eq!(d.walls().len(), 1);
        let w = &d.walls()[0];
        assert_eq!(w.support, Support::Line);
        assert_eq!(w.direction, LatticePoint::new(1, 1));
        let terms: Vec<_> = w.function.terms.iter().collect();
        assert_eq!(terms, vec![(&(c(&[1, -1]), LatticePoint::new(-1, -1)), &1)]);
        let done = d.complete_to_order(6).unwrap();
        assert_eq!(done.walls(), d.walls());
        assert!(done.check_consistency(None, 6).consistent);
    }

    #[test]
    fn toric_is_empty() {
        let p = LogCYSurfacePair::preset("p2").unwrap();
        let d = ScatteringDiagram::initial(&p);
        assert!(d.walls().is_empty());
        assert!(d.complete_to_order(3).unwrap().walls().is_empty());
    }

    #[test]
    fn two_blowups_scatter() {
        let p = LogCYSurfacePair::preset("two-blowup").unwrap();
        let d = ScatteringDiagram::initial(&p);
        let r = d.check_consistency(None, 2);
        assert!(!r.consistent);
        let f = r.first_failure.unwrap();
        assert_eq!(f.direction, LatticePoint::new(-1, -1));
        assert_eq!(f.exponent, LatticePoint::new(1, 1));
        assert_eq!(f.class, c(&[1, 1, -1, -1]));
        assert_eq!(f.coefficient, 1);
        let done = d.complete_to_order(4).unwrap();
        assert_eq!(done.walls().len(), 3);
        assert!(done.check_consistency(None, 4).consistent);
        assert!(done.check_consistency(Some(LatticePoint::new(-3, 1)), 4).consistent);
        assert_eq!(done.complete_to_order(4).unwrap(), done);
        let back = ScatteringDiagram::from_json(&p, &done.to_json()).unwrap();
        assert_eq!(back, done);
    }
}
