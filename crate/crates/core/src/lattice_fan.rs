//! Rank-2 lattices, complete fans and piecewise-linear functions on them.
//!
//! Lattice vectors use `i64` with overflow-checked arithmetic; anything that
//! can become fractional (cone coordinates, PL values, positions of broken
//! line breakpoints) is a [`Q`]. A fan is stored as its rays in
//! counterclockwise order, and maximal cone `i` is spanned by rays `i` and
//! `i + 1 (mod n)`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::pair::CurveClass;
use crate::{q, Result, Q};

/// A vector of the lattice `Z^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl From<[i64; 2]> for LatticePoint {
    fn from(a: [i64; 2]) -> Self {
        LatticePoint::new(a[0], a[1])
    }
}

impl From<LatticePoint> for [i64; 2] {
    fn from(p: LatticePoint) -> Self {
        [p.x, p.y]
    }
}

impl LatticePoint {
    pub const ZERO: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticePoint { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn gcd(&self) -> i64 {
        self.x.gcd(&self.y)
    }

    pub fn is_primitive(&self) -> bool {
        self.gcd() == 1
    }

    /// The primitive vector on the same ray. Panics on zero.
    pub fn primitive(&self) -> LatticePoint {
        let g = self.gcd();
        assert!(g != 0, "zero vector has no primitive direction");
        LatticePoint::new(self.x / g, self.y / g)
    }

    pub fn dot(&self, o: &LatticePoint) -> i64 {
        checked(self.x.checked_mul(o.x).and_then(|a| a.checked_add(self.y.checked_mul(o.y)?)))
    }

    /// `det(self, o)`, positive when `o` is counterclockwise of `self`.
    pub fn det(&self, o: &LatticePoint) -> i64 {
        checked(self.x.checked_mul(o.y).and_then(|a| a.checked_sub(self.y.checked_mul(o.x)?)))
    }

    pub fn scale(&self, k: i64) -> LatticePoint {
        LatticePoint::new(checked(self.x.checked_mul(k)), checked(self.y.checked_mul(k)))
    }

    /// The primitive normal of a ray direction that is positive on the
    /// clockwise side, i.e. on the cone one leaves when crossing the ray
    /// counterclockwise. Used both by the kink function and by wall crossing.
    pub fn cw_normal(&self) -> LatticePoint {
        LatticePoint::new(self.y, -self.x)
    }

    pub fn to_rat(&self) -> RatPoint {
        RatPoint::new(q(self.x), q(self.y))
    }
}

pub(crate) fn checked(v: Option<i64>) -> i64 {
    v.expect("integer overflow in exact lattice arithmetic")
}

impl std::ops::Add for LatticePoint {
    type Output = LatticePoint;
    fn add(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(checked(self.x.checked_add(o.x)), checked(self.y.checked_add(o.y)))
    }
}

impl std::ops::Sub for LatticePoint {
    type Output = LatticePoint;
    fn sub(self, o: LatticePoint) -> LatticePoint {
        LatticePoint::new(checked(self.x.checked_sub(o.x)), checked(self.y.checked_sub(o.y)))
    }
}

impl std::ops::Neg for LatticePoint {
    type Output = LatticePoint;
    fn neg(self) -> LatticePoint {
        LatticePoint::new(-self.x, -self.y)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// A point of `R^2` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoint {
    pub x: Q,
    pub y: Q,
}

impl RatPoint {
    pub fn new(x: Q, y: Q) -> Self {
        RatPoint { x, y }
    }

    pub fn zero() -> Self {
        RatPoint::new(Q::zero(), Q::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn det(&self, o: &RatPoint) -> Q {
        &self.x * &o.y - &self.y * &o.x
    }

    pub fn det_lat(&self, v: &LatticePoint) -> Q {
        &self.x * q(v.y) - &self.y * q(v.x)
    }

    pub fn dot_lat(&self, v: &LatticePoint) -> Q {
        &self.x * q(v.x) + &self.y * q(v.y)
    }

    pub fn add_scaled(&self, t: &Q, v: &LatticePoint) -> RatPoint {
        RatPoint::new(&self.x + t * q(v.x), &self.y + t * q(v.y))
    }

    pub fn scale(&self, t: &Q) -> RatPoint {
        RatPoint::new(&self.x * t, &self.y * t)
    }

    pub fn add(&self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x + &o.x, &self.y + &o.y)
    }

    pub fn sub(&self, o: &RatPoint) -> RatPoint {
        RatPoint::new(&self.x - &o.x, &self.y - &o.y)
    }

    /// The lattice point, if both coordinates are integers.
    pub fn to_lattice(&self) -> Option<LatticePoint> {
        if self.x.is_integer() && self.y.is_integer() {
            let x = self.x.to_integer().try_into().ok()?;
            let y = self.y.to_integer().try_into().ok()?;
            Some(LatticePoint::new(x, y))
        } else {
            None
        }
    }

    /// Whether the point lies on the open ray spanned by `d`.
    pub fn on_ray(&self, d: &LatticePoint) -> bool {
        self.det_lat(d).is_zero() && self.dot_lat(d).is_positive()
    }
}

impl fmt::Display for RatPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Total order on nonzero directions by counterclockwise angle from `(1,0)`.
pub fn angle_cmp(a: &LatticePoint, b: &LatticePoint) -> Ordering {
    fn half(v: &LatticePoint) -> u8 {
        if v.y > 0 || (v.y == 0 && v.x > 0) {
            0
        } else {
            1
        }
    }
    half(a).cmp(&half(b)).then_with(|| 0.cmp(&a.det(b)))
}

/// A cone of a complete fan: the origin, a ray, or a maximal cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeId {
    Origin,
    Ray(usize),
    Cone(usize),
}

/// A complete fan in `R^2` with per-ray kinks and lattice refinement factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeComplex {
    rays: Vec<LatticePoint>,
    kinks: Vec<CurveClass>,
    lattice_scale: Vec<u64>,
}

impl ConeComplex {
    /// Builds a complete fan from rays listed counterclockwise.
    ///
    /// Kinks may be empty, in which case every ray gets the empty class (the
    /// fan is then used without any curve-class bookkeeping).
    pub fn new(rays: Vec<LatticePoint>, kinks: Vec<CurveClass>) -> Result<Self> {
        let n = rays.len();
        if n < 3 {
            return invalid(format!("a complete fan needs at least 3 rays, got {n}"));
        }
        for r in &rays {
            if !r.is_primitive() {
                return invalid(format!("ray {r} is not primitive"));
            }
        }
        let mut wraps = 0;
        for i in 0..n {
            let (a, b) = (&rays[i], &rays[(i + 1) % n]);
            if a.det(b) <= 0 {
                return invalid(format!("rays {a} and {b} do not span a strongly convex cone counterclockwise"));
            }
            if angle_cmp(b, a) != Ordering::Greater {
                wraps += 1;
            }
        }
        if wraps != 1 {
            return invalid("rays must be listed counterclockwise and wind around the origin exactly once");
        }
        let kinks = if kinks.is_empty() { vec![CurveClass::new(vec![]); n] } else { kinks };
        if kinks.len() != n {
            return invalid("one kink per ray is required");
        }
        Ok(ConeComplex { rays, kinks, lattice_scale: vec![1; n] })
    }

    pub fn rays(&self) -> &[LatticePoint] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> LatticePoint {
        self.rays[i]
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn kinks(&self) -> &[CurveClass] {
        &self.kinks
    }

    pub fn set_kink(&mut self, ray: usize, kink: CurveClass) {
        self.kinks[ray] = kink;
    }

    pub fn lattice_scale(&self) -> &[u64] {
        &self.lattice_scale
    }

    /// Ray indices of maximal cone `i`.
    pub fn cone_rays(&self, i: usize) -> (usize, usize) {
        (i, (i + 1) % self.rays.len())
    }

    pub fn ray_index(&self, v: &LatticePoint) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// Generators of a cone, in counterclockwise order.
    pub fn generators(&self, c: ConeId) -> Vec<LatticePoint> {
        match c {
            ConeId::Origin => vec![],
            ConeId::Ray(i) => vec![self.rays[i]],
            ConeId::Cone(i) => {
                let (a, b) = self.cone_rays(i);
                vec![self.rays[a], self.rays[b]]
            }
        }
    }

    /// Ray indices of a cone.
    pub fn cone_ray_indices(&self, c: ConeId) -> Vec<usize> {
        match c {
            ConeId::Origin => vec![],
            ConeId::Ray(i) => vec![i],
            ConeId::Cone(i) => {
                let (a, b) = self.cone_rays(i);
                vec![a, b]
            }
        }
    }

    /// Whether `face` is a face of `c` (every cone is a face of itself).
    pub fn is_face(&self, face: ConeId, c: ConeId) -> bool {
        let f = self.cone_ray_indices(face);
        let g = self.cone_ray_indices(c);
        f.iter().all(|i| g.contains(i))
    }

    /// A maximal cone containing the rational point `v`.
    pub fn locate_max(&self, v: &RatPoint) -> usize {
        (0..self.rays.len())
            .find(|&i| {
                let (a, b) = self.cone_rays(i);
                !v.det_lat(&self.rays[a]).is_positive() && !v.det_lat(&self.rays[b]).is_negative()
            })
            .expect("complete fan covers the plane")
    }

    /// The smallest cone containing `v`.
    pub fn minimal_cone(&self, v: &RatPoint) -> ConeId {
        if v.is_zero() {
            return ConeId::Origin;
        }
        if let Some(i) = (0..self.rays.len()).find(|&i| v.on_ray(&self.rays[i])) {
            return ConeId::Ray(i);
        }
        ConeId::Cone(self.locate_max(v))
    }

    /// Coordinates of `v` in the generators of maximal cone `i`.
    pub fn cone_coords(&self, i: usize, v: &RatPoint) -> (Q, Q) {
        let (a, b) = self.cone_rays(i);
        let (va, vb) = (self.rays[a], self.rays[b]);
        let d = q(va.det(&vb));
        (v.det_lat(&vb) / &d, -v.det_lat(&va) / d)
    }

    /// The maximal cone containing `x + eps * dir` for all small `eps > 0`.
    pub fn cone_after(&self, x: &RatPoint, dir: &LatticePoint) -> usize {
        match self.minimal_cone(x) {
            ConeId::Cone(i) => i,
            ConeId::Origin => self.locate_max(&dir.to_rat()),
            ConeId::Ray(k) => {
                let n = self.rays.len();
                if self.rays[k].det(dir) >= 0 {
                    k
                } else {
                    (k + n - 1) % n
                }
            }
        }
    }

    pub fn evaluate_pl(&self, f: &PLFunction, v: &RatPoint) -> Q {
        assert_eq!(f.ray_values.len(), self.rays.len(), "PL function belongs to another fan");
        let i = self.locate_max(v);
        let (a, b) = self.cone_rays(i);
        let (ca, cb) = self.cone_coords(i, v);
        ca * &f.ray_values[a] + cb * &f.ray_values[b]
    }

    /// Value of the divisor function `D_i^*` at `v`.
    pub fn divisor_value(&self, ray: usize, v: &RatPoint) -> Q {
        self.evaluate_pl(&PLFunction::divisor(self, ray), v)
    }

    /// Inserts `v` as a new ray. Returns the new fan and the index of every
    /// old ray in it. The kink of the new ray is the zero class.
    pub fn subdivide(&self, v: LatticePoint) -> Result<(ConeComplex, Vec<usize>)> {
        if !v.is_primitive() {
            return invalid(format!("{v} is not primitive"));
        }
        if self.ray_index(&v).is_some() {
            return invalid(format!("{v} is already a ray"));
        }
        let i = self.locate_max(&v.to_rat());
        let pos = i + 1;
        let mut rays = self.rays.clone();
        let mut kinks = self.kinks.clone();
        let mut scale = self.lattice_scale.clone();
        let zero = CurveClass::zeros(kinks[0].len());
        rays.insert(pos, v);
        kinks.insert(pos, zero);
        scale.insert(pos, 1);
        let map = (0..self.rays.len()).map(|j| if j < pos { j } else { j + 1 }).collect();
        let mut out = ConeComplex::new(rays, kinks)?;
        out.lattice_scale = scale;
        Ok((out, map))
    }

    /// Refines the lattice along `ray` by `k`: integral points of the ray are
    /// then counted in units of `k` times the old primitive generator.
    pub fn refine_ray_lattice(&self, ray: usize, k: u64) -> Result<ConeComplex> {
        if k == 0 {
            return invalid("refinement factor must be positive");
        }
        if ray >= self.rays.len() {
            return invalid(format!("no ray {ray}"));
        }
        let mut out = self.clone();
        out.lattice_scale[ray] = self.lattice_scale[ray].checked_mul(k).expect("refinement overflow");
        Ok(out)
    }

    /// Coefficient of `v` along `ray` in the refined scale: `D_ray^*(v) / k`.
    pub fn refined_coefficient(&self, ray: usize, v: &RatPoint) -> Q {
        self.divisor_value(ray, v) / q(self.lattice_scale[ray] as i64)
    }

    /// Whether `v` lies in the refined lattice: every refined divisor value is integral.
    pub fn in_refined_lattice(&self, v: &LatticePoint) -> bool {
        let r = v.to_rat();
        (0..self.rays.len()).all(|i| self.refined_coefficient(i, &r).is_integer())
    }

    /// All integral points of `B` whose coordinates in their minimal cone
    /// are at most `max_norm`. `B` is the union of cones all of whose rays
    /// are good.
    pub fn enumerate_b_points(&self, good: &[bool], max_norm: u64) -> Vec<IntegralPointB> {
        let n = self.rays.len();
        let bound = q(max_norm as i64);
        let mut out = vec![IntegralPointB::origin()];
        for (i, r) in self.rays.iter().enumerate() {
            if good[i] {
                for c in 1..=max_norm as i64 {
                    out.push(IntegralPointB { cone: ConeId::Ray(i), vector: r.scale(c) });
                }
            }
        }
        for i in 0..n {
            let (a, b) = self.cone_rays(i);
            if !(good[a] && good[b]) {
                continue;
            }
            let (va, vb) = (self.rays[a], self.rays[b]);
            let m = max_norm as i64;
            let xs = [0, va.x * m, vb.x * m, (va.x + vb.x) * m];
            let ys = [0, va.y * m, vb.y * m, (va.y + vb.y) * m];
            let (x0, x1) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
            let (y0, y1) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
            for x in x0..=x1 {
                for y in y0..=y1 {
                    let v = LatticePoint::new(x, y);
                    let (ca, cb) = self.cone_coords(i, &v.to_rat());
                    if ca.is_positive() && cb.is_positive() && ca <= bound && cb <= bound {
                        out.push(IntegralPointB { cone: ConeId::Cone(i), vector: v });
                    }
                }
            }
        }
        out.sort();
        out
    }
}

/// A function on `R^2` that is linear on every maximal cone of a fan,
/// determined by its values on the ray generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLFunction {
    pub ray_values: Vec<Q>,
}

impl PLFunction {
    /// The divisor function `D_i^*`: 1 on ray `i`, 0 on the others.
    pub fn divisor(fan: &ConeComplex, i: usize) -> Self {
        PLFunction { ray_values: (0..fan.n_rays()).map(|j| q((i == j) as i64)).collect() }
    }

    /// Transports the function to a subdivision produced by
    /// [`ConeComplex::subdivide`] by evaluating it at every ray of the new fan.
    pub fn transport(&self, old: &ConeComplex, new: &ConeComplex) -> PLFunction {
        PLFunction { ray_values: new.rays().iter().map(|r| old.evaluate_pl(self, &r.to_rat())).collect() }
    }
}

/// An integral point of `B`, housed in its minimal cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntegralPointB {
    pub cone: ConeId,
    pub vector: LatticePoint,
}

impl IntegralPointB {
    pub fn origin() -> Self {
        IntegralPointB { cone: ConeId::Origin, vector: LatticePoint::ZERO }
    }

    /// Canonical form of `v` in `fan`.
    pub fn new(fan: &ConeComplex, v: LatticePoint) -> Self {
        IntegralPointB { cone: fan.minimal_cone(&v.to_rat()), vector: v }
    }

    pub fn is_zero(&self) -> bool {
        self.vector.is_zero()
    }

    /// Coefficients on the generators of the housing cone.
    pub fn coeffs(&self, fan: &ConeComplex) -> Vec<Q> {
        let v = self.vector.to_rat();
        match self.cone {
            ConeId::Origin => vec![],
            ConeId::Ray(i) => vec![q(fan.ray(i).dot(&self.vector) / fan.ray(i).dot(&fan.ray(i)))],
            ConeId::Cone(i) => {
                let (a, b) = fan.cone_coords(i, &v);
                vec![a, b]
            }
        }
    }

    /// Whether the housing cone belongs to `B`.
    pub fn in_b(&self, fan: &ConeComplex, good: &[bool]) -> bool {
        fan.cone_ray_indices(self.cone).iter().all(|&i| good[i])
    }
}

/// The class-valued PL function `phi` whose bend across each ray is the
/// kink of that ray. It vanishes on maximal cone 0 and, on cone `i`, is the
/// linear map `m -> m.x * a_i + m.y * b_i`.
///
/// Crossing ray `v` counterclockwise adds `<n, m> kappa_v` with
/// `n = v.cw_normal()`, which is positive on the cone being left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KinkFunction {
    per_cone: Vec<(CurveClass, CurveClass)>,
}

impl KinkFunction {
    /// Fails unless going once around the origin returns to zero, which is
    /// the linear equivalence `sum_v <m, v> kappa_v = 0` of the kinks.
    pub fn new(fan: &ConeComplex) -> Result<Self> {
        let n = fan.n_rays();
        let len = fan.kinks()[0].len();
        let mut cur = (CurveClass::zeros(len), CurveClass::zeros(len));
        let mut per_cone = Vec::with_capacity(n);
        for i in 0..n {
            per_cone.push(cur.clone());
            let r = (i + 1) % n;
            let nrm = fan.ray(r).cw_normal();
            let k = &fan.kinks()[r];
            cur = (&cur.0 + &k.scale(nrm.x), &cur.1 + &k.scale(nrm.y));
        }
        if !(cur.0.is_zero() && cur.1.is_zero()) {
            return invalid("kinks are not linearly equivalent to zero: the kink function does not close up");
        }
        Ok(KinkFunction { per_cone })
    }

    /// `phi` restricted to maximal cone `i`, evaluated at `m`.
    pub fn on_cone(&self, i: usize, m: &LatticePoint) -> CurveClass {
        let (a, b) = &self.per_cone[i];
        &a.scale(m.x) + &b.scale(m.y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> ConeComplex {
        ConeComplex::new(
            vec![LatticePoint::new(1, 0), LatticePoint::new(0, 1), LatticePoint::new(-1, -1)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_fans() {
        let l = LatticePoint::new;
        assert!(ConeComplex::new(vec![l(1, 0), l(0, 1)], vec![]).is_err());
        assert!(ConeComplex::new(vec![l(1, 0), l(-1, -1), l(0, 1)], vec![]).is_err());
        assert!(ConeComplex::new(vec![l(2, 0), l(0, 1), l(-1, -1)], vec![]).is_err());
        assert!(ConeComplex::new(vec![l(1, 0), l(0, 1), l(-1, 0), l(0, -1)], vec![]).is_ok());
    }

    #[test]
    fn pl_examples() {
        let f = p2();
        let d1 = PLFunction::divisor(&f, 2);
        assert_eq!(f.evaluate_pl(&d1, &LatticePoint::new(-1, 0).to_rat()), q(1));
        assert_eq!(f.evaluate_pl(&d1, &RatPoint::zero()), q(0));
        let d2 = PLFunction::divisor(&f, 0);
        assert_eq!(f.evaluate_pl(&d2, &LatticePoint::new(3, 2).to_rat()), q(3));
    }

    #[test]
    fn subdivide_corner() {
        let f = p2();
        let (g, map) = f.subdivide(LatticePoint::new(1, 1)).unwrap();
        assert_eq!(
            g.rays(),
            &[LatticePoint::new(1, 0), LatticePoint::new(1, 1), LatticePoint::new(0, 1), LatticePoint::new(-1, -1)]
        );
        assert_eq!(map, vec![0, 2, 3]);
        assert!(g.subdivide(LatticePoint::new(1, 1)).is_err());
        let d2 = PLFunction::divisor(&f, 0).transport(&f, &g);
        assert_eq!(d2.ray_values[1], q(1));
    }

    #[test]
    fn b_points() {
        let f = p2();
        let all = f.enumerate_b_points(&[true; 3], 1);
        assert_eq!(all.len(), 7);
        assert_eq!(f.enumerate_b_points(&[true; 3], 0), vec![IntegralPointB::origin()]);
        let some = f.enumerate_b_points(&[true, true, false], 1);
        assert_eq!(some.len(), 4);
    }

    #[test]
    fn refinement() {
        let f = p2();
        assert_eq!(f.refine_ray_lattice(1, 1).unwrap(), f);
        let g = f.refine_ray_lattice(1, 2).unwrap();
        assert_eq!(g.refined_coefficient(1, &LatticePoint::new(0, 2).to_rat()), q(1));
        assert!(!g.in_refined_lattice(&LatticePoint::new(0, 1)));
        assert!(f.refine_ray_lattice(0, 0).is_err());
    }
}
