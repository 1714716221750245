//! Log Calabi-Yau surface pairs presented as a toric model plus boundary blowups.
//!
//! Curve classes live in the basis `(L_1..L_t; E_1..E_b)`: the first block
//! spans the toric model's curve lattice and `E_j` are the exceptional
//! classes. The pairing is the toric pairing on the first block, `E_j^2 = -1`,
//! and zero between blocks.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::invalid;
use crate::lattice_fan::{checked, ConeComplex, ConeId, IntegralPointB, KinkFunction, LatticePoint};
use crate::{q, Result, Q};

/// An integer vector in the pair's curve-class basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn new(coeffs: Vec<i64>) -> Self {
        CurveClass(coeffs)
    }

    pub fn zeros(len: usize) -> Self {
        CurveClass(vec![0; len])
    }

    pub fn basis(len: usize, i: usize) -> Self {
        let mut v = vec![0; len];
        v[i] = 1;
        CurveClass(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn scale(&self, k: i64) -> CurveClass {
        CurveClass(self.0.iter().map(|&c| checked(c.checked_mul(k))).collect())
    }
}

impl std::ops::Add for &CurveClass {
    type Output = CurveClass;
    fn add(self, o: &CurveClass) -> CurveClass {
        assert_eq!(self.len(), o.len(), "curve classes from different lattices");
        CurveClass(self.0.iter().zip(&o.0).map(|(a, b)| checked(a.checked_add(*b))).collect())
    }
}

impl std::ops::Sub for &CurveClass {
    type Output = CurveClass;
    fn sub(self, o: &CurveClass) -> CurveClass {
        assert_eq!(self.len(), o.len(), "curve classes from different lattices");
        CurveClass(self.0.iter().zip(&o.0).map(|(a, b)| checked(a.checked_sub(*b))).collect())
    }
}

impl std::ops::Neg for &CurveClass {
    type Output = CurveClass;
    fn neg(self) -> CurveClass {
        self.scale(-1)
    }
}

/// A contact order, possibly negated (the output of a punctured map).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedPoint {
    pub point: LatticePoint,
    pub negated: bool,
}

impl SignedPoint {
    pub fn pos(point: LatticePoint) -> Self {
        SignedPoint { point, negated: false }
    }

    pub fn neg(point: LatticePoint) -> Self {
        SignedPoint { point, negated: true }
    }
}

/// A degree cutoff `deg(C) = C . ample <= max_degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub ample: CurveClass,
    pub max_degree: Q,
}

/// A non-toric blowup of a general point of the boundary divisor on `ray`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blowup {
    pub ray: usize,
    pub name: String,
}

/// A rational number in JSON, written either as an integer or as `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonRat {
    Int(i64),
    Str(String),
}

impl JsonRat {
    fn parse(&self) -> Result<Q> {
        match self {
            JsonRat::Int(n) => Ok(q(*n)),
            JsonRat::Str(s) => s.parse::<Q>().or_else(|_| invalid(format!("bad rational {s:?}"))),
        }
    }

    fn from_q(v: &Q) -> Self {
        if v.is_integer() {
            JsonRat::Int(v.to_integer().try_into().expect("small integer"))
        } else {
            JsonRat::Str(v.to_string())
        }
    }
}

/// On-disk form of a pair. Field order here is the byte-stable output order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rays: Vec<LatticePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<JsonRat>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ray_names: Option<Vec<String>>,
    pub class_names: Vec<String>,
    pub toric_intersection: Vec<Vec<i64>>,
    pub toric_divisor_classes: Vec<Vec<i64>>,
    #[serde(default)]
    pub blowups: Vec<Blowup>,
    pub effective_generators: Vec<CurveClass>,
    pub ample: CurveClass,
}

impl PairFile {
    pub(crate) fn set_a(&mut self, a: &[Q]) {
        self.a = if a.iter().all(|x| x.is_zero()) { None } else { Some(a.iter().map(JsonRat::from_q).collect()) };
        self.good = Some(a.iter().map(|x| x.is_zero()).collect());
    }
}

/// A log Calabi-Yau surface pair with its curve-class bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogCYSurfacePair {
    name: Option<String>,
    fan: ConeComplex,
    kink: KinkFunction,
    ray_names: Vec<String>,
    class_names: Vec<String>,
    toric_rank: usize,
    toric_intersection: Vec<Vec<i64>>,
    toric_divisor_classes: Vec<CurveClass>,
    blowups: Vec<Blowup>,
    a: Vec<Q>,
    effective_generators: Vec<CurveClass>,
    ample: CurveClass,
}

impl LogCYSurfacePair {
    pub fn from_file(f: PairFile) -> Result<Self> {
        let n = f.rays.len();
        let t = f.class_names.len();
        let b = f.blowups.len();
        let full = t + b;
        if f.toric_intersection.len() != t || f.toric_intersection.iter().any(|r| r.len() != t) {
            return invalid("toric_intersection must be square of size len(class_names)");
        }
        for i in 0..t {
            for j in 0..t {
                if f.toric_intersection[i][j] != f.toric_intersection[j][i] {
                    return invalid("toric_intersection is not symmetric");
                }
            }
        }
        if f.toric_divisor_classes.len() != n || f.toric_divisor_classes.iter().any(|c| c.len() != t) {
            return invalid("toric_divisor_classes needs one class of the toric block per ray");
        }
        let a = match (&f.a, &f.good) {
            (Some(a), _) => a.iter().map(JsonRat::parse).collect::<Result<Vec<_>>>()?,
            (None, Some(g)) => g.iter().map(|&g| q(if g { 0 } else { 1 })).collect(),
            (None, None) => vec![q(0); n],
        };
        if a.len() != n || a.iter().any(|x| x.is_negative()) {
            return invalid("need one nonnegative a_i per ray");
        }
        if let (Some(_), Some(g)) = (&f.a, &f.good) {
            if g.len() != n || g.iter().zip(&a).any(|(g, a)| *g != a.is_zero()) {
                return invalid("good flags disagree with a_i = 0");
            }
        }
        for bl in &f.blowups {
            if bl.ray >= n {
                return invalid(format!("blowup {} on missing ray {}", bl.name, bl.ray));
            }
        }
        let ray_names = f.ray_names.clone().unwrap_or_else(|| (1..=n).map(|i| format!("D{i}")).collect());
        if ray_names.len() != n {
            return invalid("one name per ray is required");
        }
        let mut class_names = f.class_names.clone();
        class_names.extend(f.blowups.iter().map(|b| b.name.clone()));
        let names: BTreeSet<_> = class_names.iter().chain(&ray_names).collect();
        if names.len() != class_names.len() + n {
            return invalid("class and ray names must be distinct");
        }
        let pad = |c: &[i64]| {
            let mut v = c.to_vec();
            v.resize(full, 0);
            CurveClass(v)
        };
        let toric_divisor_classes: Vec<CurveClass> = f.toric_divisor_classes.iter().map(|c| pad(c)).collect();
        for g in f.effective_generators.iter().chain(std::iter::once(&f.ample)) {
            if g.len() != full {
                return invalid(format!("class {:?} has wrong length (expected {full})", g.0));
            }
        }
        let fan = ConeComplex::new(f.rays.clone(), toric_divisor_classes.clone())?;
        let kink = KinkFunction::new(&fan)?;
        Ok(LogCYSurfacePair {
            name: f.name,
            fan,
            kink,
            ray_names,
            class_names,
            toric_rank: t,
            toric_intersection: f.toric_intersection,
            toric_divisor_classes,
            blowups: f.blowups,
            a,
            effective_generators: f.effective_generators,
            ample: f.ample,
        })
    }

    pub fn to_file(&self) -> PairFile {
        PairFile {
            name: self.name.clone(),
            rays: self.fan.rays().to_vec(),
            good: Some(self.good()),
            a: if self.a.iter().all(|a| a.is_zero()) { None } else { Some(self.a.iter().map(JsonRat::from_q).collect()) },
            ray_names: Some(self.ray_names.clone()),
            class_names: self.class_names[..self.toric_rank].to_vec(),
            toric_intersection: self.toric_intersection.clone(),
            toric_divisor_classes: self
                .toric_divisor_classes
                .iter()
                .map(|c| c.0[..self.toric_rank].to_vec())
                .collect(),
            blowups: self.blowups.clone(),
            effective_generators: self.effective_generators.clone(),
            ample: self.ample.clone(),
        }
    }

    /// The same pair with the lattice of `ray` refined by `k`.
    pub fn refine_ray(&self, ray: usize, k: u64) -> Result<Self> {
        let mut out = self.clone();
        out.fan = self.fan.refine_ray_lattice(ray, k)?;
        Ok(out)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(s)?)
    }

    /// Pretty JSON with a trailing newline; stable byte-for-byte.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("pair serializes");
        s.push('\n');
        s
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn fan(&self) -> &ConeComplex {
        &self.fan
    }

    pub fn kink_function(&self) -> &KinkFunction {
        &self.kink
    }

    pub fn ray_names(&self) -> &[String] {
        &self.ray_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn toric_rank(&self) -> usize {
        self.toric_rank
    }

    pub fn class_len(&self) -> usize {
        self.class_names.len()
    }

    pub fn blowups(&self) -> &[Blowup] {
        &self.blowups
    }

    pub fn a(&self) -> &[Q] {
        &self.a
    }

    pub fn good(&self) -> Vec<bool> {
        self.a.iter().map(|a| a.is_zero()).collect()
    }

    pub fn effective_generators(&self) -> &[CurveClass] {
        &self.effective_generators
    }

    pub fn ample(&self) -> &CurveClass {
        &self.ample
    }

    pub fn toric_intersection(&self) -> &[Vec<i64>] {
        &self.toric_intersection
    }

    pub fn toric_divisor_class(&self, ray: usize) -> &CurveClass {
        &self.toric_divisor_classes[ray]
    }

    pub fn zero_class(&self) -> CurveClass {
        CurveClass::zeros(self.class_len())
    }

    /// The class `E_j` of the `j`-th blowup.
    pub fn exceptional(&self, j: usize) -> CurveClass {
        CurveClass::basis(self.class_len(), self.toric_rank + j)
    }

    /// Class of the strict transform of boundary component `ray`.
    pub fn divisor_class(&self, ray: usize) -> CurveClass {
        let mut c = self.toric_divisor_classes[ray].clone();
        for (j, b) in self.blowups.iter().enumerate() {
            if b.ray == ray {
                c = &c - &self.exceptional(j);
            }
        }
        c
    }

    /// The intersection pairing.
    pub fn intersect(&self, c: &CurveClass, d: &CurveClass) -> Result<i64> {
        if c.len() != self.class_len() || d.len() != self.class_len() {
            return invalid("class has the wrong dimension for this pair");
        }
        let t = self.toric_rank;
        let mut s: i64 = 0;
        for i in 0..t {
            for j in 0..t {
                s = checked(s.checked_add(checked(c.0[i].checked_mul(self.toric_intersection[i][j]).and_then(|x| x.checked_mul(d.0[j])))));
            }
        }
        for i in t..self.class_len() {
            s = checked(s.checked_sub(checked(c.0[i].checked_mul(d.0[i]))));
        }
        Ok(s)
    }

    /// `D_ray . C`.
    pub fn intersect_boundary(&self, ray: usize, c: &CurveClass) -> Result<i64> {
        self.intersect(&self.divisor_class(ray), c)
    }

    /// `c_1(T^log) . C = -sum a_i D_i . C`.
    pub fn c1_log_degree(&self, c: &CurveClass) -> Result<Q> {
        let mut s = q(0);
        for (i, a) in self.a.iter().enumerate() {
            s -= a * q(self.intersect_boundary(i, c)?);
        }
        Ok(s)
    }

    /// The grading by exceptional classes: `-(sum of E-coefficients)`.
    pub fn order(&self, c: &CurveClass) -> i64 {
        -c.0[self.toric_rank..].iter().sum::<i64>()
    }

    pub fn degree(&self, c: &CurveClass) -> i64 {
        self.intersect(c, &self.ample).expect("class of this pair")
    }

    pub fn truncation(&self, max_degree: i64) -> Truncation {
        Truncation { ample: self.ample.clone(), max_degree: q(max_degree) }
    }

    pub fn truncation_degree(&self, trunc: &Truncation, c: &CurveClass) -> Q {
        q(self.intersect(c, &trunc.ample).expect("class of this pair"))
    }

    /// `D_j^*` of a signed contact.
    pub fn contact_value(&self, ray: usize, s: &SignedPoint) -> Q {
        let v = self.fan.divisor_value(ray, &s.point.to_rat());
        if s.negated {
            -v
        } else {
            v
        }
    }

    /// `D_j . A = sum_i D_j^*(s_i)` for every boundary component `j`.
    pub fn balancing_check(&self, a: &CurveClass, contacts: &[SignedPoint]) -> bool {
        (0..self.fan.n_rays()).all(|j| {
            let lhs = match self.intersect_boundary(j, a) {
                Ok(v) => q(v),
                Err(_) => return false,
            };
            let rhs: Q = contacts.iter().map(|s| self.contact_value(j, s)).sum();
            lhs == rhs
        })
    }

    /// Every `s` in `B(Z)` such that `inputs` together with `-s` balance `A`.
    pub fn admissible_outputs(&self, a: &CurveClass, inputs: &[LatticePoint]) -> Vec<IntegralPointB> {
        let n = self.fan.n_rays();
        let t: Vec<Q> = (0..n)
            .map(|j| {
                let s: Q = inputs.iter().map(|p| self.fan.divisor_value(j, &p.to_rat())).sum();
                s - q(self.intersect_boundary(j, a).expect("class of this pair"))
            })
            .collect();
        let good = self.good();
        let support: Vec<usize> = (0..n).filter(|&j| !t[j].is_zero()).collect();
        if support.iter().any(|&j| t[j].is_negative() || !good[j]) {
            return vec![];
        }
        let s = match support.as_slice() {
            [] => Some(LatticePoint::ZERO),
            [i] => rat_combination(&[(&t[*i], self.fan.ray(*i))]),
            [i, j] => {
                let adjacent = (i + 1) % n == *j || (j + 1) % n == *i;
                if adjacent {
                    rat_combination(&[(&t[*i], self.fan.ray(*i)), (&t[*j], self.fan.ray(*j))])
                } else {
                    None
                }
            }
            _ => None,
        };
        match s {
            Some(s) => {
                let p = IntegralPointB::new(&self.fan, s);
                let mut contacts: Vec<SignedPoint> = inputs.iter().map(|p| SignedPoint::pos(*p)).collect();
                contacts.push(SignedPoint::neg(s));
                debug_assert!(self.balancing_check(a, &contacts));
                vec![p]
            }
            None => vec![],
        }
    }

    /// `c_1 . A + (dim X - 3)(1 - g) + n - sum e_i` with `dim X = 2`.
    pub fn virtual_dimension(&self, genus: u32, n_marked: i64, a: &CurveClass, neg_entry_counts: &[i64]) -> Result<Q> {
        if genus != 0 {
            return invalid("only genus 0 is supported");
        }
        Ok(self.c1_log_degree(a)? - q(1) + q(n_marked) - q(neg_entry_counts.iter().sum()))
    }

    /// All elements of the monoid spanned by the effective generators with
    /// `deg <= max_degree`, sorted by degree and then by coefficients.
    pub fn effective_classes_up_to(&self, trunc: &Truncation) -> Result<Vec<CurveClass>> {
        let mut degs = Vec::new();
        for g in &self.effective_generators {
            let d = self.truncation_degree(trunc, g);
            if !d.is_positive() {
                return invalid(format!("effective generator {} has degree {d} <= 0", crate::notation::format_class(self, g)));
            }
            degs.push(d);
        }
        let mut out = BTreeSet::new();
        let mut stack = vec![(0usize, self.zero_class(), q(0))];
        while let Some((i, c, d)) = stack.pop() {
            if i == self.effective_generators.len() {
                out.insert(c);
                continue;
            }
            let (mut c, mut d) = (c, d);
            while d <= trunc.max_degree {
                stack.push((i + 1, c.clone(), d.clone()));
                c = &c + &self.effective_generators[i];
                d += &degs[i];
            }
        }
        let mut v: Vec<CurveClass> = out.into_iter().collect();
        v.sort_by_cached_key(|c| (self.truncation_degree(trunc, c), c.clone()));
        Ok(v)
    }

    /// Whether `c` lies in the effective monoid (searched up to its own degree).
    pub fn is_effective(&self, c: &CurveClass) -> bool {
        let d = q(self.degree(c));
        if d.is_negative() {
            return false;
        }
        let t = Truncation { ample: self.ample.clone(), max_degree: d };
        self.effective_classes_up_to(&t).map(|v| v.contains(c)).unwrap_or(false)
    }

    /// Largest exceptional order among effective classes below the cutoff.
    /// Any monomial whose class must end up effective and below the cutoff
    /// has order at most this, which bounds every series computation.
    pub fn order_bound(&self, trunc: &Truncation) -> Result<i64> {
        Ok(self.effective_classes_up_to(trunc)?.iter().map(|c| self.order(c)).max().unwrap_or(0).max(0))
    }

    /// Parses a point like `2,1`, `D2`, `2D2+D3` or `0`.
    pub fn parse_point(&self, s: &str) -> Result<LatticePoint> {
        crate::notation::parse_point(self, s)
    }

    pub fn cone_by_rays(&self, a: usize, b: usize) -> Result<ConeId> {
        let n = self.fan.n_rays();
        if (a + 1) % n == b {
            Ok(ConeId::Cone(a))
        } else if (b + 1) % n == a {
            Ok(ConeId::Cone(b))
        } else {
            invalid("rays do not span a maximal cone")
        }
    }

    pub fn ray_by_name(&self, name: &str) -> Option<usize> {
        self.ray_names.iter().position(|n| n == name)
    }

    /// Built-in pairs: `paper-example` (the blowup of P^2 at a point of D_1),
    /// `p2` (toric P^2) and `two-blowup` (P^1 x P^1 blown up on two adjacent sides).
    pub fn preset(name: &str) -> Result<Self> {
        let json = match name {
            "paper-example" => PAPER_EXAMPLE,
            "p2" => P2,
            "two-blowup" => TWO_BLOWUP,
            _ => return invalid(format!("unknown preset {name:?} (known: paper-example, p2, two-blowup)")),
        };
        Self::from_json(json)
    }
}

fn rat_combination(terms: &[(&Q, LatticePoint)]) -> Option<LatticePoint> {
    let mut x = q(0);
    let mut y = q(0);
    for (c, v) in terms {
        x += *c * q(v.x);
        y += *c * q(v.y);
    }
    crate::lattice_fan::RatPoint::new(x, y).to_lattice()
}

const PAPER_EXAMPLE: &str = r#"{
  "name": "paper-example",
  "rays": [[1, 0], [0, 1], [-1, -1]],
  "ray_names": ["D2", "D3", "D1"],
  "class_names": ["L"],
  "toric_intersection": [[1]],
  "toric_divisor_classes": [[1], [1], [1]],
  "blowups": [{"ray": 2, "name": "E"}],
  "effective_generators": [[0, 1], [1, -1]],
  "ample": [3, -1]
}"#;

const P2: &str = r#"{
  "name": "p2",
  "rays": [[1, 0], [0, 1], [-1, -1]],
  "ray_names": ["D2", "D3", "D1"],
  "class_names": ["L"],
  "toric_intersection": [[1]],
  "toric_divisor_classes": [[1], [1], [1]],
  "effective_generators": [[1]],
  "ample": [1]
}"#;

const TWO_BLOWUP: &str = r#"{
  "name": "two-blowup",
  "rays": [[1, 0], [0, 1], [-1, 0], [0, -1]],
  "class_names": ["A", "B"],
  "toric_intersection": [[0, 1], [1, 0]],
  "toric_divisor_classes": [[1, 0], [0, 1], [1, 0], [0, 1]],
  "blowups": [{"ray": 0, "name": "E1"}, {"ray": 1, "name": "E2"}],
  "effective_generators": [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, -1, 0], [0, 1, 0, -1], [0, 1, -1, 0], [1, 0, 0, -1]],
  "ample": [2, 2, -1, -1]
}"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn bl() -> LogCYSurfacePair {
        LogCYSurfacePair::preset("paper-example").unwrap()
    }

    fn c(v: &[i64]) -> CurveClass {
        CurveClass::new(v.to_vec())
    }

    #[test]
    fn intersections() {
        let p = bl();
        let a = c(&[3, -2]);
        assert_eq!(p.intersect_boundary(2, &a).unwrap(), 1);
        assert_eq!(p.intersect(&c(&[0, 1]), &c(&[0, 1])).unwrap(), -1);
        assert_eq!(p.intersect_boundary(0, &a).unwrap(), 3);
        assert!(p.intersect(&c(&[1]), &a).is_err());
        assert_eq!(p.c1_log_degree(&a).unwrap(), q(0));
    }

    #[test]
    fn bad_divisor_c1() {
        let mut f = bl().to_file();
        f.a = Some(vec![JsonRat::Int(0), JsonRat::Int(0), JsonRat::Int(1)]);
        f.good = None;
        let p = LogCYSurfacePair::from_file(f).unwrap();
        // D1 = L - E, and (L - E).(2L) = 2.
        assert_eq!(p.c1_log_degree(&c(&[2, 0])).unwrap(), q(-2));
        assert_eq!(p.good(), vec![true, true, false]);
    }

    #[test]
    fn balancing_examples() {
        let p = bl();
        let l = LatticePoint::new;
        let case1 = [SignedPoint::pos(l(-1, 0)), SignedPoint::pos(l(3, 2)), SignedPoint::pos(l(0, 0))];
        assert!(p.balancing_check(&c(&[3, -2]), &case1));
        assert!(p.balancing_check(&c(&[0, 0]), &[SignedPoint::pos(l(2, 1)), SignedPoint::neg(l(2, 1))]));
        assert!(!p.balancing_check(&c(&[1, 0]), &[SignedPoint::pos(l(1, 0))]));
    }

    #[test]
    fn admissible() {
        let p = bl();
        let l = LatticePoint::new;
        let out = p.admissible_outputs(&c(&[0, 0]), &[l(1, 0), l(2, 1)]);
        assert_eq!(out.iter().map(|s| s.vector).collect::<Vec<_>>(), vec![l(3, 1)]);
        let out = p.admissible_outputs(&c(&[2, -1]), &[l(-1, 0), l(2, 1)]);
        assert_eq!(out, vec![IntegralPointB::origin()]);
        assert!(p.admissible_outputs(&c(&[0, 1]), &[]).is_empty());
    }

    #[test]
    fn vdim() {
        let p = bl();
        let a = c(&[2, -1]);
        assert_eq!(p.virtual_dimension(0, 3, &a, &[1, 1]).unwrap(), q(0));
        assert_eq!(p.virtual_dimension(0, 3, &a, &[1]).unwrap(), q(1));
        assert_eq!(p.virtual_dimension(0, 2, &a, &[]).unwrap(), q(1));
        assert!(p.virtual_dimension(1, 2, &a, &[]).is_err());
    }

    #[test]
    fn effective_enumeration() {
        let p = bl();
        let all = p.effective_classes_up_to(&p.truncation(7)).unwrap();
        for want in [[0, 0], [0, 1], [1, -1], [1, 0], [2, -1], [3, -2]] {
            assert!(all.contains(&c(&want)), "{want:?}");
        }
        assert_eq!(p.effective_classes_up_to(&p.truncation(0)).unwrap(), vec![c(&[0, 0])]);
        let mut f = p.to_file();
        f.ample = c(&[1, 0]);
        let bad = LogCYSurfacePair::from_file(f).unwrap();
        assert!(bad.effective_classes_up_to(&bad.truncation(3)).is_err());
        assert_eq!(p.order_bound(&p.truncation(9)).unwrap(), 4);
    }

    #[test]
    fn preset_round_trip() {
        for name in ["paper-example", "p2", "two-blowup"] {
            let p = LogCYSurfacePair::preset(name).unwrap();
            let again = LogCYSurfacePair::from_json(&p.to_json()).unwrap();
            assert_eq!(p, again);
            assert_eq!(p.to_json(), again.to_json());
        }
    }
}
