//! Corner blowups and ray-lattice refinements, and the comparison of
//! structure constants across them.
//!
//! A corner blowup subdivides the maximal cone `<v1, v2>` at `v1 + v2`. On
//! the toric model this is the toric blowup of the corresponding fixed point,
//! so the toric block of the curve lattice gains one class `F` with `F.F = -1`,
//! orthogonal to the pulled-back classes. Pushforward forgets the
//! `F`-coordinate. Points of `B` and PL functions move along unchanged: the
//! subdivision has the same support and the new ray only adds a break line
//! where the old functions were already linear.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::lattice_fan::{checked, ConeId, IntegralPointB, LatticePoint, PLFunction};
use crate::pair::{CurveClass, LogCYSurfacePair};
use crate::theta::MirrorAlgebra;
use crate::{q, Result, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModKind {
    Identity,
    /// Subdivision of maximal cone `cone` of the source; the new ray has
    /// index `new_ray` in the target.
    CornerBlowup { cone: usize, new_ray: usize },
    RayRefinement { ray: usize, k: u64 },
    Composite(Vec<ModKind>),
}

#[derive(Clone, Debug)]
pub struct Modification {
    pub kind: ModKind,
    pub source: LogCYSurfacePair,
    pub target: LogCYSurfacePair,
    /// `pi_*`, one row per source class coordinate.
    pub pushforward: Vec<Vec<i64>>,
    /// A right inverse of `pi_*` (pullback of classes), one row per target
    /// class coordinate.
    pub pullback: Vec<Vec<i64>>,
    /// A basis of the kernel of `pi_*`.
    pub kernel: Vec<CurveClass>,
    /// Source ray `i` is target ray `ray_map[i]`.
    pub ray_map: Vec<usize>,
}

fn apply(m: &[Vec<i64>], v: &CurveClass) -> CurveClass {
    CurveClass(
        m.iter()
            .map(|row| row.iter().zip(&v.0).fold(0i64, |acc, (a, b)| checked(acc.checked_add(checked(a.checked_mul(*b))))))
            .collect(),
    )
}

fn compose_matrices(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let cols = b.first().map(|r| r.len()).unwrap_or(0);
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
        .collect()
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn fresh_name(taken: &[String], stem: &str, start: usize) -> String {
    (start..).map(|k| if k == 0 { stem.to_string() } else { format!("{stem}{k}") }).find(|n| !taken.contains(n)).unwrap()
}

impl Modification {
    pub fn identity(pair: &LogCYSurfacePair) -> Self {
        let n = pair.class_len();
        Modification {
            kind: ModKind::Identity,
            source: pair.clone(),
            target: pair.clone(),
            pushforward: identity(n),
            pullback: identity(n),
            kernel: vec![],
            ray_map: (0..pair.fan().n_rays()).collect(),
        }
    }

    /// Blows up the torus-fixed point of maximal cone `cone`.
    pub fn corner_blowup(pair: &LogCYSurfacePair, cone: ConeId) -> Result<Self> {
        let ConeId::Cone(i) = cone else {
            return Err(Error::Invalid(format!("corner blowups need a maximal cone, got {cone:?}")));
        };
        let fan = pair.fan();
        let (ia, ib) = fan.cone_rays(i);
        let (va, vb) = (fan.ray(ia), fan.ray(ib));
        if va.det(&vb) != 1 {
            return Err(Error::Invalid("only smooth corners can be blown up".into()));
        }
        let (_, ray_map) = fan.subdivide(va + vb)?;
        let new_ray = i + 1;
        let t = pair.toric_rank();
        let mut f = pair.to_file();

        let widen = |c: &[i64], extra: i64| {
            let mut v = c[..t].to_vec();
            v.push(extra);
            v.extend_from_slice(&c[t..]);
            CurveClass(v)
        };
        f.rays.insert(new_ray, va + vb);
        let mut names = f.ray_names.clone().unwrap_or_default();
        names.insert(new_ray, fresh_name(&names, "D", fan.n_rays() + 1));
        f.ray_names = Some(names);
        let class_name = fresh_name(&pair.class_names().iter().chain(pair.ray_names()).cloned().collect::<Vec<_>>(), "F", 0);
        f.class_names.push(class_name);
        for row in f.toric_intersection.iter_mut() {
            row.push(0);
        }
        let mut last = vec![0; t + 1];
        last[t] = -1;
        f.toric_intersection.push(last);
        for (j, c) in f.toric_divisor_classes.iter_mut().enumerate() {
            c.push(if j == ia || j == ib { -1 } else { 0 });
        }
        let mut fclass = vec![0; t + 1];
        fclass[t] = 1;
        f.toric_divisor_classes.insert(new_ray, fclass);
        for b in f.blowups.iter_mut() {
            b.ray = ray_map[b.ray];
        }
        let mut a = pair.a().to_vec();
        let a_new = &a[ia] + &a[ib];
        a.insert(new_ray, a_new);
        f.set_a(&a);

        // Effective generators: pulled-back generators, F, strict transforms
        // of the moving generators through the corner, and the boundary.
        let mut gens: BTreeSet<CurveClass> = BTreeSet::new();
        let f_class = CurveClass::basis(pair.class_len() + 1, t);
        gens.insert(f_class.clone());
        for g in pair.effective_generators() {
            let lifted = widen(&g.0, 0);
            gens.insert(lifted.clone());
            if pair.intersect(g, g)? >= 0 {
                gens.insert(&lifted - &f_class);
            }
        }
        f.ample = &widen(&pair.ample().0, 0).scale(2) - &f_class;
        f.name = pair.name().map(|n| format!("{n}-corner{i}"));
        // Boundary strict transforms are effective too; add them once the
        // target exists.
        f.effective_generators = gens.iter().cloned().collect();
        let provisional = LogCYSurfacePair::from_file(f.clone())?;
        for j in 0..provisional.fan().n_rays() {
            gens.insert(provisional.divisor_class(j));
        }
        f.effective_generators = gens.into_iter().collect();
        let target = LogCYSurfacePair::from_file(f)?;

        let n = pair.class_len();
        let pushforward: Vec<Vec<i64>> =
            (0..n).map(|r| (0..=n).map(|c| i64::from(c == if r < t { r } else { r + 1 })).collect()).collect();
        let pullback: Vec<Vec<i64>> =
            (0..=n).map(|c| (0..n).map(|r| i64::from(c == if r < t { r } else { r + 1 })).collect()).collect();
        Ok(Modification {
            kind: ModKind::CornerBlowup { cone: i, new_ray },
            source: pair.clone(),
            target,
            pushforward,
            pullback,
            kernel: vec![f_class],
            ray_map,
        })
    }

    /// Refines the lattice of `ray` by `k`. The curve lattice is unchanged.
    pub fn ray_refinement(pair: &LogCYSurfacePair, ray: usize, k: u64) -> Result<Self> {
        let mut m = Modification::identity(pair);
        m.target = pair.refine_ray(ray, k)?;
        m.kind = if k == 1 { ModKind::Identity } else { ModKind::RayRefinement { ray, k } };
        Ok(m)
    }

    /// `self` followed by `next`.
    pub fn compose(&self, next: &Modification) -> Result<Self> {
        if next.source != self.target {
            return Err(Error::Invalid("modifications do not compose: target and source differ".into()));
        }
        let kinds = [&self.kind, &next.kind]
            .into_iter()
            .flat_map(|k| match k {
                ModKind::Composite(v) => v.clone(),
                ModKind::Identity => vec![],
                other => vec![other.clone()],
            })
            .collect::<Vec<_>>();
        let mut kernel: Vec<CurveClass> = self.kernel.iter().map(|c| apply(&next.pullback, c)).collect();
        kernel.extend(next.kernel.iter().cloned());
        Ok(Modification {
            kind: if kinds.is_empty() { ModKind::Identity } else { ModKind::Composite(kinds) },
            source: self.source.clone(),
            target: next.target.clone(),
            pushforward: compose_matrices(&self.pushforward, &next.pushforward),
            pullback: compose_matrices(&next.pullback, &self.pullback),
            kernel,
            ray_map: self.ray_map.iter().map(|&i| next.ray_map[i]).collect(),
        })
    }

    pub fn push(&self, b: &CurveClass) -> CurveClass {
        apply(&self.pushforward, b)
    }

    pub fn pull(&self, a: &CurveClass) -> CurveClass {
        apply(&self.pullback, a)
    }

    /// The point `p` of `B` as a point of the target's `B`.
    pub fn pl_transport(&self, p: LatticePoint) -> IntegralPointB {
        IntegralPointB::new(self.target.fan(), p)
    }

    pub fn transport_function(&self, f: &PLFunction) -> PLFunction {
        f.transport(self.source.fan(), self.target.fan())
    }

    /// Coordinates of `p` along the rays of its minimal target cone, in units
    /// of the target's (possibly refined) ray lattices.
    pub fn target_contact(&self, p: LatticePoint) -> Vec<(usize, Q)> {
        let fan = self.target.fan();
        let b = IntegralPointB::new(fan, p);
        fan.cone_ray_indices(b.cone)
            .into_iter()
            .zip(b.coeffs(fan))
            .map(|(ray, c)| (ray, c / q(fan.lattice_scale()[ray] as i64)))
            .collect()
    }

    /// Every effective target class `B` with `pi_* B = A` and degree at most
    /// that of the pullback of `A` (the transported truncation).
    pub fn lift_classes(&self, a: &CurveClass) -> Result<Vec<CurveClass>> {
        self.lift_classes_up_to(a, self.target.degree(&self.pull(a)))
    }

    /// Every effective target class `B` with `pi_* B = A` and target degree
    /// at most `target_max_degree`.
    pub fn lift_classes_up_to(&self, a: &CurveClass, target_max_degree: i64) -> Result<Vec<CurveClass>> {
        let trunc = self.target.truncation(target_max_degree);
        Ok(self.target.effective_classes_up_to(&trunc)?.into_iter().filter(|b| &self.push(b) == a).collect())
    }

    /// The unique lift of `A` balanced for inputs `p`, `q` and output `r`
    /// on the target, if there is one. Only this lift can carry a nonzero
    /// structure constant.
    pub fn balanced_lift(&self, a: &CurveClass, p: LatticePoint, qp: LatticePoint, r: LatticePoint) -> Result<Option<CurveClass>> {
        let t = &self.target;
        let base = self.pull(a);
        let k = self.kernel.len();
        // Unknowns c with D_j . (base + sum c_i K_i) = D_j^*(p) + D_j^*(q) - D_j^*(r).
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for j in 0..t.fan().n_rays() {
            let dv = |v: LatticePoint| t.fan().divisor_value(j, &v.to_rat());
            let rhs = dv(p) + dv(qp) - dv(r) - q(t.intersect_boundary(j, &base)?);
            let mut row: Vec<Q> = self.kernel.iter().map(|kc| t.intersect_boundary(j, kc).map(q)).collect::<Result<_>>()?;
            row.push(rhs);
            rows.push(row);
        }
        let Some(c) = solve_unique(rows, k) else { return Ok(None) };
        if c.iter().any(|x| !x.is_integer()) {
            return Ok(None);
        }
        let mut b = base;
        for (x, kc) in c.iter().zip(&self.kernel) {
            let x: i64 = x.to_integer().try_into().expect("small coefficient");
            b = &b + &kc.scale(x);
        }
        Ok(Some(b))
    }
}

/// Solves the augmented system `rows` (each `k` coefficients and a right-hand
/// side). Returns `None` if it is inconsistent or underdetermined.
fn solve_unique(mut rows: Vec<Vec<Q>>, k: usize) -> Option<Vec<Q>> {
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..k {
        let p = (pivot_row..rows.len()).find(|&i| !rows[i][c].is_zero())?;
        rows.swap(pivot_row, p);
        let lead = rows[pivot_row][c].clone();
        for x in rows[pivot_row].iter_mut() {
            *x /= &lead;
        }
        for i in 0..rows.len() {
            if i != pivot_row && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=k {
                    let d = &f * &rows[pivot_row][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(pivot_row);
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| rows[r][k].clone()).collect())
}

/// Both sides of `N_{p,q,r}^A = sum_{pi_* B = A} N_{p,q,r}^B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub source: i64,
    pub target: i64,
    /// Every lift considered, with its structure constant on the target.
    pub ledger: Vec<(CurveClass, i64)>,
}

impl Comparison {
    pub fn equal(&self) -> bool {
        self.source == self.target
    }

    pub fn to_json(&self, m: &Modification) -> String {
        let v = ComparisonJson {
            source: self.source,
            target: self.target,
            equal: self.equal(),
            ledger: self
                .ledger
                .iter()
                .map(|(c, n)| LedgerEntry { class: crate::notation::format_class(&m.target, c), coeffs: c.clone(), n: *n })
                .collect(),
        };
        serde_json::to_string_pretty(&v).expect("plain JSON") + "\n"
    }

    /// Reads back [`Comparison::to_json`]; the `coeffs` field is authoritative.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: ComparisonJson = serde_json::from_str(s)?;
        let out = Comparison { source: v.source, target: v.target, ledger: v.ledger.into_iter().map(|e| (e.coeffs, e.n)).collect() };
        if out.equal() != v.equal || out.ledger.iter().map(|(_, n)| n).sum::<i64>() != out.target {
            return Err(Error::Invalid("inconsistent comparison ledger".into()));
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LedgerEntry {
    class: String,
    coeffs: CurveClass,
    n: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComparisonJson {
    source: i64,
    target: i64,
    equal: bool,
    ledger: Vec<LedgerEntry>,
}

/// Compares `N_{p,q,r}^A` on `src` (an algebra of `m.source`) with the sum
/// over lifts on `tgt` (an algebra of `m.target`).
pub fn compare_structure_constants(
    m: &Modification,
    src: &MirrorAlgebra,
    tgt: &MirrorAlgebra,
    p: LatticePoint,
    qp: LatticePoint,
    r: LatticePoint,
    a: &CurveClass,
) -> Result<Comparison> {
    if src.pair() != &m.source || tgt.pair() != &m.target {
        return Err(Error::Invalid("algebras do not belong to the modification".into()));
    }
    let src_deg = q(m.source.degree(a));
    if &src_deg > src.max_degree() {
        return Err(Error::Invalid(format!("class degree {src_deg} exceeds the source truncation")));
    }
    if let Some(b) = m.balanced_lift(a, p, qp, r)? {
        let d = q(m.target.degree(&b));
        if m.target.is_effective(&b) && &d > tgt.max_degree() {
            return Err(Error::Invalid(format!("target truncation too small: the balanced lift has degree {d}")));
        }
    }
    let source = src.n(p, qp, r)?.get(a).copied().unwrap_or(0);
    let table = tgt.n(p, qp, r)?;
    let ledger: Vec<(CurveClass, i64)> = tgt
        .classes()
        .iter()
        .filter(|b| &m.push(b) == a)
        .map(|b| (b.clone(), table.get(b).copied().unwrap_or(0)))
        .collect();
    let target = ledger.iter().map(|(_, n)| n).sum();
    Ok(Comparison { source, target, ledger })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair::SignedPoint;

    fn p2() -> LogCYSurfacePair {
        LogCYSurfacePair::preset("p2").unwrap()
    }

    #[test]
    fn toric_corner() {
        let m = Modification::corner_blowup(&p2(), ConeId::Cone(0)).unwrap();
        let t = &m.target;
        assert_eq!(t.fan().rays()[1], LatticePoint::new(1, 1));
        assert_eq!(t.class_names(), ["L", "F"]);
        assert_eq!(t.divisor_class(0), CurveClass::new(vec![1, -1]));
        assert_eq!(t.divisor_class(1), CurveClass::new(vec![0, 1]));
        assert_eq!(m.push(&CurveClass::new(vec![2, -1])), CurveClass::new(vec![2]));
        assert!(t.good().iter().all(|&g| g));
        let lifts = m.lift_classes(&CurveClass::new(vec![1])).unwrap();
        assert_eq!(lifts, vec![CurveClass::new(vec![1, -1]), CurveClass::new(vec![1, 0])]);
        assert_eq!(m.lift_classes(&CurveClass::new(vec![0])).unwrap(), vec![CurveClass::new(vec![0, 0])]);
        assert_eq!(m.lift_classes_up_to(&CurveClass::new(vec![1]), 3).unwrap().len(), 3);
        assert!(Modification::corner_blowup(&p2(), ConeId::Ray(0)).is_err());
    }

    #[test]
    fn transport_commutes_with_divisors() {
        let pair = LogCYSurfacePair::preset("paper-example").unwrap();
        let m = Modification::corner_blowup(&pair, ConeId::Cone(1)).unwrap();
        for i in 0..pair.fan().n_rays() {
            let f = PLFunction::divisor(pair.fan(), i);
            let g = m.transport_function(&f);
            for p in pair.fan().enumerate_b_points(&pair.good(), 2) {
                let v = p.vector.to_rat();
                assert_eq!(pair.fan().evaluate_pl(&f, &v), m.target.fan().evaluate_pl(&g, &v));
                assert_eq!(m.pl_transport(p.vector).vector, p.vector);
            }
        }
        // Crepancy: c1 . B = c1 . pi_* B.
        for b in m.target.effective_classes_up_to(&m.target.truncation(8)).unwrap() {
            assert_eq!(m.target.c1_log_degree(&b).unwrap(), pair.c1_log_degree(&m.push(&b)).unwrap());
        }
    }

    #[test]
    fn composition_and_balanced_lifts() {
        let pair = LogCYSurfacePair::preset("paper-example").unwrap();
        let m1 = Modification::corner_blowup(&pair, ConeId::Cone(0)).unwrap();
        let m2 = Modification::corner_blowup(&m1.target, ConeId::Cone(0)).unwrap();
        let m = m1.compose(&m2).unwrap();
        let b = CurveClass::new(vec![2, -1, -1, 0]);
        assert_eq!(m.push(&b), m1.push(&m2.push(&b)));
        assert_eq!(m.kernel.len(), 2);
        let l = LatticePoint::new;
        let a = CurveClass::new(vec![1, -1]);
        let lift = m.balanced_lift(&a, l(1, 0), l(0, 1), l(0, 0)).unwrap().unwrap();
        assert_eq!(m.push(&lift), a);
        assert!(m.target.balancing_check(&lift, &[SignedPoint::pos(l(1, 0)), SignedPoint::pos(l(0, 1))]));
        assert!(Modification::identity(&pair).compose(&m2).is_err());
    }

    #[test]
    fn refinement_contacts() {
        let pair = LogCYSurfacePair::preset("paper-example").unwrap();
        let m = Modification::ray_refinement(&pair, 0, 2).unwrap();
        assert_eq!(m.target_contact(LatticePoint::new(2, 0)), vec![(0, q(1))]);
        assert_eq!(m.target_contact(LatticePoint::new(1, 0)), vec![(0, Q::new(1.into(), 2.into()))]);
        assert_eq!(Modification::ray_refinement(&pair, 0, 1).unwrap().kind, ModKind::Identity);
    }
}
