//! Truncated Laurent series in `z^A x^m` with integer coefficients.
//!
//! Classes here are normalized (see [`crate::scattering`]), so the exceptional
//! part of a class is a grading that only grows under multiplication. Series
//! are truncated at a maximal order in that grading.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::lattice_fan::{checked, LatticePoint};
use crate::pair::CurveClass;

/// A monomial key `z^class x^exp`.
pub type Key = (CurveClass, LatticePoint);

/// The order of a class: minus the sum of its exceptional coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grading {
    pub toric_rank: usize,
    pub max_order: i64,
}

impl Grading {
    pub fn order(&self, c: &CurveClass) -> i64 {
        -c.0[self.toric_rank..].iter().sum::<i64>()
    }

    pub fn keeps(&self, c: &CurveClass) -> bool {
        self.order(c) <= self.max_order
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Series {
    pub terms: BTreeMap<Key, i64>,
}

impl Series {
    pub fn one(class_len: usize) -> Self {
        Self::monomial(CurveClass::zeros(class_len), LatticePoint::ZERO, 1)
    }

    pub fn monomial(c: CurveClass, m: LatticePoint, coeff: i64) -> Self {
        let mut s = Series::default();
        s.add_term(c, m, coeff);
        s
    }

    pub fn add_term(&mut self, c: CurveClass, m: LatticePoint, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry((c, m)) {
            Entry::Vacant(e) => {
                e.insert(coeff);
            }
            Entry::Occupied(mut e) => {
                let v = checked(e.get().checked_add(coeff));
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut s = self.clone();
        for ((c, m), v) in &o.terms {
            s.add_term(c.clone(), *m, *v);
        }
        s
    }

    pub fn mul(&self, o: &Series, g: &Grading) -> Series {
        let mut s = Series::default();
        for ((c1, m1), v1) in &self.terms {
            for ((c2, m2), v2) in &o.terms {
                let c = c1 + c2;
                if g.keeps(&c) {
                    s.add_term(c, *m1 + *m2, checked(v1.checked_mul(*v2)));
                }
            }
        }
        s
    }

    /// Multiplies every term by `z^c x^m`.
    pub fn shift(&self, c: &CurveClass, m: LatticePoint) -> Series {
        Series { terms: self.terms.iter().map(|((c0, m0), v)| ((c0 + c, *m0 + m), *v)).collect() }
    }

    /// The constant term must be 1 and every other term must have positive
    /// order; then `self^k` makes sense for every integer `k`.
    pub fn pow(&self, k: i64, g: &Grading) -> Series {
        let len = self.terms.keys().next().map(|(c, _)| c.len()).unwrap_or(0);
        let one = Series::one(len);
        if k == 0 {
            return one;
        }
        let base = if k > 0 { self.clone() } else { self.inverse(g) };
        let mut acc = one;
        let mut b = base;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b, g);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b, g);
            }
        }
        acc
    }

    /// `1 / self` as `sum_j (-u)^j` where `self = 1 + u`.
    pub fn inverse(&self, g: &Grading) -> Series {
        let len = self.terms.keys().next().map(|(c, _)| c.len()).unwrap_or(0);
        let one = Series::one(len);
        let mut u = self.clone();
        u.add_term(CurveClass::zeros(len), LatticePoint::ZERO, -1);
        assert!(
            u.terms.keys().all(|(c, _)| g.order(c) > 0),
            "only series 1 + (positive order) are invertible"
        );
        let neg_u = Series { terms: u.terms.iter().map(|(k, v)| (k.clone(), -v)).collect() };
        let mut acc = one.clone();
        let mut p = one;
        loop {
            p = p.mul(&neg_u, g);
            if p.terms.is_empty() {
                break;
            }
            acc = acc.add(&p);
        }
        acc
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.iter().all(|((c, m), v)| c.is_zero() && m.is_zero() && *v == 1)
    }

    /// Terms of exactly the given order.
    pub fn of_order(&self, k: i64, g: &Grading) -> Vec<(Key, i64)> {
        self.terms.iter().filter(|((c, _), _)| g.order(c) == k).map(|(k, v)| (k.clone(), *v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_powers() {
        let g = Grading { toric_rank: 1, max_order: 5 };
        let mut f = Series::one(2);
        f.add_term(CurveClass::new(vec![1, -1]), LatticePoint::new(-1, -1), 1);
        let inv = f.inverse(&g);
        assert!(f.mul(&inv, &g).is_one());
        assert!(f.pow(3, &g).mul(&f.pow(-3, &g), &g).is_one());
        assert_eq!(f.pow(2, &g).terms.len(), 3);
        // (1+u)^-1 truncated at order 5 has six terms.
        assert_eq!(inv.terms.len(), 6);
    }
}
