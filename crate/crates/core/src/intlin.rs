//! Integer and rational linear algebra for small dense matrices: integral
//! kernels, cokernel orders and ranks. Matrices are lists of rows.

use num_traits::{Signed, Zero};

use crate::lattice_fan::checked;
use crate::Q;

/// Column-reduces `a` (rows of length `n`) to echelon form by unimodular
/// column operations, applying the same operations to `u` (an `n x n` matrix
/// stored by columns). Returns the pivots, one entry per row: the pivot value
/// if the row received one.
fn column_echelon(a: &mut [Vec<i64>], u: &mut [Vec<i64>], n: usize) -> Vec<Option<i64>> {
    let mut pc = 0;
    let mut pivots = vec![None; a.len()];
    for r in 0..a.len() {
        if pc == n {
            break;
        }
        loop {
            let best = (pc..n).filter(|&j| a[r][j] != 0).min_by_key(|&j| a[r][j].unsigned_abs());
            let Some(j) = best else { break };
            if j != pc {
                for row in a.iter_mut() {
                    row.swap(j, pc);
                }
                u.swap(j, pc);
            }
            let mut done = true;
            for j in pc + 1..n {
                if a[r][j] == 0 {
                    continue;
                }
                let f = a[r][j] / a[r][pc];
                for row in a.iter_mut() {
                    row[j] = checked(row[j].checked_sub(checked(f.checked_mul(row[pc]))));
                }
                let (src, dst) = (u[pc].clone(), &mut u[j]);
                for (d, s) in dst.iter_mut().zip(&src) {
                    *d = checked(d.checked_sub(checked(f.checked_mul(*s))));
                }
                done &= a[r][j] == 0;
            }
            if done {
                pivots[r] = Some(a[r][pc]);
                pc += 1;
                break;
            }
        }
    }
    pivots
}

fn identity_columns(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// A basis of `{x in Z^n : m x = 0}`.
pub fn kernel_basis(m: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let mut a = m.to_vec();
    let mut u = identity_columns(n);
    let rank = column_echelon(&mut a, &mut u, n).iter().flatten().count();
    u.split_off(rank)
}

/// `|Z^rows / m Z^cols|`, or `None` when the image has positive corank.
pub fn cokernel_order(m: &[Vec<i64>], cols: usize) -> Option<u64> {
    let mut a = m.to_vec();
    let mut u = identity_columns(cols);
    let pivots = column_echelon(&mut a, &mut u, cols);
    pivots.iter().try_fold(1u64, |acc, p| p.map(|v| acc.checked_mul(v.unsigned_abs()).expect("index overflow")))
}

/// Index in `Z^cols` of `{y : c y = 0 mod d}`, i.e. the order of the image
/// of `c` in `(Z/d)^rows`.
pub fn index_mod(c: &[Vec<i64>], cols: usize, d: i64) -> u64 {
    assert!(d > 0);
    let rows = c.len();
    let wide: Vec<Vec<i64>> = c
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut w = row.clone();
            w.extend((0..rows).map(|j| if i == j { d } else { 0 }));
            w
        })
        .collect();
    let kernel = kernel_basis(&wide, cols + rows);
    // The projection to the first `cols` coordinates is a full-rank lattice.
    let projected: Vec<Vec<i64>> = (0..cols).map(|i| kernel.iter().map(|k| k[i]).collect()).collect();
    cokernel_order(&projected, kernel.len()).expect("the congruence lattice has full rank")
}

/// Rank over `Q`.
pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut a = m.to_vec();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[rank][c];
            for j in c..cols {
                let d = &f * &a[rank][j];
                a[i][j] -= d;
            }
        }
        rank += 1;
    }
    rank
}

/// Scales a rational row to a primitive integer row with the same sign.
pub fn integral_row(row: &[Q]) -> Vec<i64> {
    use num_integer::Integer;
    let lcm = row.iter().fold(num_bigint::BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<num_bigint::BigInt> = row.iter().map(|v| (v * Q::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::zero(), |acc, v| acc.gcd(v));
    ints.iter()
        .map(|v| {
            let v = if g.is_zero() { v.clone() } else { v / &g };
            i64::try_from(v).expect("coefficient fits in i64")
        })
        .collect()
}

/// Whether every entry is non-negative.
pub fn nonnegative(v: &[Q]) -> bool {
    v.iter().all(|x| !x.is_negative())
}
