//! Exact dense linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalars::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Scales each row by the lcm of its denominators, giving an integer matrix
/// together with the row scale factors.
fn clear_denominators(m: &Matrix) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut rows = Vec::with_capacity(m.len());
    let mut scales = Vec::with_capacity(m.len());
    for row in m {
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        rows.push(
            row.iter()
                .map(|r| r.numer() * (&l / r.denom()))
                .collect(),
        );
        scales.push(l);
    }
    (rows, scales)
}

/// Inverse by fraction-free (Bareiss) elimination on `[A | I]`; `None` if
/// singular.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let (a, scales) = clear_denominators(m);
    // Augment with the identity so the right block tracks row operations.
    let mut aug: Vec<Vec<BigInt>> = a
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let width = 2 * n;
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !aug[r][k].is_zero())?;
        aug.swap(k, p);
        for i in 0..n {
            if i == k {
                continue;
            }
            for j in 0..width {
                if j == k {
                    continue;
                }
                let v = &aug[k][k] * &aug[i][j] - &aug[i][k] * &aug[k][j];
                aug[i][j] = if i > k { v / &prev } else { v };
            }
            aug[i][k] = BigInt::zero();
        }
        if k + 1 < n {
            prev = aug[k][k].clone();
        }
    }
    // Rows above the pivot were not divided, so normalise by their own pivot.
    let mut inv = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        let piv = &aug[i][i];
        for j in 0..n {
            // A' = D A, so A^{-1} = A'^{-1} D.
            inv[i][j] = Rational::new(aug[i][n + j].clone() * &scales[j], piv.clone());
        }
    }
    Some(inv)
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut m = m.clone();
    rref(&mut m).len()
}

/// Basis of the right null space `{v : M v = 0}`.
pub fn nullspace(m: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut m = m.clone();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};

    #[test]
    fn inverse_roundtrip() {
        let m = vec![
            vec![rat(1, 2), int(3), int(0)],
            vec![int(3), int(-1), rat(2, 3)],
            vec![int(0), rat(2, 3), int(5)],
        ];
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(3));
        assert_eq!(mat_mul(&inv, &m), identity(3));
    }

    #[test]
    fn inverse_needs_pivoting() {
        let m = vec![
            vec![int(0), int(1), int(0)],
            vec![int(1), int(0), int(0)],
            vec![int(0), int(0), int(1)],
        ];
        assert_eq!(inverse(&m).unwrap(), m);
    }

    #[test]
    fn singular() {
        let m = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert!(inverse(&m).is_none());
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m, 2);
        assert_eq!(ns, vec![vec![int(-2), int(1)]]);
    }
}
