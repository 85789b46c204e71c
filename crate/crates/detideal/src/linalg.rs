//! Exact linear algebra: fraction-free elimination over integral domains and
//! Gauss–Jordan over Q.

use num_traits::{One, Zero};

use crate::scalar::{Domain, Rat};

/// Row echelon form by Bareiss elimination; returns the pivot columns.
/// Every intermediate entry is a minor of the input, so divisions are exact.
pub fn bareiss_echelon<T: Domain>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut prev = T::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = m[r][c].mul_ref(&m[i][j]).sub_ref(&m[i][c].mul_ref(&m[r][j]));
                m[i][j] = v.exact_div(&prev).expect("Bareiss division must be exact");
            }
            m[i][c] = T::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Domain>(m: &[Vec<T>]) -> usize {
    let mut a = m.to_vec();
    bareiss_echelon(&mut a).len()
}

/// Determinant of a square matrix by Bareiss elimination.
pub fn det<T: Domain>(m: &[Vec<T>]) -> T {
    let n = m.len();
    let mut a = m.to_vec();
    let mut prev = T::one();
    let mut sign_neg = false;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return T::zero() };
        if p != k {
            a.swap(p, k);
            sign_neg = !sign_neg;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[k][k].mul_ref(&a[i][j]).sub_ref(&a[i][k].mul_ref(&a[k][j]));
                a[i][j] = v.exact_div(&prev).expect("Bareiss division must be exact");
            }
        }
        prev = a[k][k].clone();
    }
    let d = if n == 0 { T::one() } else { a[n - 1][n - 1].clone() };
    if sign_neg {
        -d
    } else {
        d
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Rat>]) -> Vec<usize> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn inverse(m: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rat>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Some solution of `a·x = b`, with free variables set to zero.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn mat_mul_rat(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let m = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..m)
                .map(|j| {
                    row.iter()
                        .zip(b)
                        .filter(|(x, _)| !x.is_zero())
                        .fold(Rat::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

/// Rank factorization `m = c·r` with `c` of size rows×k and `r` of size k×cols, k = rank.
pub fn factor_low_rank(m: &[Vec<Rat>]) -> (Vec<Vec<Rat>>, Vec<Vec<Rat>>) {
    let mut red = m.to_vec();
    let piv = rref(&mut red);
    let r: Vec<Vec<Rat>> = red.into_iter().take(piv.len()).collect();
    let c: Vec<Vec<Rat>> = m.iter().map(|row| piv.iter().map(|&p| row[p].clone()).collect()).collect();
    (c, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::Laurent;
    use crate::scalar::rat;
    use num_bigint::BigInt;

    fn q(rows: &[&[i64]]) -> Vec<Vec<Rat>> {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn determinants_agree() {
        let m = q(&[&[2, -1, 0], &[1, 3, 4], &[0, 5, -2]]);
        // 2(−6−20) + 1(−2−0) = −54
        assert_eq!(det(&m), rat(-54));
        let z: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
        assert_eq!(det(&z), BigInt::from(-54));
        assert_eq!(det(&q(&[&[0, 1], &[1, 0]])), rat(-1));
    }

    #[test]
    fn rank_over_laurent() {
        type L = Laurent<Rat>;
        let e = |k| L::eps_pow(k);
        // [[1, ε], [ε, ε²]] has rank 1; [[1, ε], [ε, 1]] has rank 2
        let a = vec![vec![L::one(), e(1)], vec![e(1), e(2)]];
        assert_eq!(rank(&a), 1);
        let b = vec![vec![L::one(), e(1)], vec![e(1), L::one()]];
        assert_eq!(rank(&b), 2);
        assert_eq!(det(&b), L::one() - e(2));
    }

    #[test]
    fn inverse_and_solve() {
        let m = q(&[&[1, 2], &[3, 4]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul_rat(&m, &inv), q(&[&[1, 0], &[0, 1]]));
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_none());
        assert_eq!(solve(&m, &[rat(5), rat(11)]), Some(vec![rat(1), rat(2)]));
        assert_eq!(solve(&q(&[&[1, 1], &[1, 1]]), &[rat(1), rat(2)]), None);
    }

    #[test]
    fn low_rank_factorization() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let (c, r) = factor_low_rank(&m);
        assert_eq!(r.len(), 2);
        assert_eq!(mat_mul_rat(&c, &r), m);
    }
}
