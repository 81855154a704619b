//! Dense exact linear algebra over ℚ.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::rational::{zero_vec, QVec, Q};

/// Row-major rational matrix.
pub type QMat = Vec<QVec>;

pub fn transpose(a: &[QVec]) -> QMat {
    if a.is_empty() {
        return Vec::new();
    }
    let cols = a[0].len();
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_vec(a: &[QVec], x: &[Q]) -> QVec {
    a.iter().map(|row| crate::rational::dot(row, x)).collect()
}

pub fn mat_mul(a: &[QVec], b: &[QVec]) -> QMat {
    let bt = transpose(b);
    a.iter()
        .map(|row| bt.iter().map(|col| crate::rational::dot(row, col)).collect())
        .collect()
}

/// Reduced row echelon form; returns the reduced matrix and pivot columns.
pub fn rref(a: &[QVec]) -> (QMat, Vec<usize>) {
    let mut m: QMat = a.to_vec();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
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
        let inv = Q::one() / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
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
    (m, pivots)
}

pub fn rank(a: &[QVec]) -> usize {
    rref(a).1.len()
}

/// Basis of `{x : A x = 0}` where `A` has `cols` columns.
pub fn nullspace(a: &[QVec], cols: usize) -> QMat {
    if a.is_empty() {
        return (0..cols).map(|i| crate::rational::unit_vec(cols, i)).collect();
    }
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = zero_vec(cols);
            v[f] = Q::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `A x = b`, if one exists.
pub fn solve(a: &[QVec], b: &[Q]) -> Option<QVec> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let aug: QMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = zero_vec(cols);
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = m[row][cols].clone();
    }
    Some(x)
}

pub fn det(a: &[QVec]) -> Q {
    let n = a.len();
    let mut m: QMat = a.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for i in (c + 1)..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(a: &[QVec]) -> Option<QMat> {
    let n = a.len();
    let aug: QMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend(crate::rational::unit_vec(n, i));
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
