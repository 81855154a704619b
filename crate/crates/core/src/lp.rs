//! Exact LP feasibility via phase-one simplex with Bland's rule.

use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::rational::{dot, Q};

/// Decides whether `{x ≥ 0 : A x = b}` is nonempty, returning a witness.
///
/// Rows with negative right-hand side are negated first, then artificial
/// variables are added and their sum minimized. Bland's rule guarantees
/// termination.
pub fn feasible(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let n = if rows == 0 { 0 } else { a[0].len() };
    if rows == 0 {
        return Some((0..n).map(|_| Q::zero()).collect());
    }
    // tableau columns: n originals, rows artificials, rhs
    let width = n + rows + 1;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(rows);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        let mut r: Vec<Q> = Vec::with_capacity(width);
        for x in row {
            r.push(if flip { -x } else { x.clone() });
        }
        for j in 0..rows {
            r.push(if j == i { Q::one() } else { Q::zero() });
        }
        r.push(if flip { -bi } else { bi.clone() });
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + rows).collect();

    // objective: minimize sum of artificials; reduced costs c_j - c_B B^-1 A_j
    let cost = |j: usize| if j >= n && j < n + rows { Q::one() } else { Q::zero() };
    loop {
        let cb: Vec<Q> = basis.iter().map(|&j| cost(j)).collect();
        let mut entering = None;
        for j in 0..n + rows {
            if basis.contains(&j) {
                continue;
            }
            let col: Vec<Q> = t.iter().map(|r| r[j].clone()).collect();
            let reduced = cost(j) - dot(&cb, &col);
            if reduced.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let Some(e) = entering else { break };
        // ratio test, ties broken by smallest basis index
        let mut leave: Option<(usize, Q)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[e].is_positive() {
                let ratio = &r[width - 1] / &r[e];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((p, _)) = leave else {
            // unbounded phase-one objective cannot happen (bounded below by 0)
            break;
        };
        let inv = Q::one() / &t[p][e];
        for x in t[p].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != p && !t[i][e].is_zero() {
                let f = t[i][e].clone();
                for j in 0..width {
                    let v = &f * &t[p][j];
                    t[i][j] -= v;
                }
            }
        }
        basis[p] = e;
    }
    let mut x: Vec<Q> = (0..n + rows).map(|_| Q::zero()).collect();
    for (i, &j) in basis.iter().enumerate() {
        x[j] = t[i][width - 1].clone();
    }
    if x[n..].iter().any(|v| !v.is_zero()) {
        return None;
    }
    x.truncate(n);
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat_vec;
    use crate::rational::{q, qvec};

    #[test]
    fn simple_feasible() {
        let a = alloc::vec![qvec(&[1, 1, 0]), qvec(&[0, 1, 1])];
        let b = qvec(&[2, 3]);
        let x = feasible(&a, &b).unwrap();
        assert_eq!(mat_vec(&a, &x), b);
        assert!(x.iter().all(|v| !v.is_negative()));
    }

    #[test]
    fn simple_infeasible() {
        let a = alloc::vec![qvec(&[1, 1])];
        assert!(feasible(&a, &[q(-1)]).is_none());
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        let a = alloc::vec![qvec(&[-1, 0]), qvec(&[0, 1])];
        let x = feasible(&a, &qvec(&[-2, 1])).unwrap();
        assert_eq!(x, qvec(&[2, 1]));
    }
}
