#![allow(dead_code)]

use wallcross_core::git::{compute_wall_crossing, GitData, Limits, WallSetup};
use wallcross_core::rational::{dot, qvec, QVec};
use wallcross_core::Q;

pub fn p2() -> GitData {
    GitData::new(1, vec![qvec(&[1]); 3], qvec(&[1]), qvec(&[1])).unwrap()
}

/// Bl_pt P² on the plus side, P² on the minus side.
pub fn fixture_a() -> GitData {
    GitData::new(2, vec![qvec(&[1, 1]), qvec(&[1, 1]), qvec(&[1, 0]), qvec(&[0, -1])], qvec(&[2, 1]), qvec(&[2, -1])).unwrap()
}

/// P(1,1,3) on the plus side.
pub fn fixture_b() -> GitData {
    GitData::new(2, vec![qvec(&[1, 0]), qvec(&[1, 0]), qvec(&[3, 1]), qvec(&[0, 1])], qvec(&[1, 1]), qvec(&[4, 1])).unwrap()
}

pub fn setup(d: &GitData) -> WallSetup {
    compute_wall_crossing(d, None, &Limits::default()).unwrap()
}

fn integer_box(r: usize, b: i64) -> Vec<QVec> {
    let mut out = Vec::new();
    let mut v = vec![-b; r];
    loop {
        out.push(qvec(&v));
        let mut i = 0;
        loop {
            if i == r {
                return out;
            }
            v[i] += 1;
            if v[i] <= b {
                break;
            }
            v[i] = -b;
            i += 1;
        }
    }
}

/// Functionals nonnegative on `cone(D_I)`, found by scanning small integer vectors.
fn dual_certificates(chars: &[QVec], subset: &[usize], r: usize) -> Vec<QVec> {
    integer_box(r, 6)
        .into_iter()
        .filter(|n| subset.iter().all(|&j| dot(n, &chars[j]) >= Q::from_integer(0.into())))
        .collect()
}

/// `ω` in the relative interior of `cone(D_I)`: no functional separates it.
pub fn brute_in_anticone(chars: &[QVec], subset: &[usize], omega: &[Q]) -> bool {
    let zero = Q::from_integer(0.into());
    for n in dual_certificates(chars, subset, omega.len()) {
        let w = dot(&n, omega);
        if w < zero {
            return false;
        }
        if w == zero && subset.iter().any(|&j| dot(&n, &chars[j]) != zero) {
            return false;
        }
    }
    true
}

pub fn brute_in_closed_cone(chars: &[QVec], subset: &[usize], x: &[Q]) -> bool {
    let zero = Q::from_integer(0.into());
    dual_certificates(chars, subset, x.len()).iter().all(|n| dot(n, x) >= zero)
}

pub fn all_subsets(m: usize) -> Vec<Vec<usize>> {
    (0u32..1 << m).map(|mask| (0..m).filter(|j| mask >> j & 1 == 1).collect()).collect()
}

pub fn brute_family(d: &GitData, omega: &[Q]) -> Vec<Vec<usize>> {
    all_subsets(d.num_chars()).into_iter().filter(|s| brute_in_anticone(d.chars(), s, omega)).collect()
}

pub fn lattice_points(r: usize, b: i64) -> Vec<QVec> {
    integer_box(r, b)
}
