//! Polyhedral cones in ℚ^r by brute-force duality.
//!
//! A cone is either given by generators (V-description) or by inequalities
//! `n · x ≥ 0` (H-description). Facets of `cone(G)` and extreme rays of
//! `{x : n · x ≥ 0}` are computed by the same routine, [`dual_extreme`].

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::linalg::{nullspace, rank, subsets_of_size};
use crate::rational::{dot, neg, primitive, QVec};

/// Primitive vectors `x ≠ 0` with `v · x ≥ 0` for every `v` that are tight on
/// a rank `dim - 1` subfamily of `vs`, sorted and deduplicated.
///
/// For `vs` spanning ℚ^dim these are the extreme rays of `{x : v · x ≥ 0}`,
/// equivalently the facet normals of `cone(vs)`.
pub fn dual_extreme(vs: &[QVec], dim: usize) -> Vec<QVec> {
    let mut out: Vec<QVec> = Vec::new();
    let consider = |x: QVec, out: &mut Vec<QVec>| {
        if vs.iter().all(|v| !dot(v, &x).is_negative()) {
            let p = primitive(&x);
            if !out.contains(&p) {
                out.push(p);
            }
        }
    };
    if dim == 0 {
        return out;
    }
    // distinct rows only; duplicates do not change the cone
    let mut rows: Vec<QVec> = Vec::new();
    for v in vs {
        if !v.iter().all(Zero::is_zero) && !rows.contains(v) {
            rows.push(v.clone());
        }
    }
    for subset in subsets_of_size(rows.len(), dim - 1) {
        let sel: Vec<QVec> = subset.iter().map(|&i| rows[i].clone()).collect();
        if dim > 1 && rank(&sel) != dim - 1 {
            continue;
        }
        let ns = nullspace(&sel, dim);
        if ns.len() != 1 {
            continue;
        }
        consider(ns[0].clone(), &mut out);
        consider(neg(&ns[0]), &mut out);
    }
    out.sort();
    out
}

/// Facet normals of `cone(gens)`; requires the cone to be full-dimensional.
pub fn facet_normals(gens: &[QVec], dim: usize) -> Vec<QVec> {
    dual_extreme(gens, dim)
}

/// Extreme rays of `{x : n · x ≥ 0 for n in ineqs}`; requires the cone to be pointed.
pub fn extreme_rays(ineqs: &[QVec], dim: usize) -> Vec<QVec> {
    dual_extreme(ineqs, dim)
}

pub fn satisfies(ineqs: &[QVec], x: &[crate::Q]) -> bool {
    ineqs.iter().all(|n| !dot(n, x).is_negative())
}

pub fn strictly_satisfies(ineqs: &[QVec], x: &[crate::Q]) -> bool {
    ineqs.iter().all(|n| dot(n, x).is_positive())
}

/// Drops inequalities implied by the others: keeps only those that are facet
/// normals of the cone they jointly define.
pub fn irredundant(ineqs: &[QVec], dim: usize) -> Vec<QVec> {
    // the facet normals of the cone cut out by `ineqs` are the extreme rays of C^∨
    dual_extreme(&extreme_rays(ineqs, dim), dim)
}
