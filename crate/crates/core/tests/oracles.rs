mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use num_traits::{One, Zero};
use wallcross_core::git::{compute_anticone_family, compute_chamber, enumerate_boxes, GitData, Limits};
use wallcross_core::ifunction::{i_coefficient, SideContext};
use wallcross_core::linalg::rank;
use wallcross_core::rational::{dot, is_integer, q, qr, qvec, QVec};
use wallcross_core::series::ZLaurent;
use wallcross_core::Q;

fn omegas(d: &GitData) -> Vec<QVec> {
    vec![d.omega_plus().clone(), d.omega_minus().clone()]
}

#[test]
fn anticone_families_match_subset_scan() {
    for d in [p2(), fixture_a(), fixture_b()] {
        for w in omegas(&d) {
            let fam = compute_anticone_family(&d, &w, &Limits::default()).unwrap();
            let got: BTreeSet<Vec<usize>> = fam.members.iter().cloned().collect();
            let want: BTreeSet<Vec<usize>> = brute_family(&d, &w).into_iter().collect();
            assert_eq!(got, want, "omega {w:?}");
        }
    }
}

#[test]
fn chambers_match_cone_intersection() {
    for d in [p2(), fixture_a(), fixture_b()] {
        for w in omegas(&d) {
            let ch = compute_chamber(&d, &w, &Limits::default()).unwrap();
            let fam = brute_family(&d, &w);
            for x in lattice_points(d.rank(), 6) {
                let want = fam.iter().all(|s| brute_in_closed_cone(d.chars(), s, &x));
                assert_eq!(ch.contains_closed(&x), want, "omega {w:?}, x {x:?}");
            }
            assert!(ch.contains_closed(&w));
        }
    }
}

#[test]
fn boxes_match_denominator_scan() {
    for d in [p2(), fixture_a(), fixture_b()] {
        for w in omegas(&d) {
            let ch = compute_chamber(&d, &w, &Limits::default()).unwrap();
            let got: BTreeSet<QVec> = enumerate_boxes(&d, &ch, &Limits::default()).unwrap().into_iter().map(|b| b.f).collect();
            let fam: BTreeSet<Vec<usize>> = brute_family(&d, &w).into_iter().collect();
            let mut want = BTreeSet::new();
            let r = d.rank();
            let mut num = vec![0i64; r];
            let mut den = vec![1i64; r];
            'scan: loop {
                let f: QVec = num.iter().zip(&den).map(|(a, b)| qr(*a, *b)).collect();
                let support: Vec<usize> = (0..d.num_chars()).filter(|&j| is_integer(&dot(d.char(j), &f))).collect();
                if fam.contains(&support) {
                    want.insert(f);
                }
                let mut i = 0;
                loop {
                    if i == r {
                        break 'scan;
                    }
                    num[i] += 1;
                    if num[i] < den[i] {
                        break;
                    }
                    num[i] = 0;
                    den[i] += 1;
                    if den[i] <= 12 {
                        break;
                    }
                    den[i] = 1;
                    i += 1;
                }
            }
            assert_eq!(got, want, "omega {w:?}");
        }
    }
}

type Poly = BTreeMap<Vec<u32>, Q>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let e = out.entry(m).or_insert_with(Q::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn monomials(r: usize, deg: u32) -> Vec<Vec<u32>> {
    if r == 1 {
        return vec![vec![deg]];
    }
    (0..=deg)
        .flat_map(|a| monomials(r - 1, deg - a).into_iter().map(move |mut m| {
            m.insert(0, a);
            m
        }))
        .collect()
}

/// `dim ℚ[p]/SR_f` by ranks of the graded relation spaces.
fn sector_dimension(d: &GitData, fam: &BTreeSet<Vec<usize>>, support: &[usize], top: u32) -> usize {
    let r = d.rank();
    let has_member = |s: &[usize]| fam.iter().any(|m| m.iter().all(|j| s.contains(j)));
    let linear = |j: usize| -> Poly {
        (0..r)
            .filter(|&a| !d.char(j)[a].is_zero())
            .map(|a| {
                let mut m = vec![0; r];
                m[a] = 1;
                (m, d.char(j)[a].clone())
            })
            .collect()
    };
    let mut gens = Vec::new();
    for mask in 1u32..1 << support.len() {
        let j_set: Vec<usize> = (0..support.len()).filter(|i| mask >> i & 1 == 1).map(|i| support[i]).collect();
        let rest: Vec<usize> = support.iter().copied().filter(|j| !j_set.contains(j)).collect();
        if !has_member(&rest) {
            let one: Poly = [(vec![0; r], Q::one())].into_iter().collect();
            gens.push((j_set.len() as u32, j_set.iter().fold(one, |acc, &j| poly_mul(&acc, &linear(j)))));
        }
    }
    let mut total = 0;
    for deg in 0..=top {
        let basis = monomials(r, deg);
        let mut rows: Vec<QVec> = Vec::new();
        for (gd, g) in &gens {
            if *gd > deg {
                continue;
            }
            for m in monomials(r, deg - gd) {
                let mono: Poly = [(m, Q::one())].into_iter().collect();
                let p = poly_mul(&mono, g);
                rows.push(basis.iter().map(|b| p.get(b).cloned().unwrap_or_else(Q::zero)).collect());
            }
        }
        let dim = basis.len() - if rows.is_empty() { 0 } else { rank(&rows) };
        if deg == top {
            assert_eq!(dim, 0, "ring does not vanish in degree {top}");
        }
        total += dim;
    }
    total
}

#[test]
fn cohomology_dimensions_match_linear_algebra() {
    let cases: Vec<(GitData, QVec, usize)> = vec![
        (p2(), qvec(&[1]), 3),
        (fixture_a(), qvec(&[2, 1]), 4),
        (fixture_a(), qvec(&[2, -1]), 3),
        (fixture_b(), qvec(&[1, 1]), 5),
        (fixture_b(), qvec(&[4, 1]), 4),
    ];
    for (d, w, expected) in cases {
        let ctx = SideContext::standalone(&d, &w, &Limits::default()).unwrap();
        let fam: BTreeSet<Vec<usize>> = brute_family(&d, &w).into_iter().collect();
        let top = (d.num_chars() - d.rank()) as u32 + 1;
        let recomputed: usize = ctx.boxes.iter().map(|b| sector_dimension(&d, &fam, &b.support, top)).sum();
        assert_eq!(ctx.ring.dim(), expected, "omega {w:?}");
        assert_eq!(recomputed, expected, "omega {w:?}");
        for (s, b) in ctx.ring.sectors.iter().zip(&ctx.boxes) {
            assert_eq!(s.dim(), sector_dimension(&d, &fam, &b.support, top));
        }
    }
}

#[test]
fn p2_coefficients_invert_the_hyperplane_products() {
    // I_d ∏_{a=1}^d (H + az)^3 = 1
    let ctx = SideContext::standalone(&p2(), &qvec(&[1]), &Limits::default()).unwrap();
    let h = ctx.ring.u(0);
    let one = ZLaurent::from_class(ctx.ring.one(), 0);
    for d in 0..6 {
        let mut c = i_coefficient(&ctx, &qvec(&[d])).unwrap();
        for a in 1..=d {
            for _ in 0..3 {
                c = c.mul_linear(&h, &q(a), &ctx.ring);
            }
        }
        assert_eq!(c, one, "degree {d}");
    }
    // negative degrees vanish: (H)^3 = 0 kills them
    assert!(i_coefficient(&ctx, &qvec(&[-1])).unwrap().is_zero());
}

#[test]
fn wall_data_fixture_b() {
    let s = setup(&fixture_b());
    let w = &s.wall;
    assert_eq!(w.e, qvec(&[-1, 3]));
    assert_eq!(w.discrepancy_sum, q(1));
    assert_eq!(w.p_plus, vec![qvec(&[3, 1]), qvec(&[0, 1])]);
    assert_eq!(w.p_minus, vec![qvec(&[3, 1]), qvec(&[1, 0])]);
    assert_eq!(w.c, q(3));
    assert_eq!(w.c_i, vec![q(1)]);
    assert!(s.chamber_plus.extended_weak_fano);
    assert_eq!(s.boxes_plus.len(), 3);
}

#[test]
fn wall_data_fixture_a() {
    let s = setup(&fixture_a());
    assert_eq!(s.wall.e, qvec(&[0, 1]));
    assert_eq!(s.wall.c, q(1));
    assert!(s.chamber_plus.extended_weak_fano);
    // p_r^+ = Σ c_i p_i − c p_r^-
    let r = s.wall.p_plus.len();
    for a in 0..2 {
        let mut rhs = -&s.wall.c * &s.wall.p_minus[r - 1][a];
        for (ci, pi) in s.wall.c_i.iter().zip(&s.wall.p_minus) {
            rhs += ci * &pi[a];
        }
        assert_eq!(s.wall.p_plus[r - 1][a], rhs);
    }
}
