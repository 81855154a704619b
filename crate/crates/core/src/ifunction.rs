//! Truncated toric I-functions, their twisted variants and G-blocks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::cohomology::{build_cr_ring, CrRing, HcrClass};
use crate::error::{Error, Result};
use crate::git::{find_box, BoxElement, ChamberData, GitData, Limits, WallSetup};
use crate::linalg::{det, inverse, mat_vec, subsets_of_size, transpose};
use crate::rational::{dot, fmt_vec, frac, neg, q, to_i64, QVec, Q};
use crate::series::{series_mul, sigma_exp, DegreeFunctional, ExponentKey, FormalSeries, Side, Var, ZLaurent};

/// Everything needed to expand the I-function of one quotient.
#[derive(Debug, Clone)]
pub struct SideContext {
    pub side: Side,
    pub var: Var,
    pub data: GitData,
    pub chamber: ChamberData,
    pub boxes: Vec<BoxElement>,
    pub ring: CrRing,
    pub degree: DegreeFunctional,
}

impl SideContext {
    pub fn new(side: Side, var: Var, data: GitData, chamber: ChamberData, boxes: Vec<BoxElement>, basis: Vec<QVec>) -> Result<Self> {
        let ring = build_cr_ring(&data, &chamber.family, &boxes)?;
        let degree = DegreeFunctional::new(chamber.family.omega.clone(), basis)?;
        Ok(SideContext { side, var, data, chamber, boxes, ring, degree })
    }

    pub fn plus(setup: &WallSetup) -> Result<Self> {
        Self::new(
            Side::Plus,
            Var::Y,
            setup.data.clone(),
            setup.chamber_plus.clone(),
            setup.boxes_plus.clone(),
            setup.wall.p_plus.clone(),
        )
    }

    pub fn minus(setup: &WallSetup) -> Result<Self> {
        Self::new(
            Side::Minus,
            Var::YTilde,
            setup.data.clone(),
            setup.chamber_minus.clone(),
            setup.boxes_minus.clone(),
            setup.wall.p_minus.clone(),
        )
    }

    /// A single quotient with no wall; the p-basis is the first basis of
    /// `𝕃̃^∨` found among small vectors of the closed chamber.
    pub fn standalone(data: &GitData, omega: &[Q], limits: &Limits) -> Result<Self> {
        let chamber = crate::git::compute_chamber(data, omega, limits)?;
        let boxes = crate::git::enumerate_boxes(data, &chamber, limits)?;
        let lattice = crate::git::BoxLattice::from_boxes(&boxes);
        let r = data.rank();
        let h = limits.basis_height;
        let mut cands: Vec<QVec> = Vec::new();
        let mut v = alloc::vec![-h; r];
        'outer: loop {
            let c: QVec = v.iter().map(|&x| q(x)).collect();
            if c.iter().any(|x| !x.is_zero()) && lattice.dual_contains(&c) && chamber.contains_closed(&c) {
                cands.push(c);
            }
            for x in v.iter_mut() {
                *x += 1;
                if *x <= h {
                    continue 'outer;
                }
                *x = -h;
            }
            break;
        }
        cands.sort_by(|a, b| {
            let ha = a.iter().map(|x| x.abs()).max();
            let hb = b.iter().map(|x| x.abs()).max();
            ha.cmp(&hb).then_with(|| a.cmp(b))
        });
        let target = q(lattice.index as i64);
        let basis = subsets_of_size(cands.len(), r)
            .into_iter()
            .map(|s| s.iter().map(|&i| cands[i].clone()).collect::<Vec<_>>())
            .find(|b| det(b).abs() == target)
            .ok_or(Error::BasisSearchFailed { bound: h })?;
        Self::new(Side::Plus, Var::Y, data.clone(), chamber, boxes, basis)
    }

    pub fn template(&self, order: &Q) -> FormalSeries {
        FormalSeries::new(self.side, self.var, self.degree.clone(), order.clone())
    }

    /// Index in `boxes`/`ring.sectors` of the sector `[−k]`.
    pub fn sector_of(&self, k: &[Q]) -> Option<usize> {
        find_box(&self.boxes, &neg(k))
    }
}

/// Values `a` of the surviving factors `(u_j + a z)` for `x = D_j · k`, and
/// whether they divide (`x > 0`) or multiply.
pub fn gamma_factor_values(x: &Q) -> (Vec<Q>, bool) {
    let mut vals = Vec::new();
    if x.is_positive() {
        let mut a = x.clone();
        while a.is_positive() {
            vals.push(a.clone());
            a -= Q::one();
        }
        (vals, true)
    } else {
        let mut a = x + Q::one();
        while !a.is_positive() {
            vals.push(a.clone());
            a += Q::one();
        }
        (vals, false)
    }
}

fn apply_gamma_factor(c: ZLaurent, u: &[Q], x: &Q, ring: &CrRing) -> Result<ZLaurent> {
    let (vals, divide) = gamma_factor_values(x);
    let mut c = c;
    for a in vals {
        c = if divide { c.div_linear(u, &a, ring)? } else { c.mul_linear(u, &a, ring) };
    }
    Ok(c)
}

/// The pre-cancelled Gamma quotient for index `j` at `k`, as a class in the
/// whole product ring.
pub fn gamma_quotient_factor(ctx: &SideContext, j: usize, k: &[Q]) -> Result<ZLaurent> {
    let x = dot(ctx.data.char(j), k);
    apply_gamma_factor(ZLaurent::from_class(ctx.ring.one(), 0), &ctx.ring.u(j), &x, &ctx.ring)
}

/// `I_k`, supported on the sector `[−k]`. Zero if `[−k]` is not a box element.
pub fn i_coefficient(ctx: &SideContext, k: &[Q]) -> Result<ZLaurent> {
    let Some(sector) = ctx.sector_of(k) else {
        return Ok(ZLaurent::zero());
    };
    let mut c = ZLaurent::from_class(ctx.ring.unit(sector), 0);
    for j in 0..ctx.data.num_chars() {
        let x = dot(ctx.data.char(j), k);
        c = apply_gamma_factor(c, &ctx.ring.u(j), &x, &ctx.ring)?;
        if c.is_zero() {
            break;
        }
    }
    Ok(c)
}

/// Indices `k ∈ 𝕃̃ ∩ C^∨` with `deg(k) ≤ N` whose sector `[−k]` exists.
pub fn enumerate_indices(ctx: &SideContext, order: &Q) -> Vec<QVec> {
    let r = ctx.data.rank();
    let bounds: Vec<i64> = (0..r)
        .map(|i| {
            let p = &ctx.degree.basis[i];
            let m = ctx
                .chamber
                .inequalities
                .iter()
                .map(|n| dot(p, n) / dot(&ctx.degree.omega_hat, n))
                .max()
                .unwrap_or_else(Q::zero);
            (order * m).floor().to_integer().try_into().unwrap_or(i64::MAX)
        })
        .collect();
    let mut out = Vec::new();
    let mut e = alloc::vec![0i64; r];
    'outer: loop {
        let ev: QVec = e.iter().map(|&x| q(x)).collect();
        let k = ctx.degree.k_of(&ev);
        if ctx.degree.deg_k(&k) <= *order && ctx.chamber.dual_contains(&k) && ctx.sector_of(&k).is_some() {
            out.push(k);
        }
        for i in 0..r {
            e[i] += 1;
            if e[i] <= bounds[i] {
                continue 'outer;
            }
            e[i] = 0;
        }
        break;
    }
    out.sort_by(|a, b| ctx.degree.deg_k(a).cmp(&ctx.degree.deg_k(b)).then_with(|| a.cmp(b)));
    out
}

/// `Σ_k y^k I_k` without the `z e^{σ/z}` prefactor; all log powers zero.
pub fn build_coefficients(ctx: &SideContext, order: &Q) -> Result<FormalSeries> {
    build_coefficients_with(ctx, order, |_, c| Ok(c))
}

fn build_coefficients_with<F>(ctx: &SideContext, order: &Q, mut modify: F) -> Result<FormalSeries>
where
    F: FnMut(&[Q], ZLaurent) -> Result<ZLaurent>,
{
    let mut out = ctx.template(order);
    let r = ctx.data.rank();
    for k in enumerate_indices(ctx, order) {
        let c = modify(&k, i_coefficient(ctx, &k)?)?;
        let key = out.key(ctx.degree.e_of(&k), alloc::vec![0; r]);
        out.add_term(key, &c);
    }
    Ok(out)
}

/// `z e^{σ/z} · coeffs`.
pub fn with_prefactor(ctx: &SideContext, coeffs: &FormalSeries) -> Result<FormalSeries> {
    let sigma = sigma_exp(coeffs, &ctx.ring);
    Ok(series_mul(&sigma, coeffs, &ctx.ring)?.shift_z(1))
}

pub fn build_i(ctx: &SideContext, order: &Q) -> Result<FormalSeries> {
    with_prefactor(ctx, &build_coefficients(ctx, order)?)
}

/// Line bundles for a complete intersection.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistData {
    pub e_vecs: Vec<QVec>,
}

/// Twist data resolved on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct SideTwist {
    pub e_vecs: Vec<QVec>,
    /// `v_j = θ(E_j)` in the product ring.
    pub v: Vec<HcrClass>,
    /// `b_j^i`: coordinates of `E_j` in the p-basis.
    pub b: Vec<QVec>,
}

impl TwistData {
    /// Checks that each `E_j` lies in the wall closure and resolves it on a side.
    pub fn resolve(&self, ctx: &SideContext, wall_e: &[Q]) -> Result<SideTwist> {
        let r = ctx.data.rank();
        let pt = transpose(&ctx.degree.basis);
        let inv = inverse(&pt).ok_or_else(|| Error::BasisRejected("p-basis is singular".into()))?;
        let mut v = Vec::new();
        let mut b = Vec::new();
        for ej in &self.e_vecs {
            if ej.len() != r {
                return Err(Error::InvalidData(format!("twist {} has wrong length", fmt_vec(ej))));
            }
            if !dot(ej, wall_e).is_zero() || !ctx.chamber.contains_closed(ej) {
                return Err(Error::InvalidData(format!("twist {} is not in the wall closure", fmt_vec(ej))));
            }
            let coords = mat_vec(&inv, ej);
            if !coords[r - 1].is_zero() {
                return Err(Error::InvalidData(format!("twist {} has a component along p_r", fmt_vec(ej))));
            }
            v.push(ctx.ring.theta(ej));
            b.push(coords);
        }
        Ok(SideTwist { e_vecs: self.e_vecs.clone(), v, b })
    }
}

/// `E_j · k` as an integer, or `NonIntegralPairing`.
pub fn integral_pairing(j: usize, ej: &[Q], k: &[Q]) -> Result<i64> {
    let x = dot(ej, k);
    to_i64(&x).ok_or_else(|| Error::NonIntegralPairing { index: j, value: crate::rational::fmt_q(&x) })
}

/// `∏_j ∏_{a=1}^{E_j·k} (v_j + a z)`.
pub fn twist_factor(k: &[Q], twist: &SideTwist, ring: &CrRing) -> Result<ZLaurent> {
    let mut c = ZLaurent::from_class(ring.one(), 0);
    for (j, (ej, v)) in twist.e_vecs.iter().zip(&twist.v).enumerate() {
        let n = integral_pairing(j, ej, k)?;
        for a in 1..=n {
            c = c.mul_linear(v, &q(a), ring);
        }
    }
    Ok(c)
}

/// `e(E) = ∏_j v_j`.
pub fn euler_class(twist: &SideTwist, ring: &CrRing) -> HcrClass {
    twist.v.iter().fold(ring.one(), |acc, v| ring.mul(&acc, v))
}

pub fn build_i_twisted(ctx: &SideContext, twist: &SideTwist, order: &Q) -> Result<FormalSeries> {
    let coeffs = build_coefficients_with(ctx, order, |k, c| Ok(c.mul(&twist_factor(k, twist, &ctx.ring)?, &ctx.ring)))?;
    with_prefactor(ctx, &coeffs)
}

pub fn build_i_y(ctx: &SideContext, twist: &SideTwist, order: &Q) -> Result<FormalSeries> {
    let tw = build_i_twisted(ctx, twist, order)?;
    Ok(tw.mul_class(&euler_class(twist, &ctx.ring), &ctx.ring))
}

/// Block label: the exponents of `y_1..y_{r-1}`.
pub fn block_label(key: &ExponentKey) -> QVec {
    key.e[..key.e.len() - 1].to_vec()
}

/// The terms with `p_i · l = p_i · k` for `i < r`.
pub fn group_g(series: &FormalSeries, label: &[Q]) -> FormalSeries {
    let mut out = series.empty_like();
    for (k, c) in &series.terms {
        if block_label(k) == label {
            out.terms.insert(k.clone(), c.clone());
        }
    }
    out
}

/// All G-blocks, keyed by label.
pub fn g_blocks(series: &FormalSeries) -> BTreeMap<QVec, FormalSeries> {
    let mut out: BTreeMap<QVec, FormalSeries> = BTreeMap::new();
    for (k, c) in &series.terms {
        out.entry(block_label(k)).or_insert_with(|| series.empty_like()).terms.insert(k.clone(), c.clone());
    }
    out
}

/// A failed per-term check.
#[derive(Debug, Clone, PartialEq)]
pub struct TermViolation {
    pub k: QVec,
    pub detail: alloc::string::String,
}

/// Checks that every term of `z^{-1} I` has degree `−age` of its sector, with
/// `deg z = deg u_j = 1`, `deg y^k = ρ̂ · k`, and that `I_k` lives on `[−k]`.
pub fn homogeneity_check(ctx: &SideContext, full: &FormalSeries) -> Vec<TermViolation> {
    let rho = ctx.data.rho_hat();
    let mut out = Vec::new();
    for (key, c) in &full.terms {
        let k = ctx.degree.k_of(&key.e);
        let yk = dot(&rho, &k);
        let home = ctx.sector_of(&k);
        for (n, class) in &c.terms {
            for (idx, x) in class.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let (s, _) = ctx.ring.locate(idx);
                if Some(s) != home {
                    out.push(TermViolation { k: k.clone(), detail: format!("component outside sector [-k] in sector {s}") });
                    continue;
                }
                let total = q(n - 1) + q(ctx.ring.degree_of(idx) as i64) + &yk;
                let want = -ctx.ring.sectors[s].sector.age.clone();
                if total != want {
                    out.push(TermViolation {
                        k: k.clone(),
                        detail: format!("degree {} but sector age {}", crate::rational::fmt_q(&total), crate::rational::fmt_q(&want)),
                    });
                }
            }
        }
    }
    out
}

/// Fractional parts `⟨D_j · k⟩` vanish for `j ∈ I_{[−k]}`: a quick consistency probe.
pub fn support_of(ctx: &SideContext, k: &[Q]) -> Vec<usize> {
    (0..ctx.data.num_chars()).filter(|&j| frac(&dot(ctx.data.char(j), k)).is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::git::compute_wall_crossing;
    use crate::rational::{qr, qvec};

    fn p2() -> SideContext {
        let data = GitData::new(1, alloc::vec![qvec(&[1]); 3], qvec(&[1]), qvec(&[1])).unwrap();
        SideContext::standalone(&data, &qvec(&[1]), &Limits::default()).unwrap()
    }

    fn fixture_a() -> WallSetup {
        let data = GitData::new(
            2,
            alloc::vec![qvec(&[1, 1]), qvec(&[1, 1]), qvec(&[1, 0]), qvec(&[0, -1])],
            qvec(&[2, 1]),
            qvec(&[2, -1]),
        )
        .unwrap();
        compute_wall_crossing(&data, None, &Limits::default()).unwrap()
    }

    #[test]
    fn gamma_factor_cases() {
        assert_eq!(gamma_factor_values(&q(0)), (alloc::vec![], false));
        assert_eq!(gamma_factor_values(&q(2)), (alloc::vec![q(2), q(1)], true));
        assert_eq!(gamma_factor_values(&q(-1)), (alloc::vec![q(0)], false));
        assert_eq!(gamma_factor_values(&qr(5, 3)), (alloc::vec![qr(5, 3), qr(2, 3)], true));
        assert_eq!(gamma_factor_values(&qr(-4, 3)), (alloc::vec![qr(-1, 3)], false));
    }

    #[test]
    fn p2_first_coefficient() {
        let ctx = p2();
        let c = i_coefficient(&ctx, &qvec(&[1])).unwrap();
        let h = ctx.ring.theta(&qvec(&[1]));
        let h2 = ctx.ring.mul(&h, &h);
        let mut want = ZLaurent::from_class(ctx.ring.one(), -3);
        want.add_assign(&ZLaurent::from_class(h.clone(), -4).scale(&q(-3)));
        want.add_assign(&ZLaurent::from_class(h2, -5).scale(&q(6)));
        assert_eq!(c, want);
    }

    #[test]
    fn constant_term_and_counts() {
        let ctx = p2();
        let i = build_i(&ctx, &q(2)).unwrap();
        let key = i.key(qvec(&[0]), alloc::vec![0]);
        assert_eq!(i.terms[&key], ZLaurent::from_class(ctx.ring.one(), 1));
        assert_eq!(enumerate_indices(&ctx, &q(2)).len(), 3);
    }

    #[test]
    fn coefficients_vanish_outside_dual_cone() {
        let setup = fixture_a();
        let ctx = SideContext::plus(&setup).unwrap();
        // (0,-1) pairs negatively with the ray (1,1) of C_+
        for k in [qvec(&[0, -1]), qvec(&[1, -2]), qvec(&[-1, 0])] {
            assert!(!ctx.chamber.dual_contains(&k));
            assert!(i_coefficient(&ctx, &k).unwrap().is_zero());
        }
        assert!(!i_coefficient(&ctx, &qvec(&[1, -1])).unwrap().is_zero());
    }

    #[test]
    fn homogeneous_terms() {
        let setup = fixture_a();
        for ctx in [SideContext::plus(&setup).unwrap(), SideContext::minus(&setup).unwrap()] {
            let i = build_i(&ctx, &q(4)).unwrap();
            assert!(homogeneity_check(&ctx, &i).is_empty());
        }
    }

    #[test]
    fn blocks_partition_series() {
        let setup = fixture_a();
        let ctx = SideContext::plus(&setup).unwrap();
        let i = build_i(&ctx, &q(4)).unwrap();
        let blocks = g_blocks(&i);
        let total: usize = blocks.values().map(|b| b.terms.len()).sum();
        assert_eq!(total, i.terms.len());
        assert!(blocks[&qvec(&[0])].terms.keys().any(|k| k.e == qvec(&[0, 0])));
    }

    #[test]
    fn twist_factor_expansion() {
        let setup = fixture_a();
        let ctx = SideContext::plus(&setup).unwrap();
        let tw = TwistData { e_vecs: alloc::vec![qvec(&[1, 0])] }.resolve(&ctx, &setup.wall.e).unwrap();
        assert_eq!(tw.b, alloc::vec![qvec(&[1, 0])]);
        // E.k = 2: (v+z)(v+2z) = v^2 + 3vz + 2z^2
        let f = twist_factor(&qvec(&[2, 0]), &tw, &ctx.ring).unwrap();
        let v = &tw.v[0];
        let mut want = ZLaurent::from_class(ctx.ring.one(), 2).scale(&q(2));
        want.add_assign(&ZLaurent::from_class(v.clone(), 1).scale(&q(3)));
        want.add_assign(&ZLaurent::from_class(ctx.ring.mul(v, v), 0));
        assert_eq!(f, want);
        assert_eq!(twist_factor(&qvec(&[0, 1]), &tw, &ctx.ring).unwrap(), ZLaurent::from_class(ctx.ring.one(), 0));
        let bad = TwistData { e_vecs: alloc::vec![qvec(&[0, 1])] };
        assert!(bad.resolve(&ctx, &setup.wall.e).is_err());
    }

    #[test]
    fn empty_twist_is_plain() {
        let setup = fixture_a();
        let ctx = SideContext::plus(&setup).unwrap();
        let tw = TwistData { e_vecs: alloc::vec![] }.resolve(&ctx, &setup.wall.e).unwrap();
        assert_eq!(build_i_twisted(&ctx, &tw, &q(3)).unwrap(), build_i(&ctx, &q(3)).unwrap());
    }
}
