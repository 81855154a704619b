//! Log-derivations, GKZ operators, fractional x-derivatives and the
//! regularized operators, together with the exact annihilation checks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ifunction::{build_i, SideContext, SideTwist};
use crate::linalg::{inverse, mat_vec, transpose};
use crate::rational::{dot, fmt_q, fmt_vec, is_integer, q, sub, to_i64, unit_vec, QVec, Q};
use crate::resummation::{RegKey, RegSeries};
use crate::series::{combined_derivation, FormalSeries, ZLaurent};

/// `Σ_i a^i y_i ∂/∂y_i` for a covector written in the p-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDerivation {
    pub coeffs: QVec,
}

impl LogDerivation {
    /// The derivation with `∂ y^d = (ξ · d) y^d`.
    pub fn for_covector(ctx: &SideContext, xi: &[Q]) -> Result<Self> {
        let inv = inverse(&transpose(&ctx.degree.basis)).ok_or_else(|| Error::BasisRejected("p-basis is singular".into()))?;
        Ok(LogDerivation { coeffs: mat_vec(&inv, xi) })
    }

    pub fn apply(&self, s: &FormalSeries) -> FormalSeries {
        combined_derivation(&self.coeffs, s)
    }

    /// `z ∂ − l z`.
    pub fn apply_shifted(&self, s: &FormalSeries, l: &Q) -> FormalSeries {
        let mut out = self.apply(s);
        for (k, c) in &s.terms {
            out.add_term(k.clone(), &c.scale(&-l.clone()));
        }
        out.shift_z(1)
    }
}

/// `Δ_d`: left word `∏_{d_j>0} ∏_{l<d_j} (z∂_j − lz)`, right word `y^d ∏_{d_j<0} …`.
#[derive(Debug, Clone, PartialEq)]
pub struct GkzOperator {
    pub d: QVec,
    pub left: Vec<(usize, Q)>,
    pub right: Vec<(usize, Q)>,
}

impl GkzOperator {
    pub fn new(ctx: &SideContext, d: &[Q]) -> Result<Self> {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for j in 0..ctx.data.num_chars() {
            let dj = dot(ctx.data.char(j), d);
            let n = to_i64(&dj).ok_or_else(|| Error::NonIntegralPairing { index: j, value: fmt_q(&dj) })?;
            for l in 0..n.abs() {
                if n > 0 {
                    left.push((j, q(l)));
                } else {
                    right.push((j, q(l)));
                }
            }
        }
        Ok(GkzOperator { d: d.to_vec(), left, right })
    }

    pub fn is_zero(&self) -> bool {
        self.left.is_empty() && self.right.is_empty() && self.d.iter().all(Zero::is_zero)
    }
}

fn apply_word(ctx: &SideContext, word: &[(usize, Q)], s: &FormalSeries) -> Result<FormalSeries> {
    let mut cur = s.clone();
    // rightmost factor acts first
    for (j, l) in word.iter().rev() {
        let der = LogDerivation::for_covector(ctx, ctx.data.char(*j))?;
        cur = der.apply_shifted(&cur, l);
    }
    Ok(cur)
}

/// `Δ_d s`, untruncated.
pub fn apply_gkz(ctx: &SideContext, op: &GkzOperator, s: &FormalSeries) -> Result<FormalSeries> {
    if op.is_zero() {
        return Ok(s.empty_like());
    }
    let left = apply_word(ctx, &op.left, s)?;
    let right = apply_word(ctx, &op.right, s)?.mul_monomial(&ctx.degree.e_of(&op.d));
    let mut out = left;
    for (k, c) in right.terms {
        out.add_term(k, &c.scale(&-Q::one()));
    }
    Ok(out)
}

/// Outcome of one degree in an annihilation check.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeCheck {
    pub d: QVec,
    /// Indices `k` with both `k` and `k − d` inside the truncation.
    pub checked: usize,
    /// Nonzero residual terms inside the window (a failure if nonempty).
    pub residuals: Vec<String>,
    /// Count of `1/Γ` reductions that hit a pole (regularized checks only).
    pub pole_flags: usize,
}

impl DegreeCheck {
    pub fn pass(&self) -> bool {
        self.residuals.is_empty()
    }
}

/// A lattice basis of `𝕃` plus every nonzero `d` with `‖d‖_∞ ≤ 2`.
pub fn default_degrees(r: usize) -> Vec<QVec> {
    let mut out: Vec<QVec> = (0..r).map(|i| unit_vec(r, i)).collect();
    let mut v = alloc::vec![-2i64; r];
    'outer: loop {
        let d: QVec = v.iter().map(|&x| q(x)).collect();
        if v.iter().any(|&x| x != 0) && !out.contains(&d) {
            out.push(d);
        }
        for x in v.iter_mut() {
            *x += 1;
            if *x <= 2 {
                continue 'outer;
            }
            *x = -2;
        }
        break;
    }
    out
}

fn describe(k: &[Q], detail: &str) -> String {
    format!("k={} {}", fmt_vec(k), detail)
}

/// Checks `Δ_d I = 0` on the reliable window for each degree.
pub fn annihilation_check(ctx: &SideContext, degrees: &[QVec], order: &Q) -> Result<Vec<DegreeCheck>> {
    let series = build_i(ctx, order)?;
    let indices = crate::ifunction::enumerate_indices(ctx, order);
    let mut out = Vec::new();
    for d in degrees {
        let op = GkzOperator::new(ctx, d)?;
        let res = apply_gkz(ctx, &op, &series)?;
        let mut residuals = Vec::new();
        for (key, c) in &res.terms {
            let k = ctx.degree.k_of(&key.e);
            if ctx.degree.deg_k(&k) <= *order && ctx.degree.deg_k(&sub(&k, d)) <= *order && !c.is_zero() {
                residuals.push(describe(&k, &format!("logs={:?}", key.logs)));
            }
        }
        let checked = indices.iter().filter(|k| ctx.degree.deg_k(&sub(k, d)) <= *order).count();
        out.push(DegreeCheck { d: d.clone(), checked, residuals, pole_flags: 0 });
    }
    Ok(out)
}

/// `Γ(arg + ν)` with `ν` the side's fixed nilpotent part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GammaSymbol {
    pub arg: Q,
}

impl GammaSymbol {
    pub fn new(arg: Q) -> Self {
        GammaSymbol { arg }
    }

    /// `(b0, n)` with `arg = b0 + n`, `b0 ∈ (0, 1]`.
    pub fn canonical(&self) -> (Q, i64) {
        let n = self.arg.ceil() - Q::one();
        let b0 = &self.arg - &n;
        (b0, to_i64(&n).unwrap_or(0))
    }

    /// `R` with `1/Γ(arg+ν) = R / Γ(b0+ν)`, and whether a factor `(0 + ν)`
    /// was used (a pole of `Γ` at zero nilpotent part).
    pub fn reciprocal_reduction(&self, nu: &ZLaurent, ring: &crate::cohomology::CrRing) -> Result<(ZLaurent, bool)> {
        let (b0, n) = self.canonical();
        let one = ZLaurent::from_class(ring.one(), 0);
        let mut r = one.clone();
        let mut pole = false;
        if n > 0 {
            for i in 0..n {
                let c = &b0 + q(i);
                r = r.mul(&ZLaurent::inverse_unipotent(&c, nu, ring)?, ring);
            }
        } else {
            for i in 0..(-n) {
                let c = &self.arg + q(i);
                if c.is_zero() {
                    pole = true;
                }
                r = r.mul(&one.scale(&c).add(nu), ring);
            }
        }
        Ok((r, pole))
    }
}

/// Result of `(d/dx)^a x^μ = Γ(1+μ)/Γ(1+μ−a) x^{μ−a}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracDerivative {
    pub numer: GammaSymbol,
    pub denom: GammaSymbol,
    pub exponent: Q,
}

pub fn frac_derivative_monomial(a: &Q, mu: &Q) -> FracDerivative {
    FracDerivative {
        numer: GammaSymbol::new(Q::one() + mu),
        denom: GammaSymbol::new(Q::one() + mu - a),
        exponent: mu - a,
    }
}

impl FracDerivative {
    /// The Gamma ratio as an exact polynomial when `a` is an integer.
    /// Returns `Ok(None)` when the arguments do not differ by an integer.
    pub fn reduced(&self, nu: &ZLaurent, ring: &crate::cohomology::CrRing) -> Result<Option<(ZLaurent, bool)>> {
        let diff = &self.numer.arg - &self.denom.arg;
        if !is_integer(&diff) {
            return Ok(None);
        }
        let n = to_i64(&diff).unwrap_or(0);
        let one = ZLaurent::from_class(ring.one(), 0);
        let mut r = one.clone();
        let mut pole = false;
        if n >= 0 {
            for i in 0..n {
                let c = &self.denom.arg + q(i);
                if c.is_zero() && nu.is_zero() {
                    pole = true;
                }
                r = r.mul(&one.scale(&c).add(nu), ring);
            }
        } else {
            for i in 0..(-n) {
                let c = &self.numer.arg + q(i);
                if c.is_zero() {
                    return Err(Error::PoleError(format!("Γ ratio at {}", fmt_q(&self.numer.arg))));
                }
                r = r.mul(&ZLaurent::inverse_unipotent(&c, nu, ring)?, ring);
            }
        }
        Ok(Some((r, pole)))
    }
}

/// `Δ_d^reg` in its two cases.
#[derive(Debug, Clone, PartialEq)]
pub struct RegGkzOperator {
    pub base: GkzOperator,
    /// Exponent change of `ỹ_1..ỹ_{r-1}` from `y^d`.
    pub prime_shift: QVec,
    /// Fractional order; applied on the right-hand word if `p_r^- · d < 0`,
    /// otherwise on the left-hand word.
    pub order: Q,
    pub on_right: bool,
}

impl RegGkzOperator {
    pub fn new(ctx: &SideContext, reg: &RegSeries, d: &[Q]) -> Result<Self> {
        let base = GkzOperator::new(ctx, d)?;
        let e = ctx.degree.e_of(d);
        let r = e.len();
        let er = e[r - 1].clone();
        let on_right = er.is_negative();
        let order = if on_right { -(&reg.slope * &er) } else { &reg.slope * &er };
        Ok(RegGkzOperator { base, prime_shift: e[..r - 1].to_vec(), order, on_right })
    }
}

fn reg_apply_word(ctx: &SideContext, reg: &RegSeries, word: &[(usize, Q)]) -> RegSeries {
    let mut out = reg.empty_like();
    for (key, by_arg) in &reg.terms {
        let k = reg.k_of_key(key);
        for (arg, numer) in by_arg {
            let mut c = numer.clone();
            for (j, l) in word.iter().rev() {
                let a = dot(ctx.data.char(*j), &k) - l;
                c = c.mul_linear(&ctx.ring.u(*j), &a, &ctx.ring);
            }
            out.add_term(key.clone(), arg.clone(), &c);
        }
    }
    out
}

/// `(∂/∂x)^a` termwise; the produced `Γ(1+λ)` must cancel the stored denominator.
pub fn reg_frac_derivative(reg: &RegSeries, a: &Q) -> Result<RegSeries> {
    let mut out = reg.empty_like();
    for (key, by_arg) in &reg.terms {
        let fd = frac_derivative_monomial(a, &key.x_exp);
        for (arg, numer) in by_arg {
            if *arg != fd.numer.arg {
                return Err(Error::NonCancellingGamma(format!(
                    "stored Γ({}+ν) against produced Γ({}+ν)",
                    fmt_q(arg),
                    fmt_q(&fd.numer.arg)
                )));
            }
            let nk = out.key(key.e_prime.clone(), fd.exponent.clone());
            out.add_term(nk, fd.denom.arg.clone(), numer);
        }
    }
    Ok(out)
}

/// Applies `Δ_d^reg` and checks exact vanishing on the window.
pub fn reg_annihilation_check(ctx: &SideContext, reg: &RegSeries, degrees: &[QVec], order: &Q) -> Result<Vec<DegreeCheck>> {
    let mut out = Vec::new();
    for d in degrees {
        let op = RegGkzOperator::new(ctx, reg, d)?;
        let mut lhs = reg_apply_word(ctx, reg, &op.base.left);
        let mut rhs = reg_apply_word(ctx, reg, &op.base.right);
        if op.on_right {
            rhs = reg_frac_derivative(&rhs, &op.order)?;
        } else if !op.order.is_zero() {
            lhs = reg_frac_derivative(&lhs, &op.order)?;
        }
        let rhs = rhs.shift_prime(&op.prime_shift);
        // group by key and canonical Gamma base
        let mut pole_flags = 0;
        let mut acc: BTreeMap<(RegKey, Q), ZLaurent> = BTreeMap::new();
        for (series, sign) in [(&lhs, Q::one()), (&rhs, -Q::one())] {
            for (key, by_arg) in &series.terms {
                for (arg, numer) in by_arg {
                    let sym = GammaSymbol::new(arg.clone());
                    let (red, pole) = sym.reciprocal_reduction(&reg.nu, &ctx.ring)?;
                    if pole {
                        pole_flags += 1;
                    }
                    let v = numer.mul(&red, &ctx.ring).scale(&sign);
                    acc.entry((key.clone(), sym.canonical().0)).or_default().add_assign(&v);
                }
            }
        }
        let lhs_shift = if op.on_right { Q::zero() } else { op.order.clone() };
        let mut residuals = Vec::new();
        let mut checked = BTreeMap::new();
        for ((key, b0), v) in &acc {
            // index of the left-hand source term
            let src = reg.key(key.e_prime.clone(), &key.x_exp + &lhs_shift);
            let k = reg.k_of_key(&src);
            if ctx.degree.deg_k(&k) > *order || ctx.degree.deg_k(&sub(&k, d)) > *order {
                continue;
            }
            checked.insert(k.clone(), ());
            if !v.is_zero() {
                residuals.push(describe(&k, &format!("Γ base {}", fmt_q(b0))));
            }
        }
        out.push(DegreeCheck { d: d.clone(), checked: checked.len(), residuals, pole_flags });
    }
    Ok(out)
}

/// `∏_j ∏_{a=0}^{E_j·k} (z∂̄_j − a z)`, as `(j, a)` factors.
///
/// With `sign = +1` the factors are `(z∂̄_j + a z)` instead.
#[derive(Debug, Clone, PartialEq)]
pub struct LefschetzWord {
    pub factors: Vec<(usize, Q)>,
    pub sign: i64,
}

pub fn lefschetz_word(k: &[Q], twist: &SideTwist, sign: i64) -> Result<LefschetzWord> {
    let mut factors = Vec::new();
    for (j, ej) in twist.e_vecs.iter().enumerate() {
        let n = crate::ifunction::integral_pairing(j, ej, k)?;
        if n < 0 {
            return Err(Error::NonIntegralPairing { index: j, value: format!("{n}") });
        }
        for a in 0..=n {
            factors.push((j, q(a)));
        }
    }
    Ok(LefschetzWord { factors, sign })
}

pub fn apply_lefschetz(word: &LefschetzWord, twist: &SideTwist, s: &FormalSeries) -> FormalSeries {
    let mut cur = s.clone();
    for (j, a) in word.factors.iter().rev() {
        let shift = if word.sign > 0 { -a.clone() } else { a.clone() };
        let mut next = combined_derivation(&twist.b[*j], &cur);
        for (k, c) in &cur.terms {
            next.add_term(k.clone(), &c.scale(&-shift.clone()));
        }
        cur = next.shift_z(1);
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::git::{GitData, Limits};
    use crate::rational::{qr, qvec};

    fn p2() -> SideContext {
        let data = GitData::new(1, alloc::vec![qvec(&[1]); 3], qvec(&[1]), qvec(&[1])).unwrap();
        SideContext::standalone(&data, &qvec(&[1]), &Limits::default()).unwrap()
    }

    #[test]
    fn p2_annihilated() {
        let ctx = p2();
        let res = annihilation_check(&ctx, &[qvec(&[1]), qvec(&[2]), qvec(&[-1])], &q(5)).unwrap();
        for r in res {
            assert!(r.pass(), "{:?}", r.residuals);
            assert!(r.checked > 0);
        }
    }

    #[test]
    fn zero_degree_is_zero_operator() {
        let ctx = p2();
        let op = GkzOperator::new(&ctx, &qvec(&[0])).unwrap();
        assert!(op.is_zero());
        let i = build_i(&ctx, &q(2)).unwrap();
        assert!(apply_gkz(&ctx, &op, &i).unwrap().is_zero());
    }

    #[test]
    fn monomial_action() {
        // Δ_1 on P^2 applied to a bare monomial y^2 with scalar coefficient
        let ctx = p2();
        let mut s = ctx.template(&q(10));
        let key = s.key(qvec(&[2]), alloc::vec![0]);
        s.add_term(key, &ZLaurent::from_class(ctx.ring.one(), 0));
        let op = GkzOperator::new(&ctx, &qvec(&[1])).unwrap();
        let out = apply_gkz(&ctx, &op, &s).unwrap();
        let want = ZLaurent::from_class(ctx.ring.one(), 3).scale(&q(8));
        assert_eq!(out.terms[&out.key(qvec(&[2]), alloc::vec![0])], want);
        assert_eq!(out.terms[&out.key(qvec(&[3]), alloc::vec![0])], ZLaurent::from_class(ctx.ring.one(), 0).scale(&q(-1)));
    }

    #[test]
    fn gamma_symbol_canonical() {
        assert_eq!(GammaSymbol::new(q(1)).canonical(), (q(1), 0));
        assert_eq!(GammaSymbol::new(q(3)).canonical(), (q(1), 2));
        assert_eq!(GammaSymbol::new(q(0)).canonical(), (q(1), -1));
        assert_eq!(GammaSymbol::new(qr(-1, 2)).canonical(), (qr(1, 2), -1));
        assert_eq!(GammaSymbol::new(qr(7, 3)).canonical(), (qr(1, 3), 2));
    }

    #[test]
    fn integer_fractional_derivatives() {
        let ctx = p2();
        let zero = ZLaurent::zero();
        let one = |c: i64| ZLaurent::from_class(ctx.ring.one(), 0).scale(&q(c));
        let fd = frac_derivative_monomial(&q(1), &q(4));
        assert_eq!(fd.exponent, q(3));
        assert_eq!(fd.reduced(&zero, &ctx.ring).unwrap().unwrap().0, one(4));
        let fd = frac_derivative_monomial(&q(3), &q(3));
        assert_eq!(fd.reduced(&zero, &ctx.ring).unwrap().unwrap().0, one(6));
        let fd = frac_derivative_monomial(&q(3), &q(2));
        let (r, pole) = fd.reduced(&zero, &ctx.ring).unwrap().unwrap();
        assert!(r.is_zero() && pole);
        let fd = frac_derivative_monomial(&qr(1, 2), &qr(1, 2));
        assert_eq!(fd.numer.arg, qr(3, 2));
        assert_eq!(fd.denom.arg, q(1));
        assert!(fd.reduced(&zero, &ctx.ring).unwrap().is_none());
    }

    #[test]
    fn default_degree_list() {
        let d = default_degrees(2);
        assert_eq!(d.len(), 24);
        assert_eq!(d[0], qvec(&[1, 0]));
        assert_eq!(default_degrees(1).len(), 4);
    }

    #[test]
    fn regularized_fixture_a() {
        let d = GitData::new(
            2,
            alloc::vec![qvec(&[1, 1]), qvec(&[1, 1]), qvec(&[1, 0]), qvec(&[0, -1])],
            qvec(&[2, 1]),
            qvec(&[2, -1]),
        )
        .unwrap();
        let setup = crate::git::compute_wall_crossing(&d, None, &Limits::default()).unwrap();
        let ctx = SideContext::minus(&setup).unwrap();
        let reg = crate::resummation::regularize(&ctx, &setup.wall, &q(5)).unwrap();
        let e = setup.wall.e.clone();
        let degs = alloc::vec![e.clone(), crate::rational::neg(&e), qvec(&[1, 0]), qvec(&[0, 1])];
        for c in reg_annihilation_check(&ctx, &reg, &degs, &q(5)).unwrap() {
            assert!(c.pass(), "{:?}: {:?}", c.d, c.residuals);
            assert!(c.checked > 0);
        }
    }
}
