//! Regularization of the minus-side series, the termwise Laplace transform,
//! the change of variables back to `y`, the convergence dichotomy and a
//! scalar Watson harness.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::git::{GitData, WallCrossing};
use crate::ifunction::{build_coefficients, build_i, gamma_factor_values, SideContext};
use crate::numerics::{e1_scaled, integrate_ray, ln_gamma, rel_err};
use crate::rational::{dot, fmt_q, q, to_f64, QVec, Q};
use crate::series::{series_mul, sigma_exp, DegreeFunctional, FormalSeries, Side, Var, ZLaurent};

pub use crate::eval::eval_i_plus;

/// Term label of the regularized series: `ỹ'^{E'} x^{β}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RegKey {
    pub deg: Q,
    pub e_prime: QVec,
    pub x_exp: Q,
}

/// `Σ ỹ'^{E'} x^{β+ν} · numer / Γ(b+ν)`, times the symbolic prefactor
/// `e^{σ'/z}` in the first `r−1` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RegSeries {
    /// `x = ỹ_r^{1/s}`.
    pub slope: Q,
    /// `ν = s θ(p_r)/z`.
    pub nu: ZLaurent,
    pub degree: DegreeFunctional,
    pub bound: Q,
    /// Per key: Gamma argument `b` → numerator.
    pub terms: BTreeMap<RegKey, BTreeMap<Q, ZLaurent>>,
}

impl RegSeries {
    pub fn empty_like(&self) -> Self {
        RegSeries {
            slope: self.slope.clone(),
            nu: self.nu.clone(),
            degree: self.degree.clone(),
            bound: self.bound.clone(),
            terms: BTreeMap::new(),
        }
    }

    fn full_exponents(&self, e_prime: &[Q], x_exp: &Q) -> QVec {
        let mut e = e_prime.to_vec();
        e.push(x_exp / &self.slope);
        e
    }

    pub fn key(&self, e_prime: QVec, x_exp: Q) -> RegKey {
        let deg = self.degree.deg_e(&self.full_exponents(&e_prime, &x_exp));
        RegKey { deg, e_prime, x_exp }
    }

    /// The lattice index behind a key.
    pub fn k_of_key(&self, key: &RegKey) -> QVec {
        self.degree.k_of(&self.full_exponents(&key.e_prime, &key.x_exp))
    }

    pub fn add_term(&mut self, key: RegKey, arg: Q, numer: &ZLaurent) {
        if numer.is_zero() {
            return;
        }
        let by_arg = self.terms.entry(key.clone()).or_default();
        let slot = by_arg.entry(arg.clone()).or_default();
        slot.add_assign(numer);
        if slot.is_zero() {
            by_arg.remove(&arg);
        }
        if by_arg.is_empty() {
            self.terms.remove(&key);
        }
    }

    /// Multiplies by `ỹ'^{d'}`.
    pub fn shift_prime(&self, d: &[Q]) -> RegSeries {
        let mut out = self.empty_like();
        for (key, by_arg) in &self.terms {
            let e: QVec = key.e_prime.iter().zip(d).map(|(a, b)| a + b).collect();
            let nk = out.key(e, key.x_exp.clone());
            for (arg, c) in by_arg {
                out.add_term(nk.clone(), arg.clone(), c);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Divides each minus-side term by `Γ(1+λ_k)` and relabels `ỹ_r` by `x`.
pub fn regularize(ctx: &SideContext, wall: &WallCrossing, order: &Q) -> Result<RegSeries> {
    if ctx.side != Side::Minus {
        return Err(Error::TagMismatch(format!("regularize needs the minus side, got {:?}", ctx.side)));
    }
    let slope = wall.regularization_slope();
    let r = ctx.data.rank();
    let nu = ZLaurent::from_class(ctx.ring.theta(&ctx.degree.basis[r - 1]), -1).scale(&slope);
    let coeffs = build_coefficients(ctx, order)?;
    let mut out = RegSeries { slope: slope.clone(), nu, degree: ctx.degree.clone(), bound: order.clone(), terms: BTreeMap::new() };
    for (key, c) in &coeffs.terms {
        let beta = &slope * &key.e[r - 1];
        let rk = out.key(key.e[..r - 1].to_vec(), beta.clone());
        out.add_term(rk, Q::one() + &beta, &c.shift(1));
    }
    Ok(out)
}

/// `λ_k = s(p_r · k) + ν` split into its base and nilpotent part.
pub fn lambda_of(reg: &RegSeries, k: &[Q]) -> (Q, ZLaurent) {
    let r = reg.degree.basis.len();
    (&reg.slope * dot(&reg.degree.basis[r - 1], k), reg.nu.clone())
}

/// Key of the termwise Laplace image: `ỹ'^{E'} u^{u_exp}` (nilpotent part `−ν` implied).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LaplaceKey {
    pub deg: Q,
    pub e_prime: QVec,
    pub u_exp: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceImage {
    pub slope: Q,
    pub nu: ZLaurent,
    pub degree: DegreeFunctional,
    pub bound: Q,
    pub terms: BTreeMap<LaplaceKey, ZLaurent>,
    /// Number of Gamma pairs cancelled.
    pub cancelled: usize,
}

/// `x^{β+ν}/Γ(1+β+ν) ↦ u^{−β−ν}`.
pub fn laplace_termwise(reg: &RegSeries) -> Result<LaplaceImage> {
    let mut terms: BTreeMap<LaplaceKey, ZLaurent> = BTreeMap::new();
    let mut cancelled = 0;
    for (key, by_arg) in &reg.terms {
        let produced = Q::one() + &key.x_exp;
        for (arg, numer) in by_arg {
            if *arg != produced {
                return Err(Error::GammaMismatch(format!("stored Γ({}+ν), produced Γ({}+ν)", fmt_q(arg), fmt_q(&produced))));
            }
            cancelled += 1;
            let lk = LaplaceKey { deg: key.deg.clone(), e_prime: key.e_prime.clone(), u_exp: -key.x_exp.clone() };
            terms.entry(lk).or_default().add_assign(numer);
        }
    }
    terms.retain(|_, v| !v.is_zero());
    Ok(LaplaceImage { slope: reg.slope.clone(), nu: reg.nu.clone(), degree: reg.degree.clone(), bound: reg.bound.clone(), terms, cancelled })
}

/// Rewrites the image through `u = ỹ_r^{−1/s}` as a `ỹ`-series with the
/// full prefactor `e^{σ/z}` restored.
pub fn back_substitute(img: &LaplaceImage, ctx: &SideContext) -> Result<FormalSeries> {
    let mut bare = FormalSeries::new(Side::Minus, Var::YTilde, img.degree.clone(), img.bound.clone());
    let r = img.degree.basis.len();
    for (key, c) in &img.terms {
        let mut e = key.e_prime.clone();
        e.push(-key.u_exp.clone() / &img.slope);
        let k = bare.key(e, alloc::vec![0; r]);
        bare.add_term(k, c);
    }
    let sigma = sigma_exp(&bare, &ctx.ring);
    series_mul(&sigma, &bare, &ctx.ring)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupCheck {
    /// `p_r^- · k mod (−p_r^- · e)`.
    pub residue: Q,
    pub terms: usize,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub groups: Vec<GroupCheck>,
    pub total_terms: usize,
    pub cancelled: usize,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.groups.iter().all(|g| g.mismatches.is_empty()) && self.groups.iter().map(|g| g.terms).sum::<usize>() == self.total_terms
    }
}

fn modq(a: &Q, m: &Q) -> Q {
    a - m * (a / m).floor()
}

/// regularize → Laplace → back-substitution against the minus-side series.
pub fn asymptotic_identity_check(ctx: &SideContext, wall: &WallCrossing, order: &Q) -> Result<IdentityReport> {
    let reg = regularize(ctx, wall, order)?;
    let img = laplace_termwise(&reg)?;
    let back = back_substitute(&img, ctx)?;
    let direct = build_i(ctx, order)?;
    let r = ctx.data.rank();
    let m = -dot(&wall.p_minus[r - 1], &wall.e);
    let mut groups: BTreeMap<Q, GroupCheck> = BTreeMap::new();
    let mut keys: Vec<_> = direct.terms.keys().chain(back.terms.keys()).cloned().collect();
    keys.sort();
    keys.dedup();
    for key in &keys {
        let res = modq(&key.e[r - 1], &m);
        let g = groups.entry(res.clone()).or_insert_with(|| GroupCheck { residue: res, terms: 0, mismatches: Vec::new() });
        g.terms += 1;
        if direct.terms.get(key) != back.terms.get(key) {
            g.mismatches.push(format!("E={} logs={:?}", crate::rational::fmt_vec(&key.e), key.logs));
        }
    }
    Ok(IdentityReport { groups: groups.into_values().collect(), total_terms: keys.len(), cancelled: img.cancelled })
}

/// `y`-exponents of a minus-side monomial `ỹ'^{E'} x^{β}`.
pub fn change_variables_to_y(wall: &WallCrossing, e_prime: &[Q], x_exp: &Q) -> QVec {
    let s = wall.regularization_slope();
    let mut out = e_prime.to_vec();
    let mut last = -(&wall.c / &s) * x_exp;
    for (ci, ei) in wall.c_i.iter().zip(e_prime) {
        last += ci * ei;
    }
    out.push(last);
    out
}

/// Inverse of [`change_variables_to_y`]: `(E', β)` from `y`-exponents.
pub fn change_variables_from_y(wall: &WallCrossing, e: &[Q]) -> (QVec, Q) {
    let s = wall.regularization_slope();
    let r = e.len();
    let e_prime = e[..r - 1].to_vec();
    let mut rest = e[r - 1].clone();
    for (ci, ei) in wall.c_i.iter().zip(&e_prime) {
        rest -= ci * ei;
    }
    (e_prime, -(rest * s / &wall.c))
}

/// Laplace image with every key rewritten in `y`, nilpotent parts kept symbolic.
pub fn image_in_y(img: &LaplaceImage, wall: &WallCrossing) -> BTreeMap<QVec, ZLaurent> {
    let mut out: BTreeMap<QVec, ZLaurent> = BTreeMap::new();
    for (key, c) in &img.terms {
        out.entry(change_variables_to_y(wall, &key.e_prime, &-key.u_exp.clone())).or_default().add_assign(c);
    }
    out
}

/// `(log|C|, sign, z-power)` of `I_k` with nilpotent factors `(u_j + 0·z)` dropped.
pub fn scalar_coefficient(data: &GitData, k: &[Q]) -> (f64, i8, i64) {
    let mut log = 0.0;
    let mut sign = 1i8;
    let mut zpow = 0i64;
    for j in 0..data.num_chars() {
        let (vals, divide) = gamma_factor_values(&dot(data.char(j), k));
        for a in vals {
            if a.is_zero() {
                continue;
            }
            let af = to_f64(&a);
            log += if divide { -af.abs().ln() } else { af.abs().ln() };
            if af < 0.0 {
                sign = -sign;
            }
            zpow += if divide { -1 } else { 1 };
        }
    }
    (log, sign, zpow)
}

/// Ratios `C_{l+1}/C_l` of consecutive terms along a ray of indices.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSequence {
    pub ls: Vec<u64>,
    /// Scalar parts, z-power separated.
    pub ratios: Vec<f64>,
    pub zpow: i64,
}

impl RatioSequence {
    pub fn tends_to_zero(&self) -> bool {
        let a: Vec<f64> = self.ratios.iter().map(|x| x.abs()).collect();
        a.windows(2).all(|w| w[1] < w[0]) && a.last().is_some_and(|x| *x < 1e-2)
    }

    pub fn diverges(&self) -> bool {
        let a: Vec<f64> = self.ratios.iter().map(|x| x.abs()).collect();
        a.windows(2).all(|w| w[1] > w[0]) && a.last().is_some_and(|x| *x > 1e2)
    }
}

fn ratio_along(data: &GitData, d: &[Q], dir: &[Q], ls: &[u64], extra: impl Fn(&[Q], &[Q]) -> f64) -> RatioSequence {
    let mut ratios = Vec::new();
    let mut zpow = 0;
    for &l in ls {
        let k0: QVec = d.iter().zip(dir).map(|(a, b)| a + b * q(l as i64)).collect();
        let k1: QVec = d.iter().zip(dir).map(|(a, b)| a + b * q(l as i64 + 1)).collect();
        let (a0, s0, z0) = scalar_coefficient(data, &k0);
        let (a1, s1, z1) = scalar_coefficient(data, &k1);
        zpow = z1 - z0;
        let sign = if s0 == s1 { 1.0 } else { -1.0 };
        ratios.push(sign * (a1 - a0 + extra(&k0, &k1)).exp());
    }
    RatioSequence { ls: ls.to_vec(), ratios, zpow }
}

/// Richardson extrapolation of `f(l) = L + a_1/l + a_2/l^2 + …` from `f(l), f(2l), f(4l), …`.
fn richardson(vals: &[f64]) -> f64 {
    let mut t = vals.to_vec();
    let mut p = 2.0;
    while t.len() > 1 {
        t = t.windows(2).map(|w| (p * w[1] - w[0]) / (p - 1.0)).collect();
        p *= 2.0;
    }
    t[0]
}

/// Roots of `x^n = w`.
fn nth_roots(w: C64, n: u32) -> Vec<C64> {
    let (rad, arg) = w.to_polar();
    (0..n).map(|k| C64::from_polar(rad.powf(1.0 / n as f64), (arg + 2.0 * PI * k as f64) / n as f64)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub plus: RatioSequence,
    pub minus: RatioSequence,
    /// `x^{Σe}` at the singular points, from the limit of regularized ratios.
    pub locus_ratio: C64,
    /// Same, from the leading symbol of the regularized `Δ_e`.
    pub locus_symbol: C64,
    /// Same, from `((−p_r^-·e/Σe) x)^{Σe} = ∏ e_j^{−e_j}`.
    pub locus_displayed: C64,
    pub discrepancy_sum: i64,
    pub z: C64,
}

impl ConvergenceReport {
    pub fn roots(&self, w: C64) -> Vec<C64> {
        nth_roots(w, self.discrepancy_sum as u32)
    }

    pub fn ratio_matches_symbol(&self, tol: f64) -> bool {
        rel_err(self.locus_ratio, self.locus_symbol) <= tol
    }

    pub fn displayed_matches(&self, tol: f64) -> bool {
        rel_err(self.locus_symbol, self.locus_displayed) <= tol && rel_err(self.locus_ratio, self.locus_displayed) <= tol
    }
}

/// Ratio tests along `d ± l e` and the singular `x`-values of the regularized equation.
pub fn convergence_report(data: &GitData, wall: &WallCrossing, d: &[Q], z: C64) -> Result<ConvergenceReport> {
    let e = &wall.e;
    let ls: Vec<u64> = [10u64, 20, 40, 80, 160, 320].to_vec();
    let plus = ratio_along(data, d, e, &ls, |_, _| 0.0);
    let neg_e: QVec = e.iter().map(|x| -x.clone()).collect();
    let minus = ratio_along(data, d, &neg_e, &ls, |_, _| 0.0);
    let r = data.rank();
    let pr = &wall.p_minus[r - 1];
    let s = wall.regularization_slope();
    let sum_e = crate::rational::to_i64(&wall.discrepancy_sum).ok_or_else(|| Error::InvalidData("Σe not integral".into()))?;
    // regularized ratio: extra Γ(1+β_l)/Γ(1+β_{l+1})
    let lg = |x: f64| ln_gamma(C64::new(x, 0.0)).map(|v| v.re).unwrap_or(f64::NAN);
    let reg_extra = |k0: &[Q], k1: &[Q]| {
        let b0 = to_f64(&(&s * dot(pr, k0)));
        let b1 = to_f64(&(&s * dot(pr, k1)));
        lg(1.0 + b0) - lg(1.0 + b1)
    };
    let base = 128u64;
    let reg = ratio_along(data, d, &neg_e, &[base, 2 * base, 4 * base, 8 * base, 16 * base], reg_extra);
    let lim = richardson(&reg.ratios);
    let locus_ratio = (z.powi(reg.zpow as i32) * lim).inv();
    // leading symbol: (z x/Σe)^{Σe} = (−1)^{Σ_{e_j>0} e_j} ∏ |e_j|^{−e_j}
    let ej = wall.e_pairings(data);
    let mut pos = 0i64;
    let mut prod = 1.0f64;
    let mut prod_signed = 1.0f64;
    for x in &ej {
        let v = to_f64(x);
        if v == 0.0 {
            continue;
        }
        if v > 0.0 {
            pos += v as i64;
        }
        prod *= v.abs().powf(-v);
        prod_signed *= v.powi(-(v as i32));
    }
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    let se = sum_e as f64;
    let locus_symbol = (C64::new(se, 0.0) / z).powi(sum_e as i32) * (sign * prod);
    let pe = -to_f64(&dot(pr, e));
    let locus_displayed = C64::new(prod_signed / (pe / se).powi(sum_e as i32), 0.0);
    Ok(ConvergenceReport { plus, minus, locus_ratio, locus_symbol, locus_displayed, discrepancy_sum: sum_e, z })
}

/// `φ(x) = x^λ g(x)` with `g(x) = Σ g_n x^n`.
#[derive(Debug, Clone)]
pub struct WatsonModel {
    pub name: &'static str,
    pub lambda: f64,
    pub coeffs: Vec<f64>,
    /// `|φ(x)| < e^{bx}`.
    pub bound: f64,
    pub phi: fn(C64) -> C64,
    /// `u𝓛φ(u)` in closed form, if known.
    pub closed_form: Option<fn(f64) -> Result<C64>>,
}

impl WatsonModel {
    /// `φ(x) = 1/(1+x)`.
    pub fn euler(terms: usize) -> Self {
        WatsonModel {
            name: "euler",
            lambda: 0.0,
            coeffs: (0..terms).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            bound: 0.0,
            phi: |x| (x + 1.0).inv(),
            closed_form: Some(|u| Ok(e1_scaled(C64::new(u, 0.0))? * u)),
        }
    }

    /// `φ(x) = x^{1/2}`.
    pub fn sqrt() -> Self {
        WatsonModel {
            name: "sqrt",
            lambda: 0.5,
            coeffs: alloc::vec![1.0],
            bound: 0.0,
            phi: |x| x.sqrt(),
            closed_form: Some(|u| Ok(crate::numerics::gamma(C64::new(1.5, 0.0))? * u.powf(-0.5))),
        }
    }

    /// Terms `g_n Γ(1+λ+n) u^{−λ−n}` of the expansion.
    pub fn expansion_terms(&self, u: f64) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, g)| {
                let a = 1.0 + self.lambda + n as f64;
                g * (ln_gamma(C64::new(a, 0.0)).map(|v| v.re).unwrap_or(f64::NAN) - (self.lambda + n as f64) * u.ln()).exp()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WatsonSample {
    pub u: f64,
    pub integral: C64,
    pub closed_form: Option<C64>,
    /// Number of terms kept (everything before the smallest term).
    pub optimal_terms: usize,
    pub optimal_sum: f64,
    pub rel_err_truncation: f64,
    pub rel_err_closed: Option<f64>,
    /// `|smallest term| / |value|`.
    pub expected_scale: f64,
    /// `|S_n − closed form|` (or integral) for every partial sum.
    pub partial_errors: Vec<f64>,
    pub signature: bool,
}

/// Integrates `u∫_0^∞ e^{−ux} φ(x) dx` and compares with the optimally truncated expansion.
pub fn watson_validate(model: &WatsonModel, us: &[f64], phi_angle: f64, tol: f64) -> Result<Vec<WatsonSample>> {
    let mut out = Vec::new();
    for &u in us {
        if u <= model.bound {
            return Err(Error::InvalidData(format!("u = {u} below the exponential bound")));
        }
        let integral = integrate_ray(|x| (-x * u).exp() * (model.phi)(x) * u, phi_angle, tol)?;
        let closed = model.closed_form.map(|f| f(u)).transpose()?;
        let terms = model.expansion_terms(u);
        let n_min = terms
            .iter()
            .enumerate()
            .fold((0usize, f64::INFINITY), |acc, (i, t)| if t.abs() < acc.1 { (i, t.abs()) } else { acc })
            .0;
        let optimal_terms = if terms.len() == 1 { 1 } else { n_min };
        let optimal_sum: f64 = terms[..optimal_terms].iter().sum();
        let reference = closed.unwrap_or(integral);
        let mut partial_errors = Vec::new();
        let mut acc = 0.0;
        for t in &terms {
            acc += t;
            partial_errors.push((C64::new(acc, 0.0) - reference).norm());
        }
        // pairs inside the round-off floor carry no information
        let floor = 64.0 * f64::EPSILON * reference.norm();
        let signature = if terms.len() < 4 {
            true
        } else {
            let m = n_min.max(2);
            let above = |w: &[f64]| w[0] > floor && w[1] > floor;
            let early = partial_errors[..m / 2].windows(2).filter(|w| above(w)).all(|w| w[1] < w[0]);
            let late_end = (5 * m / 2).min(partial_errors.len());
            let late_win = &partial_errors[(3 * m / 2).min(late_end)..late_end];
            let late = late_win.windows(2).filter(|w| above(w)).all(|w| w[1] > w[0]) && late_win.last().is_some_and(|e| *e > floor);
            early && late
        };
        let value = reference.norm();
        out.push(WatsonSample {
            u,
            integral,
            closed_form: closed,
            optimal_terms,
            optimal_sum,
            rel_err_truncation: (integral - optimal_sum).norm() / value,
            rel_err_closed: closed.map(|c| (integral - c).norm() / c.norm()),
            expected_scale: terms.get(n_min).map_or(0.0, |t| t.abs()) / value,
            partial_errors,
            signature,
        });
    }
    Ok(out)
}

/// The `λ`-formula value of a key, for reporting.
pub fn lambda_base_of_key(reg: &RegSeries, key: &RegKey) -> Q {
    let k = reg.k_of_key(key);
    lambda_of(reg, &k).0
}

/// `y^k = ỹ^k`: minus-side exponents mapped through the change of variables.
pub fn check_monomial_identity(wall: &WallCrossing, plus: &DegreeFunctional, minus: &DegreeFunctional, k: &[Q]) -> bool {
    let em = minus.e_of(k);
    let r = em.len();
    let beta = wall.regularization_slope() * &em[r - 1];
    change_variables_to_y(wall, &em[..r - 1], &beta) == plus.e_of(k)
}
