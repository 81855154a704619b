//! Truncated formal series in `y_1..y_r` with log-monomials and coefficients
//! in `H^*_CR ⊗ ℚ[z, z^{-1}]`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::cohomology::{CrRing, HcrClass};
use crate::error::{Error, Result};
use crate::linalg::{inverse, mat_vec, transpose, QMat};
use crate::rational::{add, dot, factorial, q, QVec, Q};

/// An element of `H^*_CR[z, z^{-1}]`: z-exponent to class, zero classes dropped.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ZLaurent {
    pub terms: BTreeMap<i64, HcrClass>,
}

fn is_zero_class(c: &[Q]) -> bool {
    c.iter().all(Zero::is_zero)
}

impl ZLaurent {
    pub fn zero() -> Self {
        ZLaurent { terms: BTreeMap::new() }
    }

    pub fn from_class(c: HcrClass, zexp: i64) -> Self {
        let mut out = ZLaurent::zero();
        out.add_at(zexp, &c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_at(&mut self, zexp: i64, c: &[Q]) {
        if is_zero_class(c) {
            return;
        }
        match self.terms.get_mut(&zexp) {
            Some(v) => {
                for (x, y) in v.iter_mut().zip(c) {
                    *x += y;
                }
                if is_zero_class(v) {
                    self.terms.remove(&zexp);
                }
            }
            None => {
                self.terms.insert(zexp, c.to_vec());
            }
        }
    }

    pub fn add_assign(&mut self, other: &ZLaurent) {
        for (n, c) in &other.terms {
            self.add_at(*n, c);
        }
    }

    pub fn add(&self, other: &ZLaurent) -> ZLaurent {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &ZLaurent) -> ZLaurent {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> ZLaurent {
        if s.is_zero() {
            return ZLaurent::zero();
        }
        ZLaurent { terms: self.terms.iter().map(|(n, c)| (*n, c.iter().map(|x| x * s).collect())).collect() }
    }

    /// Multiplication by `z^n`.
    pub fn shift(&self, n: i64) -> ZLaurent {
        ZLaurent { terms: self.terms.iter().map(|(k, c)| (k + n, c.clone())).collect() }
    }

    pub fn mul(&self, other: &ZLaurent, ring: &CrRing) -> ZLaurent {
        let mut out = ZLaurent::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_at(a + b, &ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn mul_class(&self, c: &[Q], ring: &CrRing) -> ZLaurent {
        let mut out = ZLaurent::zero();
        for (a, ca) in &self.terms {
            out.add_at(*a, &ring.mul(ca, c));
        }
        out
    }

    /// `(u + a z) · self`.
    pub fn mul_linear(&self, u: &[Q], a: &Q, ring: &CrRing) -> ZLaurent {
        let mut out = self.mul_class(u, ring);
        out.add_assign(&self.shift(1).scale(a));
        out
    }

    /// `self / (u + a z)` for nilpotent `u`, by the terminating geometric series
    /// `(u + az)^{-1} = Σ_n (-u)^n / (az)^{n+1}`.
    pub fn div_linear(&self, u: &[Q], a: &Q, ring: &CrRing) -> Result<ZLaurent> {
        if a.is_zero() {
            return Err(Error::DivisionByPureNilpotent(0));
        }
        let inv_a = Q::one() / a;
        let mut term = self.shift(-1).scale(&inv_a);
        let mut out = ZLaurent::zero();
        let limit = ring.max_top_degree() + 2;
        for _ in 0..=limit {
            if term.is_zero() {
                return Ok(out);
            }
            out.add_assign(&term);
            term = term.mul_class(u, ring).shift(-1).scale(&-inv_a.clone());
        }
        if term.is_zero() {
            Ok(out)
        } else {
            Err(Error::DivisionByPureNilpotent(0))
        }
    }

    /// Inverse of `c + ν` for a nonzero scalar `c` and nilpotent `ν`.
    pub fn inverse_unipotent(c: &Q, nu: &ZLaurent, ring: &CrRing) -> Result<ZLaurent> {
        if c.is_zero() {
            return Err(Error::DivisionByPureNilpotent(0));
        }
        let inv_c = Q::one() / c;
        let ratio = nu.scale(&-inv_c.clone());
        let mut term = ZLaurent::from_class(ring.one(), 0).scale(&inv_c);
        let mut out = ZLaurent::zero();
        for _ in 0..=ring.max_top_degree() + 2 {
            if term.is_zero() {
                return Ok(out);
            }
            out.add_assign(&term);
            term = term.mul(&ratio, ring);
        }
        Err(Error::DivisionByPureNilpotent(0))
    }

    pub fn min_zexp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }
}

/// Which side of the wall a series belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    Plus,
    Minus,
    Laplace,
}

/// Which variables the exponents refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    Y,
    YTilde,
    X,
    U,
}

/// A monomial `y^E (log y)^ℓ`, ordered by degree, then `E`, then `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExponentKey {
    pub deg: Q,
    /// Exponents of `y_1..y_r`, i.e. `E_i = p_i · k`.
    pub e: QVec,
    pub logs: Vec<u32>,
}

/// `deg(k) = ω̂ · k`, evaluated on y-exponents through the p-basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeFunctional {
    pub omega_hat: QVec,
    /// Rows `p_1..p_r`.
    pub basis: QMat,
    basis_inv: QMat,
    /// `w` with `w · E = ω̂ · P^{-1} E`.
    pub weights: QVec,
}

impl DegreeFunctional {
    pub fn new(omega_hat: QVec, basis: QMat) -> Result<Self> {
        let basis_inv = inverse(&basis).ok_or_else(|| Error::BasisRejected("p-basis is singular".into()))?;
        let weights = mat_vec(&transpose(&basis_inv), &omega_hat);
        Ok(DegreeFunctional { omega_hat, basis, basis_inv, weights })
    }

    pub fn deg_k(&self, k: &[Q]) -> Q {
        dot(&self.omega_hat, k)
    }

    pub fn deg_e(&self, e: &[Q]) -> Q {
        dot(&self.weights, e)
    }

    /// `E = P k`.
    pub fn e_of(&self, k: &[Q]) -> QVec {
        mat_vec(&self.basis, k)
    }

    /// `k = P^{-1} E`.
    pub fn k_of(&self, e: &[Q]) -> QVec {
        mat_vec(&self.basis_inv, e)
    }
}

/// A truncated series.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries {
    pub side: Side,
    pub var: Var,
    pub degree: DegreeFunctional,
    pub bound: Q,
    pub terms: BTreeMap<ExponentKey, ZLaurent>,
}

impl FormalSeries {
    pub fn new(side: Side, var: Var, degree: DegreeFunctional, bound: Q) -> Self {
        FormalSeries { side, var, degree, bound, terms: BTreeMap::new() }
    }

    pub fn empty_like(&self) -> Self {
        FormalSeries::new(self.side, self.var, self.degree.clone(), self.bound.clone())
    }

    pub fn rank(&self) -> usize {
        self.degree.omega_hat.len()
    }

    pub fn key(&self, e: QVec, logs: Vec<u32>) -> ExponentKey {
        ExponentKey { deg: self.degree.deg_e(&e), e, logs }
    }

    /// Adds a term without truncating.
    pub fn add_term(&mut self, key: ExponentKey, c: &ZLaurent) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key.clone()).or_default();
        entry.add_assign(c);
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn truncate(&mut self) {
        let b = self.bound.clone();
        self.terms.retain(|k, _| k.deg <= b);
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: &Q) -> FormalSeries {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &c.scale(s));
        }
        out
    }

    pub fn shift_z(&self, n: i64) -> FormalSeries {
        let mut out = self.empty_like();
        for (k, c) in &self.terms {
            out.terms.insert(k.clone(), c.shift(n));
        }
        out
    }

    /// Multiplies every coefficient by a class.
    pub fn mul_class(&self, c: &[Q], ring: &CrRing) -> FormalSeries {
        let mut out = self.empty_like();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &v.mul_class(c, ring));
        }
        out
    }

    /// Multiplies by the monomial `y^E`, without truncating.
    pub fn mul_monomial(&self, e: &[Q]) -> FormalSeries {
        let mut out = self.empty_like();
        for (k, v) in &self.terms {
            let key = out.key(add(&k.e, e), k.logs.clone());
            out.add_term(key, v);
        }
        out
    }

    /// Terms with exactly these y-exponents, any log powers.
    pub fn terms_at(&self, e: &[Q]) -> impl Iterator<Item = (&ExponentKey, &ZLaurent)> {
        let e = e.to_vec();
        self.terms.iter().filter(move |(k, _)| k.e == e)
    }

    /// Distinct y-exponents present.
    pub fn exponents(&self) -> Vec<QVec> {
        let mut out: Vec<QVec> = self.terms.keys().map(|k| k.e.clone()).collect();
        out.sort();
        out.dedup();
        out
    }
}

fn check_tags(a: &FormalSeries, b: &FormalSeries) -> Result<()> {
    if a.side != b.side || a.var != b.var || a.degree != b.degree || a.bound != b.bound {
        return Err(Error::TagMismatch(alloc::format!("{:?}/{:?} vs {:?}/{:?}", a.side, a.var, b.side, b.var)));
    }
    Ok(())
}

pub fn series_add(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
    check_tags(a, b)?;
    let mut out = a.clone();
    for (k, c) in &b.terms {
        out.add_term(k.clone(), c);
    }
    out.truncate();
    Ok(out)
}

pub fn series_sub(a: &FormalSeries, b: &FormalSeries) -> Result<FormalSeries> {
    series_add(a, &b.scale(&-Q::one()))
}

pub fn series_mul(a: &FormalSeries, b: &FormalSeries, ring: &CrRing) -> Result<FormalSeries> {
    check_tags(a, b)?;
    let mut out = a.empty_like();
    for (ka, ca) in &a.terms {
        for (kb, cb) in &b.terms {
            let deg = &ka.deg + &kb.deg;
            if deg > a.bound {
                continue;
            }
            let logs = ka.logs.iter().zip(&kb.logs).map(|(x, y)| x + y).collect();
            let key = ExponentKey { deg, e: add(&ka.e, &kb.e), logs };
            out.add_term(key, &ca.mul(cb, ring));
        }
    }
    Ok(out)
}

/// `y_i ∂/∂y_i`, with Leibniz on the log powers.
pub fn log_derivation(i: usize, s: &FormalSeries) -> FormalSeries {
    let mut out = s.empty_like();
    for (k, c) in &s.terms {
        if !k.e[i].is_zero() {
            out.add_term(k.clone(), &c.scale(&k.e[i]));
        }
        if k.logs[i] > 0 {
            let mut logs = k.logs.clone();
            logs[i] -= 1;
            let key = ExponentKey { deg: k.deg.clone(), e: k.e.clone(), logs };
            out.add_term(key, &c.scale(&q(k.logs[i] as i64)));
        }
    }
    out
}

/// `Σ_i a_i y_i ∂/∂y_i`.
pub fn combined_derivation(coeffs: &[Q], s: &FormalSeries) -> FormalSeries {
    let mut out = s.empty_like();
    for (i, a) in coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (k, c) in log_derivation(i, s).terms {
            out.add_term(k, &c.scale(a));
        }
    }
    out
}

/// `e^{σ/z} = ∏_i exp(θ(p_i) log y_i / z)` as a finite log-polynomial.
pub fn sigma_exp(template: &FormalSeries, ring: &CrRing) -> FormalSeries {
    let r = template.rank();
    // per variable: list of (n, θ(p_i)^n / n!)
    let mut factors: Vec<Vec<(u32, HcrClass)>> = Vec::with_capacity(r);
    for i in 0..r {
        let t = ring.theta(&template.degree.basis[i]);
        let mut pows = alloc::vec![(0u32, ring.one())];
        let mut cur = ring.one();
        let mut n = 1u32;
        loop {
            cur = ring.mul(&cur, &t);
            if is_zero_class(&cur) {
                break;
            }
            let c: HcrClass = cur.iter().map(|x| x / factorial(n)).collect();
            pows.push((n, c));
            n += 1;
        }
        factors.push(pows);
    }
    let mut acc: Vec<(Vec<u32>, HcrClass)> = alloc::vec![(alloc::vec![0u32; r], ring.one())];
    for (i, pows) in factors.iter().enumerate() {
        let mut next = Vec::new();
        for (logs, c) in &acc {
            for (n, p) in pows {
                let prod = ring.mul(c, p);
                if is_zero_class(&prod) {
                    continue;
                }
                let mut l = logs.clone();
                l[i] = *n;
                next.push((l, prod));
            }
        }
        acc = next;
    }
    let mut out = template.empty_like();
    let zero = crate::rational::zero_vec(r);
    for (logs, c) in acc {
        let total: u32 = logs.iter().sum();
        let key = out.key(zero.clone(), logs);
        out.add_term(key, &ZLaurent::from_class(c, -(total as i64)));
    }
    out
}
