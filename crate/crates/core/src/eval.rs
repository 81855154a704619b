//! Floating-point evaluation of I-functions at points: the convergent plus
//! side by summation with a dynamic order, the minus side as optimally
//! truncated asymptotic partial sums per block.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::cohomology::CrRing;
use crate::error::{Error, Result};
use crate::ifunction::{enumerate_indices, gamma_factor_values, SideContext};
use crate::rational::{dot, q, to_f64, QVec, Q};

/// `H_CR` with complex coefficients; products through structure constants.
#[derive(Debug, Clone)]
pub struct NumRing {
    pub dim: usize,
    table: Vec<Vec<Vec<(usize, f64)>>>,
    pub one: Vec<C64>,
    nil: usize,
}

pub type CVec = Vec<C64>;

impl NumRing {
    pub fn new(ring: &CrRing) -> Self {
        let dim = ring.dim();
        let unit = |i: usize| {
            let mut v = ring.zero();
            v[i] = q(1);
            v
        };
        let table = (0..dim)
            .map(|a| {
                (0..dim)
                    .map(|b| {
                        ring.mul(&unit(a), &unit(b))
                            .iter()
                            .enumerate()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(i, x)| (i, to_f64(x)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        NumRing { dim, table, one: Self::lift(&ring.one()), nil: ring.max_top_degree() as usize + 1 }
    }

    pub fn lift(c: &[Q]) -> CVec {
        c.iter().map(|x| C64::new(to_f64(x), 0.0)).collect()
    }

    pub fn zero(&self) -> CVec {
        vec![C64::zero(); self.dim]
    }

    pub fn mul(&self, a: &[C64], b: &[C64]) -> CVec {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                for (k, c) in &self.table[i][j] {
                    out[*k] += x * y * c;
                }
            }
        }
        out
    }

    /// `exp(n)` for nilpotent `n`.
    pub fn exp_nilpotent(&self, n: &[C64]) -> CVec {
        let mut out = self.one.clone();
        let mut term = self.one.clone();
        for i in 1..=self.nil {
            term = self.mul(&term, n).iter().map(|x| x / i as f64).collect();
            for (o, t) in out.iter_mut().zip(&term) {
                *o += t;
            }
        }
        out
    }
}

fn axpy(out: &mut [C64], a: C64, x: &[C64]) {
    for (o, v) in out.iter_mut().zip(x) {
        *o += a * v;
    }
}

fn normalize(v: &mut [C64], log_scale: &mut f64) {
    let m = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m > 0.0 && m.is_finite() {
        for x in v.iter_mut() {
            *x /= m;
        }
        *log_scale += m.ln();
    }
}

/// Everything needed to evaluate one side numerically.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    pub ctx: &'a SideContext,
    pub ring: NumRing,
    u: Vec<CVec>,
    p_theta: Vec<CVec>,
}

/// `(v, log_scale)` with the true value `v · e^{log_scale}`.
pub type Scaled = (CVec, f64);

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a SideContext) -> Self {
        let ring = NumRing::new(&ctx.ring);
        let u = (0..ctx.data.num_chars()).map(|j| NumRing::lift(&ctx.ring.u(j))).collect();
        let p_theta = ctx.degree.basis.iter().map(|p| NumRing::lift(&ctx.ring.theta(p))).collect();
        Evaluator { ctx, ring, u, p_theta }
    }

    /// `I_k` at `z`, scaled.
    pub fn coefficient(&self, k: &[Q], z: C64) -> Option<Scaled> {
        let sector = self.ctx.sector_of(k)?;
        let mut v = NumRing::lift(&self.ctx.ring.unit(sector));
        let mut log_scale = 0.0;
        for j in 0..self.ctx.data.num_chars() {
            let (vals, divide) = gamma_factor_values(&dot(self.ctx.data.char(j), k));
            for a in vals {
                let az = z * to_f64(&a);
                if divide {
                    // (az + u)^{-1} = Σ (−u)^n / (az)^{n+1}
                    let mut term: CVec = v.iter().map(|x| x / az).collect();
                    let mut acc = term.clone();
                    for _ in 0..self.ring.nil {
                        term = self.ring.mul(&term, &self.u[j]).iter().map(|x| -x / az).collect();
                        if term.iter().all(|x| x.is_zero()) {
                            break;
                        }
                        axpy(&mut acc, C64::new(1.0, 0.0), &term);
                    }
                    v = acc;
                } else {
                    let mut next = self.ring.mul(&v, &self.u[j]);
                    axpy(&mut next, az, &v);
                    v = next;
                }
                normalize(&mut v, &mut log_scale);
            }
            if v.iter().all(|x| x.is_zero()) {
                return None;
            }
        }
        Some((v, log_scale))
    }

    /// `y^k I_k` from the logs of the side's variables.
    pub fn term(&self, k: &[Q], logs: &[C64], z: C64) -> Option<CVec> {
        let (v, s) = self.coefficient(k, z)?;
        let e = self.ctx.degree.e_of(k);
        let mut ph = C64::new(s, 0.0);
        for (ei, l) in e.iter().zip(logs) {
            ph += l * to_f64(ei);
        }
        let f = ph.exp();
        Some(v.iter().map(|x| x * f).collect())
    }

    /// `z e^{σ/z}` applied to a bare sum.
    pub fn prefactor(&self, bare: &[C64], logs: &[C64], z: C64) -> CVec {
        let mut sigma = self.ring.zero();
        for (t, l) in self.p_theta.iter().zip(logs) {
            axpy(&mut sigma, l / z, t);
        }
        let e = self.ring.exp_nilpotent(&sigma);
        self.ring.mul(&e, bare).iter().map(|x| x * z).collect()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Numeric value of a convergent I-function at a point.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: CVec,
    /// Values per block label `(E_1..E_{r−1})`, prefactor included.
    pub blocks: BTreeMap<QVec, CVec>,
    pub order: Q,
    pub terms: usize,
    /// Size of the last degree band relative to the total.
    pub tail: f64,
}

/// Sums `z e^{σ/z} Σ y^k I_k` raising the order by `step` until the last
/// band falls below `tol` twice in a row.
pub fn eval_i_plus(ctx: &SideContext, logs: &[C64], z: C64, tol: f64, max_order: i64) -> Result<EvalResult> {
    let ev = Evaluator::new(ctx);
    let r = ctx.data.rank();
    let step = 4;
    let mut cache: BTreeMap<QVec, Option<CVec>> = BTreeMap::new();
    let mut quiet = 0;
    let mut n = step;
    loop {
        let order = q(n);
        let idx = enumerate_indices(ctx, &order);
        let mut total = ev.ring.zero();
        let mut band = 0.0;
        let mut blocks: BTreeMap<QVec, CVec> = BTreeMap::new();
        for k in &idx {
            let t = cache.entry(k.clone()).or_insert_with(|| ev.term(k, logs, z));
            if let Some(t) = t {
                axpy(&mut total, C64::new(1.0, 0.0), t);
                let label = ctx.degree.e_of(k)[..r - 1].to_vec();
                let b = blocks.entry(label).or_insert_with(|| vec![C64::zero(); t.len()]);
                axpy(b, C64::new(1.0, 0.0), t);
                if ctx.degree.deg_k(k) > q(n - step) {
                    band += norm(t);
                }
            }
        }
        let tail = band / norm(&total).max(1e-300);
        if tail.is_finite() && tail < tol {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 2 {
            let blocks = blocks.into_iter().map(|(l, b)| (l, ev.prefactor(&b, logs, z))).collect();
            return Ok(EvalResult { value: ev.prefactor(&total, logs, z), blocks, order, terms: idx.len(), tail });
        }
        if n >= max_order {
            return Err(Error::NoConvergence(n as u32));
        }
        n += step;
    }
}

/// One block of an asymptotic partial sum.
#[derive(Debug, Clone)]
pub struct BlockSum {
    pub value: CVec,
    /// Terms kept, counted in `E_r` order.
    pub kept: usize,
    /// Norm of the first omitted (smallest) term relative to the sum.
    pub error_scale: f64,
}

/// Optimally truncated `z e^{σ/z} Σ ỹ^k I_k`: blocks by `(E_1..E_{r−1})`,
/// each summed in increasing `E_r` up to (not including) its smallest term.
#[derive(Debug, Clone)]
pub struct AsymptoticSum {
    pub value: CVec,
    pub blocks: BTreeMap<QVec, BlockSum>,
}

pub fn eval_asymptotic(ctx: &SideContext, logs: &[C64], z: C64, order: &Q) -> Result<AsymptoticSum> {
    let ev = Evaluator::new(ctx);
    let r = ctx.data.rank();
    let mut by_block: BTreeMap<QVec, BTreeMap<Q, CVec>> = BTreeMap::new();
    for k in enumerate_indices(ctx, order) {
        let e = ctx.degree.e_of(&k);
        if let Some(t) = ev.term(&k, logs, z) {
            let slot = by_block.entry(e[..r - 1].to_vec()).or_default();
            let acc = slot.entry(e[r - 1].clone()).or_insert_with(|| ev.ring.zero());
            axpy(acc, C64::new(1.0, 0.0), &t);
        }
    }
    let mut blocks = BTreeMap::new();
    let mut total = ev.ring.zero();
    for (label, terms) in by_block {
        let sizes: Vec<f64> = terms.values().map(|t| norm(t)).collect();
        // first local minimum of the term sizes, ignoring exact zeros
        let mut stop = sizes.len();
        for i in 1..sizes.len() {
            if sizes[i] > 0.0 && i + 1 < sizes.len() && sizes[i + 1] > sizes[i] {
                stop = i;
                break;
            }
        }
        let mut acc = ev.ring.zero();
        for t in terms.values().take(stop) {
            axpy(&mut acc, C64::new(1.0, 0.0), t);
        }
        let err = sizes.get(stop).copied().unwrap_or(0.0) / norm(&acc).max(1e-300);
        let value = ev.prefactor(&acc, logs, z);
        axpy(&mut total, C64::new(1.0, 0.0), &value);
        blocks.insert(label, BlockSum { value, kept: stop, error_scale: err });
    }
    Ok(AsymptoticSum { value: total, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::git::{GitData, Limits};
    use crate::ifunction::build_i;
    use crate::rational::qvec;

    fn p2() -> SideContext {
        let data = GitData::new(1, vec![qvec(&[1]); 3], qvec(&[1]), qvec(&[1])).unwrap();
        SideContext::standalone(&data, &qvec(&[1]), &Limits::default()).unwrap()
    }

    #[test]
    fn at_zero_is_z_times_one() {
        // y → 0: only k = 0 survives, leaving z e^{σ/z}
        let ctx = p2();
        let z = C64::new(0.3, 1.2);
        let logs = [C64::new(-800.0, 0.0)];
        let r = eval_i_plus(&ctx, &logs, z, 1e-14, 40).unwrap();
        let ev = Evaluator::new(&ctx);
        let want = ev.prefactor(&ev.ring.one, &logs, z);
        for (a, b) in r.value.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        }
        let flat = ev.prefactor(&ev.ring.one, &[C64::zero()], z);
        assert!((flat[0] - z).norm() < 1e-14 && flat[1..].iter().all(|x| x.norm() < 1e-14));
    }

    #[test]
    fn p2_matches_scalar_sum() {
        // identity component of z Σ y^d / ∏_{a≤d}(H+az)^3 with log y = 0
        let ctx = p2();
        let y = 0.7;
        let z = C64::new(1.0, 0.0);
        let r = eval_i_plus(&ctx, &[C64::new(y, 0.0).ln()], z, 1e-15, 80).unwrap();
        let mut want = 0.0;
        let mut f = 1.0;
        for d in 0..40 {
            if d > 0 {
                f /= (d as f64).powi(3);
            }
            want += y.powi(d) * f;
        }
        assert!((r.value[0].re - want).abs() < 1e-13, "{} vs {want}", r.value[0]);
    }

    #[test]
    fn numeric_matches_exact_series() {
        let ctx = p2();
        let z = C64::new(0.5, -1.0);
        let ly = C64::new(-1.2, 0.4);
        let exact = build_i(&ctx, &q(30)).unwrap();
        let ring = NumRing::new(&ctx.ring);
        let mut want = ring.zero();
        for (key, c) in &exact.terms {
            let mono = (ly * to_f64(&key.e[0])).exp() * ly.powi(key.logs[0] as i32);
            for (n, cls) in &c.terms {
                let zn = z.powi(*n as i32);
                for (w, x) in want.iter_mut().zip(cls) {
                    *w += mono * zn * to_f64(x);
                }
            }
        }
        let got = eval_i_plus(&ctx, &[ly], z, 1e-15, 60).unwrap();
        for (a, b) in got.value.iter().zip(&want) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }
}
