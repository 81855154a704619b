//! Complex special functions, quadrature along rays and small dense least squares.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

// B_{2k} / (2k(2k-1)), k = 1..10
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

// B_{2k}, k = 1..10
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174_611.0 / 330.0,
];

const SHIFT: f64 = 20.0;

fn is_nonpositive_integer(z: C64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `log Γ(z)` up to a multiple of `2πi`.
pub fn ln_gamma(z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleError(alloc::format!("Γ at {}", z.re)));
    }
    if z.re < 0.5 {
        // reflection
        let s = (z * PI).sin();
        return Ok(C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(C64::new(1.0, 0.0) - z)?);
    }
    let mut w = z;
    let mut acc = C64::zero();
    while w.re < SHIFT {
        acc += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C64::zero();
    let mut p = inv;
    for c in STIRLING {
        series += p * c;
        p *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - acc)
}

pub fn gamma(z: C64) -> Result<C64> {
    Ok(ln_gamma(z)?.exp())
}

/// `1/Γ(z)`, zero at the poles.
pub fn rgamma(z: C64) -> C64 {
    match ln_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => C64::zero(),
    }
}

fn factorial_f(n: u32) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

/// `ψ^{(n)}(z)`.
pub fn polygamma(n: u32, z: C64) -> Result<C64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleError(alloc::format!("ψ at {}", z.re)));
    }
    if z.re < 0.5 && n == 0 {
        // ψ(1-z) - ψ(z) = π cot(πz)
        let cot = (z * PI).cos() / (z * PI).sin();
        return Ok(polygamma(0, C64::new(1.0, 0.0) - z)? - cot * PI);
    }
    let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
    let nf = factorial_f(n);
    let mut w = z;
    let mut acc = C64::zero();
    while w.re < SHIFT || w.norm() < SHIFT {
        // ψ^{(n)}(w) = ψ^{(n)}(w+1) + (-1)^{n+1} n!/w^{n+1}
        acc += w.powi(-(n as i32) - 1) * (nf * sign);
        w += 1.0;
    }
    let inv = w.inv();
    let val = if n == 0 {
        let mut s = w.ln() - inv * 0.5;
        let inv2 = inv * inv;
        let mut p = inv2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            s -= p * (b / (2.0 * (k + 1) as f64));
            p *= inv2;
        }
        s
    } else {
        // (-1)^{n+1} [ (n-1)!/w^n + n!/(2 w^{n+1}) + Σ B_{2k} (2k+n-1)!/((2k)! w^{2k+n}) ]
        let mut s = inv.powi(n as i32) * factorial_f(n - 1) + inv.powi(n as i32 + 1) * (nf / 2.0);
        for (k, b) in BERNOULLI.iter().enumerate() {
            let k2 = 2 * (k as u32 + 1);
            s += inv.powi((k2 + n) as i32) * (b * factorial_f(k2 + n - 1) / factorial_f(k2));
        }
        s * sign
    };
    Ok(val + acc)
}

/// Taylor coefficients of `Γ(b + ε)` in `ε` up to `ε^order`.
pub fn nilpotent_gamma_expand(b: C64, order: usize) -> Result<Vec<C64>> {
    // log Γ(b+ε) = log Γ(b) + Σ_{n≥1} ψ^{(n-1)}(b) ε^n / n!
    let mut logc = vec![C64::zero(); order + 1];
    for (n, c) in logc.iter_mut().enumerate().skip(1) {
        *c = polygamma(n as u32 - 1, b)? / factorial_f(n as u32);
    }
    let mut out = exp_series(&logc);
    let g0 = gamma(b)?;
    for c in out.iter_mut() {
        *c *= g0;
    }
    Ok(out)
}

/// Coefficients of `exp(f)` for a series `f` with `f(0) = 0`.
fn exp_series(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    let mut g = vec![C64::zero(); n];
    if n == 0 {
        return g;
    }
    g[0] = C64::new(1.0, 0.0);
    // g' = f' g
    for m in 1..n {
        let mut s = C64::zero();
        for k in 1..=m {
            s += f[k] * g[m - k] * k as f64;
        }
        g[m] = s / m as f64;
    }
    g
}

/// `e^u E_1(u)` for `Re u > 0`.
pub fn e1_scaled(u: C64) -> Result<C64> {
    if u.re <= 0.0 {
        return Err(Error::InvalidData("E1 needs Re u > 0".into()));
    }
    if u.norm() < 1.0 {
        // E1(u) = -γ - ln u - Σ (-u)^n / (n n!)
        let mut s = C64::zero();
        let mut term = C64::new(1.0, 0.0);
        for n in 1..60 {
            term *= -u / n as f64;
            s += term / n as f64;
        }
        return Ok((-C64::new(0.577_215_664_901_532_9, 0.0) - u.ln() - s) * u.exp());
    }
    // Lentz on the continued fraction 1/(u+1-1/(u+3-4/(u+5-…)))
    let tiny = 1e-300;
    let mut b = u + 1.0;
    let mut c = C64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..500 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = (d * an + b).inv();
        c = b + c.inv() * an;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence(500))
}

// Gauss–Kronrod 7/15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for i in 0..7 {
        let x = h * XGK[i];
        let s = f(c - x) + f(c + x);
        k += s * WGK[i];
        if i % 2 == 1 {
            g += s * WG[i / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

/// Adaptive Gauss–Kronrod on `[a, b]`.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, tol: f64, max_intervals: usize) -> Result<C64> {
    let mut pieces = vec![(a, b, gk15(&mut f, a, b))];
    loop {
        let total: C64 = pieces.iter().map(|p| p.2 .0).sum();
        let err: f64 = pieces.iter().map(|p| p.2 .1).sum();
        if err <= tol * total.norm().max(1e-300) || err < 1e-300 {
            return Ok(total);
        }
        if pieces.len() >= max_intervals {
            return Err(Error::QuadratureFailure(alloc::format!("error {err:e} after {} intervals", pieces.len())));
        }
        let (i, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.partial_cmp(&y.1 .2 .1).unwrap_or(core::cmp::Ordering::Equal))
            .unwrap();
        let (lo, hi, _) = pieces.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        pieces.push((lo, mid, gk15(&mut f, lo, mid)));
        pieces.push((mid, hi, gk15(&mut f, mid, hi)));
    }
}

/// `∫_0^∞ f(t e^{iφ}) e^{iφ} dt`, through `t = s/(1-s)`.
pub fn integrate_ray<F: FnMut(C64) -> C64>(mut f: F, phi: f64, tol: f64) -> Result<C64> {
    let dir = C64::from_polar(1.0, phi);
    integrate(
        |s| {
            if s >= 1.0 {
                return C64::zero();
            }
            let t = s / (1.0 - s);
            let j = 1.0 / ((1.0 - s) * (1.0 - s));
            let v = f(dir * t) * dir * j;
            if v.re.is_finite() && v.im.is_finite() {
                v
            } else {
                C64::zero()
            }
        },
        0.0,
        1.0,
        tol,
        4000,
    )
}

/// Dense complex matrix, row-major.
pub type CMat = Vec<Vec<C64>>;

/// Least squares by Householder QR with column pivoting.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vec<C64>,
    /// `|R_ii|` in pivot order.
    pub diag: Vec<f64>,
    pub rank: usize,
    pub residual: f64,
}

impl LeastSquares {
    pub fn condition(&self) -> f64 {
        match (self.diag.first(), self.diag.get(self.rank.max(1) - 1)) {
            (Some(a), Some(b)) if *b > 0.0 => a / b,
            _ => f64::INFINITY,
        }
    }
}

/// Solves `min ‖A x − b‖`; columns whose pivot falls below `rcond · |R_00|`
/// count as dependent and get zero in the solution.
pub fn least_squares(a: &CMat, b: &[C64], rcond: f64) -> Result<LeastSquares> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    if m < n || b.len() != m {
        return Err(Error::IllConditioned(alloc::format!("{m}x{n} system")));
    }
    let mut r: CMat = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        // pivot on largest remaining column norm
        let norms: Vec<f64> = (k..n).map(|j| (k..m).map(|i| r[i][j].norm_sqr()).sum::<f64>()).collect();
        let (off, _) = norms.iter().enumerate().fold((0, -1.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let p = k + off;
        if p != k {
            for row in r.iter_mut() {
                row.swap(k, p);
            }
            perm.swap(k, p);
        }
        let alpha_norm = norms[off].sqrt();
        if alpha_norm == 0.0 {
            diag.push(0.0);
            continue;
        }
        let x0 = r[k][k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * alpha_norm;
        let mut v: Vec<C64> = (k..m).map(|i| r[i][k]).collect();
        v[0] -= alpha;
        let vn: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if vn > 0.0 {
            for j in k..n {
                let s: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * r[k + t][j]).sum();
                let f = s * 2.0 / vn;
                for (t, vi) in v.iter().enumerate() {
                    r[k + t][j] -= vi * f;
                }
            }
            let s: C64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * rhs[k + t]).sum();
            let f = s * 2.0 / vn;
            for (t, vi) in v.iter().enumerate() {
                rhs[k + t] -= vi * f;
            }
        }
        diag.push(r[k][k].norm());
    }
    let top = diag.first().copied().unwrap_or(0.0);
    let rank = diag.iter().take_while(|d| **d > rcond * top && **d > 0.0).count();
    let y = if rank == n { back_substitute(&r, &rhs, n) } else { min_norm_part(&r, &rhs, rank, n) };
    let mut solution = vec![C64::zero(); n];
    for (i, p) in perm.iter().enumerate() {
        solution[*p] = y[i];
    }
    let residual = rhs[rank..].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    Ok(LeastSquares { solution, diag, rank, residual })
}

fn back_substitute(r: &CMat, rhs: &[C64], n: usize) -> Vec<C64> {
    let mut y = vec![C64::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in i + 1..n {
            s -= r[i][j] * y[j];
        }
        y[i] = s / r[i][i];
    }
    y
}

/// Minimum-norm solution of `[R11 R12] y = c` (complete orthogonal decomposition).
fn min_norm_part(r: &CMat, rhs: &[C64], k: usize, n: usize) -> Vec<C64> {
    if k == 0 {
        return vec![C64::zero(); n];
    }
    // columns of M^H, M = R[0..k][0..n]
    let mut q: Vec<Vec<C64>> = (0..k).map(|i| (0..n).map(|j| r[i][j].conj()).collect()).collect();
    let mut t = vec![vec![C64::zero(); k]; k];
    for i in 0..k {
        for _ in 0..2 {
            for j in 0..i {
                let d: C64 = q[j].iter().zip(&q[i]).map(|(a, b)| a.conj() * b).sum();
                t[j][i] += d;
                let qj = q[j].clone();
                for (x, y) in q[i].iter_mut().zip(&qj) {
                    *x -= d * y;
                }
            }
        }
        let nn = q[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        t[i][i] = C64::new(nn, 0.0);
        for x in q[i].iter_mut() {
            *x /= nn;
        }
    }
    // M = Tᴴ Qᴴ; solve Tᴴ w = c forward
    let mut w = vec![C64::zero(); k];
    for i in 0..k {
        let mut s = rhs[i];
        for j in 0..i {
            s -= t[j][i].conj() * w[j];
        }
        w[i] = s / t[i][i].conj();
    }
    (0..n).map(|j| (0..k).map(|i| q[i][j] * w[i]).sum()).collect()
}

/// Numeric rank of `A` relative to its largest pivot.
pub fn numeric_rank(a: &CMat, rcond: f64) -> usize {
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut t: CMat = a.clone();
    if m < n {
        t = (0..n).map(|j| (0..m).map(|i| a[i][j]).collect()).collect();
    }
    let rows = t.len();
    least_squares(&t, &vec![C64::zero(); rows], rcond).map(|ls| ls.rank).unwrap_or(0)
}

/// `|a - b| / max(1, |b|)`.
pub fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((gamma(c(5.0, 0.0)).unwrap() - 24.0).norm() < 1e-12);
        assert!((gamma(c(0.5, 0.0)).unwrap() - PI.sqrt()).norm() < 1e-14);
        assert!((gamma(c(-0.5, 0.0)).unwrap() + 2.0 * PI.sqrt()).norm() < 1e-13);
        assert!((gamma(c(1.5, 0.0)).unwrap() - PI.sqrt() / 2.0).norm() < 1e-14);
        // |Γ(iy)|^2 = π / (y sinh πy)
        let y = 1.3;
        let g = gamma(c(0.0, y)).unwrap();
        assert!((g.norm_sqr() - PI / (y * (PI * y).sinh())).abs() < 1e-13);
        assert!(gamma(c(-2.0, 0.0)).is_err());
        assert_eq!(rgamma(c(0.0, 0.0)), C64::zero());
    }

    #[test]
    fn gamma_recurrence_complex() {
        for z in [c(0.3, 0.7), c(-2.4, 1.1), c(7.5, -3.0)] {
            let lhs = gamma(z + 1.0).unwrap();
            let rhs = z * gamma(z).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn polygamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((polygamma(0, c(1.0, 0.0)).unwrap() + euler).norm() < 1e-14);
        assert!((polygamma(1, c(1.0, 0.0)).unwrap() - PI * PI / 6.0).norm() < 1e-13);
        assert!((polygamma(2, c(1.0, 0.0)).unwrap() + 2.0 * 1.202_056_903_159_594_2).norm() < 1e-12);
        let z = c(0.4, 0.9);
        let lhs = polygamma(0, z + 1.0).unwrap() - polygamma(0, z).unwrap();
        assert!((lhs - z.inv()).norm() < 1e-13);
    }

    #[test]
    fn nilpotent_expansion_matches_finite_difference() {
        let b = c(1.5, 0.0);
        let co = nilpotent_gamma_expand(b, 3).unwrap();
        let h = 1e-3;
        let g = |x: f64| gamma(c(x, 0.0)).unwrap().re;
        let d1 = (g(1.5 + h) - g(1.5 - h)) / (2.0 * h);
        let d2 = (g(1.5 + h) - 2.0 * g(1.5) + g(1.5 - h)) / (h * h);
        assert!((co[0].re - g(1.5)).abs() < 1e-14);
        assert!((co[1].re - d1).abs() < 1e-6);
        assert!((co[2].re - d2 / 2.0).abs() < 1e-5);
    }

    #[test]
    fn e1_against_quadrature() {
        for u in [0.3, 2.0, 10.0] {
            let want = e1_scaled(c(u, 0.0)).unwrap();
            // e^u E1(u) = ∫_0^∞ e^{-t}/(u+t) dt
            let got = integrate_ray(|t| (-t).exp() / (t + u), 0.0, 1e-13).unwrap();
            assert!((got - want).norm() < 1e-11, "{u}: {got} vs {want}");
        }
    }

    #[test]
    fn kronrod_exact_on_polynomials() {
        let v = integrate(|x| c(x.powi(5) - 3.0 * x * x, 0.0), 0.0, 2.0, 1e-14, 10).unwrap();
        assert!((v.re - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn least_squares_recovers_solution() {
        let a: CMat = (0..6).map(|i| vec![c(1.0, 0.0), c(i as f64, 1.0), c((i * i) as f64, -0.5)]).collect();
        let x = [c(1.0, 2.0), c(-0.5, 0.0), c(0.25, 1.0)];
        let b: Vec<C64> = a.iter().map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
        let ls = least_squares(&a, &b, 1e-12).unwrap();
        assert_eq!(ls.rank, 3);
        for (s, t) in ls.solution.iter().zip(&x) {
            assert!((s - t).norm() < 1e-12);
        }
        let dep: CMat = (0..4).map(|i| vec![c(i as f64, 0.0), c(2.0 * i as f64, 0.0)]).collect();
        assert_eq!(numeric_rank(&dep, 1e-10), 1);
        // rank deficient: minimum-norm solution of x + 2y = t is (t/5, 2t/5)
        let b: Vec<C64> = (0..4).map(|i| c(3.0 * i as f64, 0.0)).collect();
        let ls = least_squares(&dep, &b, 1e-10).unwrap();
        assert!((ls.solution[0] - 0.6).norm() < 1e-12 && (ls.solution[1] - 1.2).norm() < 1e-12);
    }
}
