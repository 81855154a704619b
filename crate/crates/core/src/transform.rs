//! The connection matrix `L` fitted from samples, its block structure, and
//! the complete-intersection block identities.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64 as C64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::eval::{eval_asymptotic, eval_i_plus, CVec, NumRing};
use crate::gkz::{apply_lefschetz, lefschetz_word};
use crate::git::WallSetup;
use crate::ifunction::{build_i, build_i_y, g_blocks, SideContext, SideTwist};
use crate::linalg::{inverse, mat_mul};
use crate::numerics::{least_squares, numeric_rank, CMat};
use crate::rational::{fmt_vec, q, to_f64, QVec, Q};
use crate::series::{series_sub, FormalSeries, ZLaurent};

/// Sample geometry for the fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// `arg(y_r)` of every sample.
    pub ray_angle: f64,
    pub max_ray_angle: f64,
    /// Measure the ray and magnitudes in the homogeneous variable
    /// `y_r / z^{w_r}` instead of `y_r`.
    pub ray_relative_to_z: bool,
    /// Values of `ỹ_1..ỹ_{r−1}`, used cyclically over the samples.
    pub ytilde_prime: Vec<Vec<f64>>,
    /// `|y_r| / |z|` of the samples.
    pub magnitudes: Vec<f64>,
    pub z_samples: Vec<C64>,
    /// Degree bound of the minus-side partial sums.
    pub target_order: Q,
    pub plus_tol: f64,
    pub plus_max_order: i64,
    pub rcond: f64,
    /// Ridge weight added to the least-squares rows (0 disables).
    pub ridge: f64,
    pub laurent_window: (i64, i64),
}

impl Default for FitConfig {
    fn default() -> Self {
        let n = 12;
        FitConfig {
            ray_angle: 0.05,
            max_ray_angle: 0.5,
            ray_relative_to_z: true,
            ytilde_prime: vec![vec![0.2], vec![0.5], vec![1.0]],
            magnitudes: (0..n).map(|i| 12.0 + 9.0 * i as f64 / (n - 1) as f64).collect(),
            z_samples: vec![C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(-1.0, 1.0)],
            target_order: q(90),
            plus_tol: 1e-15,
            plus_max_order: 400,
            rcond: 1e-6,
            ridge: 0.0,
            laurent_window: (-3, 3),
        }
    }
}

impl FitConfig {
    pub fn validate(&self, columns: usize) -> Result<()> {
        if self.magnitudes.len() < columns || self.magnitudes.len() < 2 {
            return Err(Error::IllConditioned(format!("{} samples for {} columns", self.magnitudes.len(), columns)));
        }
        if self.ray_angle.abs() > self.max_ray_angle {
            return Err(Error::IllConditioned(format!("ray angle {} beyond {}", self.ray_angle, self.max_ray_angle)));
        }
        if self.z_samples.iter().any(|z| z.is_zero()) {
            return Err(Error::InvalidData("z sample 0".into()));
        }
        Ok(())
    }
}

/// `log ỹ` from `log y`: `Σ E^-_i log ỹ_i = Σ E^+_i log y_i` for every `k`.
pub fn log_map(setup: &WallSetup) -> Result<Vec<QVec>> {
    // M = P_+ P_-^{-1}; log ỹ = Mᵀ log y
    let inv = inverse(&setup.wall.p_minus).ok_or_else(|| Error::BasisRejected("p^- singular".into()))?;
    let m = mat_mul(&setup.wall.p_plus, &inv);
    Ok(crate::linalg::transpose(&m))
}

/// Homogeneity weight of `y_r`: `deg y^k = ρ̂ · k` with `z` of weight one.
pub fn y_r_weight(setup: &WallSetup) -> Result<f64> {
    let d = crate::series::DegreeFunctional::new(setup.data.rho_hat(), setup.wall.p_plus.clone())?;
    Ok(to_f64(d.weights.last().ok_or_else(|| Error::InvalidData("rank 0".into()))?))
}

/// One sample point in both coordinate systems.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint {
    pub log_y: CVec,
    pub log_ytilde: CVec,
}

/// Points at z = 1 (`y_r = m e^{iφ}`, `ỹ'` fixed), then moved along the grading: `y_i → z^{w_i} y_i`.
pub fn sample_points(setup: &WallSetup, cfg: &FitConfig, z: C64) -> Result<Vec<SamplePoint>> {
    let mt = log_map(setup)?;
    let r = mt.len();
    // ỹ' rows of Mᵀ must be (I | b)
    for i in 0..r - 1 {
        for j in 0..r - 1 {
            let want = if i == j { Q::one() } else { Q::zero() };
            if mt[i][j] != want {
                return Err(Error::InvalidData("wall rays are not shared by both p-bases".into()));
            }
        }
    }
    if cfg.ytilde_prime.is_empty() || cfg.ytilde_prime.iter().any(|t| t.len() != r - 1 || t.iter().any(|x| *x <= 0.0)) {
        return Err(Error::InvalidData(format!("need positive ỹ values of length {}", r - 1)));
    }
    // rescale the whole point homogeneously with z
    let weights: Vec<f64> = if cfg.ray_relative_to_z {
        let d = crate::series::DegreeFunctional::new(setup.data.rho_hat(), setup.wall.p_plus.clone())?;
        d.weights.iter().map(to_f64).collect()
    } else {
        vec![0.0; r]
    };
    let log_z = C64::new(z.norm().ln(), z.arg());
    let mut out = Vec::new();
    for (s, m) in cfg.magnitudes.iter().enumerate() {
        let yt = &cfg.ytilde_prime[s % cfg.ytilde_prime.len()];
        let base_r = C64::new(m.ln(), cfg.ray_angle);
        let mut log_y: CVec = vec![C64::zero(); r];
        log_y[r - 1] = base_r;
        for i in 0..r - 1 {
            log_y[i] = C64::new(yt[i].ln(), 0.0) - base_r * to_f64(&mt[i][r - 1]);
        }
        for (l, w) in log_y.iter_mut().zip(&weights) {
            *l += log_z * *w;
        }
        let log_ytilde: CVec = mt.iter().map(|row| row.iter().zip(&log_y).map(|(a, l)| l * to_f64(a)).sum()).collect();
        out.push(SamplePoint { log_y, log_ytilde });
    }
    Ok(out)
}

fn cnorm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn mat_vec_c(l: &CMat, v: &[C64]) -> CVec {
    l.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Row-wise least squares `T ≈ L X` over samples, with column scaling.
pub fn fit_matrix(xs: &[CVec], ts: &[CVec], rcond: f64, ridge: f64) -> Result<(CMat, Vec<f64>)> {
    let cols = xs.first().map_or(0, Vec::len);
    let rows = ts.first().map_or(0, Vec::len);
    let scale: Vec<f64> = (0..cols).map(|j| xs.iter().map(|x| x[j].norm()).fold(0.0, f64::max).max(1e-300)).collect();
    let mut a: CMat = xs.iter().map(|x| x.iter().zip(&scale).map(|(v, s)| v / s).collect()).collect();
    if ridge > 0.0 {
        for j in 0..cols {
            let mut row = vec![C64::zero(); cols];
            row[j] = C64::new(ridge, 0.0);
            a.push(row);
        }
    }
    let mut l = Vec::with_capacity(rows);
    let mut diag = Vec::new();
    for i in 0..rows {
        let mut b: CVec = ts.iter().map(|t| t[i]).collect();
        b.resize(a.len(), C64::zero());
        let ls = least_squares(&a, &b, rcond)?;
        diag = ls.diag.clone();
        l.push(ls.solution.iter().zip(&scale).map(|(x, s)| x / s).collect());
    }
    Ok((l, diag))
}

/// `L` as Laurent polynomials in `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Entry `(i, j)`: z-exponent → coefficient.
    pub entries: Vec<Vec<BTreeMap<i64, C64>>>,
    /// The fitted numeric matrix at each z sample.
    pub at_z: Vec<(C64, CMat)>,
    pub ray_angle: f64,
    pub magnitudes: Vec<f64>,
}

impl ConnectionMatrix {
    pub fn eval(&self, z: C64) -> CMat {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| e.iter().map(|(n, c)| c * z.powi(*n as i32)).sum()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZFit {
    pub z: C64,
    /// `|L I^+ − T| / |T|` per sample.
    pub residuals: Vec<f64>,
    pub rank: usize,
    /// Max entry difference between fits on the two halves, over `max |L|`.
    pub variation: f64,
    /// Max over blocks of `|L G^+ − 𝔾| / |T|`.
    pub leakage: f64,
    /// Largest relative first-omitted-term of the targets (the fit ambiguity scale).
    pub ambiguity: f64,
    pub condition: f64,
    /// Design directions dropped below `rcond` (fixed by the minimum-norm gauge).
    pub ambiguous_dims: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub per_z: Vec<ZFit>,
    /// Worst relative misfit of a single z-monomial through the per-z values.
    pub interpolation: f64,
    pub warnings: Vec<String>,
    pub dim_plus: usize,
    pub dim_minus: usize,
}

impl FitReport {
    pub fn max_residual(&self) -> f64 {
        self.per_z.iter().flat_map(|f| f.residuals.iter().copied()).fold(0.0, f64::max)
    }
    pub fn max_variation(&self) -> f64 {
        self.per_z.iter().map(|f| f.variation).fold(0.0, f64::max)
    }
    pub fn max_leakage(&self) -> f64 {
        self.per_z.iter().map(|f| f.leakage).fold(0.0, f64::max)
    }
    pub fn ranks(&self) -> Vec<usize> {
        self.per_z.iter().map(|f| f.rank).collect()
    }
}

/// Per-sample numeric data: plus values with blocks, targets with blocks.
#[derive(Debug, Clone)]
pub struct SampleData {
    pub plus: CVec,
    pub plus_blocks: BTreeMap<QVec, CVec>,
    pub target: CVec,
    pub target_blocks: BTreeMap<QVec, CVec>,
    pub ambiguity: f64,
}

pub fn collect_samples(plus: &SideContext, minus: &SideContext, pts: &[SamplePoint], z: C64, cfg: &FitConfig) -> Result<Vec<SampleData>> {
    let mut out = Vec::new();
    for p in pts {
        let ip = eval_i_plus(plus, &p.log_y, z, cfg.plus_tol, cfg.plus_max_order)?;
        let tm = eval_asymptotic(minus, &p.log_ytilde, z, &cfg.target_order)?;
        let tnorm = cnorm(&tm.value).max(1e-300);
        let ambiguity = tm.blocks.values().map(|b| b.error_scale * cnorm(&b.value) / tnorm).fold(0.0, f64::max);
        out.push(SampleData {
            plus: ip.value,
            plus_blocks: ip.blocks,
            target: tm.value,
            target_blocks: tm.blocks.into_iter().map(|(k, b)| (k, b.value)).collect(),
            ambiguity,
        });
    }
    Ok(out)
}

/// Fits `L` from already evaluated samples at one `z`.
pub fn fit_at_z(samples: &[SampleData], z: C64, rows: usize, rcond: f64, ridge: f64) -> Result<(CMat, ZFit)> {
    let xs: Vec<CVec> = samples.iter().map(|s| s.plus.clone()).collect();
    let ts: Vec<CVec> = samples.iter().map(|s| s.target.clone()).collect();
    let (l, diag) = fit_matrix(&xs, &ts, rcond, ridge)?;
    let residuals = samples.iter().map(|s| cnorm(&sub_c(&mat_vec_c(&l, &s.plus), &s.target)) / cnorm(&s.target).max(1e-300)).collect();
    let half = samples.len() / 2;
    let (l1, _) = fit_matrix(&xs[..half], &ts[..half], rcond, ridge)?;
    let (l2, _) = fit_matrix(&xs[half..], &ts[half..], rcond, ridge)?;
    let lmax = l.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max).max(1e-300);
    let variation = l1.iter().flatten().zip(l2.iter().flatten()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / lmax;
    let mut leakage: f64 = 0.0;
    for s in samples {
        let tnorm = cnorm(&s.target).max(1e-300);
        let mut labels: Vec<&QVec> = s.plus_blocks.keys().chain(s.target_blocks.keys()).collect();
        labels.sort();
        labels.dedup();
        for lab in labels {
            let lhs = s.plus_blocks.get(lab).map(|g| mat_vec_c(&l, g)).unwrap_or_else(|| vec![C64::zero(); rows]);
            let rhs = s.target_blocks.get(lab).cloned().unwrap_or_else(|| vec![C64::zero(); rows]);
            leakage = leakage.max(cnorm(&sub_c(&lhs, &rhs)) / tnorm);
        }
    }
    let rank = numeric_rank(&l, 1e-6);
    let condition = match (diag.first(), diag.last()) {
        (Some(a), Some(b)) if *b > 0.0 => a / b,
        _ => f64::INFINITY,
    };
    let ambiguity = samples.iter().map(|s| s.ambiguity).fold(0.0, f64::max);
    let top = diag.first().copied().unwrap_or(0.0);
    let ambiguous_dims = diag.iter().filter(|d| **d <= rcond * top).count();
    Ok((l, ZFit { z, residuals, rank, variation, leakage, ambiguity, condition, ambiguous_dims }))
}

fn sub_c(a: &[C64], b: &[C64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Best single monomial `c z^n` (n in the window) through the per-z values.
pub fn interpolate_entry(values: &[(C64, C64)], window: (i64, i64)) -> (BTreeMap<i64, C64>, f64) {
    let scale = values.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
    let mut out = BTreeMap::new();
    if scale < 1e-12 {
        return (out, 0.0);
    }
    let mut best = (0i64, C64::zero(), f64::INFINITY);
    for n in window.0..=window.1 {
        let cs: Vec<C64> = values.iter().map(|(z, v)| v / z.powi(n as i32)).collect();
        let mean: C64 = cs.iter().sum::<C64>() / cs.len() as f64;
        let misfit = values.iter().map(|(z, v)| (mean * z.powi(n as i32) - v).norm()).fold(0.0, f64::max) / scale;
        if misfit < best.2 {
            best = (n, mean, misfit);
        }
    }
    out.insert(best.0, best.1);
    (out, best.2)
}

/// Fits `L` at every z sample and interpolates over z.
pub fn solve_l_fit(setup: &WallSetup, cfg: &FitConfig) -> Result<(ConnectionMatrix, FitReport)> {
    let plus = SideContext::plus(setup)?;
    let minus = SideContext::minus(setup)?;
    let cols = plus.ring.dim();
    let rows = minus.ring.dim();
    cfg.validate(2 * cols)?;
    let mut warnings = Vec::new();
    if !setup.chamber_plus.extended_weak_fano {
        warnings.push(String::from("plus chamber is not extended weak Fano; the I^+ components need not span the solutions"));
    }
    let mut per_z = Vec::new();
    let mut at_z = Vec::new();
    for &z in &cfg.z_samples {
        let pts = sample_points(setup, cfg, z)?;
        let samples = collect_samples(&plus, &minus, &pts, z, cfg)?;
        let (l, fit) = fit_at_z(&samples, z, rows, cfg.rcond, cfg.ridge)?;
        per_z.push(fit);
        at_z.push((z, l));
    }
    let mut entries = vec![vec![BTreeMap::new(); cols]; rows];
    let mut interpolation: f64 = 0.0;
    for i in 0..rows {
        for j in 0..cols {
            let vals: Vec<(C64, C64)> = at_z.iter().map(|(z, l)| (*z, l[i][j])).collect();
            let (e, misfit) = interpolate_entry(&vals, cfg.laurent_window);
            interpolation = interpolation.max(misfit);
            entries[i][j] = e;
        }
    }
    if interpolation > 1e-3 && per_z.iter().any(|f| f.ambiguous_dims > 0) {
        warnings.push(format!(
            "entries carry the exponentially small ambiguity; the minimum-norm gauge is not z-covariant (monomial misfit {interpolation:.2e})"
        ));
    }
    Ok((
        ConnectionMatrix { rows, cols, entries, at_z, ray_angle: cfg.ray_angle, magnitudes: cfg.magnitudes.clone() },
        FitReport { per_z, interpolation, warnings, dim_plus: cols, dim_minus: rows },
    ))
}

/// Fit of the plus side against itself at the same points; `L` should be the identity.
pub fn self_crossing_fit(setup: &WallSetup, cfg: &FitConfig, z: C64) -> Result<(CMat, ZFit)> {
    let plus = SideContext::plus(setup)?;
    let pts = sample_points(setup, cfg, z)?;
    let mut samples = Vec::new();
    for p in &pts {
        // a second point on the same ray makes the columns independent
        let ip = eval_i_plus(&plus, &p.log_y, z, cfg.plus_tol, cfg.plus_max_order)?;
        samples.push(SampleData {
            plus: ip.value.clone(),
            plus_blocks: ip.blocks.clone(),
            target: ip.value,
            target_blocks: ip.blocks,
            ambiguity: 0.0,
        });
    }
    fit_at_z(&samples, z, plus.ring.dim(), cfg.rcond, cfg.ridge)
}

/// Block mapping check for one label across the samples of one z.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMapping {
    pub label: QVec,
    /// Max over samples of `|L G^+ − 𝔾| / |T|`.
    pub residual: f64,
}

pub fn verify_g_block_mapping(l: &CMat, samples: &[SampleData]) -> Vec<BlockMapping> {
    let rows = l.len();
    let mut by_label: BTreeMap<QVec, f64> = BTreeMap::new();
    for s in samples {
        let tnorm = cnorm(&s.target).max(1e-300);
        for (lab, g) in &s.plus_blocks {
            let lhs = mat_vec_c(l, g);
            let rhs = s.target_blocks.get(lab).cloned().unwrap_or_else(|| vec![C64::zero(); rows]);
            let r = cnorm(&sub_c(&lhs, &rhs)) / tnorm;
            let e = by_label.entry(lab.clone()).or_insert(0.0);
            *e = e.max(r);
        }
        for lab in s.target_blocks.keys() {
            if !s.plus_blocks.contains_key(lab) {
                let r = cnorm(&s.target_blocks[lab]) / tnorm;
                let e = by_label.entry(lab.clone()).or_insert(0.0);
                *e = e.max(r);
            }
        }
    }
    by_label.into_iter().map(|(label, residual)| BlockMapping { label, residual }).collect()
}

/// `E_j · k` on a block, from its label `(E_1..E_{r−1})`.
pub fn block_pairings(twist: &SideTwist, label: &[Q]) -> Result<Vec<i64>> {
    twist
        .b
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let x: Q = b.iter().zip(label).map(|(a, e)| a * e).sum();
            crate::rational::to_i64(&x).ok_or_else(|| Error::NonIntegralPairing { index: j, value: crate::rational::fmt_q(&x) })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockIdentityReport {
    pub blocks: usize,
    pub terms: usize,
    pub mismatches: Vec<String>,
}

impl BlockIdentityReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty() && self.terms > 0
    }
}

/// `Σ_{[k]} word([k]) G_{[k]}`; `sign = −1` for the corrected factors `(z∂̄ − az)`.
pub fn lefschetz_sum(ctx: &SideContext, twist: &SideTwist, order: &Q, sign: i64) -> Result<FormalSeries> {
    let full = build_i(ctx, order)?;
    let mut out = full.empty_like();
    for (_, g) in g_blocks(&full) {
        let Some(key) = g.terms.keys().next() else { continue };
        let k = ctx.degree.k_of(&key.e);
        let word = lefschetz_word(&k, twist, sign)?;
        for (key, c) in apply_lefschetz(&word, twist, &g).terms {
            out.add_term(key, &c);
        }
    }
    out.truncate();
    Ok(out)
}

/// Exact check of `I_Y = Σ_{[k]} word([k]) G_{[k]}` on one side.
pub fn ci_block_identity(ctx: &SideContext, twist: &SideTwist, order: &Q) -> Result<BlockIdentityReport> {
    ci_block_identity_signed(ctx, twist, order, -1)
}

pub fn ci_block_identity_signed(ctx: &SideContext, twist: &SideTwist, order: &Q, sign: i64) -> Result<BlockIdentityReport> {
    let lhs = build_i_y(ctx, twist, order)?;
    let rhs = lefschetz_sum(ctx, twist, order, sign)?;
    let diff = series_sub(&lhs, &rhs)?;
    let mismatches = diff.terms.keys().map(|k| format!("E={} logs={:?}", fmt_vec(&k.e), k.logs)).collect();
    let blocks = g_blocks(&lhs).len();
    Ok(BlockIdentityReport { blocks, terms: lhs.terms.len(), mismatches })
}

/// `∏_j ∏_{b=0}^{n_j} (v_j + b z)` at a numeric `z`.
pub fn word_class(ring: &NumRing, twist: &SideTwist, pairings: &[i64], z: C64) -> CVec {
    let mut w = ring.one.clone();
    for (v, n) in twist.v.iter().zip(pairings) {
        let vc = NumRing::lift(v);
        for b in 0..=*n {
            let mut next = ring.mul(&w, &vc);
            for (x, y) in next.iter_mut().zip(&w) {
                *x += y * z * b as f64;
            }
            w = next;
        }
    }
    w
}

fn apply_words(ring: &NumRing, twist: &SideTwist, blocks: &BTreeMap<QVec, CVec>, z: C64) -> Result<CVec> {
    let mut out = ring.zero();
    for (label, g) in blocks {
        let w = word_class(ring, twist, &block_pairings(twist, label)?, z);
        for (o, x) in out.iter_mut().zip(ring.mul(&w, g)) {
            *o += x;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CiTransformReport {
    pub z: C64,
    /// `|L I_Y^+ − I_Y^-| / |I_Y^-|` per sample.
    pub residuals: Vec<f64>,
    /// Word applied before vs after numeric evaluation (first sample, formal order).
    pub consistency: f64,
}

/// `L I_Y^+ ≈ I_Y^-` at the fit samples, with the word applied blockwise.
pub fn ci_transform_check(
    setup: &WallSetup,
    l: &ConnectionMatrix,
    twists: (&SideTwist, &SideTwist),
    cfg: &FitConfig,
    z: C64,
    formal_order: &Q,
) -> Result<CiTransformReport> {
    let plus = SideContext::plus(setup)?;
    let minus = SideContext::minus(setup)?;
    let rp = NumRing::new(&plus.ring);
    let rm = NumRing::new(&minus.ring);
    let lz = l.at_z.iter().find(|(w, _)| (*w - z).norm() < 1e-12).map(|(_, m)| m.clone()).unwrap_or_else(|| l.eval(z));
    let pts = sample_points(setup, cfg, z)?;
    let samples = collect_samples(&plus, &minus, &pts, z, cfg)?;
    let mut residuals = Vec::new();
    for s in &samples {
        let yp = apply_words(&rp, twists.0, &s.plus_blocks, z)?;
        let ym = apply_words(&rm, twists.1, &s.target_blocks, z)?;
        residuals.push(cnorm(&sub_c(&mat_vec_c(&lz, &yp), &ym)) / cnorm(&ym).max(1e-300));
    }
    // consistency: formal I_Y^+ evaluated vs words on formal blocks evaluated
    let p = &pts[0];
    let formal = build_i_y(&plus, twists.0, formal_order)?;
    let direct = eval_formal(&rp, &formal, &p.log_y, z);
    let bare = build_i(&plus, formal_order)?;
    let mut blocks = BTreeMap::new();
    for (label, g) in g_blocks(&bare) {
        blocks.insert(label, eval_formal(&rp, &g, &p.log_y, z));
    }
    let via_words = apply_words(&rp, twists.0, &blocks, z)?;
    let consistency = cnorm(&sub_c(&direct, &via_words)) / cnorm(&direct).max(1e-300);
    Ok(CiTransformReport { z, residuals, consistency })
}

/// Numeric value of an exact series at a point.
pub fn eval_formal(ring: &NumRing, s: &FormalSeries, logs: &[C64], z: C64) -> CVec {
    let mut out = ring.zero();
    for (key, c) in &s.terms {
        let mut mono = C64::zero();
        for (e, l) in key.e.iter().zip(logs) {
            mono += l * to_f64(e);
        }
        let mut m = mono.exp();
        for (p, l) in key.logs.iter().zip(logs) {
            m *= l.powi(*p as i32);
        }
        for (n, cls) in &c.terms {
            let f = m * z.powi(*n as i32);
            for (o, x) in out.iter_mut().zip(cls) {
                *o += f * to_f64(x);
            }
        }
    }
    out
}

/// `∏ (v_j + b z)` as an exact class polynomial, for the block `label`.
pub fn word_polynomial(ctx: &SideContext, twist: &SideTwist, label: &[Q]) -> Result<ZLaurent> {
    let mut w = ZLaurent::from_class(ctx.ring.one(), 0);
    for (v, n) in twist.v.iter().zip(block_pairings(twist, label)?) {
        for b in 0..=n {
            w = w.mul_linear(v, &q(b), &ctx.ring);
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::git::{compute_wall_crossing, GitData, Limits};
    use crate::ifunction::TwistData;
    use crate::rational::qvec;

    fn fixture_a() -> WallSetup {
        let d = GitData::new(
            2,
            vec![qvec(&[1, 1]), qvec(&[1, 1]), qvec(&[1, 0]), qvec(&[0, -1])],
            qvec(&[2, 1]),
            qvec(&[2, -1]),
        )
        .unwrap();
        compute_wall_crossing(&d, None, &Limits::default()).unwrap()
    }

    #[test]
    fn samples_respect_change_of_variables() {
        let setup = fixture_a();
        let cfg = FitConfig::default();
        for p in sample_points(&setup, &cfg, C64::new(1.0, 0.0)).unwrap() {
            assert!(p.log_ytilde[0].im.abs() < 1e-14);
            assert!((p.log_y[1].im - 0.05).abs() < 1e-15);
        }
        for p in sample_points(&setup, &cfg, C64::new(0.0, 2.0)).unwrap() {
            assert!((p.log_ytilde[1] + p.log_y[1]).norm() < 1e-14);
            assert!((p.log_y[1].im - 0.05 - core::f64::consts::FRAC_PI_2).abs() < 1e-14);
        }
    }

    #[test]
    fn block_identity_fixture_a() {
        let setup = fixture_a();
        let tw = TwistData { e_vecs: vec![qvec(&[1, 0])] };
        for ctx in [SideContext::plus(&setup).unwrap(), SideContext::minus(&setup).unwrap()] {
            let t = tw.resolve(&ctx, &setup.wall.e).unwrap();
            let rep = ci_block_identity(&ctx, &t, &q(4)).unwrap();
            assert!(rep.pass(), "{:?}", rep.mismatches);
            let bad = ci_block_identity_signed(&ctx, &t, &q(4), 1).unwrap();
            assert!(!bad.mismatches.is_empty());
        }
    }

    #[test]
    fn monomial_interpolation() {
        let zs = [C64::new(1.0, 0.0), C64::new(0.0, 2.0), C64::new(-1.0, 1.0)];
        let vals: Vec<(C64, C64)> = zs.iter().map(|z| (*z, C64::new(0.5, -1.0) * z.powi(-2))).collect();
        let (e, misfit) = interpolate_entry(&vals, (-3, 3));
        assert!(misfit < 1e-14);
        assert!((e[&-2] - C64::new(0.5, -1.0)).norm() < 1e-14);
    }
}
