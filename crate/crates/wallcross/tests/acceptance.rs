//! Acceptance run: one line per criterion, each at its stated tolerance.
//! Failures are printed but only change the exit status when
//! `WALLCROSS_ACCEPTANCE_STRICT=1`, so a plain `cargo test` still runs the
//! remaining targets.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use num_traits::{One, Zero};
use wallcross::run::parallel_fit;
use wallcross::Config;
use wallcross_core::git::{compute_anticone_family, compute_chamber, compute_wall_crossing, enumerate_boxes, GitData, Limits, WallSetup};
use wallcross_core::gkz::{annihilation_check, default_degrees, reg_annihilation_check};
use wallcross_core::ifunction::{SideContext, TwistData};
use wallcross_core::linalg::rank;
use wallcross_core::rational::{dot, is_integer, neg, q, qr, qvec, unit_vec, QVec};
use wallcross_core::resummation::{asymptotic_identity_check, convergence_report, regularize, watson_validate, WatsonModel};
use wallcross_core::transform::ci_block_identity;
use wallcross_core::Q;

fn fixture(name: &str) -> Config {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.toml"));
    Config::load(&p).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn setup(cfg: &Config) -> WallSetup {
    compute_wall_crossing(&cfg.data, cfg.bases.clone(), &cfg.limits).unwrap()
}

fn sides(cfg: &Config) -> Vec<SideContext> {
    if cfg.data.omega_plus() == cfg.data.omega_minus() {
        return vec![SideContext::standalone(&cfg.data, cfg.data.omega_plus(), &cfg.limits).unwrap()];
    }
    let s = setup(cfg);
    vec![SideContext::plus(&s).unwrap(), SideContext::minus(&s).unwrap()]
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn c1_gkz() -> Outcome {
    let n = q(6);
    let (mut contexts, mut degrees, mut compared, mut bad) = (0, 0, 0, Vec::new());
    for name in ["p2", "fixture_a", "fixture_b"] {
        let cfg = fixture(name);
        for ctx in sides(&cfg) {
            contexts += 1;
            for c in annihilation_check(&ctx, &default_degrees(cfg.data.rank()), &n).unwrap() {
                degrees += 1;
                compared += c.checked;
                if !c.pass() {
                    bad.push(format!("{name}/{:?}/d={:?}", ctx.side, c.d));
                }
            }
        }
    }
    Outcome { pass: bad.is_empty(), detail: format!("{contexts} sides, {degrees} degrees, {compared} coefficients compared, {} nonzero residuals {:?}", bad.len(), bad) }
}

fn c2_regularized() -> Outcome {
    let cfg = fixture("fixture_a");
    let s = setup(&cfg);
    let ctx = SideContext::minus(&s).unwrap();
    let reg = regularize(&ctx, &s.wall, &q(6)).unwrap();
    let mut degs = vec![s.wall.e.clone(), neg(&s.wall.e)];
    degs.extend((0..2).map(|i| unit_vec(2, i)));
    let res = reg_annihilation_check(&ctx, &reg, &degs, &q(6));
    match res {
        Ok(r) => {
            let bad: Vec<_> = r.iter().filter(|c| !c.pass()).map(|c| c.d.clone()).collect();
            let checked: usize = r.iter().map(|c| c.checked).sum();
            Outcome { pass: bad.is_empty() && checked > 0, detail: format!("{checked} coefficients, all Gamma ratios reduced, failing degrees {bad:?}") }
        }
        Err(e) => Outcome { pass: false, detail: format!("symbolic reduction failed: {e}") },
    }
}

fn c3_resummation() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for name in ["fixture_a", "fixture_b"] {
        let cfg = fixture(name);
        let s = setup(&cfg);
        let ctx = SideContext::minus(&s).unwrap();
        let rep = asymptotic_identity_check(&ctx, &s.wall, &q(6)).unwrap();
        pass &= rep.pass() && rep.total_terms > 0;
        parts.push(format!("{name}: {} terms, {} Gamma pairs cancelled, {} mismatches", rep.total_terms, rep.cancelled, rep.groups.iter().map(|g| g.mismatches.len()).sum::<usize>()));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c4_watson() -> Outcome {
    let s = watson_validate(&WatsonModel::euler(120), &[10.0, 20.0, 40.0], 0.0, 1e-13).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for w in &s {
        let closed = w.rel_err_closed.unwrap_or(f64::INFINITY);
        let ok = w.rel_err_truncation <= 1e-6 && closed <= 1e-9 && w.signature;
        pass &= ok;
        parts.push(format!(
            "u={}: trunc {:.1e} (smallest term {:.1e}), closed {:.1e}, signature {}{}",
            w.u,
            w.rel_err_truncation,
            w.expected_scale,
            closed,
            w.signature,
            if ok { "" } else { " <- fails" }
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn c5_lefschetz() -> Outcome {
    let cfg = fixture("fixture_a");
    let s = setup(&cfg);
    let twists = [vec![qvec(&[1, 0])], vec![qvec(&[1, 0]), qvec(&[1, 0])]];
    let mut pass = true;
    let mut terms = 0;
    let mut mism = 0;
    for ctx in [SideContext::plus(&s).unwrap(), SideContext::minus(&s).unwrap()] {
        for e in &twists {
            let t = TwistData { e_vecs: e.clone() }.resolve(&ctx, &s.wall.e).unwrap();
            let rep = ci_block_identity(&ctx, &t, &q(6)).unwrap();
            pass &= rep.pass();
            terms += rep.terms;
            mism += rep.mismatches.len();
        }
    }
    Outcome { pass, detail: format!("E=(1,0) and two twists, both sides: {terms} terms compared, {mism} mismatches") }
}

fn c6_fit() -> Outcome {
    let cfg = fixture("fixture_a");
    let s = setup(&cfg);
    let tol = 1e-3;
    let samples = cfg.fit.magnitudes.len();
    let (_, rep) = parallel_fit(&s, &cfg.fit).unwrap();
    let ranks = rep.ranks();
    let pass = s.chamber_plus.extended_weak_fano
        && samples >= 8
        && (cfg.fit.ray_angle - 0.05).abs() < 1e-15
        && rep.max_residual() <= tol
        && ranks.iter().all(|r| *r == rep.dim_minus)
        && rep.max_variation() <= tol
        && rep.max_leakage() <= tol;
    let amb = rep.per_z.iter().map(|f| f.ambiguity).fold(0.0, f64::max);
    let dirs: Vec<usize> = rep.per_z.iter().map(|f| f.ambiguous_dims).collect();
    Outcome {
        pass,
        detail: format!(
            "weak Fano {}, {samples} samples x {} z; residual {:.1e}, ranks {ranks:?} (dim {}), variation {:.1e}, leakage {:.1e}; reported ambiguity {amb:.1e} along {dirs:?} direction(s)",
            s.chamber_plus.extended_weak_fano,
            rep.per_z.len(),
            rep.max_residual(),
            rep.dim_minus,
            rep.max_variation(),
            rep.max_leakage()
        ),
    }
}

// --- brute-force combinatorics, independent of the engine's LP and cone code

fn int_box(r: usize, b: i64) -> Vec<QVec> {
    let mut out = vec![Vec::new()];
    for _ in 0..r {
        out = out.into_iter().flat_map(|v: QVec| (-b..=b).map(move |x| [v.clone(), vec![q(x)]].concat())).collect();
    }
    out
}

fn in_anticone(d: &GitData, s: &[usize], w: &[Q]) -> bool {
    int_box(d.rank(), 6).iter().filter(|n| s.iter().all(|&j| dot(n, d.char(j)) >= Q::zero())).all(|n| {
        let v = dot(n, w);
        v > Q::zero() || (v.is_zero() && s.iter().all(|&j| dot(n, d.char(j)).is_zero()))
    })
}

fn in_closed_cone(d: &GitData, s: &[usize], x: &[Q]) -> bool {
    int_box(d.rank(), 6).iter().filter(|n| s.iter().all(|&j| dot(n, d.char(j)) >= Q::zero())).all(|n| dot(n, x) >= Q::zero())
}

fn brute_family(d: &GitData, w: &[Q]) -> BTreeSet<Vec<usize>> {
    let m = d.num_chars();
    (0u32..1 << m).map(|mask| (0..m).filter(|j| mask >> j & 1 == 1).collect::<Vec<_>>()).filter(|s| in_anticone(d, s, w)).collect()
}

type Poly = BTreeMap<Vec<u32>, Q>;

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            *out.entry(m).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn monos(r: usize, deg: u32) -> Vec<Vec<u32>> {
    if r == 1 {
        return vec![vec![deg]];
    }
    (0..=deg).flat_map(|a| monos(r - 1, deg - a).into_iter().map(move |m| [vec![a], m].concat())).collect()
}

/// `dim ℚ[p]/SR` of the sector with support `sup`, degree by degree.
fn sector_dim(d: &GitData, fam: &BTreeSet<Vec<usize>>, sup: &[usize]) -> usize {
    let r = d.rank();
    let top = (d.num_chars() - r) as u32 + 1;
    let lin = |j: usize| -> Poly { (0..r).filter(|&a| !d.char(j)[a].is_zero()).map(|a| ((0..r).map(|b| u32::from(a == b)).collect(), d.char(j)[a].clone())).collect() };
    let mut gens = Vec::new();
    for mask in 1u32..1 << sup.len() {
        let js: Vec<usize> = (0..sup.len()).filter(|i| mask >> i & 1 == 1).map(|i| sup[i]).collect();
        let rest: Vec<usize> = sup.iter().copied().filter(|j| !js.contains(j)).collect();
        if !fam.iter().any(|m| m.iter().all(|j| rest.contains(j))) {
            let one: Poly = [(vec![0; r], Q::one())].into_iter().collect();
            gens.push((js.len() as u32, js.iter().fold(one, |acc, &j| pmul(&acc, &lin(j)))));
        }
    }
    (0..=top)
        .map(|deg| {
            let basis = monos(r, deg);
            let rows: Vec<QVec> = gens
                .iter()
                .filter(|(gd, _)| *gd <= deg)
                .flat_map(|(gd, g)| monos(r, deg - gd).into_iter().map(move |m| pmul(&[(m, Q::one())].into_iter().collect(), g)))
                .map(|p| basis.iter().map(|b| p.get(b).cloned().unwrap_or_else(Q::zero)).collect())
                .collect();
            basis.len() - if rows.is_empty() { 0 } else { rank(&rows) }
        })
        .sum()
}

fn c7_combinatorics() -> Outcome {
    let lim = Limits::default();
    let mut bad = Vec::new();
    let mut dims = Vec::new();
    for name in ["p2", "fixture_a", "fixture_b"] {
        let cfg = fixture(name);
        let d = &cfg.data;
        let mut omegas = vec![d.omega_plus().clone()];
        if d.omega_minus() != d.omega_plus() {
            omegas.push(d.omega_minus().clone());
        }
        for w in omegas {
            let fam = brute_family(d, &w);
            let got: BTreeSet<Vec<usize>> = compute_anticone_family(d, &w, &lim).unwrap().members.into_iter().collect();
            if got != fam {
                bad.push(format!("{name} {w:?}: anticones"));
            }
            let ch = compute_chamber(d, &w, &lim).unwrap();
            for x in int_box(d.rank(), 5) {
                if ch.contains_closed(&x) != fam.iter().all(|s| in_closed_cone(d, s, &x)) {
                    bad.push(format!("{name} {w:?}: chamber at {x:?}"));
                }
            }
            // boxes: every f with coordinate denominators ≤ 12
            let mut scan = BTreeSet::new();
            let fracs: Vec<Q> = (1..=12i64).flat_map(|den| (0..den).map(move |num| qr(num, den))).collect();
            let mut pts: Vec<QVec> = vec![Vec::new()];
            for _ in 0..d.rank() {
                pts = pts.into_iter().flat_map(|v| fracs.iter().map(move |x| [v.clone(), vec![x.clone()]].concat())).collect();
            }
            for f in pts {
                let sup: Vec<usize> = (0..d.num_chars()).filter(|&j| is_integer(&dot(d.char(j), &f))).collect();
                if fam.contains(&sup) {
                    scan.insert(f);
                }
            }
            let boxes = enumerate_boxes(d, &ch, &lim).unwrap();
            let engine: BTreeSet<QVec> = boxes.iter().map(|b| b.f.clone()).collect();
            if engine != scan {
                bad.push(format!("{name} {w:?}: boxes"));
            }
            let ctx = SideContext::standalone(d, &w, &lim).unwrap();
            let recomputed: usize = boxes.iter().map(|b| sector_dim(d, &fam, &b.support)).sum();
            if recomputed != ctx.ring.dim() {
                bad.push(format!("{name} {w:?}: dim {} vs {recomputed}", ctx.ring.dim()));
            }
            dims.push(format!("{name}{:?}={}", w.iter().map(|x| x.to_string()).collect::<Vec<_>>(), recomputed));
        }
    }
    let expected = ["p2[\"1\"]=3", "fixture_a[\"2\", \"1\"]=4", "fixture_a[\"2\", \"-1\"]=3", "fixture_b[\"1\", \"1\"]=5", "fixture_b[\"4\", \"1\"]=4"];
    let pass = bad.is_empty() && dims.iter().map(String::as_str).eq(expected.iter().copied());
    Outcome { pass, detail: format!("dims {}; mismatches {bad:?}", dims.join(" ")) }
}

fn c6(z: num_complex::Complex64) -> String {
    format!("{:.6}{:+.6}i", z.re, z.im + 0.0)
}

fn c8_convergence() -> Outcome {
    let cfg = fixture("fixture_a");
    let s = setup(&cfg);
    let rep = convergence_report(&s.data, &s.wall, &qvec(&[0, 0]), cfg.convergence_z).unwrap();
    let zero = rep.plus.tends_to_zero();
    let div = rep.minus.diverges();
    let symbol = rep.ratio_matches_symbol(1e-6);
    let displayed = rep.displayed_matches(1e-6);
    Outcome {
        pass: zero && div && displayed,
        detail: format!(
            "plus ratio -> 0: {zero}; minus ratio diverges: {div}; x^(sum e) from ratios {} vs operator symbol {} (match {symbol}) vs displayed equation {} (match {displayed})",
            c6(rep.locus_ratio),
            c6(rep.locus_symbol),
            c6(rep.locus_displayed)
        ),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 GKZ annihilation, exact, N=6", c1_gkz),
        ("2 regularized annihilation, exact, N=6", c2_regularized),
        ("3 termwise resummation identity, exact, N=6", c3_resummation),
        ("4 Watson validation, 1e-6 / 1e-9", c4_watson),
        ("5 quantum Lefschetz blocks, exact, N=6", c5_lefschetz),
        ("6 connection-matrix fit, 1e-3", c6_fit),
        ("7 combinatorial oracles, exact", c7_combinatorics),
        ("8 convergence dichotomy", c8_convergence),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name} [{:.1}s]: {}", if o.pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64(), o.detail);
    }
    println!("acceptance: {} of 8 criteria pass", 8 - failed);
    if failed > 0 && std::env::var("WALLCROSS_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
