//! One function per command. Each returns a finished report; the caller
//! decides the exit status from `Report::pass`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde_json::{json, Value};
use wallcross_core::git::{compute_wall_crossing, ChamberData, WallSetup};
use wallcross_core::gkz::{annihilation_check, default_degrees, reg_annihilation_check, DegreeCheck};
use wallcross_core::ifunction::{build_i, homogeneity_check, SideContext, TwistData};
use wallcross_core::numerics::CMat;
use wallcross_core::rational::{fmt_q, neg, unit_vec};
use wallcross_core::resummation::{asymptotic_identity_check, convergence_report, regularize, watson_validate, WatsonModel};
use wallcross_core::transform::{ci_block_identity, ci_transform_check, interpolate_entry, solve_l_fit, ConnectionMatrix, FitConfig, FitReport};

use crate::config::{Command, Config};
use crate::error::CliError;
use crate::report::{basis_labels, cnum, fnum, qs, series_json, Check, Report};

/// Witness lists are cut to this length.
const MAX_WITNESSES: usize = 8;

pub fn run(command: Command, cfg: &Config) -> Result<Report, CliError> {
    let (constants, checks, data) = match command {
        Command::Analyze => analyze(cfg)?,
        Command::Ifunction => ifunction(cfg)?,
        Command::GkzCheck => gkz_check(cfg)?,
        Command::RegCheck => reg_check(cfg)?,
        Command::Resum => resum(cfg)?,
        Command::WatsonDemo => watson_demo(cfg)?,
        Command::SolveL => solve_l(cfg)?,
        Command::CiCheck => ci_check(cfg)?,
    };
    let effective = json!({
        "order": fmt_q(&cfg.order),
        "fit_tolerance": fnum(cfg.fit_tolerance),
        "truncation_tolerance": fnum(cfg.watson.truncation_tolerance),
        "closed_form_tolerance": fnum(cfg.watson.closed_form_tolerance),
    });
    Ok(Report { command: command.name().into(), name: cfg.name.clone(), config: cfg.echo.clone(), effective, constants, checks, data })
}

type Parts = (Value, Vec<Check>, Value);

/// One chamber (both stability conditions equal) or a wall between two.
fn single_chamber(cfg: &Config) -> bool {
    cfg.data.omega_plus() == cfg.data.omega_minus()
}

fn wall_setup(cfg: &Config) -> Result<WallSetup, CliError> {
    if single_chamber(cfg) {
        return Err(CliError::Schema { field: "git.omega_minus".into(), msg: "this command needs two different chambers".into() });
    }
    Ok(compute_wall_crossing(&cfg.data, cfg.bases.clone(), &cfg.limits)?)
}

fn contexts(cfg: &Config) -> Result<(Option<WallSetup>, Vec<SideContext>), CliError> {
    if single_chamber(cfg) {
        let ctx = SideContext::standalone(&cfg.data, cfg.data.omega_plus(), &cfg.limits)?;
        return Ok((None, vec![ctx]));
    }
    let s = wall_setup(cfg)?;
    let sides = vec![SideContext::plus(&s)?, SideContext::minus(&s)?];
    Ok((Some(s), sides))
}

fn side_name(ctx: &SideContext) -> String {
    format!("{:?}", ctx.side).to_lowercase()
}

pub fn constants_json(s: &WallSetup) -> Value {
    let w = &s.wall;
    json!({
        "e": qs(&w.e),
        "discrepancy_sum": fmt_q(&w.discrepancy_sum),
        "wall_rays": w.wall_rays.iter().map(|v| qs(v)).collect::<Vec<_>>(),
        "p_plus": w.p_plus.iter().map(|v| qs(v)).collect::<Vec<_>>(),
        "p_minus": w.p_minus.iter().map(|v| qs(v)).collect::<Vec<_>>(),
        "c": fmt_q(&w.c),
        "c_i": qs(&w.c_i),
        "regularization_slope": fmt_q(&w.regularization_slope()),
        "bases_searched": w.searched,
    })
}

fn chamber_json(ch: &ChamberData) -> Value {
    json!({
        "omega": qs(&ch.family.omega),
        "anticones": ch.family.members.len(),
        "minimal_anticones": ch.family.minimal(),
        "inequalities": ch.inequalities.iter().map(|v| qs(v)).collect::<Vec<_>>(),
        "rays": ch.rays.iter().map(|v| qs(v)).collect::<Vec<_>>(),
        "full_dimensional": ch.full_dimensional,
        "proper": ch.proper,
        "extended_weak_fano": ch.extended_weak_fano,
    })
}

fn side_json(ctx: &SideContext) -> Value {
    let boxes: Vec<Value> = ctx
        .boxes
        .iter()
        .zip(&ctx.ring.sectors)
        .map(|(b, s)| json!({ "f": qs(&b.f), "age": fmt_q(&b.age), "support": b.support, "dim": s.dim() }))
        .collect();
    json!({
        "chamber": chamber_json(&ctx.chamber),
        "boxes": boxes,
        "cohomology_dim": ctx.ring.dim(),
        "basis": basis_labels(&ctx.ring),
        "p_basis": ctx.degree.basis.iter().map(|v| qs(v)).collect::<Vec<_>>(),
    })
}

fn analyze(cfg: &Config) -> Result<Parts, CliError> {
    let (setup, sides) = contexts(cfg)?;
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    for ctx in &sides {
        let n = side_name(ctx);
        checks.push(Check::flag(format!("{n}.full_dimensional"), ctx.chamber.full_dimensional, "chamber has empty interior"));
        checks.push(Check::flag(format!("{n}.proper"), ctx.chamber.proper, "quotient is not proper"));
        data.insert(n, side_json(ctx));
    }
    let constants = setup.as_ref().map_or(Value::Null, constants_json);
    Ok((constants, checks, Value::Object(data)))
}

fn ifunction(cfg: &Config) -> Result<Parts, CliError> {
    let (setup, sides) = contexts(cfg)?;
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    for ctx in &sides {
        let n = side_name(ctx);
        let i = build_i(ctx, &cfg.order)?;
        let bad = homogeneity_check(ctx, &i);
        checks.push(Check::exact(format!("{n}.homogeneity"), bad.iter().take(MAX_WITNESSES).map(|v| format!("k=({}): {}", qs(&v.k).join(","), v.detail)).collect()));
        data.insert(n, json!({ "basis": basis_labels(&ctx.ring), "series": series_json(&i) }));
    }
    let constants = setup.as_ref().map_or(Value::Null, constants_json);
    Ok((constants, checks, Value::Object(data)))
}

fn degree_checks(prefix: &str, res: &[DegreeCheck]) -> (Vec<Check>, Vec<Value>) {
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for c in res {
        let name = format!("{prefix}.d=({})", qs(&c.d).join(","));
        // no k with both k and k − d inside the truncation: nothing to compare
        let w: Vec<String> = c.residuals.iter().take(MAX_WITNESSES).cloned().collect();
        checks.push(Check { name, pass: c.pass(), value: None, tolerance: Some("0 (exact)".into()), witnesses: w });
        rows.push(json!({ "d": qs(&c.d), "checked": c.checked, "vacuous": c.checked == 0, "nonzero": c.residuals.len(), "pole_flags": c.pole_flags }));
    }
    (checks, rows)
}

fn gkz_check(cfg: &Config) -> Result<Parts, CliError> {
    let (setup, sides) = contexts(cfg)?;
    let degrees = cfg.gkz_degrees.clone().unwrap_or_else(|| default_degrees(cfg.data.rank()));
    let results: Vec<Result<(String, Vec<DegreeCheck>), CliError>> =
        sides.par_iter().map(|ctx| Ok((side_name(ctx), annihilation_check(ctx, &degrees, &cfg.order)?))).collect();
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    for r in results {
        let (n, res) = r?;
        let (c, rows) = degree_checks(&n, &res);
        checks.extend(c);
        data.insert(n, Value::Array(rows));
    }
    let constants = setup.as_ref().map_or(Value::Null, constants_json);
    Ok((constants, checks, Value::Object(data)))
}

fn reg_check(cfg: &Config) -> Result<Parts, CliError> {
    let s = wall_setup(cfg)?;
    let ctx = SideContext::minus(&s)?;
    let reg = regularize(&ctx, &s.wall, &cfg.order)?;
    let r = cfg.data.rank();
    let degrees = cfg.reg_degrees.clone().unwrap_or_else(|| {
        let mut d = vec![s.wall.e.clone(), neg(&s.wall.e)];
        d.extend((0..r).map(|i| unit_vec(r, i)));
        d
    });
    let res = reg_annihilation_check(&ctx, &reg, &degrees, &cfg.order)?;
    let (checks, rows) = degree_checks("minus.regularized", &res);
    let data = json!({ "slope": fmt_q(&reg.slope), "terms": reg.len(), "degrees": rows });
    Ok((constants_json(&s), checks, data))
}

fn resum(cfg: &Config) -> Result<Parts, CliError> {
    let s = wall_setup(cfg)?;
    let ctx = SideContext::minus(&s)?;
    let rep = asymptotic_identity_check(&ctx, &s.wall, &cfg.order)?;
    let mut checks = Vec::new();
    let mut w: Vec<String> = rep.groups.iter().flat_map(|g| g.mismatches.iter().cloned()).take(MAX_WITNESSES).collect();
    let covered: usize = rep.groups.iter().map(|g| g.terms).sum();
    if covered != rep.total_terms {
        w.push(format!("groups cover {covered} of {} terms", rep.total_terms));
    }
    checks.push(Check { name: "minus.termwise_identity".into(), pass: w.is_empty(), value: None, tolerance: Some("0 (exact)".into()), witnesses: w });
    let groups: Vec<Value> = rep.groups.iter().map(|g| json!({ "residue": fmt_q(&g.residue), "terms": g.terms, "mismatches": g.mismatches.len() })).collect();

    let conv = convergence_report(&s.data, &s.wall, &cfg.convergence_d, cfg.convergence_z)?;
    checks.push(Check::flag("convergence.plus_ratio_to_zero", conv.plus.tends_to_zero(), format!("ratios {:?}", conv.plus.ratios)));
    checks.push(Check::flag("convergence.minus_ratio_diverges", conv.minus.diverges(), format!("ratios {:?}", conv.minus.ratios)));
    let tol = 1e-6;
    checks.push(Check::bounded("convergence.locus_ratio_vs_symbol", (conv.locus_ratio - conv.locus_symbol).norm() / conv.locus_symbol.norm().max(1e-300), tol));
    checks.push(Check::bounded("convergence.locus_ratio_vs_displayed", (conv.locus_ratio - conv.locus_displayed).norm() / conv.locus_displayed.norm().max(1e-300), tol));
    let seq = |r: &wallcross_core::resummation::RatioSequence| json!({ "l": r.ls, "ratio": r.ratios.iter().map(|x| fnum(*x)).collect::<Vec<_>>(), "z_power": r.zpow });
    let data = json!({
        "identity": { "groups": groups, "total_terms": rep.total_terms, "gamma_pairs_cancelled": rep.cancelled },
        "convergence": {
            "d": qs(&cfg.convergence_d),
            "z": cnum(conv.z),
            "plus": seq(&conv.plus),
            "minus": seq(&conv.minus),
            "locus_ratio": cnum(conv.locus_ratio),
            "locus_symbol": cnum(conv.locus_symbol),
            "locus_displayed": cnum(conv.locus_displayed),
            "singular_x": conv.roots(conv.locus_ratio).into_iter().map(cnum).collect::<Vec<_>>(),
        },
    });
    Ok((constants_json(&s), checks, data))
}

fn watson_demo(cfg: &Config) -> Result<Parts, CliError> {
    let w = &cfg.watson;
    let model = WatsonModel::euler(w.terms);
    let samples = watson_validate(&model, &w.u, w.angle, 1e-13)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for s in &samples {
        let u = format!("{}", s.u);
        checks.push(Check::bounded(format!("u={u}.truncation"), s.rel_err_truncation, w.truncation_tolerance));
        if let Some(c) = s.rel_err_closed {
            checks.push(Check::bounded(format!("u={u}.closed_form"), c, w.closed_form_tolerance));
        }
        checks.push(Check::flag(format!("u={u}.signature"), s.signature, "partial-sum errors are not decreasing then increasing"));
        rows.push(json!({
            "u": u,
            "integral": cnum(s.integral),
            "closed_form": s.closed_form.map(cnum),
            "optimal_terms": s.optimal_terms,
            "optimal_sum": fnum(s.optimal_sum),
            "rel_err_truncation": fnum(s.rel_err_truncation),
            "rel_err_closed": s.rel_err_closed.map(fnum),
            "smallest_term": fnum(s.expected_scale),
            "partial_errors": s.partial_errors.iter().map(|x| fnum(*x)).collect::<Vec<_>>(),
        }));
    }
    Ok((Value::Null, checks, json!({ "model": model.name, "samples": rows })))
}

fn cmat_json(m: &CMat) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(|x| Value::String(cnum(*x))).collect())).collect())
}

/// Fits every z sample on its own thread, then merges in sample order.
pub fn parallel_fit(s: &WallSetup, fit: &FitConfig) -> Result<(ConnectionMatrix, FitReport), CliError> {
    let parts: Vec<Result<(ConnectionMatrix, FitReport), CliError>> = fit
        .z_samples
        .par_iter()
        .map(|z| {
            let mut one = fit.clone();
            one.z_samples = vec![*z];
            Ok(solve_l_fit(s, &one)?)
        })
        .collect();
    let mut parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    let (mut l, mut rep) = parts.remove(0);
    for (l2, r2) in parts {
        l.at_z.extend(l2.at_z);
        rep.per_z.extend(r2.per_z);
        for w in r2.warnings {
            if !rep.warnings.contains(&w) {
                rep.warnings.push(w);
            }
        }
    }
    rep.interpolation = 0.0;
    for i in 0..l.rows {
        for j in 0..l.cols {
            let vals: Vec<(C64, C64)> = l.at_z.iter().map(|(z, m)| (*z, m[i][j])).collect();
            let (e, misfit) = interpolate_entry(&vals, fit.laurent_window);
            rep.interpolation = rep.interpolation.max(misfit);
            l.entries[i][j] = e;
        }
    }
    Ok((l, rep))
}

fn fit_checks(rep: &FitReport, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    for f in &rep.per_z {
        let z = cnum(f.z);
        checks.push(Check::bounded(format!("z={z}.residual"), f.residuals.iter().copied().fold(0.0, f64::max), tol));
        checks.push(Check::flag(format!("z={z}.rank"), f.rank == rep.dim_minus, format!("rank {} vs dim {}", f.rank, rep.dim_minus)));
        checks.push(Check::bounded(format!("z={z}.variation"), f.variation, tol));
        checks.push(Check::bounded(format!("z={z}.block_leakage"), f.leakage, tol));
    }
    checks
}

fn fit_json(l: &ConnectionMatrix, rep: &FitReport) -> Value {
    let per_z: Vec<Value> = rep
        .per_z
        .iter()
        .zip(&l.at_z)
        .map(|(f, (_, m))| {
            json!({
                "z": cnum(f.z),
                "L": cmat_json(m),
                "residuals": f.residuals.iter().map(|x| fnum(*x)).collect::<Vec<_>>(),
                "rank": f.rank,
                "variation": fnum(f.variation),
                "block_leakage": fnum(f.leakage),
                "ambiguity": fnum(f.ambiguity),
                "ambiguous_directions": f.ambiguous_dims,
                "condition": fnum(f.condition),
            })
        })
        .collect();
    let entries: Vec<Value> = l
        .entries
        .iter()
        .map(|row| {
            Value::Array(row.iter().map(|e| Value::Object(e.iter().map(|(n, c)| (format!("z^{n}"), Value::String(cnum(*c)))).collect())).collect())
        })
        .collect();
    json!({
        "dim_plus": rep.dim_plus,
        "dim_minus": rep.dim_minus,
        "ray_angle": fnum(l.ray_angle),
        "magnitudes": l.magnitudes.iter().map(|x| fnum(*x)).collect::<Vec<_>>(),
        "per_z": per_z,
        "laurent_entries": entries,
        "laurent_misfit": fnum(rep.interpolation),
        "warnings": rep.warnings,
    })
}

fn solve_l(cfg: &Config) -> Result<Parts, CliError> {
    let s = wall_setup(cfg)?;
    let (l, rep) = parallel_fit(&s, &cfg.fit)?;
    let checks = fit_checks(&rep, cfg.fit_tolerance);
    let mut data = fit_json(&l, &rep);
    // outside extended weak Fano the I^+ components need not span; report, don't fail
    data["status"] = json!(if s.chamber_plus.extended_weak_fano { "extended weak Fano" } else { "best effort" });
    Ok((constants_json(&s), checks, data))
}

fn ci_check(cfg: &Config) -> Result<Parts, CliError> {
    let s = wall_setup(cfg)?;
    if cfg.twists.is_empty() {
        return Err(CliError::Schema { field: "twist".into(), msg: "ci-check needs at least one [[twist]] block".into() });
    }
    let sides = [SideContext::plus(&s)?, SideContext::minus(&s)?];
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for (t, e_vecs) in cfg.twists.iter().enumerate() {
        let tw = TwistData { e_vecs: e_vecs.clone() };
        for ctx in &sides {
            let side = tw.resolve(ctx, &s.wall.e)?;
            let rep = ci_block_identity(ctx, &side, &cfg.order)?;
            let n = format!("twist[{t}].{}.block_identity", side_name(ctx));
            let mut w: Vec<String> = rep.mismatches.iter().take(MAX_WITNESSES).cloned().collect();
            if rep.terms == 0 {
                w.push(String::from("no terms compared"));
            }
            checks.push(Check { name: n, pass: w.is_empty(), value: None, tolerance: Some("0 (exact)".into()), witnesses: w });
            rows.push(json!({ "twist": t, "side": side_name(ctx), "E": e_vecs.iter().map(|v| qs(v)).collect::<Vec<_>>(), "blocks": rep.blocks, "terms": rep.terms }));
        }
    }
    let mut data = json!({ "blocks": rows });
    if cfg.ci_numeric {
        let (l, rep) = parallel_fit(&s, &cfg.fit)?;
        let mut numeric = Vec::new();
        for (t, e_vecs) in cfg.twists.iter().enumerate() {
            let tw = TwistData { e_vecs: e_vecs.clone() };
            let tp = tw.resolve(&sides[0], &s.wall.e)?;
            let tm = tw.resolve(&sides[1], &s.wall.e)?;
            for z in &cfg.fit.z_samples {
                let r = ci_transform_check(&s, &l, (&tp, &tm), &cfg.fit, *z, &cfg.order)?;
                let worst = r.residuals.iter().copied().fold(0.0, f64::max);
                checks.push(Check::bounded(format!("twist[{t}].z={}.transform", cnum(*z)), worst, cfg.fit_tolerance));
                numeric.push(json!({ "twist": t, "z": cnum(*z), "residual": fnum(worst), "word_consistency": fnum(r.consistency) }));
            }
        }
        data["transform"] = Value::Array(numeric);
        data["fit"] = fit_json(&l, &rep);
    }
    Ok((constants_json(&s), checks, data))
}
