//! Report document. All maps are ordered and floats are printed with a fixed
//! format, so identical inputs give identical bytes.

use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Value};
use wallcross_core::cohomology::CrRing;
use wallcross_core::rational::{fmt_q, Q};
use wallcross_core::series::{FormalSeries, ZLaurent};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<String>,
}

impl Check {
    pub fn exact(name: impl Into<String>, witnesses: Vec<String>) -> Check {
        Check { name: name.into(), pass: witnesses.is_empty(), value: None, tolerance: None, witnesses }
    }

    pub fn flag(name: impl Into<String>, pass: bool, witness: impl Into<String>) -> Check {
        let w = witness.into();
        Check { name: name.into(), pass, value: None, tolerance: None, witnesses: if pass || w.is_empty() { Vec::new() } else { vec![w] } }
    }

    /// `value ≤ tolerance`.
    pub fn bounded(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check { name: name.into(), pass: value <= tolerance, value: Some(fnum(value)), tolerance: Some(fnum(tolerance)), witnesses: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub name: String,
    pub config: Value,
    /// Settings actually used, after command-line overrides.
    pub effective: Value,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub constants: Value,
    pub checks: Vec<Check>,
    pub data: Value,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn fnum(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6e}")
    } else {
        format!("{x}")
    }
}

pub fn cnum(z: C64) -> String {
    format!("{:.10e}{:+.10e}i", z.re, z.im)
}

pub fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

/// Human-readable names of the basis of `H*_CR`: sector, then monomial in `x_1..x_r`.
pub fn basis_labels(ring: &CrRing) -> Vec<String> {
    let mut out = Vec::new();
    for s in &ring.sectors {
        let f = format!("[{}]", qs(&s.sector.f).join(","));
        for mono in &s.basis {
            let m: Vec<String> = mono
                .iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| if *e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            out.push(if m.is_empty() { f.clone() } else { format!("{f} {}", m.join(" ")) });
        }
    }
    out
}

pub fn laurent_json(c: &ZLaurent) -> Value {
    let terms: Vec<Value> = c
        .terms
        .iter()
        .map(|(n, class)| {
            let nz: Vec<Value> = class.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| json!([i, fmt_q(x)])).collect();
            json!({ "z": n, "class": nz })
        })
        .collect();
    Value::Array(terms)
}

/// Terms in canonical order (degree, exponent, log powers).
pub fn series_json(s: &FormalSeries) -> Value {
    let terms: Vec<Value> = s
        .terms
        .iter()
        .map(|(k, c)| json!({ "deg": fmt_q(&k.deg), "e": qs(&k.e), "logs": k.logs, "coeff": laurent_json(c) }))
        .collect();
    json!({ "side": format!("{:?}", s.side), "bound": fmt_q(&s.bound), "terms": terms })
}
