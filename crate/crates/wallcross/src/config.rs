//! TOML configuration: raw serde layer plus a validating conversion.
//!
//! Every number that feeds exact arithmetic is a rational written as a string
//! (`"3/2"`) or a bare integer. Float-valued fit settings are also written as
//! rationals and converted at the end.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use wallcross_core::git::{GitData, Limits};
use wallcross_core::rational::{parse_q, to_f64, QVec};
use wallcross_core::transform::FitConfig;
use wallcross_core::Q;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Analyze,
    Ifunction,
    GkzCheck,
    RegCheck,
    Resum,
    WatsonDemo,
    SolveL,
    CiCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Ifunction => "ifunction",
            Command::GkzCheck => "gkz-check",
            Command::RegCheck => "reg-check",
            Command::Resum => "resum",
            Command::WatsonDemo => "watson-demo",
            Command::SolveL => "solve-l",
            Command::CiCheck => "ci-check",
        }
    }
}

/// A rational as written in the file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawQ {
    Int(i64),
    Str(String),
}

type RawVec = Vec<RawQ>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub order: Option<RawQ>,
    pub git: RawGit,
    #[serde(default)]
    pub bases: Option<RawBases>,
    #[serde(default)]
    pub limits: Option<RawLimits>,
    #[serde(default)]
    pub gkz: Option<RawGkz>,
    #[serde(default)]
    pub twist: Vec<RawTwist>,
    #[serde(default)]
    pub fit: Option<RawFit>,
    #[serde(default)]
    pub watson: Option<RawWatson>,
    #[serde(default)]
    pub convergence: Option<RawConvergence>,
    #[serde(default)]
    pub ci: Option<RawCi>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGit {
    pub r: usize,
    pub m: usize,
    #[serde(rename = "D")]
    pub d: Vec<RawVec>,
    pub omega_plus: RawVec,
    pub omega_minus: RawVec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBases {
    pub p_plus: Vec<RawVec>,
    pub p_minus: Vec<RawVec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawLimits {
    pub max_chars: Option<usize>,
    pub max_box_scan: Option<u64>,
    pub basis_height: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGkz {
    pub degrees: Option<Vec<RawVec>>,
    pub reg_degrees: Option<Vec<RawVec>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTwist {
    #[serde(rename = "E")]
    pub e: Vec<RawVec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFit {
    pub ray_angle: Option<RawQ>,
    pub ray_relative_to_z: Option<bool>,
    pub magnitudes: Option<RawVec>,
    pub ytilde: Option<Vec<RawVec>>,
    pub z: Option<Vec<RawVec>>,
    pub target_order: Option<RawQ>,
    pub rcond: Option<RawQ>,
    pub tolerance: Option<RawQ>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawWatson {
    pub u: Option<RawVec>,
    pub terms: Option<usize>,
    pub angle: Option<RawQ>,
    pub truncation_tolerance: Option<RawQ>,
    pub closed_form_tolerance: Option<RawQ>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConvergence {
    pub d: Option<RawVec>,
    pub z: Option<RawVec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCi {
    pub numeric: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct WatsonSettings {
    pub u: Vec<f64>,
    pub terms: usize,
    pub angle: f64,
    pub truncation_tolerance: f64,
    pub closed_form_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub name: String,
    pub command: Option<Command>,
    pub data: GitData,
    pub bases: Option<(Vec<QVec>, Vec<QVec>)>,
    pub order: Q,
    pub limits: Limits,
    pub gkz_degrees: Option<Vec<QVec>>,
    pub reg_degrees: Option<Vec<QVec>>,
    pub twists: Vec<Vec<QVec>>,
    pub fit: FitConfig,
    pub fit_tolerance: f64,
    pub watson: WatsonSettings,
    pub convergence_d: QVec,
    pub convergence_z: C64,
    pub ci_numeric: bool,
    /// The parsed document, re-emitted in reports.
    pub echo: serde_json::Value,
}

fn schema(field: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Schema { field: field.into(), msg: msg.into() }
}

fn rational(x: &RawQ, field: &str) -> Result<Q, CliError> {
    match x {
        RawQ::Int(n) => Ok(Q::from_integer((*n).into())),
        RawQ::Str(s) => parse_q(s).ok_or_else(|| schema(field, format!("`{s}` is not a rational"))),
    }
}

fn vector(v: &[RawQ], len: usize, field: &str) -> Result<QVec, CliError> {
    if v.len() != len {
        return Err(schema(field, format!("expected {len} entries, found {}", v.len())));
    }
    v.iter().enumerate().map(|(i, x)| rational(x, &format!("{field}[{i}]"))).collect()
}

fn vectors(rows: &[RawVec], len: usize, field: &str) -> Result<Vec<QVec>, CliError> {
    rows.iter().enumerate().map(|(i, row)| vector(row, len, &format!("{field}[{i}]"))).collect()
}

fn real(x: &RawQ, field: &str) -> Result<f64, CliError> {
    rational(x, field).map(|q| to_f64(&q))
}

fn positive(x: f64, field: &str) -> Result<f64, CliError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(schema(field, "must be positive"))
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
        Config::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Toml(e.to_string()))?;
        Config::from_raw(raw)
    }

    pub fn from_raw(raw: RawConfig) -> Result<Config, CliError> {
        let echo = serde_json::to_value(&raw).map_err(|e| CliError::Toml(e.to_string()))?;
        let g = &raw.git;
        if g.r == 0 {
            return Err(schema("git.r", "rank must be positive"));
        }
        if g.d.len() != g.m {
            return Err(schema("git.D", format!("m = {} but {} rows given", g.m, g.d.len())));
        }
        let chars = vectors(&g.d, g.r, "git.D")?;
        for (i, row) in chars.iter().enumerate() {
            if row.iter().any(|x| !x.is_integer()) {
                return Err(schema(format!("git.D[{i}]"), "characters must be integral"));
            }
        }
        let wp = vector(&g.omega_plus, g.r, "git.omega_plus")?;
        let wm = vector(&g.omega_minus, g.r, "git.omega_minus")?;
        let data = GitData::new(g.r, chars, wp, wm).map_err(|e| schema("git", e.to_string()))?;
        let bases = match &raw.bases {
            Some(b) => Some((vectors(&b.p_plus, g.r, "bases.p_plus")?, vectors(&b.p_minus, g.r, "bases.p_minus")?)),
            None => None,
        };
        let order = match &raw.order {
            Some(o) => rational(o, "order")?,
            None => Q::from_integer(6.into()),
        };
        if order < Q::from_integer(0.into()) {
            return Err(schema("order", "must be non-negative"));
        }
        let mut limits = Limits::default();
        if let Some(l) = &raw.limits {
            limits.max_chars = l.max_chars.unwrap_or(limits.max_chars);
            limits.max_box_scan = l.max_box_scan.unwrap_or(limits.max_box_scan);
            limits.basis_height = l.basis_height.unwrap_or(limits.basis_height);
        }
        let (gkz_degrees, reg_degrees) = match &raw.gkz {
            Some(k) => (
                k.degrees.as_ref().map(|d| vectors(d, g.r, "gkz.degrees")).transpose()?,
                k.reg_degrees.as_ref().map(|d| vectors(d, g.r, "gkz.reg_degrees")).transpose()?,
            ),
            None => (None, None),
        };
        let twists = raw
            .twist
            .iter()
            .enumerate()
            .map(|(i, t)| vectors(&t.e, g.r, &format!("twist[{i}].E")))
            .collect::<Result<Vec<_>, _>>()?;

        let mut fit = FitConfig::default();
        let mut fit_tolerance = 1e-3;
        if let Some(f) = &raw.fit {
            if let Some(a) = &f.ray_angle {
                fit.ray_angle = real(a, "fit.ray_angle")?;
            }
            if let Some(b) = f.ray_relative_to_z {
                fit.ray_relative_to_z = b;
            }
            if let Some(m) = &f.magnitudes {
                fit.magnitudes = m
                    .iter()
                    .enumerate()
                    .map(|(i, x)| positive(real(x, &format!("fit.magnitudes[{i}]"))?, &format!("fit.magnitudes[{i}]")))
                    .collect::<Result<_, _>>()?;
            }
            if let Some(t) = &f.ytilde {
                fit.ytilde_prime = vectors(t, g.r - 1, "fit.ytilde")?.iter().map(|v| v.iter().map(to_f64).collect()).collect();
            }
            if let Some(z) = &f.z {
                fit.z_samples = vectors(z, 2, "fit.z")?.iter().map(|v| C64::new(to_f64(&v[0]), to_f64(&v[1]))).collect();
            }
            if let Some(o) = &f.target_order {
                fit.target_order = rational(o, "fit.target_order")?;
            }
            if let Some(r) = &f.rcond {
                fit.rcond = positive(real(r, "fit.rcond")?, "fit.rcond")?;
            }
            if let Some(t) = &f.tolerance {
                fit_tolerance = positive(real(t, "fit.tolerance")?, "fit.tolerance")?;
            }
        }

        let mut watson = WatsonSettings { u: vec![10.0, 20.0, 40.0], terms: 120, angle: 0.0, truncation_tolerance: 1e-6, closed_form_tolerance: 1e-9 };
        if let Some(w) = &raw.watson {
            if let Some(u) = &w.u {
                watson.u = u
                    .iter()
                    .enumerate()
                    .map(|(i, x)| positive(real(x, &format!("watson.u[{i}]"))?, &format!("watson.u[{i}]")))
                    .collect::<Result<_, _>>()?;
            }
            watson.terms = w.terms.unwrap_or(watson.terms);
            if let Some(a) = &w.angle {
                watson.angle = real(a, "watson.angle")?;
            }
            if let Some(t) = &w.truncation_tolerance {
                watson.truncation_tolerance = positive(real(t, "watson.truncation_tolerance")?, "watson.truncation_tolerance")?;
            }
            if let Some(t) = &w.closed_form_tolerance {
                watson.closed_form_tolerance = positive(real(t, "watson.closed_form_tolerance")?, "watson.closed_form_tolerance")?;
            }
        }

        let mut convergence_d = vec![Q::from_integer(0.into()); g.r];
        let mut convergence_z = C64::new(1.0, 0.0);
        if let Some(c) = &raw.convergence {
            if let Some(d) = &c.d {
                convergence_d = vector(d, g.r, "convergence.d")?;
            }
            if let Some(z) = &c.z {
                let v = vector(z, 2, "convergence.z")?;
                convergence_z = C64::new(to_f64(&v[0]), to_f64(&v[1]));
            }
        }
        let ci_numeric = raw.ci.as_ref().and_then(|c| c.numeric).unwrap_or(false);

        Ok(Config {
            name: raw.name.clone().unwrap_or_else(|| String::from("unnamed")),
            command: raw.command,
            data,
            bases,
            order,
            limits,
            gkz_degrees,
            reg_degrees,
            twists,
            fit,
            fit_tolerance,
            watson,
            convergence_d,
            convergence_z,
            ci_numeric,
            echo,
        })
    }

    /// `--tolerance` replaces every numeric acceptance tolerance.
    pub fn override_tolerance(&mut self, tol: f64) {
        self.fit_tolerance = tol;
        self.watson.truncation_tolerance = tol;
        self.watson.closed_form_tolerance = tol;
    }
}
