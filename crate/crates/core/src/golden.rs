//! Reader for reference-value files and evaluation of their records with this crate.
//!
//! One record per line, `target|param-json|value|notes`. Blank lines and lines starting with
//! `#` are ignored. `value` is a decimal string kept verbatim alongside its `f64` parse.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{domain, Error, Result};
use crate::kernels::{bose_weighted_moment, f_sigma, freq_moment, Polarization};
use crate::model::{Molecule, QuadConfig, Scene, State};
use crate::potential::{force, potential_eq, potential_neq, potential_vac};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoldenTarget {
    FSigma,
    FreqMoment,
    BoseMoment,
    UVac,
    UEq,
    UNeq,
    ForceFd,
}

impl GoldenTarget {
    pub const ALL: [GoldenTarget; 7] = [
        GoldenTarget::FSigma,
        GoldenTarget::FreqMoment,
        GoldenTarget::BoseMoment,
        GoldenTarget::UVac,
        GoldenTarget::UEq,
        GoldenTarget::UNeq,
        GoldenTarget::ForceFd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GoldenTarget::FSigma => "f_sigma",
            GoldenTarget::FreqMoment => "freq_moment",
            GoldenTarget::BoseMoment => "bose_moment",
            GoldenTarget::UVac => "u_vac",
            GoldenTarget::UEq => "u_eq",
            GoldenTarget::UNeq => "u_neq",
            GoldenTarget::ForceFd => "force_fd",
        }
    }
}

impl fmt::Display for GoldenTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GoldenTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GoldenTarget::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown golden target `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRecord {
    pub target: GoldenTarget,
    pub params: serde_json::Value,
    /// Reference value exactly as written.
    pub value_text: String,
    pub value: f64,
    pub notes: String,
    /// 1-based line number in the source.
    pub line: usize,
}

fn parse_line(line: &str, number: usize) -> Result<GoldenRecord> {
    let fields: Vec<&str> = line.splitn(4, '|').collect();
    if fields.len() != 4 {
        return domain(format!(
            "line {number}: expected 4 `|`-separated fields, got {}",
            fields.len()
        ));
    }
    let target = fields[0]
        .trim()
        .parse::<GoldenTarget>()
        .map_err(|e| Error::Domain(format!("line {number}: {e}")))?;
    let params: serde_json::Value = serde_json::from_str(fields[1])
        .map_err(|e| Error::Domain(format!("line {number}: bad parameter JSON: {e}")))?;
    if !params.is_object() {
        return domain(format!("line {number}: parameters must be a JSON object"));
    }
    let value_text = fields[2].trim().to_string();
    let value = value_text
        .parse::<f64>()
        .map_err(|e| Error::Domain(format!("line {number}: bad value `{value_text}`: {e}")))?;
    Ok(GoldenRecord {
        target,
        params,
        value_text,
        value,
        notes: fields[3].trim().to_string(),
        line: number,
    })
}

pub fn parse_goldens(text: &str) -> Result<Vec<GoldenRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| parse_line(l, i + 1))
        .collect()
}

pub fn read_goldens(path: &Path) -> Result<Vec<GoldenRecord>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    parse_goldens(&text)
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Part {
    Re,
    Im,
}

impl Part {
    fn of(self, v: Complex64) -> f64 {
        match self {
            Part::Re => v.re,
            Part::Im => v.im,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MomentParams {
    p: u32,
    b: [f64; 2],
    s: f64,
    #[serde(default)]
    rate: Option<f64>,
    part: Part,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FSigmaParams {
    pol: Polarization,
    z: f64,
    omega: f64,
    epsilon: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneParams {
    state: State,
    /// `[αx, αy, αz]`.
    alpha: [f64; 3],
    omega0: f64,
    epsilon: f64,
    z: f64,
    ts: f64,
    te: f64,
}

impl SceneParams {
    fn build(&self) -> Result<(Molecule, Scene)> {
        let [ax, ay, az] = self.alpha;
        Ok((
            Molecule::new(self.omega0, self.state, ax, ay, az)?,
            Scene::new(self.epsilon, self.z, self.ts, self.te)?,
        ))
    }
}

fn params<T: DeserializeOwned>(rec: &GoldenRecord) -> Result<T> {
    T::deserialize(&rec.params)
        .map_err(|e| Error::Domain(format!("line {}: bad {} parameters: {e}", rec.line, rec.target)))
}

/// Value of the record's target computed by this crate, with its error estimate.
pub fn evaluate(rec: &GoldenRecord, cfg: &QuadConfig) -> Result<(f64, f64)> {
    match rec.target {
        GoldenTarget::FreqMoment => {
            let p: MomentParams = params(rec)?;
            let v = freq_moment(p.p, Complex64::new(p.b[0], p.b[1]), p.s)?;
            Ok((p.part.of(v), 0.0))
        }
        GoldenTarget::BoseMoment => {
            let p: MomentParams = params(rec)?;
            let Some(rate) = p.rate else {
                return domain(format!("line {}: bose_moment needs `rate`", rec.line));
            };
            let m = bose_weighted_moment(p.p, Complex64::new(p.b[0], p.b[1]), p.s, rate, cfg)?;
            Ok((p.part.of(m.value), m.abs_error_estimate))
        }
        GoldenTarget::FSigma => {
            let p: FSigmaParams = params(rec)?;
            let r = f_sigma(p.pol, p.z, p.omega, p.epsilon, cfg)?;
            Ok((r.value, r.abs_error_estimate))
        }
        GoldenTarget::UVac | GoldenTarget::UEq | GoldenTarget::UNeq | GoldenTarget::ForceFd => {
            let p: SceneParams = params(rec)?;
            let (m, s) = p.build()?;
            let c = match rec.target {
                GoldenTarget::UVac => potential_vac(&m, &s, cfg)?,
                GoldenTarget::UEq => potential_eq(&m, &s, cfg)?,
                GoldenTarget::UNeq => potential_neq(&m, &s, cfg)?,
                _ => {
                    let f = force(&m, &s, cfg)?;
                    return Ok((f.f_total, f.error));
                }
            };
            Ok((c.value, c.error))
        }
    }
}
