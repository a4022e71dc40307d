//! Force sweeps along one axis and refinement of force zero crossings.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::model::{Molecule, PolarizationPreset, QuadConfig, Scene, State, CONSTANTS_VERSION, LIH_OMEGA0};
use crate::potential::{force, force_in_paper_units, force_vac, force_with_vac, Channel, ForceResult};

/// Environment variable capping sweep parallelism; `0` or unset means one thread per core.
pub const THREADS_ENV: &str = "CPNEQ_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// `Ts = Te = value`.
    TEquilibrium,
    /// `Ts = value`, `Te` fixed.
    TsAtFixedTe,
    /// `Te = value`, `Ts` fixed.
    TeAtFixedTs,
    /// `z = value` in metres.
    Z,
}

impl SweepAxis {
    pub fn is_temperature(self) -> bool {
        !matches!(self, SweepAxis::Z)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::TEquilibrium => "t_equilibrium",
            SweepAxis::TsAtFixedTe => "ts_at_fixed_te",
            SweepAxis::TeAtFixedTs => "te_at_fixed_ts",
            SweepAxis::Z => "z",
        }
    }
}

/// A one-dimensional grid of scenes sharing everything but the axis value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub epsilon: f64,
    pub z: f64,
    pub ts: f64,
    pub te: f64,
    pub state: State,
    pub preset: PolarizationPreset,
    #[serde(default = "default_omega0")]
    pub omega0: f64,
    /// Total polarizability; 1 makes paper-unit forces α-independent.
    #[serde(default = "default_alpha")]
    pub alpha_total: f64,
}

fn default_omega0() -> f64 {
    LIH_OMEGA0
}

fn default_alpha() -> f64 {
    1.0
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return domain(format!(
                "sweep range must satisfy lo < hi, got [{}, {}]",
                self.lo, self.hi
            ));
        }
        if self.points < 2 {
            return domain(format!("a sweep needs at least 2 points, got {}", self.points));
        }
        let min = if self.axis.is_temperature() {
            0.0
        } else {
            f64::MIN_POSITIVE
        };
        if self.lo < min {
            return domain(format!("sweep range starts at an unphysical value {}", self.lo));
        }
        self.molecule()?;
        self.scene_at(self.lo)?;
        Ok(())
    }

    pub fn molecule(&self) -> Result<Molecule> {
        Molecule::with_preset(self.omega0, self.state, self.preset, self.alpha_total)
    }

    pub fn scene_at(&self, value: f64) -> Result<Scene> {
        let (z, ts, te) = match self.axis {
            SweepAxis::TEquilibrium => (self.z, value, value),
            SweepAxis::TsAtFixedTe => (self.z, value, self.te),
            SweepAxis::TeAtFixedTs => (self.z, self.ts, value),
            SweepAxis::Z => (value, self.ts, self.te),
        };
        Scene::new(self.epsilon, z, ts, te)
    }

    /// Evenly spaced axis values, endpoints included exactly.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * (i as f64 / n as f64)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    /// The force and its value in paper units, or the failure for this point.
    pub outcome: std::result::Result<(ForceResult, f64), Error>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepMetadata {
    /// SHA-256 of the canonical JSON of the spec and quadrature settings.
    pub config_hash: String,
    pub constants_version: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub spec: SweepSpec,
    /// Sorted by strictly increasing axis value.
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepTable {
    /// Adjacent rows whose paper-unit forces have opposite signs.
    pub fn sign_changes(&self) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .filter_map(|w| match (&w[0].outcome, &w[1].outcome) {
                (Ok((_, a)), Ok((_, b))) if a.signum() != b.signum() => Some((w[0].axis_value, w[1].axis_value)),
                _ => None,
            })
            .collect()
    }
}

pub fn config_hash(spec: &SweepSpec, cfg: &QuadConfig) -> String {
    let json = serde_json::to_string(&(spec, cfg)).expect("spec and config serialize");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

/// Thread count from [`THREADS_ENV`]; `None` means rayon's default.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok().and_then(|v| parse_threads(&v))
}

fn parse_threads(v: &str) -> Option<usize> {
    v.trim().parse::<usize>().ok().filter(|&n| n > 0)
}

fn in_pool<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    match thread_cap() {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(job),
            Err(_) => job(),
        },
        None => job(),
    }
}

fn evaluate(mol: &Molecule, scene: &Scene, vac: Option<&Channel>, cfg: &QuadConfig) -> Result<(ForceResult, f64)> {
    let f = match vac {
        Some(v) => force_with_vac(mol, scene, *v, cfg)?,
        None => force(mol, scene, cfg)?,
    };
    let paper = force_in_paper_units(&f, mol)?;
    Ok((f, paper))
}

/// Evaluates the force at every grid point. Rows are independent; a failing row records its
/// error and the sweep continues.
pub fn run_sweep(spec: &SweepSpec, cfg: &QuadConfig) -> Result<SweepTable> {
    spec.validate()?;
    cfg.validate()?;
    let mol = spec.molecule()?;
    // temperature axes share one vacuum channel
    let vac = if spec.axis.is_temperature() {
        Some(force_vac(&mol, &spec.scene_at(spec.lo)?, cfg)?)
    } else {
        None
    };
    let grid = spec.grid();
    let rows = in_pool(|| {
        grid.par_iter()
            .map(|&v| SweepRow {
                axis_value: v,
                outcome: spec.scene_at(v).and_then(|s| evaluate(&mol, &s, vac.as_ref(), cfg)),
            })
            .collect::<Vec<_>>()
    });
    Ok(SweepTable {
        spec: *spec,
        rows,
        metadata: SweepMetadata {
            config_hash: config_hash(spec, cfg),
            constants_version: CONSTANTS_VERSION,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transition {
    NoRoot,
    Root {
        /// Best estimate of the crossing on the sweep axis.
        value: f64,
        /// Interval containing the crossing once quadrature error is propagated through the
        /// local slope; always inside the input bracket.
        interval: (f64, f64),
        force: f64,
        force_error: f64,
        evaluations: usize,
    },
}

impl Transition {
    pub fn value(&self) -> Option<f64> {
        match self {
            Transition::Root { value, .. } => Some(*value),
            Transition::NoRoot => None,
        }
    }
}

/// Stop once the bracket is narrower than this (axis units).
pub const DEFAULT_AXIS_TOL: f64 = 0.1;

/// Refines a sign change of the total force on `[lo, hi]` along `spec.axis`.
pub fn find_transition(spec: &SweepSpec, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Transition> {
    find_transition_with_tol(spec, lo, hi, DEFAULT_AXIS_TOL, cfg)
}

/// Illinois false position: secant steps with the stale endpoint halved, falling back to
/// bisection when a step makes too little progress. Continues past `axis_tol` until the force
/// is within ten times its own error estimate, so the returned point sits on the numerical zero.
pub fn find_transition_with_tol(
    spec: &SweepSpec,
    lo: f64,
    hi: f64,
    axis_tol: f64,
    cfg: &QuadConfig,
) -> Result<Transition> {
    if !(lo < hi) {
        return domain(format!("bracket must satisfy lo < hi, got [{lo}, {hi}]"));
    }
    cfg.validate()?;
    let mol = spec.molecule()?;
    let vac = if spec.axis.is_temperature() {
        Some(force_vac(&mol, &spec.scene_at(lo)?, cfg)?)
    } else {
        None
    };
    let mut evaluations = 0;
    let mut eval = |x: f64| -> Result<(f64, f64)> {
        evaluations += 1;
        let (f, _) = evaluate(&mol, &spec.scene_at(x)?, vac.as_ref(), cfg)?;
        Ok((f.f_total, f.error))
    };

    let (mut a, mut b) = (lo, hi);
    let (mut fa, ea) = eval(a)?;
    let (mut fb, eb) = eval(b)?;
    if fa == 0.0 {
        return Ok(root(a, (a, a), fa, ea, evaluations));
    }
    if fb == 0.0 {
        return Ok(root(b, (b, b), fb, eb, evaluations));
    }
    if fa.signum() == fb.signum() {
        return Ok(Transition::NoRoot);
    }

    // (ta, tb) are the true endpoint forces; (fa, fb) carry the Illinois down-weighting
    let (mut ta, mut tb) = (fa, fb);
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa, ea) } else { (b, fb, eb) };
    for _ in 0..200 {
        let width = b - a;
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a + 0.01 * width && x < b - 0.01 * width) {
            x = 0.5 * (a + b);
        }
        let (fx, ex) = eval(x)?;
        if fx.abs() <= best.1.abs() {
            best = (x, fx, ex);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            ta = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            tb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if fx == 0.0 || (fx.abs() <= 10.0 * ex && b - a <= axis_tol) || b - a <= axis_tol * 1e-9 {
            break;
        }
    }

    let (x, fx, ex) = best;
    let slope = ((tb - ta) / (b - a)).abs();
    let half = if slope > 0.0 { 10.0 * ex / slope } else { 0.0 };
    let interval = ((x - half).max(lo).min(x), (x + half).min(hi).max(x));
    Ok(root(x, interval, fx, ex, evaluations))
}

fn root(value: f64, interval: (f64, f64), force: f64, force_error: f64, evaluations: usize) -> Transition {
    Transition::Root {
        value,
        interval,
        force,
        force_error,
        evaluations,
    }
}

/// Refines every sign change found in a sweep table.
pub fn transitions_in(table: &SweepTable, cfg: &QuadConfig) -> Result<Vec<Transition>> {
    table
        .sign_changes()
        .into_iter()
        .map(|(lo, hi)| find_transition(&table.spec, lo, hi, cfg))
        .collect()
}
