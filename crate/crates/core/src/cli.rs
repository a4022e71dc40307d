//! Command-line front end: TOML scene configuration, CSV tables and optional SVG plots.
//!
//! CSV is the source of truth. Plots are rendered from the CSV bytes after they are written.
//! Numbers are printed in their shortest round-trip form with a `.` decimal separator.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{threshold_t0, threshold_te0, threshold_ts0};
use crate::error::Error;
use crate::model::{
    characteristic_temperatures, regime_classify, Molecule, PolarizationPreset, QuadConfig, Regime, Scene, State,
    CONSTANTS_VERSION, LIH_OMEGA0,
};
use crate::potential::{force, paper_force_unit, potential_total, ForceResult};
use crate::solvers::{config_hash, run_sweep, transitions_in, SweepAxis, SweepSpec, SweepTable, Transition};

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Permittivities drawn in every figure.
pub const FIGURE_EPSILONS: [f64; 4] = [2.0, 5.0, 10.0, 15.0];

const FORCE_COLUMNS: [&str; 9] = [
    "eps",
    "state",
    "pol_preset",
    "f_total_SI_N",
    "f_vac_SI_N",
    "f_eq_SI_N",
    "f_neq_SI_N",
    "f_paper_units",
    "err_est_N",
];

const POTENTIAL_COLUMNS: [&str; 8] = [
    "eps",
    "state",
    "pol_preset",
    "u_total_SI_J",
    "u_vac_SI_J",
    "u_eq_SI_J",
    "u_neq_SI_J",
    "err_est_J",
];

#[derive(Debug, Parser)]
#[command(
    name = "cpneq",
    version,
    about = "Casimir-Polder force on a two-level molecule near a dielectric substrate, in and out of thermal equilibrium"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// CSV output path; tables go to stdout when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also render an SVG plot next to the CSV.
    #[arg(long, global = true)]
    pub plot: bool,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, value_name = "REL")]
    pub tol: Option<f64>,
    /// Number of grid points for sweeps, figures and threshold scans.
    #[arg(long, global = true, value_name = "N")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Force on the configured molecule with its channel breakdown.
    Force,
    /// Potential with its channel breakdown.
    Potential,
    /// Force along the axis given in the `[sweep]` table.
    Sweep,
    /// Analytic threshold temperatures next to the numeric sign changes.
    Threshold,
    /// Curves of one published figure for ε = 2, 5, 10, 15.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
    },
    /// Characteristic temperatures and the regime of the configured scene.
    Regime,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2a,
    Fig2b,
    Fig2c,
}

impl FigureId {
    pub fn preset(self) -> PolarizationPreset {
        match self {
            FigureId::Fig1a | FigureId::Fig2a => PolarizationPreset::TransverseZ,
            FigureId::Fig1b | FigureId::Fig2b => PolarizationPreset::ParallelSurface,
            FigureId::Fig1c | FigureId::Fig2c => PolarizationPreset::Isotropic,
        }
    }

    pub fn axis(self) -> SweepAxis {
        match self {
            FigureId::Fig1a | FigureId::Fig1b | FigureId::Fig1c => SweepAxis::TEquilibrium,
            _ => SweepAxis::TsAtFixedTe,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig1c => "fig1c",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
        }
    }

    /// Sweep for one curve of the figure.
    pub fn spec(self, epsilon: f64, fig: &FigureConfig) -> SweepSpec {
        SweepSpec {
            axis: self.axis(),
            lo: fig.lo,
            hi: fig.hi,
            points: fig.points,
            epsilon,
            z: fig.z,
            ts: fig.te,
            te: fig.te,
            state: State::Ground,
            preset: self.preset(),
            omega0: fig.omega0,
            alpha_total: 1.0,
        }
    }
}

/// Full run configuration. Every table is optional; unknown keys are rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub molecule: MoleculeConfig,
    pub scene: SceneConfig,
    pub quadrature: QuadConfig,
    pub sweep: Option<SweepConfig>,
    pub figure: FigureConfig,
    pub threshold: ThresholdConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MoleculeConfig {
    /// Transition angular frequency in rad/s.
    pub omega0: f64,
    pub state: State,
    /// Mutually exclusive with `alpha`; isotropic when both are absent.
    pub preset: Option<PolarizationPreset>,
    pub alpha_total: f64,
    /// Explicit `[αx, αy, αz]`.
    pub alpha: Option<[f64; 3]>,
}

impl Default for MoleculeConfig {
    fn default() -> Self {
        MoleculeConfig {
            omega0: LIH_OMEGA0,
            state: State::Ground,
            preset: None,
            alpha_total: 1.0,
            alpha: None,
        }
    }
}

impl MoleculeConfig {
    fn preset(&self) -> Result<Option<PolarizationPreset>, CliError> {
        match (self.preset, self.alpha) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "molecule: set either `preset` or `alpha`, not both".into(),
            )),
            (None, Some(_)) => Ok(None),
            (p, None) => Ok(Some(p.unwrap_or(PolarizationPreset::Isotropic))),
        }
    }

    pub fn build(&self) -> Result<(Molecule, &'static str), CliError> {
        Ok(match self.preset()? {
            Some(p) => (
                Molecule::with_preset(self.omega0, self.state, p, self.alpha_total)?,
                p.as_str(),
            ),
            None => {
                let [ax, ay, az] = self.alpha.unwrap_or_default();
                (Molecule::new(self.omega0, self.state, ax, ay, az)?, "custom")
            }
        })
    }

    fn require_preset(&self, what: &str) -> Result<PolarizationPreset, CliError> {
        self.preset()?
            .ok_or_else(|| CliError::Config(format!("{what} needs a polarization `preset`, not an explicit `alpha`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SceneConfig {
    pub epsilon: f64,
    /// Molecule-surface distance in metres.
    pub z: f64,
    /// Substrate temperature in kelvin.
    pub ts: f64,
    /// Environment temperature in kelvin.
    pub te: f64,
}

impl Default for SceneConfig {
    fn default() -> Self {
        SceneConfig {
            epsilon: 5.0,
            z: 6e-6,
            ts: 300.0,
            te: 300.0,
        }
    }
}

impl SceneConfig {
    pub fn build(&self) -> Result<Scene, CliError> {
        Ok(Scene::new(self.epsilon, self.z, self.ts, self.te)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub lo: f64,
    pub hi: f64,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    50
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureConfig {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub z: f64,
    /// Environment temperature of the out-of-equilibrium figures.
    pub te: f64,
    pub omega0: f64,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            lo: 10.0,
            hi: 500.0,
            points: default_points(),
            z: 6e-6,
            te: 300.0,
            omega0: LIH_OMEGA0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    /// Lower end of the numeric scans, in kelvin.
    pub lo: f64,
    /// Upper end; four times the largest analytic threshold when absent.
    pub hi: Option<f64>,
    pub points: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        ThresholdConfig {
            lo: 1.0,
            hi: None,
            points: 41,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    /// Writing a plot here does not need `--plot`.
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

fn io_error(path: &Path, e: impl fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Reads the configuration and applies command-line overrides.
pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            toml::from_str::<RunConfig>(&text).map_err(|e| io_error(path, e))?
        }
        None => RunConfig::default(),
    };
    if let Some(tol) = cli.tol {
        cfg.quadrature.rel_tol = tol;
    }
    if let Some(n) = cli.points {
        if let Some(s) = cfg.sweep.as_mut() {
            s.points = n;
        }
        cfg.figure.points = n;
        cfg.threshold.points = n;
    }
    if let Some(out) = &cli.out {
        cfg.output.csv = Some(out.clone());
    }
    if cli.plot && cfg.output.plot.is_none() {
        let csv = cfg
            .output
            .csv
            .as_ref()
            .ok_or_else(|| CliError::Config("--plot needs --out or `output.plot`".into()))?;
        cfg.output.plot = Some(csv.with_extension("svg"));
    }
    cfg.quadrature.validate()?;
    Ok(cfg)
}

struct ForceRow<'a> {
    axis_value: f64,
    preset: &'a str,
    force: ForceResult,
}

fn paper_units(value: f64, mol: &Molecule) -> f64 {
    if mol.alpha_total() == 0.0 {
        f64::NAN
    } else {
        value / paper_force_unit(mol)
    }
}

fn axis_column(axis: SweepAxis) -> &'static str {
    if axis.is_temperature() {
        "axis_value_K"
    } else {
        "axis_value_m"
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, CliError> {
    w.into_inner().map_err(|e| CliError::Config(format!("CSV buffer: {e}")))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Config(format!("CSV: {e}"))
}

fn force_csv(axis_header: &str, rows: &[ForceRow]) -> Result<Vec<u8>, CliError> {
    let mut w = csv_writer();
    let mut header = vec![axis_header];
    header.extend(FORCE_COLUMNS);
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let f = &r.force;
        let m = &f.molecule;
        w.write_record([
            format_float(r.axis_value),
            format_float(f.scene.epsilon()),
            m.state().as_str().to_string(),
            r.preset.to_string(),
            format_float(f.f_total),
            format_float(f.f_vac.value),
            format_float(f.f_eq.value),
            format_float(f.f_neq.value),
            format_float(paper_units(f.f_total, m)),
            format_float(f.error),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

fn sweep_rows(table: &SweepTable) -> Result<Vec<ForceRow<'static>>, CliError> {
    table
        .rows
        .iter()
        .map(|row| match &row.outcome {
            Ok((f, _)) => Ok(ForceRow {
                axis_value: row.axis_value,
                preset: table.spec.preset.as_str(),
                force: *f,
            }),
            Err(e) => Err(CliError::from(e.clone()).context(&format!(
                "{} = {}",
                table.spec.axis.as_str(),
                format_float(row.axis_value)
            ))),
        })
        .collect()
}

impl CliError {
    fn context(self, what: &str) -> CliError {
        match self {
            CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
        }
    }
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    config_hashes: Vec<String>,
    constants_version: &'static str,
}

/// Writes the CSV, its metadata sidecar and the optional plot; without a CSV path the table goes
/// to `stdout`.
fn emit(cfg: &RunConfig, csv: &[u8], meta: &Metadata, title: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.output.csv {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| io_error(path, e))?;
            let sidecar = path.with_extension("meta.json");
            let json = serde_json::to_string_pretty(meta).map_err(|e| CliError::Config(e.to_string()))?;
            std::fs::write(&sidecar, json + "\n").map_err(|e| io_error(&sidecar, e))?;
        }
        None => stdout
            .write_all(csv)
            .map_err(|e| CliError::Config(format!("stdout: {e}")))?,
    }
    if let Some(svg) = &cfg.output.plot {
        render_plot(csv, svg, title)?;
    }
    Ok(())
}

fn line(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    writeln!(stdout, "{text}").map_err(|e| CliError::Config(format!("stdout: {e}")))
}

fn cmd_force(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (mol, preset) = cfg.molecule.build()?;
    let scene = cfg.scene.build()?;
    let f = force(&mol, &scene, &cfg.quadrature)?;
    let pu = |v: f64| format_float(paper_units(v, &mol));
    line(
        stdout,
        &format!(
            "f_total_SI_N={} f_vac_SI_N={} f_eq_SI_N={} f_neq_SI_N={} f_paper_units={} f_vac_paper={} f_eq_paper={} f_neq_paper={} err_est_N={}",
            format_float(f.f_total),
            format_float(f.f_vac.value),
            format_float(f.f_eq.value),
            format_float(f.f_neq.value),
            pu(f.f_total),
            pu(f.f_vac.value),
            pu(f.f_eq.value),
            pu(f.f_neq.value),
            format_float(f.error),
        ),
    )?;
    if cfg.output.csv.is_some() {
        let rows = [ForceRow {
            axis_value: scene.z(),
            preset,
            force: f,
        }];
        let csv = force_csv(axis_column(SweepAxis::Z), &rows)?;
        let meta = Metadata {
            command: "force",
            config_hashes: vec![run_hash(cfg)],
            constants_version: CONSTANTS_VERSION,
        };
        emit(cfg, &csv, &meta, "force", stdout)?;
    }
    Ok(())
}

fn run_hash(cfg: &RunConfig) -> String {
    use sha2::{Digest, Sha256};
    let json = serde_json::to_string(cfg).expect("configuration serializes");
    format!("{:x}", Sha256::digest(json.as_bytes()))
}

fn cmd_potential(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (mol, preset) = cfg.molecule.build()?;
    let scene = cfg.scene.build()?;
    let u = potential_total(&mol, &scene, &cfg.quadrature)?;
    line(
        stdout,
        &format!(
            "u_total_SI_J={} u_vac_SI_J={} u_eq_SI_J={} u_neq_SI_J={} err_est_J={}",
            format_float(u.u_total),
            format_float(u.u_vac.value),
            format_float(u.u_eq.value),
            format_float(u.u_neq.value),
            format_float(u.error),
        ),
    )?;
    if cfg.output.csv.is_some() {
        let mut w = csv_writer();
        let mut header = vec![axis_column(SweepAxis::Z)];
        header.extend(POTENTIAL_COLUMNS);
        w.write_record(&header).map_err(csv_err)?;
        w.write_record([
            format_float(scene.z()),
            format_float(scene.epsilon()),
            mol.state().as_str().to_string(),
            preset.to_string(),
            format_float(u.u_total),
            format_float(u.u_vac.value),
            format_float(u.u_eq.value),
            format_float(u.u_neq.value),
            format_float(u.error),
        ])
        .map_err(csv_err)?;
        let meta = Metadata {
            command: "potential",
            config_hashes: vec![run_hash(cfg)],
            constants_version: CONSTANTS_VERSION,
        };
        let csv = finish(w)?;
        // Potential tables have no force column to plot.
        let no_plot = RunConfig {
            output: OutputConfig {
                plot: None,
                ..cfg.output.clone()
            },
            ..cfg.clone()
        };
        emit(&no_plot, &csv, &meta, "potential", stdout)?;
    }
    Ok(())
}

fn sweep_spec(cfg: &RunConfig) -> Result<SweepSpec, CliError> {
    let sweep = cfg
        .sweep
        .ok_or_else(|| CliError::Config("the sweep command needs a `[sweep]` table".into()))?;
    let preset = cfg.molecule.require_preset("a sweep")?;
    let spec = SweepSpec {
        axis: sweep.axis,
        lo: sweep.lo,
        hi: sweep.hi,
        points: sweep.points,
        epsilon: cfg.scene.epsilon,
        z: cfg.scene.z,
        ts: cfg.scene.ts,
        te: cfg.scene.te,
        state: cfg.molecule.state,
        preset,
        omega0: cfg.molecule.omega0,
        alpha_total: cfg.molecule.alpha_total,
    };
    spec.validate()?;
    Ok(spec)
}

fn cmd_sweep(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let spec = sweep_spec(cfg)?;
    let table = run_sweep(&spec, &cfg.quadrature)?;
    let csv = force_csv(axis_column(spec.axis), &sweep_rows(&table)?)?;
    let meta = Metadata {
        command: "sweep",
        config_hashes: vec![table.metadata.config_hash.clone()],
        constants_version: CONSTANTS_VERSION,
    };
    emit(cfg, &csv, &meta, spec.axis.as_str(), stdout)
}

/// Runs every curve of a figure and returns the CSV bytes with the per-curve config hashes.
pub fn figure_csv(id: FigureId, fig: &FigureConfig, quad: &QuadConfig) -> Result<(Vec<u8>, Vec<String>), CliError> {
    let mut rows = Vec::new();
    let mut hashes = Vec::new();
    for eps in FIGURE_EPSILONS {
        let spec = id.spec(eps, fig);
        spec.validate()?;
        let table = run_sweep(&spec, quad)?;
        rows.extend(sweep_rows(&table)?);
        hashes.push(config_hash(&spec, quad));
    }
    Ok((force_csv(axis_column(id.axis()), &rows)?, hashes))
}

fn cmd_figure(id: FigureId, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (csv, hashes) = figure_csv(id, &cfg.figure, &cfg.quadrature)?;
    let meta = Metadata {
        command: id.as_str(),
        config_hashes: hashes,
        constants_version: CONSTANTS_VERSION,
    };
    emit(cfg, &csv, &meta, id.as_str(), stdout)
}

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::LowT => "low_t",
        Regime::IntermediateT => "intermediate_t",
        Regime::HighT => "high_t",
        Regime::Unclassified => "unclassified",
    }
}

fn cmd_regime(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (mol, _) = cfg.molecule.build()?;
    let scene = cfg.scene.build()?;
    let ct = characteristic_temperatures(&scene, &mol);
    line(
        stdout,
        &format!(
            "regime={} tz_K={} tz_eps_K={} tw0_K={} ts_K={} te_K={}",
            regime_name(regime_classify(&scene, &mol)),
            format_float(ct.tz),
            format_float(ct.tz_eps),
            format_float(ct.tw0),
            format_float(scene.ts()),
            format_float(scene.te()),
        ),
    )
}

struct ThresholdRow {
    name: &'static str,
    analytic: f64,
    axis: SweepAxis,
    state: State,
    /// `(ts, te)` held fixed; the swept one is ignored.
    fixed: (f64, f64),
}

fn numeric_transition(
    row: &ThresholdRow,
    preset: PolarizationPreset,
    cfg: &RunConfig,
    lo: f64,
    hi: f64,
) -> Result<Option<Transition>, CliError> {
    if !(hi > lo) {
        return Ok(None);
    }
    let spec = SweepSpec {
        axis: row.axis,
        lo,
        hi,
        points: cfg.threshold.points,
        epsilon: cfg.scene.epsilon,
        z: cfg.scene.z,
        ts: row.fixed.0,
        te: row.fixed.1,
        state: row.state,
        preset,
        omega0: cfg.molecule.omega0,
        alpha_total: cfg.molecule.alpha_total,
    };
    let table = run_sweep(&spec, &cfg.quadrature)?;
    sweep_rows(&table)?;
    Ok(transitions_in(&table, &cfg.quadrature)?.into_iter().next())
}

fn cmd_threshold(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let preset = cfg.molecule.require_preset("the threshold scan")?;
    let (mol, _) = cfg.molecule.build()?;
    let scene = cfg.scene.build()?;
    let (z, eps) = (scene.z(), scene.epsilon());
    let rows = [
        ThresholdRow {
            name: "T0",
            analytic: threshold_t0(&mol, z, eps)?,
            axis: SweepAxis::TEquilibrium,
            state: State::Ground,
            fixed: (0.0, 0.0),
        },
        ThresholdRow {
            name: "Ts0",
            analytic: threshold_ts0(&mol, z, eps)?,
            axis: SweepAxis::TsAtFixedTe,
            state: State::Ground,
            fixed: (0.0, 0.0),
        },
        ThresholdRow {
            name: "Te0",
            analytic: threshold_te0(z, eps, mol.omega0())?,
            axis: SweepAxis::TeAtFixedTs,
            state: State::Excited,
            fixed: (0.0, 0.0),
        },
    ];
    let largest = rows.iter().map(|r| r.analytic).fold(0.0, f64::max);
    let lo = cfg.threshold.lo;
    let hi = cfg.threshold.hi.unwrap_or(4.0 * largest);
    line(
        stdout,
        &format!(
            "scene eps={} z_m={} omega0_rad_s={} pol_preset={} scan_K=[{}, {}]",
            format_float(eps),
            format_float(z),
            format_float(mol.omega0()),
            preset.as_str(),
            format_float(lo),
            format_float(hi),
        ),
    )?;
    for row in &rows {
        let numeric = match numeric_transition(row, preset, cfg, lo, hi)? {
            Some(Transition::Root { value, interval, .. }) => format!(
                "{} interval_K=[{}, {}]",
                format_float(value),
                format_float(interval.0),
                format_float(interval.1)
            ),
            _ => "none".to_string(),
        };
        let at = match row.axis {
            SweepAxis::TEquilibrium => scene.with_temperatures(row.analytic, row.analytic)?,
            SweepAxis::TsAtFixedTe => scene.with_temperatures(row.analytic, 0.0)?,
            _ => scene.with_temperatures(0.0, row.analytic)?,
        };
        let regime = regime_classify(&at, &mol.with_state(row.state));
        line(
            stdout,
            &format!(
                "{}_K={} state={} numeric_K={} regime_at_threshold={}",
                row.name,
                format_float(row.analytic),
                row.state.as_str(),
                numeric,
                regime_name(regime),
            ),
        )?;
        if regime != Regime::HighT {
            line(
                stdout,
                &format!(
                    "advisory: {} lies outside the near-zone high-temperature window; the analytic value is indicative only",
                    row.name
                ),
            )?;
        }
    }
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(cli)?;
    match cli.command {
        Command::Force => cmd_force(&cfg, stdout),
        Command::Potential => cmd_potential(&cfg, stdout),
        Command::Sweep => cmd_sweep(&cfg, stdout),
        Command::Threshold => cmd_threshold(&cfg, stdout),
        Command::Figure { id } => cmd_figure(id, &cfg, stdout),
        Command::Regime => cmd_regime(&cfg, stdout),
    }
}

/// Entry point of the `cpneq` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cpneq: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

/// Draws `f_paper_units` against the first column, one line per permittivity.
pub fn render_plot(csv: &[u8], svg: &Path, title: &str) -> Result<(), CliError> {
    use plotters::prelude::*;

    let mut reader = csv::Reader::from_reader(csv);
    let x_label = reader.headers().map_err(csv_err)?.get(0).unwrap_or("x").to_string();
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| rec.get(i).and_then(|s| s.parse::<f64>().ok()).unwrap_or(f64::NAN);
        let (x, y) = (num(0), num(8));
        if !(x.is_finite() && y.is_finite()) {
            continue;
        }
        let eps = rec.get(1).unwrap_or("").to_string();
        match curves.iter_mut().find(|(e, _)| *e == eps) {
            Some((_, pts)) => pts.push((x, y)),
            None => curves.push((eps, vec![(x, y)])),
        }
    }
    let pts = curves.iter().flat_map(|(_, p)| p.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0 < x1) {
        return Err(CliError::Config("nothing to plot".into()));
    }
    if !(y0 < y1) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let pad = 0.05 * (y1 - y0);

    let draw_err = |e: &dyn fmt::Display| io_error(svg, e);
    let root = SVGBackend::new(svg, (800, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| draw_err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 24))
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(x0..x1, (y0 - pad)..(y1 + pad))
        .map_err(|e| draw_err(&e))?;
    chart
        .configure_mesh()
        .x_desc(x_label)
        .y_desc("force / (ħcω0²α/128πε0)")
        .draw()
        .map_err(|e| draw_err(&e))?;
    chart
        .draw_series(LineSeries::new([(x0, 0.0), (x1, 0.0)], BLACK.mix(0.4)))
        .map_err(|e| draw_err(&e))?;
    for (i, (eps, points)) in curves.into_iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(points, color.stroke_width(2)))
            .map_err(|e| draw_err(&e))?
            .label(format!("ε = {eps}"))
            .legend(move |(x, y)| PathElement::new([(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| draw_err(&e))?;
    root.present().map_err(|e| draw_err(&e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.0,
            1.0,
            -2.5e-30,
            1.2345678901234567e-12,
            300.0,
            6e-6,
            1e16,
            f64::MIN_POSITIVE,
        ] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains(','));
        }
        assert_eq!(format_float(300.0), "300");
        assert_eq!(format_float(6e-6), "6e-6");
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(toml::from_str::<RunConfig>("[scene]\nepsilon = 2\ntemperature = 3\n").is_err());
        assert!(toml::from_str::<RunConfig>("colour = 1\n").is_err());
        assert!(toml::from_str::<RunConfig>("[quadrature]\nrel_tol = 1e-8\nfoo = 1\n").is_err());
    }

    #[test]
    fn empty_config_is_the_reference_scene() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let (mol, preset) = cfg.molecule.build().unwrap();
        assert_eq!(preset, "isotropic");
        assert_eq!(mol.alpha_total(), 1.0);
    }

    #[test]
    fn preset_and_alpha_are_exclusive() {
        let cfg: RunConfig = toml::from_str("[molecule]\npreset = \"parallel\"\nalpha = [1, 0, 0]\n").unwrap();
        assert!(matches!(cfg.molecule.build(), Err(CliError::Config(_))));
    }

    #[test]
    fn domain_errors_map_to_config_exit_code() {
        let cfg: RunConfig = toml::from_str("[scene]\nepsilon = 1.0\n").unwrap();
        let e = cfg.scene.build().unwrap_err();
        assert_eq!(e.exit_code(), EXIT_CONFIG);
        let n = CliError::from(Error::SeriesNotConverged { needed: 5, cap: 1 });
        assert_eq!(n.exit_code(), EXIT_NUMERICAL);
    }

    #[test]
    fn figure_ids_map_to_presets_and_axes() {
        assert_eq!(FigureId::Fig1b.preset(), PolarizationPreset::ParallelSurface);
        assert_eq!(FigureId::Fig2c.axis(), SweepAxis::TsAtFixedTe);
        let spec = FigureId::Fig2a.spec(5.0, &FigureConfig::default());
        assert_eq!((spec.te, spec.z, spec.state), (300.0, 6e-6, State::Ground));
    }
}
