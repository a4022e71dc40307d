//! Domain types, physical constants and characteristic scales.
//!
//! SI units throughout: angular frequencies in rad/s, lengths in m, temperatures in K,
//! polarizabilities in C²·m²/J. A temperature of exactly zero is allowed and means the
//! corresponding Bose factor vanishes identically.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Fundamental constants, CODATA 2018.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub kb: f64,
    pub eps0: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    kb: 1.380_649e-23,
    eps0: 8.854_187_812_8e-12,
};

/// Label written into sweep metadata.
pub const CONSTANTS_VERSION: &str = "CODATA-2018";

/// Transition angular frequency of LiH used by the reference scenes.
pub const LIH_OMEGA0: f64 = 4.21e13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum State {
    Ground,
    Excited,
}

impl State {
    /// +1 for the ground state, -1 for the excited state.
    pub fn sign(self) -> f64 {
        match self {
            State::Ground => 1.0,
            State::Excited => -1.0,
        }
    }

    pub fn flipped(self) -> State {
        match self {
            State::Ground => State::Excited,
            State::Excited => State::Ground,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            State::Ground => "ground",
            State::Excited => "excited",
        }
    }
}

/// Orientation presets; each distributes a total polarizability over the axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolarizationPreset {
    #[serde(alias = "transverse_z", alias = "z")]
    TransverseZ,
    #[serde(alias = "parallel_surface", alias = "parallel")]
    ParallelSurface,
    #[serde(alias = "isotropic")]
    Isotropic,
}

impl PolarizationPreset {
    pub const ALL: [PolarizationPreset; 3] = [
        PolarizationPreset::TransverseZ,
        PolarizationPreset::ParallelSurface,
        PolarizationPreset::Isotropic,
    ];

    /// `(alpha_x, alpha_y, alpha_z)` summing to `alpha_total`.
    pub fn components(self, alpha_total: f64) -> [f64; 3] {
        match self {
            PolarizationPreset::TransverseZ => [0.0, 0.0, alpha_total],
            PolarizationPreset::ParallelSurface => [alpha_total / 2.0, alpha_total / 2.0, 0.0],
            PolarizationPreset::Isotropic => [alpha_total / 3.0; 3],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PolarizationPreset::TransverseZ => "transverse_z",
            PolarizationPreset::ParallelSurface => "parallel_surface",
            PolarizationPreset::Isotropic => "isotropic",
        }
    }
}

impl std::str::FromStr for PolarizationPreset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "transverse_z" | "TransverseZ" | "z" => Ok(PolarizationPreset::TransverseZ),
            "parallel_surface" | "ParallelSurface" | "parallel" => Ok(PolarizationPreset::ParallelSurface),
            "isotropic" | "Isotropic" => Ok(PolarizationPreset::Isotropic),
            other => Err(format!("unknown polarization preset '{other}'")),
        }
    }
}

/// Two-level molecule with a diagonal polarizability tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Molecule {
    omega0: f64,
    state: State,
    alpha: [f64; 3],
}

impl Molecule {
    pub fn new(omega0: f64, state: State, alpha_x: f64, alpha_y: f64, alpha_z: f64) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return domain(format!("omega0 must be positive and finite, got {omega0}"));
        }
        for (name, a) in [("alpha_x", alpha_x), ("alpha_y", alpha_y), ("alpha_z", alpha_z)] {
            if !(a.is_finite() && a >= 0.0) {
                return domain(format!("{name} must be finite and non-negative, got {a}"));
            }
        }
        Ok(Molecule {
            omega0,
            state,
            alpha: [alpha_x, alpha_y, alpha_z],
        })
    }

    pub fn with_preset(omega0: f64, state: State, preset: PolarizationPreset, alpha_total: f64) -> Result<Self> {
        let [ax, ay, az] = preset.components(alpha_total);
        Molecule::new(omega0, state, ax, ay, az)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn state(&self) -> State {
        self.state
    }

    pub fn alpha_x(&self) -> f64 {
        self.alpha[0]
    }

    pub fn alpha_y(&self) -> f64 {
        self.alpha[1]
    }

    pub fn alpha_z(&self) -> f64 {
        self.alpha[2]
    }

    pub fn alpha_par(&self) -> f64 {
        self.alpha[0] + self.alpha[1]
    }

    pub fn alpha_perp(&self) -> f64 {
        self.alpha[2]
    }

    pub fn alpha_total(&self) -> f64 {
        self.alpha_par() + self.alpha_perp()
    }

    /// Signed transition frequency: -omega0 for the ground state, +omega0 for the excited state.
    pub fn omega_ab(&self) -> f64 {
        -self.state.sign() * self.omega0
    }

    /// Transition wavelength c/omega0.
    pub fn lambda0(&self) -> f64 {
        CODATA_2018.c / self.omega0
    }

    pub fn with_state(&self, state: State) -> Molecule {
        Molecule { state, ..*self }
    }
}

/// Dielectric half-space, molecule position and the two temperatures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scene {
    epsilon: f64,
    z: f64,
    ts: f64,
    te: f64,
}

impl Scene {
    pub fn new(epsilon: f64, z: f64, ts: f64, te: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 1.0) {
            return domain(format!("epsilon must be finite and > 1, got {epsilon}"));
        }
        if !(z.is_finite() && z > 0.0) {
            return domain(format!("z must be positive and finite, got {z}"));
        }
        for (name, t) in [("Ts", ts), ("Te", te)] {
            if !(t.is_finite() && t >= 0.0) {
                return domain(format!("{name} must be finite and non-negative, got {t}"));
            }
        }
        Ok(Scene { epsilon, z, ts, te })
    }

    pub fn equilibrium(epsilon: f64, z: f64, t: f64) -> Result<Self> {
        Scene::new(epsilon, z, t, t)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn te(&self) -> f64 {
        self.te
    }

    /// Thermal wavelength ħc/(kB·Ts); infinite at zero temperature.
    pub fn beta_s(&self) -> f64 {
        thermal_length(self.ts)
    }

    /// Thermal wavelength ħc/(kB·Te); infinite at zero temperature.
    pub fn beta_e(&self) -> f64 {
        thermal_length(self.te)
    }

    pub fn with_temperatures(&self, ts: f64, te: f64) -> Result<Scene> {
        Scene::new(self.epsilon, self.z, ts, te)
    }

    pub fn with_z(&self, z: f64) -> Result<Scene> {
        Scene::new(self.epsilon, z, self.ts, self.te)
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Scene> {
        Scene::new(epsilon, self.z, self.ts, self.te)
    }

    pub fn swapped_temperatures(&self) -> Scene {
        Scene {
            ts: self.te,
            te: self.ts,
            ..*self
        }
    }
}

fn thermal_length(t: f64) -> f64 {
    if t == 0.0 {
        f64::INFINITY
    } else {
        CODATA_2018.hbar * CODATA_2018.c / (CODATA_2018.kb * t)
    }
}

/// Numerical knobs shared by every integral.
///
/// `abs_tol` applies to the dimensionless reduced integrals, which are O(1) at z ~ λ0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub bose_series_max_terms: usize,
    pub omega_cutoff_factor: f64,
    pub pv_window: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-15,
            max_subdivisions: 2000,
            bose_series_max_terms: 10_000,
            omega_cutoff_factor: 40.0,
            pv_window: 0.1,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return domain(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return domain(format!("abs_tol must be positive, got {}", self.abs_tol));
        }
        if self.max_subdivisions == 0 {
            return domain("max_subdivisions must be positive");
        }
        if self.bose_series_max_terms == 0 {
            return domain("bose_series_max_terms must be positive");
        }
        if !(self.omega_cutoff_factor > 0.0 && self.omega_cutoff_factor.is_finite()) {
            return domain(format!(
                "omega_cutoff_factor must be positive, got {}",
                self.omega_cutoff_factor
            ));
        }
        if !(self.pv_window > 0.0 && self.pv_window < 1.0) {
            return domain(format!("pv_window must lie in (0, 1), got {}", self.pv_window));
        }
        Ok(())
    }

    pub fn with_rel_tol(&self, rel_tol: f64) -> QuadConfig {
        QuadConfig { rel_tol, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicTemperatures {
    /// Geometric temperature ħc/(z·kB).
    pub tz: f64,
    /// Tz/√(ε−1).
    pub tz_eps: f64,
    /// Spectroscopic temperature ħω0/kB.
    pub tw0: f64,
}

pub fn characteristic_temperatures(scene: &Scene, mol: &Molecule) -> CharacteristicTemperatures {
    let k = CODATA_2018;
    let tz = k.hbar * k.c / (scene.z * k.kb);
    CharacteristicTemperatures {
        tz,
        tz_eps: tz / (scene.epsilon - 1.0).sqrt(),
        tw0: k.hbar * mol.omega0 / k.kb,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    LowT,
    IntermediateT,
    HighT,
    Unclassified,
}

/// Ratio below which one scale counts as much smaller than another.
pub const DEFAULT_MUCH_LESS_RATIO: f64 = 0.1;

pub fn regime_classify(scene: &Scene, mol: &Molecule) -> Regime {
    regime_classify_with(scene, mol, DEFAULT_MUCH_LESS_RATIO)
}

pub fn regime_classify_with(scene: &Scene, mol: &Molecule, ratio: f64) -> Regime {
    let ct = characteristic_temperatures(scene, mol);
    let ll = |a: f64, b: f64| a <= ratio * b;
    let t_hi = scene.ts.max(scene.te);
    let t_lo = scene.ts.min(scene.te);
    let t_geo = ct.tz.min(ct.tz_eps);
    if ll(t_hi, ct.tw0) && ll(ct.tw0, t_geo) {
        Regime::LowT
    } else if ll(ct.tw0, t_lo) && ll(t_hi, t_geo) {
        Regime::IntermediateT
    } else if ll(ct.tw0, t_geo) && ll(t_geo, t_lo) {
        Regime::HighT
    } else {
        Regime::Unclassified
    }
}

/// Reduced distance ζ = z·ω0/c.
pub(crate) fn reduced_distance(scene: &Scene, mol: &Molecule) -> f64 {
    scene.z * mol.omega0 / CODATA_2018.c
}

/// Reduced inverse temperature θ = ħω0/(kB·T); infinite at zero temperature.
pub(crate) fn reduced_inverse_temperature(t: f64, mol: &Molecule) -> f64 {
    if t == 0.0 {
        f64::INFINITY
    } else {
        CODATA_2018.hbar * mol.omega0 / (CODATA_2018.kb * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lih() -> Molecule {
        Molecule::with_preset(LIH_OMEGA0, State::Ground, PolarizationPreset::Isotropic, 1.0).unwrap()
    }

    #[test]
    fn characteristic_temperatures_reference_values() {
        let scene = Scene::equilibrium(5.0, 6e-6, 300.0).unwrap();
        let ct = characteristic_temperatures(&scene, &lih());
        // ħc/(kB·6 µm) and ħ·4.21e13/kB evaluated with the same constants in extended precision
        assert!((ct.tz - 381.647_419_868).abs() < 1e-6, "{}", ct.tz);
        assert!((ct.tw0 - 321.569_591_516).abs() < 1e-6, "{}", ct.tw0);
        assert_eq!(ct.tz_eps, ct.tz / 2.0);
    }

    #[test]
    fn doubling_z_halves_geometric_temperatures() {
        let m = lih();
        let a = characteristic_temperatures(&Scene::new(3.0, 1e-6, 10.0, 20.0).unwrap(), &m);
        let b = characteristic_temperatures(&Scene::new(3.0, 2e-6, 10.0, 20.0).unwrap(), &m);
        assert_eq!(a.tz, 2.0 * b.tz);
        assert_eq!(a.tz_eps, 2.0 * b.tz_eps);
        assert_eq!(a.tw0, b.tw0);
    }

    #[test]
    fn tz_eps_diverges_as_epsilon_approaches_one() {
        let ct = characteristic_temperatures(&Scene::new(1.0 + 1e-12, 1e-6, 0.0, 0.0).unwrap(), &lih());
        assert!(ct.tz_eps > 1e5 * ct.tz);
    }

    #[test]
    fn regime_examples() {
        let m = lih();
        let z_382 = CODATA_2018.hbar * CODATA_2018.c / (CODATA_2018.kb * 382.0);
        // ε = 2 keeps Tz_eps = Tz
        let cold = Scene::equilibrium(2.0, z_382 / 100.0, 1.0).unwrap();
        assert_eq!(regime_classify(&cold, &m), Regime::LowT);
        let warm = Scene::equilibrium(2.0, z_382, 350.0).unwrap();
        assert_eq!(regime_classify(&warm, &m), Regime::Unclassified);

        let m100 = Molecule::new(100.0 * CODATA_2018.kb / CODATA_2018.hbar, State::Ground, 1.0, 1.0, 1.0).unwrap();
        let z_5e3 = CODATA_2018.hbar * CODATA_2018.c / (CODATA_2018.kb * 5e3);
        let hot = Scene::equilibrium(2.0, z_5e3, 1e5).unwrap();
        assert_eq!(regime_classify(&hot, &m100), Regime::HighT);
    }

    #[test]
    fn zero_temperature_means_infinite_thermal_length() {
        let s = Scene::new(2.0, 1e-6, 0.0, 300.0).unwrap();
        assert!(s.beta_s().is_infinite());
        assert!(s.beta_e().is_finite());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(Scene::new(1.0, 1e-6, 0.0, 0.0).is_err());
        assert!(Scene::new(2.0, 0.0, 0.0, 0.0).is_err());
        assert!(Scene::new(2.0, 1e-6, -1.0, 0.0).is_err());
        assert!(Molecule::new(0.0, State::Ground, 1.0, 1.0, 1.0).is_err());
        assert!(Molecule::new(1.0, State::Ground, -1.0, 1.0, 1.0).is_err());
        let cfg = QuadConfig {
            pv_window: 1.0,
            ..QuadConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(QuadConfig::default().validate().is_ok());
    }

    #[test]
    fn presets_sum_to_total() {
        for p in PolarizationPreset::ALL {
            let c = p.components(3.0);
            assert!((c.iter().sum::<f64>() - 3.0).abs() < 1e-15);
        }
        assert_eq!(lih().omega_ab(), -LIH_OMEGA0);
        assert_eq!(lih().with_state(State::Excited).omega_ab(), LIH_OMEGA0);
    }
}
