//! Closed-form near-zone, high-temperature forces and the threshold temperatures they imply.
//!
//! Valid for `{β_s, β_e} ≪ {z, z√(ε−1)} ≪ λ0` with `β = ħc/(kB·T)`. Outside that window the
//! formulas still evaluate; callers get an advisory flag instead of an error.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::model::{regime_classify, Molecule, Regime, Scene, State, CODATA_2018};

/// Permittivity factors of the thermal terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunctions {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

pub fn g_functions(epsilon: f64) -> GFunctions {
    let e = epsilon;
    let d = (e + 1.0) * (e + 1.0);
    GFunctions {
        g1: (2.0 * e * e + e + 1.0) / d,
        g2: (3.0 * e + 1.0) * e / d,
        g3: e * (e - 1.0) / d,
        g4: (2.0 * e + 1.0) * (e - 1.0) / d,
    }
}

/// The three terms inside the braces of the asymptotic force, in newtons, before the overall
/// `−1` and the state-dependent thermal signs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticTerms {
    /// `(ħ/4πε0)·(ε−1)/(ε+1)·9ω0(α∥+2αz)/(32z⁴)`.
    pub vdw: f64,
    /// `(ħ/4πε0)·(α∥/2+αz)·3ω0²/(4z²cβe)`.
    pub environment: f64,
    /// `(ħ/4πε0)·(α∥g1/2+αz·g2)·3ω0²/(4z²cβs)`.
    pub substrate: f64,
}

impl AsymptoticTerms {
    /// Ground: `−(vdw + env − sub)`; excited: `−(vdw − env + sub)`.
    pub fn force(&self, state: State) -> f64 {
        let s = state.sign();
        -(self.vdw + s * (self.environment - self.substrate))
    }
}

/// An asymptotic force with its regime advisory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticForce {
    pub force: f64,
    pub regime: Regime,
    /// False when the scene is outside the high-temperature near zone.
    pub regime_ok: bool,
}

fn check_geometry(z: f64, epsilon: f64, omega0: f64) -> Result<()> {
    if !(z > 0.0 && z.is_finite()) {
        return domain(format!("z must be positive, got {z}"));
    }
    if !(epsilon > 1.0 && epsilon.is_finite()) {
        return domain(format!("epsilon must be finite and > 1, got {epsilon}"));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) {
        return domain(format!("omega0 must be positive, got {omega0}"));
    }
    Ok(())
}

fn scale() -> f64 {
    CODATA_2018.hbar / (4.0 * PI * CODATA_2018.eps0)
}

/// `3ω0²/(4z²cβ)` with `1/β = kB·T/(ħc)`.
fn thermal_factor(omega0: f64, z: f64, t: f64) -> f64 {
    let k = CODATA_2018;
    3.0 * omega0 * omega0 / (4.0 * z * z * k.c) * (k.kb * t / (k.hbar * k.c))
}

fn vdw(mol: &Molecule, z: f64, e: f64) -> f64 {
    // explicit product: `powi` rounding differs between constant-folded and runtime calls
    let z4 = z * z * z * z;
    scale() * (e - 1.0) / (e + 1.0) * 9.0 * mol.omega0() * (mol.alpha_par() + 2.0 * mol.alpha_perp()) / (32.0 * z4)
}

pub fn asymptotic_terms(mol: &Molecule, scene: &Scene) -> AsymptoticTerms {
    let (z, e, w0) = (scene.z(), scene.epsilon(), mol.omega0());
    let (ap, az) = (mol.alpha_par(), mol.alpha_perp());
    let g = g_functions(e);
    AsymptoticTerms {
        vdw: vdw(mol, z, e),
        environment: scale() * (ap / 2.0 + az) * thermal_factor(w0, z, scene.te()),
        substrate: scale() * (ap / 2.0 * g.g1 + az * g.g2) * thermal_factor(w0, z, scene.ts()),
    }
}

fn advisory(mol: &Molecule, scene: &Scene, force: f64) -> AsymptoticForce {
    let regime = regime_classify(scene, mol);
    AsymptoticForce {
        force,
        regime,
        regime_ok: regime == Regime::HighT,
    }
}

/// Out-of-equilibrium asymptotic force for the molecule's state.
pub fn force_asymptotic_neq(mol: &Molecule, scene: &Scene) -> AsymptoticForce {
    advisory(mol, scene, asymptotic_terms(mol, scene).force(mol.state()))
}

/// Equilibrium asymptotic force, written with `g3`, `g4`.
pub fn force_asymptotic_eq(mol: &Molecule, t: f64, z: f64, epsilon: f64) -> Result<AsymptoticForce> {
    let scene = Scene::equilibrium(epsilon, z, t)?;
    let w0 = mol.omega0();
    let (ap, az) = (mol.alpha_par(), mol.alpha_perp());
    let g = g_functions(epsilon);
    let thermal = scale() * (ap / 2.0 * g.g3 + az * g.g4) * thermal_factor(w0, z, t);
    Ok(advisory(
        mol,
        &scene,
        -(vdw(mol, z, epsilon) - mol.state().sign() * thermal),
    ))
}

fn geometric_scale(z: f64, omega0: f64) -> f64 {
    let k = CODATA_2018;
    3.0 * k.hbar * k.c * k.c / (4.0 * k.kb * z * z * omega0)
}

fn require_polarizable(mol: &Molecule) -> Result<()> {
    if mol.alpha_total() > 0.0 {
        Ok(())
    } else {
        domain("threshold is undefined for zero polarizability")
    }
}

/// Equilibrium temperature above which the ground-state force turns repulsive.
pub fn threshold_t0(mol: &Molecule, z: f64, epsilon: f64) -> Result<f64> {
    check_geometry(z, epsilon, mol.omega0())?;
    require_polarizable(mol)?;
    let (ap, az, e) = (mol.alpha_par(), mol.alpha_perp(), epsilon);
    let den = ap * e / (e + 1.0) + 2.0 * az * (2.0 * e + 1.0) / (e + 1.0);
    Ok(geometric_scale(z, mol.omega0()) * (ap + 2.0 * az) / den)
}

/// Substrate temperature balancing the van der Waals term for the ground state when the
/// environment term is negligible.
pub fn threshold_ts0(mol: &Molecule, z: f64, epsilon: f64) -> Result<f64> {
    check_geometry(z, epsilon, mol.omega0())?;
    require_polarizable(mol)?;
    let (ap, az, e) = (mol.alpha_par(), mol.alpha_perp(), epsilon);
    let g = g_functions(e);
    Ok(geometric_scale(z, mol.omega0()) * (e - 1.0) / (e + 1.0) * (ap + 2.0 * az) / (ap * g.g1 + 2.0 * az * g.g2))
}

/// Environment temperature balancing the van der Waals term for the excited state when the
/// substrate term is negligible. Independent of the polarizability.
pub fn threshold_te0(z: f64, epsilon: f64, omega0: f64) -> Result<f64> {
    check_geometry(z, epsilon, omega0)?;
    Ok(geometric_scale(z, omega0) * (epsilon - 1.0) / (epsilon + 1.0))
}
