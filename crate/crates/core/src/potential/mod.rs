//! Potential and force channels.
//!
//! With `P = 3ħω0⁴/(4π²ε0c³)`, reduced distance `ζ = zω0/c` and reduced inverse temperatures
//! `θ = ħω0/(kB·T)`:
//!
//! * `U_vac = −P·α·J(ζ)`
//! * `U_eq = +P·α·I_eq(ζ, θe)`
//! * `U_neq = +P·α·I_neq(ζ, θs, θe)`
//!
//! where `α` is the total polarizability and the reduced integrals carry the normalized
//! weights `α∥/α` and `αz/α`. Forces are `F = −∂U/∂z = −(ω0/c)·∂U/∂ζ`, differentiated under the
//! integral sign. Negative force means attraction toward the substrate.

mod thermal;
mod vacuum;

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::model::{reduced_distance, reduced_inverse_temperature, Molecule, QuadConfig, Scene, State, CODATA_2018};
use crate::quadrature::{Method, QuadResult};

use thermal::{Setup, Weighting};
use vacuum::Output;

/// One channel of the potential or force, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub value: f64,
    pub error: f64,
    pub method: Method,
}

impl Channel {
    fn zero() -> Channel {
        Channel {
            value: 0.0,
            error: 0.0,
            method: Method::ClosedFormSeries,
        }
    }

    fn scaled(r: QuadResult, factor: f64) -> Channel {
        Channel {
            value: factor * r.value,
            error: factor.abs() * r.abs_error_estimate,
            method: r.method,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialBreakdown {
    pub u_vac: Channel,
    pub u_eq: Channel,
    pub u_neq: Channel,
    pub u_total: f64,
    /// Root-sum-square of the channel errors.
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    pub f_vac: Channel,
    pub f_eq: Channel,
    pub f_neq: Channel,
    pub f_total: f64,
    /// Root-sum-square of the channel errors.
    pub error: f64,
    pub scene: Scene,
    pub molecule: Molecule,
}

/// `3ħω0⁴/(4π²ε0c³)`, the energy scale per unit polarizability.
pub fn potential_prefactor(omega0: f64) -> f64 {
    let k = CODATA_2018;
    3.0 * k.hbar * omega0.powi(4) / (4.0 * PI * PI * k.eps0 * k.c.powi(3))
}

/// Normalized `(α∥/α, αz/α)`, or `None` for a non-polarizable molecule.
fn weights(mol: &Molecule) -> Option<[f64; 2]> {
    let total = mol.alpha_total();
    if total == 0.0 {
        None
    } else {
        Some([mol.alpha_par() / total, mol.alpha_perp() / total])
    }
}

fn state_sign(mol: &Molecule) -> f64 {
    match mol.state() {
        State::Ground => 1.0,
        State::Excited => -1.0,
    }
}

fn vac(mol: &Molecule, scene: &Scene, out: Output, cfg: &QuadConfig) -> Result<Channel> {
    cfg.validate()?;
    let Some(w) = weights(mol) else {
        return Ok(Channel::zero());
    };
    let zeta = reduced_distance(scene, mol);
    let r = vacuum::reduced(w, scene.epsilon(), zeta, state_sign(mol), out, cfg)?;
    let p = potential_prefactor(mol.omega0()) * mol.alpha_total();
    Ok(match out {
        Output::Value => Channel::scaled(r, -p),
        Output::Derivative => Channel::scaled(r, p * mol.omega0() / CODATA_2018.c),
    })
}

fn thermal_channel(
    mol: &Molecule,
    scene: &Scene,
    weighting: Weighting,
    out: Output,
    cfg: &QuadConfig,
) -> Result<Channel> {
    cfg.validate()?;
    let Some(w) = weights(mol) else {
        return Ok(Channel::zero());
    };
    let setup = Setup {
        weights: w,
        eps: scene.epsilon(),
        zeta: reduced_distance(scene, mol),
        sign: state_sign(mol),
    };
    let r = thermal::reduced(&setup, weighting, out, cfg)?;
    let p = potential_prefactor(mol.omega0()) * mol.alpha_total();
    Ok(match out {
        Output::Value => Channel::scaled(r, p),
        Output::Derivative => Channel::scaled(r, -p * mol.omega0() / CODATA_2018.c),
    })
}

fn eq(mol: &Molecule, scene: &Scene, out: Output, cfg: &QuadConfig) -> Result<Channel> {
    if scene.te() == 0.0 {
        cfg.validate()?;
        return Ok(Channel::zero());
    }
    let theta = reduced_inverse_temperature(scene.te(), mol);
    thermal_channel(mol, scene, Weighting::Equilibrium(theta), out, cfg)
}

fn neq(mol: &Molecule, scene: &Scene, out: Output, cfg: &QuadConfig) -> Result<Channel> {
    if scene.ts() == scene.te() {
        cfg.validate()?;
        return Ok(Channel::zero());
    }
    let ts = reduced_inverse_temperature(scene.ts(), mol);
    let te = reduced_inverse_temperature(scene.te(), mol);
    thermal_channel(mol, scene, Weighting::Difference(ts, te), out, cfg)
}

/// Zero-point (vacuum) part of the potential.
pub fn potential_vac(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<Channel> {
    vac(mol, scene, Output::Value, cfg)
}

/// Equilibrium thermal part, weighted by the environment Bose factor.
pub fn potential_eq(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<Channel> {
    eq(mol, scene, Output::Value, cfg)
}

/// Non-equilibrium part, weighted by the difference of substrate and environment Bose factors.
pub fn potential_neq(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<Channel> {
    neq(mol, scene, Output::Value, cfg)
}

fn rss(channels: [&Channel; 3]) -> f64 {
    channels.iter().map(|c| c.error * c.error).sum::<f64>().sqrt()
}

pub fn potential_total(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<PotentialBreakdown> {
    let u_vac = potential_vac(mol, scene, cfg)?;
    let u_eq = potential_eq(mol, scene, cfg)?;
    let u_neq = potential_neq(mol, scene, cfg)?;
    Ok(PotentialBreakdown {
        u_total: u_vac.value + u_eq.value + u_neq.value,
        error: rss([&u_vac, &u_eq, &u_neq]),
        u_vac,
        u_eq,
        u_neq,
    })
}

/// Vacuum force channel; depends on neither temperature.
pub fn force_vac(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<Channel> {
    vac(mol, scene, Output::Derivative, cfg)
}

pub fn force_eq(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<Channel> {
    eq(mol, scene, Output::Derivative, cfg)
}

pub fn force_neq(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<Channel> {
    neq(mol, scene, Output::Derivative, cfg)
}

/// `F = −∂U/∂z` with the channel breakdown.
pub fn force(mol: &Molecule, scene: &Scene, cfg: &QuadConfig) -> Result<ForceResult> {
    let f_vac = force_vac(mol, scene, cfg)?;
    force_with_vac(mol, scene, f_vac, cfg)
}

/// As [`force`], reusing a vacuum channel computed for the same molecule, `z` and `ε`.
pub fn force_with_vac(mol: &Molecule, scene: &Scene, f_vac: Channel, cfg: &QuadConfig) -> Result<ForceResult> {
    let f_eq = force_eq(mol, scene, cfg)?;
    let f_neq = force_neq(mol, scene, cfg)?;
    Ok(ForceResult {
        f_total: f_vac.value + f_eq.value + f_neq.value,
        error: rss([&f_vac, &f_eq, &f_neq]),
        f_vac,
        f_eq,
        f_neq,
        scene: *scene,
        molecule: *mol,
    })
}

/// `ħcω0²α/(128πε0)`, the normalization used for plotted forces.
pub fn paper_force_unit(mol: &Molecule) -> f64 {
    let k = CODATA_2018;
    k.hbar * k.c * mol.omega0().powi(2) * mol.alpha_total() / (128.0 * PI * k.eps0)
}

pub fn force_in_paper_units(result: &ForceResult, mol: &Molecule) -> Result<f64> {
    if mol.alpha_total() == 0.0 {
        return domain("paper force unit is undefined for zero polarizability");
    }
    Ok(result.f_total / paper_force_unit(mol))
}
