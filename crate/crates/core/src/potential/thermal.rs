//! Reduced thermal integrals.
//!
//! With `G(x) = σ_state·[x³/(x−1) − x³/(x+1)]` (principal value at `x = 1`) and Bose weights
//! `n(x) = 1/(e^{θx} − 1)`:
//!
//! * equilibrium: `Σ_σ w_σ ∫dx G(x) n_e(x) f_σ(x)`
//! * non-equilibrium: `Σ_σ w_σ ∫dx G(x) [n_s(x) − n_e(x)] ∫dt A_σ(t) e^{−kxt}`
//!
//! The Bose factor makes the swapped order absolutely convergent, so the `x`-integral is done
//! first for each `t`, either as a Bose series of closed-form moments or, when the series is
//! too long, by direct principal-value quadrature.

use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::kernels::{a_kernel, bose_exact_terms, bose_weighted_moment, integrate_unit_t, t_kernel, Polarization};
use crate::model::QuadConfig;
use crate::quadrature::{try_integrate_pv, Method, QuadResult};

use super::vacuum::Output;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Weighting {
    /// `n(θ)` on both channels.
    Equilibrium(f64),
    /// `n(θs) − n(θe)` on the exponential channel only.
    Difference(f64, f64),
}

impl Weighting {
    fn thetas(&self) -> Vec<f64> {
        match *self {
            Weighting::Equilibrium(t) => vec![t],
            Weighting::Difference(a, b) => vec![a, b],
        }
    }

    fn has_oscillatory_channel(&self) -> bool {
        matches!(self, Weighting::Equilibrium(_))
    }
}

pub(crate) struct Setup {
    pub weights: [f64; 2],
    pub eps: f64,
    pub zeta: f64,
    /// +1 ground, −1 excited.
    pub sign: f64,
}

/// Whether the Bose series is short enough at every `t` for all temperatures involved.
pub(crate) fn series_feasible(weighting: &Weighting, cfg: &QuadConfig) -> bool {
    weighting
        .thetas()
        .iter()
        .all(|&th| th.is_infinite() || bose_exact_terms(0.0, 1.0, th) <= cfg.bose_series_max_terms)
}

pub(crate) fn reduced(setup: &Setup, weighting: Weighting, out: Output, cfg: &QuadConfig) -> Result<QuadResult> {
    if series_feasible(&weighting, cfg) {
        match reduced_series(setup, weighting, out, cfg) {
            Err(Error::SeriesNotConverged { .. }) => reduced_direct(setup, weighting, out, cfg),
            other => other,
        }
    } else {
        reduced_direct(setup, weighting, out, cfg)
    }
}

fn kernels_at(setup: &Setup, t: f64) -> (f64, f64) {
    let mut a = 0.0;
    let mut tt = 0.0;
    for (w, pol) in setup.weights.iter().zip(Polarization::BOTH) {
        if *w != 0.0 {
            a += w * a_kernel(pol, t, setup.eps);
            tt += w * t_kernel(pol, t, setup.eps);
        }
    }
    (a, tt)
}

/// `Σ_m [M_p(b + mθ, −1) − M_p(b + mθ, +1)]`, the Bose sum of `x^p·2/(x²−1)·e^{−bx}`.
fn bose_pair(p: u32, b: Complex64, theta: f64, cfg: &QuadConfig) -> Result<(Complex64, f64)> {
    if theta.is_infinite() {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let lower = bose_weighted_moment(p, b, -1.0, theta, cfg)?;
    let upper = bose_weighted_moment(p, b, 1.0, theta, cfg)?;
    Ok((
        lower.value - upper.value,
        lower.abs_error_estimate + upper.abs_error_estimate,
    ))
}

fn reduced_series(setup: &Setup, weighting: Weighting, out: Output, cfg: &QuadConfig) -> Result<QuadResult> {
    let kappa = 2.0 * (setup.eps - 1.0).sqrt();
    let zeta = setup.zeta;
    let p = match out {
        Output::Value => 3,
        Output::Derivative => 4,
    };
    let mut worst_abs = 0.0f64;
    let r = integrate_unit_t(
        |t| {
            let (a, tt) = kernels_at(setup, t);
            let b_exp = Complex64::new(kappa * zeta * t, 0.0);
            let b_osc = Complex64::new(0.0, -2.0 * zeta * t);
            // d/dζ e^{−bx} = −(b/ζ)·x·e^{−bx}
            let (chain_exp, chain_osc) = match out {
                Output::Value => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
                Output::Derivative => (-b_exp / zeta, -b_osc / zeta),
            };
            let (wa, ea, wt, et) = match weighting {
                Weighting::Equilibrium(th) => {
                    let (va, ea) = bose_pair(p, b_exp, th, cfg)?;
                    let (vt, et) = bose_pair(p, b_osc, th, cfg)?;
                    ((chain_exp * va).re, ea, (chain_osc * vt).re, et)
                }
                Weighting::Difference(ts, te) => {
                    let (vs, es) = bose_pair(p, b_exp, ts, cfg)?;
                    let (ve, ee) = bose_pair(p, b_exp, te, cfg)?;
                    ((chain_exp * (vs - ve)).re, es + ee, 0.0, 0.0)
                }
            };
            let value = setup.sign * (a * wa + tt * wt);
            let err = a.abs() * ea * chain_exp.norm() + tt.abs() * et * chain_osc.norm();
            worst_abs = worst_abs.max(err);
            Ok(value)
        },
        cfg,
    )?;
    Ok(QuadResult {
        abs_error_estimate: r.abs_error_estimate + FRAC_PI_2 * worst_abs,
        method: Method::ClosedFormSeries,
        ..r
    })
}

fn bose(x: f64, theta: f64) -> f64 {
    if theta.is_infinite() {
        0.0
    } else {
        1.0 / (theta * x).exp_m1()
    }
}

/// Nested quadrature: for each `t`, `PV ∫dx x^p·2/(x²−1)·n(x)·w(x)` on `[0, X]`.
fn reduced_direct(setup: &Setup, weighting: Weighting, out: Output, cfg: &QuadConfig) -> Result<QuadResult> {
    let kappa = 2.0 * (setup.eps - 1.0).sqrt();
    let zeta = setup.zeta;
    let thetas = weighting.thetas();
    let theta_min = thetas.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut worst_abs = 0.0f64;

    let inner = |t: f64, oscillatory: bool| -> Result<(f64, f64)> {
        let bose_weight = |x: f64| match weighting {
            Weighting::Equilibrium(th) => bose(x, th),
            Weighting::Difference(ts, te) => bose(x, ts) - bose(x, te),
        };
        let h = |x: f64| -> f64 {
            let w = if oscillatory {
                let arg = 2.0 * zeta * t * x;
                match out {
                    Output::Value => arg.cos(),
                    Output::Derivative => -2.0 * t * x * arg.sin(),
                }
            } else {
                let e = (-kappa * zeta * t * x).exp();
                match out {
                    Output::Value => e,
                    Output::Derivative => -kappa * t * x * e,
                }
            };
            // x³·2/(x+1): the (x−1) pole is left to the principal-value rule
            x * x * x * 2.0 / (x + 1.0) * bose_weight(x) * w
        };
        let decay = theta_min + if oscillatory { 0.0 } else { kappa * zeta * t };
        let x_max = (cfg.omega_cutoff_factor / decay).max(2.0);
        let r = try_integrate_pv(|x| Ok(h(x)), 0.0, x_max, 1.0, cfg.pv_window, cfg)?;
        let tail = h(x_max).abs() / decay;
        Ok((r.value, r.abs_error_estimate + tail))
    };

    let r = integrate_unit_t(
        |t| {
            let (a, tt) = kernels_at(setup, t);
            let mut v = 0.0;
            let mut err = 0.0;
            if a != 0.0 {
                let (iv, ie) = inner(t, false)?;
                v += a * iv;
                err += a.abs() * ie;
            }
            if weighting.has_oscillatory_channel() && tt != 0.0 {
                let (iv, ie) = inner(t, true)?;
                v += tt * iv;
                err += tt.abs() * ie;
            }
            worst_abs = worst_abs.max(err);
            Ok(setup.sign * v)
        },
        cfg,
    )?;
    Ok(QuadResult {
        abs_error_estimate: r.abs_error_estimate + FRAC_PI_2 * worst_abs,
        subdivisions_used: r.subdivisions_used,
        method: Method::Nested2D,
        value: r.value,
    })
}

#[cfg(test)]
pub(crate) fn reduced_forced_direct(
    setup: &Setup,
    weighting: Weighting,
    out: Output,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    reduced_direct(setup, weighting, out, cfg)
}
