//! Angular kernels of the reflected field and the frequency-moment machinery.
//!
//! With `S = √(ε−1+t²)`:
//!
//! * `A∥ = ½√(ε−1)·[(2ε+1)(ε−1)t²+1]/[(ε²−1)t²+1]·t√(1−t²)`
//! * `A⊥ = ε√(ε−1)·[(ε−1)t²+1]/[(ε²−1)t²+1]·t√(1−t²)`
//! * `T∥ = ¼[(t−S)/(t+S) − t²(εt−S)/(εt+S)]`
//! * `T⊥ = ½(1−t²)(εt−S)/(εt+S)`
//!
//! and `f_σ(z, ω) = ∫₀¹ [A_σ(t) e^{−2z√(ε−1)ωt/c} + T_σ(t) cos(2zωt/c)] dt`.

pub mod expint;
mod moments;

pub(crate) use moments::moment;
pub use moments::{bose_exact_terms, bose_weighted_moment, freq_moment, BoseMoment};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::model::{QuadConfig, CODATA_2018};
use crate::quadrature::{integrate_adaptive, QuadResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Parallel,
    Perpendicular,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::Parallel, Polarization::Perpendicular];
}

fn check(t: f64, epsilon: f64) -> Result<()> {
    if !(epsilon > 1.0 && epsilon.is_finite()) {
        return domain(format!("epsilon must be finite and > 1, got {epsilon}"));
    }
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("t must lie in [0, 1], got {t}"));
    }
    Ok(())
}

pub fn angular_a(pol: Polarization, t: f64, epsilon: f64) -> Result<f64> {
    check(t, epsilon)?;
    Ok(a_kernel(pol, t, epsilon))
}

pub fn angular_t(pol: Polarization, t: f64, epsilon: f64) -> Result<f64> {
    check(t, epsilon)?;
    Ok(t_kernel(pol, t, epsilon))
}

pub(crate) fn a_kernel(pol: Polarization, t: f64, eps: f64) -> f64 {
    let t2 = t * t;
    let den = (eps * eps - 1.0) * t2 + 1.0;
    let shape = t * (1.0 - t2).max(0.0).sqrt();
    match pol {
        Polarization::Parallel => 0.5 * (eps - 1.0).sqrt() * ((2.0 * eps + 1.0) * (eps - 1.0) * t2 + 1.0) / den * shape,
        Polarization::Perpendicular => eps * (eps - 1.0).sqrt() * ((eps - 1.0) * t2 + 1.0) / den * shape,
    }
}

pub(crate) fn t_kernel(pol: Polarization, t: f64, eps: f64) -> f64 {
    let s = (eps - 1.0 + t * t).sqrt();
    let rp = (eps * t - s) / (eps * t + s);
    match pol {
        Polarization::Parallel => 0.25 * ((t - s) / (t + s) - t * t * rp),
        Polarization::Perpendicular => 0.5 * (1.0 - t * t) * rp,
    }
}

/// Leading small-`t` behaviour: `A ≈ a1·t` and `T ≈ t0 + t1·t + t2·t²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SmallT {
    pub a1: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
}

pub(crate) fn small_t(pol: Polarization, eps: f64) -> SmallT {
    let r = (eps - 1.0).sqrt();
    match pol {
        Polarization::Parallel => SmallT {
            a1: 0.5 * r,
            t0: -0.25,
            t1: 0.5 / r,
            t2: (eps - 3.0) / (4.0 * (eps - 1.0)),
        },
        Polarization::Perpendicular => SmallT {
            a1: eps * r,
            t0: -0.5,
            t1: eps / r,
            t2: (-2.0 * eps * eps + eps - 1.0) / (2.0 * (eps - 1.0)),
        },
    }
}

/// `A(t) − a1·t`, written without cancellation.
pub(crate) fn a_remainder(pol: Polarization, t: f64, eps: f64) -> f64 {
    let t2 = t * t;
    let den = (eps * eps - 1.0) * t2 + 1.0;
    let shift = eps * (eps - 1.0) * t2 / den;
    let (ratio, ratio_minus_one) = match pol {
        Polarization::Parallel => (1.0 + shift, shift),
        Polarization::Perpendicular => (1.0 - shift, -shift),
    };
    let c = (1.0 - t2).max(0.0).sqrt();
    small_t(pol, eps).a1 * t * (-ratio * t2 / (1.0 + c) + ratio_minus_one)
}

const TAYLOR_ORDER: usize = 18;

/// Radius of convergence of the `T` kernels' Taylor series at `t = 0`: the branch point of `S`
/// at `±i√(ε−1)` and the pole of the TM coefficient at `t = −1/√(ε+1)`.
fn t_radius(eps: f64) -> f64 {
    (eps - 1.0).sqrt().min(1.0 / (eps + 1.0).sqrt())
}

fn series_mul(a: &[f64; TAYLOR_ORDER], b: &[f64; TAYLOR_ORDER]) -> [f64; TAYLOR_ORDER] {
    let mut c = [0.0; TAYLOR_ORDER];
    for i in 0..TAYLOR_ORDER {
        for j in 0..TAYLOR_ORDER - i {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

fn series_div(a: &[f64; TAYLOR_ORDER], b: &[f64; TAYLOR_ORDER]) -> [f64; TAYLOR_ORDER] {
    let mut q = [0.0; TAYLOR_ORDER];
    for n in 0..TAYLOR_ORDER {
        let acc: f64 = (1..=n).map(|k| b[k] * q[n - k]).sum();
        q[n] = (a[n] - acc) / b[0];
    }
    q
}

/// Taylor coefficients of `T_σ(t)` at `t = 0`.
fn t_taylor(pol: Polarization, eps: f64) -> [f64; TAYLOR_ORDER] {
    let r2 = eps - 1.0;
    // S = √(r² + t²) = r·Σ C(½, k)(t²/r²)^k
    let mut s = [0.0; TAYLOR_ORDER];
    let mut binom = 1.0;
    let mut scale = r2.sqrt();
    for k in 0..TAYLOR_ORDER.div_ceil(2) {
        s[2 * k] = binom * scale;
        binom *= (0.5 - k as f64) / (k as f64 + 1.0);
        scale /= r2;
    }
    let lin = |c: f64, sign: f64| {
        let mut v = s.map(|x| sign * x);
        v[1] += c;
        v
    };
    let rp = series_div(&lin(eps, -1.0), &lin(eps, 1.0));
    let mut poly = [0.0; TAYLOR_ORDER];
    match pol {
        Polarization::Parallel => {
            let rs = series_div(&lin(1.0, -1.0), &lin(1.0, 1.0));
            poly[2] = 1.0;
            let trp = series_mul(&poly, &rp);
            std::array::from_fn(|n| 0.25 * (rs[n] - trp[n]))
        }
        Polarization::Perpendicular => {
            poly[0] = 1.0;
            poly[2] = -1.0;
            series_mul(&poly, &rp).map(|x| 0.5 * x)
        }
    }
}

/// `T(t) − t0 − t1·t − t2·t²`, summed from the Taylor series where direct subtraction would
/// lose the `O(t³)` remainder to cancellation.
pub(crate) fn t_remainder(pol: Polarization, t: f64, eps: f64) -> f64 {
    if t < 0.1 * t_radius(eps) {
        let c = t_taylor(pol, eps);
        let tail = c[3..].iter().rev().fold(0.0, |acc, &cn| acc * t + cn);
        return tail * t * t * t;
    }
    let c = small_t(pol, eps);
    t_kernel(pol, t, eps) - (c.t0 + t * (c.t1 + t * c.t2))
}

/// Integrates `h(t)` over `[0, 1]` through `t = sin φ`, which removes the `√(1−t²)` endpoint
/// singularity of the `A` kernels.
pub(crate) fn integrate_unit_t<F>(mut h: F, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    crate::quadrature::try_integrate_adaptive(
        |phi| {
            let (t, dt) = phi.sin_cos();
            Ok(h(t)? * dt)
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        cfg,
    )
}

/// `f_σ(z, ω)` by adaptive quadrature over `t`.
pub fn f_sigma(pol: Polarization, z: f64, omega: f64, epsilon: f64, cfg: &QuadConfig) -> Result<QuadResult> {
    check(0.0, epsilon)?;
    if !(z > 0.0 && z.is_finite()) {
        return domain(format!("z must be positive, got {z}"));
    }
    if !(omega >= 0.0 && omega.is_finite()) {
        return domain(format!("omega must be non-negative, got {omega}"));
    }
    let q = 2.0 * z * omega / CODATA_2018.c;
    let k = q * (epsilon - 1.0).sqrt();
    integrate_unit_t(
        |t| Ok(a_kernel(pol, t, epsilon) * (-k * t).exp() + t_kernel(pol, t, epsilon) * (q * t).cos()),
        cfg,
    )
}

/// `∫₀¹ (|A_σ| + |T_σ|) dt`, the bound on `|f_σ|` over all frequencies.
pub fn f_sigma_bound(pol: Polarization, epsilon: f64, cfg: &QuadConfig) -> Result<f64> {
    check(0.0, epsilon)?;
    Ok(integrate_adaptive(
        |t| a_kernel(pol, t, epsilon).abs() + t_kernel(pol, t, epsilon).abs(),
        0.0,
        1.0,
        cfg,
    )?
    .value)
}
