//! Closed-form frequency moments `M_p(b, s) = ∫₀^∞ x^p e^{-b x}/(x + s) dx`.
//!
//! `Re b = 0` is the Abel limit of the damped integral; `s < 0` puts the pole on the ray and
//! selects the principal value. Real and imaginary parts of `M_p(-i a, s)` are the cosine and
//! sine transforms respectively.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::expint::{exp_e1, exp_neg_ei_pv};
use crate::error::{domain, Error, Result};
use crate::model::QuadConfig;

/// Above this `|b·s|` the moment is summed from its asymptotic expansion in `1/(b s)`.
const ASYMPTOTIC_BS: f64 = 50.0;
const MAX_ASYMPTOTIC_TERMS: usize = 80;

const FACTORIAL: [f64; 9] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

/// `M_p(b, s)` for `p ≤ 4`, `Re b ≥ 0`, `b ≠ 0` and `s ≠ 0`.
pub fn freq_moment(p: u32, b: Complex64, s: f64) -> Result<Complex64> {
    if p > 4 {
        return domain(format!("moment power must be at most 4, got {p}"));
    }
    if s == 0.0 || !s.is_finite() {
        return domain(format!("pole shift must be finite and nonzero, got {s}"));
    }
    if !(b.re >= 0.0) || b == Complex64::new(0.0, 0.0) || !b.is_finite() {
        return domain(format!("damping must satisfy Re b >= 0 and b != 0, got {b}"));
    }
    Ok(moment(p, b, s))
}

pub(crate) fn moment(p: u32, b: Complex64, s: f64) -> Complex64 {
    let bs = b * s;
    if bs.norm() >= ASYMPTOTIC_BS {
        return moment_asymptotic(p, b, s);
    }
    let neg_s = -s;
    let inv_b = b.inv();
    let mut poly = Complex64::new(0.0, 0.0);
    let mut s_pow = 1.0;
    for k in 0..p {
        let q = (p - 1 - k) as usize;
        poly += s_pow * FACTORIAL[q] * inv_b.powu(q as u32 + 1);
        s_pow *= neg_s;
    }
    let residual = if s > 0.0 { exp_e1(bs) } else { -exp_neg_ei_pv(-bs) };
    poly + s_pow * residual
}

/// `Σ_j (-1)^j (p+j)!/(s^{j+1} b^{p+j+1})`, plus the resonant `iπ` term of the PV branch.
fn moment_asymptotic(p: u32, b: Complex64, s: f64) -> Complex64 {
    let x = (b * s).inv();
    let mut term = FACTORIAL[p as usize] * b.inv().powu(p + 1) / s;
    let mut sum = term;
    for j in 0..MAX_ASYMPTOTIC_TERMS {
        let next = -term * x * ((p as usize + j + 1) as f64);
        if next.norm() >= term.norm() || next.norm() <= 1e-17 * sum.norm() {
            break;
        }
        term = next;
        sum += term;
    }
    if s < 0.0 && b.im != 0.0 {
        let c = -s;
        let resonant = Complex64::new(0.0, -PI * b.im.signum()) * (-b * c).exp();
        sum += c.powi(p as i32) * resonant;
    }
    sum
}

/// Result of a Bose-weighted moment sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoseMoment {
    /// `Σ_{m≥1} M_p(b + m·rate, s)`; the real part is the cosine-weighted integral when
    /// `b = -i a`, the imaginary part the sine-weighted one.
    pub value: Complex64,
    pub abs_error_estimate: f64,
    /// Number of terms summed with exact exponential integrals.
    pub exact_terms: usize,
}

/// Number of leading terms `Σ_{m≥1} M_p(b + m·rate, s)` evaluates exactly before the tail is
/// summed in closed form.
pub fn bose_exact_terms(b_re: f64, s: f64, rate: f64) -> usize {
    let start = (ASYMPTOTIC_BS / s.abs() - b_re) / rate;
    if start <= 1.0 {
        0
    } else {
        (start.ceil() as usize).saturating_sub(1)
    }
}

/// `∫₀^∞ x^p w(x) n(x)/(x + s) dx` with `n(x) = 1/(e^{rate·x} - 1)` and `w(x) = e^{-b x}`,
/// expanded as `Σ_{m≥1} M_p(b + m·rate, s)`.
///
/// Terms with `Re(b + m·rate)·|s| < 50` are evaluated exactly; the remainder is summed from
/// the asymptotic expansion of each term, in closed form by Euler-Maclaurin.
pub fn bose_weighted_moment(p: u32, b: Complex64, s: f64, rate: f64, cfg: &QuadConfig) -> Result<BoseMoment> {
    if !(1..=4).contains(&p) {
        return domain(format!("Bose moment power must lie in 1..=4, got {p}"));
    }
    if s == 0.0 || !s.is_finite() {
        return domain(format!("pole shift must be finite and nonzero, got {s}"));
    }
    if !(b.re >= 0.0) || !b.is_finite() {
        return domain(format!("damping must satisfy Re b >= 0, got {b}"));
    }
    if !(rate > 0.0) {
        return domain(format!("inverse temperature must be positive, got {rate}"));
    }
    if rate.is_infinite() {
        return Ok(BoseMoment {
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            exact_terms: 0,
        });
    }
    let exact_terms = bose_exact_terms(b.re, s, rate);
    if exact_terms > cfg.bose_series_max_terms {
        return Err(Error::SeriesNotConverged {
            needed: exact_terms,
            cap: cfg.bose_series_max_terms,
        });
    }
    let mut head = Complex64::new(0.0, 0.0);
    for m in 1..=exact_terms {
        head += moment(p, b + (m as f64) * rate, s);
    }
    let first_tail = b + ((exact_terms + 1) as f64) * rate;
    let (tail, tail_err) = asymptotic_tail(p, s, first_tail, rate);
    let value = head + tail;
    let roundoff = 1e-14 * (head.norm() + tail.norm());
    Ok(BoseMoment {
        value,
        abs_error_estimate: tail_err + roundoff,
        exact_terms,
    })
}

const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
];

/// `Σ_{n≥0} Σ_j c_j (b0 + n·h)^{-(p+j+1)}` with `c_j = (-1)^j (p+j)!/s^{j+1}`.
fn asymptotic_tail(p: u32, s: f64, b0: Complex64, h: f64) -> (Complex64, f64) {
    // coefficients c_j, truncated where they stop mattering at the smallest |b|
    let inv0 = b0.norm().recip();
    let mut coeffs = Vec::with_capacity(MAX_ASYMPTOTIC_TERMS);
    let mut c = FACTORIAL[p as usize] / s;
    let mut weight = c.abs();
    let lead = weight;
    let mut truncation = 0.0;
    for j in 0..MAX_ASYMPTOTIC_TERMS {
        coeffs.push(c);
        let next_c = -c * ((p as usize + j + 1) as f64) / s;
        let next_weight = weight * ((p as usize + j + 1) as f64) * inv0 / s.abs();
        if next_weight >= weight || next_weight <= 1e-17 * lead {
            truncation = next_weight;
            break;
        }
        c = next_c;
        weight = next_weight;
    }
    let r_max = p as usize + coeffs.len();

    // explicit terms until Euler-Maclaurin with eight Bernoulli corrections is converged
    let em_start = 1.45 * h * ((r_max + 18) as f64);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut bn = b0;
    while bn.re < em_start {
        sum += horner_inverse_powers(&coeffs, p, bn);
        bn += h;
    }
    for (j, &cj) in coeffs.iter().enumerate() {
        let r = p as usize + j + 1;
        sum += cj * power_sum_em(r, bn, h);
    }
    let head_norm = horner_inverse_powers(&coeffs[..1], p, b0).norm();
    // truncation of the asymptotic series, relative to the leading term, applies to every term
    let err = truncation / lead * sum.norm().max(head_norm) + 1e-16 * sum.norm();
    (sum, err)
}

fn horner_inverse_powers(coeffs: &[f64], p: u32, b: Complex64) -> Complex64 {
    let inv = b.inv();
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * inv + c;
    }
    acc * inv.powu(p + 1)
}

/// `Σ_{n≥0} (b + n h)^{-r}` for `r ≥ 2` by Euler-Maclaurin; assumes `Re b ≫ h r`.
fn power_sum_em(r: usize, b: Complex64, h: f64) -> Complex64 {
    let rf = r as f64;
    let inv = b.inv();
    let b_pow = inv.powu(r as u32);
    let mut sum = b * b_pow / (h * (rf - 1.0)) + 0.5 * b_pow;
    // (r)_{2k-1} h^{2k-1} b^{-r-2k+1}
    let mut factor = b_pow * inv * h * rf;
    for (k, bf) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if k > 0 {
            let q = (2 * k) as f64;
            factor *= (rf + q - 1.0) * (rf + q) * h * h * inv * inv;
        }
        sum += *bf * factor;
    }
    sum
}
