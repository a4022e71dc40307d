//! Scaled exponential integrals for complex arguments in the closed right half-plane.
//!
//! `exp_e1(z) = e^z E1(z)` and `exp_neg_ei_pv(x) = e^{-x} Ei(x)`, where on the positive
//! real axis `Ei` is the principal value and off it `Ei(x) = -E1(-x) + iπ sgn(Im x)`.
//! Scaling keeps both O(1/|z|) so neither overflows for large arguments.

use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;
const ASYMPTOTIC_RADIUS: f64 = 40.0;
const MAX_TERMS: usize = 5000;
const TINY: f64 = 1e-300;

/// `e^z E1(z)` on the principal branch; requires `Re z >= 0` and `z != 0`.
pub fn exp_e1(z: Complex64) -> Complex64 {
    debug_assert!(z.re >= 0.0 && z != Complex64::new(0.0, 0.0));
    if z.norm() <= SERIES_RADIUS {
        e1_series(z) * z.exp()
    } else {
        exp_e1_continued_fraction(z)
    }
}

/// `e^{-x} Ei(x)` with the principal-value convention on the real axis; requires `Re x >= 0`.
pub fn exp_neg_ei_pv(x: Complex64) -> Complex64 {
    debug_assert!(x.re >= 0.0 && x != Complex64::new(0.0, 0.0));
    let r = x.norm();
    if x.re >= ASYMPTOTIC_RADIUS {
        return ei_asymptotic(x);
    }
    if x.im == 0.0 {
        return real_ei_series(x.re) * (-x.re).exp();
    }
    // Away from the positive real axis the series loses about e^{|x| - Re x}.
    if r <= SERIES_RADIUS || r - x.re <= 6.0 {
        let w = -x;
        let e1 = e1_series(w);
        let jump = Complex64::new(0.0, PI * x.im.signum());
        return (-e1 + jump) * (-x).exp();
    }
    let w = -x;
    let jump = Complex64::new(0.0, PI * x.im.signum());
    -exp_e1_continued_fraction(w) + jump * (-x).exp()
}

/// E1 by its convergent power series, principal branch of the logarithm.
fn e1_series(z: Complex64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        power *= -z / kf;
        let term = power / kf;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    -EULER_GAMMA - z.ln() - sum
}

/// Real Ei(x) for x > 0 by its series; valid up to the asymptotic radius.
fn real_ei_series(x: f64) -> Complex64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        power *= x / kf;
        let term = power / kf;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    Complex64::new(EULER_GAMMA + x.ln() + sum, 0.0)
}

/// `e^{-x} Ei(x) ~ Σ k!/x^{k+1}`; the exponentially small iπ e^{-x} part is below f64 resolution.
fn ei_asymptotic(x: Complex64) -> Complex64 {
    let inv = x.inv();
    let mut term = inv;
    let mut sum = term;
    for k in 1..MAX_TERMS {
        let next = term * inv * (k as f64);
        if next.norm() >= term.norm() || next.norm() <= 1e-17 * sum.norm() {
            break;
        }
        term = next;
        sum += term;
    }
    sum
}

/// Modified Lentz evaluation of `e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))`.
fn exp_e1_continued_fraction(z: Complex64) -> Complex64 {
    let tiny = Complex64::new(TINY, 0.0);
    let mut b = z + 1.0;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 1..MAX_TERMS {
        let a = -((i * i) as f64);
        b += 2.0;
        d = a * d + b;
        if d.norm() < TINY {
            d = tiny;
        }
        c = b + a / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm()
    }

    // Reference values: 30-digit evaluation of e^z E1(z) and e^{-x} Ei(x).
    const E1_REF: &[(f64, f64, f64, f64)] = &[
        (0.001, 0.0, 6.33787407032548796, 0.0),
        (1.0, 0.0, 0.596347362323194074, 0.0),
        (2.0, 0.0, 0.361328616888222585, 0.0),
        (0.0, 1.0, 0.343377961556427033, -0.621449624235813358),
        (0.0, -2.5, 0.104706947951384181, 0.337502581365994845),
        (3.0, 4.0, 0.122214595669566955, -0.128485001809213787),
        (25.0, 0.0, 0.0385146988449040221, 0.0),
        (0.0, 60.0, 0.000277317357406968136, -0.0166574380183076773),
        (2.1, 0.5, 0.336152494790789672, -0.0617503274075707978),
        (0.0, 2.05, 0.139625134897434696, -0.391917788352127341),
        (10.0, -10.0, 0.0496223910959510595, 0.0454810683489687189),
        (100.0, 3.0, 0.00989320970734721, -0.000293913659262707605),
    ];

    #[test]
    fn exp_e1_matches_reference() {
        for &(re, im, vr, vi) in E1_REF {
            let got = exp_e1(c(re, im));
            assert!(close(got, c(vr, vi), 1e-13), "z=({re},{im}) got {got} want ({vr},{vi})");
        }
    }

    const EI_REF: &[(f64, f64, f64, f64)] = &[
        (0.5, 0.0, 0.275498298551270262, 0.0),
        (1.0, 0.0, 0.697174883235066069, 0.0),
        (8.0, 0.0, 0.147730998373400997, 0.0),
        (39.0, 0.0, 0.0263351039355884305, 0.0),
        (45.0, 0.0, 0.0227396072545282793, 0.0),
        (0.0, 0.7, 1.52766808051079813, 1.65768545367438836),
        (0.0, -12.0, -1.69238063510013611, -2.56878803511702394),
        (5.0, 5.0, 0.0732543852989731434, -0.116324046907171952),
        (30.0, -20.0, 0.0233616468921932736, 0.0161391193989171991),
        (12.0, 0.3, 0.0918409549393196848, -0.00257220839476360485),
        (1.5, 1.5, 0.860443062337384718, -0.430657563225530929),
        (39.0, 3.0, 0.0261713596140697305, -0.00206926607378390331),
        (20.0, 25.0, 0.0192380158367978279, -0.0253655253936846702),
        (0.0, 3.0, 0.364120059431047232, -3.40211086512105658),
    ];

    #[test]
    fn exp_neg_ei_pv_matches_reference() {
        for &(re, im, vr, vi) in EI_REF {
            let got = exp_neg_ei_pv(c(re, im));
            assert!(close(got, c(vr, vi), 1e-13), "x=({re},{im}) got {got} want ({vr},{vi})");
        }
    }

    #[test]
    fn pv_branch_is_the_average_of_the_two_sides() {
        for x in [0.3, 2.0, 15.0] {
            let above = exp_neg_ei_pv(c(x, 1e-9));
            let below = exp_neg_ei_pv(c(x, -1e-9));
            let on = exp_neg_ei_pv(c(x, 0.0));
            assert!(((above + below) / 2.0 - on).norm() < 1e-8 * on.norm());
        }
    }
}
