//! Potentials and forces against the imaginary-frequency Lifshitz representation.
//!
//! With `x = ξ/ω0`, `p = κ/ξ ≥ 1` and reflection coefficients `r_s`, `r_p` of the half-space,
//!
//! `U_vac = (Pα/2) ∫₀^∞ h(x) dx`, `h(x) = x³/(1 + x²) ∫₁^∞ e^{-2pxζ} F(p) dp`,
//! `F(p) = (w∥/2)(r_s − p² r_p) − wz (p² − 1) r_p`.
//!
//! At temperature `T` the frequency integral becomes a Matsubara sum, and a ground-state
//! molecule picks up a resonant term `(π/2)·Pα·n(ω0)·Im G(ω0 + i0)` from the pole of its
//! polarizability.

use num_complex::Complex64;
use std::f64::consts::PI;

use cpneq::model::{Molecule, PolarizationPreset, QuadConfig, Scene, State, CODATA_2018, LIH_OMEGA0};
use cpneq::potential::{force_vac, potential_eq, potential_prefactor, potential_vac};
use cpneq::quadrature::integrate_adaptive;

fn quad() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-13,
        abs_tol: 0.0,
        max_subdivisions: 20_000,
        ..QuadConfig::default()
    }
}

/// `∫₀^∞ f` through `u = v/(1 − v)`.
fn half_line(f: impl Fn(f64) -> f64) -> f64 {
    integrate_adaptive(
        |v| {
            let w = 1.0 - v;
            f(v / w) / (w * w)
        },
        0.0,
        1.0,
        &quad(),
    )
    .unwrap()
    .value
}

#[derive(Clone, Copy)]
struct Surface {
    eps: f64,
    zeta: f64,
    w_par: f64,
    w_z: f64,
}

impl Surface {
    fn new(mol: &Molecule, scene: &Scene) -> Surface {
        let total = mol.alpha_total();
        Surface {
            eps: scene.epsilon(),
            zeta: scene.z() * mol.omega0() / CODATA_2018.c,
            w_par: mol.alpha_par() / total,
            w_z: mol.alpha_perp() / total,
        }
    }

    fn bracket(&self, p: Complex64) -> Complex64 {
        let s = (self.eps - 1.0 + p * p).sqrt();
        let rs = (p - s) / (p + s);
        let rp = (self.eps * p - s) / (self.eps * p + s);
        0.5 * self.w_par * (rs - p * p * rp) - self.w_z * (p * p - 1.0) * rp
    }

    fn delta(&self) -> f64 {
        (self.eps - 1.0) / (self.eps + 1.0)
    }

    /// `h(x)`, or `∂h/∂ζ` when `derivative` is set. Integrated over `u = p·x` so the decay
    /// scale stays `1/ζ` for every `x`.
    fn h(&self, x: f64, derivative: bool) -> f64 {
        let factor = |u: f64| if derivative { -2.0 * u } else { 1.0 };
        let inner = if x == 0.0 {
            let limit = -self.delta() * (0.5 * self.w_par + self.w_z);
            half_line(|u| factor(u) * (-2.0 * u * self.zeta).exp() * limit * u * u)
        } else {
            half_line(|s| {
                let u = x + s;
                factor(u) * (-2.0 * u * self.zeta).exp() * x * x * self.bracket(Complex64::new(u / x, 0.0)).re
            })
        };
        inner / (1.0 + x * x)
    }

    fn vacuum_integral(&self, derivative: bool) -> f64 {
        half_line(|x| self.h(x, derivative))
    }

    /// `Im G(ω0 + i0)`, continued along `p = 1 + i s`.
    fn resonant(&self) -> f64 {
        let re = |s: f64| {
            let phase = Complex64::new(-2.0 * s * self.zeta, 2.0 * self.zeta).exp();
            (phase * self.bracket(Complex64::new(1.0, s))).re
        };
        half_line(re)
    }
}

fn lih(preset: PolarizationPreset) -> Molecule {
    Molecule::with_preset(LIH_OMEGA0, State::Ground, preset, 1.0).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn scenes() -> Vec<(PolarizationPreset, f64, f64)> {
    let mut v = Vec::new();
    for (i, preset) in PolarizationPreset::ALL.into_iter().enumerate() {
        for (j, eps) in [2.0, 5.0, 10.0, 15.0].into_iter().enumerate() {
            let z = [0.5e-6, 2e-6, 6e-6, 20e-6][(i + j) % 4];
            v.push((preset, eps, z));
        }
    }
    v
}

#[test]
fn vacuum_potential_matches_lifshitz() {
    let cfg = QuadConfig::default().with_rel_tol(1e-12);
    for (preset, eps, z) in scenes() {
        let m = lih(preset);
        let s = Scene::new(eps, z, 0.0, 0.0).unwrap();
        let surf = Surface::new(&m, &s);
        let oracle = 0.5 * potential_prefactor(m.omega0()) * surf.vacuum_integral(false);
        let u = potential_vac(&m, &s, &cfg).unwrap();
        println!("vacuum {preset:?} eps={eps} z={z}: rel {:.1e}", rel(u.value, oracle));
        assert!(
            rel(u.value, oracle) <= 1e-10,
            "{preset:?} eps={eps} z={z}: {} vs {oracle}",
            u.value
        );
        assert!((u.value - oracle).abs() <= 10.0 * u.error.max(1e-12 * oracle.abs()));
    }
}

#[test]
fn vacuum_force_matches_lifshitz() {
    let cfg = QuadConfig::default().with_rel_tol(1e-12);
    for (preset, eps, z) in scenes() {
        let m = lih(preset);
        let s = Scene::new(eps, z, 0.0, 0.0).unwrap();
        let surf = Surface::new(&m, &s);
        let oracle = -0.5 * potential_prefactor(m.omega0()) * (m.omega0() / CODATA_2018.c) * surf.vacuum_integral(true);
        let f = force_vac(&m, &s, &cfg).unwrap();
        println!("force {preset:?} eps={eps} z={z}: rel {:.1e}", rel(f.value, oracle));
        assert!(
            rel(f.value, oracle) <= 1e-10,
            "{preset:?} eps={eps} z={z}: {} vs {oracle}",
            f.value
        );
    }
}

#[test]
fn vacuum_potential_has_the_nonretarded_limit() {
    let cfg = QuadConfig::default().with_rel_tol(1e-12);
    for preset in PolarizationPreset::ALL {
        let m = lih(preset);
        let mut previous = f64::INFINITY;
        for zeta in [1e-2, 1e-3, 1e-4] {
            let s = Scene::new(5.0, zeta * m.lambda0(), 0.0, 0.0).unwrap();
            let surf = Surface::new(&m, &s);
            let j = -potential_vac(&m, &s, &cfg).unwrap().value / potential_prefactor(m.omega0());
            let limit = PI / 32.0 * surf.delta() * (surf.w_par + 2.0 * surf.w_z);
            let dev = rel(j * zeta.powi(3), limit);
            assert!(
                dev < 20.0 * zeta && dev < previous,
                "{preset:?} zeta={zeta}: deviation {dev}"
            );
            previous = dev;
        }
    }
}

#[test]
fn equilibrium_potential_matches_matsubara_sum() {
    let cfg = QuadConfig::default().with_rel_tol(1e-12);
    let k = CODATA_2018;
    for (preset, eps, z) in [
        (PolarizationPreset::TransverseZ, 5.0, 2e-6),
        (PolarizationPreset::ParallelSurface, 2.0, 6e-6),
        (PolarizationPreset::Isotropic, 15.0, 1e-6),
    ] {
        let m = lih(preset);
        for t in [150.0, 300.0, 600.0] {
            let s = Scene::equilibrium(eps, z, t).unwrap();
            let surf = Surface::new(&m, &s);
            let theta = k.hbar * m.omega0() / (k.kb * t);
            let step = 2.0 * PI / theta;
            let mut sum = 0.5 * surf.h(0.0, false);
            for n in 1.. {
                let term = surf.h(n as f64 * step, false);
                sum += term;
                if term.abs() < 1e-17 * sum.abs() {
                    break;
                }
            }
            let p = potential_prefactor(m.omega0());
            let bose = 1.0 / theta.exp_m1();
            let oracle = 0.5 * p * step * sum + 0.5 * PI * p * bose * surf.resonant();
            let total = potential_vac(&m, &s, &cfg).unwrap().value + potential_eq(&m, &s, &cfg).unwrap().value;
            println!(
                "matsubara {preset:?} eps={eps} z={z} T={t}: rel {:.1e}",
                rel(total, oracle)
            );
            assert!(
                rel(total, oracle) <= 1e-9,
                "{preset:?} eps={eps} z={z} T={t}: {total} vs {oracle}"
            );
        }
    }
}
