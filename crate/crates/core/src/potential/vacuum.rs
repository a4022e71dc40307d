//! Reduced vacuum integral `J(ζ) = Σ_σ w_σ ∫₀^∞ dx x³/(x+s) f_σ(x)` and its ζ-derivative.
//!
//! Taking the `t`-integral outside and the Abel limit pointwise fails: near `t = 0` the
//! exponential channel behaves like `∫dt/t²` while the cosine channel hides a compensating
//! distribution at `t = 0`. The kernels are therefore split as `A = a1·t + A_r` and
//! `T = t0 + t1·t + t2·t² + T_r`. The polynomial pieces are integrated over `t` first and then
//! over `x` in closed form; the `a1/k²` and `t1/q²` pieces cancel identically between the two
//! channels and are dropped. The remainders decay fast enough at small `t` for the swapped
//! order to converge absolutely.

use num_complex::Complex64;

use crate::error::Result;
use crate::kernels::{a_remainder, integrate_unit_t, moment, small_t, t_remainder, Polarization};
use crate::model::QuadConfig;
use crate::quadrature::QuadResult;

/// Which functional of the vacuum integral to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Output {
    Value,
    Derivative,
}

#[derive(Debug, Clone, Copy)]
enum Part {
    Re,
    Im,
}

impl Part {
    fn of(self, z: Complex64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
        }
    }
}

/// `c·ζ^m·M_p(b̂ζ, s)`, projected on `part`.
struct PolyTerm {
    c: f64,
    m: i32,
    p: u32,
    b_hat: Complex64,
    part: Part,
}

impl PolyTerm {
    fn eval(&self, zeta: f64, s: f64, out: Output) -> f64 {
        let b = self.b_hat * zeta;
        let v = match out {
            Output::Value => zeta.powi(self.m) * moment(self.p, b, s),
            Output::Derivative => {
                f64::from(self.m) * zeta.powi(self.m - 1) * moment(self.p, b, s)
                    - zeta.powi(self.m) * self.b_hat * moment(self.p + 1, b, s)
            }
        };
        self.c * self.part.of(v)
    }
}

fn poly_terms(pol: Polarization, eps: f64) -> [PolyTerm; 5] {
    let c = small_t(pol, eps);
    let kappa = 2.0 * (eps - 1.0).sqrt();
    let osc = Complex64::new(0.0, -2.0);
    let real = Complex64::new(kappa, 0.0);
    [
        PolyTerm {
            c: -c.a1 / (kappa * kappa),
            m: -2,
            p: 1,
            b_hat: real,
            part: Part::Re,
        },
        PolyTerm {
            c: -c.a1 / kappa,
            m: -1,
            p: 2,
            b_hat: real,
            part: Part::Re,
        },
        PolyTerm {
            c: (c.t0 + c.t1 + c.t2) / 2.0,
            m: -1,
            p: 2,
            b_hat: osc,
            part: Part::Im,
        },
        PolyTerm {
            c: (c.t1 + 2.0 * c.t2) / 4.0,
            m: -2,
            p: 1,
            b_hat: osc,
            part: Part::Re,
        },
        PolyTerm {
            c: -c.t2 / 4.0,
            m: -3,
            p: 0,
            b_hat: osc,
            part: Part::Im,
        },
    ]
}

/// `Σ_σ w_σ J_σ(ζ)` or its ζ-derivative; `s = +1` ground, `s = -1` excited (principal value).
pub(crate) fn reduced(
    weights: [f64; 2],
    eps: f64,
    zeta: f64,
    s: f64,
    out: Output,
    cfg: &QuadConfig,
) -> Result<QuadResult> {
    let kappa = 2.0 * (eps - 1.0).sqrt();
    let mut poly = 0.0;
    for (w, pol) in weights.iter().zip(Polarization::BOTH) {
        if *w != 0.0 {
            poly += w * poly_terms(pol, eps).iter().map(|t| t.eval(zeta, s, out)).sum::<f64>();
        }
    }
    let remainder = integrate_unit_t(
        |t| {
            if t == 0.0 {
                return Ok(0.0);
            }
            let mut ar = 0.0;
            let mut tr = 0.0;
            for (w, pol) in weights.iter().zip(Polarization::BOTH) {
                if *w != 0.0 {
                    ar += w * a_remainder(pol, t, eps);
                    tr += w * t_remainder(pol, t, eps);
                }
            }
            let b_exp = Complex64::new(kappa * zeta * t, 0.0);
            let b_osc = Complex64::new(0.0, -2.0 * zeta * t);
            Ok(match out {
                Output::Value => ar * moment(3, b_exp, s).re + tr * moment(3, b_osc, s).re,
                Output::Derivative => -ar * kappa * t * moment(4, b_exp, s).re - tr * 2.0 * t * moment(4, b_osc, s).im,
            })
        },
        cfg,
    )?;
    Ok(QuadResult {
        value: poly + remainder.value,
        abs_error_estimate: remainder.abs_error_estimate + 1e-14 * poly.abs(),
        ..remainder
    })
}
