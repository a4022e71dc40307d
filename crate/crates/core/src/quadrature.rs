//! Adaptive Gauss-Kronrod quadrature and the derived principal-value and semi-infinite rules.
//!
//! Every routine is deterministic: panels are refined in a fixed priority order and the final
//! sums are accumulated left to right, so identical inputs give bit-identical results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};
use crate::model::QuadConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Adaptive1D,
    PVSubtracted,
    Nested2D,
    ClosedFormSeries,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub subdivisions_used: usize,
    pub method: Method,
}

impl QuadResult {
    fn combine(parts: &[QuadResult], method: Method) -> Self {
        QuadResult {
            value: parts.iter().map(|p| p.value).sum(),
            abs_error_estimate: parts.iter().map(|p| p.abs_error_estimate).sum(),
            subdivisions_used: parts.iter().map(|p| p.subdivisions_used).sum(),
            method,
        }
    }
}

// Kronrod abscissae (descending) and weights for the 21-point rule, with the embedded
// 10-point Gauss weights on the odd-indexed abscissae, as tabulated beyond f64 precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    resabs: f64,
    order: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.order.cmp(&self.order))
    }
}

fn gk21<F>(f: &mut F, lo: f64, hi: f64, order: usize) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut resabs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x)?;
        let f2 = f(center + x)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() || !error.is_finite() {
        return domain(format!("integrand not finite on [{lo:e}, {hi:e}]"));
    }
    Ok(Panel {
        lo,
        hi,
        value,
        error,
        resabs,
        order,
    })
}

/// Adaptive 21-point Gauss-Kronrod integration of a fallible integrand over `[lo, hi]`.
///
/// Converges when the summed panel error is below `max(abs_tol, rel_tol·|I|)`, or below the
/// round-off floor of `∫|f|`, which no panel refinement can beat.
pub fn try_integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return domain(format!("invalid integration interval [{lo}, {hi}]"));
    }
    let mut heap = BinaryHeap::new();
    let mut order = 0;
    let first = gk21(&mut f, lo, hi, order)?;
    let (mut value, mut error, mut resabs) = (first.value, first.error, first.resabs);
    heap.push(first);
    let mut subdivisions = 0;
    loop {
        let tol = cfg
            .abs_tol
            .max(cfg.rel_tol * value.abs())
            .max(1e3 * f64::EPSILON * resabs);
        if error <= tol {
            break;
        }
        let worst = match heap.peek() {
            Some(p) => *p,
            None => break,
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if subdivisions >= cfg.max_subdivisions || !(worst.lo < mid && mid < worst.hi) {
            let (value, error) = totals(&heap);
            return Err(Error::ConvergenceFailure {
                value,
                error,
                subdivisions,
            });
        }
        heap.pop();
        let left = gk21(&mut f, worst.lo, mid, order + 1)?;
        let right = gk21(&mut f, mid, worst.hi, order + 2)?;
        order += 2;
        subdivisions += 1;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        resabs += left.resabs + right.resabs - worst.resabs;
        heap.push(left);
        heap.push(right);
    }
    let (value, error) = totals(&heap);
    Ok(QuadResult {
        value,
        abs_error_estimate: error,
        subdivisions_used: subdivisions,
        method: Method::Adaptive1D,
    })
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    (value, error)
}

pub fn integrate_adaptive<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_adaptive(|x| Ok(f(x)), lo, hi, cfg)
}

/// Principal value of `∫ g(x)/(x - pole) dx` over `[lo, hi]`.
///
/// On the symmetric window `pole ± w` the integrand is folded to `[g(pole+u) - g(pole-u)]/u`,
/// which is smooth; the logarithmic term of the subtracted `g(pole)` vanishes by symmetry.
pub fn try_integrate_pv<G>(
    mut g: G,
    lo: f64,
    hi: f64,
    pole: f64,
    half_width: f64,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    G: FnMut(f64) -> Result<f64>,
{
    if !(lo < pole && pole < hi) {
        return domain(format!("pole {pole} not inside ({lo}, {hi})"));
    }
    let w = half_width.min(pole - lo).min(hi - pole);
    if !(w > 0.0) {
        return domain("principal-value window must be positive");
    }
    let mut parts = Vec::with_capacity(3);
    if pole - w > lo {
        parts.push(try_integrate_adaptive(|x| Ok(g(x)? / (x - pole)), lo, pole - w, cfg)?);
    }
    parts.push(try_integrate_adaptive(
        |u| Ok((g(pole + u)? - g(pole - u)?) / u),
        0.0,
        w,
        cfg,
    )?);
    if pole + w < hi {
        parts.push(try_integrate_adaptive(|x| Ok(g(x)? / (x - pole)), pole + w, hi, cfg)?);
    }
    Ok(QuadResult::combine(&parts, Method::PVSubtracted))
}

pub fn integrate_pv<G>(mut g: G, lo: f64, hi: f64, pole: f64, half_width: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    G: FnMut(f64) -> f64,
{
    try_integrate_pv(|x| Ok(g(x)), lo, hi, pole, half_width, cfg)
}

/// `∫₀^∞ f` for an integrand decaying at least like `e^{-d x}`.
///
/// Truncates at `omega_cutoff_factor/d` and charges `|f(X)|/d`, the tail of a pure exponential
/// through the endpoint value, to the error estimate.
pub fn try_integrate_semiinfinite_damped<F>(mut f: F, d: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(d > 0.0 && d.is_finite()) {
        return domain(format!("decay rate must be positive, got {d}"));
    }
    let x_max = cfg.omega_cutoff_factor / d;
    let mut r = try_integrate_adaptive(&mut f, 0.0, x_max, cfg)?;
    r.abs_error_estimate += f(x_max)?.abs() / d;
    Ok(r)
}

pub fn integrate_semiinfinite_damped<F>(mut f: F, d: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semiinfinite_damped(|x| Ok(f(x)), d, cfg)
}
