//! Globally adaptive Gauss–Kronrod (10/21) quadrature on [0, ∞), mapped to
//! u ∈ [0, 1) by t = u/(1 − u).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Absolute error floor, so integrals that vanish can converge.
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions { rel_tol: 1e-10, abs_tol: 1e-14, max_panels: 2000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

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
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
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

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
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
    // Largest error first; ties broken by position for determinism.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod_21(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let (f1, f2) = (f(center - x), f(center + x));
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over [0, ∞). `scales` are values of t near which the
/// integrand changes character; each becomes an initial panel boundary.
pub fn integrate_semi_infinite(
    f: impl Fn(f64) -> f64,
    scales: &[f64],
    opts: &QuadratureOptions,
) -> Result<QuadratureResult> {
    let g = |u: f64| {
        let w = 1.0 - u;
        let t = u / w;
        f(t) / (w * w)
    };
    let mut breaks: Vec<f64> = scales
        .iter()
        .filter(|t| t.is_finite() && **t > 0.0)
        .map(|t| t / (1.0 + t))
        .filter(|u| *u > 0.0 && *u < 1.0)
        .collect();
    breaks.push(0.0);
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    integrate_panels(&g, &breaks, opts)
}

/// Integrates over [breaks[0], breaks[last]].
pub fn integrate_finite(f: impl Fn(f64) -> f64, breaks: &[f64], opts: &QuadratureOptions) -> Result<QuadratureResult> {
    integrate_panels(&f, breaks, opts)
}

fn integrate_panels(g: &impl Fn(f64) -> f64, breaks: &[f64], opts: &QuadratureOptions) -> Result<QuadratureResult> {
    let mut heap = BinaryHeap::new();
    let mut done: Vec<Panel> = Vec::new();
    for w in breaks.windows(2) {
        heap.push(gauss_kronrod_21(g, w[0], w[1]));
    }
    let mut panels = heap.len();
    loop {
        let (value, error) = totals(heap.iter().chain(done.iter()));
        let tol = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= tol {
            return Ok(finish(heap, done, panels));
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::QuadratureNoConvergence { estimate: value, error, panels, rel_tol: opts.rel_tol });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if panels + 1 > opts.max_panels {
            return Err(Error::QuadratureNoConvergence { estimate: value, error, panels, rel_tol: opts.rel_tol });
        }
        if mid <= worst.a || mid >= worst.b || (worst.b - worst.a) < 1e-15 * mid.abs() {
            // cannot be split further
            done.push(Panel { error: worst.error, ..worst });
            continue;
        }
        heap.push(gauss_kronrod_21(g, worst.a, mid));
        heap.push(gauss_kronrod_21(g, mid, worst.b));
        panels += 1;
    }
}

fn totals<'a>(it: impl Iterator<Item = &'a Panel>) -> (f64, f64) {
    it.fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

fn finish(heap: BinaryHeap<Panel>, done: Vec<Panel>, panels: usize) -> QuadratureResult {
    let mut all: Vec<Panel> = heap.into_vec();
    all.extend(done);
    all.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = all.iter().map(|p| p.value).sum();
    let error = all.iter().map(|p| p.error).sum();
    QuadratureResult { value, error, panels }
}
