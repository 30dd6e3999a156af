//! Globally adaptive Gauss–Kronrod quadrature on finite intervals, plus a
//! fixed-order Gauss–Legendre rule for short smooth windows.
//!
//! The adaptive scheme follows the classic QAG strategy: keep a heap of
//! subintervals ordered by their error estimate and bisect the worst one until
//! the summed error meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Kronrod abscissae (positive half) of the 21-point rule. Odd indices are
/// shared with the embedded 10-point Gauss rule.
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

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_735_139_910,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

impl Quadrature {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over the finite interval `[lo, hi]`.
    pub fn integrate<F>(&self, f: F, lo: f64, hi: f64) -> Result<Estimate>
    where
        F: Fn(f64) -> f64,
    {
        if lo == hi {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
            });
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Invalid(format!(
                "quadrature bounds must be finite, got [{lo}, {hi}]"
            )));
        }
        if hi < lo {
            let est = self.integrate(f, hi, lo)?;
            return Ok(Estimate {
                value: -est.value,
                error: est.error,
            });
        }

        let first = kronrod21(&f, lo, hi);
        let mut total = first.value;
        let mut total_err = first.error;
        let mut heap = BinaryHeap::new();
        // Segments too narrow to bisect further; their error is final.
        let mut frozen: Vec<Segment> = Vec::new();
        let mut frozen_err = 0.0;
        heap.push(first);

        while total_err > self.target(total) {
            if heap.len() >= self.max_intervals {
                return Err(Error::NonConvergence {
                    lo,
                    hi,
                    estimate: total,
                    error: total_err,
                });
            }
            let Some(worst) = heap.pop() else { break };
            let mid = 0.5 * (worst.lo + worst.hi);
            if mid <= worst.lo || mid >= worst.hi {
                frozen_err += worst.error;
                frozen.push(worst);
                if heap.is_empty() || frozen_err > self.target(total) {
                    return Err(Error::NonConvergence {
                        lo,
                        hi,
                        estimate: total,
                        error: total_err,
                    });
                }
                continue;
            }
            let left = kronrod21(&f, worst.lo, mid);
            let right = kronrod21(&f, mid, worst.hi);
            total += left.value + right.value - worst.value;
            total_err += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }

        if !total.is_finite() {
            return Err(Error::NonConvergence {
                lo,
                hi,
                estimate: total,
                error: total_err,
            });
        }
        // Re-sum from the pieces to shed accumulated update roundoff.
        let value = heap
            .iter()
            .chain(frozen.iter())
            .map(|s| s.value)
            .sum::<f64>();
        Ok(Estimate {
            value,
            error: total_err.max(0.0),
        })
    }

    fn target(&self, total: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * total.abs())
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let resasc = resasc * half.abs();
    let value = kronrod * half;
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    let resabs = {
        let mut s = WGK[10] * fc.abs();
        for j in 0..10 {
            s += WGK[j] * (fv1[j].abs() + fv2[j].abs());
        }
        s * half.abs()
    };
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > error {
        error = floor;
    }
    Segment {
        lo,
        hi,
        value,
        error,
    }
}

const LEGENDRE_ORDER: usize = 20;

fn legendre_rule() -> &'static [(f64, f64); LEGENDRE_ORDER] {
    static RULE: OnceLock<[(f64, f64); LEGENDRE_ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = LEGENDRE_ORDER;
        let mut rule = [(0.0, 0.0); LEGENDRE_ORDER];
        for i in 0..n.div_ceil(2) {
            // Newton iteration from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            rule[i] = (-x, w);
            rule[n - 1 - i] = (x, w);
        }
        rule
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed 20-point Gauss–Legendre rule on `[lo, hi]`. Only appropriate when
/// `f` is analytic in a neighbourhood of the interval.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    legendre_rule()
        .iter()
        .map(|&(x, w)| w * f(center + half * x))
        .sum::<f64>()
        * half
}
