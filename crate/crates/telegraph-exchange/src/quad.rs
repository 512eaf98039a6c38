//! Adaptive Gauss-Kronrod quadrature and Gauss-Legendre rules.
//!
//! The core is a 7-15 point Gauss-Kronrod pair applied to complex-valued
//! integrands, with worst-interval-first bisection until the summed error
//! estimate drops below an absolute tolerance. Oscillatory integrands
//! (`exp(-i w xi)` against a density) are handled by pre-splitting into
//! panels sized to the phase advance before adapting.
//!
//! `gauss_legendre` generates nodes and weights of arbitrary order by
//! Newton iteration on the Legendre polynomial; the composition module
//! uses it to build discrete approximations of continuous rate spectra.

use crate::{Error, Result, C64};

/// Kronrod abscissae (positive half) for the 7-15 pair.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

/// Gauss weights for the embedded 7-point rule.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod weights for the 15-point rule.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

struct Segment {
    a: f64,
    b: f64,
    value: C64,
    error: f64,
    seq: u64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    /// Max-heap priority: largest error first, earliest-created first on
    /// ties, so the refinement order is fully deterministic.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error
            .total_cmp(&other.error)
            .then(other.seq.cmp(&self.seq))
    }
}

/// One 7-15 evaluation on `[a, b]`; the error estimate is the magnitude of
/// the Gauss/Kronrod difference, conservative for smooth integrands.
fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let fsum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    let value = kronrod * half;
    let error = (kronrod - gauss).norm() * half.abs();
    (value, error)
}

const MAX_SEGMENTS: usize = 20_000;

/// Integrate a complex-valued function over `[a, b]` to absolute tolerance,
/// starting from `min_panels` equal panels.
pub fn integrate_complex_panels<F: Fn(f64) -> C64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    min_panels: usize,
) -> Result<C64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::InvalidParameter {
            field: "interval",
            requirement: "finite with a < b",
            value: b - a,
        });
    }
    if !(abs_tol.is_finite() && abs_tol > 0.0) {
        return Err(Error::InvalidParameter {
            field: "abs_tol",
            requirement: "positive and finite",
            value: abs_tol,
        });
    }
    let n0 = min_panels.clamp(1, MAX_SEGMENTS / 2);
    let width = (b - a) / n0 as f64;
    let mut heap = std::collections::BinaryHeap::with_capacity(2 * n0);
    let mut seq = 0u64;
    let mut total_error = 0.0;
    for i in 0..n0 {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == n0 {
            b
        } else {
            a + (i + 1) as f64 * width
        };
        let (value, error) = gk15(&f, lo, hi);
        total_error += error;
        heap.push(Segment {
            a: lo,
            b: hi,
            value,
            error,
            seq,
        });
        seq += 1;
    }
    while total_error > abs_tol {
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureNonConvergence {
                requested: abs_tol,
                achieved: heap.iter().map(|s| s.error).sum(),
            });
        }
        let worst = heap.pop().expect("non-empty segment heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // not bisectable in floating point; tolerance unreachable
            let achieved = worst.error + heap.iter().map(|s| s.error).sum::<f64>();
            return Err(Error::QuadratureNonConvergence {
                requested: abs_tol,
                achieved,
            });
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        total_error += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
            seq,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
            seq: seq + 1,
        });
        seq += 2;
    }
    // deterministic summation order regardless of heap layout
    Ok(heap.into_sorted_vec().iter().map(|s| s.value).sum())
}

/// Integrate a complex-valued function over `[a, b]` to absolute tolerance.
pub fn integrate_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<C64> {
    integrate_complex_panels(f, a, b, abs_tol, 1)
}

/// Integrate a real-valued function over `[a, b]` to absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    integrate_complex(|x| C64::new(f(x), 0.0), a, b, abs_tol).map(|v| v.re)
}

/// Panel count that resolves a phase factor `exp(-i w x)` on `[a, b]`:
/// at least eight panels per full oscillation.
pub fn oscillatory_panels(angular_freq: f64, a: f64, b: f64) -> usize {
    let cycles = (angular_freq.abs() * (b - a)) / std::f64::consts::TAU;
    (8.0 * cycles.ceil()).max(8.0) as usize
}

/// Legendre polynomial `P_n` and its derivative at `x` (three-term
/// recurrence; `|x| < 1` assumed for the derivative formula).
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights of order `n` on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "order must be at least 1");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, Newton to convergence, one polish step
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_pd(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-14 {
                break;
            }
        }
        let (p, dp) = legendre_pd(n, x);
        x -= p / dp;
        let (_, dp) = legendre_pd(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}
