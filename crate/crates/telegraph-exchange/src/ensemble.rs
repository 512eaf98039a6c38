//! Ensemble averages of the noisy channel, two independent ways.
//!
//! `mc_average` samples telegraph trajectories (each acts through its mean
//! state `xi` alone) and averages the per-trajectory phases; `quadrature_q`
//! integrates the same phase factor against one of the closed-form `xi` laws.
//! The two must agree within Monte Carlo error, and both must agree with the
//! closed-form kernels in [`crate::superop`]; the acceptance suite leans on
//! this triangle.
//!
//! Averaging is batched: trajectory `k` always uses RNG stream `k`, batches
//! are a fixed 1024 trajectories, and batch statistics are combined by a
//! pairwise tree in batch order. The parallel path (rayon, `parallel`
//! feature) therefore produces bit-identical results to the sequential one.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::pdf::{XiDistribution, XiKind};
use crate::quad::{integrate_complex_panels, oscillatory_panels};
use crate::rtn::{mean_state_xi, sample_trajectory_stream, FluctuatorParams};
use crate::spin::{sigma_h_spectrum, SuperOperator};
use crate::superop::q_unitary;
use crate::{Error, Result, C64};

/// Interior bins of the `xi` histogram (the `±1` atoms are counted apart).
pub const HISTOGRAM_BINS: usize = 50;

const BATCH: u64 = 1024;

/// Histogram of sampled `xi` values: uniform interior bins over `[-1, 1]`
/// plus exact-endpoint atom counters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiHistogram {
    /// `HISTOGRAM_BINS + 1` ascending edges spanning `[-1, 1]`.
    pub bin_edges: Vec<f64>,
    /// Counts of jumpy trajectories per interior bin.
    pub counts: Vec<u64>,
    /// Trajectories with `xi` exactly `+1` (no jumps, started `+`).
    pub atom_plus: u64,
    /// Trajectories with `xi` exactly `-1` (no jumps, started `-`).
    pub atom_minus: u64,
}

impl XiHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.atom_plus + self.atom_minus
    }
}

/// Result of a Monte Carlo ensemble average.
#[derive(Debug, Clone)]
pub struct EnsembleReport {
    pub n_trajectories: u64,
    pub mean_superop: SuperOperator,
    /// Largest element-wise standard error (combining the real and
    /// imaginary spreads of the averaged phase factor).
    pub standard_error: f64,
    pub xi_histogram: XiHistogram,
}

/// Per-batch running sums; exactly the state needed to merge batches
/// without revisiting trajectories.
#[derive(Debug, Clone)]
struct BatchStat {
    count: u64,
    sum_u: f64,
    sum_v: f64,
    sum_uu: f64,
    sum_vv: f64,
    bins: [u64; HISTOGRAM_BINS],
    atom_plus: u64,
    atom_minus: u64,
}

impl BatchStat {
    fn zero() -> Self {
        Self {
            count: 0,
            sum_u: 0.0,
            sum_v: 0.0,
            sum_uu: 0.0,
            sum_vv: 0.0,
            bins: [0; HISTOGRAM_BINS],
            atom_plus: 0,
            atom_minus: 0,
        }
    }

    fn merge(mut self, other: &Self) -> Self {
        self.count += other.count;
        self.sum_u += other.sum_u;
        self.sum_v += other.sum_v;
        self.sum_uu += other.sum_uu;
        self.sum_vv += other.sum_vv;
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.atom_plus += other.atom_plus;
        self.atom_minus += other.atom_minus;
        self
    }
}

/// Fixed-shape pairwise reduction; the tree depends only on the batch count,
/// never on scheduling, so floating-point sums are reproducible.
fn reduce_tree(stats: &[BatchStat]) -> BatchStat {
    match stats.len() {
        0 => BatchStat::zero(),
        1 => stats[0].clone(),
        n => {
            let mid = n / 2;
            reduce_tree(&stats[..mid]).merge(&reduce_tree(&stats[mid..]))
        }
    }
}

fn run_batch(
    params: &FluctuatorParams,
    t: f64,
    master_seed: u64,
    start: u64,
    end: u64,
) -> Result<BatchStat> {
    let mut stat = BatchStat::zero();
    let phase_rate = 4.0 * t;
    for k in start..end {
        let traj = sample_trajectory_stream(params, t, master_seed, k)?;
        let xi = mean_state_xi(&traj);
        let theta = phase_rate * (params.j0() + params.alpha() * xi);
        let (sin, cos) = theta.sin_cos();
        let (u, v) = (cos, -sin);
        stat.sum_u += u;
        stat.sum_v += v;
        stat.sum_uu += u * u;
        stat.sum_vv += v * v;
        if xi == 1.0 {
            stat.atom_plus += 1;
        } else if xi == -1.0 {
            stat.atom_minus += 1;
        } else {
            let idx = (((xi + 1.0) * 0.5) * HISTOGRAM_BINS as f64) as usize;
            stat.bins[idx.min(HISTOGRAM_BINS - 1)] += 1;
        }
        stat.count += 1;
    }
    Ok(stat)
}

fn validate_mc_args(t: f64, n: u64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and > 0",
            value: t,
        });
    }
    if n == 0 {
        return Err(Error::InvalidParameter {
            field: "n",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    Ok(())
}

fn batch_bounds(n: u64) -> Vec<(u64, u64)> {
    (0..n.div_ceil(BATCH))
        .map(|b| (b * BATCH, ((b + 1) * BATCH).min(n)))
        .collect()
}

fn assemble(params: &FluctuatorParams, n: u64, stats: &[BatchStat]) -> EnsembleReport {
    let total = reduce_tree(stats);
    debug_assert_eq!(total.count, n);
    let nf = n as f64;
    let mean = C64::new(total.sum_u / nf, total.sum_v / nf);

    let spectrum = sigma_h_spectrum();
    let mean_superop = spectrum.lift(|s| {
        if s == 0.0 {
            C64::new(1.0, 0.0)
        } else if s > 0.0 {
            mean
        } else {
            mean.conj()
        }
    });

    // element (i,j) of the mean is P0 + u*A + i*v*B with A = P+ + P-,
    // B = P+ - P- (both real), so its standard error follows from the
    // scalar variances of u and v alone
    let standard_error = if n < 2 || params.alpha() == 0.0 {
        0.0
    } else {
        let var_u = (total.sum_uu - total.sum_u * total.sum_u / nf).max(0.0) / (nf - 1.0);
        let var_v = (total.sum_vv - total.sum_v * total.sum_v / nf).max(0.0) / (nf - 1.0);
        let p_plus = &spectrum.projectors[2];
        let p_minus = &spectrum.projectors[0];
        let mut worst: f64 = 0.0;
        for (pp, pm) in p_plus.iter().zip(p_minus) {
            let a = pp.re + pm.re;
            let b = pp.re - pm.re;
            worst = worst.max((var_u * a * a + var_v * b * b).sqrt());
        }
        worst / nf.sqrt()
    };

    let bin_edges = (0..=HISTOGRAM_BINS)
        .map(|i| -1.0 + i as f64 * (2.0 / HISTOGRAM_BINS as f64))
        .collect();
    EnsembleReport {
        n_trajectories: n,
        mean_superop,
        standard_error,
        xi_histogram: XiHistogram {
            bin_edges,
            counts: total.bins.to_vec(),
            atom_plus: total.atom_plus,
            atom_minus: total.atom_minus,
        },
    }
}

/// Monte Carlo ensemble average over `n` trajectories of duration `t`.
///
/// Deterministic in `(params, t, n, master_seed)`; with the `parallel`
/// feature the batches run on the rayon pool, bit-identically to
/// [`mc_average_sequential`].
pub fn mc_average(
    params: &FluctuatorParams,
    t: f64,
    n: u64,
    master_seed: u64,
) -> Result<EnsembleReport> {
    validate_mc_args(t, n)?;
    #[cfg(feature = "parallel")]
    let stats = batch_bounds(n)
        .par_iter()
        .map(|&(start, end)| run_batch(params, t, master_seed, start, end))
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let stats = batch_bounds(n)
        .iter()
        .map(|&(start, end)| run_batch(params, t, master_seed, start, end))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(params, n, &stats))
}

/// Monte Carlo estimate of the scalar `Q_NU` (the kernel at eigenvalue +4
/// with the deterministic rotation removed), with its own standard error
/// `sqrt((Var_re + Var_im)/n)`.
///
/// Uses the same per-trajectory streams as [`mc_average`], so the returned
/// mean equals `q_nu` of that report's superoperator rotated by
/// `exp(+i 4 j0 t)`.
pub fn mc_qnu(params: &FluctuatorParams, t: f64, n: u64, master_seed: u64) -> Result<(C64, f64)> {
    validate_mc_args(t, n)?;
    let run = |&(start, end): &(u64, u64)| -> Result<[f64; 4]> {
        let mut acc = [0.0; 4];
        for k in start..end {
            let traj = sample_trajectory_stream(params, t, master_seed, k)?;
            let theta = 4.0 * t * params.alpha() * mean_state_xi(&traj);
            let (sin, cos) = theta.sin_cos();
            let (u, v) = (cos, -sin);
            acc[0] += u;
            acc[1] += v;
            acc[2] += u * u;
            acc[3] += v * v;
        }
        Ok(acc)
    };
    #[cfg(feature = "parallel")]
    let sums = batch_bounds(n)
        .par_iter()
        .map(run)
        .collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let sums = batch_bounds(n)
        .iter()
        .map(run)
        .collect::<Result<Vec<_>>>()?;
    let mut tot = [0.0; 4];
    for s in &sums {
        for (t, v) in tot.iter_mut().zip(s) {
            *t += v;
        }
    }
    let nf = n as f64;
    let mean = C64::new(tot[0] / nf, tot[1] / nf);
    let se = if n < 2 {
        0.0
    } else {
        let var_u = (tot[2] - tot[0] * tot[0] / nf).max(0.0) / (nf - 1.0);
        let var_v = (tot[3] - tot[1] * tot[1] / nf).max(0.0) / (nf - 1.0);
        ((var_u + var_v) / nf).sqrt()
    };
    Ok((mean, se))
}

/// Single-threaded reference implementation of [`mc_average`]; always
/// compiled, used by the benchmarks and the reproducibility tests.
pub fn mc_average_sequential(
    params: &FluctuatorParams,
    t: f64,
    n: u64,
    master_seed: u64,
) -> Result<EnsembleReport> {
    validate_mc_args(t, n)?;
    let stats = batch_bounds(n)
        .iter()
        .map(|&(start, end)| run_batch(params, t, master_seed, start, end))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(params, n, &stats))
}

/// Full averaged channel by numerical integration of the phase factor
/// against the selected `xi` law (atoms added in closed form).
///
/// Matches the conventions of [`mc_average`]: the deterministic `j0`
/// rotation is included. Oscillatory integrands are pre-split to at least
/// eight panels per period before adapting; tolerance `1e-10` per
/// eigenvalue integral.
pub fn quadrature_q(params: &FluctuatorParams, t: f64, kind: XiKind) -> Result<SuperOperator> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and > 0",
            value: t,
        });
    }
    let dist = XiDistribution::new(kind, params.lambda() * t)?;
    let alpha_t = params.alpha() * t;
    let spectrum = sigma_h_spectrum();

    let mut values = [C64::new(0.0, 0.0); 3];
    for (slot, &s) in values.iter_mut().zip(&spectrum.eigenvalues) {
        let freq = s * alpha_t;
        let mut acc = C64::new(0.0, 0.0);
        for (xi, w) in dist.atoms() {
            if w > 0.0 {
                acc += w * C64::from_polar(1.0, -freq * xi);
            }
        }
        let (lo, hi) = dist.support();
        let mut cuts = vec![lo];
        if lo < -1.0 {
            cuts.push(-1.0);
        }
        if hi > 1.0 {
            cuts.push(1.0);
        }
        cuts.push(hi);
        for pair in cuts.windows(2) {
            let panels = oscillatory_panels(freq, pair[0], pair[1]);
            acc += integrate_complex_panels(
                |xi| C64::from_polar(dist.density_extended(xi), -freq * xi),
                pair[0],
                pair[1],
                1e-10,
                panels,
            )?;
        }
        *slot = acc;
    }

    let nu = spectrum.lift(|s| {
        if s < 0.0 {
            values[0]
        } else if s == 0.0 {
            values[1]
        } else {
            values[2]
        }
    });
    Ok(&q_unitary(params.j0(), t)? * &nu)
}

/// Element-wise distances between two superoperators, plus the per-block
/// scalar discrepancies `tr(P_s (A - B)) / mult(s)` for `s = -4, 0, +4`.
#[derive(Debug, Clone, Copy)]
pub struct ComparisonReport {
    pub sup_norm: f64,
    pub frobenius: f64,
    pub kernel_deltas: [C64; 3],
}

pub fn compare(a: &SuperOperator, b: &SuperOperator) -> ComparisonReport {
    let diff = a.matrix() - b.matrix();
    let sup_norm = diff.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let frobenius = diff.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let spectrum = sigma_h_spectrum();
    let mut kernel_deltas = [C64::new(0.0, 0.0); 3];
    for (slot, (p, &m)) in kernel_deltas
        .iter_mut()
        .zip(spectrum.projectors.iter().zip(&spectrum.multiplicities))
    {
        let product = p.dot(&diff);
        let trace: C64 = (0..16).map(|i| product[(i, i)]).sum();
        *slot = trace / m as f64;
    }
    ComparisonReport {
        sup_norm,
        frobenius,
        kernel_deltas,
    }
}
