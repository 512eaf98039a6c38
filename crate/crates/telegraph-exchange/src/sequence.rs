//! Noisy evolutions interleaved with non-commuting gates, and the
//! zeroth-order cross-term correction for slow fluctuators.
//!
//! A product of independently averaged channels treats the fluctuator as
//! re-randomized at every segment boundary. For slow fluctuators that is
//! wrong in the jump-free sector: the no-jump part of the product contains
//! mixed-sign terms (frozen `+` in one segment, `-` in another) that imply a
//! flip which never happened. The correction removes every mixed-sign
//! string and re-weights the two aligned strings from `2^-n` to `1/2`, so
//! the removed and restored weights cancel and trace preservation is exact.
//!
//! Conventions: the fluctuator is frozen while gates run (the telegraph
//! clock only advances through noisy segments), but gate durations still
//! count toward the total duration `T_total` used in the `p0(lambda
//! T_total)` weighting. Only the zeroth order is corrected; cross terms
//! inside the jumpy sector are left alone. Both choices are recorded on the
//! result.

use ndarray::Array2;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::pdf::prob_ge1;
use crate::rtn::{sample_trajectory_stream, FluctuatorParams, RtnTrajectory};
use crate::spin::{kron, sigma_h_spectrum, unitary_to_superop, SuperOperator};
use crate::superop::{q_full, q_unitary, Form};
use crate::{Error, Result, C64};

/// Most noisy segments the sign-string enumeration will accept (`2^12`
/// strings).
pub const MAX_NOISY_SEGMENTS: usize = 12;

#[derive(Debug, Clone)]
enum Kind {
    Noisy,
    Gate(SuperOperator),
}

/// One step of a pulse sequence: free evolution under the fluctuating
/// exchange, or a fixed gate.
#[derive(Debug, Clone)]
pub struct ProcessSegment {
    kind: Kind,
    duration: f64,
}

impl ProcessSegment {
    /// Free evolution under `j0 + alpha*eta(t)` for `duration > 0`.
    pub fn noisy(duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter {
                field: "duration",
                requirement: "finite and > 0",
                value: duration,
            });
        }
        Ok(Self {
            kind: Kind::Noisy,
            duration,
        })
    }

    /// Instantaneous gate from a 4x4 unitary.
    pub fn gate(unitary: &Array2<C64>) -> Result<Self> {
        Self::gate_with_duration(unitary, 0.0)
    }

    /// Gate with a nonzero wall-clock duration. The fluctuator is frozen
    /// while it runs; the duration only enters the `T_total` weighting.
    pub fn gate_with_duration(unitary: &Array2<C64>, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "duration",
                requirement: "finite and >= 0",
                value: duration,
            });
        }
        Ok(Self {
            kind: Kind::Gate(unitary_to_superop(unitary)?),
            duration,
        })
    }

    pub fn is_noisy(&self) -> bool {
        matches!(self.kind, Kind::Noisy)
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

/// Named 4x4 unitaries for building sequences: `X1`/`X2`, `Y1`/`Y2`,
/// `Z1`/`Z2`, `H1`/`H2` (Pauli or Hadamard on spin 1 or 2) and `CZ`.
pub fn named_unitary(name: &str) -> Option<Array2<C64>> {
    let o = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let r = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let single = |m: [[C64; 2]; 2], first: bool| {
        let eye = Array2::eye(2);
        let m = Array2::from_shape_vec((2, 2), m.concat()).expect("2x2");
        if first {
            kron(&m, &eye)
        } else {
            kron(&eye, &m)
        }
    };
    let (gate, first) = match name.to_ascii_uppercase().as_str() {
        "CZ" => {
            let mut cz = Array2::eye(4);
            cz[(3, 3)] = -o;
            return Some(cz);
        }
        "X1" => ([[z, o], [o, z]], true),
        "X2" => ([[z, o], [o, z]], false),
        "Y1" => ([[z, -i], [i, z]], true),
        "Y2" => ([[z, -i], [i, z]], false),
        "Z1" => ([[o, z], [z, -o]], true),
        "Z2" => ([[o, z], [z, -o]], false),
        "H1" => ([[r, r], [r, -r]], true),
        "H2" => ([[r, r], [r, -r]], false),
        _ => return None,
    };
    Some(single(gate, first))
}

fn require_segments(segments: &[ProcessSegment]) -> Result<()> {
    if segments.is_empty() {
        return Err(Error::InvalidParameter {
            field: "segments",
            requirement: "at least one",
            value: 0.0,
        });
    }
    Ok(())
}

fn noisy_durations(segments: &[ProcessSegment]) -> Vec<f64> {
    segments
        .iter()
        .filter(|s| s.is_noisy())
        .map(|s| s.duration)
        .collect()
}

/// Product of independently averaged channels, rightmost factor earliest:
/// each noisy segment contributes the exact averaged channel, each gate its
/// superoperator.
pub fn raw_sequence(
    segments: &[ProcessSegment],
    params: &FluctuatorParams,
) -> Result<SuperOperator> {
    require_segments(segments)?;
    let mut acc = SuperOperator::identity();
    for seg in segments {
        acc = match &seg.kind {
            Kind::Noisy => &q_full(params, seg.duration, Form::Exact)? * &acc,
            Kind::Gate(g) => g * &acc,
        };
    }
    Ok(acc)
}

/// Frozen-fluctuator propagator for one sign string: noisy segment `i`
/// evolves unitarily at exchange `j0 + sign_i * alpha`, gates apply as-is.
fn wrap(
    segments: &[ProcessSegment],
    params: &FluctuatorParams,
    signs: u32,
) -> Result<SuperOperator> {
    let mut acc = SuperOperator::identity();
    let mut noisy_index = 0;
    for seg in segments {
        acc = match &seg.kind {
            Kind::Noisy => {
                let sign = if (signs >> noisy_index) & 1 == 0 {
                    1.0
                } else {
                    -1.0
                };
                noisy_index += 1;
                let j = params.j0() + sign * params.alpha();
                &q_unitary(j, seg.duration)? * &acc
            }
            Kind::Gate(g) => g * &acc,
        };
    }
    Ok(acc)
}

fn check_enumeration_size(n_noisy: usize) -> Result<()> {
    if n_noisy > MAX_NOISY_SEGMENTS {
        return Err(Error::Invalid(format!(
            "sign-string enumeration supports at most {MAX_NOISY_SEGMENTS} \
             noisy segments, got {n_noisy}"
        )));
    }
    Ok(())
}

/// Zeroth-order cross terms `X0`: every sign string over the noisy segments
/// with at least one sign change, each weighted `p0(lambda T_total)/2^n`.
/// Zero for fewer than two noisy segments.
pub fn zeroth_cross_terms(
    segments: &[ProcessSegment],
    params: &FluctuatorParams,
) -> Result<SuperOperator> {
    require_segments(segments)?;
    let n_noisy = segments.iter().filter(|s| s.is_noisy()).count();
    if n_noisy < 2 {
        return Ok(SuperOperator::zero());
    }
    check_enumeration_size(n_noisy)?;
    let t_total: f64 = segments.iter().map(|s| s.duration).sum();
    let p0 = (-params.lambda() * t_total).exp();
    let all = 1u32 << n_noisy;
    let mut acc = SuperOperator::zero();
    for signs in 1..all - 1 {
        acc = &acc + &wrap(segments, params, signs)?;
    }
    Ok(acc.scaled(C64::new(p0 / all as f64, 0.0)))
}

/// A sequence channel before and after cross-term removal.
#[derive(Debug, Clone)]
pub struct SequenceResult {
    /// Plain product of per-segment averaged channels.
    pub raw: SuperOperator,
    /// `raw - removed_cross_terms + restored_aligned_terms`.
    pub corrected: SuperOperator,
    /// The mixed-sign zeroth-order terms that were subtracted.
    pub removed_cross_terms: SuperOperator,
    /// The corrected jump-free component: `p0(lambda T_total)/2` times the
    /// two aligned frozen-sign propagators.
    pub corrected_no_fluct: SuperOperator,
    /// `p0(lambda T_total)`.
    pub p0_total: f64,
    /// `1 - p0(lambda T_total)`.
    pub p_gt0_total: f64,
    /// Sum of noisy durations (the telegraph clock).
    pub t_noisy: f64,
    /// Sum of all durations, gates included (the weighting clock).
    pub t_total: f64,
    /// Always false: only the zeroth order is corrected here.
    pub higher_orders_removed: bool,
    /// Always false: the jumpy sector keeps its cross terms.
    pub cross_terms_in_p_gt0_removed: bool,
}

/// Runs the full correction: raw product, mixed-sign removal, aligned-sign
/// re-weighting.
pub fn corrected_sequence(
    segments: &[ProcessSegment],
    params: &FluctuatorParams,
) -> Result<SequenceResult> {
    require_segments(segments)?;
    let n_noisy = segments.iter().filter(|s| s.is_noisy()).count();
    check_enumeration_size(n_noisy)?;
    let t_noisy: f64 = noisy_durations(segments).iter().sum();
    let t_total: f64 = segments.iter().map(|s| s.duration).sum();
    let p0 = (-params.lambda() * t_total).exp();
    let p_gt0 = prob_ge1(params.lambda() * t_total);

    let raw = raw_sequence(segments, params)?;
    let removed = zeroth_cross_terms(segments, params)?;

    let n = n_noisy as u32;
    let aligned_plus = wrap(segments, params, 0)?;
    let aligned_minus = wrap(segments, params, if n == 0 { 0 } else { (1 << n) - 1 })?;
    let aligned = &aligned_plus + &aligned_minus;
    let corrected_no_fluct = aligned.scaled(C64::new(p0 / 2.0, 0.0));

    // restored weight (1/2 - 2^-n) per aligned string exactly cancels the
    // removed mixed-string weight (2^n - 2)/2^n, keeping the map trace
    // preserving; for n < 2 both sides are zero
    let corrected = if n_noisy < 2 {
        raw.clone()
    } else {
        let restore = p0 * (0.5 - 0.5f64.powi(n as i32));
        &(&raw - &removed) + &aligned.scaled(C64::new(restore, 0.0))
    };

    Ok(SequenceResult {
        raw,
        corrected,
        removed_cross_terms: removed,
        corrected_no_fluct,
        p0_total: p0,
        p_gt0_total: p_gt0,
        t_noisy,
        t_total,
        higher_orders_removed: false,
        cross_terms_in_p_gt0_removed: false,
    })
}

/// Signed occupation (integral of `eta` over `[a, b]`) of the noisy
/// timeline.
fn signed_occupation(traj: &RtnTrajectory, a: f64, b: f64) -> f64 {
    let jumps = traj.jump_times();
    let skipped = jumps.partition_point(|&tj| tj <= a);
    let mut sign = if skipped % 2 == 0 {
        traj.initial_sign() as f64
    } else {
        -traj.initial_sign() as f64
    };
    let mut cursor = a;
    let mut acc = 0.0;
    for &tj in &jumps[skipped..] {
        if tj >= b {
            break;
        }
        acc += sign * (tj - cursor);
        sign = -sign;
        cursor = tj;
    }
    acc + sign * (b - cursor)
}

fn oracle_batch(
    segments: &[ProcessSegment],
    params: &FluctuatorParams,
    t_noisy: f64,
    master_seed: u64,
    start: u64,
    end: u64,
) -> Result<(u64, Array2<C64>, Array2<f64>)> {
    let spectrum = sigma_h_spectrum();
    let mut sum: Array2<C64> = Array2::zeros((16, 16));
    let mut sum_sq: Array2<f64> = Array2::zeros((16, 16));
    for k in start..end {
        let traj = sample_trajectory_stream(params, t_noisy, master_seed, k)?;
        let mut m = Array2::eye(16);
        let mut clock = 0.0;
        for seg in segments {
            match &seg.kind {
                Kind::Noisy => {
                    let tau = signed_occupation(&traj, clock, clock + seg.duration);
                    clock += seg.duration;
                    let phase = params.j0() * seg.duration + params.alpha() * tau;
                    let l = spectrum.lift(|s| C64::from_polar(1.0, -s * phase));
                    m = l.matrix().dot(&m);
                }
                Kind::Gate(g) => m = g.matrix().dot(&m),
            }
        }
        sum += &m;
        sum_sq.zip_mut_with(&m, |a, b| *a += b.norm_sqr());
    }
    Ok((end - start, sum, sum_sq))
}

/// Monte Carlo oracle for a whole sequence: one continuous telegraph
/// trajectory spans the concatenated noisy time, gates apply in between
/// with the fluctuator frozen. Returns the averaged channel and the largest
/// element-wise standard error (from per-trajectory second moments).
///
/// Deterministic in `(segments, params, n, master_seed)`; trajectory `k`
/// always uses stream `k`, and batch sums reduce in index order.
pub fn sequence_mc_oracle(
    segments: &[ProcessSegment],
    params: &FluctuatorParams,
    n: u64,
    master_seed: u64,
) -> Result<(SuperOperator, f64)> {
    require_segments(segments)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            field: "n",
            requirement: ">= 1",
            value: 0.0,
        });
    }
    let t_noisy: f64 = noisy_durations(segments).iter().sum();
    if t_noisy == 0.0 {
        return Ok((raw_sequence(segments, params)?, 0.0));
    }
    const BATCH: u64 = 256;
    let bounds: Vec<(u64, u64)> = (0..n.div_ceil(BATCH))
        .map(|b| (b * BATCH, ((b + 1) * BATCH).min(n)))
        .collect();
    let run = |&(s, e): &(u64, u64)| oracle_batch(segments, params, t_noisy, master_seed, s, e);
    #[cfg(feature = "parallel")]
    let parts = bounds.par_iter().map(run).collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let parts = bounds.iter().map(run).collect::<Result<Vec<_>>>()?;

    let mut sum: Array2<C64> = Array2::zeros((16, 16));
    let mut sum_sq: Array2<f64> = Array2::zeros((16, 16));
    let mut count = 0;
    for (c, s, sq) in &parts {
        count += c;
        sum += s;
        sum_sq += sq;
    }
    debug_assert_eq!(count, n);
    let nf = n as f64;
    let mean = sum.mapv(|x| x / nf);
    let se_max = if n < 2 {
        0.0
    } else {
        let mut worst: f64 = 0.0;
        for (m, sq) in mean.iter().zip(&sum_sq) {
            let var = (sq / nf - m.norm_sqr()).max(0.0) * nf / (nf - 1.0);
            worst = worst.max((var / nf).sqrt());
        }
        worst
    };
    Ok((SuperOperator::from_matrix_unchecked(mean), se_max))
}
