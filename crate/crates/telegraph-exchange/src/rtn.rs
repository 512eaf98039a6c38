//! Random-telegraph-noise trajectories of a single charge fluctuator.
//!
//! A fluctuator switches between states `eta = +1` and `eta = -1` with
//! symmetric rate `lambda`, so jump gaps are Exp(lambda) and the jump count
//! over a window is Poisson. A trajectory is stored sparsely as the initial
//! sign plus the ordered jump times; everything downstream (occupation
//! fraction, accumulated exchange phase) is exact in the jump times.
//!
//! Sampling is deterministic given a seed. `sample_trajectory_stream` binds
//! trajectory `k` of an ensemble to stream `k` of a counter-based generator,
//! which is what makes parallel ensemble averages independent of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::spin::{apply_scalar_kernel, sigma_h_spectrum, SuperOperator};
use crate::{Error, Result, C64};

/// Exchange-coupling and switching-rate parameters of one fluctuator.
///
/// The instantaneous exchange is `J(t) = j0 + alpha * eta(t)` with
/// `eta = ±1`, and `lambda` is the telegraph switching rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuatorParams {
    j0: f64,
    alpha: f64,
    lambda: f64,
}

impl FluctuatorParams {
    /// Validates: `j0` finite, `alpha ≥ 0` finite, `lambda > 0` finite.
    pub fn new(j0: f64, alpha: f64, lambda: f64) -> Result<Self> {
        if !j0.is_finite() {
            return Err(Error::InvalidParameter {
                field: "j0",
                requirement: "finite",
                value: j0,
            });
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "alpha",
                requirement: "finite and >= 0",
                value: alpha,
            });
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter {
                field: "lambda",
                requirement: "finite and > 0",
                value: lambda,
            });
        }
        Ok(Self { j0, alpha, lambda })
    }

    pub fn j0(&self) -> f64 {
        self.j0
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// One realization of the telegraph process over `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RtnTrajectory {
    duration: f64,
    initial_sign: i8,
    jump_times: Vec<f64>,
}

impl RtnTrajectory {
    /// Builds a trajectory from explicit data. Jump times must be strictly
    /// increasing and lie inside `(0, duration)`.
    pub fn new(duration: f64, initial_sign: i8, jump_times: Vec<f64>) -> Result<Self> {
        if !(duration.is_finite() && duration > 0.0) {
            return Err(Error::InvalidParameter {
                field: "duration",
                requirement: "finite and > 0",
                value: duration,
            });
        }
        if initial_sign != 1 && initial_sign != -1 {
            return Err(Error::InvalidParameter {
                field: "initial_sign",
                requirement: "+1 or -1",
                value: initial_sign as f64,
            });
        }
        let mut prev = 0.0;
        for &tj in &jump_times {
            if !(tj > prev && tj < duration) {
                return Err(Error::InvalidParameter {
                    field: "jump_times",
                    requirement: "strictly increasing within (0, duration)",
                    value: tj,
                });
            }
            prev = tj;
        }
        Ok(Self {
            duration,
            initial_sign,
            jump_times,
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn initial_sign(&self) -> i8 {
        self.initial_sign
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.jump_times
    }

    pub fn jump_count(&self) -> usize {
        self.jump_times.len()
    }
}

/// Samples a trajectory: one fair coin for the initial sign, then Exp(lambda)
/// gaps until the window is exhausted. The draw order (sign first, then gaps)
/// is part of the reproducibility contract.
pub fn sample_trajectory(
    params: &FluctuatorParams,
    duration: f64,
    seed: u64,
) -> Result<RtnTrajectory> {
    sample_trajectory_stream(params, duration, seed, 0)
}

/// Ensemble variant: trajectory `stream` under a shared `master_seed` gets
/// its own independent random stream, so any subset of an ensemble can be
/// regenerated without sampling the rest.
pub fn sample_trajectory_stream(
    params: &FluctuatorParams,
    duration: f64,
    master_seed: u64,
    stream: u64,
) -> Result<RtnTrajectory> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter {
            field: "duration",
            requirement: "finite and > 0",
            value: duration,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    let initial_sign = if rng.random::<bool>() { 1 } else { -1 };
    let mut jump_times = Vec::new();
    let mut t = 0.0;
    loop {
        let u = loop {
            let u = rng.random::<f64>();
            if u > 0.0 {
                break u;
            }
        };
        t -= u.ln() / params.lambda;
        if t >= duration {
            break;
        }
        jump_times.push(t);
    }
    Ok(RtnTrajectory {
        duration,
        initial_sign,
        jump_times,
    })
}

/// Fluctuator state at time `t`, right-continuous: at a jump time the state
/// has already flipped.
pub fn eta_at(trajectory: &RtnTrajectory, t: f64) -> Result<i8> {
    if !(t >= 0.0 && t <= trajectory.duration) {
        return Err(Error::OutsideWindow {
            t,
            duration: trajectory.duration,
        });
    }
    let flips = trajectory.jump_times.partition_point(|&tj| tj <= t);
    Ok(if flips % 2 == 0 {
        trajectory.initial_sign
    } else {
        -trajectory.initial_sign
    })
}

/// Time-averaged fluctuator state `xi = (t_plus - t_minus) / duration`,
/// computed exactly from the jump times. Always in `[-1, 1]`; exactly `±1`
/// for jump-free trajectories.
pub fn mean_state_xi(trajectory: &RtnTrajectory) -> f64 {
    let mut signed = 0.0;
    let mut sign = trajectory.initial_sign as f64;
    let mut prev = 0.0;
    for &tj in &trajectory.jump_times {
        signed += sign * (tj - prev);
        sign = -sign;
        prev = tj;
    }
    signed += sign * (trajectory.duration - prev);
    signed / trajectory.duration
}

/// Superoperator of the unitary generated by this realization.
///
/// The exchange Hamiltonian commutes with itself at all times, so only the
/// accumulated phase `theta = (j0 + alpha * xi) * duration` matters and the
/// result is `exp(-i * theta * sigma_H)`, assembled spectrally.
pub fn trajectory_superoperator(
    params: &FluctuatorParams,
    trajectory: &RtnTrajectory,
) -> SuperOperator {
    let xi = mean_state_xi(trajectory);
    let theta = (params.j0 + params.alpha * xi) * trajectory.duration;
    apply_scalar_kernel(|s| C64::new(0.0, -s * theta).exp(), sigma_h_spectrum())
}
