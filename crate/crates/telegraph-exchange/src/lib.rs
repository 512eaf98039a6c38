//! Superoperator model of two exchange-coupled spins driven by random-telegraph
//! charge noise.
//!
//! A single charge fluctuator toggles the exchange coupling between `J0 + alpha`
//! and `J0 - alpha` at Poisson rate `lambda`. Because the Heisenberg interaction
//! commutes with itself at all times, every noise history acts through one
//! scalar — the mean fluctuator state `xi` — and the ensemble-averaged channel
//! has a closed form. This crate provides:
//!
//! * the 16×16 superoperator algebra over row-major vectorized density matrices
//!   and the spectral decomposition of the Heisenberg superoperator ([`spin`]),
//! * telegraph-trajectory sampling and per-trajectory channels ([`rtn`]),
//! * exact and limiting-regime distributions of `xi` ([`pdf`]),
//! * the closed-form non-unitary superoperators for every regime, plus the
//!   Lindblad generator they reduce to in the fast limit ([`superop`]),
//! * Monte Carlo and quadrature oracles for cross-validation ([`ensemble`]),
//! * multi-fluctuator products and spectral-distribution composition
//!   ([`compose`]),
//! * gate sequences with zeroth-order cross-term removal ([`sequence`]).
//!
//! All quantities use `hbar = 1`; `j0`, `alpha` and `lambda` carry inverse-time
//! units and enter results only through the dimensionless products `alpha*t`
//! and `lambda*t` (the evolution time doubles as the observation window).
//!
//! With the default `parallel` feature the ensemble averager fans trajectories
//! out over a rayon pool; results are bit-identical to the sequential fallback
//! because batches are reduced in a fixed order.

pub mod bessel;
pub mod compose;
pub mod ensemble;
mod error;
pub mod pdf;
pub mod quad;
pub mod rtn;
pub mod sequence;
pub mod spin;
pub mod superop;

pub use error::Error;

/// Shorthand used throughout for double-precision complex numbers.
pub type C64 = num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;
