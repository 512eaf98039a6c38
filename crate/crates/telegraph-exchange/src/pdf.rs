//! Distributions of the time-averaged fluctuator state.
//!
//! Over a window `T` the telegraph process is summarized by
//! `xi = (t_plus - t_minus)/T in [-1, 1]`. Its law splits into two atoms at
//! `xi = ±1` (no-jump realizations, weight `exp(-lambda T)/2` each) and a
//! continuous part proportional to the jump-conditioned density `Omega_{>0}`.
//! Slow fluctuators (`lambda T << 1`) flatten the continuous part to the
//! uniform density `1/2`; fast ones (`lambda T >> 1`) concentrate it into a
//! Gaussian of variance `1/(lambda T)`.
//!
//! Everything is elementary except the Bessel-function core, which needs the
//! scaled variants from [`crate::bessel`] once `lambda T` exceeds a few
//! hundred. All densities are per unit `xi` (or per unit `tau` for the
//! occupation-time forms) and all atom weights are plain probabilities.

use serde::{Deserialize, Serialize};

use crate::bessel::{i1_over_x, i1e_over_x};
use crate::{Error, Result};

/// `sinh^2(y/2)` without cancellation for small `y`; overflows only past
/// `y ~ 1420` (callers branch to scaled forms well before that).
pub(crate) fn sinh_sq_half(y: f64) -> f64 {
    0.25 * y.exp_m1() * (-(-y).exp_m1())
}

/// Switch point between direct and exponentially-scaled Bessel evaluation.
const SCALED_BRANCH_Y: f64 = 30.0;

fn require_lambda_t(lambda_t: f64) -> Result<f64> {
    if !(lambda_t.is_finite() && lambda_t > 0.0) {
        return Err(Error::InvalidParameter {
            field: "lambda_t",
            requirement: "finite and > 0",
            value: lambda_t,
        });
    }
    Ok(lambda_t)
}

fn require_xi(xi: f64) -> Result<f64> {
    if !(xi.is_finite() && (-1.0..=1.0).contains(&xi)) {
        return Err(Error::InvalidParameter {
            field: "xi",
            requirement: "in [-1, 1]",
            value: xi,
        });
    }
    Ok(xi)
}

/// Poisson probability of exactly `k` jumps in a window with mean `lambda_t`.
pub fn poisson_weight(k: u32, lambda_t: f64) -> Result<f64> {
    if !(lambda_t.is_finite() && lambda_t >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "lambda_t",
            requirement: "finite and >= 0",
            value: lambda_t,
        });
    }
    let mut p = (-lambda_t).exp();
    for i in 1..=k {
        p *= lambda_t / i as f64;
    }
    Ok(p)
}

/// Probability of at least one jump, `1 - exp(-y)`, stable for small `y`.
pub fn prob_ge1(lambda_t: f64) -> f64 {
    -(-lambda_t).exp_m1()
}

/// Probability of at least two jumps, `1 - exp(-y)(1 + y)`, stable for
/// small `y` (the two `O(y)` terms cancel analytically before rounding).
pub fn prob_ge2(lambda_t: f64) -> f64 {
    (-(-lambda_t).exp_m1() - lambda_t * (-lambda_t).exp()).max(0.0)
}

/// Continuous part of the occupation-time density for the `+1` state over
/// `[0, T]`, given the fluctuator starts in `+1` and conditioned on at least
/// one jump. Normalized: it integrates to one over `tau in [0, T]`.
pub fn pdf_occupation(tau: f64, t: f64, lambda: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and > 0",
            value: t,
        });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter {
            field: "lambda",
            requirement: "finite and > 0",
            value: lambda,
        });
    }
    if !(tau.is_finite() && (0.0..=t).contains(&tau)) {
        return Err(Error::InvalidParameter {
            field: "tau",
            requirement: "in [0, t]",
            value: tau,
        });
    }
    let y = lambda * t;
    let z = 2.0 * lambda * (tau * (t - tau)).sqrt();
    if y <= SCALED_BRANCH_Y {
        Ok(lambda * lambda * tau * i1_over_x(z) / sinh_sq_half(y))
    } else {
        // 1/sinh^2(y/2) = 4 e^{-y}/(1-e^{-y})^2, folded into the scaled
        // Bessel factor; z - y = -lambda (sqrt(tau) - sqrt(t-tau))^2
        let expo = -lambda * (tau.sqrt() - (t - tau).sqrt()).powi(2);
        let denom = -(-y).exp_m1();
        Ok(4.0 * lambda * lambda * tau * i1e_over_x(z) * expo.exp() / (denom * denom))
    }
}

/// Symmetrized occupation density `[p(tau) + p(T - tau)]/2`, the form that
/// applies when the initial fluctuator state is equilibrated.
pub fn pdf_occupation_symmetrized(tau: f64, t: f64, lambda: f64) -> Result<f64> {
    Ok(0.5 * (pdf_occupation(tau, t, lambda)? + pdf_occupation(t - tau, t, lambda)?))
}

/// Density of `xi` conditioned on at least one jump; atom-free, even in
/// `xi`, and normalized over `[-1, 1]`. Finite at the endpoints.
pub fn omega_ge1(xi: f64, lambda_t: f64) -> Result<f64> {
    let y = require_lambda_t(lambda_t)?;
    let xi = require_xi(xi)?;
    // u = 1 - xi^2 without cancellation at the endpoints
    let u = (1.0 - xi) * (1.0 + xi);
    let z = y * u.sqrt();
    if y <= SCALED_BRANCH_Y {
        Ok(0.25 * y * y * i1_over_x(z) / sinh_sq_half(y))
    } else {
        let expo = -y * xi * xi / (1.0 + u.sqrt());
        let denom = -(-y).exp_m1();
        Ok(y * y * i1e_over_x(z) * expo.exp() / (denom * denom))
    }
}

/// Pointwise value of a mixed atomic/continuous density: the continuous
/// density at the evaluation point plus the weights of the two endpoint
/// atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityWithAtoms {
    pub density: f64,
    pub atom_weight_pos: f64,
    pub atom_weight_neg: f64,
}

/// Full (unconditioned) law of `xi`: atoms `exp(-y)/2` at `xi = ±1` plus the
/// continuous density `y^2 [I1(z)/z] / (e^y - 1)`.
pub fn omega_full(xi: f64, lambda_t: f64) -> Result<DensityWithAtoms> {
    let y = require_lambda_t(lambda_t)?;
    let xi = require_xi(xi)?;
    let u = (1.0 - xi) * (1.0 + xi);
    let z = y * u.sqrt();
    let density = if y <= SCALED_BRANCH_Y {
        y * y * i1_over_x(z) / y.exp_m1()
    } else {
        let expo = -y * xi * xi / (1.0 + u.sqrt());
        y * y * i1e_over_x(z) * expo.exp() / (-(-y).exp_m1())
    };
    let atom = 0.5 * (-y).exp();
    Ok(DensityWithAtoms {
        density,
        atom_weight_pos: atom,
        atom_weight_neg: atom,
    })
}

/// Slow-fluctuator limit of `omega_ge1`: uniform on `[-1, 1]`.
pub fn omega_slow(xi: f64) -> Result<f64> {
    require_xi(xi)?;
    Ok(0.5)
}

/// Fast-fluctuator limit of `omega_ge1`: centered Gaussian with variance
/// `1/(lambda T)`.
pub fn omega_fast(xi: f64, lambda_t: f64) -> Result<f64> {
    let y = require_lambda_t(lambda_t)?;
    require_xi(xi)?;
    Ok(gaussian_density(xi, y))
}

fn gaussian_density(xi: f64, y: f64) -> f64 {
    (y / std::f64::consts::TAU).sqrt() * (-0.5 * y * xi * xi).exp()
}

/// Composite approximation to the full law: exact atoms, exact single-jump
/// uniform component, and a Gaussian standing in for two-plus jumps.
pub fn omega_approx(xi: f64, lambda_t: f64) -> Result<DensityWithAtoms> {
    let y = require_lambda_t(lambda_t)?;
    let xi = require_xi(xi)?;
    let p1 = poisson_weight(1, y)?;
    let density = 0.5 * p1 + prob_ge2(y) * gaussian_density(xi, y);
    let atom = 0.5 * (-y).exp();
    Ok(DensityWithAtoms {
        density,
        atom_weight_pos: atom,
        atom_weight_neg: atom,
    })
}

/// Selector for the six distribution variants used by the quadrature and
/// reporting paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiKind {
    ExactFull,
    ExactGe1,
    DeltaPair,
    UniformSlow,
    GaussianFast,
    ApproxFull,
}

/// One of the `xi` laws bound to a fixed `lambda_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiDistribution {
    kind: XiKind,
    lambda_t: f64,
}

impl XiDistribution {
    pub fn new(kind: XiKind, lambda_t: f64) -> Result<Self> {
        require_lambda_t(lambda_t)?;
        Ok(Self { kind, lambda_t })
    }

    pub fn kind(&self) -> XiKind {
        self.kind
    }

    pub fn lambda_t(&self) -> f64 {
        self.lambda_t
    }

    /// Continuous density at `xi in [-1, 1]` (tails outside the physical
    /// interval are reachable only through [`Self::total_mass`]).
    pub fn density(&self, xi: f64) -> Result<f64> {
        require_xi(xi)?;
        Ok(self.density_extended(xi))
    }

    /// Continuous density on the full support, including Gaussian tails
    /// outside `[-1, 1]` where applicable (quadrature paths integrate over
    /// [`Self::support`]).
    pub(crate) fn density_extended(&self, xi: f64) -> f64 {
        let y = self.lambda_t;
        match self.kind {
            XiKind::ExactFull => {
                omega_full(xi.clamp(-1.0, 1.0), y)
                    .expect("validated")
                    .density
            }
            XiKind::ExactGe1 => omega_ge1(xi.clamp(-1.0, 1.0), y).expect("validated"),
            XiKind::DeltaPair => 0.0,
            XiKind::UniformSlow => {
                if xi.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            XiKind::GaussianFast => gaussian_density(xi, y),
            XiKind::ApproxFull => {
                let uniform = if xi.abs() <= 1.0 { 0.5 } else { 0.0 };
                poisson_weight(1, y).expect("validated") * uniform
                    + prob_ge2(y) * gaussian_density(xi, y)
            }
        }
    }

    /// Endpoint atoms as `[(xi, weight); 2]`; zero weights for the
    /// atom-free variants.
    pub fn atoms(&self) -> [(f64, f64); 2] {
        let w = match self.kind {
            XiKind::ExactFull | XiKind::ApproxFull => 0.5 * (-self.lambda_t).exp(),
            XiKind::DeltaPair => 0.5,
            XiKind::ExactGe1 | XiKind::UniformSlow | XiKind::GaussianFast => 0.0,
        };
        [(1.0, w), (-1.0, w)]
    }

    /// Integration domain of the continuous part. The Gaussian components
    /// are supported on the whole line; eight standard deviations carry all
    /// mass representable at double precision.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            XiKind::GaussianFast | XiKind::ApproxFull => {
                let l = (8.0 / self.lambda_t.sqrt()).max(1.0);
                (-l, l)
            }
            _ => (-1.0, 1.0),
        }
    }

    /// Atom weights plus adaptive quadrature of the continuous part over
    /// [`Self::support`], split at `±1` where the density may jump.
    pub fn total_mass(&self, abs_tol: f64) -> Result<f64> {
        let atom_mass: f64 = self.atoms().iter().map(|&(_, w)| w).sum();
        let (lo, hi) = self.support();
        let mut cuts = vec![lo];
        if lo < -1.0 {
            cuts.push(-1.0);
        }
        cuts.push(0.0);
        if hi > 1.0 {
            cuts.push(1.0);
        }
        cuts.push(hi);
        let mut continuous = 0.0;
        for pair in cuts.windows(2) {
            continuous +=
                crate::quad::integrate(|x| self.density_extended(x), pair[0], pair[1], abs_tol)?;
        }
        Ok(atom_mass + continuous)
    }
}
