//! Channels driven by many fluctuators at once.
//!
//! Independent fluctuators multiply: each `sigma_H` eigenvalue picks up the
//! product of the individual scalar kernels, with the deterministic `j0`
//! rotation appearing exactly once. An ensemble of `N` fluctuators whose
//! `(alpha, lambda)` pairs follow a normalized spectral distribution
//! exponentiates the averaged log-kernel,
//! `k_total(s) = exp(N * E[ln k(alpha*s*t, lambda*t)])`,
//! which is well-defined only while every contributing kernel stays
//! positive; a non-positive kernel is reported as a structured error rather
//! than silently producing `NaN`.

use serde::{Deserialize, Serialize};

use crate::quad::integrate;
use crate::rtn::FluctuatorParams;
use crate::spin::{sigma_h_spectrum, SuperOperator};
use crate::superop::{kernel_exact, q_unitary, qnu_exact};
use crate::{Error, Result, C64};

/// One atom of a discrete spectral distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscreteComponent {
    pub alpha: f64,
    pub lambda: f64,
    pub weight: f64,
}

/// Shape of the `(alpha, lambda)` law of a fluctuator ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum SpectralKind {
    /// Finitely many types with probability weights summing to one.
    Discrete { components: Vec<DiscreteComponent> },
    /// Fixed coupling, switching rate uniform on `[lambda_min, lambda_max]`.
    UniformLambda {
        alpha: f64,
        lambda_min: f64,
        lambda_max: f64,
    },
    /// Fixed coupling, switching rate log-uniform on the same interval
    /// (the classic `1/lambda` ensemble behind `1/f`-type spectra).
    LogUniformLambda {
        alpha: f64,
        lambda_min: f64,
        lambda_max: f64,
    },
}

const WEIGHT_TOL: f64 = 1e-10;

/// A normalized spectral distribution together with the ensemble size `N`
/// (real-valued; it only ever multiplies the averaged log-kernel).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDistribution {
    kind: SpectralKind,
    n_fluctuators: f64,
}

fn check_alpha_lambda(alpha: f64, lambda: f64) -> Result<()> {
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
    Ok(())
}

impl SpectralDistribution {
    pub fn new(kind: SpectralKind, n_fluctuators: f64) -> Result<Self> {
        if !(n_fluctuators.is_finite() && n_fluctuators >= 0.0) {
            return Err(Error::InvalidParameter {
                field: "n_fluctuators",
                requirement: "finite and >= 0",
                value: n_fluctuators,
            });
        }
        match &kind {
            SpectralKind::Discrete { components } => {
                if components.is_empty() {
                    return Err(Error::InvalidParameter {
                        field: "components",
                        requirement: "at least one",
                        value: 0.0,
                    });
                }
                let mut total = 0.0;
                for c in components {
                    check_alpha_lambda(c.alpha, c.lambda)?;
                    if !(c.weight.is_finite() && c.weight >= 0.0) {
                        return Err(Error::InvalidParameter {
                            field: "weight",
                            requirement: "finite and >= 0",
                            value: c.weight,
                        });
                    }
                    total += c.weight;
                }
                if (total - 1.0).abs() > WEIGHT_TOL {
                    return Err(Error::NotNormalized {
                        total,
                        tolerance: WEIGHT_TOL,
                    });
                }
            }
            SpectralKind::UniformLambda {
                alpha,
                lambda_min,
                lambda_max,
            }
            | SpectralKind::LogUniformLambda {
                alpha,
                lambda_min,
                lambda_max,
            } => {
                check_alpha_lambda(*alpha, *lambda_min)?;
                if !(lambda_max.is_finite() && lambda_max > lambda_min) {
                    return Err(Error::InvalidParameter {
                        field: "lambda_max",
                        requirement: "finite and > lambda_min",
                        value: *lambda_max,
                    });
                }
            }
        }
        Ok(Self {
            kind,
            n_fluctuators,
        })
    }

    /// Single fluctuator type: all mass at one `(alpha, lambda)`.
    pub fn point_mass(alpha: f64, lambda: f64, n_fluctuators: f64) -> Result<Self> {
        Self::new(
            SpectralKind::Discrete {
                components: vec![DiscreteComponent {
                    alpha,
                    lambda,
                    weight: 1.0,
                }],
            },
            n_fluctuators,
        )
    }

    pub fn kind(&self) -> &SpectralKind {
        &self.kind
    }

    pub fn n_fluctuators(&self) -> f64 {
        self.n_fluctuators
    }
}

/// Channel of finitely many simultaneous fluctuators sharing one `j0`:
/// `q_unitary(j0, t)` times the product of the individual exact non-unitary
/// factors. Differing `j0` values are rejected (the deterministic exchange
/// appears once in the model, not per fluctuator).
pub fn product_fluctuators(fluctuators: &[FluctuatorParams], t: f64) -> Result<SuperOperator> {
    let Some(first) = fluctuators.first() else {
        return Err(Error::InvalidParameter {
            field: "fluctuators",
            requirement: "at least one",
            value: 0.0,
        });
    };
    for f in fluctuators {
        if f.j0() != first.j0() {
            return Err(Error::Invalid(format!(
                "all fluctuators must share one j0 (found {} and {})",
                first.j0(),
                f.j0(),
            )));
        }
    }
    let mut acc = q_unitary(first.j0(), t)?;
    for f in fluctuators {
        acc = &acc * &qnu_exact(f.alpha(), f.lambda(), t)?;
    }
    Ok(acc)
}

fn positive_kernel(x: f64, y: f64) -> Result<f64> {
    let k = kernel_exact(x, y);
    if k <= 0.0 {
        return Err(Error::NonPositiveKernel {
            eigenvalue: 4.0,
            value: k,
            alpha_t: x / 4.0,
            lambda_t: y,
        });
    }
    Ok(k)
}

/// Non-unitary factor of `N` fluctuators drawn from a discrete spectral
/// distribution: per eigenvalue, `prod_i k_i^(N w_i)`.
pub fn weighted_product(spectral: &SpectralDistribution, t: f64) -> Result<SuperOperator> {
    let SpectralKind::Discrete { components } = &spectral.kind else {
        return Err(Error::Invalid(
            "weighted_product requires a discrete spectral distribution".into(),
        ));
    };
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and >= 0",
            value: t,
        });
    }
    if t == 0.0 {
        return Ok(SuperOperator::identity());
    }
    let n = spectral.n_fluctuators;
    let mut k_total = 1.0;
    for c in components {
        let k = positive_kernel(4.0 * c.alpha * t, c.lambda * t)?;
        k_total *= k.powf(n * c.weight);
    }
    Ok(sigma_h_spectrum().lift(|s| {
        if s == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(k_total, 0.0)
        }
    }))
}

/// Full channel of `N` fluctuators under any spectral distribution:
/// `q_unitary(j0, t)` times the exponentiated average log-kernel. For the
/// continuous families the average is a one-dimensional adaptive quadrature
/// in `lambda` (tolerance `1e-8`), preceded by a positivity scan of the
/// integrand over the support.
pub fn spectral_compose(spectral: &SpectralDistribution, j0: f64, t: f64) -> Result<SuperOperator> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and >= 0",
            value: t,
        });
    }
    if t == 0.0 {
        return Ok(SuperOperator::identity());
    }
    let rotation = q_unitary(j0, t)?;
    let nu = match &spectral.kind {
        SpectralKind::Discrete { .. } => weighted_product(spectral, t)?,
        SpectralKind::UniformLambda {
            alpha,
            lambda_min,
            lambda_max,
        } => {
            let x = 4.0 * alpha * t;
            // positivity over the support: the kernel is monotone in
            // neither argument, so scan a grid plus the endpoints
            for i in 0..=64 {
                let lambda = lambda_min + (lambda_max - lambda_min) * i as f64 / 64.0;
                positive_kernel(x, lambda * t)?;
            }
            let width = lambda_max - lambda_min;
            let mean_log = integrate(
                |lambda| kernel_exact(x, lambda * t).ln(),
                *lambda_min,
                *lambda_max,
                1e-8 * width,
            )? / width;
            lift_log_kernel(spectral.n_fluctuators * mean_log)
        }
        SpectralKind::LogUniformLambda {
            alpha,
            lambda_min,
            lambda_max,
        } => {
            let x = 4.0 * alpha * t;
            let (v_min, v_max) = (lambda_min.ln(), lambda_max.ln());
            for i in 0..=64 {
                let v = v_min + (v_max - v_min) * i as f64 / 64.0;
                positive_kernel(x, v.exp() * t)?;
            }
            let width = v_max - v_min;
            let mean_log = integrate(
                |v| kernel_exact(x, v.exp() * t).ln(),
                v_min,
                v_max,
                1e-8 * width,
            )? / width;
            lift_log_kernel(spectral.n_fluctuators * mean_log)
        }
    };
    Ok(&rotation * &nu)
}

fn lift_log_kernel(log_k: f64) -> SuperOperator {
    let k = log_k.exp();
    sigma_h_spectrum().lift(|s| {
        if s == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(k, 0.0)
        }
    })
}
