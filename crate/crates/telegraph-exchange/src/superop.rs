//! Closed-form ensemble-averaged superoperators, per regime.
//!
//! Averaging the per-trajectory channel `exp(-i theta sigma_H)` over a `xi`
//! law turns each `sigma_H` eigenvalue `s` into a real scalar kernel
//! `k(s) = E[exp(-i alpha s t xi)]`; the commutant block (`s = 0`) always
//! maps to exactly one. With `x = alpha*s*t` and `y = lambda*t`:
//!
//! * `kernel_zero`: no jumps, `cos x`;
//! * `kernel_ge1`: at least one jump,
//!   `[cos sqrt(x^2-y^2) - cos x] / (2 sinh^2(y/2))`, analytically continued
//!   through `|x| = y`;
//! * `kernel_slow` / `kernel_fast`: the slow (`sinc x`) and fast
//!   (`exp(-x^2/2y)`) limits;
//! * `kernel_exact` / `kernel_approx`: Poisson mixtures of the above.
//!
//! The deterministic exchange rotation factors out as `q_unitary`, and the
//! fast limit exponentiates the Lindblad generator returned by
//! `lindblad_superoperator`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::pdf::{prob_ge1, prob_ge2, sinh_sq_half};
use crate::rtn::FluctuatorParams;
use crate::spin::{heisenberg_hamiltonian, kron, sigma_h_spectrum, SuperOperator};
use crate::{Error, Result, C64};

/// `cos(sqrt(z))` as an entire function of `z`: oscillatory for `z > 0`,
/// `cosh(sqrt(-z))` for `z < 0`, power series across the branch point.
/// Callers keep `sqrt(-z)` below ~700 to avoid overflow.
pub(crate) fn cos_sqrt(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        // cos(sqrt(z)) = 1 - z/2 + z^2/24 - z^3/720 + ...; truncation below
        // 1e-20 at this threshold
        1.0 + z * (-0.5 + z * (1.0 / 24.0 + z * (-1.0 / 720.0 + z / 40_320.0)))
    } else if z > 0.0 {
        z.sqrt().cos()
    } else {
        (-z).sqrt().cosh()
    }
}

/// No-jump kernel `cos x`.
pub fn kernel_zero(x: f64) -> f64 {
    x.cos()
}

/// Slow-fluctuator kernel `sin(x)/x`.
pub fn kernel_slow(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Fast-fluctuator kernel `exp(-x^2/(2y))`; requires `y > 0`.
pub fn kernel_fast(x: f64, y: f64) -> f64 {
    debug_assert!(y > 0.0);
    (-x * x / (2.0 * y)).exp()
}

/// Jump-conditioned kernel; requires `y > 0`. Real, even in `x`, equal to
/// one at `x = 0`, and approaching `kernel_slow` as `y -> 0`.
pub fn kernel_ge1(x: f64, y: f64) -> f64 {
    debug_assert!(y > 0.0);
    if x == 0.0 {
        return 1.0;
    }
    if y < 1e-6 {
        // the y -> 0 limit is sinc; the O(y^2) correction is below 1e-12
        // while the direct quotient has already lost all precision
        return kernel_slow(x);
    }
    // difference of squares avoids cancellation when |x| is near y
    let d = (x - y) * (x + y);
    if y <= 30.0 {
        (cos_sqrt(d) - x.cos()) / (2.0 * sinh_sq_half(y))
    } else {
        // 1/(2 sinh^2(y/2)) = 2 e^{-y} / (1 - e^{-y})^2, distributed so no
        // intermediate overflows
        let denom = -(-y).exp_m1();
        let denom2 = denom * denom;
        if d >= 0.0 {
            (cos_sqrt(d) - x.cos()) * 2.0 * (-y).exp() / denom2
        } else {
            let w = (-d).sqrt();
            // e^{w-y} with w - y = -x^2/(w + y), exact where e^w overflows
            let lead = (-x * x / (w + y)).exp();
            (lead * (1.0 + (-2.0 * w).exp()) - 2.0 * x.cos() * (-y).exp()) / denom2
        }
    }
}

/// Exact ensemble kernel: Poisson-zero weight on `cos` plus the rest on the
/// jump-conditioned kernel. Requires `y > 0`.
pub fn kernel_exact(x: f64, y: f64) -> f64 {
    (-y).exp() * kernel_zero(x) + prob_ge1(y) * kernel_ge1(x, y)
}

/// Composite approximation: exact zero- and one-jump terms, Gaussian for
/// two-plus jumps. Requires `y > 0`.
pub fn kernel_approx(x: f64, y: f64) -> f64 {
    let p0 = (-y).exp();
    p0 * kernel_zero(x) + p0 * y * kernel_slow(x) + prob_ge2(y) * kernel_fast(x, y)
}

fn require_finite(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            field,
            requirement: "finite",
            value,
        })
    }
}

fn require_time(t: f64) -> Result<f64> {
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and >= 0",
            value: t,
        })
    }
}

fn require_alpha(alpha: f64) -> Result<f64> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(alpha)
    } else {
        Err(Error::InvalidParameter {
            field: "alpha",
            requirement: "finite and >= 0",
            value: alpha,
        })
    }
}

fn require_lambda(lambda: f64) -> Result<f64> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::InvalidParameter {
            field: "lambda",
            requirement: "finite and > 0",
            value: lambda,
        })
    }
}

/// Lift a real even kernel `k(x)` with `x = alpha*s*t` to a superoperator;
/// the `s = 0` block is pinned to exactly one.
fn lift_real_kernel<F: Fn(f64) -> f64>(alpha: f64, t: f64, k: F) -> SuperOperator {
    sigma_h_spectrum().lift(|s| {
        if s == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(k(alpha * s * t), 0.0)
        }
    })
}

/// Deterministic exchange rotation `exp(-i j0 sigma_H t)` as a superoperator.
pub fn q_unitary(j0: f64, t: f64) -> Result<SuperOperator> {
    require_finite("j0", j0)?;
    require_time(t)?;
    Ok(sigma_h_spectrum().lift(|s| C64::from_polar(1.0, -j0 * s * t)))
}

/// Non-unitary factor conditioned on zero jumps.
pub fn qnu_zero(alpha: f64, t: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_time(t)?;
    Ok(lift_real_kernel(alpha, t, kernel_zero))
}

/// Non-unitary factor conditioned on at least one jump; requires `t > 0`.
pub fn qnu_ge1(alpha: f64, lambda: f64, t: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_lambda(lambda)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter {
            field: "t",
            requirement: "finite and > 0",
            value: t,
        });
    }
    let y = lambda * t;
    Ok(lift_real_kernel(alpha, t, |x| kernel_ge1(x, y)))
}

/// Slow-fluctuator non-unitary factor.
pub fn qnu_slow(alpha: f64, t: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_time(t)?;
    Ok(lift_real_kernel(alpha, t, kernel_slow))
}

/// Fast-fluctuator non-unitary factor (a dissipative semigroup in `t`).
pub fn qnu_fast(alpha: f64, lambda: f64, t: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_lambda(lambda)?;
    require_time(t)?;
    if t == 0.0 {
        return Ok(SuperOperator::identity());
    }
    let y = lambda * t;
    Ok(lift_real_kernel(alpha, t, |x| kernel_fast(x, y)))
}

/// Exact ensemble-averaged non-unitary factor.
pub fn qnu_exact(alpha: f64, lambda: f64, t: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_lambda(lambda)?;
    require_time(t)?;
    if t == 0.0 {
        return Ok(SuperOperator::identity());
    }
    let y = lambda * t;
    Ok(lift_real_kernel(alpha, t, |x| kernel_exact(x, y)))
}

/// Composite-approximation non-unitary factor.
pub fn qnu_approx(alpha: f64, lambda: f64, t: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_lambda(lambda)?;
    require_time(t)?;
    if t == 0.0 {
        return Ok(SuperOperator::identity());
    }
    let y = lambda * t;
    Ok(lift_real_kernel(alpha, t, |x| kernel_approx(x, y)))
}

/// Which closed form to use for the non-unitary factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Exact,
    Approx,
}

/// Full averaged channel `q_unitary * qnu_*`; the factors commute.
pub fn q_full(params: &FluctuatorParams, t: f64, form: Form) -> Result<SuperOperator> {
    let nu = match form {
        Form::Exact => qnu_exact(params.alpha(), params.lambda(), t)?,
        Form::Approx => qnu_approx(params.alpha(), params.lambda(), t)?,
    };
    Ok(&q_unitary(params.j0(), t)? * &nu)
}

/// Lindblad generator of the fast-fluctuator semigroup, assembled from the
/// dissipator `L rho L - (L^2 rho + rho L^2)/2` with `L = alpha/sqrt(lambda)`
/// times the exchange Hamiltonian.
pub fn lindblad_superoperator(alpha: f64, lambda: f64) -> Result<SuperOperator> {
    require_alpha(alpha)?;
    require_lambda(lambda)?;
    let h = heisenberg_hamiltonian();
    let h2 = h.dot(&h);
    let eye: Array2<C64> = Array2::eye(4);
    let mut d = kron(&h, &h);
    let anchor = kron(&h2, &eye) + kron(&eye, &h2);
    d.zip_mut_with(&anchor, |a, b| *a -= 0.5 * b);
    let rate = alpha * alpha / lambda;
    SuperOperator::from_matrix(d.mapv(|c| c * rate))
}

/// Scalar kernel value at eigenvalue `s = +4`, the single number that
/// summarizes any superoperator diagonal in the `sigma_H` eigenbasis:
/// `tr(P_+ M) / 3`.
pub fn q_nu(sop: &SuperOperator) -> C64 {
    let p_plus = &sigma_h_spectrum().projectors[2];
    let product = p_plus.dot(sop.matrix());
    let trace: C64 = (0..16).map(|i| product[(i, i)]).sum();
    trace / 3.0
}
