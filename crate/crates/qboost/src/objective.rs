//! Loss functions and their per-sample gradient/hessian statistics.
//!
//! Everything here is a pure function of its arguments. Derivatives are taken
//! with respect to the current prediction `yhat`, which is the variable the
//! boosting step optimizes over; with the prediction error `t = y - yhat`
//! this flips the sign of d/dt once for the gradient and twice (i.e. not at
//! all) for the hessian.
//!
//! The smoothed quantile loss composes the pinball weights with the Huber
//! norm:
//!
//! ```text
//! rho(t) = (1 - tau) * h_upsilon(t)   for t < 0
//!          tau       * h_upsilon(t)   for t >= 0
//! ```
//!
//! which is convex, continuously differentiable, and has a nonnegative,
//! piecewise-constant second derivative — zero outside `|t| <= upsilon`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First and second derivative of a per-sample loss with respect to the
/// current prediction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GradHess {
    pub g: f64,
    pub h: f64,
}

/// Parameters of the Huber-smoothed quantile loss: the target quantile level
/// `tau` and the smoothing threshold `upsilon` (in target units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileHuberParams {
    pub tau: f64,
    pub upsilon: f64,
}

impl QuantileHuberParams {
    pub fn new(tau: f64, upsilon: f64) -> Result<Self> {
        let params = QuantileHuberParams { tau, upsilon };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_tau(self.tau)?;
        check_upsilon(self.upsilon)?;
        Ok(())
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::domain(
            "tau",
            format!("must lie strictly inside (0, 1), got {tau}"),
        ));
    }
    Ok(())
}

fn check_upsilon(upsilon: f64) -> Result<()> {
    if !(upsilon > 0.0 && upsilon.is_finite()) {
        return Err(Error::domain(
            "upsilon",
            format!("must be a positive real number, got {upsilon}"),
        ));
    }
    Ok(())
}

/// Pinball (check) loss of a prediction error `t = y - yhat` at quantile
/// level `tau`: `(tau - 1) * t` for `t < 0`, `tau * t` otherwise.
pub fn pinball_loss(t: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(if t < 0.0 { (tau - 1.0) * t } else { tau * t })
}

/// Huber norm: quadratic `t^2 / (2 upsilon)` inside `|t| <= upsilon`, linear
/// `|t| - upsilon / 2` outside. Continuously differentiable at the seam.
pub fn huber_norm(t: f64, upsilon: f64) -> Result<f64> {
    check_upsilon(upsilon)?;
    Ok(if t.abs() <= upsilon {
        t * t / (2.0 * upsilon)
    } else {
        t.abs() - upsilon / 2.0
    })
}

/// Huber-smoothed quantile loss of a prediction error `t`.
///
/// Coincides with the pinball loss up to a constant offset of
/// `tau * upsilon / 2` (resp. `(1 - tau) * upsilon / 2`) once `|t| > upsilon`.
pub fn quantile_huber_loss(t: f64, params: &QuantileHuberParams) -> f64 {
    debug_assert!(params.validate().is_ok());
    let weight = if t < 0.0 { 1.0 - params.tau } else { params.tau };
    let huber = if t.abs() <= params.upsilon {
        t * t / (2.0 * params.upsilon)
    } else {
        t.abs() - params.upsilon / 2.0
    };
    weight * huber
}

/// Gradient and hessian of the smoothed quantile loss with respect to `yhat`.
pub fn quantile_huber_grad_hess(y: f64, yhat: f64, params: &QuantileHuberParams) -> GradHess {
    debug_assert!(params.validate().is_ok());
    let tau = params.tau;
    let upsilon = params.upsilon;
    let t = y - yhat;
    if t < -upsilon {
        GradHess { g: 1.0 - tau, h: 0.0 }
    } else if t < 0.0 {
        GradHess {
            g: (tau - 1.0) * t / upsilon,
            h: (1.0 - tau) / upsilon,
        }
    } else if t <= upsilon {
        GradHess {
            g: -tau * t / upsilon,
            h: tau / upsilon,
        }
    } else {
        GradHess { g: -tau, h: 0.0 }
    }
}

/// Squared-error loss `(yhat - y)^2 / 2`, the scaling under which the
/// gradient is exactly the residual `yhat - y`.
pub fn squared_error_loss(y: f64, yhat: f64) -> f64 {
    let r = yhat - y;
    0.5 * r * r
}

/// Gradient and hessian of the squared-error loss: `g = yhat - y`, `h = 1`.
pub fn squared_error_grad_hess(y: f64, yhat: f64) -> GradHess {
    GradHess { g: yhat - y, h: 1.0 }
}

/// Empirical `tau`-quantile of a sample: the smallest order statistic whose
/// rank is at least `ceil(tau * n)`.
pub fn empirical_quantile(values: &[f64], tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if values.is_empty() {
        return Err(Error::Dataset("empirical quantile of an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = sorted.len();
    let rank = (tau * n as f64).ceil() as usize;
    let idx = rank.saturating_sub(1).min(n - 1);
    Ok(sorted[idx])
}

/// A per-sample (gradient, hessian) provider for the training loop.
///
/// Serialized into model files as `{name, tau, upsilon}` with the parameter
/// fields present only for the quantile objective.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Objective {
    SquaredError,
    QuantileHuber(QuantileHuberParams),
}

impl Objective {
    /// Convenience constructor that validates the parameters.
    pub fn quantile(tau: f64, upsilon: f64) -> Result<Self> {
        Ok(Objective::QuantileHuber(QuantileHuberParams::new(tau, upsilon)?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Objective::SquaredError => Ok(()),
            Objective::QuantileHuber(params) => params.validate(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Objective::SquaredError => "squared_error",
            Objective::QuantileHuber(_) => "quantile_huber",
        }
    }

    /// Per-sample loss value.
    pub fn loss(&self, y: f64, yhat: f64) -> f64 {
        match self {
            Objective::SquaredError => squared_error_loss(y, yhat),
            Objective::QuantileHuber(params) => quantile_huber_loss(y - yhat, params),
        }
    }

    /// Per-sample gradient and hessian with respect to `yhat`.
    pub fn grad_hess(&self, y: f64, yhat: f64) -> GradHess {
        match self {
            Objective::SquaredError => squared_error_grad_hess(y, yhat),
            Objective::QuantileHuber(params) => quantile_huber_grad_hess(y, yhat, params),
        }
    }

    /// Default initial prediction: the target mean for squared error, the
    /// empirical `tau`-quantile for the quantile objective. Centering the
    /// residuals this way keeps most samples out of the zero-hessian plateau
    /// of the smoothed quantile loss at the start of training.
    pub fn initial_score(&self, targets: &[f64]) -> Result<f64> {
        if targets.is_empty() {
            return Err(Error::Dataset("cannot derive a base score from zero targets".into()));
        }
        match self {
            Objective::SquaredError => {
                Ok(targets.iter().sum::<f64>() / targets.len() as f64)
            }
            Objective::QuantileHuber(params) => empirical_quantile(targets, params.tau),
        }
    }
}
