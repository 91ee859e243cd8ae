//! Information-theoretic error floor for exact support recovery.
//!
//! Over the hard subclass (one target row with `k` parents of weight
//! `theta_minus`, all other rows empty) the divergence from the empty model
//! after observing `[0, T]` is at most
//!
//! ```text
//! KL <= C_init + (theta_minus^2 / mu_bar_star) C_path T
//! ```
//!
//! and Fano's inequality over the `C(d-1, k)` hypotheses turns this into a
//! floor on the worst-case misidentification probability.
//!
//! `C_init` (the divergence between the initial stationary laws) is finite
//! but has no closed form; callers supply an upper bound. The default of 0
//! yields an optimistic floor, i.e. one that may overstate the true bound.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::moments::c_path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FanoInputs {
    pub d: usize,
    pub k: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub beta: f64,
    pub mu_bar: f64,
    pub mu_bar_star: f64,
    pub theta_minus: f64,
    #[serde(default)]
    pub c_init: f64,
}

impl FanoInputs {
    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.d < self.k + 2 {
            return bad(format!(
                "need d >= k + 2, got d = {}, k = {}",
                self.d, self.k
            ));
        }
        if !(self.beta > 0.0
            && self.mu_bar > 0.0
            && self.mu_bar_star > 0.0
            && self.theta_minus > 0.0)
        {
            return bad("beta, mu_bar, mu_bar_star and theta_minus must be positive".into());
        }
        if !(self.k as f64 * self.theta_minus / self.beta < 1.0) {
            return bad(format!(
                "subclass is not subcritical: k theta_minus / beta = {}",
                self.k as f64 * self.theta_minus / self.beta
            ));
        }
        if !(self.c_init >= 0.0 && self.c_init.is_finite()) {
            return bad(format!(
                "C_init bound = {} must be finite and non-negative",
                self.c_init
            ));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("T = {} must be finite and non-negative", self.t));
        }
        Ok(())
    }

    pub fn with_t(self, t: f64) -> Self {
        Self { t, ..self }
    }

    /// True when `C_init` is taken as 0, so the floor is optimistic.
    pub fn is_optimistic(&self) -> bool {
        self.c_init == 0.0
    }

    /// Divergence accumulated per unit observation time.
    pub fn kl_rate(&self) -> f64 {
        self.theta_minus * self.theta_minus / self.mu_bar_star
            * c_path(self.k, self.mu_bar, self.beta)
    }
}

/// `ln C(n, k)` through log-gamma.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n, "ln_binomial needs k <= n");
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// `C_init + (theta_minus^2 / mu_bar_star) C_path T`.
pub fn kl_budget(inputs: &FanoInputs) -> Result<f64> {
    inputs.check()?;
    Ok(inputs.c_init + inputs.kl_rate() * inputs.t)
}

/// `max(0, 1 - (KL budget + ln 2) / ln C(d - 1, k))`.
pub fn fano_error_floor(inputs: &FanoInputs) -> Result<f64> {
    let budget = kl_budget(inputs)?;
    let log_m = ln_binomial(inputs.d - 1, inputs.k);
    Ok((1.0 - (budget + std::f64::consts::LN_2) / log_m).clamp(0.0, 1.0))
}

/// Observation time at which the floor equals `target`, by inverting the
/// floor in closed form. `inputs.t` is ignored.
pub fn critical_time(inputs: &FanoInputs, target: f64) -> Result<f64> {
    let at_zero = inputs.with_t(0.0);
    let floor0 = fano_error_floor(&at_zero)?;
    if !(target > 0.0 && target < floor0) {
        return Err(Error::InvalidParameter(format!(
            "target error {target} must lie in (0, {floor0}), the floor at T = 0"
        )));
    }
    let log_m = ln_binomial(inputs.d - 1, inputs.k);
    Ok(((1.0 - target) * log_m - inputs.c_init - std::f64::consts::LN_2) / inputs.kl_rate())
}

/// Floor evaluated on `steps` equally spaced times from `t0` to `t1`.
pub fn fano_curve(inputs: &FanoInputs, t0: f64, t1: f64, steps: usize) -> Result<Vec<(f64, f64)>> {
    if steps < 2 || !(t0 >= 0.0 && t1 > t0) {
        return Err(Error::InvalidParameter(format!(
            "curve needs 0 <= T0 < T1 and at least 2 steps, got {t0}:{t1}:{steps}"
        )));
    }
    (0..steps)
        .map(|s| {
            let t = t0 + (t1 - t0) * s as f64 / (steps - 1) as f64;
            Ok((t, fano_error_floor(&inputs.with_t(t))?))
        })
        .collect()
}
