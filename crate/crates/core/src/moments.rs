//! Stationary moments of the shot-noise state `X(0)`, used as ground truth.
//!
//! The mean solves `(beta I - Theta) m = mu`; the covariance solves the
//! entrywise Lyapunov equation
//!
//! ```text
//! 2 beta Sigma_jl = sum_r theta_jr Sigma_rl + sum_r theta_lr Sigma_jr + lambda_bar_j 1{j = l}
//! ```
//!
//! Both are computed by fixed-point iteration, which contracts at rate
//! `gamma` for subcritical models.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{HawkesParams, TrueSupport};

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StationaryMoments {
    /// `E[X(0)]`.
    pub m: Vec<f64>,
    /// `E[lambda(0)] = beta m`.
    pub lambda_bar: Vec<f64>,
    /// Dense `Cov(X(0))`, row-major `d x d`.
    pub sigma: Vec<Vec<f64>>,
}

impl StationaryMoments {
    pub fn compute(params: &HawkesParams) -> Result<Self> {
        let m = stationary_mean(params)?;
        let sigma = stationary_covariance(params, &m)?;
        let lambda_bar = m.iter().map(|x| params.beta * x).collect();
        Ok(Self {
            m,
            lambda_bar,
            sigma,
        })
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Neumann series `m = (1/beta) sum_l (Theta/beta)^l mu`, truncated once the
/// sup-norm of the added term drops below [`FIXED_POINT_TOL`].
pub fn stationary_mean(params: &HawkesParams) -> Result<Vec<f64>> {
    let beta = params.beta;
    let mut term: Vec<f64> = params.mu.iter().map(|x| x / beta).collect();
    let mut m = term.clone();
    for _ in 0..FIXED_POINT_MAX_ITER {
        if sup_norm(&term) < FIXED_POINT_TOL {
            return Ok(m);
        }
        term = params.theta.mul_vec(&term);
        for (t, mi) in term.iter_mut().zip(m.iter_mut()) {
            *t /= beta;
            *mi += *t;
        }
    }
    Err(Error::NoConvergence {
        what: "stationary mean",
        iterations: FIXED_POINT_MAX_ITER,
        increment: sup_norm(&term),
    })
}

/// Iterates `Sigma <- (Theta Sigma + Sigma Theta^T + diag(beta m)) / (2 beta)`
/// from zero until the sup-norm increment is below [`FIXED_POINT_TOL`].
pub fn stationary_covariance(params: &HawkesParams, m: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = params.d();
    if m.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: m.len(),
        });
    }
    let beta = params.beta;
    let mut sigma = vec![vec![0.0; d]; d];
    let mut next = vec![vec![0.0; d]; d];
    let mut increment = f64::INFINITY;
    for _ in 0..FIXED_POINT_MAX_ITER {
        // A = Theta Sigma, then next = (A + A^T + diag(beta m)) / (2 beta).
        for (j, row) in params.theta.rows().iter().enumerate() {
            let out = &mut next[j];
            out.iter_mut().for_each(|x| *x = 0.0);
            for &(r, w) in row {
                for (o, s) in out.iter_mut().zip(&sigma[r]) {
                    *o += w * s;
                }
            }
        }
        increment = 0.0;
        for j in 0..d {
            for l in j..d {
                let mut v = next[j][l] + next[l][j];
                if j == l {
                    v += beta * m[j];
                }
                v /= 2.0 * beta;
                increment = f64::max(increment, (v - sigma[j][l]).abs());
                sigma[j][l] = v;
                sigma[l][j] = v;
            }
        }
        if increment < FIXED_POINT_TOL {
            return Ok(sigma);
        }
    }
    Err(Error::NoConvergence {
        what: "stationary covariance",
        iterations: FIXED_POINT_MAX_ITER,
        increment,
    })
}

/// Largest entrywise residual of the Lyapunov equation.
pub fn lyapunov_residual(params: &HawkesParams, lambda_bar: &[f64], sigma: &[Vec<f64>]) -> f64 {
    let d = params.d();
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for l in 0..d {
            let a: f64 = params
                .theta
                .row(j)
                .iter()
                .map(|&(r, w)| w * sigma[r][l])
                .sum();
            let b: f64 = params
                .theta
                .row(l)
                .iter()
                .map(|&(r, w)| w * sigma[j][r])
                .sum();
            let diag = if j == l { lambda_bar[j] } else { 0.0 };
            worst = worst.max((2.0 * params.beta * sigma[j][l] - a - b - diag).abs());
        }
    }
    worst
}

/// `G_ij = Cov(X_j(0), lambda_i(0)) = sum_{l in S_i} theta_il Sigma_jl`.
pub fn population_screening_scores(params: &HawkesParams, sigma: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = params.d();
    params
        .theta
        .rows()
        .iter()
        .map(|row| {
            (0..d)
                .map(|j| row.iter().map(|&(l, w)| w * sigma[j][l]).sum())
                .collect()
        })
        .collect()
}

/// Per-row gap `min_{j in S_i} G_ij - max_{j not in S_i} G_ij`.
///
/// `None` for rows without parents. When every node is a parent the gap is
/// the smallest parent score.
pub fn screening_gap(g: &[Vec<f64>], support: &TrueSupport) -> Vec<Option<f64>> {
    g.iter()
        .enumerate()
        .map(|(i, row)| {
            let parents = support.row(i);
            if parents.is_empty() {
                return None;
            }
            let min_parent = parents
                .iter()
                .map(|&j| row[j])
                .fold(f64::INFINITY, f64::min);
            let max_other = row
                .iter()
                .enumerate()
                .filter(|(j, _)| !support.contains(i, *j))
                .map(|(_, &v)| v)
                .fold(f64::NEG_INFINITY, f64::max);
            Some(if max_other.is_finite() {
                min_parent - max_other
            } else {
                min_parent
            })
        })
        .collect()
}

/// Population gap guaranteed for weak coupling: `mu_minus w_minus alpha / (4 beta)`.
pub fn screening_gap_bound(mu_minus: f64, w_minus: f64, alpha: f64, beta: f64) -> f64 {
    mu_minus * w_minus * alpha / (4.0 * beta)
}

/// Stationary second moment of the sum of `k` independent shot-noise
/// processes driven at rate `mu_bar`: `k^2 mu_bar^2 / beta^2 + k mu_bar / (2 beta)`.
pub fn c_path(k: usize, mu_bar: f64, beta: f64) -> f64 {
    let k = k as f64;
    k * k * mu_bar * mu_bar / (beta * beta) + k * mu_bar / (2.0 * beta)
}
