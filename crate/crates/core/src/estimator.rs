//! Two-stage network recovery from binned observations.
//!
//! For each target node `i`:
//!
//! 1. score every candidate `j` by the empirical covariance between its
//!    clipped state `Z_j` and the future-bin indicator `Y_i`, and keep the
//!    `m` highest scores;
//! 2. regress the centered `Y_i` on the centered candidate states by least
//!    squares and keep candidates whose coefficient is at least `tau`.
//!
//! Rows are independent and are processed in parallel.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::BinnedSample;
use crate::error::{Error, Result};
use crate::model::TrueSupport;

/// Relative eigenvalue floor of the candidate Gram matrix.
pub const GRAM_RELATIVE_FLOOR: f64 = 1e-10;

/// Tuning of the estimator: bin width `h`, clip level `clip`, candidate-set
/// size `m` and coefficient threshold `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub h: f64,
    #[serde(rename = "R")]
    pub clip: f64,
    pub m: usize,
    pub tau: f64,
}

impl EstimatorConfig {
    pub fn explicit(h: f64, clip: f64, m: usize, tau: f64) -> Result<Self> {
        let cfg = Self { h, clip, m, tau };
        cfg.check()?;
        Ok(cfg)
    }

    /// Weak-coupling schedule: `h = a_h alpha^2`, `R = max(1, a_r / alpha)`,
    /// `m = 2k` (at least 1), `tau = alpha w_minus h / 2`.
    pub fn auto(alpha: f64, w_minus: f64, k: usize, a_h: f64, a_r: f64) -> Result<Self> {
        if !(alpha > 0.0 && w_minus > 0.0 && a_h > 0.0 && a_r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "auto schedule needs positive alpha, w_minus, A_h, A_R (got {alpha}, {w_minus}, {a_h}, {a_r})"
            )));
        }
        let h = a_h * alpha * alpha;
        Self::explicit(
            h,
            f64::max(1.0, a_r / alpha),
            (2 * k).max(1),
            alpha * w_minus * h / 2.0,
        )
    }

    fn check(&self) -> Result<()> {
        if !(self.h > 0.0 && self.clip > 0.0 && self.tau > 0.0) || self.m == 0 {
            return Err(Error::InvalidParameter(format!(
                "estimator needs h, R, tau > 0 and m >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Serializable estimator settings: explicit values or the weak-coupling schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum EstimatorSpec {
    Explicit {
        h: f64,
        #[serde(rename = "R")]
        clip: f64,
        m: usize,
        tau: f64,
    },
    Auto {
        alpha: f64,
        w_minus: f64,
        k: usize,
        #[serde(default = "one")]
        a_h: f64,
        #[serde(default = "one")]
        a_r: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl EstimatorSpec {
    pub fn config(&self) -> Result<EstimatorConfig> {
        match *self {
            Self::Explicit { h, clip, m, tau } => EstimatorConfig::explicit(h, clip, m, tau),
            Self::Auto {
                alpha,
                w_minus,
                k,
                a_h,
                a_r,
            } => EstimatorConfig::auto(alpha, w_minus, k, a_h, a_r),
        }
    }
}

/// `F[i][j] = mean(Z_j Y_i) - mean(Z_j) mean(Y_i)` for all pairs.
///
/// Only the bins where `Y_i = 1` are visited, so the cost is
/// `O(n d + nnz(Y) d)` instead of `O(n d^2)`.
pub fn screening_scores(sample: &BinnedSample) -> Result<Vec<Vec<f64>>> {
    if sample.n < 2 {
        return Err(Error::InvalidParameter(format!(
            "screening needs n >= 2 bins, got {}",
            sample.n
        )));
    }
    let n = sample.n as f64;
    let z_mean: Vec<f64> = (0..sample.d)
        .map(|j| sample.z_col(j).iter().sum::<f64>() / n)
        .collect();
    Ok((0..sample.d)
        .into_par_iter()
        .map(|i| screening_row(sample, i, &z_mean))
        .collect())
}

fn screening_row(sample: &BinnedSample, i: usize, z_mean: &[f64]) -> Vec<f64> {
    let n = sample.n as f64;
    let bins = sample.y_bins(i);
    let y_mean = bins.len() as f64 / n;
    (0..sample.d)
        .map(|j| {
            let col = sample.z_col(j);
            let zy: f64 = bins.iter().map(|&r| col[r as usize]).sum();
            zy / n - z_mean[j] * y_mean
        })
        .collect()
}

/// Indices of the `m` largest scores, highest first; ties go to the
/// smaller index.
pub fn select_candidates(scores: &[f64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    idx.truncate(m.min(scores.len()));
    idx
}

/// Outcome of a local regression.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalFit {
    /// Coefficients aligned with the candidate list.
    Solved(Vec<f64>),
    /// The candidate Gram matrix failed the invertibility test.
    Degenerate,
}

impl LocalFit {
    pub fn coeffs(&self) -> Option<&[f64]> {
        match self {
            Self::Solved(c) => Some(c),
            Self::Degenerate => None,
        }
    }
}

/// Centered Gram matrix of the candidate states and their centered
/// cross-covariance with `Y_i`.
pub fn local_moments(
    sample: &BinnedSample,
    i: usize,
    candidates: &[usize],
) -> (DMatrix<f64>, DVector<f64>) {
    let n = sample.n as f64;
    let c = candidates.len();
    let centered: Vec<Vec<f64>> = candidates
        .iter()
        .map(|&j| {
            let col = sample.z_col(j);
            let mean = col.iter().sum::<f64>() / n;
            col.iter().map(|v| v - mean).collect()
        })
        .collect();
    let mut gram = DMatrix::zeros(c, c);
    for a in 0..c {
        for b in a..c {
            let v = centered[a]
                .iter()
                .zip(&centered[b])
                .map(|(x, y)| x * y)
                .sum::<f64>()
                / n;
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    // Centered Z columns sum to zero, so sum_r Z~ Y~ = sum_{r : Y = 1} Z~.
    let bins = sample.y_bins(i);
    let cross = DVector::from_iterator(
        c,
        centered
            .iter()
            .map(|col| bins.iter().map(|&r| col[r as usize]).sum::<f64>() / n),
    );
    (gram, cross)
}

/// Least-squares coefficients of the centered `Y_i` on the centered states
/// of `candidates`. The Gram matrix must have smallest eigenvalue at least
/// `1e-10 * trace / |C|` and there must be more bins than candidates.
pub fn local_least_squares(sample: &BinnedSample, i: usize, candidates: &[usize]) -> LocalFit {
    let c = candidates.len();
    if c == 0 {
        return LocalFit::Solved(Vec::new());
    }
    if sample.n < c + 1 {
        return LocalFit::Degenerate;
    }
    let (gram, cross) = local_moments(sample, i, candidates);
    let trace = gram.trace();
    if !(trace > 0.0 && trace.is_finite()) {
        return LocalFit::Degenerate;
    }
    let lambda_min = gram.clone().symmetric_eigenvalues().min();
    if !(lambda_min >= GRAM_RELATIVE_FLOOR * trace / c as f64) {
        return LocalFit::Degenerate;
    }
    match gram.cholesky() {
        Some(chol) => LocalFit::Solved(chol.solve(&cross).iter().copied().collect()),
        None => LocalFit::Degenerate,
    }
}

/// Candidates whose coefficient is at least `tau`, sorted ascending.
pub fn threshold_support(coeffs: &[f64], candidates: &[usize], tau: f64) -> Vec<usize> {
    let mut keep: Vec<usize> = candidates
        .iter()
        .zip(coeffs)
        .filter(|(_, &y)| y >= tau)
        .map(|(&j, _)| j)
        .collect();
    keep.sort_unstable();
    keep
}

/// Estimation output for one target node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowEstimate {
    pub i: usize,
    /// Candidates in descending score order.
    pub candidates: Vec<usize>,
    /// Local least-squares coefficients aligned with `candidates`; empty when degenerate.
    pub coeffs: Vec<f64>,
    /// Estimated parent set, sorted ascending.
    pub support: Vec<usize>,
    pub degenerate: bool,
    /// Full screening row.
    #[serde(skip)]
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredNetwork {
    pub d: usize,
    pub rows: Vec<RowEstimate>,
}

impl RecoveredNetwork {
    pub fn supports(&self) -> TrueSupport {
        TrueSupport {
            sets: self.rows.iter().map(|r| r.support.clone()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }
}

/// Screening, candidate selection, local regression and thresholding for every row.
pub fn recover(sample: &BinnedSample, config: &EstimatorConfig) -> Result<RecoveredNetwork> {
    config.check()?;
    let scores = screening_scores(sample)?;
    let rows = scores
        .into_par_iter()
        .enumerate()
        .map(|(i, row_scores)| {
            let candidates = select_candidates(&row_scores, config.m);
            let (coeffs, support, degenerate) = match local_least_squares(sample, i, &candidates) {
                LocalFit::Solved(coeffs) => {
                    let support = threshold_support(&coeffs, &candidates, config.tau);
                    (coeffs, support, false)
                }
                LocalFit::Degenerate => (Vec::new(), Vec::new(), true),
            };
            RowEstimate {
                i,
                candidates,
                coeffs,
                support,
                degenerate,
                scores: row_scores,
            }
        })
        .collect();
    Ok(RecoveredNetwork { d: sample.d, rows })
}

/// Support-recovery metrics against the true parent sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryMetrics {
    /// Every row recovered exactly.
    pub exact: bool,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    /// `false_positives + false_negatives`.
    pub hamming: usize,
    pub row_correct: Vec<bool>,
}

pub fn evaluate(recovered: &RecoveredNetwork, truth: &TrueSupport) -> Result<RecoveryMetrics> {
    if recovered.d != truth.d() || recovered.rows.len() != truth.d() {
        return Err(Error::DimensionMismatch {
            expected: truth.d(),
            found: recovered.d,
        });
    }
    let (mut tp, mut fp, mut fneg) = (0, 0, 0);
    let mut row_correct = Vec::with_capacity(truth.d());
    for (row, true_set) in recovered.rows.iter().zip(&truth.sets) {
        let hits = row.support.iter().filter(|j| true_set.contains(j)).count();
        tp += hits;
        fp += row.support.len() - hits;
        fneg += true_set.len() - hits;
        row_correct.push(hits == true_set.len() && hits == row.support.len());
    }
    Ok(RecoveryMetrics {
        exact: row_correct.iter().all(|&c| c),
        true_positives: tp,
        false_positives: fp,
        false_negatives: fneg,
        hamming: fp + fneg,
        row_correct,
    })
}
