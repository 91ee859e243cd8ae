//! Hawkes model instances over sparse excitatory networks.
//!
//! A model is a vector of background rates `mu`, a sparse non-negative
//! interaction matrix `theta` (row `i` lists the parents of node `i`) and a
//! known decay rate `beta`. The intensity of node `i` is
//!
//! ```text
//! lambda_i(t) = mu_i + sum_j theta_ij X_j(t-),   dX_j = -beta X_j dt + dN_j
//! ```
//!
//! Instances carry the class constants `(k, alpha, w_minus, w_plus)` they were
//! drawn from so that [`validate`] can check them against the class bounds.

use std::fmt;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::trial_rng;

/// Row-sparse non-negative interaction matrix. Row `i` holds `(j, theta_ij)`
/// pairs sorted by `j`; zero entries are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseInteractionMatrix {
    d: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseInteractionMatrix {
    /// The all-zero matrix on `d` nodes.
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            rows: vec![Vec::new(); d],
        }
    }

    /// Builds a matrix from per-row entry lists. Rows are sorted here; an
    /// out-of-range index, a duplicate, or a non-positive weight is an error.
    pub fn from_rows(d: usize, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        if rows.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rows.len(),
            });
        }
        let mut rows = rows;
        for (i, row) in rows.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            for w in row.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::InvalidModel(format!(
                        "duplicate entry ({i}, {})",
                        w[0].0
                    )));
                }
            }
            for &(j, w) in row.iter() {
                if j >= d {
                    return Err(Error::InvalidModel(format!(
                        "entry ({i}, {j}) out of range for d = {d}"
                    )));
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidModel(format!(
                        "entry ({i}, {j}) has non-positive weight {w}"
                    )));
                }
            }
        }
        Ok(Self { d, rows })
    }

    /// Builds a matrix from `(i, j, w)` triples.
    pub fn from_triples(
        d: usize,
        triples: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut rows = vec![Vec::new(); d];
        for (i, j, w) in triples {
            if i >= d {
                return Err(Error::InvalidModel(format!(
                    "row index {i} out of range for d = {d}"
                )));
            }
            rows[i].push((j, w));
        }
        Self::from_rows(d, rows)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// `theta_ij`, or zero when the entry is absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        match row.binary_search_by_key(&j, |&(c, _)| c) {
            Ok(pos) => row[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Iterates over stored entries as `(i, j, theta_ij)` in `(i, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, w)| (i, j, w)))
    }

    /// Column view: entry `j` lists `(i, theta_ij)`, the children excited by
    /// an event of node `j`, sorted by `i`.
    pub fn children(&self) -> Vec<Vec<(usize, f64)>> {
        let mut cols = vec![Vec::new(); self.d];
        for (i, j, w) in self.iter() {
            cols[j].push((i, w));
        }
        cols
    }

    /// `sum_i theta_ij` for each source `j`.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.d];
        for (_, j, w) in self.iter() {
            sums[j] += w;
        }
        sums
    }

    /// Largest row sum `max_i sum_j theta_ij`.
    pub fn max_row_sum(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(_, w)| w).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `y = Theta x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, w)| w * x[j]).sum())
            .collect()
    }

    /// Relabels nodes: entry `(i, j)` moves to `(perm[i], perm[j])`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let triples = self.iter().map(|(i, j, w)| (perm[i], perm[j], w));
        Self::from_triples(self.d, triples).expect("permutation preserves validity")
    }
}

/// A Hawkes model together with the class constants it belongs to.
#[derive(Debug, Clone, PartialEq)]
pub struct HawkesParams {
    pub mu: Vec<f64>,
    pub theta: SparseInteractionMatrix,
    pub beta: f64,
    pub k: usize,
    pub w_minus: f64,
    pub w_plus: f64,
    pub alpha: f64,
}

impl HawkesParams {
    pub fn d(&self) -> usize {
        self.mu.len()
    }

    /// Smallest admissible nonzero weight `alpha * w_minus`.
    pub fn theta_minus(&self) -> f64 {
        self.alpha * self.w_minus
    }

    /// Largest admissible weight `alpha * w_plus`.
    pub fn theta_plus(&self) -> f64 {
        self.alpha * self.w_plus
    }

    /// Class excitation level `k theta_plus / beta`; stationarity needs `< 1`.
    pub fn gamma(&self) -> f64 {
        self.k as f64 * self.theta_plus() / self.beta
    }

    pub fn support(&self) -> TrueSupport {
        support_of(self)
    }

    /// Relabels nodes by `perm` (old index -> new index).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut mu = vec![0.0; self.d()];
        for (i, &m) in self.mu.iter().enumerate() {
            mu[perm[i]] = m;
        }
        Self {
            mu,
            theta: self.theta.permuted(perm),
            ..self.clone()
        }
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            d: self.d(),
            beta: self.beta,
            mu: self.mu.clone(),
            edges: self
                .theta
                .iter()
                .map(|(i, j, w)| Edge { i, j, w })
                .collect(),
            k: self.k,
            alpha: self.alpha,
            w_minus: self.w_minus,
            w_plus: self.w_plus,
        }
    }

    /// Canonical JSON: edges sorted by `(i, j)`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_model_file()).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)?;
        file.into_params()
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut s = self.to_json();
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }
}

/// On-disk model representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub d: usize,
    pub beta: f64,
    pub mu: Vec<f64>,
    pub edges: Vec<Edge>,
    pub k: usize,
    pub alpha: f64,
    pub w_minus: f64,
    pub w_plus: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub w: f64,
}

impl ModelFile {
    pub fn into_params(self) -> Result<HawkesParams> {
        if self.mu.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: self.mu.len(),
            });
        }
        let theta = SparseInteractionMatrix::from_triples(
            self.d,
            self.edges.iter().map(|e| (e.i, e.j, e.w)),
        )?;
        Ok(HawkesParams {
            mu: self.mu,
            theta,
            beta: self.beta,
            k: self.k,
            w_minus: self.w_minus,
            w_plus: self.w_plus,
            alpha: self.alpha,
        })
    }
}

/// Per-row parent sets `S_i = { j : theta_ij > 0 }`, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrueSupport {
    pub sets: Vec<Vec<usize>>,
}

impl TrueSupport {
    pub fn d(&self) -> usize {
        self.sets.len()
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.sets[i].binary_search(&j).is_ok()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut sets = vec![Vec::new(); self.d()];
        for (i, row) in self.sets.iter().enumerate() {
            let mut mapped: Vec<usize> = row.iter().map(|&j| perm[j]).collect();
            mapped.sort_unstable();
            sets[perm[i]] = mapped;
        }
        Self { sets }
    }
}

pub fn support_of(params: &HawkesParams) -> TrueSupport {
    TrueSupport {
        sets: params
            .theta
            .rows()
            .iter()
            .map(|row| row.iter().map(|&(j, _)| j).collect())
            .collect(),
    }
}

/// A single violated model invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DimensionMismatch {
        mu_len: usize,
        theta_d: usize,
    },
    NonPositiveDecay {
        beta: f64,
    },
    InvalidClass {
        reason: String,
    },
    RateOutOfBounds {
        node: usize,
        mu: f64,
    },
    WeightOutOfBounds {
        i: usize,
        j: usize,
        w: f64,
        lo: f64,
        hi: f64,
    },
    RowTooDense {
        row: usize,
        count: usize,
        k: usize,
    },
    Supercritical {
        gamma: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { mu_len, theta_d } => {
                write!(
                    f,
                    "mu has {mu_len} entries but theta is {theta_d}x{theta_d}"
                )
            }
            Self::NonPositiveDecay { beta } => {
                write!(f, "decay rate beta = {beta} is not positive")
            }
            Self::InvalidClass { reason } => write!(f, "invalid class constants: {reason}"),
            Self::RateOutOfBounds { node, mu } => {
                write!(
                    f,
                    "background rate mu[{node}] = {mu} is not positive and finite"
                )
            }
            Self::WeightOutOfBounds { i, j, w, lo, hi } => {
                write!(f, "theta[{i}][{j}] = {w} outside [{lo}, {hi}]")
            }
            Self::RowTooDense { row, count, k } => {
                write!(f, "row {row} has {count} parents, more than k = {k}")
            }
            Self::Supercritical { gamma } => write!(f, "gamma = {gamma} is not below 1"),
        }
    }
}

/// Lists every violated invariant; an empty list means the model is valid.
pub fn validate(params: &HawkesParams) -> Vec<Violation> {
    let mut out = Vec::new();
    let d = params.d();
    if params.theta.d() != d {
        out.push(Violation::DimensionMismatch {
            mu_len: d,
            theta_d: params.theta.d(),
        });
    }
    if !(params.beta.is_finite() && params.beta > 0.0) {
        out.push(Violation::NonPositiveDecay { beta: params.beta });
    }
    if !(params.alpha.is_finite() && params.alpha > 0.0) {
        out.push(Violation::InvalidClass {
            reason: format!("alpha = {} is not positive", params.alpha),
        });
    }
    if !(params.w_minus > 0.0 && params.w_minus <= params.w_plus && params.w_plus.is_finite()) {
        out.push(Violation::InvalidClass {
            reason: format!(
                "weight bounds [{}, {}] are not 0 < w_minus <= w_plus",
                params.w_minus, params.w_plus
            ),
        });
    }
    for (node, &mu) in params.mu.iter().enumerate() {
        if !(mu.is_finite() && mu > 0.0) {
            out.push(Violation::RateOutOfBounds { node, mu });
        }
    }
    let (lo, hi) = (params.theta_minus(), params.theta_plus());
    for (i, j, w) in params.theta.iter() {
        if !(w >= lo && w <= hi) {
            out.push(Violation::WeightOutOfBounds { i, j, w, lo, hi });
        }
    }
    for (row, entries) in params.theta.rows().iter().enumerate() {
        if entries.len() > params.k {
            out.push(Violation::RowTooDense {
                row,
                count: entries.len(),
                k: params.k,
            });
        }
    }
    let gamma = params.gamma();
    if !(gamma < 1.0) {
        out.push(Violation::Supercritical { gamma });
    }
    out
}

/// Constants of the model class `G_{d,k}` that random instances are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub d: usize,
    pub k: usize,
    pub alpha: f64,
    pub w_minus: f64,
    pub w_plus: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub beta: f64,
}

impl ClassSpec {
    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.beta > 0.0 && self.alpha > 0.0) {
            return bad(format!(
                "beta = {} and alpha = {} must be positive",
                self.beta, self.alpha
            ));
        }
        if !(self.w_minus > 0.0 && self.w_minus <= self.w_plus && self.w_plus.is_finite()) {
            return bad(format!(
                "need 0 < w_minus <= w_plus, got [{}, {}]",
                self.w_minus, self.w_plus
            ));
        }
        if !(self.mu_minus > 0.0 && self.mu_minus <= self.mu_plus && self.mu_plus.is_finite()) {
            return bad(format!(
                "need 0 < mu_minus <= mu_plus, got [{}, {}]",
                self.mu_minus, self.mu_plus
            ));
        }
        if self.k > self.d {
            return bad(format!("k = {} exceeds d = {}", self.k, self.d));
        }
        let gamma = self.k as f64 * self.alpha * self.w_plus / self.beta;
        if !(gamma < 1.0) {
            return bad(format!(
                "class is not subcritical: k alpha w_plus / beta = {gamma}"
            ));
        }
        Ok(())
    }

    /// Draws an instance: every row gets exactly `k` distinct parents chosen
    /// uniformly (self-loops allowed), weights `alpha * U[w_minus, w_plus]`,
    /// rates `U[mu_minus, mu_plus]`.
    pub fn sample(&self, seed: u64) -> Result<HawkesParams> {
        self.check()?;
        let mut rng = trial_rng(seed);
        let d = self.d;
        let mut rows = Vec::with_capacity(d);
        for _ in 0..d {
            let parents = index::sample(&mut rng, d, self.k);
            let row: Vec<(usize, f64)> = parents
                .into_iter()
                .map(|j| {
                    let u: f64 = rng.random();
                    (
                        j,
                        self.alpha * (self.w_minus + (self.w_plus - self.w_minus) * u),
                    )
                })
                .collect();
            rows.push(row);
        }
        let mu = (0..d)
            .map(|_| {
                let u: f64 = rng.random();
                self.mu_minus + (self.mu_plus - self.mu_minus) * u
            })
            .collect();
        Ok(HawkesParams {
            mu,
            theta: SparseInteractionMatrix::from_rows(d, rows)?,
            beta: self.beta,
            k: self.k,
            w_minus: self.w_minus,
            w_plus: self.w_plus,
            alpha: self.alpha,
        })
    }
}

/// See [`ClassSpec::sample`].
pub fn sample_random_instance(spec: &ClassSpec, seed: u64) -> Result<HawkesParams> {
    spec.sample(seed)
}

/// Constants of the hard subclass: only row `i_star` is nonzero, with weight
/// `theta_minus` on each of its `k` parents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubclassSpec {
    pub d: usize,
    pub k: usize,
    pub theta_minus: f64,
    pub mu_bar: f64,
    pub mu_bar_star: f64,
    pub beta: f64,
}

impl SubclassSpec {
    /// Builds the instance with target row `i_star` and parent set `parents`.
    pub fn build(&self, i_star: usize, parents: &[usize]) -> Result<HawkesParams> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if i_star >= self.d {
            return bad(format!("i_star = {i_star} out of range for d = {}", self.d));
        }
        if parents.len() != self.k {
            return bad(format!(
                "parent set has {} entries, expected k = {}",
                parents.len(),
                self.k
            ));
        }
        if parents.contains(&i_star) {
            return bad(format!("parent set contains i_star = {i_star}"));
        }
        if !(self.beta > 0.0
            && self.theta_minus > 0.0
            && self.mu_bar > 0.0
            && self.mu_bar_star > 0.0)
        {
            return bad("beta, theta_minus, mu_bar and mu_bar_star must be positive".into());
        }
        if !(self.k as f64 * self.theta_minus / self.beta < 1.0) {
            return bad(format!(
                "subclass is not subcritical: k theta_minus / beta = {}",
                self.k as f64 * self.theta_minus / self.beta
            ));
        }
        let mut rows = vec![Vec::new(); self.d];
        rows[i_star] = parents.iter().map(|&j| (j, self.theta_minus)).collect();
        let mut mu = vec![self.mu_bar; self.d];
        mu[i_star] = self.mu_bar_star;
        Ok(HawkesParams {
            mu,
            theta: SparseInteractionMatrix::from_rows(self.d, rows)?,
            beta: self.beta,
            k: self.k,
            w_minus: 1.0,
            w_plus: 1.0,
            alpha: self.theta_minus,
        })
    }

    /// Draws `i_star` and a parent set uniformly, then builds the instance.
    pub fn sample(&self, seed: u64) -> Result<HawkesParams> {
        if self.d < self.k + 1 {
            return Err(Error::InvalidParameter(format!(
                "d = {} too small for k = {} parents",
                self.d, self.k
            )));
        }
        let mut rng = trial_rng(seed);
        let i_star = rng.random_range(0..self.d);
        let parents: Vec<usize> = index::sample(&mut rng, self.d - 1, self.k)
            .into_iter()
            .map(|j| if j >= i_star { j + 1 } else { j })
            .collect();
        self.build(i_star, &parents)
    }
}

/// See [`SubclassSpec::build`].
pub fn build_subclass_instance(
    spec: &SubclassSpec,
    i_star: usize,
    parents: &[usize],
) -> Result<HawkesParams> {
    spec.build(i_star, parents)
}
