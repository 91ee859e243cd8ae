//! Monte-Carlo recovery experiments over `(d, T)` grids.
//!
//! A cell runs `trials` independent pipelines (draw model, simulate, bin,
//! recover, score exact recovery). Trial `t` of a cell draws its randomness
//! from `mix64(base_seed, [d, T_index, t])`, so a sweep is a pure function
//! of its spec regardless of the number of workers.
//!
//! In threshold mode every bisection probe of a given `d` uses `T_index = 0`:
//! probes at different horizons reuse the same model draws and the same
//! event streams, truncated at `T` (common random numbers).

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binning::bin_and_clip;
use crate::error::{Error, Result};
use crate::estimator::{evaluate, recover, EstimatorConfig, EstimatorSpec};
use crate::model::{ClassSpec, HawkesParams, SubclassSpec};
use crate::rng::mix64;
use crate::simulate::{default_burn_in, simulate, Method, SimConfig, DEFAULT_EVENT_CAP};

/// Two-sided 95% standard normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// How each trial draws its model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelGen {
    /// Exactly `k` parents per row.
    Random {
        k: usize,
        alpha: f64,
        w_minus: f64,
        w_plus: f64,
        mu_minus: f64,
        mu_plus: f64,
        beta: f64,
    },
    /// One target row with `k` planted parents; target and parents drawn uniformly.
    Subclass {
        k: usize,
        theta_minus: f64,
        mu_bar: f64,
        mu_bar_star: f64,
        beta: f64,
    },
}

impl ModelGen {
    pub fn sample(&self, d: usize, seed: u64) -> Result<HawkesParams> {
        match *self {
            Self::Random {
                k,
                alpha,
                w_minus,
                w_plus,
                mu_minus,
                mu_plus,
                beta,
            } => ClassSpec {
                d,
                k,
                alpha,
                w_minus,
                w_plus,
                mu_minus,
                mu_plus,
                beta,
            }
            .sample(seed),
            Self::Subclass {
                k,
                theta_minus,
                mu_bar,
                mu_bar_star,
                beta,
            } => SubclassSpec {
                d,
                k,
                theta_minus,
                mu_bar,
                mu_bar_star,
                beta,
            }
            .sample(seed),
        }
    }
}

/// Bracket and stopping rule for threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BisectionSpec {
    pub t_lo: f64,
    pub t_hi: f64,
    #[serde(default = "default_rel_width")]
    pub rel_width: f64,
    #[serde(default = "default_expansions")]
    pub max_expansions: usize,
}

fn default_rel_width() -> f64 {
    0.1
}

fn default_expansions() -> usize {
    8
}

fn default_level() -> f64 {
    0.9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub d_values: Vec<usize>,
    #[serde(default)]
    pub t_values: Vec<f64>,
    #[serde(default)]
    pub bisection: Option<BisectionSpec>,
    pub trials: usize,
    pub model: ModelGen,
    pub estimator: EstimatorSpec,
    pub base_seed: u64,
    #[serde(default = "default_level")]
    pub success_level: f64,
    /// Worker threads; absent means one per core. Results do not depend on it.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default = "default_method")]
    pub method: Method,
    /// Burn-in length; absent means [`default_burn_in`] of each drawn model.
    #[serde(default)]
    pub burn_in: Option<f64>,
    #[serde(default)]
    pub event_cap: Option<usize>,
}

fn default_method() -> Method {
    Method::Cluster
}

impl SweepSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        Ok(spec)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Checks the spec; `threshold_mode` additionally requires a bisection bracket.
    pub fn validate(&self, threshold_mode: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.d_values.is_empty() || self.d_values.contains(&0) {
            return bad("d_values must be a non-empty list of positive integers".into());
        }
        if !(self.success_level > 0.0 && self.success_level < 1.0) {
            return bad(format!(
                "success_level {} must lie in (0, 1)",
                self.success_level
            ));
        }
        if self.t_values.iter().any(|&t| !(t > 0.0 && t.is_finite()))
            || self.t_values.windows(2).any(|w| w[0] >= w[1])
        {
            return bad("t_values must be positive and strictly ascending".into());
        }
        if self.jobs == Some(0) {
            return bad("jobs must be at least 1".into());
        }
        if let Some(b) = self.burn_in {
            if !(b >= 0.0 && b.is_finite()) {
                return bad(format!("burn_in {b} must be non-negative"));
            }
        }
        self.estimator.config()?;
        for &d in &self.d_values {
            self.model.sample(d, self.base_seed)?;
        }
        if threshold_mode {
            match self.bisection {
                Some(b) if b.t_lo > 0.0 && b.t_hi > b.t_lo && b.rel_width > 0.0 => {}
                Some(b) => return bad(format!("invalid bisection bracket {b:?}")),
                None => return bad("threshold mode needs a `bisection` section".into()),
            }
        } else if self.t_values.is_empty() {
            return bad("grid mode needs a non-empty t_values list".into());
        }
        Ok(())
    }

    fn config(&self) -> Result<EstimatorConfig> {
        self.estimator.config()
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = self.jobs {
            builder = builder.num_threads(jobs);
        }
        builder
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot build worker pool: {e}")))
    }
}

/// Seed of trial `trial` in cell `(d, t_index)`.
pub fn trial_seed(base_seed: u64, d: usize, t_index: usize, trial: usize) -> u64 {
    mix64(base_seed, &[d as u64, t_index as u64, trial as u64])
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub d: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CellResult {
    pub fn new(d: usize, t: f64, successes: usize, trials: usize) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials);
        Self {
            d,
            t,
            trials,
            successes,
            rate: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }
}

/// Runs one pipeline; `Ok(false)` covers every recovery failure, including
/// degenerate rows and horizons shorter than two bins.
fn run_trial(
    d: usize,
    t: f64,
    seed: u64,
    spec: &SweepSpec,
    config: &EstimatorConfig,
) -> Result<bool> {
    let params = spec.model.sample(d, mix64(seed, &[0]))?;
    let burn_in = spec.burn_in.unwrap_or_else(|| default_burn_in(&params));
    let sim = SimConfig {
        t_end: t,
        burn_in,
        seed: mix64(seed, &[1]),
        event_cap: spec.event_cap.unwrap_or(DEFAULT_EVENT_CAP),
    };
    let log = simulate(&params, &sim, spec.method)?;
    if t < 2.0 * config.h {
        return Ok(false);
    }
    let sample = bin_and_clip(&log, config.h, config.clip)?;
    let net = recover(&sample, config)?;
    Ok(evaluate(&net, &params.support())?.exact)
}

/// Exact-recovery successes over `spec.trials` trials at `(d, T)`.
pub fn run_cell(d: usize, t: f64, t_index: usize, spec: &SweepSpec) -> Result<CellResult> {
    let config = spec.config()?;
    let pool = spec.pool()?;
    run_cell_in(&pool, d, t, t_index, spec, &config)
}

fn run_cell_in(
    pool: &rayon::ThreadPool,
    d: usize,
    t: f64,
    t_index: usize,
    spec: &SweepSpec,
    config: &EstimatorConfig,
) -> Result<CellResult> {
    let outcomes: Vec<Result<bool>> = pool.install(|| {
        (0..spec.trials)
            .into_par_iter()
            .map(|trial| {
                run_trial(
                    d,
                    t,
                    trial_seed(spec.base_seed, d, t_index, trial),
                    spec,
                    config,
                )
            })
            .collect()
    });
    let mut successes = 0;
    for outcome in outcomes {
        if outcome? {
            successes += 1;
        }
    }
    Ok(CellResult::new(d, t, successes, spec.trials))
}

/// Result of a threshold search for one `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    pub d: usize,
    pub t_star: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    /// Every probe, sorted by `T`.
    pub cells: Vec<CellResult>,
    /// The probes contradicted monotonicity beyond sampling noise and the
    /// estimate comes from a grid scan.
    pub grid_fallback: bool,
}

/// Finds where the success rate crosses `level`, by bisection on `T` after
/// doubling/halving the bracket until `rate(lo) < level <= rate(hi)`.
/// Stops once `hi - lo <= rel_width * lo` and returns the midpoint.
pub fn bisect_threshold<F>(
    d: usize,
    mut eval: F,
    bracket: &BisectionSpec,
    level: f64,
) -> Result<ThresholdEstimate>
where
    F: FnMut(f64) -> Result<CellResult>,
{
    let mut cells: Vec<CellResult> = Vec::new();
    let mut probe = |t: f64, cells: &mut Vec<CellResult>| -> Result<f64> {
        if let Some(c) = cells.iter().find(|c| c.t == t) {
            return Ok(c.rate);
        }
        let c = eval(t)?;
        let rate = c.rate;
        cells.push(c);
        Ok(rate)
    };

    let (mut lo, mut hi) = (bracket.t_lo, bracket.t_hi);
    let mut expansions = 0;
    while probe(hi, &mut cells)? < level {
        if expansions == bracket.max_expansions {
            return Err(Error::InvalidParameter(format!(
                "d = {d}: success rate stays below {level} up to T = {hi}"
            )));
        }
        lo = hi;
        hi *= 2.0;
        expansions += 1;
    }
    while probe(lo, &mut cells)? >= level {
        if expansions == bracket.max_expansions {
            return Err(Error::InvalidParameter(format!(
                "d = {d}: success rate reaches {level} already at T = {lo}"
            )));
        }
        hi = lo;
        lo /= 2.0;
        expansions += 1;
    }
    while hi - lo > bracket.rel_width * lo {
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut cells)? >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    cells.sort_by(|a, b| a.t.total_cmp(&b.t));
    let trials = cells.first().map_or(1, |c| c.trials);
    if !violates_monotonicity(&cells, trials) {
        return Ok(ThresholdEstimate {
            d,
            t_star: 0.5 * (lo + hi),
            t_lo: lo,
            t_hi: hi,
            cells,
            grid_fallback: false,
        });
    }

    // Grid scan over the explored range; T* is the first grid point from
    // which every larger point succeeds.
    let (t_min, t_max) = (cells[0].t, cells[cells.len() - 1].t);
    let points = 12;
    let ratio = (t_max / t_min).powf(1.0 / (points - 1) as f64);
    let grid: Vec<f64> = (0..points).map(|p| t_min * ratio.powi(p as i32)).collect();
    let mut rates = Vec::with_capacity(points);
    for &t in &grid {
        rates.push(probe(t, &mut cells)?);
    }
    cells.sort_by(|a, b| a.t.total_cmp(&b.t));
    let first_ok = (0..points)
        .rev()
        .take_while(|&p| rates[p] >= level)
        .last()
        .unwrap_or(points - 1);
    let (t_lo, t_hi) = if first_ok == 0 {
        (grid[0], grid[0])
    } else {
        (grid[first_ok - 1], grid[first_ok])
    };
    Ok(ThresholdEstimate {
        d,
        t_star: 0.5 * (t_lo + t_hi),
        t_lo,
        t_hi,
        cells,
        grid_fallback: true,
    })
}

/// Some shorter horizon has a success rate above a longer one by more than
/// three standard errors of the difference.
fn violates_monotonicity(sorted: &[CellResult], trials: usize) -> bool {
    let n = trials as f64;
    sorted.iter().enumerate().any(|(a, ca)| {
        sorted[a + 1..].iter().any(|cb| {
            let pooled = 0.5 * (ca.rate + cb.rate);
            let se = (2.0 * pooled * (1.0 - pooled) / n).sqrt();
            ca.rate - cb.rate > 3.0 * se
        })
    })
}

/// Threshold search for one `d` using the spec's bracket and success level.
pub fn estimate_threshold_time(d: usize, spec: &SweepSpec) -> Result<ThresholdEstimate> {
    let config = spec.config()?;
    let pool = spec.pool()?;
    let bracket = spec.bisection.ok_or_else(|| {
        Error::InvalidParameter("threshold mode needs a `bisection` section".into())
    })?;
    bisect_threshold(
        d,
        |t| run_cell_in(&pool, d, t, 0, spec, &config),
        &bracket,
        spec.success_level,
    )
}

/// Least-squares fit `T* = slope ln d + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_log_scaling(points: &[(usize, f64)]) -> Result<LogFit> {
    let mut ds: Vec<usize> = points.iter().map(|p| p.0).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "log fit needs at least 3 distinct d values, got {}",
            ds.len()
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean).powi(2)).sum();
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let sst: f64 = ys.iter().map(|y| (y - y_mean).powi(2)).sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    Ok(LogFit {
        slope,
        intercept,
        r2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Every evaluated cell, sorted by `(d, T)`.
    pub cells: Vec<CellResult>,
    pub thresholds: Vec<ThresholdEstimate>,
    pub fit: Option<LogFit>,
}

/// Grid mode evaluates every `(d, T)` pair; threshold mode searches `T*(d)`
/// for each `d` and fits `T*` against `ln d` when at least three `d` values
/// are given.
pub fn run_sweep(spec: &SweepSpec, threshold_mode: bool) -> Result<SweepResult> {
    spec.validate(threshold_mode)?;
    let config = spec.config()?;
    let pool = spec.pool()?;
    if !threshold_mode {
        let mut cells = Vec::new();
        for &d in &spec.d_values {
            for (t_index, &t) in spec.t_values.iter().enumerate() {
                cells.push(run_cell_in(&pool, d, t, t_index, spec, &config)?);
            }
        }
        cells.sort_by(|a, b| a.d.cmp(&b.d).then(a.t.total_cmp(&b.t)));
        return Ok(SweepResult {
            cells,
            thresholds: Vec::new(),
            fit: None,
        });
    }
    let bracket = spec.bisection.expect("validated");
    let mut thresholds = Vec::new();
    for &d in &spec.d_values {
        let est = bisect_threshold(
            d,
            |t| run_cell_in(&pool, d, t, 0, spec, &config),
            &bracket,
            spec.success_level,
        )?;
        thresholds.push(est);
    }
    let mut cells: Vec<CellResult> = thresholds.iter().flat_map(|e| e.cells.clone()).collect();
    cells.sort_by(|a, b| a.d.cmp(&b.d).then(a.t.total_cmp(&b.t)));
    let points: Vec<(usize, f64)> = thresholds.iter().map(|e| (e.d, e.t_star)).collect();
    let fit = if points.len() >= 3 {
        Some(fit_log_scaling(&points)?)
    } else {
        None
    };
    Ok(SweepResult {
        cells,
        thresholds,
        fit,
    })
}

const RESULTS_HEADER: [&str; 7] = ["d", "T", "trials", "successes", "rate", "ci_lo", "ci_hi"];
const THRESHOLDS_HEADER: [&str; 4] = ["d", "t_star", "t_lo", "t_hi"];

/// Writes `d,T,trials,successes,rate,ci_lo,ci_hi` rows. Floats use the
/// shortest representation that parses back to the same value.
pub fn write_results_csv<W: Write>(cells: &[CellResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for c in cells {
        w.write_record([
            c.d.to_string(),
            c.t.to_string(),
            c.trials.to_string(),
            c.successes.to_string(),
            c.rate.to_string(),
            c.ci_lo.to_string(),
            c.ci_hi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv<R: std::io::Read>(input: R) -> Result<Vec<CellResult>> {
    let mut rdr = csv::Reader::from_reader(input);
    if rdr.headers()?.iter().ne(RESULTS_HEADER) {
        return Err(Error::Parse(format!(
            "expected header {}",
            RESULTS_HEADER.join(",")
        )));
    }
    let mut cells = Vec::new();
    for rec in rdr.deserialize() {
        let c: CellResult = rec?;
        if c.successes > c.trials {
            return Err(Error::Parse(format!(
                "cell d = {}, T = {} has successes > trials",
                c.d, c.t
            )));
        }
        cells.push(c);
    }
    Ok(cells)
}

pub fn write_thresholds_csv<W: Write>(thresholds: &[ThresholdEstimate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(THRESHOLDS_HEADER)?;
    for e in thresholds {
        w.write_record([
            e.d.to_string(),
            e.t_star.to_string(),
            e.t_lo.to_string(),
            e.t_hi.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn fit_json(fit: &LogFit) -> String {
    let mut s = serde_json::to_string_pretty(fit).expect("fit serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn step_eval(threshold: f64) -> impl FnMut(f64) -> Result<CellResult> {
        move |t| {
            Ok(CellResult::new(
                5,
                t,
                if t >= threshold { 10 } else { 0 },
                10,
            ))
        }
    }

    fn bracket(lo: f64, hi: f64) -> BisectionSpec {
        BisectionSpec {
            t_lo: lo,
            t_hi: hi,
            rel_width: 0.1,
            max_expansions: 8,
        }
    }

    #[test]
    fn bisection_on_a_step() {
        let est = bisect_threshold(5, step_eval(7.0), &bracket(1.0, 20.0), 0.9).unwrap();
        assert!((6.3..=7.7).contains(&est.t_star), "{}", est.t_star);
        assert!(est.t_lo < 7.0 && est.t_hi >= 7.0);
        assert!(est.t_hi - est.t_lo <= 0.1 * est.t_lo);
        assert!(!est.grid_fallback);
    }

    #[test]
    fn bisection_expands_the_bracket() {
        let est = bisect_threshold(5, step_eval(7.0), &bracket(1.0, 2.0), 0.9).unwrap();
        assert!((6.3..=7.7).contains(&est.t_star));
        let est = bisect_threshold(5, step_eval(7.0), &bracket(10.0, 30.0), 0.9).unwrap();
        assert!((6.3..=7.7).contains(&est.t_star));
    }

    #[test]
    fn bisection_gives_up_when_never_successful() {
        let err = bisect_threshold(5, step_eval(1e9), &bracket(1.0, 2.0), 0.9);
        assert!(err.is_err());
    }

    #[test]
    fn non_monotone_rates_fall_back_to_grid() {
        // Rate 0.8 on [2, 5), 0 on [5, 12), 1 from 12 on.
        let eval = |t: f64| {
            let s = if t >= 12.0 {
                50
            } else if (2.0..5.0).contains(&t) {
                40
            } else {
                0
            };
            Ok(CellResult::new(5, t, s, 50))
        };
        let est = bisect_threshold(5, eval, &bracket(3.0, 20.0), 0.9).unwrap();
        assert!(est.grid_fallback);
        assert!(est.t_hi >= 12.0 && est.t_lo < 12.0, "{est:?}");
    }

    #[test]
    fn noisy_but_monotone_rates_keep_bisection() {
        let eval = |t: f64| {
            Ok(CellResult::new(
                5,
                t,
                if t >= 7.0 {
                    46
                } else if t > 6.0 {
                    44
                } else {
                    10
                },
                50,
            ))
        };
        let est = bisect_threshold(5, eval, &bracket(1.0, 20.0), 0.9).unwrap();
        assert!(!est.grid_fallback);
    }

    #[test]
    fn log_fit_exact_points() {
        let pts: Vec<(usize, f64)> = [10, 20, 40, 80]
            .iter()
            .map(|&d| (d, 2.0 * (d as f64).ln()))
            .collect();
        let fit = fit_log_scaling(&pts).unwrap();
        assert_abs_diff_eq!(fit.slope, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn log_fit_constant_and_too_few() {
        let fit = fit_log_scaling(&[(10, 3.0), (20, 3.0), (40, 3.0)]).unwrap();
        assert_abs_diff_eq!(fit.slope, 0.0, epsilon = 1e-12);
        assert!(fit_log_scaling(&[(10, 1.0), (20, 2.0)]).is_err());
        assert!(fit_log_scaling(&[(10, 1.0), (10, 2.0), (20, 3.0)]).is_err());
    }

    #[test]
    fn wilson_contains_rate() {
        for trials in [1, 7, 50, 200] {
            for s in 0..=trials {
                let (lo, hi) = wilson_interval(s, trials);
                let p = s as f64 / trials as f64;
                assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
            }
        }
        let (lo, hi) = wilson_interval(45, 50);
        assert_abs_diff_eq!(lo, 0.7864, epsilon = 1e-4);
        assert_abs_diff_eq!(hi, 0.9565, epsilon = 1e-4);
    }

    #[test]
    fn results_csv_round_trip() {
        let cells = vec![
            CellResult::new(10, 0.1, 3, 7),
            CellResult::new(20, 123.456, 50, 50),
        ];
        let mut a = Vec::new();
        write_results_csv(&cells, &mut a).unwrap();
        let back = read_results_csv(a.as_slice()).unwrap();
        assert_eq!(back, cells);
        let mut b = Vec::new();
        write_results_csv(&back, &mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a)
            .unwrap()
            .starts_with("d,T,trials,successes,rate,ci_lo,ci_hi\n"));
    }

    #[test]
    fn seeds_differ_per_cell_and_trial() {
        let s = trial_seed(1, 10, 0, 0);
        assert_ne!(s, trial_seed(1, 10, 0, 1));
        assert_ne!(s, trial_seed(1, 10, 1, 0));
        assert_ne!(s, trial_seed(1, 20, 0, 0));
        assert_ne!(s, trial_seed(2, 10, 0, 0));
    }
}
