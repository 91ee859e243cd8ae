//! Exact simulation of exponential Hawkes processes.
//!
//! Two independent samplers are provided:
//!
//! * [`simulate_thinning`] runs the intensity forward in time from an empty
//!   state, proposing from the total intensity at the last proposal. Between
//!   events every `X_j` decays, so that value bounds the intensity until the
//!   next event and every proposal is exact.
//! * [`simulate_cluster`] draws Poisson immigrants and expands each into its
//!   branching cascade: an event of node `j` at time `s` spawns node-`i`
//!   children from a Poisson process with intensity `theta_ij e^{-beta (t - s)}`.
//!
//! Both start at `-burn_in` so the window `[0, T]` is close to stationary.
//! Both consume randomness strictly in time order of the immigrant stream,
//! so for a fixed seed a longer horizon extends a shorter one.

use std::collections::VecDeque;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate, HawkesParams};
use crate::rng::trial_rng;

pub const DEFAULT_EVENT_CAP: usize = 100_000_000;

/// Immigrants of the cluster sampler start this many decay times before the
/// burn-in start.
pub const CLUSTER_EXTENSION_DECAYS: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Thinning,
    Cluster,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Thinning => "thinning",
            Method::Cluster => "cluster",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thinning" => Ok(Method::Thinning),
            "cluster" => Ok(Method::Cluster),
            other => Err(Error::Parse(format!("unknown simulation method `{other}`"))),
        }
    }
}

/// Event times per node over `[t_start, t_end]`, with `t_start <= 0 < t_end`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub d: usize,
    pub beta: f64,
    /// Strictly increasing times per node.
    pub events: Vec<Vec<f64>>,
    pub t_start: f64,
    pub t_end: f64,
    pub seed: u64,
    pub method: Method,
}

/// Side-car metadata written next to an event CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventMeta {
    pub d: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub seed: u64,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

impl EventLog {
    pub fn total_events(&self) -> usize {
        self.events.iter().map(Vec::len).sum()
    }

    /// Number of events of `node` in the observation window `[0, t_end]`.
    pub fn count_in_window(&self, node: usize) -> usize {
        let ev = &self.events[node];
        ev.len() - ev.partition_point(|&s| s < 0.0)
    }

    /// `X_j(t)`: the sum of `e^{-beta (t - s)}` over events `s <= t`.
    pub fn state_at(&self, node: usize, t: f64) -> Result<f64> {
        if !(t >= self.t_start && t <= self.t_end) {
            return Err(Error::OutsideWindow {
                t,
                t_start: self.t_start,
                t_end: self.t_end,
            });
        }
        let ev = &self.events[node];
        let upto = ev.partition_point(|&s| s <= t);
        Ok(ev[..upto]
            .iter()
            .map(|&s| (-self.beta * (t - s)).exp())
            .sum())
    }

    /// Relabels nodes: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut events = vec![Vec::new(); self.d];
        for (i, ev) in self.events.iter().enumerate() {
            events[perm[i]] = ev.clone();
        }
        Self {
            events,
            ..self.clone()
        }
    }

    pub fn meta(&self) -> EventMeta {
        EventMeta {
            d: self.d,
            t_start: self.t_start,
            t_end: self.t_end,
            seed: self.seed,
            method: self.method,
            beta: Some(self.beta),
        }
    }

    /// Writes `node,time` rows ordered by time (ties by node).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut rows: Vec<(f64, usize)> = self
            .events
            .iter()
            .enumerate()
            .flat_map(|(node, ev)| ev.iter().map(move |&t| (t, node)))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "time"])?;
        for (t, node) in rows {
            w.write_record([node.to_string(), format!("{t:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_files(
        &self,
        csv_path: impl AsRef<Path>,
        meta_path: impl AsRef<Path>,
    ) -> Result<()> {
        self.write_csv(std::fs::File::create(csv_path)?)?;
        let mut meta = serde_json::to_string_pretty(&self.meta())?;
        meta.push('\n');
        std::fs::write(meta_path, meta)?;
        Ok(())
    }

    /// Parses an event CSV against its metadata. `beta` overrides the value
    /// stored in the metadata, if any.
    pub fn read_csv<R: std::io::Read>(
        input: R,
        meta: &EventMeta,
        beta: Option<f64>,
    ) -> Result<Self> {
        let beta = beta.or(meta.beta).ok_or_else(|| {
            Error::Parse("decay rate beta is neither in the metadata nor given".into())
        })?;
        if !(beta > 0.0) {
            return Err(Error::Parse(format!("beta = {beta} must be positive")));
        }
        if !(meta.t_start <= 0.0 && meta.t_end > 0.0) {
            return Err(Error::Parse(format!(
                "window [{}, {}] must satisfy t_start <= 0 < t_end",
                meta.t_start, meta.t_end
            )));
        }
        let mut events = vec![Vec::new(); meta.d];
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "node" || &headers[1] != "time" {
            return Err(Error::Parse(format!(
                "expected header `node,time`, found {headers:?}"
            )));
        }
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse_err = |what: &str| Error::Parse(format!("row {}: bad {what}", line + 1));
            let node: usize = rec[0].trim().parse().map_err(|_| parse_err("node"))?;
            let t: f64 = rec[1].trim().parse().map_err(|_| parse_err("time"))?;
            if node >= meta.d {
                return Err(Error::Parse(format!(
                    "row {}: node {node} >= d = {}",
                    line + 1,
                    meta.d
                )));
            }
            if !(t >= meta.t_start && t <= meta.t_end) {
                return Err(Error::Parse(format!(
                    "row {}: time {t} outside window",
                    line + 1
                )));
            }
            events[node].push(t);
        }
        for (node, ev) in events.iter_mut().enumerate() {
            ev.sort_by(f64::total_cmp);
            if ev.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse(format!(
                    "node {node} has duplicate event times"
                )));
            }
        }
        Ok(Self {
            d: meta.d,
            beta,
            events,
            t_start: meta.t_start,
            t_end: meta.t_end,
            seed: meta.seed,
            method: meta.method,
        })
    }

    pub fn read_files(
        csv_path: impl AsRef<Path>,
        meta_path: impl AsRef<Path>,
        beta: Option<f64>,
    ) -> Result<Self> {
        let meta: EventMeta = serde_json::from_str(&std::fs::read_to_string(meta_path)?)?;
        Self::read_csv(std::fs::File::open(csv_path)?, &meta, beta)
    }
}

/// Observation horizon and burn-in for one simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub t_end: f64,
    pub burn_in: f64,
    pub seed: u64,
    pub event_cap: usize,
}

impl SimConfig {
    pub fn new(t_end: f64, burn_in: f64, seed: u64) -> Self {
        Self {
            t_end,
            burn_in,
            seed,
            event_cap: DEFAULT_EVENT_CAP,
        }
    }
}

/// `max(20/beta, 20/(beta (1 - gamma)))`.
pub fn default_burn_in(params: &HawkesParams) -> f64 {
    let gamma = params.gamma().clamp(0.0, 1.0 - 1e-9);
    f64::max(20.0 / params.beta, 20.0 / (params.beta * (1.0 - gamma)))
}

fn check_inputs(params: &HawkesParams, cfg: &SimConfig) -> Result<()> {
    let violations = validate(params);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(Error::InvalidModel(msgs.join("; ")));
    }
    if !(cfg.t_end > 0.0 && cfg.t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "T = {} must be positive",
            cfg.t_end
        )));
    }
    if !(cfg.burn_in >= 0.0 && cfg.burn_in.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "burn-in = {} must be non-negative",
            cfg.burn_in
        )));
    }
    Ok(())
}

/// Picks an index with probability proportional to the increments of the
/// cumulative weights `cum`, given `v` uniform on `[0, cum.last())`.
fn pick_cumulative(cum: &[f64], v: f64) -> usize {
    cum.partition_point(|&c| c <= v).min(cum.len() - 1)
}

fn cumulative(weights: impl IntoIterator<Item = f64>) -> Vec<f64> {
    weights
        .into_iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect()
}

fn finish(
    params: &HawkesParams,
    cfg: &SimConfig,
    mut events: Vec<Vec<f64>>,
    method: Method,
) -> EventLog {
    for ev in &mut events {
        ev.sort_by(f64::total_cmp);
        // Exact duplicates have probability zero; drop them so the per-node
        // lists stay strictly increasing.
        ev.dedup();
    }
    EventLog {
        d: params.d(),
        beta: params.beta,
        events,
        t_start: -cfg.burn_in,
        t_end: cfg.t_end,
        seed: cfg.seed,
        method,
    }
}

/// Thinning sampler started from `X = 0` at `-burn_in`.
pub fn simulate_thinning(params: &HawkesParams, cfg: &SimConfig) -> Result<EventLog> {
    check_inputs(params, cfg)?;
    let d = params.d();
    let beta = params.beta;
    let mut rng = trial_rng(cfg.seed);
    let mu_cum = cumulative(params.mu.iter().copied());
    let mu_sum = *mu_cum.last().unwrap_or(&0.0);
    let col_sums = params.theta.column_sums();
    let children = params.theta.children();
    let child_cum: Vec<Vec<f64>> = children
        .iter()
        .map(|c| cumulative(c.iter().map(|&(_, w)| w)))
        .collect();
    let sources: Vec<usize> = (0..d).filter(|&j| col_sums[j] > 0.0).collect();

    let mut events = vec![Vec::new(); d];
    let mut total = 0usize;
    // X is stored as of `x_time`; `excitation` = sum_j col_sums[j] X_j(t).
    let mut x = vec![0.0; d];
    let mut x_time = -cfg.burn_in;
    let mut excitation = 0.0;
    let mut t = -cfg.burn_in;
    if mu_sum <= 0.0 {
        return Ok(finish(params, cfg, events, Method::Thinning));
    }
    loop {
        let bound = mu_sum + excitation;
        let wait: f64 = Exp::new(bound).expect("positive rate").sample(&mut rng);
        let t_new = t + wait;
        if t_new > cfg.t_end {
            break;
        }
        excitation *= (-beta * wait).exp();
        t = t_new;
        let intensity = mu_sum + excitation;
        debug_assert!(
            intensity <= bound * (1.0 + 1e-12),
            "thinning bound violated"
        );
        let u: f64 = rng.random();
        if u * bound > intensity {
            continue;
        }
        let decay = (-beta * (t - x_time)).exp();
        for &j in &sources {
            x[j] *= decay;
        }
        x_time = t;
        excitation = sources.iter().map(|&j| col_sums[j] * x[j]).sum();
        let mut v = rng.random::<f64>() * (mu_sum + excitation);
        let node = if v < mu_sum || sources.is_empty() {
            pick_cumulative(&mu_cum, v.min(mu_sum))
        } else {
            v -= mu_sum;
            let mut chosen = None;
            for &j in &sources {
                let mass = col_sums[j] * x[j];
                if v < mass {
                    let cum = &child_cum[j];
                    let scaled = v / x[j];
                    chosen = Some(children[j][pick_cumulative(cum, scaled)].0);
                    break;
                }
                v -= mass;
            }
            // Rounding can leave v just past the last mass; take the last source.
            chosen.unwrap_or_else(|| {
                let j = *sources.last().unwrap();
                children[j].last().unwrap().0
            })
        };
        events[node].push(t);
        // Only sources enter the intensity, so only their states are tracked.
        if col_sums[node] > 0.0 {
            x[node] += 1.0;
            excitation += col_sums[node];
        }
        total += 1;
        if total > cfg.event_cap {
            return Err(Error::EventCapExceeded {
                cap: cfg.event_cap,
                time: t,
            });
        }
    }
    Ok(finish(params, cfg, events, Method::Thinning))
}

/// Branching-cluster sampler. Immigrants of node `v` arrive at rate `mu_v`
/// on `[-burn_in - 40/beta, T]`; each event of node `j` produces
/// `Poisson(theta_ij / beta)` children of node `i` at `Exp(beta)` delays.
/// Cascades are expanded breadth-first; events outside `[-burn_in, T]` are
/// discarded.
pub fn simulate_cluster(params: &HawkesParams, cfg: &SimConfig) -> Result<EventLog> {
    check_inputs(params, cfg)?;
    let d = params.d();
    let beta = params.beta;
    let mut rng = trial_rng(cfg.seed);
    let mu_cum = cumulative(params.mu.iter().copied());
    let mu_sum = *mu_cum.last().unwrap_or(&0.0);
    let offspring: Vec<Vec<(usize, Poisson<f64>)>> = params
        .theta
        .children()
        .into_iter()
        .map(|c| {
            c.into_iter()
                .map(|(i, w)| (i, Poisson::new(w / beta).expect("positive mean")))
                .collect()
        })
        .collect();
    let delay = Exp::new(beta).expect("positive decay");

    let mut events = vec![Vec::new(); d];
    let mut generated = 0usize;
    let window_start = -cfg.burn_in;
    let mut t = window_start - CLUSTER_EXTENSION_DECAYS / beta;
    let mut queue: VecDeque<(usize, f64)> = VecDeque::new();
    if mu_sum <= 0.0 {
        return Ok(finish(params, cfg, events, Method::Cluster));
    }
    let immigration = Exp::new(mu_sum).expect("positive rate");
    loop {
        t += immigration.sample(&mut rng);
        if t > cfg.t_end {
            break;
        }
        let root = pick_cumulative(&mu_cum, rng.random::<f64>() * mu_sum);
        queue.push_back((root, t));
        while let Some((j, s)) = queue.pop_front() {
            generated += 1;
            if generated > cfg.event_cap {
                return Err(Error::EventCapExceeded {
                    cap: cfg.event_cap,
                    time: s,
                });
            }
            if s >= window_start && s <= cfg.t_end {
                events[j].push(s);
            }
            for (i, poisson) in &offspring[j] {
                let n = poisson.sample(&mut rng) as usize;
                for _ in 0..n {
                    queue.push_back((*i, s + delay.sample(&mut rng)));
                }
            }
        }
    }
    Ok(finish(params, cfg, events, Method::Cluster))
}

pub fn simulate(params: &HawkesParams, cfg: &SimConfig, method: Method) -> Result<EventLog> {
    match method {
        Method::Thinning => simulate_thinning(params, cfg),
        Method::Cluster => simulate_cluster(params, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SparseInteractionMatrix;
    use approx::assert_abs_diff_eq;

    fn log_with(events: Vec<Vec<f64>>, beta: f64) -> EventLog {
        EventLog {
            d: events.len(),
            beta,
            events,
            t_start: -1.0,
            t_end: 10.0,
            seed: 0,
            method: Method::Thinning,
        }
    }

    fn poisson_params(d: usize, rate: f64) -> HawkesParams {
        HawkesParams {
            mu: vec![rate; d],
            theta: SparseInteractionMatrix::zeros(d),
            beta: 1.0,
            k: 1,
            w_minus: 1.0,
            w_plus: 1.0,
            alpha: 0.1,
        }
    }

    #[test]
    fn state_of_empty_log_is_zero() {
        let log = log_with(vec![vec![]], 1.0);
        assert_eq!(log.state_at(0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn state_single_and_double_event() {
        let ln2 = std::f64::consts::LN_2;
        let log = log_with(vec![vec![0.0]], 1.0);
        assert_abs_diff_eq!(log.state_at(0, ln2).unwrap(), 0.5, epsilon = 1e-15);
        let log = log_with(vec![vec![0.0, ln2]], 1.0);
        assert_abs_diff_eq!(log.state_at(0, ln2).unwrap(), 1.5, epsilon = 1e-15);
    }

    #[test]
    fn state_outside_window_is_error() {
        let log = log_with(vec![vec![]], 1.0);
        assert!(log.state_at(0, 11.0).is_err());
        assert!(log.state_at(0, -2.0).is_err());
    }

    #[test]
    fn simulators_are_deterministic() {
        let p = poisson_params(3, 1.0);
        let cfg = SimConfig::new(50.0, 5.0, 42);
        assert_eq!(
            simulate_thinning(&p, &cfg).unwrap(),
            simulate_thinning(&p, &cfg).unwrap()
        );
        assert_eq!(
            simulate_cluster(&p, &cfg).unwrap(),
            simulate_cluster(&p, &cfg).unwrap()
        );
    }

    #[test]
    fn logs_respect_window_and_ordering() {
        let p = HawkesParams {
            mu: vec![0.5, 1.0, 0.7],
            theta: SparseInteractionMatrix::from_triples(
                3,
                [(0, 1, 0.3), (1, 2, 0.3), (2, 2, 0.3)],
            )
            .unwrap(),
            beta: 1.0,
            k: 1,
            w_minus: 1.0,
            w_plus: 1.0,
            alpha: 0.3,
        };
        for method in [Method::Thinning, Method::Cluster] {
            let log = simulate(&p, &SimConfig::new(200.0, 20.0, 3), method).unwrap();
            assert_eq!(log.method, method);
            for ev in &log.events {
                assert!(ev.windows(2).all(|w| w[0] < w[1]));
                assert!(ev.iter().all(|&t| (-20.0..=200.0).contains(&t)));
            }
            assert!(log.total_events() > 100);
        }
    }

    #[test]
    fn longer_horizon_extends_shorter_one() {
        let p = HawkesParams {
            mu: vec![1.0, 1.0],
            theta: SparseInteractionMatrix::from_triples(2, [(0, 1, 0.4), (1, 0, 0.4)]).unwrap(),
            beta: 1.0,
            k: 1,
            w_minus: 1.0,
            w_plus: 1.0,
            alpha: 0.4,
        };
        for method in [Method::Thinning, Method::Cluster] {
            let short = simulate(&p, &SimConfig::new(100.0, 10.0, 9), method).unwrap();
            let long = simulate(&p, &SimConfig::new(300.0, 10.0, 9), method).unwrap();
            for (a, b) in short.events.iter().zip(&long.events) {
                let prefix: Vec<f64> = b.iter().copied().filter(|&t| t <= 100.0).collect();
                assert_eq!(a, &prefix, "{method}");
            }
        }
    }

    #[test]
    fn event_cap_aborts() {
        let p = poisson_params(2, 10.0);
        let mut cfg = SimConfig::new(100.0, 0.0, 1);
        cfg.event_cap = 50;
        for method in [Method::Thinning, Method::Cluster] {
            assert!(matches!(
                simulate(&p, &cfg, method),
                Err(Error::EventCapExceeded { .. })
            ));
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let p = poisson_params(2, 1.0);
        assert!(simulate_thinning(&p, &SimConfig::new(0.0, 1.0, 0)).is_err());
        assert!(simulate_cluster(&p, &SimConfig::new(1.0, -1.0, 0)).is_err());
        let mut bad = p.clone();
        bad.mu[0] = -1.0;
        assert!(simulate_cluster(&bad, &SimConfig::new(1.0, 1.0, 0)).is_err());
    }

    #[test]
    fn default_burn_in_follows_gamma() {
        let mut p = poisson_params(1, 1.0);
        p.beta = 2.0;
        p.alpha = 0.5;
        p.k = 2; // gamma = 0.5
        assert_abs_diff_eq!(default_burn_in(&p), 20.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let p = poisson_params(4, 2.0);
        let log = simulate_cluster(&p, &SimConfig::new(20.0, 3.0, 77)).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("node,time\n"));
        let back = EventLog::read_csv(buf.as_slice(), &log.meta(), None).unwrap();
        assert_eq!(back, log);
        let mut again = Vec::new();
        back.write_csv(&mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn csv_rejects_out_of_range_rows() {
        let meta = EventMeta {
            d: 2,
            t_start: -1.0,
            t_end: 5.0,
            seed: 0,
            method: Method::Cluster,
            beta: Some(1.0),
        };
        assert!(EventLog::read_csv("node,time\n2,1.0\n".as_bytes(), &meta, None).is_err());
        assert!(EventLog::read_csv("node,time\n0,6.0\n".as_bytes(), &meta, None).is_err());
        assert!(EventLog::read_csv("node,t\n0,1.0\n".as_bytes(), &meta, None).is_err());
        let no_beta = EventMeta {
            beta: None,
            ..meta.clone()
        };
        assert!(EventLog::read_csv("node,time\n0,1.0\n".as_bytes(), &no_beta, None).is_err());
        assert!(EventLog::read_csv("node,time\n0,1.0\n".as_bytes(), &no_beta, Some(2.0)).is_ok());
    }
}
