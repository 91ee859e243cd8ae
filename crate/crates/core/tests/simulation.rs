mod oracle;

use hawknet::{
    bin_and_clip, simulate, simulate_cluster, simulate_thinning, stationary_mean, HawkesParams,
    Method, SimConfig, SparseInteractionMatrix, SubclassSpec,
};

fn params(mu: Vec<f64>, beta: f64, triples: &[(usize, usize, f64)]) -> HawkesParams {
    let d = mu.len();
    let theta = SparseInteractionMatrix::from_triples(d, triples.iter().copied()).unwrap();
    let alpha = triples.iter().map(|t| t.2).fold(0.0, f64::max).max(1e-3);
    let lightest = triples.iter().map(|t| t.2).fold(alpha, f64::min);
    HawkesParams {
        mu,
        theta,
        beta,
        k: 1,
        w_minus: lightest / alpha,
        w_plus: 1.0,
        alpha,
    }
}

/// Largest per-node deviation of `count / T` from `beta m`, in asymptotic
/// standard errors.
fn worst_rate_z(p: &HawkesParams, method: Method, t: f64, burn_in: f64, seed: u64) -> f64 {
    let log = simulate(p, &SimConfig::new(t, burn_in, seed), method).unwrap();
    let lambda: Vec<f64> = oracle::mean(p).iter().map(|m| p.beta * m).collect();
    let var_rate = oracle::count_variance_rate(p, &lambda);
    (0..p.d())
        .map(|i| {
            let rate = log.count_in_window(i) as f64 / t;
            (rate - lambda[i]).abs() / (var_rate[i] / t).sqrt()
        })
        .fold(0.0, f64::max)
}

#[test]
fn poisson_rates() {
    let p = params(vec![0.5, 1.0, 3.0], 1.0, &[]);
    for method in [Method::Thinning, Method::Cluster] {
        assert!(worst_rate_z(&p, method, 2000.0, 0.0, 1) < 3.0);
    }
}

#[test]
fn self_exciting_scalar_rate() {
    let p = params(vec![1.0], 2.0, &[(0, 0, 1.0)]);
    assert!((stationary_mean(&p).unwrap()[0] * p.beta - 2.0).abs() < 1e-10);
    for method in [Method::Thinning, Method::Cluster] {
        assert!(worst_rate_z(&p, method, 2000.0, 50.0, 2) < 3.0);
    }
}

#[test]
fn mean_cluster_size() {
    // Root rate 1 over 10^4 time units: about 10^4 clusters of mean size 1 / (1 - gamma).
    let gamma = 0.5;
    let p = params(vec![1.0], 1.0, &[(0, 0, gamma)]);
    let t = 1e4;
    let log = simulate_cluster(&p, &SimConfig::new(t, 40.0, 3)).unwrap();
    let per_root = log.count_in_window(0) as f64 / t;
    // Var N(T) / T = mu / (1 - gamma)^3.
    let se = (1.0 / (1.0 - gamma).powi(3) / t).sqrt();
    assert!((per_root - 1.0 / (1.0 - gamma)).abs() < 3.0 * se);
}

#[test]
fn subclass_target_rate() {
    let spec = SubclassSpec {
        d: 3,
        k: 2,
        theta_minus: 0.3,
        mu_bar: 1.0,
        mu_bar_star: 0.5,
        beta: 1.0,
    };
    let p = spec.build(0, &[1, 2]).unwrap();
    let t = 2000.0;
    let log = simulate_cluster(&p, &SimConfig::new(t, 50.0, 4)).unwrap();
    let want = spec.mu_bar_star + spec.theta_minus * 2.0 * spec.mu_bar / spec.beta;
    let lambda: Vec<f64> = oracle::mean(&p).iter().map(|m| p.beta * m).collect();
    assert!((lambda[0] - want).abs() < 1e-10);
    let se = (oracle::count_variance_rate(&p, &lambda)[0] / t).sqrt();
    assert!((log.count_in_window(0) as f64 / t - want).abs() < 3.0 * se);
}

#[test]
fn thinning_and_cluster_agree_on_poisson_counts() {
    let p = params(vec![0.7, 1.3], 1.0, &[]);
    let trials = 200;
    let counts = |method: Method| -> Vec<Vec<f64>> {
        (0..trials)
            .map(|s| {
                let log = simulate(&p, &SimConfig::new(20.0, 0.0, 1000 + s), method).unwrap();
                (0..2).map(|i| log.count_in_window(i) as f64).collect()
            })
            .collect()
    };
    let a = counts(Method::Thinning);
    let b = counts(Method::Cluster);
    for i in 0..2 {
        let (ma, va) = oracle::sample_mean_var(&a.iter().map(|c| c[i]).collect::<Vec<_>>());
        let (mb, vb) = oracle::sample_mean_var(&b.iter().map(|c| c[i]).collect::<Vec<_>>());
        let se = ((va + vb) / trials as f64).sqrt();
        assert!((ma - mb).abs() < 3.0 * se, "node {i}: {ma} vs {mb}");
    }
}

#[test]
fn independent_state_variance() {
    let p = params(vec![2.0, 3.0, 4.0], 1.0, &[]);
    let t = 5000.0;
    let log = simulate_thinning(&p, &SimConfig::new(t, 30.0, 5)).unwrap();
    let sample = bin_and_clip(&log, 0.5, f64::MAX).unwrap();
    for j in 0..3 {
        let (_, var) = oracle::sample_mean_var(sample.z_col(j));
        let want = p.mu[j] / (2.0 * p.beta);
        assert!((var / want - 1.0).abs() < 0.05, "node {j}: {var} vs {want}");
    }
}

#[test]
fn prefix_nesting_in_horizon() {
    let p = params(vec![1.0, 0.5], 1.0, &[(0, 1, 0.4), (1, 0, 0.3)]);
    for method in [Method::Thinning, Method::Cluster] {
        let long = simulate(&p, &SimConfig::new(200.0, 20.0, 6), method).unwrap();
        let short = simulate(&p, &SimConfig::new(100.0, 20.0, 6), method).unwrap();
        for i in 0..2 {
            let prefix: Vec<f64> = long.events[i]
                .iter()
                .copied()
                .filter(|&s| s <= 100.0)
                .collect();
            assert_eq!(prefix, short.events[i]);
        }
    }
}
