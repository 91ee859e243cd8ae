use hawknet::{
    bin_and_clip, critical_time, evaluate, fit_log_scaling, recover, simulate_cluster, ClassSpec,
    EstimatorConfig, FanoInputs, SimConfig, SubclassSpec,
};

#[test]
fn coefficients_track_weights_at_long_horizons() {
    let spec = SubclassSpec {
        d: 8,
        k: 2,
        theta_minus: 0.2,
        mu_bar: 1.0,
        mu_bar_star: 1.0,
        beta: 1.0,
    };
    let p = spec.build(3, &[1, 6]).unwrap();
    let cfg = EstimatorConfig::explicit(0.04, 5.0, 4, 0.004).unwrap();
    let log = simulate_cluster(&p, &SimConfig::new(20_000.0, 50.0, 17)).unwrap();
    let net = recover(&bin_and_clip(&log, cfg.h, cfg.clip).unwrap(), &cfg).unwrap();
    let row = &net.rows[3];
    for parent in [1, 6] {
        let pos = row
            .candidates
            .iter()
            .position(|&j| j == parent)
            .expect("parent screened in");
        // Binning attenuates the one-bin slope below theta h.
        let slope = row.coeffs[pos] / cfg.h;
        assert!(
            slope > 0.1 && slope < 0.25,
            "parent {parent}: slope {slope}"
        );
    }
    assert_eq!(row.support, vec![1, 6]);
    assert!(evaluate(&net, &p.support()).unwrap().exact);
}

#[test]
fn sure_screening_on_random_instances() {
    let class = ClassSpec {
        d: 20,
        k: 2,
        alpha: 0.2,
        w_minus: 1.0,
        w_plus: 1.0,
        mu_minus: 1.0,
        mu_plus: 1.0,
        beta: 1.0,
    };
    let cfg = EstimatorConfig::auto(0.2, 1.0, 2, 1.0, 1.0).unwrap();
    for seed in 0..3 {
        let p = class.sample(seed).unwrap();
        let log = simulate_cluster(&p, &SimConfig::new(8000.0, 50.0, seed + 100)).unwrap();
        let net = recover(&bin_and_clip(&log, cfg.h, cfg.clip).unwrap(), &cfg).unwrap();
        let truth = p.support();
        for row in &net.rows {
            for parent in truth.row(row.i) {
                assert!(
                    row.candidates.contains(parent),
                    "seed {seed}, row {}",
                    row.i
                );
            }
        }
    }
}

#[test]
fn critical_time_is_linear_in_log_d() {
    let base = FanoInputs {
        d: 0,
        k: 1,
        t: 0.0,
        beta: 1.0,
        mu_bar: 1.0,
        mu_bar_star: 1.0,
        theta_minus: 0.2,
        c_init: 0.0,
    };
    let points: Vec<(usize, f64)> = [100, 1_000, 10_000, 100_000]
        .iter()
        .map(|&d| (d, critical_time(&FanoInputs { d, ..base }, 0.5).unwrap()))
        .collect();
    let fit = fit_log_scaling(&points).unwrap();
    assert!(fit.slope > 0.0);
    assert!(fit.r2 >= 0.999, "r2 = {}", fit.r2);
}
