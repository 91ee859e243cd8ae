//! Sparse multivariate exponential Hawkes processes: simulation, two-stage
//! network recovery, stationary-moment oracles and Fano error floors.
//!
//! Typical pipeline:
//!
//! ```no_run
//! use hawknet::{bin_and_clip, evaluate, recover, simulate_cluster, ClassSpec, EstimatorConfig, SimConfig};
//!
//! let class = ClassSpec { d: 20, k: 2, alpha: 0.2, w_minus: 1.0, w_plus: 1.0,
//!                         mu_minus: 1.0, mu_plus: 1.0, beta: 1.0 };
//! let params = class.sample(7)?;
//! let log = simulate_cluster(&params, &SimConfig::new(2000.0, 50.0, 11))?;
//! let cfg = EstimatorConfig::auto(0.2, 1.0, 2, 1.0, 1.0)?;
//! let net = recover(&bin_and_clip(&log, cfg.h, cfg.clip)?, &cfg)?;
//! println!("exact: {}", evaluate(&net, &params.support())?.exact);
//! # Ok::<(), hawknet::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binning;
pub mod bounds;
pub mod error;
pub mod estimator;
pub mod model;
pub mod moments;
pub mod rng;
pub mod simulate;
pub mod sweep;

pub use binning::{bin_and_clip, BinnedSample};
pub use bounds::{critical_time, fano_curve, fano_error_floor, kl_budget, ln_binomial, FanoInputs};
pub use error::{Error, Result};
pub use estimator::{
    evaluate, local_least_squares, recover, screening_scores, select_candidates, threshold_support,
    EstimatorConfig, EstimatorSpec, LocalFit, RecoveredNetwork, RecoveryMetrics, RowEstimate,
};
pub use model::{
    build_subclass_instance, sample_random_instance, support_of, validate, ClassSpec, HawkesParams,
    SparseInteractionMatrix, SubclassSpec, TrueSupport, Violation,
};
pub use moments::{
    c_path, population_screening_scores, screening_gap, stationary_covariance, stationary_mean,
    StationaryMoments,
};
pub use simulate::{
    default_burn_in, simulate, simulate_cluster, simulate_thinning, EventLog, EventMeta, Method,
    SimConfig,
};
pub use sweep::{
    bisect_threshold, estimate_threshold_time, fit_log_scaling, run_cell, run_sweep, BisectionSpec,
    CellResult, LogFit, ModelGen, SweepResult, SweepSpec, ThresholdEstimate,
};
