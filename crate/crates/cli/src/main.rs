use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hawknet::moments::{screening_gap_bound, StationaryMoments};
use hawknet::sweep::{fit_json, write_results_csv, write_thresholds_csv};
use hawknet::{
    bin_and_clip, fano_curve, fano_error_floor, kl_budget, population_screening_scores, recover,
    run_sweep, screening_gap, simulate, validate, ClassSpec, EstimatorConfig, EventLog, FanoInputs,
    HawkesParams, Method, SimConfig, SubclassSpec, SweepSpec,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "hawknet",
    version,
    about = "Sparse Hawkes network simulation, recovery and lower bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a model instance and write it as JSON.
    Model(ModelArgs),
    /// Simulate events from a model file.
    Simulate(SimulateArgs),
    /// Recover the interaction network from an event file.
    Recover(RecoverArgs),
    /// Run a Monte-Carlo recovery sweep.
    Sweep(SweepArgs),
    /// Evaluate the Fano error floor.
    Fano(FanoArgs),
    /// Print stationary moments, population screening scores and gaps.
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Random,
    Subclass,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "random")]
    kind: ModelKind,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    w_minus: f64,
    #[arg(long, default_value_t = 1.0)]
    w_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    mu_minus: f64,
    #[arg(long, default_value_t = 1.0)]
    mu_plus: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Subclass: parent weight (defaults to alpha * w_minus).
    #[arg(long)]
    theta_minus: Option<f64>,
    /// Subclass: background rate of non-target nodes (defaults to mu_minus).
    #[arg(long)]
    mu_bar: Option<f64>,
    /// Subclass: background rate of the target node (defaults to mu_bar).
    #[arg(long)]
    mu_bar_star: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "T")]
    t: f64,
    /// Burn-in length; defaults to max(20/beta, 20/(beta (1 - gamma))).
    #[arg(long)]
    burn_in: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "thinning")]
    method: Method,
    #[arg(long, default_value_t = hawknet::simulate::DEFAULT_EVENT_CAP)]
    event_cap: usize,
    #[arg(long)]
    out: PathBuf,
    /// Metadata side-car; defaults to the output path with extension `.meta.json`.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long)]
    meta: PathBuf,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long = "R")]
    clip: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    /// Derive h, R, m and tau from alpha, w_minus and k.
    #[arg(long)]
    auto: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    w_minus: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    /// Decay rate; overrides the value stored in the metadata.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Search T*(d) by bisection instead of evaluating the T grid.
    #[arg(long)]
    threshold_mode: bool,
    #[arg(long)]
    jobs: Option<usize>,
    /// Threshold table; defaults to `thresholds.csv` next to `--out`.
    #[arg(long)]
    thresholds: Option<PathBuf>,
    /// Log-fit summary; defaults to `fit.json` next to `--out`.
    #[arg(long)]
    fit: Option<PathBuf>,
}

#[derive(Args)]
struct FanoArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long = "T")]
    t: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    mu_bar: f64,
    #[arg(long)]
    mu_bar_star: f64,
    #[arg(long)]
    theta_minus: f64,
    /// Upper bound on the initial-state divergence. 0 gives an optimistic floor.
    #[arg(long, default_value_t = 0.0)]
    c_init: f64,
    /// Curve over `T0:T1:steps`, written to `--out`.
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Error that maps onto a specific process exit code.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

fn classify(err: anyhow::Error) -> Exit {
    let code = match err.downcast_ref::<hawknet::Error>() {
        Some(hawknet::Error::EventCapExceeded { .. }) => 3,
        Some(
            hawknet::Error::InvalidParameter(_)
            | hawknet::Error::InvalidModel(_)
            | hawknet::Error::Json(_)
            | hawknet::Error::Parse(_)
            | hawknet::Error::DimensionMismatch { .. },
        ) => 2,
        _ => 1,
    };
    Exit(code, err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Model(a) => model(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Recover(a) => recover_cmd(a),
        Command::Sweep(a) => sweep(a),
        Command::Fano(a) => fano(a),
        Command::Oracle(a) => oracle(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let Exit(code, err) = classify(err);
            eprintln!("error: {err:#}");
            ExitCode::from(code)
        }
    }
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn model(a: ModelArgs) -> anyhow::Result<()> {
    let params = match a.kind {
        ModelKind::Random => ClassSpec {
            d: a.d,
            k: a.k,
            alpha: a.alpha,
            w_minus: a.w_minus,
            w_plus: a.w_plus,
            mu_minus: a.mu_minus,
            mu_plus: a.mu_plus,
            beta: a.beta,
        }
        .sample(a.seed)?,
        ModelKind::Subclass => {
            let mu_bar = a.mu_bar.unwrap_or(a.mu_minus);
            SubclassSpec {
                d: a.d,
                k: a.k,
                theta_minus: a.theta_minus.unwrap_or(a.alpha * a.w_minus),
                mu_bar,
                mu_bar_star: a.mu_bar_star.unwrap_or(mu_bar),
                beta: a.beta,
            }
            .sample(a.seed)?
        }
    };
    params.write(&a.out)?;
    Ok(())
}

fn load_model(path: &Path) -> anyhow::Result<HawkesParams> {
    let params =
        HawkesParams::read(path).with_context(|| format!("reading model {}", path.display()))?;
    let violations = validate(&params);
    if !violations.is_empty() {
        let msgs: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(hawknet::Error::InvalidModel(msgs.join("; ")).into());
    }
    Ok(params)
}

fn simulate_cmd(a: SimulateArgs) -> anyhow::Result<()> {
    let params = load_model(&a.model)?;
    let cfg = SimConfig {
        t_end: a.t,
        burn_in: a
            .burn_in
            .unwrap_or_else(|| hawknet::default_burn_in(&params)),
        seed: a.seed,
        event_cap: a.event_cap,
    };
    let log = simulate(&params, &cfg, a.method)?;
    let meta = a.meta.unwrap_or_else(|| a.out.with_extension("meta.json"));
    log.write_files(&a.out, &meta)?;
    Ok(())
}

fn recover_cmd(a: RecoverArgs) -> anyhow::Result<()> {
    let log = EventLog::read_files(&a.events, &a.meta, a.beta)?;
    let cfg = if a.auto {
        let (Some(alpha), Some(w_minus), Some(k)) = (a.alpha, a.w_minus, a.k) else {
            return Err(hawknet::Error::InvalidParameter(
                "--auto needs --alpha, --w-minus and --k".into(),
            )
            .into());
        };
        let auto = EstimatorConfig::auto(alpha, w_minus, k, 1.0, 1.0)?;
        EstimatorConfig::explicit(
            a.h.unwrap_or(auto.h),
            a.clip.unwrap_or(auto.clip),
            a.m.unwrap_or(auto.m),
            a.tau.unwrap_or(auto.tau),
        )?
    } else {
        let (Some(h), Some(clip), Some(m), Some(tau)) = (a.h, a.clip, a.m, a.tau) else {
            return Err(hawknet::Error::InvalidParameter(
                "need --h, --R, --m and --tau (or --auto)".into(),
            )
            .into());
        };
        EstimatorConfig::explicit(h, clip, m, tau)?
    };
    let sample = bin_and_clip(&log, cfg.h, cfg.clip)?;
    let net = recover(&sample, &cfg)?;
    write_text(&a.out, &pretty(&net))
}

fn sweep(a: SweepArgs) -> anyhow::Result<()> {
    let mut spec = SweepSpec::read(&a.spec)
        .with_context(|| format!("reading sweep spec {}", a.spec.display()))?;
    if a.jobs.is_some() {
        spec.jobs = a.jobs;
    }
    let result = run_sweep(&spec, a.threshold_mode)?;
    let mut out = BufWriter::new(
        File::create(&a.out).with_context(|| format!("creating {}", a.out.display()))?,
    );
    write_results_csv(&result.cells, &mut out)?;
    out.flush()?;
    if a.threshold_mode {
        let dir = a.out.parent().unwrap_or(Path::new("."));
        let thresholds = a.thresholds.unwrap_or_else(|| dir.join("thresholds.csv"));
        write_thresholds_csv(&result.thresholds, File::create(&thresholds)?)?;
        for e in result.thresholds.iter().filter(|e| e.grid_fallback) {
            eprintln!(
                "warning: d = {}: non-monotone success rates, T* taken from a grid scan",
                e.d
            );
        }
        if let Some(fit) = result.fit {
            write_text(
                &a.fit.unwrap_or_else(|| dir.join("fit.json")),
                &fit_json(&fit),
            )?;
        }
    }
    Ok(())
}

fn parse_curve(s: &str) -> anyhow::Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        bail!(hawknet::Error::InvalidParameter(format!(
            "--curve expects T0:T1:steps, got `{s}`"
        )));
    }
    let bad =
        || hawknet::Error::InvalidParameter(format!("--curve expects T0:T1:steps, got `{s}`"));
    Ok((
        parts[0].parse().map_err(|_| bad())?,
        parts[1].parse().map_err(|_| bad())?,
        parts[2].parse().map_err(|_| bad())?,
    ))
}

fn fano(a: FanoArgs) -> anyhow::Result<()> {
    let inputs = FanoInputs {
        d: a.d,
        k: a.k,
        t: a.t,
        beta: a.beta,
        mu_bar: a.mu_bar,
        mu_bar_star: a.mu_bar_star,
        theta_minus: a.theta_minus,
        c_init: a.c_init,
    };
    let summary = json!({
        "d": inputs.d,
        "k": inputs.k,
        "T": inputs.t,
        "kl_budget": kl_budget(&inputs)?,
        "error_floor": fano_error_floor(&inputs)?,
        "optimistic": inputs.is_optimistic(),
    });
    print!("{}", pretty(&summary));
    if let Some(curve) = a.curve {
        let (t0, t1, steps) = parse_curve(&curve)?;
        let Some(path) = a.out else {
            return Err(hawknet::Error::InvalidParameter("--curve needs --out".into()).into());
        };
        let points = fano_curve(&inputs, t0, t1, steps)?;
        let mut w = BufWriter::new(File::create(&path)?);
        writeln!(w, "T,error_floor")?;
        for (t, floor) in points {
            writeln!(w, "{t},{floor}")?;
        }
        w.flush()?;
    }
    Ok(())
}

fn oracle(a: OracleArgs) -> anyhow::Result<()> {
    let params = load_model(&a.model)?;
    let moments = StationaryMoments::compute(&params)?;
    let g = population_screening_scores(&params, &moments.sigma);
    let gaps = screening_gap(&g, &params.support());
    let mu_minus = params.mu.iter().copied().fold(f64::INFINITY, f64::min);
    let report = json!({
        "d": params.d(),
        "gamma": params.gamma(),
        "m": moments.m,
        "lambda_bar": moments.lambda_bar,
        "sigma": moments.sigma,
        "G": g,
        "gaps": gaps,
        "gap_bound": screening_gap_bound(mu_minus, params.w_minus, params.alpha, params.beta),
    });
    let text = pretty(&report);
    match a.out {
        Some(path) => write_text(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
