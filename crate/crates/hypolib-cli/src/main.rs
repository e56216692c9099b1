//! Batch front end: distances, approximation runs, estimation, experiments.
//!
//! Every run emits a versioned JSON report embedding the exact parameters
//! used; identical configuration and seed produce byte-identical reports.
//! Exit codes: 0 success, 2 validation error, 3 computation error.

mod docs;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use hypolib::approx::{
    cover_params_with, hypo_approx_sequence, packing_family_capped, verify_packing_separation,
    FitOptions,
};
use hypolib::estimate::{
    level_set_member, rate_experiment, saa_solve, sample_average, ExperimentConfig, Objective,
    Sample, SolveOptions,
};
use hypolib::metric::{aux_dist_rho, aw_dist, aw_dist_rho};
use hypolib::HypoError;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Computation(HypoError),
}

impl From<HypoError> for CliError {
    fn from(e: HypoError) -> Self {
        match e {
            HypoError::Parse { .. } | HypoError::Schema(_) => {
                CliError::Validation(e.to_string())
            }
            other => CliError::Computation(other),
        }
    }
}

#[derive(Parser)]
#[command(name = "hypolib", version, about = "Grid usc functions under the Attouch-Wets hypo-distance: distances, approximations, estimation")]
struct Cli {
    /// Worker-pool size for pairwise and replication loops
    /// (fallback: HYPOLIB_THREADS; outputs do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attouch-Wets distance between two grid functions.
    Dist(DistArgs),
    /// Approximation constructions.
    #[command(subcommand)]
    Approx(ApproxCommand),
    /// Solve a sample-average estimation problem over a class.
    Estimate(EstimateArgs),
    /// Level-set membership of a candidate at a given height.
    Confidence(ConfidenceArgs),
    /// Convergence-rate experiment from a JSON configuration.
    Rate(RateArgs),
}

#[derive(Subcommand)]
enum ApproxCommand {
    /// Truncate / smooth / fit pipeline along a schedule.
    Pipeline(PipelineArgs),
    /// Covering-construction constants and derived quantities.
    Cover(CoverArgs),
    /// Packing family enumeration with optional separation check.
    Pack(PackArgs),
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Report<P: Serialize, R: Serialize> {
    command: String,
    inputs: BTreeMap<String, String>,
    parameters: P,
    results: R,
    version: &'static str,
    seed: Option<u64>,
}

fn emit<P: Serialize, R: Serialize>(report: &Report<P, R>, out: Option<&Path>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Validation(e.to_string()))? + "\n";
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(
    path: Option<&Path>,
) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => serde_json::from_str(&docs::read_to_string(p)?)
            .map_err(|e| CliError::Validation(format!("{}: {e}", p.display()))),
    }
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Validation(format!("missing required parameter `{flag}`")))
}

// ---------------------------------------------------------------- dist

#[derive(Args)]
struct DistArgs {
    /// First function (CSV).
    #[arg(long)]
    f: Option<PathBuf>,
    /// Second function (CSV).
    #[arg(long)]
    g: Option<PathBuf>,
    /// Also report the truncated and auxiliary distances at this radius.
    #[arg(long)]
    rho: Option<f64>,
    /// Error tolerance for the integrated distance.
    #[arg(long)]
    tol: Option<f64>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config supplying defaults for any of the above (flags win).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
struct DistConfig {
    f: Option<String>,
    g: Option<String>,
    rho: Option<f64>,
    tol: Option<f64>,
    out: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DistParams {
    rho: Option<f64>,
    tol: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DistResults {
    dl: hypolib::metric::DistReport,
    dl_rho: Option<f64>,
    aux_rho: Option<f64>,
}

fn run_dist(args: DistArgs) -> Result<(), CliError> {
    let cfg: DistConfig = load_config(args.config.as_deref())?;
    let f_path = require(args.f.or(cfg.f.map(PathBuf::from)), "--f")?;
    let g_path = require(args.g.or(cfg.g.map(PathBuf::from)), "--g")?;
    let rho = args.rho.or(cfg.rho);
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-4);
    let out = args.out.or(cfg.out.map(PathBuf::from));

    let f = docs::load_gridfn(&f_path)?;
    let g = docs::load_gridfn(&g_path)?;
    let dl = aw_dist(&f, &g, tol)?;
    let (dl_rho, aux_rho) = match rho {
        Some(r) => (
            Some(aw_dist_rho(&f, &g, r)?),
            Some(aux_dist_rho(&f, &g, r)?),
        ),
        None => (None, None),
    };
    let report = Report {
        command: "dist".into(),
        inputs: BTreeMap::from([
            ("f".to_string(), f_path.display().to_string()),
            ("g".to_string(), g_path.display().to_string()),
        ]),
        parameters: DistParams { rho, tol },
        results: DistResults { dl, dl_rho, aux_rho },
        version: hypolib::SCHEMA,
        seed: None,
    };
    emit(&report, out.as_deref())
}

// ---------------------------------------------------------------- approx pipeline

#[derive(Args)]
struct PipelineArgs {
    /// Target function (CSV).
    #[arg(long)]
    target: Option<PathBuf>,
    /// Schedule document (JSON).
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Directory for per-stage CSV outputs.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Distance tolerance for the per-stage reports.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the fitting restarts.
    #[arg(long)]
    seed: Option<u64>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
struct PipelineConfig {
    target: Option<String>,
    schedule: Option<String>,
    out_dir: Option<String>,
    tol: Option<f64>,
    seed: Option<u64>,
    out: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PipelineParams {
    schedule: Vec<StageParam>,
    tol: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StageParam {
    cap: Option<f64>,
    lambda: f64,
    rho: f64,
    q: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StageOut {
    dl_to_target: f64,
    fit_residual: f64,
    csv: String,
    pieces: usize,
}

fn run_pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let cfg: PipelineConfig = load_config(args.config.as_deref())?;
    let target_path = require(args.target.or(cfg.target.map(PathBuf::from)), "--target")?;
    let schedule_path = require(args.schedule.or(cfg.schedule.map(PathBuf::from)), "--schedule")?;
    let out_dir = require(args.out_dir.or(cfg.out_dir.map(PathBuf::from)), "--out-dir")?;
    let tol = args.tol.or(cfg.tol).unwrap_or(1e-4);
    let seed = require(args.seed.or(cfg.seed), "--seed")?;
    let out = args.out.or(cfg.out.map(PathBuf::from));

    let target = docs::load_gridfn(&target_path)?;
    let schedule = docs::load_schedule(&schedule_path)?;
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", out_dir.display())))?;

    let results = hypo_approx_sequence(
        &target,
        &schedule,
        tol,
        &FitOptions { seed, ..Default::default() },
    )?;
    let mut stage_outs = Vec::new();
    for (i, stage) in results.iter().enumerate() {
        let csv_path = out_dir.join(format!("stage_{}.csv", i + 1));
        let sampled = stage.pa.to_gridfn(target.domain().clone())?;
        fs::write(&csv_path, sampled.to_csv_string())
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", csv_path.display())))?;
        stage_outs.push(StageOut {
            dl_to_target: stage.dl_to_target,
            fit_residual: stage.fit_residual,
            csv: csv_path.display().to_string(),
            pieces: stage.pa.piece_budget(),
        });
    }
    let report = Report {
        command: "approx pipeline".into(),
        inputs: BTreeMap::from([
            ("target".to_string(), target_path.display().to_string()),
            ("schedule".to_string(), schedule_path.display().to_string()),
        ]),
        parameters: PipelineParams {
            schedule: schedule
                .stages()
                .iter()
                .map(|s| StageParam {
                    cap: if s.cap.is_finite() { Some(s.cap) } else { None },
                    lambda: s.lambda,
                    rho: s.rho,
                    q: s.q,
                })
                .collect(),
            tol,
        },
        results: stage_outs,
        version: hypolib::SCHEMA,
        seed: Some(seed),
    };
    emit(&report, out.as_deref())
}

// ---------------------------------------------------------------- approx cover

#[derive(Args)]
struct CoverArgs {
    /// Dimension of the underlying set.
    #[arg(long)]
    n: Option<usize>,
    /// Cover radius.
    #[arg(long)]
    eps: Option<f64>,
    /// Class bound on the origin-to-hypograph distance.
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    gamma1: Option<f64>,
    #[arg(long)]
    gamma2: Option<f64>,
    #[arg(long)]
    gamma3: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    /// Explicit eps-bar override (also unlocks omega <= 1), for reproducing
    /// reported spot values.
    #[arg(long)]
    eps_bar: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
struct CoverConfig {
    n: Option<usize>,
    eps: Option<f64>,
    r: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    gamma3: Option<f64>,
    omega: Option<f64>,
    eps_bar: Option<f64>,
    out: Option<String>,
}

fn run_cover(args: CoverArgs) -> Result<(), CliError> {
    let cfg: CoverConfig = load_config(args.config.as_deref())?;
    let n = args.n.or(cfg.n).unwrap_or(1);
    let eps = require(args.eps.or(cfg.eps), "--eps")?;
    let r = require(args.r.or(cfg.r), "--r")?;
    let g1 = args.gamma1.or(cfg.gamma1).unwrap_or(1.0 / 3.0);
    let g2 = args.gamma2.or(cfg.gamma2).unwrap_or(1.0 / 3.0);
    let g3 = args.gamma3.or(cfg.gamma3).unwrap_or(1.0 / 3.0);
    let omega = args.omega.or(cfg.omega).unwrap_or(1.001);
    let eps_bar = args.eps_bar.or(cfg.eps_bar);
    let out = args.out.or(cfg.out.map(PathBuf::from));

    if eps_bar.is_none() && omega <= 1.0 {
        return Err(CliError::Validation(
            "omega <= 1 requires an explicit --eps-bar (compatibility mode)".into(),
        ));
    }
    let params = cover_params_with(n, eps, r, [g1, g2, g3], omega, eps_bar)?;
    let report = Report {
        command: "approx cover".into(),
        inputs: BTreeMap::new(),
        parameters: serde_json::json!({
            "n": n, "eps": eps, "r": r,
            "gamma": [g1, g2, g3], "omega": omega, "epsBar": eps_bar,
        }),
        results: params,
        version: hypolib::SCHEMA,
        seed: None,
    };
    emit(&report, out.as_deref())
}

// ---------------------------------------------------------------- approx pack

#[derive(Args)]
struct PackArgs {
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    /// Check pairwise separation exhaustively.
    #[arg(long)]
    verify: bool,
    /// Enumeration cap on the member count.
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
struct PackConfig {
    rho: Option<f64>,
    eps: Option<f64>,
    n: Option<usize>,
    verify: Option<bool>,
    cap: Option<u64>,
    out: Option<String>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PackResults {
    members: usize,
    nu_eps: u64,
    separation: Option<hypolib::approx::SeparationReport>,
}

fn run_pack(args: PackArgs) -> Result<(), CliError> {
    let cfg: PackConfig = load_config(args.config.as_deref())?;
    let rho = require(args.rho.or(cfg.rho), "--rho")?;
    let eps = require(args.eps.or(cfg.eps), "--eps")?;
    let n = require(args.n.or(cfg.n), "--n")?;
    let verify = args.verify || cfg.verify.unwrap_or(false);
    let cap = args.cap.or(cfg.cap).unwrap_or(1_000_000);
    let out = args.out.or(cfg.out.map(PathBuf::from));

    let fam = packing_family_capped(rho, eps, n, cap)?;
    let separation = if verify {
        Some(verify_packing_separation(&fam)?)
    } else {
        None
    };
    let report = Report {
        command: "approx pack".into(),
        inputs: BTreeMap::new(),
        parameters: serde_json::json!({
            "rho": rho, "eps": eps, "n": n, "verify": verify, "cap": cap,
        }),
        results: PackResults {
            members: fam.members.len(),
            nu_eps: fam.nu_eps,
            separation,
        },
        version: hypolib::SCHEMA,
        seed: None,
    };
    emit(&report, out.as_deref())
}

// ---------------------------------------------------------------- estimate

#[derive(Args)]
struct EstimateArgs {
    /// Objective: mle, ls, or lsdensity.
    #[arg(long)]
    objective: Option<String>,
    /// Sample CSV (`x1..xn` or `x1..xn,y`).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Function-class document (JSON).
    #[arg(long)]
    class: Option<PathBuf>,
    /// Output CSV for the estimate.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed recorded with the run (solver is deterministic).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    step_a: Option<f64>,
    #[arg(long)]
    step_b: Option<f64>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
struct EstimateConfig {
    objective: Option<String>,
    data: Option<String>,
    class: Option<String>,
    out: Option<String>,
    seed: Option<u64>,
    max_iter: Option<usize>,
    step_a: Option<f64>,
    step_b: Option<f64>,
    report: Option<String>,
}

fn build_sample(
    objective: Objective,
    data: &Path,
    domain: &std::sync::Arc<hypolib::GridDomain>,
    seed: u64,
) -> Result<Sample, CliError> {
    let (xs, ys) = docs::load_sample_points(data)?;
    match (objective, ys) {
        (Objective::LsRegression, Some(ys)) => {
            let pairs: Vec<(Vec<f64>, f64)> = xs.into_iter().zip(ys).collect();
            Ok(Sample::regression_from_points(domain.clone(), &pairs, seed)?)
        }
        (Objective::LsRegression, None) => Err(CliError::Validation(
            "regression data needs a y column".into(),
        )),
        (_, Some(_)) => Err(CliError::Validation(
            "density data must not have a y column".into(),
        )),
        (_, None) => Ok(Sample::density_from_points(domain.clone(), &xs, seed)?),
    }
}

fn run_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let cfg: EstimateConfig = load_config(args.config.as_deref())?;
    let objective = docs::parse_objective(&require(
        args.objective.or(cfg.objective),
        "--objective",
    )?)?;
    let data = require(args.data.or(cfg.data.map(PathBuf::from)), "--data")?;
    let class_path = require(args.class.or(cfg.class.map(PathBuf::from)), "--class")?;
    let out = require(args.out.or(cfg.out.map(PathBuf::from)), "--out")?;
    let seed = require(args.seed.or(cfg.seed), "--seed")?;
    let report_path = args.report.or(cfg.report.map(PathBuf::from));
    let mut solve = SolveOptions { seed, ..Default::default() };
    if let Some(v) = args.max_iter.or(cfg.max_iter) {
        solve.max_iter = v;
    }
    if let Some(v) = args.step_a.or(cfg.step_a) {
        solve.step_a = v;
    }
    if let Some(v) = args.step_b.or(cfg.step_b) {
        solve.step_b = v;
    }

    let class = docs::load_class(&class_path)?;
    let sample = build_sample(objective, &data, class.domain(), seed)?;
    let solution = saa_solve(objective, &sample, &class, &solve)?;
    let value = sample_average(objective, &sample, &solution)?;
    fs::write(&out, solution.to_csv_string())
        .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", out.display())))?;

    let report = Report {
        command: "estimate".into(),
        inputs: BTreeMap::from([
            ("data".to_string(), data.display().to_string()),
            ("class".to_string(), class_path.display().to_string()),
        ]),
        parameters: serde_json::json!({
            "objective": match objective {
                Objective::MleDensity => "mle",
                Objective::LsRegression => "ls",
                Objective::LsDensity => "lsdensity",
            },
            "maxIter": solve.max_iter, "stepA": solve.step_a, "stepB": solve.step_b,
            "sampleSize": sample.len(),
        }),
        results: serde_json::json!({
            "objectiveValue": value,
            "outCsv": out.display().to_string(),
        }),
        version: hypolib::SCHEMA,
        seed: Some(seed),
    };
    emit(&report, report_path.as_deref())
}

// ---------------------------------------------------------------- confidence

#[derive(Args)]
struct ConfidenceArgs {
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Candidate function (CSV).
    #[arg(long)]
    f: Option<PathBuf>,
    /// Level-set height.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
struct ConfidenceConfig {
    objective: Option<String>,
    data: Option<String>,
    f: Option<String>,
    delta: Option<f64>,
    out: Option<String>,
}

fn run_confidence(args: ConfidenceArgs) -> Result<(), CliError> {
    let cfg: ConfidenceConfig = load_config(args.config.as_deref())?;
    let objective = docs::parse_objective(&require(
        args.objective.or(cfg.objective),
        "--objective",
    )?)?;
    let data = require(args.data.or(cfg.data.map(PathBuf::from)), "--data")?;
    let f_path = require(args.f.or(cfg.f.map(PathBuf::from)), "--f")?;
    let delta = require(args.delta.or(cfg.delta), "--delta")?;
    let out = args.out.or(cfg.out.map(PathBuf::from));

    let f = docs::load_gridfn(&f_path)?;
    let sample = build_sample(objective, &data, f.domain(), 0)?;
    let avg = sample_average(objective, &sample, &f)?;
    let member = level_set_member(objective, &sample, &f, delta)?;
    let report = Report {
        command: "confidence".into(),
        inputs: BTreeMap::from([
            ("data".to_string(), data.display().to_string()),
            ("f".to_string(), f_path.display().to_string()),
        ]),
        parameters: serde_json::json!({ "delta": delta, "sampleSize": sample.len() }),
        results: serde_json::json!({ "sampleAverage": avg, "delta": delta, "member": member }),
        version: hypolib::SCHEMA,
        seed: None,
    };
    emit(&report, out.as_deref())
}

// ---------------------------------------------------------------- rate

#[derive(Args)]
struct RateArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional per-sample-size CSV for plotting.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn run_rate(args: RateArgs) -> Result<(), CliError> {
    let config_path = require(args.config, "--config")?;
    let setup = docs::load_rate_config(&config_path)?;
    let cfg = ExperimentConfig {
        nus: setup.nus.clone(),
        replications: setup.replications,
        seed: setup.seed,
        solve: setup.solve.clone(),
        dl_tol: setup.dl_tol,
    };
    let rep = rate_experiment(
        setup.objective,
        &setup.truth,
        &setup.class,
        &setup.pop_argmin,
        &cfg,
    )?;
    if let Some(csv_path) = &args.csv {
        let mut text = String::from("nu,medianGap,meanGap,medianDl,excessToArgmin\n");
        for p in &rep.points {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                p.nu, p.median_gap, p.mean_gap, p.median_dl, p.excess_to_argmin
            ));
        }
        fs::write(csv_path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", csv_path.display())))?;
    }
    let report = Report {
        command: "rate".into(),
        inputs: BTreeMap::from([(
            "config".to_string(),
            config_path.display().to_string(),
        )]),
        parameters: serde_json::json!({
            "nus": setup.nus, "replications": setup.replications, "dlTol": setup.dl_tol,
        }),
        results: rep,
        version: hypolib::SCHEMA,
        seed: Some(setup.seed),
    };
    emit(&report, args.out.as_deref())
}

// ---------------------------------------------------------------- entry

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = cli.threads.or_else(|| {
        std::env::var("HYPOLIB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        // outputs are deterministic reductions, so pool size only caps work
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Dist(a) => run_dist(a),
        Command::Approx(ApproxCommand::Pipeline(a)) => run_pipeline(a),
        Command::Approx(ApproxCommand::Cover(a)) => run_cover(a),
        Command::Approx(ApproxCommand::Pack(a)) => run_pack(a),
        Command::Estimate(a) => run_estimate(a),
        Command::Confidence(a) => run_confidence(a),
        Command::Rate(a) => run_rate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Computation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
