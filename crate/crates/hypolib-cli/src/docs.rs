//! JSON document formats consumed by the CLI, and their loaders.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use hypolib::approx::{PipelineSchedule, PipelineStage};
use hypolib::estimate::{FunctionClass, Objective, SolveOptions, TruthSpec};
use hypolib::{GridDomain, GridFn, HypoError};

use crate::CliError;

pub fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

pub fn load_gridfn(path: &Path) -> Result<GridFn, CliError> {
    let text = read_to_string(path)?;
    GridFn::read_csv_str(&text).map_err(|e| {
        CliError::Validation(format!("{}: {e}", path.display()))
    })
}

fn resolve(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or_else(|| Path::new(".")).join(p)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ClassDoc {
    schema: String,
    #[serde(rename = "type")]
    kind: String,
    lower_csv: String,
    upper_csv: String,
    #[serde(default)]
    lipschitz: Option<f64>,
    #[serde(default)]
    unit_integral: bool,
    #[serde(default)]
    anchor_bound: Option<f64>,
}

/// Loads a function-class document; CSV paths resolve relative to the JSON.
pub fn load_class(path: &Path) -> Result<FunctionClass, CliError> {
    let doc: ClassDoc = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if doc.schema != hypolib::SCHEMA || doc.kind != "function_class" {
        return Err(CliError::Validation(format!(
            "{}: expected a {} function_class document",
            path.display(),
            hypolib::SCHEMA
        )));
    }
    let lower = load_gridfn(&resolve(path, &doc.lower_csv))?;
    let upper = load_gridfn(&resolve(path, &doc.upper_csv))?;
    if !lower.same_domain(&upper) {
        return Err(CliError::Computation(HypoError::DomainMismatch));
    }
    let to_vec = |f: &GridFn| -> Result<Vec<f64>, CliError> {
        f.values()
            .iter()
            .map(|v| {
                v.finite_value().ok_or_else(|| {
                    CliError::Validation("class bounds must be finite".into())
                })
            })
            .collect()
    };
    let mut class = FunctionClass::new(lower.domain().clone(), to_vec(&lower)?, to_vec(&upper)?)
        .map_err(CliError::Computation)?;
    if let Some(k) = doc.lipschitz {
        class = class.with_lipschitz(k).map_err(CliError::Computation)?;
    }
    if doc.unit_integral {
        class = class.with_unit_integral().map_err(CliError::Computation)?;
    }
    if let Some(b) = doc.anchor_bound {
        class = class.with_anchor_bound(b).map_err(CliError::Computation)?;
    }
    Ok(class)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StageDoc {
    cap: Option<f64>,
    lambda: f64,
    rho: f64,
    q: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct ScheduleDoc {
    schema: String,
    #[serde(rename = "type")]
    kind: String,
    stages: Vec<StageDoc>,
}

/// Loads a pipeline schedule; a `null` cap means no truncation.
pub fn load_schedule(path: &Path) -> Result<PipelineSchedule, CliError> {
    let doc: ScheduleDoc = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    if doc.schema != hypolib::SCHEMA || doc.kind != "schedule" {
        return Err(CliError::Validation(format!(
            "{}: expected a {} schedule document",
            path.display(),
            hypolib::SCHEMA
        )));
    }
    let stages = doc
        .stages
        .into_iter()
        .map(|s| PipelineStage {
            cap: s.cap.unwrap_or(f64::INFINITY),
            lambda: s.lambda,
            rho: s.rho,
            q: s.q,
        })
        .collect();
    PipelineSchedule::new(stages).map_err(CliError::Computation)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct TruthPoint {
    x: Vec<f64>,
    #[serde(default)]
    y: Option<f64>,
    p: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct TruthDoc {
    kind: String,
    support: Vec<TruthPoint>,
}

fn truth_from_doc(doc: TruthDoc, domain: &Arc<GridDomain>) -> Result<TruthSpec, CliError> {
    let rank_of = |x: &[f64]| -> Result<usize, CliError> {
        domain.member_rank_at(x).ok_or_else(|| {
            CliError::Validation(format!("truth point {x:?} is not a member node"))
        })
    };
    match doc.kind.as_str() {
        "density" => {
            let support = doc
                .support
                .iter()
                .map(|pt| Ok((rank_of(&pt.x)?, pt.p)))
                .collect::<Result<Vec<_>, CliError>>()?;
            TruthSpec::density(domain.clone(), support).map_err(CliError::Computation)
        }
        "regression" => {
            let support = doc
                .support
                .iter()
                .map(|pt| {
                    let y = pt.y.ok_or_else(|| {
                        CliError::Validation("regression truth points need a y".into())
                    })?;
                    Ok((rank_of(&pt.x)?, y, pt.p))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            TruthSpec::regression(domain.clone(), support).map_err(CliError::Computation)
        }
        other => Err(CliError::Validation(format!("unknown truth kind `{other}`"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct SolverDoc {
    #[serde(default)]
    max_iter: Option<usize>,
    #[serde(default)]
    step_a: Option<f64>,
    #[serde(default)]
    step_b: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RateConfigDoc {
    objective: String,
    truth: TruthDoc,
    class_json: String,
    pop_argmin_csv: Vec<String>,
    nus: Vec<usize>,
    replications: usize,
    seed: u64,
    #[serde(default)]
    dl_tol: Option<f64>,
    #[serde(default)]
    solver: Option<SolverDoc>,
}

pub struct RateSetup {
    pub objective: Objective,
    pub truth: TruthSpec,
    pub class: FunctionClass,
    pub pop_argmin: Vec<GridFn>,
    pub nus: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub dl_tol: f64,
    pub solve: SolveOptions,
}

pub fn parse_objective(s: &str) -> Result<Objective, CliError> {
    match s {
        "mle" => Ok(Objective::MleDensity),
        "ls" => Ok(Objective::LsRegression),
        "lsdensity" | "ls-density" => Ok(Objective::LsDensity),
        other => Err(CliError::Validation(format!(
            "unknown objective `{other}` (expected mle, ls, or lsdensity)"
        ))),
    }
}

pub fn load_rate_config(path: &Path) -> Result<RateSetup, CliError> {
    let doc: RateConfigDoc = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let objective = parse_objective(&doc.objective)?;
    let class = load_class(&resolve(path, &doc.class_json))?;
    let truth = truth_from_doc(doc.truth, class.domain())?;
    let pop_argmin = doc
        .pop_argmin_csv
        .iter()
        .map(|rel| load_gridfn(&resolve(path, rel)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut solve = SolveOptions { seed: doc.seed, ..Default::default() };
    if let Some(s) = doc.solver {
        if let Some(v) = s.max_iter {
            solve.max_iter = v;
        }
        if let Some(v) = s.step_a {
            solve.step_a = v;
        }
        if let Some(v) = s.step_b {
            solve.step_b = v;
        }
    }
    Ok(RateSetup {
        objective,
        truth,
        class,
        pop_argmin,
        nus: doc.nus,
        replications: doc.replications,
        seed: doc.seed,
        dl_tol: doc.dl_tol.unwrap_or(1e-4),
        solve,
    })
}

/// Draw coordinates plus optional responses, as parsed from a sample CSV.
pub type SamplePoints = (Vec<Vec<f64>>, Option<Vec<f64>>);

/// Parses a sample CSV: columns `x1,...,xn` for density draws or
/// `x1,...,xn,y` for regression pairs.
pub fn load_sample_points(path: &Path) -> Result<SamplePoints, CliError> {
    let text = read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::Validation(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.trim().split(',').collect();
    let has_y = cols.last() == Some(&"y");
    let n = if has_y { cols.len() - 1 } else { cols.len() };
    for (i, c) in cols[..n].iter().enumerate() {
        if *c != format!("x{}", i + 1) {
            return Err(CliError::Validation(format!(
                "{}: line 1: expected column `x{}`",
                path.display(),
                i + 1
            )));
        }
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != cols.len() {
            return Err(CliError::Validation(format!(
                "{}: line {}: expected {} fields",
                path.display(),
                idx + 1,
                cols.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64, CliError> {
            s.trim().parse().map_err(|_| {
                CliError::Validation(format!(
                    "{}: line {}: field `{what}` is not a number",
                    path.display(),
                    idx + 1
                ))
            })
        };
        let mut x = Vec::with_capacity(n);
        for (i, f) in fields[..n].iter().enumerate() {
            x.push(parse(f, &format!("x{}", i + 1))?);
        }
        xs.push(x);
        if has_y {
            ys.push(parse(fields[n], "y")?);
        }
    }
    if xs.is_empty() {
        return Err(CliError::Validation(format!("{}: no data rows", path.display())));
    }
    Ok((xs, if has_y { Some(ys) } else { None }))
}
