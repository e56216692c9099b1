//! Monte Carlo harnesses: consistency, convergence-rate, and level-set
//! coverage experiments around the sample-average solver.
//!
//! Replications run on independent derived streams (`seed` plus a purpose
//! tag and the replication index) and are aggregated in replication order,
//! so reports are reproducible and independent of execution parallelism.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::estimate::class::FunctionClass;
use crate::estimate::objective::{
    population_objective, Objective, TruthSpec,
};
use crate::estimate::saa::{level_set_member, saa_solve, SolveOptions};
use crate::grid::GridFn;
use crate::metric::aw_dist;
use crate::rng::substream;

/// Shared experiment knobs.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub nus: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
    pub solve: SolveOptions,
    pub dl_tol: f64,
}

/// Per-sample-size aggregates of a rate experiment.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RatePoint {
    pub nu: usize,
    pub median_gap: f64,
    pub mean_gap: f64,
    pub median_dl: f64,
    /// Excess of the replication solutions over the supplied argmin family.
    pub excess_to_argmin: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RateReport {
    pub points: Vec<RatePoint>,
    /// Least-squares slope of `log median_gap` against `log nu`.
    pub slope: f64,
    pub intercept: f64,
}

fn median(sorted: &mut [f64]) -> f64 {
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite stats"));
    let k = sorted.len();
    if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    }
}

fn log_log_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let lx = x.ln();
        let ly = y.max(1e-300).ln();
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

/// Runs replications of the SAA solver across the sample-size schedule,
/// recording the population-objective suboptimality gap and the aw-distance
/// to the supplied population argmin family, with a log-log slope fit of the
/// median gap.
pub fn rate_experiment(
    obj: Objective,
    truth: &TruthSpec,
    class: &FunctionClass,
    pop_argmin: &[GridFn],
    cfg: &ExperimentConfig,
) -> Result<RateReport> {
    let pop_opt = pop_argmin
        .iter()
        .map(|f| population_objective(obj, truth, f))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let mut points = Vec::with_capacity(cfg.nus.len());
    for (nu_idx, &nu) in cfg.nus.iter().enumerate() {
        let tag = format!("rate/{nu_idx}");
        let per_rep: Vec<(f64, f64)> = (0..cfg.replications)
            .into_par_iter()
            .map(|rep| -> Result<(f64, f64)> {
                let mut rng = substream(cfg.seed, &tag, rep as u64);
                let sample = truth.sample(nu, cfg.seed, &mut rng)?;
                let sol = saa_solve(obj, &sample, class, &cfg.solve)?;
                let gap = population_objective(obj, truth, &sol)? - pop_opt;
                let mut nearest = f64::INFINITY;
                for g in pop_argmin {
                    nearest = nearest.min(aw_dist(&sol, g, cfg.dl_tol)?.value);
                }
                Ok((gap.max(0.0), nearest))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut gaps: Vec<f64> = per_rep.iter().map(|p| p.0).collect();
        let mut dls: Vec<f64> = per_rep.iter().map(|p| p.1).collect();
        let mean_gap = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let excess_to_argmin = dls.iter().copied().fold(0.0f64, f64::max);
        points.push(RatePoint {
            nu,
            median_gap: median(&mut gaps),
            mean_gap,
            median_dl: median(&mut dls),
            excess_to_argmin,
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.nu as f64, p.median_gap))
        .collect();
    let (slope, intercept) = log_log_fit(&fit);
    Ok(RateReport { points, slope, intercept })
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConsistencyReport {
    pub nus: Vec<usize>,
    /// One aw-distance sequence (indexed by nu) per replication.
    pub dl_sequences: Vec<Vec<f64>>,
    pub per_nu_median_dl: Vec<f64>,
    pub final_lt_first_count: usize,
    pub replications: usize,
}

/// For each replication, solves along the schedule and records the
/// aw-distance from the solution to the population argmin family; the count
/// of replications whose final distance beats their first is the empirical
/// consistency surrogate.
pub fn consistency_experiment(
    obj: Objective,
    truth: &TruthSpec,
    class: &FunctionClass,
    pop_argmin: &[GridFn],
    cfg: &ExperimentConfig,
) -> Result<ConsistencyReport> {
    let sequences: Vec<Vec<f64>> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| -> Result<Vec<f64>> {
            let mut seq = Vec::with_capacity(cfg.nus.len());
            for (nu_idx, &nu) in cfg.nus.iter().enumerate() {
                let tag = format!("consistency/{nu_idx}");
                let mut rng = substream(cfg.seed, &tag, rep as u64);
                let sample = truth.sample(nu, cfg.seed, &mut rng)?;
                let sol = saa_solve(obj, &sample, class, &cfg.solve)?;
                let mut nearest = f64::INFINITY;
                for g in pop_argmin {
                    nearest = nearest.min(aw_dist(&sol, g, cfg.dl_tol)?.value);
                }
                seq.push(nearest);
            }
            Ok(seq)
        })
        .collect::<Result<Vec<_>>>()?;

    let final_lt_first_count = sequences
        .iter()
        .filter(|s| s.last().expect("nonempty schedule") < s.first().expect("nonempty schedule"))
        .count();
    let per_nu_median_dl = (0..cfg.nus.len())
        .map(|i| {
            let mut col: Vec<f64> = sequences.iter().map(|s| s[i]).collect();
            median(&mut col)
        })
        .collect();
    Ok(ConsistencyReport {
        nus: cfg.nus.clone(),
        dl_sequences: sequences,
        per_nu_median_dl,
        final_lt_first_count,
        replications: cfg.replications,
    })
}

/// Fraction of replications in which `candidate` belongs to the
/// sample-average level set at height `delta`.
pub fn level_set_coverage(
    obj: Objective,
    truth: &TruthSpec,
    candidate: &GridFn,
    delta: f64,
    nu: usize,
    replications: usize,
    seed: u64,
) -> Result<f64> {
    let hits: usize = (0..replications)
        .into_par_iter()
        .map(|rep| -> Result<usize> {
            let mut rng = substream(seed, "coverage", rep as u64);
            let sample = truth.sample(nu, seed, &mut rng)?;
            Ok(level_set_member(obj, &sample, candidate, delta)? as usize)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    Ok(hits as f64 / replications as f64)
}
