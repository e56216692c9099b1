//! Projected subgradient solving of sample-average problems on the
//! node-value parameterization.

use crate::error::{HypoError, Result};
use crate::estimate::class::{project_class, FunctionClass};
use crate::estimate::objective::{sample_average, Objective, Sample, SampleData};
use crate::grid::GridFn;

/// Margin used to pull infinite-objective iterates back above the lower bound.
const SUPPORT_MARGIN: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Step size `a / (1 + b k)`.
    pub step_a: f64,
    pub step_b: f64,
    /// Recorded for reproducibility of experiment pipelines; the solver
    /// itself is deterministic.
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_iter: 2000, step_a: 1.0, step_b: 0.1, seed: 0 }
    }
}

/// Per-node draw counts and response sums, the sufficient statistics for all
/// three objectives.
struct Stats {
    counts: Vec<f64>,
    y_sums: Vec<f64>,
    nu: f64,
}

fn stats(s: &Sample, n: usize) -> Stats {
    let mut counts = vec![0.0; n];
    let mut y_sums = vec![0.0; n];
    match &s.data {
        SampleData::Density(nodes) => {
            for &r in nodes {
                counts[r] += 1.0;
            }
        }
        SampleData::Regression(pairs) => {
            for &(r, y) in pairs {
                counts[r] += 1.0;
                y_sums[r] += y;
            }
        }
    }
    Stats { counts, y_sums, nu: s.len() as f64 }
}

fn subgradient(
    obj: Objective,
    st: &Stats,
    vals: &[f64],
    vol: f64,
    grad: &mut [f64],
) {
    match obj {
        Objective::MleDensity => {
            for (g, (&c, &v)) in grad.iter_mut().zip(st.counts.iter().zip(vals)) {
                *g = if c > 0.0 { -(c / st.nu) / v } else { 0.0 };
            }
        }
        Objective::LsRegression => {
            for (g, ((&c, &ys), &v)) in grad
                .iter_mut()
                .zip(st.counts.iter().zip(&st.y_sums).zip(vals))
            {
                *g = 2.0 / st.nu * (c * v - ys);
            }
        }
        Objective::LsDensity => {
            for (g, (&c, &v)) in grad.iter_mut().zip(st.counts.iter().zip(vals)) {
                *g = -2.0 * c / st.nu + 2.0 * v * vol;
            }
        }
    }
}

/// Approximate minimizer of the sample average over the class: projected
/// subgradient with diminishing steps, returning the best feasible iterate.
pub fn saa_solve(
    obj: Objective,
    s: &Sample,
    class: &FunctionClass,
    opts: &SolveOptions,
) -> Result<GridFn> {
    if !class.domain().compatible(&s.domain) {
        return Err(HypoError::DomainMismatch);
    }
    let n = class.domain().member_count();
    let vol = class.domain().cell_volume();
    let st = stats(s, n);

    let current = project_class(&class.midpoint(), class)?;
    let mut vals: Vec<f64> = current.values().iter().map(|v| v.to_f64()).collect();
    let mut best = current;
    let mut best_obj = sample_average(obj, s, &best)?;

    let mut grad = vec![0.0; n];
    for k in 0..opts.max_iter {
        if obj == Objective::MleDensity {
            // keep sampled nodes strictly positive so the subgradient exists
            for (i, v) in vals.iter_mut().enumerate() {
                if st.counts[i] > 0.0 && *v <= 0.0 {
                    *v = v.max(class.lower()[i] + SUPPORT_MARGIN);
                }
            }
        }
        subgradient(obj, &st, &vals, vol, &mut grad);
        let step = opts.step_a / (1.0 + opts.step_b * k as f64);
        for (v, g) in vals.iter_mut().zip(&grad) {
            *v -= step * g;
        }
        let projected = project_class(&vals, class)?;
        vals.clear();
        vals.extend(projected.values().iter().map(|v| v.to_f64()));
        let val = sample_average(obj, s, &projected)?;
        if val < best_obj {
            best_obj = val;
            best = projected;
        }
    }
    if best_obj.is_infinite() {
        return Err(HypoError::Solver(
            "objective stayed infinite on every feasible iterate".into(),
        ));
    }
    Ok(best)
}

/// Membership of `f` in the sample-average level set at height `delta`
/// (inclusive).
pub fn level_set_member(obj: Objective, s: &Sample, f: &GridFn, delta: f64) -> Result<bool> {
    Ok(sample_average(obj, s, f)? <= delta)
}
