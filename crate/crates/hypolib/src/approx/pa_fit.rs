//! Least-squares fitting of difference-of-max piecewise affine functions.
//!
//! Alternating partition refitting: nodes are assigned to their active plus
//! and minus pieces, the resulting linear least-squares problem over all
//! affine coefficients is solved (with a small ridge so rank deficiency can
//! never fail), and the assignment is recomputed, until a fixpoint or the
//! iteration cap. Multi-restart with seeded random initial assignments; the
//! best restart by residual wins, ties broken by restart index.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{HypoError, Result};
use crate::grid::{norm_inf_dist, GridFn};
use crate::pa::{AffinePiece, MaxAffine, PaDiff};
use crate::rng::substream;

#[derive(Clone, Debug)]
pub struct FitOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
    pub ridge: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            restarts: 10,
            max_iterations: 100,
            seed: 0,
            ridge: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub pa: PaDiff,
    /// Sum of squared errors over the fitted nodes.
    pub residual: f64,
    /// Restart that produced the returned fit.
    pub restart: usize,
    /// Whether every solve step decreased the assigned least-squares
    /// objective (up to the ridge allowance), across all restarts.
    pub monotone: bool,
}

/// Fits `target` on its `rho`-ball by a `PaDiff` with at most `q` pieces per
/// max. Deterministic given `opts.seed`.
pub fn pa_fit(target: &GridFn, q: usize, rho: f64, opts: &FitOptions) -> Result<FitResult> {
    if q == 0 {
        return Err(HypoError::Precondition("piece budget must be positive".into()));
    }
    let domain = target.domain();
    let n = domain.dim();
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut ts: Vec<f64> = Vec::new();
    for (rank, x, v) in target.iter_finite() {
        if domain.member_norm_inf(rank) <= rho {
            xs.push(x.to_vec());
            ts.push(v);
        }
    }
    if xs.len() < 2 * (n + 1) {
        return Err(HypoError::Precondition(format!(
            "need at least {} finite nodes in the ball, found {}",
            2 * (n + 1),
            xs.len()
        )));
    }

    let runs: Vec<RestartOutcome> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| run_restart(&xs, &ts, n, q, opts, r as u64))
        .collect();
    let monotone = runs.iter().all(|r| r.monotone);
    let best = runs
        .into_iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| {
            (a.residual, *i)
                .partial_cmp(&(b.residual, *j))
                .expect("residuals are finite")
        })
        .expect("at least one restart ran");
    let (restart, outcome) = best;
    let pa = PaDiff::new(
        MaxAffine::new(outcome.plus)?,
        MaxAffine::new(outcome.minus)?,
        rho,
    )?;
    Ok(FitResult {
        pa,
        residual: outcome.residual,
        restart,
        monotone,
    })
}

struct RestartOutcome {
    plus: Vec<AffinePiece>,
    minus: Vec<AffinePiece>,
    residual: f64,
    monotone: bool,
}

fn run_restart(
    xs: &[Vec<f64>],
    ts: &[f64],
    n: usize,
    q: usize,
    opts: &FitOptions,
    restart: u64,
) -> RestartOutcome {
    let mut rng = substream(opts.seed, "pa_fit", restart);
    let mut assign_plus = random_assignment(xs, q, &mut rng);
    let mut assign_minus = random_assignment(xs, q, &mut rng);

    let dim = 2 * q * (n + 1);
    let mut theta = DVector::<f64>::zeros(dim);
    let mut monotone = true;
    let mut best: Option<(f64, DVector<f64>)> = None;

    for iter in 0..opts.max_iterations.max(1) {
        let pre = assigned_objective(&theta, xs, ts, n, q, &assign_plus, &assign_minus);
        let solved = solve_assigned(xs, ts, n, q, &assign_plus, &assign_minus, opts.ridge);
        let post = assigned_objective(&solved, xs, ts, n, q, &assign_plus, &assign_minus);
        if iter > 0 {
            // ridge allows the raw objective to rise by at most ridge * |theta|^2
            let slack = opts.ridge * theta.norm_squared() + 1e-12 * (1.0 + pre);
            if post > pre + slack {
                monotone = false;
            }
        }
        theta = solved;

        let true_res = true_residual(&theta, xs, ts, n, q);
        if best.as_ref().map(|(r, _)| true_res < *r).unwrap_or(true) {
            best = Some((true_res, theta.clone()));
        }

        let (new_plus, new_minus) = reassign(&theta, xs, n, q);
        if new_plus == assign_plus && new_minus == assign_minus {
            break;
        }
        assign_plus = new_plus;
        assign_minus = new_minus;
    }

    let (residual, theta) = best.expect("at least one iteration ran");
    let (plus, minus) = unpack(&theta, n, q);
    RestartOutcome {
        plus,
        minus,
        residual,
        monotone,
    }
}

/// Nodes clustered around `q` random seed nodes give the initial assignment.
fn random_assignment(xs: &[Vec<f64>], q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let centers: Vec<usize> = (0..q).map(|_| rng.random_range(0..xs.len())).collect();
    xs.iter()
        .map(|x| {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (k, &c) in centers.iter().enumerate() {
                let d = norm_inf_dist(x, &xs[c]);
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            best
        })
        .collect()
}

fn piece_value(theta: &DVector<f64>, block: usize, n: usize, x: &[f64]) -> f64 {
    let off = block * (n + 1);
    let mut v = theta[off + n];
    for i in 0..n {
        v += theta[off + i] * x[i];
    }
    v
}

fn assigned_objective(
    theta: &DVector<f64>,
    xs: &[Vec<f64>],
    ts: &[f64],
    n: usize,
    q: usize,
    ap: &[usize],
    am: &[usize],
) -> f64 {
    xs.iter()
        .zip(ts)
        .zip(ap.iter().zip(am))
        .map(|((x, t), (&p, &m))| {
            let pred = piece_value(theta, p, n, x) - piece_value(theta, q + m, n, x);
            (t - pred) * (t - pred)
        })
        .sum()
}

fn true_residual(theta: &DVector<f64>, xs: &[Vec<f64>], ts: &[f64], n: usize, q: usize) -> f64 {
    xs.iter()
        .zip(ts)
        .map(|(x, t)| {
            let plus = (0..q)
                .map(|k| piece_value(theta, k, n, x))
                .fold(f64::NEG_INFINITY, f64::max);
            let minus = (0..q)
                .map(|k| piece_value(theta, q + k, n, x))
                .fold(f64::NEG_INFINITY, f64::max);
            let e = t - (plus - minus);
            e * e
        })
        .sum()
}

fn reassign(theta: &DVector<f64>, xs: &[Vec<f64>], n: usize, q: usize) -> (Vec<usize>, Vec<usize>) {
    let argmax = |x: &[f64], base: usize| -> usize {
        let mut best = 0usize;
        let mut best_v = piece_value(theta, base, n, x);
        for k in 1..q {
            let v = piece_value(theta, base + k, n, x);
            if v > best_v {
                best_v = v;
                best = k;
            }
        }
        best
    };
    let ap = xs.iter().map(|x| argmax(x, 0)).collect();
    let am = xs.iter().map(|x| argmax(x, q)).collect();
    (ap, am)
}

fn solve_assigned(
    xs: &[Vec<f64>],
    ts: &[f64],
    n: usize,
    q: usize,
    ap: &[usize],
    am: &[usize],
    ridge: f64,
) -> DVector<f64> {
    let dim = 2 * q * (n + 1);
    let mut ata = DMatrix::<f64>::zeros(dim, dim);
    let mut atb = DVector::<f64>::zeros(dim);
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(2 * (n + 1));
    for ((x, &t), (&p, &m)) in xs.iter().zip(ts).zip(ap.iter().zip(am)) {
        row.clear();
        let poff = p * (n + 1);
        let moff = (q + m) * (n + 1);
        for (i, &xi) in x.iter().enumerate() {
            row.push((poff + i, xi));
            row.push((moff + i, -xi));
        }
        row.push((poff + n, 1.0));
        row.push((moff + n, -1.0));
        for &(i, vi) in &row {
            atb[i] += vi * t;
            for &(j, vj) in &row {
                ata[(i, j)] += vi * vj;
            }
        }
    }
    let mut lam = ridge.max(1e-14);
    for _ in 0..8 {
        let mut reg = ata.clone();
        for i in 0..dim {
            reg[(i, i)] += lam;
        }
        if let Some(chol) = reg.cholesky() {
            return chol.solve(&atb);
        }
        lam *= 100.0;
    }
    // ridge escalation always terminates in practice; keep a hard fallback
    DVector::zeros(dim)
}

fn unpack(theta: &DVector<f64>, n: usize, q: usize) -> (Vec<AffinePiece>, Vec<AffinePiece>) {
    let piece = |block: usize| -> AffinePiece {
        let off = block * (n + 1);
        AffinePiece {
            grad: (0..n).map(|i| theta[off + i]).collect(),
            offset: theta[off + n],
        }
    };
    let plus = (0..q).map(piece).collect();
    let minus = (q..2 * q).map(piece).collect();
    (plus, minus)
}
