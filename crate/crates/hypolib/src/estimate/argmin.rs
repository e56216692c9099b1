//! Brute-force verification of the level-set / argmin excess estimates on
//! finite families.

use serde::Serialize;

use crate::error::{HypoError, Result};
use crate::grid::GridFn;
use crate::metric::aw_dist;

/// Indices of the level set `{i : phi[i] <= delta}`.
pub fn level_set(phi: &[f64], delta: f64) -> Vec<usize> {
    phi.iter()
        .enumerate()
        .filter(|&(_, &v)| v <= delta)
        .map(|(i, _)| i)
        .collect()
}

/// Indices of the epsilon-argmin, with the convention that a family whose
/// values are all `+inf` is its own argmin.
pub fn epsilon_argmin(phi: &[f64], eps: f64) -> Vec<usize> {
    let inf = phi.iter().copied().fold(f64::INFINITY, f64::min);
    if inf.is_infinite() {
        return (0..phi.len()).collect();
    }
    phi.iter()
        .enumerate()
        .filter(|&(_, &v)| v <= inf + eps)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArgminExcessReport {
    /// For every g in family 2: the gamma-ball around g meets family 1 and
    /// the best phi1 value in the ball is at most phi2(g) + tau.
    pub premise_forward: bool,
    /// The same with the roles of the families swapped.
    pub premise_backward: bool,
    /// Excess of `lev <= delta (phi2)` over `lev <= delta + tau (phi1)`.
    pub level_excess: f64,
    /// Excess of the eps-argmin of phi1 over the (eps + 2 tau)-argmin of phi2.
    pub argmin_excess: f64,
    /// Conclusion checks (vacuously true when the premises fail).
    pub level_holds: bool,
    pub argmin_holds: bool,
}

/// Verifies the premises and conclusions of the argmin/level-set excess
/// estimate on two finite families with total value tables.
///
/// All set operations use one pairwise distance matrix computed at `dl_tol`,
/// so premises and conclusions are evaluated against the same metric values.
#[allow(clippy::too_many_arguments)]
pub fn argmin_excess_check(
    fam1: &[GridFn],
    fam2: &[GridFn],
    phi1: &[f64],
    phi2: &[f64],
    tau: f64,
    gamma: f64,
    eps: f64,
    delta: f64,
    dl_tol: f64,
) -> Result<ArgminExcessReport> {
    if fam1.len() != phi1.len() || fam2.len() != phi2.len() || fam1.is_empty() || fam2.is_empty() {
        return Err(HypoError::Precondition(
            "families must be nonempty with total value tables".into(),
        ));
    }
    if tau < 0.0 || gamma < 0.0 || eps < 0.0 {
        return Err(HypoError::Precondition("tau, gamma, eps must be nonnegative".into()));
    }
    // one consistent distance matrix, d[i][j] = dl(fam1[i], fam2[j])
    let mut d = vec![vec![0.0f64; fam2.len()]; fam1.len()];
    for (i, f) in fam1.iter().enumerate() {
        for (j, g) in fam2.iter().enumerate() {
            d[i][j] = aw_dist(f, g, dl_tol)?.value;
        }
    }

    let premise_forward = (0..fam2.len()).all(|j| {
        let best = (0..fam1.len())
            .filter(|&i| d[i][j] <= gamma)
            .map(|i| phi1[i])
            .fold(f64::INFINITY, f64::min);
        best <= phi2[j] + tau
    });
    let premise_backward = (0..fam1.len()).all(|i| {
        let best = (0..fam2.len())
            .filter(|&j| d[i][j] <= gamma)
            .map(|j| phi2[j])
            .fold(f64::INFINITY, f64::min);
        best <= phi1[i] + tau
    });

    let lev2 = level_set(phi2, delta);
    let lev1 = level_set(phi1, delta + tau);
    let level_excess = excess_over(&lev2, &lev1, |j, i| d[i][j]);

    let a1 = epsilon_argmin(phi1, eps);
    let a2 = epsilon_argmin(phi2, eps + 2.0 * tau);
    let argmin_excess = excess_over(&a1, &a2, |i, j| d[i][j]);

    Ok(ArgminExcessReport {
        premise_forward,
        premise_backward,
        level_excess,
        argmin_excess,
        level_holds: !premise_forward || level_excess <= gamma,
        argmin_holds: !(premise_forward && premise_backward) || argmin_excess <= gamma,
    })
}

fn excess_over(from: &[usize], to: &[usize], dist: impl Fn(usize, usize) -> f64) -> f64 {
    if from.is_empty() {
        return 0.0;
    }
    if to.is_empty() {
        return f64::INFINITY;
    }
    from.iter()
        .map(|&a| {
            to.iter()
                .map(|&b| dist(a, b))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0f64, f64::max)
}
