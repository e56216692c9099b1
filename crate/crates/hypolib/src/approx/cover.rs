//! Explicit covering construction for bounded classes of usc functions.
//!
//! For a class bounded by `dist(0, hypo f) <= r`, an epsilon-cover is built
//! from epi-splines on a uniform partition of `[-omega rho, omega rho]^n`
//! whose cell values are rounded to a finite range grid. [`CoverParams`]
//! carries every constant of the construction along with the resulting
//! log-cover-count and its closed-form bound, so the `eps^-n (log 1/eps)^n+1`
//! growth can be checked numerically.

use serde::Serialize;

use crate::approx::spline_fit::epispline_approx;
use crate::epispline::BoxPartition;
use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;
use crate::grid::GridFn;
use crate::metric::dist_origin_to_hypo;

/// All constants of the cover construction.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CoverParams {
    pub n: usize,
    pub epsilon: f64,
    pub r: f64,
    pub gamma: [f64; 3],
    pub omega: f64,
    /// Largest usable epsilon for these constants.
    pub eps_bar: f64,
    /// Truncation radius of the construction.
    pub rho: f64,
    /// Cells per axis of the partition.
    pub nu: u64,
    /// Number of range gridpoints.
    pub m: u64,
    /// Total cell count `nu^n + 1`.
    pub cell_count: u128,
    /// Range gridpoints spanning `[-omega rho, omega rho]`.
    pub sigma: Vec<f64>,
    /// The derived constants `c1..c7`.
    pub c: [f64; 7],
    /// `(nu^n + 1) log m`: the log of the cover cardinality.
    pub log_cover_count: f64,
    /// Closed-form bound on `log_cover_count` at this epsilon.
    pub covering_bound: f64,
}

fn rho_of(eps: f64, r: f64, gamma1: f64) -> f64 {
    let c1 = 2.0 * (r + 1.0) / r;
    c1 * ((1.0 / eps).ln() + (1.0 / gamma1).ln() + r / 2.0 + (r + 1.0).ln()) - 1.0
}

/// Cover constants with the honest requirement `omega > 1` and an
/// automatically determined `eps_bar`.
pub fn cover_params(
    n: usize,
    epsilon: f64,
    r: f64,
    gamma: [f64; 3],
    omega: f64,
) -> Result<CoverParams> {
    if !(omega > 1.0) {
        return Err(HypoError::Precondition(format!(
            "omega must exceed 1, got {omega} (use cover_params_with for the compatibility mode)"
        )));
    }
    cover_params_with(n, epsilon, r, gamma, omega, None)
}

/// Cover constants with an explicit `eps_bar` override (and no lower bound on
/// `omega`), for reproducing reported spot values.
///
/// When `eps_bar` is not supplied it is taken as the largest epsilon in
/// `(0, 1)` at which the truncation radius still dominates `gamma2 epsilon`,
/// capped at `1/e` so that `log(1/eps_bar)` stays bounded away from zero in
/// the derived constants.
pub fn cover_params_with(
    n: usize,
    epsilon: f64,
    r: f64,
    gamma: [f64; 3],
    omega: f64,
    eps_bar: Option<f64>,
) -> Result<CoverParams> {
    if n == 0 {
        return Err(HypoError::Precondition("dimension must be positive".into()));
    }
    if !(r.is_finite() && r > 0.0) || !(omega.is_finite() && omega > 0.0) {
        return Err(HypoError::Precondition("r and omega must be positive".into()));
    }
    if gamma.iter().any(|&g| !(g > 0.0)) || (gamma.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(HypoError::Precondition("gammas must be positive and sum to 1".into()));
    }
    if !(epsilon > 0.0) {
        return Err(HypoError::Precondition("epsilon must be positive".into()));
    }

    let slack = |eps: f64| rho_of(eps, r, gamma[0]) - gamma[1] * eps;
    let eps_bar = match eps_bar {
        Some(e) => {
            if !(e > 0.0 && e < 1.0) {
                return Err(HypoError::Precondition("eps_bar must lie in (0, 1)".into()));
            }
            e
        }
        None => {
            let cap = (-1.0f64).exp();
            if slack(cap) > 0.0 {
                cap
            } else {
                // slack is strictly decreasing; bisect for its root
                let (mut lo, mut hi) = (1e-12, cap);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if slack(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            }
        }
    };
    if epsilon > eps_bar {
        return Err(HypoError::Precondition(format!(
            "epsilon {epsilon} exceeds eps_bar {eps_bar}"
        )));
    }

    let c1 = 2.0 * (r + 1.0) / r;
    let rho = rho_of(epsilon, r, gamma[0]);
    let nu = (2.0 * omega * rho / (gamma[1] * epsilon)).ceil() as u64;
    let m = (omega * rho / (gamma[2] * epsilon)).ceil() as u64 + 1;
    let cell_count = (nu as u128)
        .checked_pow(n as u32)
        .and_then(|c| c.checked_add(1))
        .ok_or_else(|| HypoError::Precondition("partition cell count overflows".into()))?;
    let w = omega * rho;
    let sigma: Vec<f64> = (1..=m)
        .map(|j| -w + 2.0 * (j - 1) as f64 * w / (m - 1) as f64)
        .collect();

    let c2 = c1 * ((1.0 / gamma[0]).ln() + r / 2.0 + (r + 1.0).ln()) - 1.0;
    let c3 = 2.0 * omega / gamma[1];
    let c4 = omega / gamma[2];
    let l_bar = (1.0 / eps_bar).ln();
    let c5 = c1 * c3 + (c2 * c3 + 1.0) / l_bar;
    let c6 = c1 * c4 + (c2 * c4 + 2.0) / l_bar;
    let c7 = c5 + eps_bar / l_bar;

    let log_cover_count = cell_count as f64 * (m as f64).ln();
    let l_eps = (1.0 / epsilon).ln();
    let covering_bound = c7.powi(n as i32)
        * (c6.ln() / l_bar + 1.0 + (-1.0f64).exp())
        * epsilon.powi(-(n as i32))
        * l_eps.powi(n as i32 + 1);

    Ok(CoverParams {
        n,
        epsilon,
        r,
        gamma,
        omega,
        eps_bar,
        rho,
        nu,
        m,
        cell_count,
        sigma,
        c: [c1, c2, c3, c4, c5, c6, c7],
        log_cover_count,
        covering_bound,
    })
}

impl CoverParams {
    /// The partition of the construction: `nu^n` boxes on
    /// `[-omega rho, omega rho]^n` plus the exterior.
    pub fn partition(&self) -> Result<BoxPartition> {
        let nu = usize::try_from(self.nu)
            .map_err(|_| HypoError::Precondition("partition too large to materialize".into()))?;
        BoxPartition::new(self.n, self.omega * self.rho, nu)
    }
}

/// Maps `f` to its cover representative: the epi-spline approximation on the
/// construction's partition with each cell value rounded to the nearest range
/// gridpoint (ties toward the larger value), read back as the usc piecewise
/// constant function sampled on `f`'s grid.
pub fn quantize_to_cover(f: &GridFn, p: &CoverParams, rho_prime: f64) -> Result<GridFn> {
    let d0 = dist_origin_to_hypo(f);
    if d0 > p.r {
        return Err(HypoError::Precondition(format!(
            "dist(0, hypo f) = {d0} exceeds the class bound r = {}",
            p.r
        )));
    }
    let partition = p.partition()?;
    let s = epispline_approx(f, &partition, p.rho, rho_prime)?;

    let w = p.omega * p.rho;
    let spacing = 2.0 * w / (p.m - 1) as f64;
    let m = p.m as i64;
    let sigma_of = |v: f64| -> f64 {
        // round-half-up picks the larger gridpoint on ties
        let idx = (((v + w) / spacing) + 0.5).floor() as i64;
        p.sigma[idx.clamp(0, m - 1) as usize]
    };
    let cell_sigma: Vec<f64> = s.cell_values().iter().map(|&sv| sigma_of(-sv)).collect();

    // usc boundary rule: the limsup over touching cells
    GridFn::from_fn(f.domain().clone(), |x| {
        let v = partition
            .cells_containing(x)
            .into_iter()
            .map(|k| cell_sigma[k])
            .fold(f64::NEG_INFINITY, f64::max);
        ExtReal::finite(v)
    })
}
