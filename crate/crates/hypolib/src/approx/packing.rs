//! Packing families: finite sets of usc functions pairwise separated in the
//! aw-distance, lower-bounding covering numbers.
//!
//! Members live on the interior lattice of `[0, rho]^n` with spacing
//! `rho / nu_eps`, take values on a matching grid of `[-rho, 0)`, and are
//! `-inf` elsewhere. Any two distinct members disagree by at least one value
//! step at some lattice point, which keeps their auxiliary distance above
//! `3 eps e^rho` and hence their aw-distance above `eps`.

use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;
use crate::grid::{GridDomain, GridFn};
use crate::metric::aux_dist_rho;

/// An enumerated packing family.
#[derive(Clone, Debug)]
pub struct PackingFamily {
    pub rho: f64,
    pub epsilon: f64,
    pub nu_eps: u64,
    pub members: Vec<GridFn>,
    pub domain: Arc<GridDomain>,
}

/// Enumerates the full family for the given radius, separation target, and
/// dimension. `cap` bounds the member count (default `1e6` via
/// [`packing_family`]).
pub fn packing_family_capped(rho: f64, epsilon: f64, n: usize, cap: u64) -> Result<PackingFamily> {
    if !(rho.is_finite() && rho > 0.0) || n == 0 {
        return Err(HypoError::Precondition("rho and n must be positive".into()));
    }
    let eps_max = rho * (-rho).exp() / 6.0;
    if !(epsilon > 0.0 && epsilon <= eps_max) {
        return Err(HypoError::Precondition(format!(
            "epsilon must lie in (0, {eps_max}], got {epsilon}"
        )));
    }
    let nu_eps = (rho * (-rho).exp() / (3.0 * epsilon)).floor() as u64;
    debug_assert!(nu_eps >= 2);

    let lattice_points = (nu_eps - 1).pow(n as u32);
    let count = (nu_eps as u128)
        .checked_pow(lattice_points as u32)
        .ok_or(HypoError::CountCapExceeded { count: u128::MAX, cap })?;
    if count > cap as u128 {
        return Err(HypoError::CountCapExceeded { count, cap });
    }

    let h = rho / nu_eps as f64;
    let spans: Vec<(f64, f64, f64)> = (0..n).map(|_| (0.0, rho, h)).collect();
    let domain = GridDomain::new(&spans)?;

    // ranks of the interior lattice points, in a fixed order
    let mut lattice_ranks = Vec::with_capacity(lattice_points as usize);
    let mut idx = vec![1u64; n];
    loop {
        let point: Vec<f64> = idx.iter().map(|&k| k as f64 * h).collect();
        let rank = domain
            .member_rank_at(&point)
            .expect("lattice points are grid nodes");
        lattice_ranks.push(rank);
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < nu_eps {
                break;
            }
            idx[i] = 1;
        }
        if idx.iter().all(|&k| k == 1) {
            break;
        }
    }
    debug_assert_eq!(lattice_ranks.len(), lattice_points as usize);

    // value grid: -l rho / nu_eps, l = 1..=nu_eps
    let levels: Vec<f64> = (1..=nu_eps).map(|l| -(l as f64) * h).collect();

    let mut members = Vec::with_capacity(count as usize);
    let mut choice = vec![0u64; lattice_ranks.len()];
    loop {
        let mut values = vec![ExtReal::NegInf; domain.member_count()];
        for (slot, &rank) in lattice_ranks.iter().enumerate() {
            values[rank] = ExtReal::finite(levels[choice[slot] as usize]);
        }
        members.push(GridFn::new(domain.clone(), values)?);
        let mut i = choice.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < nu_eps {
                break;
            }
            choice[i] = 0;
        }
        if choice.iter().all(|&c| c == 0) {
            break;
        }
    }
    debug_assert_eq!(members.len() as u128, count);

    Ok(PackingFamily {
        rho,
        epsilon,
        nu_eps,
        members,
        domain,
    })
}

/// [`packing_family_capped`] with the default cap of one million members.
pub fn packing_family(rho: f64, epsilon: f64, n: usize) -> Result<PackingFamily> {
    packing_family_capped(rho, epsilon, n, 1_000_000)
}

/// Pairwise separation certificate for a packing family.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeparationReport {
    /// Least value of `e^-rho aux_dist_rho` over all unordered pairs.
    pub min_pairwise_lower: f64,
    /// Whether that minimum strictly exceeds epsilon.
    pub separated: bool,
    pub pair_count: usize,
    /// `log` of the member count.
    pub log_member_count: f64,
    /// The closed-form `(rho e^-rho / 6)^n (1/2) eps^-n log(1/eps)` floor.
    pub count_lower_bound: f64,
}

/// Verifies `e^-rho aux_dist_rho(f, g, rho) > epsilon` over every unordered
/// pair, exactly, and reports the log member count against its closed-form
/// lower bound.
pub fn verify_packing_separation(fam: &PackingFamily) -> Result<SeparationReport> {
    let n = fam.domain.dim();
    let k = fam.members.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
        .collect();
    let weight = (-fam.rho).exp();
    let min_pairwise_lower = pairs
        .par_iter()
        .map(|&(i, j)| {
            aux_dist_rho(&fam.members[i], &fam.members[j], fam.rho).map(|d| weight * d)
        })
        .try_reduce(|| f64::INFINITY, |a, b| Ok(a.min(b)))?;

    let base = fam.rho * (-fam.rho).exp() / 6.0;
    let count_lower_bound = base.powi(n as i32) * 0.5 * fam.epsilon.powi(-(n as i32))
        * (1.0 / fam.epsilon).ln();
    Ok(SeparationReport {
        min_pairwise_lower,
        separated: min_pairwise_lower > fam.epsilon,
        pair_count: pairs.len(),
        log_member_count: (k as f64).ln(),
        count_lower_bound,
    })
}
