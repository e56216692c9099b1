//! Shared generators for the property and acceptance suites.
//!
//! Values are dyadic rationals (multiples of 1/64) on dyadic grids, so sums
//! and differences inside the exact metric code incur no rounding at all:
//! "exact" assertions can use zero slack.

#![allow(dead_code)]

use std::sync::Arc;

use hypolib::{ExtReal, GridDomain, GridFn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64, tag: &str) -> ChaCha8Rng {
    hypolib::rng::stream(seed, tag)
}

pub fn dyadic(rng: &mut impl Rng, lo: i64, hi: i64) -> f64 {
    rng.random_range(lo..=hi) as f64 / 64.0
}

/// One-dimensional grid with dyadic spacing, at most `max_nodes` nodes.
pub fn random_domain_1d(rng: &mut impl Rng, max_nodes: usize) -> Arc<GridDomain> {
    let h = [0.25, 0.5, 1.0][rng.random_range(0..3)];
    let budget = max_nodes.max(3) - 1;
    let neg = rng.random_range(1..=budget - 1);
    let pos = rng.random_range(1..=budget - neg);
    GridDomain::line(-(neg as f64) * h, pos as f64 * h, h).unwrap()
}

/// Two-dimensional grid with `axis_nodes` in `[3, max_axis]` per axis.
pub fn random_domain_2d(rng: &mut impl Rng, max_axis: usize) -> Arc<GridDomain> {
    let mut spans = Vec::with_capacity(2);
    for _ in 0..2 {
        let h = [0.25, 0.5, 1.0][rng.random_range(0..3)];
        let nodes = rng.random_range(3..=max_axis.max(3));
        let neg = rng.random_range(1..=nodes - 2);
        let pos = nodes - 1 - neg;
        spans.push((-(neg as f64) * h, pos as f64 * h, h));
    }
    GridDomain::new(&spans).unwrap()
}

/// Random usc function with dyadic values in `[-4, 4]` (or `[0, 4]` when
/// `nonneg`), `-inf` with probability `p_neg_inf`, and at least one finite
/// node.
pub fn random_gridfn(
    domain: &Arc<GridDomain>,
    rng: &mut impl Rng,
    nonneg: bool,
    p_neg_inf: f64,
) -> GridFn {
    let lo = if nonneg { 0 } else { -256 };
    let mut values: Vec<ExtReal> = (0..domain.member_count())
        .map(|_| {
            if rng.random::<f64>() < p_neg_inf {
                ExtReal::NegInf
            } else {
                ExtReal::finite(dyadic(rng, lo, 256))
            }
        })
        .collect();
    if !values.iter().any(|v| v.is_finite()) {
        values[domain.origin_rank()] = ExtReal::finite(dyadic(rng, lo, 256));
    }
    GridFn::new(domain.clone(), values).unwrap()
}

/// Random `kappa`-Lipschitz finite function on a 1-d grid: a dyadic random
/// walk with per-step increments at most `kappa h`.
pub fn random_lipschitz_1d(domain: &Arc<GridDomain>, kappa: f64, rng: &mut impl Rng) -> GridFn {
    let h = domain.axes()[0].h();
    let max_step = (kappa * h * 64.0).floor() as i64;
    let mut v = dyadic(rng, -128, 128);
    let values: Vec<ExtReal> = (0..domain.member_count())
        .map(|i| {
            if i > 0 {
                v += dyadic(rng, -max_step, max_step);
            }
            ExtReal::finite(v)
        })
        .collect();
    GridFn::new(domain.clone(), values).unwrap()
}

/// Brute-force oracle for `dist((x, alpha), hypo f)`.
pub fn dist_oracle(x: &[f64], alpha: f64, f: &GridFn) -> f64 {
    let mut best = f64::INFINITY;
    for (_, y, fy) in f.iter_finite() {
        let dx = x
            .iter()
            .zip(y)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        best = best.min(dx.max((alpha - fy).max(0.0)));
    }
    best
}

/// Dense-alpha-scan lower bound for `dl_rho`: the true value lies within
/// `alpha_step` above this (the integrand is 2-Lipschitz in alpha).
pub fn dl_rho_grid_oracle(f: &GridFn, g: &GridFn, rho: f64, steps: usize) -> f64 {
    let d = f.domain();
    let mut best = 0.0f64;
    for (rank, x) in d.iter_members() {
        if d.member_norm_inf(rank) > rho {
            continue;
        }
        for k in 0..steps {
            let alpha = -rho + 2.0 * rho * k as f64 / (steps - 1) as f64;
            best = best.max((dist_oracle(x, alpha, f) - dist_oracle(x, alpha, g)).abs());
        }
    }
    best
}

/// Independent oracle for the auxiliary distance: collects every candidate
/// threshold and returns the least one that satisfies the defining
/// sup-condition in both directions.
pub fn aux_dist_oracle(f: &GridFn, g: &GridFn, rho: f64) -> f64 {
    let d = f.domain();
    let mut cands = vec![0.0f64];
    let mut collect = |a: &GridFn, b: &GridFn| {
        for (ra, x, av) in a.iter_finite() {
            if d.member_norm_inf(ra) > rho || av < -rho {
                continue;
            }
            for (_, y, bv) in b.iter_finite() {
                let dx = x
                    .iter()
                    .zip(y)
                    .fold(0.0f64, |acc, (p, q)| acc.max((p - q).abs()));
                cands.push(dx.max(av.min(rho) - bv).max(0.0));
            }
        }
    };
    collect(f, g);
    collect(g, f);
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup();

    let feasible_dir = |a: &GridFn, b: &GridFn, tau: f64| -> bool {
        for (ra, x, av) in a.iter_finite() {
            if d.member_norm_inf(ra) > rho || av < -rho {
                continue;
            }
            let sup = b
                .iter_finite()
                .filter(|(_, y, _)| {
                    x.iter()
                        .zip(*y)
                        .fold(0.0f64, |acc, (p, q)| acc.max((p - q).abs()))
                        <= tau
                })
                .map(|(_, _, bv)| bv)
                .fold(f64::NEG_INFINITY, f64::max);
            if !(sup >= av.min(rho) - tau) {
                return false;
            }
        }
        true
    };
    for &tau in &cands {
        if feasible_dir(f, g, tau) && feasible_dir(g, f, tau) {
            return tau;
        }
    }
    f64::INFINITY
}
