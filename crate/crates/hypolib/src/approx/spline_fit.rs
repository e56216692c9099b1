//! Epi-spline approximation with a meshsize guarantee.

use crate::epispline::{BoxPartition, EpiSpline};
use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;
use crate::grid::GridFn;

/// Builds the epi-spline `s` whose negation approximates `f`:
/// on each cell, `s = -clip(max of f over member nodes in the cell closure,
/// [-rho_prime, rho_prime])`; cells whose closure contains no member node get
/// `-rho_prime`. Requires `meshsize(partition, rho) <= rho` and
/// `rho_prime > rho`; the result then satisfies
/// `aux_dist_rho(f, -s, rho) <= meshsize` and the nodewise value bounds
/// `-rho_prime <= s(x) <= max(-rho_prime, min(rho_prime, -f(x)))`.
pub fn epispline_approx(
    f: &GridFn,
    partition: &BoxPartition,
    rho: f64,
    rho_prime: f64,
) -> Result<EpiSpline> {
    if partition.dim() != f.domain().dim() {
        return Err(HypoError::Precondition(
            "partition dimension does not match the function domain".into(),
        ));
    }
    if !(rho_prime.is_finite() && rho_prime > rho) {
        return Err(HypoError::Precondition(format!(
            "clip level {rho_prime} must exceed the ball radius {rho}"
        )));
    }
    let mu = partition.meshsize(rho);
    if !(mu <= rho) {
        return Err(HypoError::Precondition(format!(
            "meshsize {mu} exceeds the ball radius {rho}"
        )));
    }

    let mut cell_max: Vec<ExtReal> = vec![ExtReal::NegInf; partition.cell_count()];
    let mut cell_seen: Vec<bool> = vec![false; partition.cell_count()];
    for (_, x) in f.domain().iter_members() {
        let v = f.value_at(x).expect("iterating member nodes");
        for k in partition.cells_containing(x) {
            cell_seen[k] = true;
            if v > cell_max[k] {
                cell_max[k] = v;
            }
        }
    }
    let values = cell_max
        .iter()
        .zip(&cell_seen)
        .map(|(&m, &seen)| {
            if !seen {
                -rho_prime
            } else {
                let clipped = match m {
                    ExtReal::NegInf => -rho_prime,
                    ExtReal::Finite(v) => v.clamp(-rho_prime, rho_prime),
                };
                -clipped
            }
        })
        .collect();
    EpiSpline::new(partition.clone(), values)
}
