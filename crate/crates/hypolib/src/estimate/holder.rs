//! Pointwise comparison bound for Lipschitz functions under the aw-distance.

use serde::Serialize;

use crate::error::{HypoError, Result};
use crate::grid::{norm_inf_dist, GridFn};
use crate::metric::aw_dist;

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HolderReport {
    pub dl_value: f64,
    /// Largest excess of `|f(x) - g(x)|` over the pointwise bound.
    pub max_violation: f64,
    pub holds: bool,
}

fn assert_lipschitz(f: &GridFn, kappa: f64) -> Result<()> {
    let d = f.domain();
    if f.finite_count() != d.member_count() {
        return Err(HypoError::Precondition("functions must be finite on the domain".into()));
    }
    for (i, xi) in d.iter_members() {
        let vi = f.value(i).to_f64();
        for (j, xj) in d.iter_members().skip(i + 1) {
            let vj = f.value(j).to_f64();
            if (vi - vj).abs() > kappa * norm_inf_dist(xi, xj) + 1e-9 {
                return Err(HypoError::Precondition(format!(
                    "input is not {kappa}-Lipschitz between {xi:?} and {xj:?}"
                )));
            }
        }
    }
    Ok(())
}

/// Checks `|f(x) - g(x)| <= (1 + kappa) e^(rho(x)) dl(f, g)` at every node,
/// with `rho(x) = max(|x|_inf, |f(x)|, |g(x)|)` and slack
/// `(1 + kappa) e^(rho(x)) tol` absorbing the quadrature tolerance on `dl`.
pub fn check_holder_pointwise(
    f: &GridFn,
    g: &GridFn,
    kappa: f64,
    tol: f64,
) -> Result<HolderReport> {
    if !f.same_domain(g) {
        return Err(HypoError::DomainMismatch);
    }
    if !(kappa >= 0.0) {
        return Err(HypoError::Precondition("modulus must be nonnegative".into()));
    }
    assert_lipschitz(f, kappa)?;
    assert_lipschitz(g, kappa)?;
    let dl_value = aw_dist(f, g, tol)?.value;
    let mut max_violation = f64::NEG_INFINITY;
    for (rank, x) in f.domain().iter_members() {
        let fv = f.value(rank).to_f64();
        let gv = g.value(rank).to_f64();
        let rho = x
            .iter()
            .fold(0.0f64, |acc, c| acc.max(c.abs()))
            .max(fv.abs())
            .max(gv.abs());
        let bound = (1.0 + kappa) * rho.exp() * (dl_value + tol);
        max_violation = max_violation.max((fv - gv).abs() - bound);
    }
    Ok(HolderReport {
        dl_value,
        max_violation,
        holds: max_violation <= 0.0,
    })
}
