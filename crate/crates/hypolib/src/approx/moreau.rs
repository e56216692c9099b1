//! Upper Moreau envelopes and truncation/ball restriction.

use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;
use crate::grid::GridFn;

/// Upper Moreau envelope:
/// `(e_lambda f)(x) = max over finite nodes y of f(y) - |y - x|_2^2 / (2 lambda)`.
///
/// Finite and at least `f` at every member node. Brute force over node pairs.
pub fn moreau_envelope(f: &GridFn, lambda: f64) -> Result<GridFn> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(HypoError::Precondition(format!(
            "smoothing parameter must be positive, got {lambda}"
        )));
    }
    let finite: Vec<(&[f64], f64)> = f.iter_finite().map(|(_, y, v)| (y, v)).collect();
    let inv = 1.0 / (2.0 * lambda);
    let values = f
        .domain()
        .iter_members()
        .map(|(_, x)| {
            let best = finite
                .iter()
                .map(|(y, v)| {
                    let sq: f64 = y.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
                    v - sq * inv
                })
                .fold(f64::NEG_INFINITY, f64::max);
            ExtReal::finite(best)
        })
        .collect();
    GridFn::new(f.domain().clone(), values)
}

/// `min(f, cap)` on member nodes inside the sup-norm `rho`-ball, `-inf`
/// elsewhere. `cap = +inf` leaves values untouched.
pub fn truncate_and_restrict(f: &GridFn, cap: f64, rho: f64) -> Result<GridFn> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(HypoError::Precondition(format!(
            "ball radius must be nonnegative, got {rho}"
        )));
    }
    let domain = f.domain();
    let values = (0..domain.member_count())
        .map(|rank| {
            if domain.member_norm_inf(rank) <= rho {
                f.value(rank).min_with(cap)
            } else {
                ExtReal::NegInf
            }
        })
        .collect();
    GridFn::new(domain.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridDomain;

    #[test]
    fn constant_is_a_fixed_point() {
        let f = GridFn::constant(GridDomain::line(-2.0, 2.0, 0.5).unwrap(), 3.0).unwrap();
        let e = moreau_envelope(&f, 0.7).unwrap();
        assert_eq!(e.values(), f.values());
    }

    #[test]
    fn envelope_of_negative_square_matches_analytic_value() {
        // e_lambda(-x^2)(x) = -x^2 / (1 + 2 lambda) on a fine grid
        let d = GridDomain::line(-3.0, 3.0, 0.001).unwrap();
        let f = GridFn::from_fn(d, |x| ExtReal::finite(-x[0] * x[0])).unwrap();
        let e = moreau_envelope(&f, 0.5).unwrap();
        let got = e.value_at(&[1.0]).unwrap().to_f64();
        assert!((got - (-0.5)).abs() <= 2e-3, "got {got}");
    }

    #[test]
    fn envelope_dominates_the_function() {
        let d = GridDomain::line(-1.0, 1.0, 0.25).unwrap();
        let f = GridFn::from_fn(d, |x| {
            if x[0] == 0.25 {
                ExtReal::NegInf
            } else {
                ExtReal::finite(x[0].sin())
            }
        })
        .unwrap();
        let e = moreau_envelope(&f, 0.3).unwrap();
        for (rank, v) in f.values().iter().enumerate() {
            assert!(e.value(rank) >= *v);
        }
    }

    #[test]
    fn truncate_and_restrict_examples() {
        let d = GridDomain::line(-2.0, 2.0, 1.0).unwrap();
        let f = GridFn::constant(d.clone(), 5.0).unwrap();
        // generous cap and ball: unchanged
        let same = truncate_and_restrict(&f, f64::INFINITY, 10.0).unwrap();
        assert_eq!(same.values(), f.values());
        // cap binds everywhere in the ball
        let capped = truncate_and_restrict(&f, 2.0, 10.0).unwrap();
        assert!(capped.values().iter().all(|v| *v == ExtReal::finite(2.0)));
        // degenerate ball keeps only the origin
        let origin_only = truncate_and_restrict(&f, f64::INFINITY, 0.0).unwrap();
        assert_eq!(origin_only.finite_count(), 1);
        assert_eq!(origin_only.value_at(&[0.0]).unwrap(), ExtReal::finite(5.0));
    }

    #[test]
    fn restriction_can_empty_the_hypograph() {
        let d = GridDomain::line(-2.0, 2.0, 1.0).unwrap();
        let f = GridFn::from_fn(d, |x| {
            if x[0].abs() == 2.0 {
                ExtReal::finite(1.0)
            } else {
                ExtReal::NegInf
            }
        })
        .unwrap();
        assert!(matches!(
            truncate_and_restrict(&f, f64::INFINITY, 1.0),
            Err(HypoError::EmptyHypograph)
        ));
    }
}
