//! Closed-form radius and rate expressions used by the experiments.

use crate::error::{HypoError, Result};

/// Hoelder-rate description: dimension, exponent, and scale.
#[derive(Clone, Copy, Debug)]
pub struct RateSpec {
    pub n: usize,
    /// Hoelder exponent of the objective in the aw-distance.
    pub p: f64,
    /// Scale constant multiplying the rate.
    pub c: f64,
}

impl RateSpec {
    pub fn new(n: usize, p: f64, c: f64) -> Result<Self> {
        if n == 0 || !(p.is_finite() && p > 0.0) || !(c.is_finite() && c >= 0.0) {
            return Err(HypoError::Precondition("rate spec needs n >= 1, p > 0, c >= 0".into()));
        }
        Ok(RateSpec { n, p, c })
    }
}

/// Level-set confidence radius `c (log nu)^(1 + 1/n) / nu^(1/n)`.
pub fn confidence_radius(nu: f64, n: usize, c: f64) -> Result<f64> {
    if !(nu >= 2.0) || n == 0 {
        return Err(HypoError::Precondition("need nu >= 2 and n >= 1".into()));
    }
    let inv_n = 1.0 / n as f64;
    Ok(c * nu.ln().powf(1.0 + inv_n) / nu.powf(inv_n))
}

/// Minimizer-excess rate `c nu^(-1/(2 + n/p)) (log nu)^((1+n)/(2 + n/p))`.
pub fn holder_rate(nu: f64, spec: &RateSpec) -> Result<f64> {
    if !(nu >= 2.0) {
        return Err(HypoError::Precondition("need nu >= 2".into()));
    }
    let denom = 2.0 + spec.n as f64 / spec.p;
    Ok(spec.c * nu.powf(-1.0 / denom) * nu.ln().powf((1.0 + spec.n as f64) / denom))
}
