//! Constrained classes of grid functions and the feasibility projection.
//!
//! A class is a box `u <= f <= v` on the member nodes, optionally intersected
//! with the unit-Riemann-integral hyperplane and a Lipschitz band
//! `|f(x) - f(y)| <= kappa |x - y|_inf` over all node pairs. Projection is
//! exact for box+integral (uniform dual shift found by bisection); the
//! Lipschitz part is handled by Dykstra-style alternation over pairwise
//! constraints, finishing with a box+integral pass so those hold exactly.

use std::sync::Arc;

use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;
use crate::grid::{norm_inf_dist, GridDomain, GridFn};

const LIP_TOL: f64 = 1e-6;
const DYKSTRA_ROUNDS: usize = 50;

#[derive(Clone, Debug)]
pub struct FunctionClass {
    domain: Arc<GridDomain>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    lipschitz: Option<f64>,
    unit_integral: bool,
}

impl FunctionClass {
    pub fn new(domain: Arc<GridDomain>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = domain.member_count();
        if lower.len() != n || upper.len() != n {
            return Err(HypoError::Precondition("bound vectors must cover all members".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(HypoError::Precondition(
                    "bounds must be finite with lower <= upper".into(),
                ));
            }
        }
        Ok(FunctionClass {
            domain,
            lower,
            upper,
            lipschitz: None,
            unit_integral: false,
        })
    }

    /// Uniform box `[lo, hi]` on every node.
    pub fn uniform(domain: Arc<GridDomain>, lo: f64, hi: f64) -> Result<Self> {
        let n = domain.member_count();
        Self::new(domain, vec![lo; n], vec![hi; n])
    }

    pub fn with_lipschitz(mut self, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(HypoError::Precondition("Lipschitz modulus must be nonnegative".into()));
        }
        self.lipschitz = Some(kappa);
        Ok(self)
    }

    pub fn with_unit_integral(mut self) -> Result<Self> {
        let vol = self.domain.cell_volume();
        let lo: f64 = self.lower.iter().sum::<f64>() * vol;
        let hi: f64 = self.upper.iter().sum::<f64>() * vol;
        if lo > 1.0 + 1e-12 || hi < 1.0 - 1e-12 {
            return Err(HypoError::Infeasible(format!(
                "unit integral unattainable: mass range [{lo}, {hi}]"
            )));
        }
        self.unit_integral = true;
        Ok(self)
    }

    /// Caps the value at the origin, as an extra box constraint there.
    pub fn with_anchor_bound(mut self, beta: f64) -> Result<Self> {
        let o = self.domain.origin_rank();
        if beta < self.lower[o] {
            return Err(HypoError::Infeasible("anchor bound below the lower bound".into()));
        }
        self.upper[o] = self.upper[o].min(beta);
        if self.unit_integral {
            // revalidate mass feasibility
            self.unit_integral = false;
            return self.with_unit_integral();
        }
        Ok(self)
    }

    pub fn domain(&self) -> &Arc<GridDomain> {
        &self.domain
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn unit_integral(&self) -> bool {
        self.unit_integral
    }

    /// Midpoint of the box, a convenient interior start.
    pub fn midpoint(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| 0.5 * (l + u))
            .collect()
    }

    /// Largest violation of the Lipschitz band, 0 when no modulus is set.
    pub fn lipschitz_violation(&self, values: &[f64]) -> f64 {
        let Some(kappa) = self.lipschitz else { return 0.0 };
        let mut worst = 0.0f64;
        for (i, xi) in self.domain.iter_members() {
            for (j, xj) in self.domain.iter_members().skip(i + 1) {
                let cap = kappa * norm_inf_dist(xi, xj);
                worst = worst.max((values[i] - values[j]).abs() - cap);
            }
        }
        worst.max(0.0)
    }

    /// Exact projection onto box (+ unit integral when set): a uniform shift
    /// of the clipped values, found by bisection on the shift.
    fn project_box_integral(&self, raw: &[f64]) -> Result<Vec<f64>> {
        let clip = |t: f64| -> Vec<f64> {
            raw.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .map(|(r, (l, u))| (r + t).clamp(*l, *u))
                .collect()
        };
        if !self.unit_integral {
            return Ok(clip(0.0));
        }
        let vol = self.domain.cell_volume();
        let mass = |vals: &[f64]| vals.iter().sum::<f64>() * vol;
        let mut lo = raw
            .iter()
            .zip(&self.lower)
            .map(|(r, l)| l - r)
            .fold(f64::INFINITY, f64::min);
        let mut hi = raw
            .iter()
            .zip(&self.upper)
            .map(|(r, u)| u - r)
            .fold(f64::NEG_INFINITY, f64::max);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass(&clip(mid)) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut vals = clip(hi);
        // distribute the residual over unsaturated nodes to land exactly on 1
        let residual = 1.0 - mass(&vals);
        let free: Vec<usize> = vals
            .iter()
            .enumerate()
            .filter(|&(i, &v)| v > self.lower[i] && v < self.upper[i])
            .map(|(i, _)| i)
            .collect();
        if !free.is_empty() {
            let bump = residual / (vol * free.len() as f64);
            for i in free {
                vals[i] += bump;
            }
        }
        Ok(vals)
    }

    fn gridfn_from(&self, values: Vec<f64>) -> Result<GridFn> {
        GridFn::new(
            self.domain.clone(),
            values.into_iter().map(ExtReal::finite).collect(),
        )
    }
}

/// Projects raw node values onto the class.
///
/// Box and integral constraints hold exactly in the result; the Lipschitz
/// band holds within `1e-6`. Infeasible box/integral combinations error.
pub fn project_class(raw: &[f64], class: &FunctionClass) -> Result<GridFn> {
    if raw.len() != class.domain.member_count() {
        return Err(HypoError::Precondition("value vector length mismatch".into()));
    }
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(HypoError::Precondition("raw values must be finite".into()));
    }
    let kappa = match class.lipschitz {
        None => {
            let vals = class.project_box_integral(raw)?;
            return class.gridfn_from(vals);
        }
        Some(k) => k,
    };

    // Dykstra over the box+integral block and all pairwise Lipschitz bands.
    let n = raw.len();
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, xi) in class.domain.iter_members() {
        for (j, xj) in class.domain.iter_members().skip(i + 1) {
            pairs.push((i, j, kappa * norm_inf_dist(xi, xj)));
        }
    }
    let mut y = raw.to_vec();
    let mut box_corr = vec![0.0f64; n];
    let mut pair_corr = vec![0.0f64; pairs.len()];
    let mut rounds = 0usize;
    loop {
        // box + integral block
        let z: Vec<f64> = y.iter().zip(&box_corr).map(|(a, c)| a + c).collect();
        let proj = class.project_box_integral(&z)?;
        for i in 0..n {
            box_corr[i] = z[i] - proj[i];
        }
        y = proj;
        // pairwise bands
        for (idx, &(i, j, cap)) in pairs.iter().enumerate() {
            let (zi, zj) = (y[i] + pair_corr[idx], y[j] - pair_corr[idx]);
            let gap = zi - zj;
            let excess = (gap.abs() - cap).max(0.0) * 0.5 * gap.signum();
            // projection moves the pair together by the (signed) excess
            let (pi, pj) = (zi - excess, zj + excess);
            pair_corr[idx] = zi - pi;
            y[i] = pi;
            y[j] = pj;
        }
        rounds += 1;
        if rounds >= DYKSTRA_ROUNDS && class.lipschitz_violation(&y) <= LIP_TOL * 0.5 {
            break;
        }
        if rounds >= DYKSTRA_ROUNDS * 40 {
            break;
        }
    }
    let vals = class.project_box_integral(&y)?;
    class.gridfn_from(vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(f: &GridFn) -> Vec<f64> {
        f.values().iter().map(|v| v.to_f64()).collect()
    }

    #[test]
    fn feasible_point_is_fixed() {
        let d = GridDomain::line(-2.0, 2.0, 1.0).unwrap();
        let c = FunctionClass::uniform(d, -1.0, 1.0).unwrap();
        let raw = vec![0.5, -0.25, 0.0, 0.25, 1.0];
        let p = project_class(&raw, &c).unwrap();
        assert_eq!(values(&p), raw);
    }

    #[test]
    fn zero_projects_to_uniform_density() {
        let d = GridDomain::line(-5.0, 5.0, 1.0).unwrap(); // 11 nodes, h = 1
        let c = FunctionClass::uniform(d, 0.0, 1.0)
            .unwrap()
            .with_unit_integral()
            .unwrap();
        let p = project_class(&[0.0; 11], &c).unwrap();
        for v in values(&p) {
            assert!((v - 1.0 / 11.0).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_infeasibility_detected() {
        let d = GridDomain::line(-1.0, 1.0, 1.0).unwrap();
        assert!(matches!(
            FunctionClass::uniform(d, 0.0, 0.2).unwrap().with_unit_integral(),
            Err(HypoError::Infeasible(_))
        ));
    }

    #[test]
    fn projection_is_idempotent() {
        let d = GridDomain::line(-2.0, 2.0, 0.5).unwrap();
        let c = FunctionClass::uniform(d, 0.0, 2.0)
            .unwrap()
            .with_unit_integral()
            .unwrap()
            .with_lipschitz(1.0)
            .unwrap();
        let raw: Vec<f64> = (0..9).map(|i| ((i * 37) % 11) as f64 / 3.0 - 1.0).collect();
        let once = values(&project_class(&raw, &c).unwrap());
        let twice = values(&project_class(&once, &c).unwrap());
        for (a, b) in once.iter().zip(&twice) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        let vol = c.domain().cell_volume();
        let mass: f64 = once.iter().sum::<f64>() * vol;
        assert!((mass - 1.0).abs() <= 1e-12);
        assert!(c.lipschitz_violation(&once) <= 1e-6);
    }

    #[test]
    fn zero_lipschitz_collapses_to_constants() {
        let d = GridDomain::line(-2.0, 2.0, 1.0).unwrap();
        let c = FunctionClass::uniform(d, -10.0, 10.0)
            .unwrap()
            .with_lipschitz(0.0)
            .unwrap();
        let raw = vec![3.0, -1.0, 0.5, 2.5, 0.0];
        let p = values(&project_class(&raw, &c).unwrap());
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        for v in &p {
            assert!((v - mean).abs() <= 1e-7, "{v} vs {mean}");
        }
    }

    #[test]
    fn anchor_bound_caps_the_origin() {
        let d = GridDomain::line(-1.0, 1.0, 1.0).unwrap();
        let c = FunctionClass::uniform(d.clone(), 0.0, 5.0)
            .unwrap()
            .with_anchor_bound(1.5)
            .unwrap();
        let p = project_class(&[4.0, 4.0, 4.0], &c).unwrap();
        assert_eq!(p.value_at(&[0.0]).unwrap().to_f64(), 1.5);
        assert_eq!(p.value_at(&[1.0]).unwrap().to_f64(), 4.0);
    }
}
