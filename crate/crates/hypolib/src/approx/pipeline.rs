//! The truncate / smooth / fit approximation pipeline.
//!
//! Each stage caps the target, restricts it to a sup-norm ball, takes the
//! upper Moreau envelope, and fits a difference-of-max function to the
//! envelope on the ball. Along a schedule with growing caps, radii, and piece
//! budgets and vanishing smoothing, the fitted functions hypo-approach the
//! target; the per-stage aw-distance to the target is reported so that the
//! decrease can be checked empirically.

use serde::{Deserialize, Serialize};

use crate::approx::moreau::{moreau_envelope, truncate_and_restrict};
use crate::approx::pa_fit::{pa_fit, FitOptions};
use crate::error::{HypoError, Result};
use crate::grid::GridFn;
use crate::metric::aw_dist;
use crate::pa::PaDiff;

/// One pipeline stage: truncation cap, smoothing parameter, ball radius,
/// and piece budget.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PipelineStage {
    /// Truncation level; `f64::INFINITY` leaves values uncapped.
    pub cap: f64,
    /// Moreau smoothing parameter.
    pub lambda: f64,
    /// Ball radius for the restriction and the fit.
    pub rho: f64,
    /// Piece budget per max-affine component.
    pub q: usize,
}

/// A validated stage list: caps, radii, and budgets nondecreasing, smoothing
/// strictly decreasing toward zero.
#[derive(Clone, Debug)]
pub struct PipelineSchedule {
    stages: Vec<PipelineStage>,
}

impl PipelineSchedule {
    pub fn new(stages: Vec<PipelineStage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(HypoError::Precondition("schedule must have at least one stage".into()));
        }
        for s in &stages {
            if !(s.lambda.is_finite() && s.lambda > 0.0) {
                return Err(HypoError::Precondition("stage smoothing must be positive".into()));
            }
            if !(s.rho.is_finite() && s.rho >= 0.0) || s.cap.is_nan() || s.q == 0 {
                return Err(HypoError::Precondition("invalid stage parameters".into()));
            }
        }
        for w in stages.windows(2) {
            if w[1].cap < w[0].cap || w[1].rho < w[0].rho || w[1].q < w[0].q {
                return Err(HypoError::Precondition(
                    "caps, radii and piece budgets must be nondecreasing".into(),
                ));
            }
            if w[1].lambda >= w[0].lambda {
                return Err(HypoError::Precondition(
                    "smoothing parameters must decrease strictly".into(),
                ));
            }
        }
        Ok(PipelineSchedule { stages })
    }

    pub fn stages(&self) -> &[PipelineStage] {
        &self.stages
    }
}

/// Output of one stage: the fitted function and its distance to the target.
#[derive(Clone, Debug)]
pub struct StageResult {
    pub pa: PaDiff,
    pub dl_to_target: f64,
    pub fit_residual: f64,
}

/// Runs the pipeline against `target`, reporting one fitted function and its
/// aw-distance to the target per stage. The distances are expected to
/// decrease along a reasonable schedule; that is checked by callers, not
/// here, since the final fit is heuristic.
pub fn hypo_approx_sequence(
    target: &GridFn,
    schedule: &PipelineSchedule,
    tol: f64,
    fit_opts: &FitOptions,
) -> Result<Vec<StageResult>> {
    let mut out = Vec::with_capacity(schedule.stages.len());
    for (idx, stage) in schedule.stages.iter().enumerate() {
        let restricted = truncate_and_restrict(target, stage.cap, stage.rho)?;
        let envelope = moreau_envelope(&restricted, stage.lambda)?;
        let opts = FitOptions {
            seed: fit_opts.seed.wrapping_add(idx as u64),
            ..fit_opts.clone()
        };
        let fit = pa_fit(&envelope, stage.q, stage.rho, &opts)?;
        let sampled = fit.pa.to_gridfn(target.domain().clone())?;
        let dl_to_target = aw_dist(&sampled, target, tol)?.value;
        out.push(StageResult {
            pa: fit.pa,
            dl_to_target,
            fit_residual: fit.residual,
        });
    }
    Ok(out)
}
