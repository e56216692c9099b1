//! Constructive approximation of usc functions.

mod cover;
mod moreau;
mod pa_fit;
mod packing;
mod pipeline;
mod spline_fit;

pub use cover::{cover_params, cover_params_with, quantize_to_cover, CoverParams};
pub use moreau::{moreau_envelope, truncate_and_restrict};
pub use pa_fit::{pa_fit, FitOptions, FitResult};
pub use packing::{
    packing_family, packing_family_capped, verify_packing_separation, PackingFamily,
    SeparationReport,
};
pub use pipeline::{hypo_approx_sequence, PipelineSchedule, PipelineStage, StageResult};
pub use spline_fit::epispline_approx;
