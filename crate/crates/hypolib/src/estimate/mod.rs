//! Sample-average estimation over classes of grid functions.

mod argmin;
mod class;
mod experiments;
mod holder;
mod objective;
mod rates;
mod saa;

pub use argmin::{argmin_excess_check, epsilon_argmin, level_set, ArgminExcessReport};
pub use class::{project_class, FunctionClass};
pub use experiments::{
    consistency_experiment, level_set_coverage, rate_experiment, ConsistencyReport,
    ExperimentConfig, RatePoint, RateReport,
};
pub use holder::{check_holder_pointwise, HolderReport};
pub use objective::{population_objective, sample_average, Objective, Sample, TruthSpec};
pub use rates::{confidence_radius, holder_rate, RateSpec};
pub use saa::{level_set_member, saa_solve, SolveOptions};
