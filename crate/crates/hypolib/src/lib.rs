//! Extended-real upper-semicontinuous functions on finite grids, with exact
//! Attouch-Wets hypo-distances, constructive approximation machinery, and
//! sample-average estimation experiments.
//!
//! The underlying closed set is always the member-node set of a
//! [`GridDomain`]: suprema become maxima, hypograph distances are computed
//! exactly, and continuum problems are modeled by refining grids.
//!
//! The main pieces:
//!
//! - [`grid`]: grid domains, grid-sampled functions, CSV interchange.
//! - [`metric`]: `dist` to hypographs, the truncated and integrated
//!   aw-distances, the auxiliary enlargement distance, excess/Hausdorff.
//! - [`approx`]: Moreau envelopes, the truncate/smooth/fit approximation
//!   pipeline, epi-spline fitting with meshsize guarantees, cover
//!   quantization and packing constructions, difference-of-max least squares.
//! - [`estimate`]: sample-average objectives over constrained grid-function
//!   classes, projected-subgradient solving, confidence/rate experiments.

pub mod approx;
pub mod epispline;
pub mod error;
pub mod estimate;
pub mod ext_real;
pub mod grid;
pub mod metric;
pub mod pa;
pub mod rng;
pub mod serialize;

pub use epispline::{BoxPartition, EpiSpline};
pub use error::{HypoError, Result};
pub use ext_real::ExtReal;
pub use grid::{GridDomain, GridFn};
pub use pa::{AffinePiece, MaxAffine, PaDiff};
pub use serialize::SCHEMA;
