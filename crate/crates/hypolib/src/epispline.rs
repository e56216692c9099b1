//! Zeroth-order epi-splines: piecewise constant lsc functions on a uniform
//! box partition.
//!
//! The partition divides `[-W, W]^n` into `nu^n` equal boxes plus one
//! unbounded exterior cell. An epi-spline takes a constant value on each
//! cell; on cell boundaries it evaluates to the least neighboring cell value
//! (the liminf rule), which makes it lsc by construction. Usc functions are
//! approximated through `-s`.

use serde::{Deserialize, Serialize};

use crate::error::{HypoError, Result};
use crate::serialize::{check_schema, SCHEMA};

/// Tolerance for boundary membership tests, relative to the box half-width.
fn boundary_tol(half_width: f64) -> f64 {
    1e-9 * half_width.max(1.0)
}

/// Uniform box partition of `[-W, W]^n` into `nu^n` cells plus the exterior.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxPartition {
    dim: usize,
    half_width: f64,
    cells_per_axis: usize,
}

impl BoxPartition {
    pub fn new(dim: usize, half_width: f64, cells_per_axis: usize) -> Result<Self> {
        if dim == 0 {
            return Err(HypoError::InvalidDomain("dimension must be positive".into()));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(HypoError::InvalidDomain(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if cells_per_axis == 0 {
            return Err(HypoError::InvalidDomain("need at least one cell per axis".into()));
        }
        let cells = (cells_per_axis as u128).checked_pow(dim as u32);
        if cells.is_none() || cells.unwrap() > (1 << 26) {
            return Err(HypoError::InvalidDomain("partition has too many cells".into()));
        }
        Ok(BoxPartition { dim, half_width, cells_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    /// Per-axis cell width `2W / nu`.
    pub fn cell_width(&self) -> f64 {
        2.0 * self.half_width / self.cells_per_axis as f64
    }

    /// Total cell count `nu^n + 1`, exterior cell last.
    pub fn cell_count(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32) + 1
    }

    /// Index of the exterior cell.
    pub fn exterior_index(&self) -> usize {
        self.cell_count() - 1
    }

    /// Indices of all cells whose closure contains `x`.
    ///
    /// Points interior to one box report that box; points on shared faces
    /// report every adjacent box; points touching the outer boundary or lying
    /// outside the big box also report the exterior cell.
    pub fn cells_containing(&self, x: &[f64]) -> Vec<usize> {
        debug_assert_eq!(x.len(), self.dim);
        let w = self.cell_width();
        let big_w = self.half_width;
        let tol = boundary_tol(big_w);
        let nu = self.cells_per_axis;

        let mut out = Vec::with_capacity(1 << self.dim.min(4));
        let outside = x.iter().any(|&c| c.abs() > big_w + tol);
        let touches_boundary = x.iter().any(|&c| c.abs() >= big_w - tol);
        if outside || touches_boundary {
            out.push(self.exterior_index());
        }
        if outside {
            return out;
        }

        // Per-axis candidate cell indices: those whose closed interval
        // [ -W + k w, -W + (k+1) w ] contains x_i within tolerance.
        let mut per_axis: Vec<Vec<usize>> = Vec::with_capacity(self.dim);
        for &c in x {
            let t = (c + big_w) / w;
            let base = t.floor() as i64;
            let mut cands = Vec::with_capacity(2);
            for k in base - 1..=base + 1 {
                if k < 0 || k >= nu as i64 {
                    continue;
                }
                let lo = -big_w + k as f64 * w;
                let hi = lo + w;
                if c >= lo - tol && c <= hi + tol {
                    cands.push(k as usize);
                }
            }
            if cands.is_empty() {
                return out;
            }
            per_axis.push(cands);
        }

        // Cartesian product of the per-axis candidates.
        let mut idx = vec![0usize; self.dim];
        loop {
            let mut flat = 0usize;
            for (i, &j) in idx.iter().enumerate() {
                flat = flat * nu + per_axis[i][j];
            }
            out.push(flat);
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                idx[i] += 1;
                if idx[i] < per_axis[i].len() {
                    break;
                }
                idx[i] = 0;
            }
        }
    }

    /// Meshsize over the ball of radius `rho`: the least `tau` such that every
    /// cell touching the ball fits in a sup-norm `tau`-ball around each of its
    /// closure points. Uniform boxes give the cell width; the unbounded
    /// exterior cell forces `+inf` as soon as its closure meets the ball.
    pub fn meshsize(&self, rho: f64) -> f64 {
        if rho >= self.half_width - boundary_tol(self.half_width) {
            f64::INFINITY
        } else {
            self.cell_width()
        }
    }
}

/// A zeroth-order epi-spline: one real value per cell, liminf on boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct EpiSpline {
    partition: BoxPartition,
    values: Vec<f64>,
}

impl EpiSpline {
    pub fn new(partition: BoxPartition, values: Vec<f64>) -> Result<Self> {
        if values.len() != partition.cell_count() {
            return Err(HypoError::InvalidValue(format!(
                "expected {} cell values, got {}",
                partition.cell_count(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(HypoError::InvalidValue("cell values must be finite".into()));
        }
        Ok(EpiSpline { partition, values })
    }

    pub fn partition(&self) -> &BoxPartition {
        &self.partition
    }

    pub fn cell_values(&self) -> &[f64] {
        &self.values
    }

    /// Lsc evaluation: the least value among cells whose closure contains `x`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.partition
            .cells_containing(x)
            .into_iter()
            .map(|k| self.values[k])
            .fold(f64::INFINITY, f64::min)
    }

    /// Usc evaluation of `-s`: the greatest value of `-cell` among containing
    /// cells; equals `-self.eval(x)`.
    pub fn eval_neg(&self, x: &[f64]) -> f64 {
        -self.eval(x)
    }
}

#[derive(Serialize, Deserialize)]
struct EpiSplineDoc {
    schema: String,
    #[serde(rename = "type")]
    kind: String,
    dim: usize,
    #[serde(rename = "halfWidth")]
    half_width: f64,
    #[serde(rename = "cellsPerAxis")]
    cells_per_axis: usize,
    #[serde(rename = "cellValues")]
    cell_values: Vec<f64>,
}

const EPI_KIND: &str = "epi_spline0";

impl EpiSpline {
    pub fn to_json(&self) -> String {
        let doc = EpiSplineDoc {
            schema: SCHEMA.to_string(),
            kind: EPI_KIND.to_string(),
            dim: self.partition.dim(),
            half_width: self.partition.half_width(),
            cells_per_axis: self.partition.cells_per_axis(),
            cell_values: self.values.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("EpiSpline serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: EpiSplineDoc =
            serde_json::from_str(s).map_err(|e| HypoError::Schema(e.to_string()))?;
        check_schema(&doc.schema, &doc.kind, EPI_KIND)?;
        let partition = BoxPartition::new(doc.dim, doc.half_width, doc.cells_per_axis)?;
        EpiSpline::new(partition, doc.cell_values)
    }
}
