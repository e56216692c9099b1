//! Difference-of-max piecewise affine functions on a sup-norm ball.
//!
//! A [`PaDiff`] is `max_k <a_k, x> + alpha_k  -  max_l <b_l, x> + beta_l` on
//! the ball `norm_inf(x) <= radius`, and `-inf` outside. The affine pieces are
//! mesh free: no partition of the domain is chosen ahead of time.

use serde::{Deserialize, Serialize};

use crate::error::{HypoError, Result};
use crate::ext_real::ExtReal;
use crate::grid::{GridDomain, GridFn};
use crate::serialize::{check_schema, SCHEMA};
use std::sync::Arc;

/// One affine piece `x -> <grad, x> + offset`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub grad: Vec<f64>,
    pub offset: f64,
}

impl AffinePiece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.grad.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() + self.offset
    }
}

/// Pointwise maximum of finitely many affine pieces; finite everywhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxAffine {
    pieces: Vec<AffinePiece>,
}

impl MaxAffine {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(HypoError::InvalidValue("MaxAffine needs at least one piece".into()));
        }
        let n = pieces[0].grad.len();
        for p in &pieces {
            if p.grad.len() != n {
                return Err(HypoError::InvalidValue("piece gradients differ in dimension".into()));
            }
            if !p.offset.is_finite() || p.grad.iter().any(|g| !g.is_finite()) {
                return Err(HypoError::InvalidValue("piece coefficients must be finite".into()));
            }
        }
        Ok(MaxAffine { pieces })
    }

    /// Convenience for one-dimensional pieces `(slope, offset)`.
    pub fn from_slopes(pieces: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pieces
                .iter()
                .map(|&(a, alpha)| AffinePiece { grad: vec![a], offset: alpha })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].grad.len()
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the first piece attaining the maximum at `x`.
    pub fn argmax(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_v = self.pieces[0].eval(x);
        for (i, p) in self.pieces.iter().enumerate().skip(1) {
            let v = p.eval(x);
            if v > best_v {
                best = i;
                best_v = v;
            }
        }
        best
    }

    /// Largest piece-gradient l1 norm: the Lipschitz modulus of the max with
    /// respect to the sup norm on arguments.
    pub fn grad_norm(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.grad.iter().map(|g| g.abs()).sum())
            .fold(0.0, f64::max)
    }
}

/// Difference of two max-affine functions restricted to a sup-norm ball.
#[derive(Clone, Debug, PartialEq)]
pub struct PaDiff {
    pub plus: MaxAffine,
    pub minus: MaxAffine,
    radius: f64,
}

impl PaDiff {
    pub fn new(plus: MaxAffine, minus: MaxAffine, radius: f64) -> Result<Self> {
        if plus.dim() != minus.dim() {
            return Err(HypoError::InvalidValue("plus/minus dimensions differ".into()));
        }
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(HypoError::InvalidValue(format!(
                "ball radius must be nonnegative, got {radius}"
            )));
        }
        Ok(PaDiff { plus, minus, radius })
    }

    pub fn dim(&self) -> usize {
        self.plus.dim()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Piece budget actually used: the larger of the two piece counts.
    pub fn piece_budget(&self) -> usize {
        self.plus.pieces().len().max(self.minus.pieces().len())
    }

    /// `plus(x) - minus(x)` inside the ball, `-inf` outside.
    pub fn eval(&self, x: &[f64]) -> ExtReal {
        let norm = x.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        if norm <= self.radius {
            ExtReal::finite(self.plus.eval(x) - self.minus.eval(x))
        } else {
            ExtReal::NegInf
        }
    }

    /// Samples the function on a grid. Fails with [`HypoError::EmptyHypograph`]
    /// when the ball misses every member node.
    pub fn to_gridfn(&self, domain: Arc<GridDomain>) -> Result<GridFn> {
        GridFn::from_fn(domain, |x| self.eval(x))
    }

    /// Sum of the two gradient moduli: a Lipschitz modulus on the ball under
    /// the sup norm.
    pub fn lipschitz_bound(&self) -> f64 {
        self.plus.grad_norm() + self.minus.grad_norm()
    }
}

#[derive(Serialize, Deserialize)]
struct PaDiffDoc {
    schema: String,
    #[serde(rename = "type")]
    kind: String,
    dim: usize,
    radius: f64,
    plus: Vec<AffinePiece>,
    minus: Vec<AffinePiece>,
}

const PA_KIND: &str = "pa_diff";

impl PaDiff {
    pub fn to_json(&self) -> String {
        let doc = PaDiffDoc {
            schema: SCHEMA.to_string(),
            kind: PA_KIND.to_string(),
            dim: self.dim(),
            radius: self.radius,
            plus: self.plus.pieces().to_vec(),
            minus: self.minus.pieces().to_vec(),
        };
        serde_json::to_string_pretty(&doc).expect("PaDiff serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PaDiffDoc =
            serde_json::from_str(s).map_err(|e| HypoError::Schema(e.to_string()))?;
        check_schema(&doc.schema, &doc.kind, PA_KIND)?;
        let pa = PaDiff::new(MaxAffine::new(doc.plus)?, MaxAffine::new(doc.minus)?, doc.radius)?;
        if pa.dim() != doc.dim {
            return Err(HypoError::Schema("declared dim does not match pieces".into()));
        }
        Ok(pa)
    }
}
