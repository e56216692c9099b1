//! Extended reals `R ∪ {-∞}`, the codomain of grid functions.
//!
//! `-∞` marks points outside the effective domain of an usc function. It is a
//! distinguished variant rather than a very negative float so that hypograph
//! logic stays exact. `+∞` is deliberately not representable here; objective
//! values that can blow up are plain `f64` with `f64::INFINITY`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{HypoError, Result};

/// A real number or `-∞`. Finite payloads are never NaN or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
}

impl ExtReal {
    /// Wraps a float, rejecting NaN and `+∞`. `-∞` maps to [`ExtReal::NegInf`].
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            return Err(HypoError::InvalidValue("NaN is not an extended real".into()));
        }
        if v == f64::INFINITY {
            return Err(HypoError::InvalidValue(
                "+inf is not representable as a function value".into(),
            ));
        }
        if v == f64::NEG_INFINITY {
            Ok(ExtReal::NegInf)
        } else {
            Ok(ExtReal::Finite(v))
        }
    }

    /// Wraps a float known to be finite. Panics on NaN/±∞ in debug builds.
    pub fn finite(v: f64) -> Self {
        debug_assert!(v.is_finite(), "ExtReal::finite requires a finite value");
        ExtReal::Finite(v)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// The finite payload, if any.
    pub fn finite_value(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::NegInf => None,
        }
    }

    /// Lossy conversion: `-∞` becomes `f64::NEG_INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::NegInf => f64::NEG_INFINITY,
        }
    }

    /// `min{self, cap}` with a finite cap; `-∞` is absorbing.
    pub fn min_with(self, cap: f64) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v.min(cap)),
            ExtReal::NegInf => ExtReal::NegInf,
        }
    }

    /// Addition of a finite real; `-∞ + t = -∞`.
    pub fn add_finite(self, t: f64) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v + t),
            ExtReal::NegInf => ExtReal::NegInf,
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v).expect("value must be a real number or -inf")
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for ExtReal {}

// Total order: NegInf below every finite value. Finite payloads are NaN-free
// by construction, so the comparison below cannot fail.
impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::NegInf, ExtReal::NegInf) => Ordering::Equal,
            (ExtReal::NegInf, ExtReal::Finite(_)) => Ordering::Less,
            (ExtReal::Finite(_), ExtReal::NegInf) => Ordering::Greater,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                a.partial_cmp(b).expect("finite ExtReal is never NaN")
            }
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}
