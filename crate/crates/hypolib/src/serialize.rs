//! Shared bits of the JSON document format.

use crate::error::{HypoError, Result};

/// Version tag carried by every JSON document and report.
pub const SCHEMA: &str = "hypolib-v1";

pub(crate) fn check_schema(schema: &str, kind: &str, expected_kind: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(HypoError::Schema(format!(
            "unsupported schema `{schema}`, expected `{SCHEMA}`"
        )));
    }
    if kind != expected_kind {
        return Err(HypoError::Schema(format!(
            "unexpected document type `{kind}`, expected `{expected_kind}`"
        )));
    }
    Ok(())
}
