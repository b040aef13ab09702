use thiserror::Error;

use crate::jet::JetPoint;

/// Errors raised while evaluating geometric objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    /// A value lies outside the domain of a closed-form family (e.g. `h11(t) <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural quantity fell below the degeneracy floor at a point.
    #[error("degenerate point: |{quantity}| = {value:e} <= floor {floor:e} at {point}")]
    Degenerate {
        quantity: &'static str,
        value: f64,
        floor: f64,
        point: JetPoint,
    },

    /// The fundamental metric tensor could not be inverted.
    #[error("singular metric at {point}: {reason}")]
    SingularMetric { point: JetPoint, reason: String },

    /// Rejection sampling did not find a nondegenerate point.
    #[error("sampling budget of {attempts} attempts exhausted (seed {seed})")]
    SamplingExhausted { seed: u64, attempts: usize },

    /// A finite-difference stencil left the nondegenerate domain.
    #[error("finite-difference oracle failed: {0}")]
    Oracle(String),

    /// An invalid scalar parameter (for instance a zero Einstein constant).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The operation is not defined for the given metric kind.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Custom metric table could not be parsed.
    #[error("metric file error (line {line}): {message}")]
    MetricFile { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl GeometryError {
    /// True for failures caused by the evaluation point being too close to a
    /// singular locus of the metric.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            GeometryError::Degenerate { .. }
                | GeometryError::SingularMetric { .. }
                | GeometryError::Oracle(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
