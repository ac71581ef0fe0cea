use thiserror::Error;

use crate::equipartition::EquipartitionReport;

/// Errors raised by every module of the crate.
#[derive(Debug, Error)]
pub enum SantaloError {
    #[error("generator matrix is degenerate (|det| = {det:e})")]
    DegenerateBasis { det: f64 },
    #[error("cone apex must be the origin")]
    NonZeroApex,
    #[error("malformed Yao-Yao tree: {0}")]
    MalformedTree(String),
    #[error("affine form does not vanish at the center (value {0:e})")]
    FormNotCentered(f64),
    #[error("measure has no mass on the requested region")]
    EmptySupport,
    #[error("hyperplane normal is zero")]
    ZeroNormal,
    #[error("direction lies in the hyperplane")]
    DirectionInHyperplane,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("no sign change of the center residual within |s| <= {limit}")]
    NoBracket {
        limit: f64,
        best: Box<EquipartitionReport>,
    },
    #[error("equipartition not converged: imbalance {} above tolerance", .best.max_imbalance)]
    NotConverged { best: Box<EquipartitionReport> },
    #[error("weight is not integrable (quadrature did not converge)")]
    NonIntegrable,
    #[error("field has support outside the closed positive orthant")]
    SupportOutsideOrthant,
    #[error("origin is not strictly interior to the body")]
    OriginNotInterior,
    #[error("body is degenerate: {0}")]
    DegenerateBody(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SantaloError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::InvalidInput(msg.into())
    }

    /// Short machine-readable name used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::DegenerateBasis { .. } => "DegenerateBasis",
            Self::NonZeroApex => "NonZeroApex",
            Self::MalformedTree(_) => "MalformedTree",
            Self::FormNotCentered(_) => "FormNotCentered",
            Self::EmptySupport => "EmptySupport",
            Self::ZeroNormal => "ZeroNormal",
            Self::DirectionInHyperplane => "DirectionInHyperplane",
            Self::DimensionMismatch { .. } => "DimensionMismatch",
            Self::UnsupportedDimension(_) => "UnsupportedDimension",
            Self::NoBracket { .. } => "NoBracket",
            Self::NotConverged { .. } => "NotConverged",
            Self::NonIntegrable => "NonIntegrable",
            Self::SupportOutsideOrthant => "SupportOutsideOrthant",
            Self::OriginNotInterior => "OriginNotInterior",
            Self::DegenerateBody(_) => "DegenerateBody",
            Self::InvalidInput(_) => "InvalidInput",
            Self::Io(_) => "Io",
            Self::Json(_) => "Json",
        }
    }

    /// Solver failures that still carry a best-effort report.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Self::NoBracket { .. } | Self::NotConverged { .. })
    }
}

pub type Result<T, E = SantaloError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(SantaloError::DimensionMismatch { expected, got });
    }
    Ok(())
}
