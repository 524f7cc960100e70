use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse-graining regime violation: the averaging window is not well
/// separated from the carrier period and the envelope width.
#[derive(Debug, Clone, PartialEq, Error)]
#[error(
    "coarse-graining window T = {window} outside regime: T*omega0 = {carrier_cycles:.3} (need >= {min_carrier_cycles}), \
     T*spread = {envelope_fraction:.3} (need <= {max_envelope_fraction})"
)]
pub struct RegimeViolation {
    pub window: f64,
    pub carrier_cycles: f64,
    pub envelope_fraction: f64,
    pub min_carrier_cycles: f64,
    pub max_envelope_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("quadrature grid needs at least {min} nodes, got {n}")]
    GridTooSmall { n: usize, min: usize },

    #[error("amplitude is not normalized on its grid (norm = {norm:.3e})")]
    NotNormalized { norm: f64 },

    #[error("tabulated amplitudes must share one frequency grid")]
    GridMismatch,

    #[error("coherent input must carry the same amplitude on both ports")]
    AsymmetricInput,

    #[error(transparent)]
    Regime(#[from] RegimeViolation),

    #[error("expected {requested} features, found {found}")]
    FeatureCount { requested: usize, found: usize },

    #[error("curve has non-positive plateau {0}")]
    NonPositivePlateau(f64),

    #[error("dips are merged or misordered (left = {left}, right = {right})")]
    MergedDips { left: f64, right: f64 },

    #[error("inconsistent control delays: u^2 + v^2 = {0} exceeds 1")]
    InconsistentDelays(f64),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// True for failures that come from the physics regime (windows,
    /// feature extraction) rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Regime(_)
                | Error::FeatureCount { .. }
                | Error::MergedDips { .. }
                | Error::NotNormalized { .. }
                | Error::InconsistentDelays(_)
        )
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {value}")))
    }
}
