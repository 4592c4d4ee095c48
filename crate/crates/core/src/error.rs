use thiserror::Error;

/// Errors raised by the walk engines, series routines and ensemble drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty distribution: total probability mass is zero")]
    EmptyDistribution,

    #[error("absorber position must be nonzero")]
    AbsorberAtOrigin,

    #[error("coin operator is not unitary (deviation {deviation:.3e})")]
    NonUnitaryCoin { deviation: f64 },

    #[error("initial coin state is not normalized (norm {norm})")]
    UnnormalizedCoinState { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown disorder family `{0}`")]
    UnknownFamily(String),

    #[error("no absorption within horizon {horizon}")]
    NoAbsorption { horizon: usize },

    #[error("every realization is absorption-free at horizon {horizon}")]
    AllRealizationsExcluded { horizon: usize },

    #[error("surviving mass exhausted at step {step}")]
    MassExhausted { step: usize },

    #[error("series term at index {index} is not strictly positive ({value})")]
    NonPositiveTerm { index: u64, value: f64 },

    #[error("nonpositive curve value {value} at abscissa {abscissa}")]
    NonPositiveCurveValue { abscissa: u64, value: f64 },

    #[error("fit needs at least 3 points in [{t_lo}, {t_hi}], found {found}")]
    TooFewPoints { t_lo: u64, t_hi: u64, found: usize },

    #[error("internal series inconsistency: {0}")]
    SeriesInconsistency(String),
}

impl Error {
    /// True for failures of the numerics (as opposed to a bad configuration).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EmptyDistribution
                | Error::NoAbsorption { .. }
                | Error::AllRealizationsExcluded { .. }
                | Error::MassExhausted { .. }
                | Error::NonPositiveTerm { .. }
                | Error::NonPositiveCurveValue { .. }
                | Error::SeriesInconsistency(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
