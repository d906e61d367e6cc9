use num_complex::Complex64;
use thiserror::Error;

use crate::params::GenericityReport;

/// Every failure the library can report.
///
/// The `Display` strings are stable; the CLI forwards them verbatim in its
/// error documents.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma pole at {z}")]
    GammaPole { z: Complex64 },

    #[error("beta pole at B({a}, {b})")]
    BetaPole { a: Complex64, b: Complex64 },

    #[error("index out of range: {what}")]
    IndexOutOfRange { what: String },

    #[error("max terms exceeded after {terms} terms (partial value {partial})")]
    MaxTermsExceeded { partial: Complex64, terms: usize },

    #[error("outside disk: |{what}| = {modulus} is not below 1")]
    OutsideDisk { what: &'static str, modulus: f64 },

    #[error("near disk boundary: |{what}| = {modulus} > 0.8; raise max_terms explicitly to proceed")]
    NearDiskBoundary { what: &'static str, modulus: f64 },

    #[error("max order exceeded after {order} orders (partial value {partial})")]
    MaxOrderExceeded { partial: Complex64, order: usize },

    #[error("pole in a lower Pochhammer base: {base}")]
    LowerPole { base: Complex64 },

    #[error("non-finite value in {field}")]
    NonFiniteValue { field: String },

    #[error("invalid {field}: {message}")]
    Schema { field: String, message: String },

    #[error("near-degenerate denominator: s({argument}) has magnitude {magnitude:e}")]
    NearDegenerateDenominator { argument: Complex64, magnitude: f64 },

    #[error("resonant total exponent: beta_(1,n) - alpha_(1,n+1) = {value} is near an integer")]
    ResonantTotalExponent { value: Complex64 },

    #[error("non-generic parameters: {0}")]
    NotGeneric(GenericityReport),

    #[error("non-integrable exponent: {what} has real part {real_part}")]
    NonIntegrableExponent { what: String, real_part: f64 },

    #[error("quadrature stagnation: successive levels differ by {difference:e} (tolerance {tolerance:e})")]
    QuadratureStagnation { difference: f64, tolerance: f64 },

    #[error("pole collision: poles {first} and {second} are closer than 1e-8")]
    PoleCollision { first: Complex64, second: Complex64 },

    #[error("divergent series: exponent {exponent} has non-positive real part")]
    Divergent { exponent: Complex64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Short machine-readable tag used in JSON error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GammaPole { .. } => "gamma pole",
            Error::BetaPole { .. } => "beta pole",
            Error::IndexOutOfRange { .. } => "index out of range",
            Error::MaxTermsExceeded { .. } => "max terms exceeded",
            Error::OutsideDisk { .. } => "outside disk",
            Error::NearDiskBoundary { .. } => "near disk boundary",
            Error::MaxOrderExceeded { .. } => "max order exceeded",
            Error::LowerPole { .. } => "lower pole",
            Error::NonFiniteValue { .. } => "non-finite value",
            Error::Schema { .. } => "schema",
            Error::NearDegenerateDenominator { .. } => "near-degenerate denominator",
            Error::ResonantTotalExponent { .. } => "resonant total exponent",
            Error::NotGeneric(_) => "non-generic parameters",
            Error::NonIntegrableExponent { .. } => "non-integrable exponent",
            Error::QuadratureStagnation { .. } => "quadrature stagnation",
            Error::PoleCollision { .. } => "pole collision",
            Error::Divergent { .. } => "divergent series",
            Error::Unsupported(_) => "unsupported",
        }
    }

    /// True for input-shape problems, false for numerical refusals.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. }
                | Error::NonFiniteValue { .. }
                | Error::IndexOutOfRange { .. }
                | Error::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
