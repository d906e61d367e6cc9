//! Fundamental systems of the generalized hypergeometric equation at 0, 1
//! and ∞, their sine/cosecant connection matrices, and numerical checks of
//! the identities between them.
//!
//! Indices are 1-based throughout the public API: `alpha(1)` is α₁ and
//! `beta(n + 1)` is the fixed value 1.

pub mod connection;
pub mod oracle;
pub mod error;
pub mod params;
pub mod series;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use params::{validate, ExponentSet, GenericityReport, Parameters, EPS_GENERIC};
pub use series::{SeriesOptions, SeriesValue, SolutionVector};
