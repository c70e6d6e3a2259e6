//! Special functions needed by the series methods: Laguerre polynomials (with
//! derivatives and an overflow-safe exponentially scaled variant) and the Airy
//! function `Ai` with its derivative.

mod airy;
mod laguerre;

pub use airy::{airy_ai, AIRY_WINDOW};
pub use laguerre::{laguerre_all, scaled_laguerre, LaguerreTable, ScaledLaguerre, ScaledTerm};

use thiserror::Error;

/// Errors from the special-function layer.
#[derive(Debug, Error, PartialEq)]
pub enum SpecialFnError {
    /// Argument outside the documented validity window.
    #[error("argument {x} outside the supported window [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },
    /// Laguerre argument must be nonnegative.
    #[error("Laguerre argument must be nonnegative and finite, got {u}")]
    NegativeArgument { u: f64 },
}
