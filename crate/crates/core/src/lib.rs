//! Casimir and Casimir-Polder interactions from Lifshitz theory, with
//! saturation-modified photon statistics.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// quadrature nodes and constants are kept at their published precision
#![allow(clippy::excessive_precision)]

pub mod atomwall;
pub mod cli;
pub mod constants;
pub mod dielectric;
pub mod error;
pub mod interp;
pub mod lifshitz;
pub mod modecond;
pub mod quad;
pub mod saturation;
pub mod special;

pub use error::{Error, Result};
