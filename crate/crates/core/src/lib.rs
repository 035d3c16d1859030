//! Certified enclosures of the first zero-resonance coupling `κ*(V)` of
//! radial Schrödinger operators `-Δ - κV` in `n ≥ 3` dimensions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod cli;
pub mod enclosure;
pub mod error;
pub mod par;
pub mod poly;
pub mod quad;
pub mod radial;
pub mod report;
pub mod specfun;
pub mod variational;
pub mod wronskian;
pub mod yukawa_exterior;
pub mod yukawa_interior;

pub use enclosure::{Enclosure, Sign};
pub use error::{Error, Result};
