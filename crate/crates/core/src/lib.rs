//! Noise-adapted quantum error correction: orthogonalized Kraus records,
//! Petz-type recoveries built from them, and fidelity metrics.

// Guards such as `!(x > 0.0)` are written that way to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod error;
pub mod experiments;
pub mod matkernel;
pub mod metrics;
pub mod orthogonalizer;
pub mod presets;
pub mod recovery;
pub mod cli;
pub mod codes;

pub use error::{Error, Result};
