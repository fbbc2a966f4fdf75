//! Robust synchrony, quotients and lifts of gene regulatory networks under
//! additive (SUM) and multiplicative (MULT, PROD) regulation models.
//!
//! Genes are 0-based in the API and 1-based in every document, partition
//! string and report.

pub mod bundled;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod lift;
pub mod matrix;
pub mod model;
pub mod partition;
pub mod regulation;
pub mod synchrony;

pub use error::{GrnError, Result};
pub use matrix::Matrix;
pub use model::{GrnNetwork, InternalDynamics, ModelKind, NodeKind, Sign};
pub use partition::GenePartition;
pub use regulation::{Identity, RegulatoryFamily};
