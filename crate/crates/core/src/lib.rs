//! Decision-theoretic evaluation of LLM deployments: expected earnings and
//! RoI per transaction, break-even frontiers, local and global (Sobol)
//! sensitivity, and the scenario/result file formats.

pub mod econ;
pub mod error;
pub mod io;
pub mod sensitivity;

pub use error::{Error, Result};
