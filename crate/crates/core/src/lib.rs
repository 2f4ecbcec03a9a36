//! Ground-state geometry of the rotated XY spin chain.

pub mod error;
pub mod geometry;
pub mod ground_state;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod topology;

pub use error::{Error, Result};
