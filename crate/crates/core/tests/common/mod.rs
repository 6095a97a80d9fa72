//! Helpers shared by the integration tests and the acceptance runner.

#![allow(dead_code)]

pub mod hyperboloid;
pub mod invariants;
pub mod sampler_checks;
pub mod stats;
pub mod tour_oracle;
