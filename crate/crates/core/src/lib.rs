pub mod backward_error;
pub mod chaos_metrics;
pub mod cli;
pub mod error;
pub mod integrators;
pub mod lowprec;
pub mod orbit_graph;
pub mod stats;
pub mod systems;

pub use error::{Error, Result};
