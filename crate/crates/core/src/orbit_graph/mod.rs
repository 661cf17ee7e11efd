//! Functional graphs of minifloat maps: construction, cycle structure,
//! invariant-measure comparison, shadowing and export.

mod decompose;
mod export;
mod graph;
mod measure;
mod shadow;

pub use decompose::*;
pub use export::*;
pub use graph::*;
pub use measure::*;
pub use shadow::*;

#[cfg(test)]
mod tests;
