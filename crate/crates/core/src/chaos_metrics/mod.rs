//! Chaos diagnostics: exponents, disturbed-trajectory separation,
//! statistics and secular growth.

mod disturbance;
mod lyapunov;
mod secular;
mod separation;
mod statistics;

pub use disturbance::*;
pub use lyapunov::*;
pub use secular::*;
pub use separation::*;
pub use statistics::*;
