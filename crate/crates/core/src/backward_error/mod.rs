//! Backward error: residuals of dense output, modified equations and
//! modified Hamiltonians.

mod hamiltonian;
mod modified_euler;
mod residual;

pub use hamiltonian::*;
pub use modified_euler::*;
pub use residual::*;
