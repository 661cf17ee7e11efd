//! Time steppers: adaptive Dormand–Prince 5(4), fixed-step explicit Euler,
//! and Störmer–Verlet leapfrog.

mod adaptive;
mod dense;
mod euler;
mod leapfrog;

pub use adaptive::{integrate_adaptive, SolverConfig};
pub use dense::{DenseSolution, InterpolantKind, SolutionSkeleton};
pub use euler::integrate_euler_fixed;
pub use leapfrog::{
    leapfrog_dkd, leapfrog_dkd_step, leapfrog_kick_drift, KickDriftRun, LeapfrogRun,
};
