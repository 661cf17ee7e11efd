//! Max residual of the Lorenz trajectory at three tolerances.
//!
//! The computed dense solution is the exact solution of a nearby problem;
//! the size of the perturbation shrinks with the tolerance.

use bealab::backward_error::max_residual;
use bealab::integrators::{integrate_adaptive, SolverConfig};
use bealab::systems::Lorenz;

fn main() -> bealab::Result<()> {
    let sys = Lorenz::default();
    for tol in [1e-8, 1e-9, 1e-10] {
        let sol = integrate_adaptive(&sys, &[1.0, 0.0, 0.0].into(), 0.0, 50.0, &SolverConfig::tol(tol))?;
        let m = max_residual(&sol, &sys, 8, false)?;
        println!("tol {tol:e}: {:>5} steps, max |r| = {:.3e} at t = {:.3}", sol.skeleton().steps, m.value, m.t);
    }
    Ok(())
}
