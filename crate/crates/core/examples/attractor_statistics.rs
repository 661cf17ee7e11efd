//! Two Lorenz runs that disagree pointwise at t = 50 still agree on the
//! time average of z.

use bealab::chaos_metrics::trajectory_statistics;
use bealab::integrators::{integrate_adaptive, SolverConfig};
use bealab::systems::Lorenz;

fn main() -> bealab::Result<()> {
    let sys = Lorenz::default();
    let mut ends = Vec::new();
    for tol in [1e-8, 1e-10] {
        let sol = integrate_adaptive(&sys, &[1.0, 0.0, 0.0].into(), 0.0, 50.0, &SolverConfig::tol(tol))?;
        let r = trajectory_statistics(&sol, (10.0, 50.0), 20, 20000)?;
        println!("tol {tol:e}: means {:.3?}, std {:.3?}", r.means, r.std_devs);
        let peak = r.histogram.counts.iter().enumerate().max_by_key(|c| c.1).unwrap().0;
        println!("    busiest z bin [{:.2}, {:.2})", r.histogram.edges[peak], r.histogram.edges[peak + 1]);
        ends.push(sol.final_state().clone());
    }
    println!("end states differ by {:.3}", ends[0].distance_inf(&ends[1]));
    Ok(())
}
