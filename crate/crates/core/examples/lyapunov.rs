//! Largest Lyapunov exponent of the Lorenz system by renormalized
//! two-trajectory divergence.

use bealab::chaos_metrics::{lyapunov_estimate, DEFAULT_RENORM_INTERVAL};
use bealab::systems::Lorenz;

fn main() -> bealab::Result<()> {
    for delta0 in [1e-6, 1e-8, 1e-10] {
        let est = lyapunov_estimate(&Lorenz::default(), &[1.0, 0.0, 0.0].into(), 1000.0, DEFAULT_RENORM_INTERVAL, delta0)?;
        println!("delta0 {delta0:e}: lambda = {:.4} over {} intervals", est.lambda, est.intervals);
    }
    Ok(())
}
