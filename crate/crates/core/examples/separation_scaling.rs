//! Two copies of Lorenz, each pushed by its own tiny disturbance, part ways
//! after a time growing like ln(1/eps) / lambda.

use bealab::chaos_metrics::{separation_scaling, separation_time, DisturbanceSpec};
use bealab::systems::{Lorenz, StateVector};

fn main() -> bealab::Result<()> {
    let sys = Lorenz::default();
    let y0 = StateVector::from([1.0, 0.0, 0.0]);

    let a = DisturbanceSpec::multi_sine(1e-9, 1, 3)?;
    let b = DisturbanceSpec::multi_sine(1e-9, 2, 3)?;
    let single = separation_time(&sys, &y0, &a, &b, 1.0, 200.0)?;
    println!("eps 1e-9, seeds 1/2: T = {:.3}", single.require_time()?);

    let pairs = [[1, 2], [3, 4], [5, 6], [7, 8]];
    let sc = separation_scaling(&sys, &y0, &a, &[1e-6, 1e-8, 1e-10], &pairs, 1.0, 200.0)?;
    for p in &sc.points {
        println!("eps {:e}: mean T = {:.3} over {} pairs", p.epsilon, p.time, p.times.len());
    }
    println!("slope {:.3}, so lambda ~ {:.3}", sc.slope, 1.0 / sc.slope);
    Ok(())
}
