//! The Gauss map on an 8-bit float format: every orbit is eventually
//! periodic, and the cycles depend on where rounding happens.

use bealab::lowprec::{enumerate_unit_interval, ArithmeticMode, FloatFormat, MapId};
use bealab::orbit_graph::{build_graph_with, decompose, measure_compare, to_dot, GraphOptions, MeasureId};

fn main() -> bealab::Result<()> {
    let values = enumerate_unit_interval(FloatFormat::E3M4)?;
    println!("e3m4 has {} values in [0, 1]", values.len());
    for mode in [ArithmeticMode::Stepwise, ArithmeticMode::SingleRounding] {
        let g = build_graph_with(FloatFormat::E3M4, MapId::Gauss, GraphOptions { mode, ..Default::default() })?;
        let d = decompose(&g);
        println!("{mode:?}: cycle lengths {:?}, longest transient {}", d.cycle_lengths(), d.longest_transient);
        for c in &d.cycles {
            let vals: Vec<f64> = c.iter().map(|&u| g.values[u]).collect();
            println!("    cycle {vals:?}");
        }
        let m = measure_compare(&d, &g, MeasureId::Gauss)?;
        println!("    KS distance to the Gauss measure {:.3}", m.ks_distance);
    }
    let g = build_graph_with(FloatFormat::E3M4, MapId::Gauss, GraphOptions::default())?;
    println!("{}", to_dot(&g)?.lines().take(4).collect::<Vec<_>>().join("\n"));
    Ok(())
}
