//! A binary16 Gauss pseudo-orbit lies within a unit
//! roundoff of an exact orbit, built backward through the same branches.

use bealab::lowprec::{FloatFormat, MapId};
use bealab::orbit_graph::{build_graph, shadow_refine_gauss};

fn main() -> bealab::Result<()> {
    let g = build_graph(FloatFormat::BINARY16, MapId::Gauss)?;
    let start = g.values.iter().position(|&v| v < 0.618034).unwrap();
    let r = shadow_refine_gauss(&g, start, 30)?;
    println!("{} points from x0 = {}", r.indices.len(), r.pseudo_orbit[0]);
    for n in 0..r.indices.len().min(8) {
        println!("  x = {:<12} z = {:<22} |z - x| = {:.2e}", r.pseudo_orbit[n], r.shadow[n], r.distances[n]);
    }
    println!("max distance {:.3} unit roundoffs, contraction {}", r.max_distance_units, r.contraction_holds);
    Ok(())
}
