use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::decompose::OrbitDecomposition;
use super::graph::FunctionalGraph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureId {
    /// `μ([0, x]) = ln(1 + x)/ln 2`, invariant for the Gauss map.
    Gauss,
    /// `μ([0, x]) = x`.
    Lebesgue,
}

impl MeasureId {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Self::Gauss => (1.0 + x).ln() / LN_2,
            Self::Lebesgue => x,
        }
    }
}

impl std::str::FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gauss" => Ok(Self::Gauss),
            "lebesgue" => Ok(Self::Lebesgue),
            _ => Err(Error::InvalidArgument(format!("unknown measure {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub measure: MeasureId,
    /// Sup-distance between the empirical and reference CDFs.
    pub ks_distance: f64,
    /// Where the distance is attained.
    pub at: f64,
    /// Mass the empirical measure places on the sink node, excluded before
    /// normalization.
    pub sink_mass: f64,
}

/// Kolmogorov–Smirnov distance between a discrete distribution and a
/// continuous reference. Both one-sided limits are checked at every atom.
pub fn ks_distance(atoms: &[(f64, f64)], measure: MeasureId) -> Result<(f64, f64)> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    if atoms.is_empty() || !(total > 0.0) {
        return Err(Error::InsufficientData("empty distribution".into()));
    }
    let mut sorted = atoms.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut below = 0.0;
    let mut best = (0.0, sorted[0].0);
    for &(x, w) in &sorted {
        let f = measure.cdf(x);
        let left = (below / total - f).abs();
        below += w;
        let right = (below / total - f).abs();
        let d = left.max(right);
        if d > best.0 {
            best = (d, x);
        }
    }
    Ok((best.0.min(1.0), best.1))
}

/// Long-run visit frequencies: each cycle carries its basin's share of the
/// starts, spread evenly over its nodes.
pub fn visit_frequencies(decomposition: &OrbitDecomposition) -> Vec<f64> {
    let n: usize = decomposition.component_sizes.iter().sum();
    let mut w = vec![0.0; decomposition.component.len()];
    for (c, cycle) in decomposition.cycles.iter().enumerate() {
        let share = decomposition.component_sizes[c] as f64 / n as f64 / cycle.len() as f64;
        for &u in cycle {
            w[u] = share;
        }
    }
    w
}

pub fn measure_compare(
    decomposition: &OrbitDecomposition,
    graph: &FunctionalGraph,
    measure: MeasureId,
) -> Result<MeasureReport> {
    let w = visit_frequencies(decomposition);
    let sink = graph.sink();
    let sink_mass = sink.map_or(0.0, |s| w[s]);
    let atoms: Vec<(f64, f64)> = graph
        .values
        .iter()
        .zip(&w)
        .enumerate()
        .filter(|(i, (_, &wi))| Some(*i) != sink && wi > 0.0)
        .map(|(_, (&v, &wi))| (v, wi))
        .collect();
    if atoms.is_empty() {
        return Err(Error::InsufficientData("all long-run mass sits on the sink".into()));
    }
    let (ks, at) = ks_distance(&atoms, measure)?;
    Ok(MeasureReport {
        measure,
        ks_distance: ks,
        at,
        sink_mass,
    })
}
