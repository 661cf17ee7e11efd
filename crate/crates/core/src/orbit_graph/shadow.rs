use serde::{Deserialize, Serialize};

use super::graph::FunctionalGraph;
use crate::error::{Error, Result};
use crate::lowprec::{round_value, unit_roundoff, MapId};

/// Largest relative defect allowed in the shadow recurrence.
pub const SHADOW_RESIDUAL_BOUND: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowResult {
    /// 0-based node indices of the pseudo-orbit.
    pub indices: Vec<usize>,
    pub pseudo_orbit: Vec<f64>,
    /// Branch `k_n` used at each step but the last.
    pub branches: Vec<u64>,
    pub shadow: Vec<f64>,
    pub distances: Vec<f64>,
    /// `|x_n − 1/(k_n + x_{n+1})|`: how far the pseudo-orbit is from an
    /// exact preimage of its own next point.
    pub local_defects: Vec<f64>,
    /// `|1/z_n − (k_n + z_{n+1})| / |1/z_n|`.
    pub recurrence_residuals: Vec<f64>,
    pub max_distance: f64,
    /// `max_distance / unit_roundoff(format)`.
    pub max_distance_units: f64,
    /// `|z_n − x_n| ≤ |z_{n+1} − x_{n+1}| + local_defects[n]` at every step.
    pub contraction_holds: bool,
}

/// Follows the Gauss pseudo-orbit from `start`, stopping before any node
/// valued 0 or reached through a NaN redirect, for at most `max_len` points.
pub fn gauss_pseudo_orbit(graph: &FunctionalGraph, start: usize, max_len: usize) -> Result<Vec<usize>> {
    if graph.map != MapId::Gauss {
        return Err(Error::InvalidArgument("shadowing is implemented for the Gauss map only".into()));
    }
    if start >= graph.len() {
        return Err(Error::InvalidArgument(format!("start index {start} out of range")));
    }
    let usable = |j: usize| {
        let v = graph.values[j];
        v > 0.0 && v <= 1.0
    };
    if !usable(start) {
        return Err(Error::Unshadowable(format!("start node {start} has value {}", graph.values[start])));
    }
    let mut orbit = vec![start];
    while orbit.len() < max_len {
        let cur = *orbit.last().unwrap();
        let next = graph.successors[cur];
        if graph.was_redirected(cur) || !usable(next) {
            break;
        }
        orbit.push(next);
    }
    Ok(orbit)
}

/// Builds the exact Gauss orbit that ends at the pseudo-orbit's last point
/// and follows its branches backward: `z_n = 1/(k_n + z_{n+1})`.
pub fn shadow_refine_gauss(graph: &FunctionalGraph, start: usize, max_len: usize) -> Result<ShadowResult> {
    let indices = gauss_pseudo_orbit(graph, start, max_len)?;
    if indices.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "pseudo-orbit from node {start} has fewer than two usable points"
        )));
    }
    let x: Vec<f64> = indices.iter().map(|&j| graph.values[j]).collect();
    let len = x.len();
    let mut branches = Vec::with_capacity(len - 1);
    for &xn in &x[..len - 1] {
        let k = round_value(1.0 / xn, graph.format).floor();
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::Unshadowable(format!("branch {k} at x = {xn}")));
        }
        branches.push(k as u64);
    }
    let mut z = vec![0.0; len];
    z[len - 1] = x[len - 1];
    for n in (0..len - 1).rev() {
        z[n] = 1.0 / (branches[n] as f64 + z[n + 1]);
    }
    let distances: Vec<f64> = z.iter().zip(&x).map(|(a, b)| (a - b).abs()).collect();
    let local_defects: Vec<f64> = (0..len - 1)
        .map(|n| (x[n] - 1.0 / (branches[n] as f64 + x[n + 1])).abs())
        .collect();
    let recurrence_residuals: Vec<f64> = (0..len - 1)
        .map(|n| {
            let inv = 1.0 / z[n];
            (inv - (branches[n] as f64 + z[n + 1])).abs() / inv.abs()
        })
        .collect();
    let slack = 4.0 * f64::EPSILON;
    let contraction_holds = (0..len - 1).all(|n| distances[n] <= distances[n + 1] + local_defects[n] + slack);
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    Ok(ShadowResult {
        max_distance_units: max_distance / unit_roundoff(graph.format),
        indices,
        pseudo_orbit: x,
        branches,
        shadow: z,
        distances,
        local_defects,
        recurrence_residuals,
        max_distance,
        contraction_holds,
    })
}
