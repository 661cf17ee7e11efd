use serde::{Deserialize, Serialize};

use super::graph::FunctionalGraph;
use crate::error::{Error, Result};
use crate::stats::least_squares_fit;
use crate::lowprec::{FloatFormat, MapId};

/// Cycles, basins and transient lengths of a functional graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitDecomposition {
    /// Each cycle starts at its smallest node; cycles sorted by that node.
    pub cycles: Vec<Vec<usize>>,
    /// Index into `cycles` of the cycle each node reaches.
    pub component: Vec<usize>,
    /// Steps from each node to its cycle; 0 on cycles.
    pub transient: Vec<usize>,
    pub component_sizes: Vec<usize>,
    pub longest_cycle: usize,
    pub longest_transient: usize,
}

impl OrbitDecomposition {
    /// Sorted cycle lengths.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.cycles.iter().map(Vec::len).collect();
        v.sort_unstable();
        v
    }
}

const UNSEEN: usize = usize::MAX;
const ON_PATH: usize = usize::MAX - 1;

/// Linear-time decomposition. Every node is pushed on a path once.
pub fn decompose(graph: &FunctionalGraph) -> OrbitDecomposition {
    let succ = &graph.successors;
    let n = succ.len();
    // Temporary component labels in discovery order; relabelled at the end.
    let mut comp = vec![UNSEEN; n];
    let mut transient = vec![0usize; n];
    let mut raw_cycles: Vec<Vec<usize>> = Vec::new();
    let mut path = Vec::new();
    for start in 0..n {
        if comp[start] != UNSEEN {
            continue;
        }
        path.clear();
        let mut v = start;
        while comp[v] == UNSEEN {
            comp[v] = ON_PATH;
            path.push(v);
            v = succ[v];
        }
        // Either v is on the current path (new cycle) or already labelled.
        let mut tail_end = path.len();
        if comp[v] == ON_PATH {
            let pos = path.iter().position(|&u| u == v).expect("on path");
            let id = raw_cycles.len();
            let cycle = path[pos..].to_vec();
            for &u in &cycle {
                comp[u] = id;
                transient[u] = 0;
            }
            raw_cycles.push(cycle);
            tail_end = pos;
        }
        for &u in path[..tail_end].iter().rev() {
            let s = succ[u];
            comp[u] = comp[s];
            transient[u] = transient[s] + 1;
        }
    }

    let mut order: Vec<usize> = (0..raw_cycles.len()).collect();
    let min_of = |c: &Vec<usize>| *c.iter().min().expect("non-empty cycle");
    order.sort_by_key(|&i| min_of(&raw_cycles[i]));
    let mut relabel = vec![0; raw_cycles.len()];
    let mut cycles = Vec::with_capacity(raw_cycles.len());
    for (new, &old) in order.iter().enumerate() {
        relabel[old] = new;
        let c = &raw_cycles[old];
        let k = c.iter().position(|&u| u == min_of(c)).unwrap();
        cycles.push(c[k..].iter().chain(&c[..k]).copied().collect::<Vec<_>>());
    }
    let component: Vec<usize> = comp.iter().map(|&c| relabel[c]).collect();
    let mut component_sizes = vec![0; cycles.len()];
    for &c in &component {
        component_sizes[c] += 1;
    }
    OrbitDecomposition {
        longest_cycle: cycles.iter().map(Vec::len).max().unwrap_or(0),
        longest_transient: transient.iter().copied().max().unwrap_or(0),
        cycles,
        component,
        transient,
        component_sizes,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub format: FloatFormat,
    pub n: usize,
    pub longest_cycle: usize,
    pub longest_transient: usize,
    pub cycle_count: usize,
}

/// Longest cycle plus longest transient against `N`, on log-log axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub map: MapId,
    pub rows: Vec<ScalingRow>,
    pub slope: f64,
    pub intercept: f64,
}

/// Log-log fit of `lengths` against `ns`.
pub fn fit_length_scaling(ns: &[usize], lengths: &[usize]) -> Result<(f64, f64)> {
    if ns.len() < 3 {
        return Err(Error::InsufficientData("need at least three formats".into()));
    }
    if lengths.iter().any(|&l| l == 0) {
        return Err(Error::InsufficientData("zero orbit length cannot be fitted on log axes".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = lengths.iter().map(|&l| (l as f64).ln()).collect();
    least_squares_fit(&xs, &ys)
}

pub fn scaling_report(map: MapId, formats: &[FloatFormat], options: super::GraphOptions) -> Result<ScalingReport> {
    if formats.len() < 3 {
        return Err(Error::InsufficientData("need at least three formats".into()));
    }
    let mut rows = Vec::with_capacity(formats.len());
    for &format in formats {
        let g = super::build_graph_with(format, map, options)?;
        let d = decompose(&g);
        rows.push(ScalingRow {
            format,
            n: g.unit_interval_len(),
            longest_cycle: d.longest_cycle,
            longest_transient: d.longest_transient,
            cycle_count: d.cycles.len(),
        });
    }
    let ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let ls: Vec<usize> = rows.iter().map(|r| r.longest_cycle + r.longest_transient).collect();
    let (slope, intercept) = fit_length_scaling(&ns, &ls)?;
    Ok(ScalingReport {
        map,
        rows,
        slope,
        intercept,
    })
}
