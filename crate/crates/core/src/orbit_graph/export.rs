use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use super::graph::FunctionalGraph;
use crate::error::{Error, Result};

pub const DOT_NODE_LIMIT: usize = 512;

/// Single-column edge table: header `Column1`, then the 1-based successor
/// of each node in enumeration order.
pub fn write_edges<W: Write>(graph: &FunctionalGraph, mut out: W) -> Result<()> {
    writeln!(out, "Column1")?;
    for s in graph.successors_one_based() {
        writeln!(out, "{s}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn export_edges(graph: &FunctionalGraph, destination: &Path) -> Result<()> {
    let file = std::fs::File::create(destination)?;
    write_edges(graph, std::io::BufWriter::new(file))
}

/// Graphviz rendering; nodes are labelled by value.
pub fn to_dot(graph: &FunctionalGraph) -> Result<String> {
    if graph.len() > DOT_NODE_LIMIT {
        return Err(Error::InvalidArgument(format!(
            "graph has {} nodes; DOT export is limited to {DOT_NODE_LIMIT}",
            graph.len()
        )));
    }
    let mut s = String::new();
    let _ = writeln!(s, "digraph \"{} {}\" {{", graph.map, graph.format);
    for (j, v) in graph.values.iter().enumerate() {
        let _ = writeln!(s, "  n{} [label=\"{}\"];", j + 1, v);
    }
    for (j, t) in graph.successors.iter().enumerate() {
        let _ = writeln!(s, "  n{} -> n{};", j + 1, t + 1);
    }
    s.push_str("}\n");
    Ok(s)
}
