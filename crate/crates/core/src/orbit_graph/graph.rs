use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lowprec::{enumerate_unit_interval, map_value, round_to_format, ArithmeticMode, FloatFormat, MapId};

/// Target of nodes whose image is NaN (or leaves `[0, 1]`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NanPolicy {
    /// Send them to the node 1.0, as a linear search for the image would.
    #[default]
    FirstNode,
    /// Send them to an extra absorbing node appended after 0.0.
    Sink,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOptions {
    pub mode: ArithmeticMode,
    pub nan_policy: NanPolicy,
}

/// Functional graph of a map on the values of a format in `[0, 1]`.
///
/// Node `j` (0-based) is the `j`-th value of the descending enumeration,
/// so node 0 is 1.0 and node `n − 1` is 0.0. With [`NanPolicy::Sink`]
/// there is one more node, valued NaN, mapping to itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionalGraph {
    pub format: FloatFormat,
    pub map: MapId,
    pub options: GraphOptions,
    pub values: Vec<f64>,
    /// 0-based successor of each node.
    pub successors: Vec<usize>,
    /// Nodes whose image was NaN or fell outside `[0, 1]`.
    pub redirected: Vec<usize>,
}

impl FunctionalGraph {
    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    /// Number of enumerated values (excludes a sink node).
    pub fn unit_interval_len(&self) -> usize {
        self.values.iter().filter(|v| !v.is_nan()).count()
    }

    pub fn sink(&self) -> Option<usize> {
        (self.options.nan_policy == NanPolicy::Sink).then(|| self.len() - 1)
    }

    /// 1-based successor indices, the layout of the edge table.
    pub fn successors_one_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.successors.iter().map(|s| s + 1)
    }

    pub fn was_redirected(&self, node: usize) -> bool {
        self.redirected.binary_search(&node).is_ok()
    }
}

pub fn build_graph(format: FloatFormat, map: MapId) -> Result<FunctionalGraph> {
    build_graph_with(format, map, GraphOptions::default())
}

pub fn build_graph_with(format: FloatFormat, map: MapId, options: GraphOptions) -> Result<FunctionalGraph> {
    let nodes = enumerate_unit_interval(format)?;
    let n = nodes.len();
    let one = round_to_format(1.0, format).bits();
    let target = match options.nan_policy {
        NanPolicy::FirstNode => 0,
        NanPolicy::Sink => n,
    };
    let mut values: Vec<f64> = nodes.iter().map(|x| x.value()).collect();
    let images: Vec<Option<usize>> = values
        .par_iter()
        .map(|&x| {
            let y = map_value(x, map, format, options.mode);
            (y >= 0.0 && y <= 1.0).then(|| (one - round_to_format(y, format).bits()) as usize)
        })
        .collect();
    let mut successors = Vec::with_capacity(n + 1);
    let mut redirected = Vec::new();
    for (j, img) in images.into_iter().enumerate() {
        successors.push(img.unwrap_or_else(|| {
            redirected.push(j);
            target
        }));
    }
    if options.nan_policy == NanPolicy::Sink {
        successors.push(n);
        values.push(f64::NAN);
    }
    Ok(FunctionalGraph {
        format,
        map,
        options,
        values,
        successors,
        redirected,
    })
}
