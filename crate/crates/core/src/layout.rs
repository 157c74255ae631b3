//! Deterministic core-periphery layout and scatter data for figure output.
//!
//! Nodes are sorted by descending centrality (ascending id breaks ties) and
//! placed on concentric rings: radius is the competition rank of the node's
//! centrality divided by n, so higher centrality always means a radius no
//! larger than any lower-centrality node and exact ties share a ring. Angles
//! advance by the golden angle for even dispersion. Output is figure data,
//! not rendered images.

use std::collections::BTreeMap;

use crate::graph::Graph;
use crate::ids::StudentId;
use crate::metrics::CentralityVector;
use crate::stats::{default_pvalue, spearman_rho, RegularizedSeries, StatsError};

/// Golden angle in radians, 2*pi*(1 - 1/phi).
pub const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LayoutError {
    #[error("cannot lay out an empty graph")]
    EmptyGraph,
    #[error("centrality domain does not match the graph's node set")]
    CentralityDomainMismatch,
    #[error("scatter series have different domains")]
    ScatterDomainMismatch,
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// One placed node.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutNode {
    pub id: StudentId,
    /// Ring radius in (0, 1]; smaller means more central.
    pub radius: f64,
    /// Angle in [0, 2*pi).
    pub angle: f64,
    /// Centrality magnitude, for color mapping.
    pub color_value: f64,
    /// Relative rank of the trait score difference, for size mapping; 0 for
    /// nodes without a score.
    pub size_value: f64,
}

/// Core-periphery placement of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutResult {
    pub nodes: Vec<LayoutNode>,
    pub edges: Vec<(StudentId, StudentId)>,
}

/// Place nodes on centrality rings. `delta_f_ranks` supplies the size
/// channel (relative rank of the score difference).
pub fn core_periphery_layout(
    g: &Graph,
    centrality: &CentralityVector,
    delta_f_ranks: &BTreeMap<StudentId, f64>,
) -> Result<LayoutResult, LayoutError> {
    let n = g.node_count();
    if n == 0 {
        return Err(LayoutError::EmptyGraph);
    }
    if centrality.scores.len() != n
        || g.nodes().iter().any(|id| !centrality.scores.contains_key(id))
    {
        return Err(LayoutError::CentralityDomainMismatch);
    }

    let mut order: Vec<(&StudentId, f64)> = centrality
        .scores
        .iter()
        .map(|(id, &c)| (id, c))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let mut nodes = Vec::with_capacity(n);
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut ring_rank = 0usize;
    for (pos, &(id, c)) in order.iter().enumerate() {
        // competition rank: ties keep the rank of the first of their group
        if pos == 0 || c != order[pos - 1].1 {
            ring_rank = pos + 1;
        }
        nodes.push(LayoutNode {
            id: id.clone(),
            radius: ring_rank as f64 / n as f64,
            angle: (pos as f64 * GOLDEN_ANGLE).rem_euclid(two_pi),
            color_value: c,
            size_value: delta_f_ranks.get(id).copied().unwrap_or(0.0),
        });
    }
    let edges = g
        .edge_ids()
        .into_iter()
        .map(|(u, v)| (u.clone(), v.clone()))
        .collect();
    Ok(LayoutResult { nodes, edges })
}

/// One scatter point: regularized centrality vs regularized score difference.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterPoint {
    pub id: StudentId,
    pub x: f64,
    pub y: f64,
}

/// Paired scatter data with its correlation annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSeries {
    pub points: Vec<ScatterPoint>,
    /// `(rho, p)`; None when fewer than 3 points make rho undefined.
    pub annotation: Option<(f64, f64)>,
}

/// Pair two regularized series over the same student domain.
pub fn scatter_series(
    reg_centrality: &RegularizedSeries,
    reg_delta_f: &RegularizedSeries,
) -> Result<ScatterSeries, LayoutError> {
    let xs = reg_centrality.values();
    let ys = reg_delta_f.values();
    if xs.len() != ys.len() || xs.keys().any(|k| !ys.contains_key(k)) {
        return Err(LayoutError::ScatterDomainMismatch);
    }
    let points: Vec<ScatterPoint> = xs
        .iter()
        .map(|(id, &x)| ScatterPoint {
            id: id.clone(),
            x,
            y: ys[id],
        })
        .collect();
    let annotation = if points.len() < 3 {
        None
    } else {
        let x: Vec<f64> = points.iter().map(|p| p.x).collect();
        let y: Vec<f64> = points.iter().map(|p| p.y).collect();
        match spearman_rho(&x, &y) {
            Ok(rho) => Some((rho, default_pvalue(rho, points.len())?)),
            Err(StatsError::ConstantSeries) => None,
            Err(e) => return Err(e.into()),
        }
    };
    Ok(ScatterSeries { points, annotation })
}
