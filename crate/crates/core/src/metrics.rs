//! Clustering coefficients and node centrality measures.
//!
//! Degree centrality is `deg / (n-1)`. Closeness uses the component-scaled
//! form `(r/(n-1)) * (r / sum_of_distances)` with `r` the number of reachable
//! nodes, so disconnected graphs get sensible scores and isolated-in-component
//! comparisons stay fair. Betweenness is Brandes' accumulation over unordered
//! pairs, normalized by `(n-1)(n-2)/2`.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use crate::cooccur::{CoOccurrenceGraph, GraphLabel};
use crate::graph::Graph;
use crate::ids::StudentId;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("node {0} is not in the graph")]
    UnknownNode(String),
    #[error("operation undefined on an empty graph")]
    EmptyGraph,
}

/// Which centrality a vector holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CentralityKind {
    Degree,
    Closeness,
    Betweenness,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 3] = [
        CentralityKind::Degree,
        CentralityKind::Closeness,
        CentralityKind::Betweenness,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "dc",
            CentralityKind::Closeness => "cc",
            CentralityKind::Betweenness => "bc",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dc" | "degree" => Some(CentralityKind::Degree),
            "cc" | "closeness" => Some(CentralityKind::Closeness),
            "bc" | "betweenness" => Some(CentralityKind::Betweenness),
            _ => None,
        }
    }
}

impl std::fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Per-node scores of one centrality kind on one graph.
#[derive(Debug, Clone)]
pub struct CentralityVector {
    pub kind: CentralityKind,
    pub graph_label: GraphLabel,
    pub scores: BTreeMap<StudentId, f64>,
}

impl CentralityVector {
    pub fn get(&self, id: &StudentId) -> Option<f64> {
        self.scores.get(id).copied()
    }
}

/// Convention for nodes of degree < 2 in the graph average clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusteringConvention {
    /// Count degree-<2 nodes as 0 (default).
    CountAsZero,
    /// Leave degree-<2 nodes out of the average.
    ExcludeLowDegree,
}

/// Fraction of connected neighbor pairs around node index `v`.
pub(crate) fn local_clustering_idx(g: &Graph, v: usize) -> f64 {
    let neighbors: Vec<usize> = g.neighbors(v).collect();
    let k = neighbors.len();
    if k < 2 {
        return 0.0;
    }
    let mut triangles = 0usize;
    for i in 0..k {
        for j in (i + 1)..k {
            if g.contains_edge(neighbors[i], neighbors[j]) {
                triangles += 1;
            }
        }
    }
    2.0 * triangles as f64 / (k * (k - 1)) as f64
}

/// Local clustering coefficient of one node.
pub fn local_clustering(g: &Graph, v: &StudentId) -> Result<f64, MetricsError> {
    let idx = g
        .index_of(v)
        .ok_or_else(|| MetricsError::UnknownNode(v.to_string()))?;
    Ok(local_clustering_idx(g, idx))
}

/// Unweighted mean of local clustering over all nodes.
pub fn average_clustering(g: &Graph) -> Result<f64, MetricsError> {
    average_clustering_with(g, ClusteringConvention::CountAsZero)
}

pub fn average_clustering_with(
    g: &Graph,
    convention: ClusteringConvention,
) -> Result<f64, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    match convention {
        ClusteringConvention::CountAsZero => {
            let sum: f64 = (0..n).map(|v| local_clustering_idx(g, v)).sum();
            Ok(sum / n as f64)
        }
        ClusteringConvention::ExcludeLowDegree => {
            let eligible: Vec<usize> = (0..n).filter(|&v| g.degree(v) >= 2).collect();
            if eligible.is_empty() {
                return Ok(0.0);
            }
            let sum: f64 = eligible.iter().map(|&v| local_clustering_idx(g, v)).sum();
            Ok(sum / eligible.len() as f64)
        }
    }
}

fn vector(kind: CentralityKind, label: GraphLabel, g: &Graph, scores: Vec<f64>) -> CentralityVector {
    CentralityVector {
        kind,
        graph_label: label,
        scores: g
            .nodes()
            .iter()
            .cloned()
            .zip(scores)
            .collect(),
    }
}

/// Degree centrality: `deg(v) / (n-1)`; 0 for a single-node graph.
pub fn degree_centrality(cg: &CoOccurrenceGraph) -> Result<CentralityVector, MetricsError> {
    let g = cg.graph();
    let scores = degree_scores(g)?;
    Ok(vector(CentralityKind::Degree, cg.label, g, scores))
}

pub fn degree_scores(g: &Graph) -> Result<Vec<f64>, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    if n == 1 {
        return Ok(vec![0.0]);
    }
    Ok((0..n).map(|v| g.degree(v) as f64 / (n - 1) as f64).collect())
}

fn bfs_distances(g: &Graph, source: usize, dist: &mut [i64]) {
    dist.fill(-1);
    dist[source] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for w in g.neighbors(u) {
            if dist[w] < 0 {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
}

/// Component-scaled closeness centrality; 0 for nodes with no reachable peers.
pub fn closeness_centrality(cg: &CoOccurrenceGraph) -> Result<CentralityVector, MetricsError> {
    let g = cg.graph();
    let scores = closeness_scores(g)?;
    Ok(vector(CentralityKind::Closeness, cg.label, g, scores))
}

pub fn closeness_scores(g: &Graph) -> Result<Vec<f64>, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    let mut dist = vec![-1i64; n];
    let mut scores = vec![0.0; n];
    for (v, score) in scores.iter_mut().enumerate() {
        bfs_distances(g, v, &mut dist);
        let mut reachable = 0i64;
        let mut total = 0i64;
        for (w, &d) in dist.iter().enumerate() {
            if w != v && d > 0 {
                reachable += 1;
                total += d;
            }
        }
        if reachable > 0 && n > 1 {
            let r = reachable as f64;
            *score = (r / (n - 1) as f64) * (r / total as f64);
        }
    }
    Ok(scores)
}

/// Betweenness centrality over unordered pairs, normalized by
/// `(n-1)(n-2)/2`; all zeros for `n < 3`.
pub fn betweenness_centrality(cg: &CoOccurrenceGraph) -> Result<CentralityVector, MetricsError> {
    let g = cg.graph();
    let scores = betweenness_scores(g)?;
    Ok(vector(CentralityKind::Betweenness, cg.label, g, scores))
}

pub fn betweenness_scores(g: &Graph) -> Result<Vec<f64>, MetricsError> {
    let n = g.node_count();
    if n == 0 {
        return Err(MetricsError::EmptyGraph);
    }
    if n < 3 {
        return Ok(vec![0.0; n]);
    }
    let mut betweenness = vec![0.0f64; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![-1i64; n];
    let mut delta = vec![0.0f64; n];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];

    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(-1);
        delta.fill(0.0);
        for p in pred.iter_mut() {
            p.clear();
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut order: Vec<usize> = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for w in g.neighbors(v) {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    pred[w].push(v);
                }
            }
        }
        while let Some(w) = order.pop() {
            for &v in &pred[w] {
                delta[v] += (sigma[v] / sigma[w]) * (1.0 + delta[w]);
            }
            if w != s {
                betweenness[w] += delta[w];
            }
        }
    }
    // Each unordered pair was accumulated from both endpoints; fold the
    // double count into the pair normalization (n-1)(n-2)/2.
    let norm = 1.0 / ((n - 1) * (n - 2)) as f64;
    for b in betweenness.iter_mut() {
        *b *= norm;
    }
    Ok(betweenness)
}

pub fn centrality(cg: &CoOccurrenceGraph, kind: CentralityKind) -> Result<CentralityVector, MetricsError> {
    match kind {
        CentralityKind::Degree => degree_centrality(cg),
        CentralityKind::Closeness => closeness_centrality(cg),
        CentralityKind::Betweenness => betweenness_centrality(cg),
    }
}

/// Size and clustering summary of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct TopologySummary {
    pub label: GraphLabel,
    pub node_count: usize,
    pub edge_count: usize,
    pub average_degree: f64,
    /// None for the empty graph, where the mean is undefined.
    pub average_clustering: Option<f64>,
}

/// One summary per graph, order preserving.
pub fn topology_series(graphs: &[CoOccurrenceGraph]) -> Vec<TopologySummary> {
    graphs
        .iter()
        .map(|cg| {
            let g = cg.graph();
            let n = g.node_count();
            TopologySummary {
                label: cg.label,
                node_count: n,
                edge_count: g.edge_count(),
                average_degree: if n > 0 {
                    2.0 * g.edge_count() as f64 / n as f64
                } else {
                    0.0
                },
                average_clustering: average_clustering(g).ok(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sid(s: &str) -> StudentId {
        StudentId::from(s)
    }

    fn graph(edges: &[(&str, &str)]) -> Graph {
        Graph::from_edges(edges.iter().map(|(a, b)| (sid(a), sid(b))))
    }

    fn cg(edges: &[(&str, &str)]) -> CoOccurrenceGraph {
        CoOccurrenceGraph::new(GraphLabel::Week(1), 1200, graph(edges))
    }

    fn complete(n: usize) -> Vec<(String, String)> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((format!("n{i:02}"), format!("n{j:02}")));
            }
        }
        edges
    }

    #[test]
    fn triangle_apex_clustering_is_one() {
        let g = graph(&[("a", "b"), ("b", "c"), ("a", "c")]);
        assert_eq!(local_clustering(&g, &sid("a")).unwrap(), 1.0);
    }

    #[test]
    fn path_center_clustering_is_zero() {
        let g = graph(&[("a", "b"), ("b", "c")]);
        assert_eq!(local_clustering(&g, &sid("b")).unwrap(), 0.0);
        assert!(matches!(
            local_clustering(&g, &sid("zz")),
            Err(MetricsError::UnknownNode(_))
        ));
    }

    #[test]
    fn average_clustering_k4_and_star() {
        let k4 = Graph::from_edges(
            complete(4)
                .into_iter()
                .map(|(a, b)| (StudentId::from(a), StudentId::from(b))),
        );
        assert_eq!(average_clustering(&k4).unwrap(), 1.0);
        let star = graph(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]);
        assert_eq!(average_clustering(&star).unwrap(), 0.0);
    }

    #[test]
    fn average_clustering_empty_graph_is_error() {
        let g = graph(&[]);
        assert_eq!(average_clustering(&g), Err(MetricsError::EmptyGraph));
    }

    #[test]
    fn clustering_conventions_differ_on_pendants() {
        // triangle plus a pendant: zero-convention averages over 4 nodes,
        // exclusion convention over the 3 triangle nodes
        let g = graph(&[("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")]);
        let with_zero = average_clustering_with(&g, ClusteringConvention::CountAsZero).unwrap();
        let excl = average_clustering_with(&g, ClusteringConvention::ExcludeLowDegree).unwrap();
        assert!(with_zero < excl);
        let c_of_c = 2.0 * 1.0 / (3.0 * 2.0);
        let expected_zero = (1.0 + 1.0 + c_of_c + 0.0) / 4.0;
        assert!((with_zero - expected_zero).abs() < 1e-12);
    }

    #[test]
    fn degree_centrality_star() {
        let v = degree_centrality(&cg(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]))
            .unwrap();
        assert_eq!(v.get(&sid("c")), Some(1.0));
        assert_eq!(v.get(&sid("l1")), Some(0.25));
    }

    #[test]
    fn degree_centrality_regular_graph_equal() {
        // 4-cycle: all degree 2
        let v = degree_centrality(&cg(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])).unwrap();
        let vals: Vec<f64> = v.scores.values().copied().collect();
        assert!(vals.iter().all(|&x| (x - vals[0]).abs() < 1e-15));
    }

    #[test]
    fn closeness_path_p3() {
        let v = closeness_centrality(&cg(&[("a", "b"), ("b", "c")])).unwrap();
        assert!((v.get(&sid("b")).unwrap() - 1.0).abs() < 1e-12);
        assert!((v.get(&sid("a")).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((v.get(&sid("c")).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closeness_complete_graph_all_one() {
        let g = CoOccurrenceGraph::new(
            GraphLabel::Week(1),
            1200,
            Graph::from_edges(
                complete(5)
                    .into_iter()
                    .map(|(a, b)| (StudentId::from(a), StudentId::from(b))),
            ),
        );
        let v = closeness_centrality(&g).unwrap();
        assert!(v.scores.values().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn closeness_two_disjoint_pairs() {
        // two disjoint K2 components on n=4: each node (1/3)*(1/1) = 1/3
        let v = closeness_centrality(&cg(&[("a", "b"), ("c", "d")])).unwrap();
        for s in ["a", "b", "c", "d"] {
            assert!((v.get(&sid(s)).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn betweenness_path_p3() {
        let v = betweenness_centrality(&cg(&[("a", "b"), ("b", "c")])).unwrap();
        assert!((v.get(&sid("b")).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v.get(&sid("a")), Some(0.0));
        assert_eq!(v.get(&sid("c")), Some(0.0));
    }

    #[test]
    fn betweenness_complete_graph_all_zero() {
        let g = CoOccurrenceGraph::new(
            GraphLabel::Week(1),
            1200,
            Graph::from_edges(
                complete(5)
                    .into_iter()
                    .map(|(a, b)| (StudentId::from(a), StudentId::from(b))),
            ),
        );
        let v = betweenness_centrality(&g).unwrap();
        assert!(v.scores.values().all(|&x| x.abs() < 1e-15));
    }

    #[test]
    fn vertex_transitive_cycle_equal_under_all_measures() {
        let c6 = cg(&[
            ("a", "b"),
            ("b", "c"),
            ("c", "d"),
            ("d", "e"),
            ("e", "f"),
            ("f", "a"),
        ]);
        for kind in CentralityKind::ALL {
            let v = centrality(&c6, kind).unwrap();
            let vals: Vec<f64> = v.scores.values().copied().collect();
            assert!(
                vals.iter().all(|&x| (x - vals[0]).abs() < 1e-12),
                "{kind} not constant on C6: {vals:?}"
            );
        }
    }

    #[test]
    fn topology_series_triangle_and_empty() {
        let tri = cg(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let empty = cg(&[]);
        let series = topology_series(&[tri, empty]);
        assert_eq!(series[0].node_count, 3);
        assert_eq!(series[0].edge_count, 3);
        assert!((series[0].average_degree - 2.0).abs() < 1e-15);
        assert_eq!(series[0].average_clustering, Some(1.0));
        assert_eq!(series[1].node_count, 0);
        assert_eq!(series[1].average_degree, 0.0);
        assert_eq!(series[1].average_clustering, None);
    }
}
