//! Simple undirected graph over student ids.
//!
//! Nodes are stored sorted by id, so node indices, edge iteration order and
//! every derived output are deterministic for a given node/edge set. The edge
//! list is kept alongside the adjacency sets because the null model samples
//! edges uniformly by index and rewires them in place.

use std::collections::BTreeSet;

use crate::ids::StudentId;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {0} is not in the graph")]
    UnknownNode(String),
    #[error("self-loop on {0} rejected")]
    SelfLoop(String),
    #[error("duplicate edge ({0}, {1}) rejected")]
    DuplicateEdge(String, String),
}

/// Undirected simple graph; no self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: Vec<StudentId>,
    adj: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Build a graph from an edge list. Node set is exactly the set of edge
    /// endpoints (isolated vertices cannot exist), sorted by id.
    pub fn from_edges<I>(edges: I) -> Self
    where
        I: IntoIterator<Item = (StudentId, StudentId)>,
    {
        let pairs: Vec<(StudentId, StudentId)> = edges.into_iter().collect();
        let mut nodes: BTreeSet<StudentId> = BTreeSet::new();
        for (u, v) in &pairs {
            nodes.insert(u.clone());
            nodes.insert(v.clone());
        }
        let nodes: Vec<StudentId> = nodes.into_iter().collect();
        let index = |id: &StudentId| nodes.binary_search(id).expect("endpoint indexed");

        let mut adj = vec![BTreeSet::new(); nodes.len()];
        let mut edge_set: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (u, v) in &pairs {
            let (a, b) = (index(u), index(v));
            assert_ne!(a, b, "self-loop in edge list");
            let key = (a.min(b), a.max(b));
            if edge_set.insert(key) {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        let edges: Vec<(usize, usize)> = edge_set.into_iter().collect();
        Graph { nodes, adj, edges }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[StudentId] {
        &self.nodes
    }

    pub fn node(&self, idx: usize) -> &StudentId {
        &self.nodes[idx]
    }

    pub fn index_of(&self, id: &StudentId) -> Option<usize> {
        self.nodes.binary_search(id).ok()
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adj[idx].len()
    }

    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[idx].iter().copied()
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Edges as index pairs (u < v). Order is deterministic after
    /// construction; in-place rewiring keeps positions stable.
    pub fn edge_at(&self, idx: usize) -> (usize, usize) {
        self.edges[idx]
    }

    /// Edges as id pairs, sorted lexicographically.
    pub fn edge_ids(&self) -> Vec<(&StudentId, &StudentId)> {
        let mut out: Vec<(&StudentId, &StudentId)> = self
            .edges
            .iter()
            .map(|&(a, b)| (&self.nodes[a], &self.nodes[b]))
            .collect();
        out.sort();
        out
    }

    /// Replace the edge stored at `idx` with `new` (u, v as node indices).
    /// Degree bookkeeping is updated; the new edge must not already exist.
    pub fn replace_edge(&mut self, idx: usize, new: (usize, usize)) -> Result<(), GraphError> {
        let (a, b) = (new.0.min(new.1), new.0.max(new.1));
        if a == b {
            return Err(GraphError::SelfLoop(self.nodes[a].to_string()));
        }
        if self.adj[a].contains(&b) {
            return Err(GraphError::DuplicateEdge(
                self.nodes[a].to_string(),
                self.nodes[b].to_string(),
            ));
        }
        let (oa, ob) = self.edges[idx];
        self.adj[oa].remove(&ob);
        self.adj[ob].remove(&oa);
        self.adj[a].insert(b);
        self.adj[b].insert(a);
        self.edges[idx] = (a, b);
        Ok(())
    }

    /// Degrees indexed by node position.
    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(|s| s.len()).collect()
    }

    /// Degree multiset, sorted ascending.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }

    /// True if the graph has no self-loops, no parallel edges, and the
    /// adjacency sets agree with the edge list. Used by tests and the null
    /// model invariant checks.
    pub fn is_simple_consistent(&self) -> bool {
        let mut seen = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= b || !seen.insert((a, b)) {
                return false;
            }
            if !self.adj[a].contains(&b) || !self.adj[b].contains(&a) {
                return false;
            }
        }
        self.adj.iter().map(|s| s.len()).sum::<usize>() == 2 * self.edges.len()
    }
}
