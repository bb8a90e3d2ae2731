//! Undirected simple graphs and labeled graph collections.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
///
/// Edges are stored normalized as `(u, v)` with `u < v`, sorted and
/// deduplicated; adjacency lists are derived from them and kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at node {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) out of range for n={n}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({},{})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted_unique(n, normalized))
    }

    /// Same as [`Graph::from_edges`] but silently drops duplicates.
    pub(crate) fn from_edges_dedup(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            debug_assert!(e.0 != e.1 && e.0 < n && e.1 < n);
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        edges.dedup();
        Self::from_sorted_unique(n, edges)
    }

    fn from_sorted_unique(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in adjacency.iter_mut() {
            list.sort_unstable();
        }
        Graph { n, edges, adjacency }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Relabels node `v` as `mapping[v]`; `mapping` must be a bijection.
    pub fn relabel(&self, mapping: &[usize]) -> Graph {
        assert_eq!(mapping.len(), self.n);
        let edges = self.edges.iter().map(|&(u, v)| (mapping[u], mapping[v])).collect();
        Graph::from_edges_dedup(self.n, edges)
    }

    /// Disjoint union, nodes of `other` shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Graph::from_sorted_unique(self.n + other.n, edges)
    }

    /// Connected components, each sorted, ordered by smallest node id.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut stack = vec![start];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.components().len() == 1
    }

    /// Checks every structural invariant. Always true for graphs built
    /// through the public constructors.
    pub fn validate(&self) -> Result<()> {
        let mut degree_sum = 0;
        for (v, list) in self.adjacency.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidGraph(format!("adjacency of {v} not strictly sorted")));
            }
            if list.contains(&v) {
                return Err(Error::InvalidGraph(format!("self-loop at node {v}")));
            }
            degree_sum += list.len();
        }
        if degree_sum != 2 * self.edges.len() {
            return Err(Error::InvalidGraph("degree sum != 2|E|".into()));
        }
        for &(u, v) in &self.edges {
            if u >= v || !self.has_edge(u, v) || !self.has_edge(v, u) {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) inconsistent")));
            }
        }
        Ok(())
    }
}

/// Where a graph set came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(generator: &str, seed: Option<u64>) -> Self {
        Provenance {
            generator: generator.to_string(),
            params: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

/// Non-empty labeled collection of graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSet {
    pub graphs: Vec<Graph>,
    pub label: i64,
    pub provenance: Provenance,
}

impl GraphSet {
    pub fn new(graphs: Vec<Graph>, label: i64, provenance: Provenance) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::param("graph set must not be empty"));
        }
        Ok(GraphSet {
            graphs,
            label,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn with_label(mut self, label: i64) -> Self {
        self.label = label;
        self
    }

    pub fn max_node_count(&self) -> usize {
        self.graphs.iter().map(Graph::node_count).max().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.graphs.iter().map(Graph::max_degree).max().unwrap_or(0)
    }
}
