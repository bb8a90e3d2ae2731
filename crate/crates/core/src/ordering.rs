//! Node-ordering policies, adjacency sequences and bandwidth.
//!
//! Traversals visit neighbors in ascending node id. Disconnected graphs are
//! handled component by component, components taken in order of their
//! smallest node id.

use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingPolicy {
    /// Identity.
    Default,
    DegreeDescent,
    /// BFS rooted at the largest-degree node.
    BfsDeg,
    /// DFS rooted at the largest-degree node.
    DfsDeg,
    Kcore,
    /// BFS rooted at a uniformly chosen node.
    BfsRandom,
    DfsRandom,
    /// Uniform random permutation.
    Uniform,
}

impl OrderingPolicy {
    pub const ALL: [OrderingPolicy; 8] = [
        OrderingPolicy::Default,
        OrderingPolicy::DegreeDescent,
        OrderingPolicy::BfsDeg,
        OrderingPolicy::DfsDeg,
        OrderingPolicy::Kcore,
        OrderingPolicy::BfsRandom,
        OrderingPolicy::DfsRandom,
        OrderingPolicy::Uniform,
    ];

    pub fn is_bfs(self) -> bool {
        matches!(self, OrderingPolicy::BfsDeg | OrderingPolicy::BfsRandom)
    }
}

/// `permutation[pos]` is the original id of the node placed at `pos`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeOrdering {
    pub permutation: Vec<usize>,
    pub policy: OrderingPolicy,
}

impl NodeOrdering {
    pub fn new(permutation: Vec<usize>, policy: OrderingPolicy) -> Result<Self> {
        let n = permutation.len();
        let mut seen = vec![false; n];
        for &v in &permutation {
            if v >= n || seen[v] {
                return Err(Error::param(format!("not a permutation of 0..{n}")));
            }
            seen[v] = true;
        }
        Ok(NodeOrdering { permutation, policy })
    }

    /// `positions()[v]` is the position of original node `v`.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.permutation.len()];
        for (p, &v) in self.permutation.iter().enumerate() {
            pos[v] = p;
        }
        pos
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }
}

/// Highest degree, ties to the lowest id.
fn max_degree_node(g: &Graph, nodes: &[usize]) -> usize {
    *nodes
        .iter()
        .max_by_key(|&&v| (g.degree(v), std::cmp::Reverse(v)))
        .expect("non-empty node list")
}

fn bfs_from(g: &Graph, root: usize, allowed: &dyn Fn(usize) -> bool, seen: &mut [bool], out: &mut Vec<usize>) {
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        out.push(v);
        for &u in g.neighbors(v) {
            if !seen[u] && allowed(u) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
}

/// Preorder DFS equivalent to the recursive traversal with ascending
/// neighbor order.
fn dfs_from(g: &Graph, root: usize, seen: &mut [bool], out: &mut Vec<usize>) {
    let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
    seen[root] = true;
    out.push(root);
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        let nbrs = g.neighbors(v);
        if let Some(offset) = nbrs[next..].iter().position(|&u| !seen[u]) {
            let u = nbrs[next + offset];
            top.1 = next + offset + 1;
            seen[u] = true;
            out.push(u);
            stack.push((u, 0));
        } else {
            stack.pop();
        }
    }
}

/// Computes the ordering given by `policy`. `rng` is consumed only by the
/// random policies.
pub fn order(g: &Graph, policy: OrderingPolicy, rng: &mut Rng) -> NodeOrdering {
    let n = g.node_count();
    let permutation = match policy {
        OrderingPolicy::Default => (0..n).collect(),
        OrderingPolicy::Uniform => {
            let mut p: Vec<usize> = (0..n).collect();
            rng.shuffle(&mut p);
            p
        }
        OrderingPolicy::DegreeDescent => {
            let mut p: Vec<usize> = (0..n).collect();
            p.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
            p
        }
        OrderingPolicy::BfsDeg | OrderingPolicy::DfsDeg | OrderingPolicy::BfsRandom | OrderingPolicy::DfsRandom => {
            let mut seen = vec![false; n];
            let mut out = Vec::with_capacity(n);
            for comp in g.components() {
                let root = match policy {
                    OrderingPolicy::BfsDeg | OrderingPolicy::DfsDeg => max_degree_node(g, &comp),
                    _ => comp[rng.below(comp.len())],
                };
                if policy == OrderingPolicy::BfsDeg || policy == OrderingPolicy::BfsRandom {
                    bfs_from(g, root, &|_| true, &mut seen, &mut out);
                } else {
                    dfs_from(g, root, &mut seen, &mut out);
                }
            }
            out
        }
        OrderingPolicy::Kcore => kcore_order(g),
    };
    NodeOrdering { permutation, policy }
}

/// Core numbers descending; inside one core value, BFS restricted to the
/// nodes of that core value, restarted from the highest-degree unvisited one.
fn kcore_order(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let core = core_numbers(g);
    let mut values: Vec<usize> = core.clone();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    let mut seen = vec![false; n];
    let mut out = Vec::with_capacity(n);
    for c in values {
        let shell: Vec<usize> = (0..n).filter(|&v| core[v] == c).collect();
        loop {
            let rest: Vec<usize> = shell.iter().copied().filter(|&v| !seen[v]).collect();
            if rest.is_empty() {
                break;
            }
            let root = max_degree_node(g, &rest);
            bfs_from(g, root, &|u| core[u] == c, &mut seen, &mut out);
        }
    }
    out
}

/// Core number of every node (Batagelj–Zaversnik bucket peeling).
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut degree = g.degrees();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut vert = vec![0usize; n];
    let mut pos = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        vert[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    if max_deg > 0 || n > 0 {
        bin[0] = 0;
    }
    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

/// Largest position gap over edges.
pub fn bandwidth(g: &Graph, pi: &NodeOrdering) -> usize {
    let pos = pi.positions();
    g.edges()
        .iter()
        .map(|&(u, v)| pos[u].abs_diff(pos[v]))
        .max()
        .unwrap_or(0)
}

/// Row `i` holds the connections of the node at position `i` to the nodes at
/// positions `max(0, i - m) .. i`, in ascending position order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdjacencySequence {
    pub rows: Vec<Vec<u8>>,
    pub truncation_m: Option<usize>,
    /// Edge count of the encoded graph, used to detect truncation loss.
    pub edge_count: usize,
}

pub fn encode_sequence(g: &Graph, pi: &NodeOrdering, truncation_m: Option<usize>) -> AdjacencySequence {
    let n = g.node_count();
    let pos = pi.positions();
    let mut rows: Vec<Vec<u8>> = (0..n)
        .map(|i| {
            let len = truncation_m.map_or(i, |m| i.min(m));
            vec![0u8; len]
        })
        .collect();
    for &(u, v) in g.edges() {
        let (hi, lo) = if pos[u] > pos[v] {
            (pos[u], pos[v])
        } else {
            (pos[v], pos[u])
        };
        let len = rows[hi].len();
        let first = hi - len;
        if lo >= first {
            rows[hi][lo - first] = 1;
        }
    }
    AdjacencySequence {
        rows,
        truncation_m,
        edge_count: g.edge_count(),
    }
}

/// Rebuilds the graph in position space (node `i` is the node at position `i`).
pub fn decode_sequence(seq: &AdjacencySequence) -> Result<Graph> {
    let n = seq.rows.len();
    let mut edges = Vec::new();
    for (i, row) in seq.rows.iter().enumerate() {
        if row.len() > i {
            return Err(Error::param(format!("row {i} longer than its position")));
        }
        let first = i - row.len();
        for (j, &bit) in row.iter().enumerate() {
            if bit != 0 {
                edges.push((first + j, i));
            }
        }
    }
    if edges.len() != seq.edge_count {
        return Err(Error::InvalidGraph(format!(
            "truncated sequence lost {} of {} edges",
            seq.edge_count - edges.len().min(seq.edge_count),
            seq.edge_count
        )));
    }
    Graph::from_edges(n, &edges)
}

/// The permuted graph: node `v` relabeled to its position.
pub fn permuted_graph(g: &Graph, pi: &NodeOrdering) -> Graph {
    g.relabel(&pi.positions())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::grid_graph;

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn bfs_deg_on_path() {
        let o = order(&path(4), OrderingPolicy::BfsDeg, &mut Rng::new(0));
        assert_eq!(o.permutation, vec![1, 0, 2, 3]);
    }

    #[test]
    fn dfs_deg_goes_deep() {
        // 0-1, 0-2, 1-3: root 0 (deg 2), DFS 0,1,3,2.
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let o = order(&g, OrderingPolicy::DfsDeg, &mut Rng::new(0));
        assert_eq!(o.permutation, vec![0, 1, 3, 2]);
        let o = order(&g, OrderingPolicy::BfsDeg, &mut Rng::new(0));
        assert_eq!(o.permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn default_is_identity() {
        let o = order(&star(4), OrderingPolicy::Default, &mut Rng::new(0));
        assert_eq!(o.permutation, (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn degree_descent_ties_low_id() {
        let g = Graph::from_edges(4, &[(0, 3), (1, 3), (2, 3), (1, 2)]).unwrap();
        let o = order(&g, OrderingPolicy::DegreeDescent, &mut Rng::new(0));
        assert_eq!(o.permutation, vec![3, 1, 2, 0]);
    }

    #[test]
    fn kcore_on_uniform_core_is_bfs() {
        let g = cycle(5);
        let k = order(&g, OrderingPolicy::Kcore, &mut Rng::new(0));
        let b = order(&g, OrderingPolicy::BfsDeg, &mut Rng::new(0));
        assert_eq!(k.permutation, b.permutation);
    }

    #[test]
    fn kcore_puts_dense_core_first() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let o = order(&g, OrderingPolicy::Kcore, &mut Rng::new(0));
        assert_eq!(o.permutation, vec![3, 0, 1, 2, 4]);
    }

    #[test]
    fn core_numbers_examples() {
        assert_eq!(core_numbers(&cycle(5)), vec![2; 5]);
        assert_eq!(core_numbers(&star(4)), vec![1; 5]);
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        assert_eq!(core_numbers(&g), vec![3, 3, 3, 3, 1]);
        assert_eq!(core_numbers(&Graph::empty(3)), vec![0; 3]);
    }

    #[test]
    fn disconnected_restarts_per_component() {
        let g = Graph::from_edges(5, &[(3, 4), (0, 2)]).unwrap();
        let o = order(&g, OrderingPolicy::BfsDeg, &mut Rng::new(0));
        assert_eq!(o.permutation, vec![0, 2, 1, 3, 4]);
    }

    #[test]
    fn bandwidth_examples() {
        let p = path(6);
        let id = order(&p, OrderingPolicy::Default, &mut Rng::new(0));
        assert_eq!(bandwidth(&p, &id), 1);
        let c = cycle(6);
        assert_eq!(bandwidth(&c, &id), 5);
        let grid = grid_graph(10, 10);
        let o = order(&grid, OrderingPolicy::BfsDeg, &mut Rng::new(0));
        let bw = bandwidth(&grid, &o);
        assert!(bw <= 20, "{bw}");
    }

    #[test]
    fn triangle_sequence() {
        let k3 = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let id = order(&k3, OrderingPolicy::Default, &mut Rng::new(0));
        let seq = encode_sequence(&k3, &id, None);
        assert_eq!(seq.rows, vec![vec![], vec![1], vec![1, 1]]);
        assert_eq!(decode_sequence(&seq).unwrap(), k3);
    }

    #[test]
    fn truncation_at_bandwidth() {
        let grid = grid_graph(4, 4);
        let o = order(&grid, OrderingPolicy::BfsDeg, &mut Rng::new(0));
        let bw = bandwidth(&grid, &o);
        let seq = encode_sequence(&grid, &o, Some(bw));
        assert_eq!(decode_sequence(&seq).unwrap(), permuted_graph(&grid, &o));
        let lossy = encode_sequence(&grid, &o, Some(bw - 1));
        assert!(decode_sequence(&lossy).is_err());
    }

    #[test]
    fn rejects_non_permutation() {
        assert!(NodeOrdering::new(vec![0, 0, 1], OrderingPolicy::Default).is_err());
        assert!(NodeOrdering::new(vec![2, 0, 1], OrderingPolicy::Default).is_ok());
    }
}
