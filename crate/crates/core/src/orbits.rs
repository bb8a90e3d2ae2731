//! Exact graphlet orbit counts for connected graphlets on 2 to 4 nodes.
//!
//! Orbit numbering (15 orbits):
//!
//! | graphlet        | orbits                                   |
//! |-----------------|------------------------------------------|
//! | edge            | 0                                        |
//! | path P3         | 1 end, 2 middle                          |
//! | triangle        | 3                                        |
//! | path P4         | 4 end, 5 inner                           |
//! | star K1,3       | 6 leaf, 7 center                         |
//! | cycle C4        | 8                                        |
//! | paw             | 9 pendant, 10 degree-2, 11 degree-3      |
//! | diamond         | 12 degree-2, 13 degree-3                 |
//! | K4              | 14                                       |
//!
//! Connected induced subgraphs are enumerated once each with the ESU
//! algorithm (Wernicke 2006).

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const ORBIT_COUNT: usize = 15;
pub const DEFAULT_MAX_NODES: usize = 500;

/// Orbits of the 4-node graphlets only.
pub const FOUR_NODE_ORBITS: [usize; 11] = [4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14];

pub type OrbitCounts = Vec<[u64; ORBIT_COUNT]>;

/// Per-node orbit counts. Refuses graphs with more than `max_nodes` nodes.
pub fn orbit4_counts(g: &Graph, max_nodes: usize) -> Result<OrbitCounts> {
    let n = g.node_count();
    if n > max_nodes {
        return Err(Error::param(format!(
            "orbit counting is exact and capped at {max_nodes} nodes, graph has {n}"
        )));
    }
    let mut counts = vec![[0u64; ORBIT_COUNT]; n];
    let mut sub = Vec::with_capacity(4);
    for v in 0..n {
        sub.clear();
        sub.push(v);
        let ext: Vec<usize> = g.neighbors(v).iter().copied().filter(|&u| u > v).collect();
        extend(g, &mut sub, ext, v, &mut counts);
    }
    Ok(counts)
}

fn extend(g: &Graph, sub: &mut Vec<usize>, mut ext: Vec<usize>, root: usize, counts: &mut OrbitCounts) {
    if sub.len() >= 2 {
        classify(g, sub, counts);
    }
    if sub.len() == 4 {
        return;
    }
    while let Some(w) = ext.pop() {
        // Exclusive neighbors of w: not in sub, not adjacent to sub.
        let mut next = ext.clone();
        for &u in g.neighbors(w) {
            if u > root && !sub.contains(&u) && !next.contains(&u) && u != w && sub.iter().all(|&s| !g.has_edge(s, u)) {
                next.push(u);
            }
        }
        sub.push(w);
        extend(g, sub, next, root, counts);
        sub.pop();
    }
}

fn classify(g: &Graph, sub: &[usize], counts: &mut OrbitCounts) {
    let k = sub.len();
    let mut deg = [0usize; 4];
    let mut edges = 0;
    for i in 0..k {
        for j in i + 1..k {
            if g.has_edge(sub[i], sub[j]) {
                deg[i] += 1;
                deg[j] += 1;
                edges += 1;
            }
        }
    }
    for i in 0..k {
        let orbit = match (k, edges, deg[i]) {
            (2, _, _) => 0,
            (3, 2, 1) => 1,
            (3, 2, _) => 2,
            (3, _, _) => 3,
            (4, 3, d) => {
                let is_star = deg[..4].contains(&3);
                match (is_star, d) {
                    (false, 1) => 4,
                    (false, _) => 5,
                    (true, 1) => 6,
                    (true, _) => 7,
                }
            }
            (4, 4, d) => {
                if deg[..4].iter().all(|&x| x == 2) {
                    8
                } else {
                    match d {
                        1 => 9,
                        2 => 10,
                        _ => 11,
                    }
                }
            }
            (4, 5, 2) => 12,
            (4, 5, _) => 13,
            (4, 6, _) => 14,
            _ => unreachable!("disconnected subgraph enumerated"),
        };
        counts[sub[i]][orbit] += 1;
    }
}

/// Mean orbit-count vector of a graph (one entry per orbit).
pub fn mean_orbit_vector(g: &Graph, max_nodes: usize) -> Result<Vec<f64>> {
    let counts = orbit4_counts(g, max_nodes)?;
    let n = counts.len().max(1) as f64;
    let mut mean = vec![0.0; ORBIT_COUNT];
    for row in &counts {
        for (m, &c) in mean.iter_mut().zip(row) {
            *m += c as f64;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn triangle_counts() {
        let k3 = Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap();
        let c = orbit4_counts(&k3, 500).unwrap();
        for row in c {
            assert_eq!(row[0], 2);
            assert_eq!(row[3], 1);
            assert_eq!(row[1] + row[2], 0);
            assert!(row[4..].iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn path4_counts() {
        let p4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let c = orbit4_counts(&p4, 500).unwrap();
        // ends: one edge, one P3 end, one P4 end
        assert_eq!(c[0][0], 1);
        assert_eq!(c[0][1], 1);
        assert_eq!(c[0][4], 1);
        // inner: two edges, P3 middle once, P3 end once, P4 inner once
        assert_eq!(c[1][0], 2);
        assert_eq!(c[1][2], 1);
        assert_eq!(c[1][1], 1);
        assert_eq!(c[1][5], 1);
    }

    #[test]
    fn empty_and_cap() {
        let c = orbit4_counts(&Graph::empty(5), 500).unwrap();
        assert!(c.iter().all(|r| r.iter().all(|&x| x == 0)));
        assert!(orbit4_counts(&Graph::empty(10), 9).is_err());
    }

    #[test]
    fn k4_and_star() {
        let mut e = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                e.push((u, v));
            }
        }
        let k4 = Graph::from_edges(4, &e).unwrap();
        let c = orbit4_counts(&k4, 500).unwrap();
        assert!(c.iter().all(|r| r[14] == 1 && r[3] == 3 && r[0] == 3));
        let star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = orbit4_counts(&star, 500).unwrap();
        assert_eq!(c[0][7], 1);
        assert_eq!(c[1][6], 1);
        assert_eq!(c[0][2], 3);
    }

    #[test]
    fn relabeling_invariant() {
        let mut rng = Rng::new(5);
        let g = crate::generators::erdos_renyi(15, 0.3, &mut rng);
        let mut perm: Vec<usize> = (0..15).collect();
        rng.shuffle(&mut perm);
        let a = orbit4_counts(&g, 500).unwrap();
        let b = orbit4_counts(&g.relabel(&perm), 500).unwrap();
        for v in 0..15 {
            assert_eq!(a[v], b[perm[v]]);
        }
    }
}
