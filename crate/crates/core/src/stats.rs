//! Per-graph statistics fed to the kernel metrics.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::graph::Graph;
use crate::linalg::{symmetric_eigenvalues, Matrix};

pub const CLUSTERING_BINS: usize = 100;
pub const SPECTRUM_BINS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// `counts.len() + 1` ascending edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<f64>,
    pub normalized: bool,
}

impl Histogram {
    /// Equal-width histogram over `[lo, hi]`; the last bin is closed and
    /// values outside the range are clamped into the end bins.
    pub fn uniform(values: &[f64], bins: usize, lo: f64, hi: f64) -> Histogram {
        assert!(bins >= 1 && hi > lo);
        let width = (hi - lo) / bins as f64;
        let mut counts = vec![0.0; bins];
        for &x in values {
            let idx = ((x - lo) / width).floor();
            let idx = if idx < 0.0 { 0 } else { (idx as usize).min(bins - 1) };
            counts[idx] += 1.0;
        }
        let bin_edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        Histogram {
            bin_edges,
            counts,
            normalized: false,
        }
    }

    /// Scales counts to unit mass; an all-zero histogram stays all-zero.
    pub fn normalize(mut self) -> Histogram {
        let total: f64 = self.counts.iter().sum();
        if total > 0.0 {
            for c in self.counts.iter_mut() {
                *c /= total;
            }
        }
        self.normalized = true;
        self
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }
}

/// Normalized counts of node degrees `0..max_bins`. Degrees at or above
/// `max_bins` fall into the last bin; callers size `max_bins` past the
/// largest degree of both compared sets.
pub fn degree_histogram(g: &Graph, max_bins: usize) -> Histogram {
    let max_bins = max_bins.max(1);
    let mut counts = vec![0.0; max_bins];
    for v in 0..g.node_count() {
        counts[g.degree(v).min(max_bins - 1)] += 1.0;
    }
    Histogram {
        bin_edges: (0..=max_bins).map(|d| d as f64).collect(),
        counts,
        normalized: false,
    }
    .normalize()
}

/// Triangles through each node.
pub fn triangles_per_node(g: &Graph) -> Vec<usize> {
    let mut tri = vec![0; g.node_count()];
    for &(u, v) in g.edges() {
        // Sorted-list intersection; each triangle hits each of its edges once.
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = a[i];
                    if w > v {
                        tri[u] += 1;
                        tri[v] += 1;
                        tri[w] += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    tri
}

/// Local clustering `2 t(v) / (d (d - 1))`, zero below degree 2.
pub fn clustering_coefficients(g: &Graph) -> Vec<f64> {
    let tri = triangles_per_node(g);
    (0..g.node_count())
        .map(|v| {
            let d = g.degree(v);
            if d < 2 {
                0.0
            } else {
                2.0 * tri[v] as f64 / (d * (d - 1)) as f64
            }
        })
        .collect()
}

pub fn clustering_histogram(g: &Graph, bins: usize) -> Histogram {
    Histogram::uniform(&clustering_coefficients(g), bins, 0.0, 1.0).normalize()
}

/// Symmetric normalized Laplacian `I - D^{-1/2} A D^{-1/2}`; isolated nodes
/// get an all-zero row.
pub fn normalized_laplacian(g: &Graph) -> Matrix {
    let n = g.node_count();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|v| {
            let d = g.degree(v);
            if d == 0 {
                0.0
            } else {
                1.0 / (d as f64).sqrt()
            }
        })
        .collect();
    let mut l = Matrix::zeros(n, n);
    for v in 0..n {
        if g.degree(v) > 0 {
            l[(v, v)] = 1.0;
        }
    }
    for &(u, v) in g.edges() {
        let w = -inv_sqrt[u] * inv_sqrt[v];
        l[(u, v)] = w;
        l[(v, u)] = w;
    }
    l
}

pub fn laplacian_spectrum(g: &Graph) -> Result<Vec<f64>> {
    symmetric_eigenvalues(&normalized_laplacian(g))
}

pub fn laplacian_spectrum_histogram(g: &Graph, bins: usize) -> Result<Histogram> {
    let spectrum = laplacian_spectrum(g)?;
    Ok(Histogram::uniform(&spectrum, bins, 0.0, 2.0).normalize())
}

/// Per-set statistics with the degree bins aligned to `max_bins`.
pub fn degree_histograms(graphs: &[Graph], max_bins: usize) -> Vec<Histogram> {
    graphs.par_iter().map(|g| degree_histogram(g, max_bins)).collect()
}

pub fn clustering_histograms(graphs: &[Graph], bins: usize) -> Vec<Histogram> {
    graphs.par_iter().map(|g| clustering_histogram(g, bins)).collect()
}

pub fn spectrum_histograms(graphs: &[Graph], bins: usize) -> Result<Vec<Histogram>> {
    graphs
        .par_iter()
        .map(|g| laplacian_spectrum_histogram(g, bins))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_ba, grid_graph};
    use crate::rng::Rng;

    fn k(n: usize) -> Graph {
        let mut e = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                e.push((u, v));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn star4() -> Graph {
        Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap()
    }

    #[test]
    fn degree_histograms_examples() {
        let c4 = grid_graph(2, 2);
        let h = degree_histogram(&c4, 5);
        assert_eq!(h.counts, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
        let h = degree_histogram(&star4(), 5);
        assert_eq!(h.counts, vec![0.0, 0.8, 0.0, 0.0, 0.2]);

        let ba = generate_ba(1, 100, 100, 4, &mut Rng::new(1)).unwrap();
        let g = &ba.graphs[0];
        let h = degree_histogram(g, g.max_degree() + 1);
        assert!(h.counts[4] > 0.0);
        assert!(h.counts[11..].iter().sum::<f64>() > 0.0);
    }

    #[test]
    fn clustering_examples() {
        let h = clustering_histogram(&k(3), 100);
        assert_eq!(h.counts[99], 1.0);
        let h = clustering_histogram(&star4(), 100);
        assert_eq!(h.counts[0], 1.0);
        let diamond = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        let c = clustering_coefficients(&diamond);
        let third = 1.0 / 3.0;
        let expect = [2.0 * 2.0 / 6.0, 1.0, 2.0 * 2.0 / 6.0, 1.0];
        for (a, b) in c.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((c[0] - third * 2.0).abs() < 1e-15);
    }

    #[test]
    fn triangles_match_brute_force() {
        let mut rng = Rng::new(3);
        for _ in 0..20 {
            let g = crate::generators::erdos_renyi(12, 0.4, &mut rng);
            let tri = triangles_per_node(&g);
            for (v, &t) in tri.iter().enumerate() {
                let mut count = 0;
                for a in 0..12 {
                    for b in a + 1..12 {
                        if a != v && b != v && g.has_edge(v, a) && g.has_edge(v, b) && g.has_edge(a, b) {
                            count += 1;
                        }
                    }
                }
                assert_eq!(t, count);
            }
        }
    }

    #[test]
    fn spectra_examples() {
        let s = laplacian_spectrum(&k(4)).unwrap();
        let expect = [0.0, 4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0];
        for (a, b) in s.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{s:?}");
        }
        let two_edges = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let s = laplacian_spectrum(&two_edges).unwrap();
        for (a, b) in s.iter().zip([0.0, 0.0, 2.0, 2.0]) {
            assert!((a - b).abs() < 1e-12, "{s:?}");
        }
        let isolated = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let s = laplacian_spectrum(&isolated).unwrap();
        assert!((s.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn histogram_edges_and_clamping() {
        let h = Histogram::uniform(&[-1e-12, 2.0, 1.0], 4, 0.0, 2.0);
        assert_eq!(h.counts, vec![1.0, 0.0, 1.0, 1.0]);
        assert_eq!(h.bin_edges.len(), 5);
        let empty = Histogram::uniform(&[], 3, 0.0, 1.0).normalize();
        assert_eq!(empty.counts, vec![0.0; 3]);
    }
}
