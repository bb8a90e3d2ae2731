//! Synthetic graph families and the edge-rewiring perturbation.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSet, Provenance};
use crate::rng::Rng;

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(Error::param("count must be positive"));
    }
    Ok(())
}

/// Barabási–Albert preferential attachment.
///
/// Urn construction: the first `k` nodes start isolated and node `k` links to
/// all of them. Every later node draws `k` distinct targets from the urn of
/// repeated node ids (each node appears once per incident edge), so the
/// attachment probability is proportional to degree. Each graph has
/// `k * (n - k)` edges.
pub fn generate_ba(count: usize, n_min: usize, n_max: usize, k: usize, rng: &mut Rng) -> Result<GraphSet> {
    check_count(count)?;
    if !(2 <= k && k < n_min && n_min <= n_max) {
        return Err(Error::param(format!(
            "BA needs 2 <= k < n_min <= n_max (k={k}, n_min={n_min}, n_max={n_max})"
        )));
    }
    let graphs = (0..count)
        .map(|_| {
            let n = rng.range_inclusive(n_min, n_max);
            barabasi_albert(n, k, rng)
        })
        .collect();
    let prov = Provenance::new("ba", None)
        .with("count", count)
        .with("n_min", n_min)
        .with("n_max", n_max)
        .with("k", k);
    GraphSet::new(graphs, 0, prov)
}

fn barabasi_albert(n: usize, k: usize, rng: &mut Rng) -> Graph {
    let mut edges = Vec::with_capacity(k * (n - k));
    let mut urn: Vec<usize> = Vec::with_capacity(2 * k * n);
    let mut targets: Vec<usize> = (0..k).collect();
    for source in k..n {
        for &t in &targets {
            edges.push((t, source));
        }
        urn.extend_from_slice(&targets);
        urn.extend(std::iter::repeat_n(source, k));
        let mut chosen = BTreeSet::new();
        while chosen.len() < k {
            chosen.insert(urn[rng.below(urn.len())]);
        }
        targets = chosen.into_iter().collect();
    }
    Graph::from_edges_dedup(n, edges)
}

/// Watts–Strogatz small world: ring lattice with `k/2` neighbors on each side,
/// then every lattice edge `(u, u+j)` is rewired with probability `p_rewire`
/// to `(u, w)` for a uniform non-neighbor `w` of `u`.
pub fn generate_ws(
    count: usize,
    n_min: usize,
    n_max: usize,
    k: usize,
    p_rewire: f64,
    rng: &mut Rng,
) -> Result<GraphSet> {
    check_count(count)?;
    if !k.is_multiple_of(2) {
        return Err(Error::param(format!("WS needs an even k, got {k}")));
    }
    if k >= n_min || n_min > n_max {
        return Err(Error::param(format!(
            "WS needs k < n_min <= n_max (k={k}, n_min={n_min}, n_max={n_max})"
        )));
    }
    check_prob("p_rewire", p_rewire)?;
    let graphs = (0..count)
        .map(|_| {
            let n = rng.range_inclusive(n_min, n_max);
            watts_strogatz(n, k, p_rewire, rng)
        })
        .collect();
    let prov = Provenance::new("ws", None)
        .with("count", count)
        .with("n_min", n_min)
        .with("n_max", n_max)
        .with("k", k)
        .with("p_rewire", p_rewire);
    GraphSet::new(graphs, 0, prov)
}

fn watts_strogatz(n: usize, k: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut adj = AdjSets::new(n);
    for j in 1..=k / 2 {
        for u in 0..n {
            adj.insert(u, (u + j) % n);
        }
    }
    for j in 1..=k / 2 {
        for u in 0..n {
            let v = (u + j) % n;
            if !rng.bernoulli(p) {
                continue;
            }
            if adj.degree(u) >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.below(n);
                if w != u && !adj.contains(u, w) {
                    break w;
                }
            };
            adj.remove(u, v);
            adj.insert(u, w);
        }
    }
    adj.into_graph()
}

/// Two Erdős–Rényi communities of sizes drawn from `c_min..=c_max`, joined
/// by `floor(inter_frac * n)` distinct cross edges chosen uniformly.
pub fn generate_community2(
    count: usize,
    c_min: usize,
    c_max: usize,
    p_intra: f64,
    inter_frac: f64,
    rng: &mut Rng,
) -> Result<GraphSet> {
    check_count(count)?;
    if c_min == 0 || c_min > c_max {
        return Err(Error::param(format!(
            "community sizes need 1 <= c_min <= c_max ({c_min}, {c_max})"
        )));
    }
    if !(p_intra > 0.0 && p_intra <= 1.0) {
        return Err(Error::param(format!("p_intra must be in (0, 1], got {p_intra}")));
    }
    if !(0.0..=1.0).contains(&inter_frac) {
        return Err(Error::param(format!("inter_frac must be in [0, 1], got {inter_frac}")));
    }
    let mut graphs = Vec::with_capacity(count);
    for _ in 0..count {
        let a = rng.range_inclusive(c_min, c_max);
        let b = rng.range_inclusive(c_min, c_max);
        let left = erdos_renyi(a, p_intra, rng);
        let right = erdos_renyi(b, p_intra, rng);
        let joined = left.disjoint_union(&right);
        let n = a + b;
        let inter = (inter_frac * n as f64).floor() as usize;
        if inter > a * b {
            return Err(Error::param(format!(
                "{inter} inter-community edges requested but only {} cross pairs exist",
                a * b
            )));
        }
        let mut edges = joined.edges().to_vec();
        for idx in rng.sample_indices(a * b, inter) {
            edges.push((idx / b, a + idx % b));
        }
        graphs.push(Graph::from_edges_dedup(n, edges));
    }
    let prov = Provenance::new("community2", None)
        .with("count", count)
        .with("c_min", c_min)
        .with("c_max", c_max)
        .with("p_intra", p_intra)
        .with("inter_frac", inter_frac);
    GraphSet::new(graphs, 0, prov)
}

/// G(n, p): every pair independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut edges = Vec::new();
    if p > 0.0 {
        for u in 0..n {
            for v in u + 1..n {
                if rng.bernoulli(p) {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::from_edges_dedup(n, edges)
}

/// Admissible grid shapes `(rows, cols)`, `2 <= rows <= cols`, with
/// `rows * cols` in range, ordered by node count then rows.
pub fn grid_shapes(n_min: usize, n_max: usize) -> Vec<(usize, usize)> {
    let mut shapes = Vec::new();
    let mut rows = 2;
    while rows * rows <= n_max {
        for cols in rows..=n_max / rows {
            let n = rows * cols;
            if n >= n_min {
                shapes.push((rows, cols));
            }
        }
        rows += 1;
    }
    shapes.sort_by_key(|&(r, c)| (r * c, r));
    shapes
}

/// 2D lattice with node `r * cols + c` at row `r`, column `c`.
pub fn grid_graph(rows: usize, cols: usize) -> Graph {
    let mut edges = Vec::with_capacity(rows * (cols.saturating_sub(1)) + cols * (rows.saturating_sub(1)));
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges_dedup(rows * cols, edges)
}

/// `count` grids cycling through [`grid_shapes`] in order.
pub fn generate_grid(count: usize, n_min: usize, n_max: usize) -> Result<GraphSet> {
    check_count(count)?;
    let shapes = grid_shapes(n_min, n_max);
    if shapes.is_empty() {
        return Err(Error::param(format!(
            "no grid shape has {n_min} <= rows*cols <= {n_max}"
        )));
    }
    let graphs = (0..count)
        .map(|i| {
            let (r, c) = shapes[i % shapes.len()];
            grid_graph(r, c)
        })
        .collect();
    let prov = Provenance::new("grid", None)
        .with("count", count)
        .with("n_min", n_min)
        .with("n_max", n_max);
    GraphSet::new(graphs, 0, prov)
}

/// `count` grids with shapes drawn uniformly, with replacement, from
/// [`grid_shapes`]. Two seeds give two independent samples of the same
/// shape distribution.
pub fn generate_grid_sampled(count: usize, n_min: usize, n_max: usize, rng: &mut Rng) -> Result<GraphSet> {
    check_count(count)?;
    let shapes = grid_shapes(n_min, n_max);
    if shapes.is_empty() {
        return Err(Error::param(format!(
            "no grid shape has {n_min} <= rows*cols <= {n_max}"
        )));
    }
    let graphs = (0..count)
        .map(|_| {
            let (r, c) = shapes[rng.below(shapes.len())];
            grid_graph(r, c)
        })
        .collect();
    let prov = Provenance::new("grid_sampled", None)
        .with("count", count)
        .with("n_min", n_min)
        .with("n_max", n_max);
    GraphSet::new(graphs, 0, prov)
}

/// Ladder with `rungs` rungs: rails `0..m` and `m..2m`, rung `(i, i+m)`.
pub fn ladder_graph(rungs: usize) -> Graph {
    let m = rungs;
    let mut edges = Vec::with_capacity((3 * m).saturating_sub(2));
    for i in 0..m {
        if i + 1 < m {
            edges.push((i, i + 1));
            edges.push((m + i, m + i + 1));
        }
        edges.push((i, m + i));
    }
    Graph::from_edges_dedup(2 * m, edges)
}

/// `count` ladders cycling through the rung counts with `2m` in range.
pub fn generate_ladder(count: usize, n_min: usize, n_max: usize) -> Result<GraphSet> {
    check_count(count)?;
    let lo = n_min.div_ceil(2).max(1);
    let hi = n_max / 2;
    if lo > hi {
        return Err(Error::param(format!("no ladder has {n_min} <= 2m <= {n_max}")));
    }
    let span = hi - lo + 1;
    let graphs = (0..count).map(|i| ladder_graph(lo + i % span)).collect();
    let prov = Provenance::new("ladder", None)
        .with("count", count)
        .with("n_min", n_min)
        .with("n_max", n_max);
    GraphSet::new(graphs, 0, prov)
}

/// Random baseline matched to a reference set: one G(n, p) per reference
/// graph with `n` the largest node count of the set and `p = e_g / n_g^2`.
pub fn generate_er_matched(reference: &GraphSet, rng: &mut Rng) -> Result<GraphSet> {
    if reference.is_empty() {
        return Err(Error::param("reference set is empty"));
    }
    let n = reference.max_node_count();
    let graphs = reference
        .graphs
        .iter()
        .map(|g| {
            let ng = g.node_count();
            let p = if ng == 0 {
                0.0
            } else {
                g.edge_count() as f64 / (ng * ng) as f64
            };
            erdos_renyi(n, p, rng)
        })
        .collect();
    let prov = Provenance::new("er_matched", None)
        .with("reference", reference.provenance.generator.clone())
        .with("n", n);
    GraphSet::new(graphs, reference.label, prov)
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("{name} must be in [0, 1], got {p}")));
    }
    Ok(())
}

/// Result of [`perturb`].
#[derive(Debug, Clone)]
pub struct Perturbed {
    pub graph: Graph,
    /// Edges selected for rewiring.
    pub selected: usize,
    /// Selected edges left in place because the kept endpoint had no
    /// non-neighbor to move to.
    pub skipped: usize,
}

/// Rewires `round(fraction * e)` uniformly chosen edges.
///
/// For each chosen edge one endpoint `u` (picked by a fair coin) is kept and
/// the edge is replaced by `(u, w)`, `w` uniform over the current
/// non-neighbors of `u` other than `u`. Node and edge counts are preserved.
pub fn perturb(g: &Graph, fraction: f64, rng: &mut Rng) -> Result<Perturbed> {
    check_prob("fraction", fraction)?;
    let e = g.edge_count();
    let selected = ((fraction * e as f64).round() as usize).min(e);
    if selected == 0 {
        return Ok(Perturbed {
            graph: g.clone(),
            selected: 0,
            skipped: 0,
        });
    }
    let n = g.node_count();
    let mut adj = AdjSets::from_graph(g);
    let mut skipped = 0;
    let picks = rng.sample_indices(e, selected);
    let mut candidates = Vec::with_capacity(n);
    for idx in picks {
        let (a, b) = g.edges()[idx];
        let (u, v) = if rng.bernoulli(0.5) { (a, b) } else { (b, a) };
        candidates.clear();
        candidates.extend((0..n).filter(|&w| w != u && !adj.contains(u, w)));
        if candidates.is_empty() {
            skipped += 1;
            continue;
        }
        let w = candidates[rng.below(candidates.len())];
        adj.remove(u, v);
        adj.insert(u, w);
    }
    Ok(Perturbed {
        graph: adj.into_graph(),
        selected,
        skipped,
    })
}

/// Perturbs every graph of a set with one stream.
pub fn perturb_set(gs: &GraphSet, fraction: f64, rng: &mut Rng) -> Result<GraphSet> {
    let graphs = gs
        .graphs
        .iter()
        .map(|g| perturb(g, fraction, rng).map(|p| p.graph))
        .collect::<Result<Vec<_>>>()?;
    let mut prov = gs.provenance.clone();
    prov.params.insert("perturbation".into(), fraction.into());
    GraphSet::new(graphs, gs.label, prov)
}

/// Mutable adjacency used while rewiring.
struct AdjSets {
    sets: Vec<BTreeSet<usize>>,
}

impl AdjSets {
    fn new(n: usize) -> Self {
        AdjSets {
            sets: vec![BTreeSet::new(); n],
        }
    }

    fn from_graph(g: &Graph) -> Self {
        AdjSets {
            sets: (0..g.node_count())
                .map(|v| g.neighbors(v).iter().copied().collect())
                .collect(),
        }
    }

    fn insert(&mut self, u: usize, v: usize) {
        self.sets[u].insert(v);
        self.sets[v].insert(u);
    }

    fn remove(&mut self, u: usize, v: usize) {
        self.sets[u].remove(&v);
        self.sets[v].remove(&u);
    }

    fn contains(&self, u: usize, v: usize) -> bool {
        self.sets[u].contains(&v)
    }

    fn degree(&self, u: usize) -> usize {
        self.sets[u].len()
    }

    fn into_graph(self) -> Graph {
        let n = self.sets.len();
        let edges = self
            .sets
            .iter()
            .enumerate()
            .flat_map(|(u, s)| s.range(u + 1..).map(move |&v| (u, v)))
            .collect();
        Graph::from_edges_dedup(n, edges)
    }
}
