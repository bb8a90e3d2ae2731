use proptest::prelude::*;

use ggeval::embed_metrics::{frechet_distance, gaussian_summary, prdc, GaussianSummary};
use ggeval::generators::{
    generate_ba, generate_community2, generate_er_matched, generate_grid, generate_ladder, generate_ws, perturb,
};
use ggeval::gin::{embed_graphs, fit_features, EmbeddingMatrix, FeatureMode, GinModel, Readout};
use ggeval::io::graphset_to_string;
use ggeval::linalg::Matrix;
use ggeval::mmd::{mmd2, Estimator, Kernel, KernelKind};
use ggeval::orbits::{orbit4_counts, ORBIT_COUNT};
use ggeval::ordering::{bandwidth, decode_sequence, encode_sequence, order, permuted_graph, OrderingPolicy};
use ggeval::stats::{
    clustering_coefficients, clustering_histogram, degree_histogram, laplacian_spectrum, laplacian_spectrum_histogram,
};
use ggeval::{Graph, GraphSet, Provenance, Rng};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut it = bits.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    if it.next().unwrap() {
                        edges.push((u, v));
                    }
                }
            }
            Graph::from_edges(n, &edges).unwrap()
        })
    })
}

fn permutation_strategy(g: Graph) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    let n = g.node_count();
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(move |p| (g.clone(), p))
}

fn policy_strategy() -> impl Strategy<Value = OrderingPolicy> {
    proptest::sample::select(OrderingPolicy::ALL.to_vec())
}

fn points(rows: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, dim), rows)
}

fn embedding(rows: &[Vec<f64>]) -> EmbeddingMatrix {
    EmbeddingMatrix::new(Matrix::from_rows(rows).unwrap())
}

/// Orbit counts from all 2-, 3- and 4-node subsets, classified by induced
/// edge count and degrees.
fn orbit_oracle(g: &Graph) -> Vec<[u64; ORBIT_COUNT]> {
    let n = g.node_count();
    let mut out = vec![[0u64; ORBIT_COUNT]; n];
    let induced = |nodes: &[usize]| -> (usize, Vec<usize>) {
        let mut deg = vec![0; nodes.len()];
        let mut m = 0;
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if g.has_edge(nodes[i], nodes[j]) {
                    deg[i] += 1;
                    deg[j] += 1;
                    m += 1;
                }
            }
        }
        (m, deg)
    };
    for a in 0..n {
        for b in a + 1..n {
            if g.has_edge(a, b) {
                out[a][0] += 1;
                out[b][0] += 1;
            }
            for c in b + 1..n {
                let s = [a, b, c];
                let (m, deg) = induced(&s);
                for (i, &v) in s.iter().enumerate() {
                    match (m, deg[i]) {
                        (2, 1) => out[v][1] += 1,
                        (2, 2) => out[v][2] += 1,
                        (3, _) => out[v][3] += 1,
                        _ => {}
                    }
                }
                for d in c + 1..n {
                    let s = [a, b, c, d];
                    let (m, deg) = induced(&s);
                    // two disjoint edges also leave no node isolated
                    if m < 3 || deg.contains(&0) {
                        continue;
                    }
                    let mut sorted = deg.clone();
                    sorted.sort_unstable();
                    for (i, &v) in s.iter().enumerate() {
                        let orbit = match (m, sorted.as_slice(), deg[i]) {
                            (3, [1, 1, 2, 2], 1) => 4,
                            (3, [1, 1, 2, 2], _) => 5,
                            (3, [1, 1, 1, 3], 1) => 6,
                            (3, [1, 1, 1, 3], _) => 7,
                            (4, [2, 2, 2, 2], _) => 8,
                            (4, _, 1) => 9,
                            (4, _, 2) => 10,
                            (4, _, _) => 11,
                            (5, _, 2) => 12,
                            (5, _, _) => 13,
                            (6, _, _) => 14,
                            _ => unreachable!("disconnected 4-subset"),
                        };
                        out[v][orbit] += 1;
                    }
                }
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_are_valid_and_deterministic(seed in any::<u64>()) {
        let sets: Vec<GraphSet> = vec![
            generate_ba(4, 10, 20, 3, &mut Rng::new(seed)).unwrap(),
            generate_ws(4, 10, 20, 4, 0.2, &mut Rng::new(seed)).unwrap(),
            generate_community2(4, 3, 6, 0.5, 0.1, &mut Rng::new(seed)).unwrap(),
            generate_grid(4, 4, 30).unwrap(),
            generate_ladder(4, 4, 30).unwrap(),
        ];
        for s in &sets {
            for g in &s.graphs {
                prop_assert!(g.validate().is_ok());
            }
        }
        let er = generate_er_matched(&sets[0], &mut Rng::new(seed)).unwrap();
        prop_assert_eq!(er.len(), sets[0].len());
        let again = generate_ba(4, 10, 20, 3, &mut Rng::new(seed)).unwrap();
        prop_assert_eq!(graphset_to_string(&sets[0]), graphset_to_string(&again));
    }

    #[test]
    fn ws_without_rewiring_is_regular(seed in any::<u64>()) {
        let s = generate_ws(3, 8, 30, 4, 0.0, &mut Rng::new(seed)).unwrap();
        for g in &s.graphs {
            prop_assert!(g.degrees().iter().all(|&d| d == 4));
        }
    }

    #[test]
    fn perturb_preserves_counts(g in graph_strategy(14), f in 0.0f64..=1.0, seed in any::<u64>()) {
        let p = perturb(&g, f, &mut Rng::new(seed)).unwrap().graph;
        prop_assert_eq!(p.node_count(), g.node_count());
        prop_assert_eq!(p.edge_count(), g.edge_count());
        prop_assert!(p.validate().is_ok());
        prop_assert_eq!(perturb(&g, 0.0, &mut Rng::new(seed)).unwrap().graph, g);
    }

    #[test]
    fn orderings_are_bijections(g in graph_strategy(16), policy in policy_strategy(), seed in any::<u64>()) {
        let pi = order(&g, policy, &mut Rng::new(seed));
        let mut sorted = pi.permutation.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..g.node_count()).collect::<Vec<_>>());
        if policy == OrderingPolicy::DegreeDescent {
            let d: Vec<usize> = pi.permutation.iter().map(|&v| g.degree(v)).collect();
            prop_assert!(d.windows(2).all(|w| w[0] >= w[1]));
        }
        if policy.is_bfs() {
            let pos = pi.positions();
            for &v in &pi.permutation {
                let earlier = g.neighbors(v).iter().any(|&u| pos[u] < pos[v]);
                let component_root = g.components().iter().any(|c| c.contains(&v) && c.iter().all(|&u| pos[u] >= pos[v]));
                prop_assert!(earlier || component_root);
            }
        }
    }

    #[test]
    fn sequence_round_trip(g in graph_strategy(16), policy in policy_strategy(), seed in any::<u64>(), extra in 0usize..3) {
        let pi = order(&g, policy, &mut Rng::new(seed));
        let m = bandwidth(&g, &pi) + extra;
        let seq = encode_sequence(&g, &pi, Some(m));
        prop_assert_eq!(decode_sequence(&seq).unwrap(), permuted_graph(&g, &pi));
    }

    #[test]
    fn orbit_counts_match_subset_oracle(g in graph_strategy(12)) {
        prop_assert_eq!(orbit4_counts(&g, 500).unwrap(), orbit_oracle(&g));
    }

    #[test]
    fn statistics_sane_and_relabel_invariant((g, p) in graph_strategy(14).prop_flat_map(permutation_strategy)) {
        let h = g.relabel(&p);
        for hist in [degree_histogram(&g, 20), clustering_histogram(&g, 100), laplacian_spectrum_histogram(&g, 200).unwrap()] {
            prop_assert!(hist.counts.iter().all(|&c| c >= 0.0));
            let total: f64 = hist.counts.iter().sum();
            prop_assert!(total == 0.0 || (total - 1.0).abs() <= 1e-12);
        }
        prop_assert_eq!(degree_histogram(&g, 20), degree_histogram(&h, 20));
        prop_assert_eq!(clustering_histogram(&g, 100), clustering_histogram(&h, 100));
        let mut cg = clustering_coefficients(&g);
        let mut ch = clustering_coefficients(&h);
        cg.sort_by(f64::total_cmp);
        ch.sort_by(f64::total_cmp);
        prop_assert_eq!(cg, ch);

        let sg = laplacian_spectrum(&g).unwrap();
        let sh = laplacian_spectrum(&h).unwrap();
        prop_assert!(sg.iter().all(|&l| (-1e-9..=2.0 + 1e-9).contains(&l)));
        let non_isolated = g.degrees().iter().filter(|&&d| d > 0).count() as f64;
        prop_assert!((sg.iter().sum::<f64>() - non_isolated).abs() <= 1e-6);
        for (a, b) in sg.iter().zip(&sh) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn mmd_properties(p in points(5, 3), q in points(4, 3), sigma in 0.1f64..5.0) {
        for kind in [KernelKind::GaussianTv, KernelKind::GaussianL2, KernelKind::RbfVector] {
            let k = Kernel::new(kind, sigma).unwrap();
            let pq = mmd2(&p, &q, &k, Estimator::Biased).unwrap();
            let qp = mmd2(&q, &p, &k, Estimator::Biased).unwrap();
            prop_assert!((pq - qp).abs() <= 1e-12);
            prop_assert!(pq >= -1e-12);
            prop_assert!(mmd2(&p, &p, &k, Estimator::Biased).unwrap().abs() <= 1e-12);
            let mut rev = p.clone();
            rev.reverse();
            prop_assert!((mmd2(&rev, &q, &k, Estimator::Biased).unwrap() - pq).abs() <= 1e-12);

            let mean = |a: &[Vec<f64>], b: &[Vec<f64>], skip: bool| {
                let mut s = 0.0;
                let mut c = 0.0;
                for (i, x) in a.iter().enumerate() {
                    for (j, y) in b.iter().enumerate() {
                        if !(skip && i == j) {
                            s += k.eval(x, y);
                            c += 1.0;
                        }
                    }
                }
                s / c
            };
            prop_assert!((pq - (mean(&p, &p, false) + mean(&q, &q, false) - 2.0 * mean(&p, &q, false))).abs() <= 1e-14);
            let u = mmd2(&p, &q, &k, Estimator::Unbiased).unwrap();
            prop_assert!((u - (mean(&p, &p, true) + mean(&q, &q, true) - 2.0 * mean(&p, &q, false))).abs() <= 1e-14);
        }
    }

    #[test]
    fn frechet_properties(a in points(12, 3), b in points(9, 3), shift in proptest::collection::vec(-10.0f64..10.0, 3)) {
        let (sa, sb) = (gaussian_summary(&embedding(&a)).unwrap(), gaussian_summary(&embedding(&b)).unwrap());
        prop_assert!(frechet_distance(&sa, &sa).unwrap().clamped <= 1e-8);
        let ab = frechet_distance(&sa, &sb).unwrap().clamped;
        let ba = frechet_distance(&sb, &sa).unwrap().clamped;
        prop_assert!((ab - ba).abs() <= 1e-8);
        let move_by = |s: &GaussianSummary| GaussianSummary {
            mean: s.mean.iter().zip(&shift).map(|(m, d)| m + d).collect(),
            covariance: s.covariance.clone(),
        };
        let moved = frechet_distance(&move_by(&sa), &move_by(&sb)).unwrap().clamped;
        prop_assert!((moved - ab).abs() <= 1e-8);
    }

    #[test]
    fn prdc_ranges_and_self(real in points(15, 2), gen in points(11, 2), k in 1usize..6) {
        let (r, g) = (embedding(&real), embedding(&gen));
        let m = prdc(&r, &g, k).unwrap();
        for v in [m.precision, m.recall, m.coverage] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(m.density >= 0.0 && m.density <= 15.0 / k as f64);
        let own = prdc(&r, &r, k).unwrap();
        prop_assert_eq!((own.precision, own.recall, own.coverage), (1.0, 1.0, 1.0));
    }

    #[test]
    fn gin_permutation_invariance((g, p) in graph_strategy(12).prop_flat_map(permutation_strategy), seed in any::<u64>()) {
        let set = GraphSet::new(vec![g.clone()], 0, Provenance::new("test", None)).unwrap();
        let cfg = fit_features(&[set], FeatureMode::OneHotDegree).unwrap();
        let model = GinModel::new(cfg, 2, 5, 32, Readout::Concat, &mut Rng::new(seed)).unwrap();
        let e = embed_graphs(&model, &[g.clone(), g.relabel(&p)], 0).unwrap();
        let d: f64 = e.row(0).iter().zip(e.row(1)).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(d < 1e-9);
    }
}
