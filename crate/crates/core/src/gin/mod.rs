//! Graph Isomorphism Network: features, forward/backward, training,
//! embeddings and model files.

pub mod features;
pub mod model;
pub mod persist;
pub mod train;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use features::{featurize, fit_features, fit_features_seeded, FeatureConfig, FeatureMode};
pub use model::{softmax_cross_entropy, ForwardOutput, GinModel, Gradients, Readout};
pub use persist::{load_model, save_model, MODEL_VERSION};
pub use train::{train, EpochStats, TrainHyper, TrainOutcome};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSet};
use crate::linalg::Matrix;
use crate::rng::Rng;

/// One embedding row per input graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    pub rows: Matrix,
    pub graph_ids: Vec<usize>,
}

impl EmbeddingMatrix {
    pub fn new(rows: Matrix) -> Self {
        let graph_ids = (0..rows.rows()).collect();
        EmbeddingMatrix { rows, graph_ids }
    }

    pub fn len(&self) -> usize {
        self.rows.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.rows.row(i)
    }
}

/// Embeds each graph. Random features draw from a per-graph stream
/// `Rng::child(seed, i)`, so row order and values do not depend on threads.
pub fn embed_graphs(model: &GinModel, graphs: &[Graph], seed: u64) -> Result<EmbeddingMatrix> {
    let vectors: Vec<Vec<f64>> = graphs
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let mut rng = Rng::child(seed, i as u64);
            let x = featurize(g, &model.feature_config, &mut rng);
            let out = model.forward(g, &x)?;
            Ok(model.readout_vector(&out))
        })
        .collect::<Result<_>>()?;
    let d = model.embedding_dim();
    let data: Vec<f64> = vectors.into_iter().flatten().collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("embedding contains a non-finite value".into()));
    }
    Ok(EmbeddingMatrix::new(Matrix::from_vec(graphs.len(), d, data)?))
}

pub fn embed(model: &GinModel, set: &GraphSet, seed: u64) -> Result<EmbeddingMatrix> {
    if !model.trained {
        log::info!("embedding with an untrained model");
    }
    embed_graphs(model, &set.graphs, seed)
}

#[cfg(test)]
mod tests {
    use super::model::Gradients;
    use super::*;
    use crate::generators::grid_graph;
    use crate::graph::Provenance;

    fn cycle(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n)
            .map(|i| (i, (i + 1) % n))
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn constant_model(readout: Readout, seed: u64) -> GinModel {
        let cfg = FeatureConfig {
            mode: FeatureMode::Constant,
            degree_vocab: vec![],
            random_dim: 0,
            rng_seed: 0,
        };
        GinModel::new(cfg, 3, 5, 64, readout, &mut Rng::new(seed)).unwrap()
    }

    #[test]
    fn zero_model_gives_zero_outputs() {
        let mut m = constant_model(Readout::Sum, 1);
        for t in m.tensors_mut() {
            t.iter_mut().for_each(|x| *x = 0.0);
        }
        let g = Graph::empty(1);
        let x = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let out = m.forward(&g, &x).unwrap();
        assert!(out.pooled.iter().flatten().all(|&v| v == 0.0));
        assert!(out.logits.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn shapes_and_block_sum() {
        let g = grid_graph(3, 4);
        let set = GraphSet::new(vec![g], 0, Provenance::default()).unwrap();
        let concat = constant_model(Readout::Concat, 2);
        let mut sum = concat.clone();
        sum.readout = Readout::Sum;
        let ec = embed(&concat, &set, 0).unwrap();
        let es = embed(&sum, &set, 0).unwrap();
        assert_eq!((ec.len(), ec.dim()), (1, 320));
        assert_eq!((es.len(), es.dim()), (1, 64));
        for j in 0..64 {
            let mut s = 0.0;
            for k in 0..5 {
                s += ec.row(0)[k * 64 + j];
            }
            assert_eq!(s, es.row(0)[j]);
        }
    }

    #[test]
    fn wl_equivalent_pair() {
        let c6 = cycle(6);
        let two_c3 = cycle(3).disjoint_union(&cycle(3));
        let m = constant_model(Readout::Concat, 5);
        let e = embed_graphs(&m, &[c6, two_c3], 0).unwrap();
        let d: f64 = e.row(0).iter().zip(e.row(1)).map(|(a, b)| (a - b).powi(2)).sum();
        assert!(d.sqrt() < 1e-9);
    }

    #[test]
    fn persistence_round_trip() {
        let m = constant_model(Readout::Concat, 9);
        let text = persist::model_to_json(&m).unwrap();
        let back = persist::model_from_json(&text).unwrap();
        assert_eq!(back, m);
        let bumped = text.replacen("\"version\":1", "\"version\":7", 1);
        assert!(matches!(
            persist::model_from_json(&bumped),
            Err(Error::Version { found: 7, expected: 1 })
        ));
    }

    #[test]
    fn gradient_buffers_match_parameters() {
        let m = constant_model(Readout::Sum, 3);
        let g = Gradients::zeros_like(&m);
        let a: Vec<usize> = m.tensors().iter().map(|t| t.len()).collect();
        let b: Vec<usize> = g.tensors().iter().map(|t| t.len()).collect();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5 * 4 + 5 * 2);
    }
}
