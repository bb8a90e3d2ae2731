//! Node features for unattributed graphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSet};
use crate::linalg::Matrix;
use crate::rng::Rng;

pub const DEFAULT_RANDOM_DIM: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureMode {
    /// One-hot of the node degree over the degrees seen at fit time.
    OneHotDegree,
    /// A single all-ones column.
    Constant,
    /// Fresh one-hot over `random_dim` symbols on every call.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub mode: FeatureMode,
    /// Sorted distinct training degrees (one-hot mode only).
    #[serde(default)]
    pub degree_vocab: Vec<usize>,
    #[serde(default)]
    pub random_dim: usize,
    #[serde(default)]
    pub rng_seed: u64,
}

impl FeatureConfig {
    pub fn input_dim(&self) -> usize {
        match self.mode {
            FeatureMode::OneHotDegree => self.degree_vocab.len(),
            FeatureMode::Constant => 1,
            FeatureMode::Random => self.random_dim,
        }
    }

    /// Vocabulary slot for degree `d`: the closest entry, ties to the smaller.
    pub fn degree_slot(&self, d: usize) -> usize {
        match self.degree_vocab.binary_search(&d) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i == self.degree_vocab.len() => i - 1,
            Err(i) => {
                let below = d - self.degree_vocab[i - 1];
                let above = self.degree_vocab[i] - d;
                if above < below {
                    i
                } else {
                    i - 1
                }
            }
        }
    }
}

pub fn fit_features(training: &[GraphSet], mode: FeatureMode) -> Result<FeatureConfig> {
    fit_features_seeded(training, mode, 0)
}

pub fn fit_features_seeded(training: &[GraphSet], mode: FeatureMode, rng_seed: u64) -> Result<FeatureConfig> {
    if training.iter().all(|s| s.is_empty()) {
        return Err(Error::param("feature fitting needs training graphs"));
    }
    let degree_vocab = if mode == FeatureMode::OneHotDegree {
        let mut seen: Vec<usize> = training
            .iter()
            .flat_map(|s| s.graphs.iter())
            .flat_map(|g| g.degrees())
            .collect();
        seen.sort_unstable();
        seen.dedup();
        seen
    } else {
        Vec::new()
    };
    Ok(FeatureConfig {
        mode,
        degree_vocab,
        random_dim: if mode == FeatureMode::Random {
            DEFAULT_RANDOM_DIM
        } else {
            0
        },
        rng_seed,
    })
}

/// `n x input_dim` node feature matrix. Random mode consumes `rng`.
pub fn featurize(g: &Graph, cfg: &FeatureConfig, rng: &mut Rng) -> Matrix {
    let n = g.node_count();
    let dim = cfg.input_dim();
    let mut x = Matrix::zeros(n, dim);
    for v in 0..n {
        let slot = match cfg.mode {
            FeatureMode::OneHotDegree => cfg.degree_slot(g.degree(v)),
            FeatureMode::Constant => 0,
            FeatureMode::Random => rng.below(dim),
        };
        x[(v, slot)] = 1.0;
    }
    x
}
