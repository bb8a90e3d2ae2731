//! Supervised graph-classification training with Adam.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gin::features::{featurize, FeatureConfig, FeatureMode};
use crate::gin::model::{argmax, GinModel, Gradients, Readout, DEFAULT_HIDDEN, DEFAULT_LAYERS};
use crate::graph::{Graph, GraphSet};
use crate::linalg::Matrix;
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainHyper {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub test_fraction: f64,
    pub layers: usize,
    pub hidden: usize,
    pub readout: Readout,
    pub seed: u64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        TrainHyper {
            epochs: 64,
            batch_size: 32,
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            test_fraction: 0.2,
            layers: DEFAULT_LAYERS,
            hidden: DEFAULT_HIDDEN,
            readout: Readout::Sum,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: GinModel,
    pub history: Vec<EpochStats>,
    pub train_indices: Vec<(usize, usize)>,
    pub test_indices: Vec<(usize, usize)>,
}

impl TrainOutcome {
    pub fn final_test_accuracy(&self) -> f64 {
        self.history.last().map_or(0.0, |e| e.test_accuracy)
    }
}

/// `(class, index within class)`.
pub type GraphIndex = (usize, usize);

/// Per class, a shuffled `test_fraction` share goes to the test split.
pub fn stratified_split(sizes: &[usize], test_fraction: f64, rng: &mut Rng) -> (Vec<GraphIndex>, Vec<GraphIndex>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, &n) in sizes.iter().enumerate() {
        let mut idx: Vec<usize> = (0..n).collect();
        rng.shuffle(&mut idx);
        let mut n_test = (test_fraction * n as f64).round() as usize;
        if n >= 2 && test_fraction > 0.0 {
            n_test = n_test.clamp(1, n - 1);
        }
        for (j, &i) in idx.iter().enumerate() {
            if j < n_test {
                test.push((class, i));
            } else {
                train.push((class, i));
            }
        }
    }
    (train, test)
}

struct Adam {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    step: i32,
}

impl Adam {
    fn new(model: &GinModel) -> Self {
        let shapes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
        Adam {
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    fn update(&mut self, model: &mut GinModel, grad: &Gradients, h: &TrainHyper) {
        self.step += 1;
        let c1 = 1.0 - h.beta1.powi(self.step);
        let c2 = 1.0 - h.beta2.powi(self.step);
        let grads = grad.tensors();
        for (((w, g), m), v) in model
            .tensors_mut()
            .into_iter()
            .zip(grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            for i in 0..w.len() {
                m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
                v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
                let mh = m[i] / c1;
                let vh = v[i] / c2;
                w[i] -= h.learning_rate * mh / (vh.sqrt() + h.adam_epsilon);
            }
        }
    }
}

struct Features<'a> {
    cfg: &'a FeatureConfig,
    fixed: Option<Vec<Vec<Matrix>>>,
}

impl<'a> Features<'a> {
    fn new(datasets: &[GraphSet], cfg: &'a FeatureConfig) -> Self {
        let fixed = (cfg.mode != FeatureMode::Random).then(|| {
            let mut rng = Rng::new(0);
            datasets
                .iter()
                .map(|s| s.graphs.iter().map(|g| featurize(g, cfg, &mut rng)).collect())
                .collect()
        });
        Features { cfg, fixed }
    }

    fn get(&self, datasets: &[GraphSet], item: (usize, usize), rng: &mut Rng) -> Matrix {
        match &self.fixed {
            Some(f) => f[item.0][item.1].clone(),
            None => featurize(&datasets[item.0].graphs[item.1], self.cfg, rng),
        }
    }
}

/// Trains a fresh GIN; dataset `i` is class `i`.
pub fn train(datasets: &[GraphSet], cfg: &FeatureConfig, hyper: &TrainHyper) -> Result<TrainOutcome> {
    if datasets.len() < 2 {
        return Err(Error::param("training needs at least two classes"));
    }
    if hyper.epochs == 0 || hyper.batch_size == 0 {
        return Err(Error::param("epochs and batch size must be positive"));
    }
    if !(0.0..1.0).contains(&hyper.test_fraction) {
        return Err(Error::param("test fraction must lie in [0, 1)"));
    }
    let mut init_rng = Rng::child(hyper.seed, 0);
    let mut split_rng = Rng::child(hyper.seed, 1);
    let mut order_rng = Rng::child(hyper.seed, 2);
    let mut feature_rng = Rng::new(derive_seed(hyper.seed, 3) ^ cfg.rng_seed);

    let mut model = GinModel::new(
        cfg.clone(),
        datasets.len(),
        hyper.layers,
        hyper.hidden,
        hyper.readout,
        &mut init_rng,
    )?;
    let sizes: Vec<usize> = datasets.iter().map(|s| s.len()).collect();
    let (train_items, test_items) = stratified_split(&sizes, hyper.test_fraction, &mut split_rng);
    if train_items.is_empty() {
        return Err(Error::param("training split is empty"));
    }
    let features = Features::new(datasets, cfg);
    let mut adam = Adam::new(&model);
    let mut history = Vec::with_capacity(hyper.epochs);
    let mut order = train_items.clone();

    for epoch in 0..hyper.epochs {
        order_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut correct = 0usize;
        for batch in order.chunks(hyper.batch_size) {
            let mut grad = Gradients::zeros_like(&model);
            let scale = 1.0 / batch.len() as f64;
            for &item in batch {
                let g = &datasets[item.0].graphs[item.1];
                let x = features.get(datasets, item, &mut feature_rng);
                let (loss, out) = model.loss_and_backward(g, &x, item.0, scale, &mut grad)?;
                if !loss.is_finite() {
                    return Err(Error::Diverged { epoch, loss });
                }
                loss_sum += loss;
                if argmax(&out.logits) == item.0 {
                    correct += 1;
                }
            }
            adam.update(&mut model, &grad, hyper);
            if !model.is_finite() {
                return Err(Error::Diverged { epoch, loss: f64::NAN });
            }
        }
        let test_accuracy = accuracy(&model, datasets, &test_items, &features, &mut feature_rng)?;
        let loss = loss_sum / order.len() as f64;
        log::debug!("epoch {epoch}: loss {loss:.4} test accuracy {test_accuracy:.3}");
        history.push(EpochStats {
            epoch,
            loss,
            train_accuracy: correct as f64 / order.len() as f64,
            test_accuracy,
        });
    }
    model.trained = true;
    Ok(TrainOutcome {
        model,
        history,
        train_indices: train_items,
        test_indices: test_items,
    })
}

fn accuracy(
    model: &GinModel,
    datasets: &[GraphSet],
    items: &[(usize, usize)],
    features: &Features,
    rng: &mut Rng,
) -> Result<f64> {
    if items.is_empty() {
        return Ok(0.0);
    }
    let mut correct = 0;
    for &item in items {
        let g: &Graph = &datasets[item.0].graphs[item.1];
        let x = features.get(datasets, item, rng);
        if argmax(&model.forward(g, &x)?.logits) == item.0 {
            correct += 1;
        }
    }
    Ok(correct as f64 / items.len() as f64)
}

/// Fraction of graphs classified as their own dataset index.
pub fn evaluate_accuracy(model: &GinModel, datasets: &[GraphSet], seed: u64) -> Result<f64> {
    let features = Features::new(datasets, &model.feature_config);
    let items: Vec<(usize, usize)> = datasets
        .iter()
        .enumerate()
        .flat_map(|(c, s)| (0..s.len()).map(move |i| (c, i)))
        .collect();
    accuracy(model, datasets, &items, &features, &mut Rng::new(seed))
}
