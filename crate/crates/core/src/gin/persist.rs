//! Versioned JSON model files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gin::features::FeatureConfig;
use crate::gin::model::{GinLayer, GinModel, Linear, Readout};
use crate::io::write_atomic;
use crate::linalg::Matrix;

pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct LinearFile {
    weight: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    lin1: LinearFile,
    lin2: LinearFile,
    epsilon: f64,
}

#[derive(Serialize, Deserialize)]
struct WeightsFile {
    layers: Vec<LayerFile>,
    heads: Vec<LinearFile>,
}

#[derive(Serialize, Deserialize)]
struct HyperFile {
    layers: usize,
    hidden: usize,
    readout: Readout,
    class_count: usize,
    trained: bool,
    batch_norm: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    hyper: HyperFile,
    feature_config: FeatureConfig,
    weights: WeightsFile,
}

impl From<&Linear> for LinearFile {
    fn from(l: &Linear) -> Self {
        LinearFile {
            weight: (0..l.weight.rows()).map(|r| l.weight.row(r).to_vec()).collect(),
            bias: l.bias.clone(),
        }
    }
}

impl LinearFile {
    fn into_linear(self, what: &str) -> Result<Linear> {
        let weight = Matrix::from_rows(&self.weight)
            .map_err(|e| Error::InvalidParameter(format!("corrupted weights in {what}: {e}")))?;
        if self.bias.len() != weight.cols() {
            return Err(Error::param(format!("corrupted weights in {what}: bias length")));
        }
        if !weight.is_finite() || self.bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::param(format!("corrupted weights in {what}: non-finite value")));
        }
        Ok(Linear {
            weight,
            bias: self.bias,
        })
    }
}

pub fn model_to_json(model: &GinModel) -> Result<String> {
    let file = ModelFile {
        version: MODEL_VERSION,
        hyper: HyperFile {
            layers: model.layers.len(),
            hidden: model.hidden_dim(),
            readout: model.readout,
            class_count: model.class_count,
            trained: model.trained,
            batch_norm: false,
        },
        feature_config: model.feature_config.clone(),
        weights: WeightsFile {
            layers: model
                .layers
                .iter()
                .map(|l| LayerFile {
                    lin1: (&l.lin1).into(),
                    lin2: (&l.lin2).into(),
                    epsilon: l.epsilon,
                })
                .collect(),
            heads: model.heads.iter().map(LinearFile::from).collect(),
        },
    };
    Ok(serde_json::to_string(&file)? + "\n")
}

pub fn model_from_json(text: &str) -> Result<GinModel> {
    let raw: serde_json::Value = serde_json::from_str(text)?;
    let found = raw
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::param("model file has no version tag"))?;
    if found != MODEL_VERSION as u64 {
        return Err(Error::Version {
            found: found.min(u32::MAX as u64) as u32,
            expected: MODEL_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(raw)?;
    let h = &file.hyper;
    if file.weights.layers.len() != h.layers || file.weights.heads.len() != h.layers || h.layers == 0 {
        return Err(Error::param("corrupted weights: layer count"));
    }
    let mut layers = Vec::with_capacity(h.layers);
    let mut expected_in = file.feature_config.input_dim();
    for (i, l) in file.weights.layers.into_iter().enumerate() {
        let lin1 = l.lin1.into_linear(&format!("layer {i}"))?;
        let lin2 = l.lin2.into_linear(&format!("layer {i}"))?;
        if lin1.input_dim() != expected_in
            || lin1.output_dim() != h.hidden
            || lin2.input_dim() != h.hidden
            || lin2.output_dim() != h.hidden
        {
            return Err(Error::param(format!("corrupted weights: layer {i} shape")));
        }
        expected_in = h.hidden;
        layers.push(GinLayer {
            lin1,
            lin2,
            epsilon: l.epsilon,
        });
    }
    let mut heads = Vec::with_capacity(h.layers);
    for (i, hd) in file.weights.heads.into_iter().enumerate() {
        let lin = hd.into_linear(&format!("head {i}"))?;
        if lin.input_dim() != h.hidden || lin.output_dim() != h.class_count {
            return Err(Error::param(format!("corrupted weights: head {i} shape")));
        }
        heads.push(lin);
    }
    Ok(GinModel {
        layers,
        heads,
        readout: h.readout,
        feature_config: file.feature_config,
        class_count: h.class_count,
        trained: h.trained,
    })
}

pub fn save_model(model: &GinModel, path: &Path) -> Result<()> {
    write_atomic(path, model_to_json(model)?.as_bytes())
}

pub fn load_model(path: &Path) -> Result<GinModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}
