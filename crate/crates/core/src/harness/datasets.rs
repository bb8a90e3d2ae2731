//! Named synthetic datasets and the training configurations built from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    generate_ba, generate_community2, generate_er_matched, generate_grid, generate_grid_sampled, generate_ladder,
    generate_ws, ladder_graph,
};
use crate::graph::{GraphSet, Provenance};
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DatasetKind {
    #[serde(rename = "BA")]
    Ba,
    #[serde(rename = "WS")]
    Ws,
    #[serde(rename = "C2L")]
    C2l,
    #[serde(rename = "C2S")]
    C2s,
    #[serde(rename = "Gr")]
    Gr,
    #[serde(rename = "Ld")]
    Ld,
}

impl DatasetKind {
    pub const BASE: [DatasetKind; 5] = [
        DatasetKind::Ba,
        DatasetKind::Ws,
        DatasetKind::C2l,
        DatasetKind::C2s,
        DatasetKind::Gr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Ba => "BA",
            DatasetKind::Ws => "WS",
            DatasetKind::C2l => "C2L",
            DatasetKind::C2s => "C2S",
            DatasetKind::Gr => "Gr",
            DatasetKind::Ld => "Ld",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Full benchmark counts and sizes.
    Large,
    /// 100 graphs per class, sizes divided by 5 where the result stays
    /// meaningful.
    #[default]
    Desk,
}

/// Generator parameters of one dataset at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetParams {
    pub count: usize,
    pub n_min: usize,
    pub n_max: usize,
}

pub fn dataset_params(kind: DatasetKind, scale: Scale) -> DatasetParams {
    let p = |count, n_min, n_max| DatasetParams { count, n_min, n_max };
    match (scale, kind) {
        (Scale::Large, DatasetKind::Gr) => p(100, 100, 400),
        (Scale::Large, DatasetKind::C2l) => p(500, 6, 10),
        (Scale::Large, DatasetKind::C2s) => p(500, 30, 80),
        (Scale::Large, _) => p(500, 100, 200),
        (Scale::Desk, DatasetKind::Gr) => p(100, 20, 80),
        // communities of 6..10 cannot shrink further
        (Scale::Desk, DatasetKind::C2l) => p(100, 6, 10),
        (Scale::Desk, DatasetKind::C2s) => p(100, 6, 16),
        (Scale::Desk, _) => p(100, 20, 40),
    }
}

pub fn generate_dataset(kind: DatasetKind, scale: Scale, seed: u64) -> Result<GraphSet> {
    let DatasetParams { count, n_min, n_max } = dataset_params(kind, scale);
    let mut rng = Rng::child(seed, kind.stream());
    let mut set = match kind {
        DatasetKind::Ba => generate_ba(count, n_min, n_max, 4, &mut rng)?,
        DatasetKind::Ws => generate_ws(count, n_min, n_max, 4, 0.1, &mut rng)?,
        DatasetKind::C2l => generate_community2(count, n_min, n_max, 0.7, 0.1, &mut rng)?,
        DatasetKind::C2s => generate_community2(count, n_min, n_max, 0.3, 0.05, &mut rng)?,
        DatasetKind::Gr => generate_grid(count, n_min, n_max)?,
        DatasetKind::Ld => generate_ladder(count, n_min, n_max)?,
    };
    if !matches!(kind, DatasetKind::Gr | DatasetKind::Ld) {
        set.provenance.seed = Some(derive_seed(seed, kind.stream()));
    }
    set.provenance.params.insert("dataset".into(), kind.name().into());
    Ok(set)
}

/// An independent draw from the same distribution as [`generate_dataset`].
/// Grids and ladders are deterministic there, so here their shapes are
/// drawn uniformly with replacement.
pub fn resample_dataset(kind: DatasetKind, scale: Scale, seed: u64) -> Result<GraphSet> {
    let DatasetParams { count, n_min, n_max } = dataset_params(kind, scale);
    let mut rng = Rng::child(seed, 50 + kind.stream());
    let mut set = match kind {
        DatasetKind::Gr => generate_grid_sampled(count, n_min, n_max, &mut rng)?,
        DatasetKind::Ld => {
            let lo = n_min.div_ceil(2).max(1);
            let hi = n_max / 2;
            let graphs = (0..count).map(|_| ladder_graph(rng.range_inclusive(lo, hi))).collect();
            GraphSet::new(graphs, 0, Provenance::new("ladder_sampled", None))?
        }
        _ => return generate_dataset(kind, scale, derive_seed(seed, 50)),
    };
    set.provenance.params.insert("dataset".into(), kind.name().into());
    Ok(set)
}

impl std::str::FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            DatasetKind::Ba,
            DatasetKind::Ws,
            DatasetKind::C2l,
            DatasetKind::C2s,
            DatasetKind::Gr,
            DatasetKind::Ld,
        ]
        .into_iter()
        .find(|k| k.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::param(format!("unknown dataset `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetConfigName {
    #[default]
    Base,
    Ladder,
    Full,
}

impl DatasetConfigName {
    /// Class names in label order.
    pub fn class_names(self) -> Vec<String> {
        let mut names: Vec<String> = DatasetKind::BASE.iter().map(|k| k.name().to_string()).collect();
        if self != DatasetConfigName::Base {
            names.push(DatasetKind::Ld.name().into());
        }
        if self == DatasetConfigName::Full {
            let er: Vec<String> = names
                .iter()
                .filter(|n| *n != DatasetKind::Gr.name())
                .map(|n| format!("ER-{n}"))
                .collect();
            names.extend(er);
        }
        names
    }

    pub fn name(self) -> &'static str {
        match self {
            DatasetConfigName::Base => "base",
            DatasetConfigName::Ladder => "ladder",
            DatasetConfigName::Full => "full",
        }
    }
}

/// Labelled training classes; class `i` carries label `i`.
#[derive(Debug, Clone)]
pub struct DatasetConfig {
    pub name: DatasetConfigName,
    pub class_names: Vec<String>,
    pub sets: Vec<GraphSet>,
}

impl DatasetConfig {
    pub fn class_count(&self) -> usize {
        self.sets.len()
    }

    pub fn get(&self, class_name: &str) -> Option<&GraphSet> {
        self.class_names
            .iter()
            .position(|c| c == class_name)
            .map(|i| &self.sets[i])
    }
}

/// Base = BA, WS, C2L, C2S, Gr; Ladder adds Ld; Full adds a matched ER set
/// for every Ladder class except Gr.
pub fn build_dataset_config(name: DatasetConfigName, scale: Scale, seed: u64) -> Result<DatasetConfig> {
    let mut kinds = DatasetKind::BASE.to_vec();
    if name != DatasetConfigName::Base {
        kinds.push(DatasetKind::Ld);
    }
    let mut sets = Vec::new();
    for &kind in &kinds {
        sets.push(generate_dataset(kind, scale, seed)?);
    }
    if name == DatasetConfigName::Full {
        let originals = sets.clone();
        for (i, reference) in originals.iter().enumerate() {
            if kinds[i] == DatasetKind::Gr {
                continue;
            }
            let mut rng = Rng::child(seed, 100 + i as u64);
            sets.push(generate_er_matched(reference, &mut rng)?);
        }
    }
    let class_names = name.class_names();
    if sets.is_empty() {
        return Err(Error::param("dataset configuration has no classes"));
    }
    let sets = sets
        .into_iter()
        .enumerate()
        .map(|(i, s)| s.with_label(i as i64))
        .collect();
    Ok(DatasetConfig {
        name,
        class_names,
        sets,
    })
}
