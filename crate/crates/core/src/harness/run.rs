//! Config-file driven end-to-end runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{generate_er_matched, perturb_set};
use crate::gin::{FeatureMode, Readout, MODEL_VERSION};
use crate::graph::GraphSet;
use crate::harness::datasets::{generate_dataset, resample_dataset, DatasetConfigName, DatasetKind, Scale};
use crate::harness::experiments::{
    default_levels, perturbation_experiment_with, prepare_models, ranking_experiment_with, PerturbationResult,
    PipelineConfig, RankingOutcome,
};
use crate::io::{read_graphset, write_atomic, write_json};
use crate::report::MetricReport;
use crate::rng::{derive_seed, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Perturbation,
    Ranking,
}

/// An external graph file used as an extra ranking candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedConfig {
    pub master: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Extra candidate sets, e.g. samples of a trained generator.
    pub datasets: Vec<DatasetSpec>,
    /// Dataset the experiments compare against.
    pub reference: DatasetKind,
    pub feature_mode: FeatureMode,
    pub readout: Readout,
    pub dataset_config: DatasetConfigName,
    pub metrics: Vec<String>,
    pub levels: Vec<f64>,
    pub repetitions: usize,
    pub seeds: SeedConfig,
    pub k: usize,
    pub sigma: f64,
    pub desk_scale: bool,
    pub experiments: Vec<ExperimentKind>,
    pub untrained: bool,
    pub include_zero_level: bool,
    pub epochs: Option<usize>,
    pub csv: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        RunConfig {
            datasets: Vec::new(),
            reference: DatasetKind::Gr,
            feature_mode: p.feature_mode,
            readout: p.readout,
            dataset_config: p.dataset_config,
            metrics: p.metrics,
            levels: default_levels(),
            repetitions: 1,
            seeds: SeedConfig::default(),
            k: p.k,
            sigma: p.sigma,
            desk_scale: true,
            experiments: vec![ExperimentKind::Perturbation, ExperimentKind::Ranking],
            untrained: false,
            include_zero_level: true,
            epochs: None,
            csv: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: e.to_string(),
        })
    }

    pub fn scale(&self) -> Scale {
        if self.desk_scale {
            Scale::Desk
        } else {
            Scale::Large
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        let mut p = PipelineConfig {
            dataset_config: self.dataset_config,
            scale: self.scale(),
            feature_mode: self.feature_mode,
            readout: self.readout,
            untrained: self.untrained,
            k: self.k,
            sigma: self.sigma,
            metrics: self.metrics.clone(),
            include_zero_level: self.include_zero_level,
            ..PipelineConfig::default()
        };
        if let Some(e) = self.epochs {
            p.train.epochs = e;
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline().validate()?;
        if self.repetitions == 0 {
            return Err(Error::param("repetitions must be at least 1"));
        }
        if self.experiments.is_empty() {
            return Err(Error::param("no experiments selected"));
        }
        if self.experiments.contains(&ExperimentKind::Perturbation)
            && (self.levels.first() != Some(&0.0) || self.levels.windows(2).any(|w| w[0] >= w[1]))
        {
            return Err(Error::param("levels must start at 0 and increase strictly"));
        }
        if self.levels.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::param("levels must lie in [0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub model_file_version: u32,
    pub config: RunConfig,
    pub master_seed: u64,
    pub repetition_seeds: Vec<u64>,
    pub dataset_config: String,
    pub classes: Vec<String>,
    pub class_count: usize,
    pub test_accuracy: Vec<f64>,
    pub stages: Vec<StageRecord>,
    pub reports: Vec<String>,
    pub notes: Vec<String>,
}

/// Shipped ranking scenario: an independent resample, 10% and 50%
/// perturbations and a matched ER baseline, in expected best-first order.
pub fn default_candidates(
    reference: &GraphSet,
    kind: DatasetKind,
    scale: Scale,
    seed: u64,
) -> Result<Vec<(String, GraphSet)>> {
    Ok(vec![
        (
            "resampled".into(),
            resample_dataset(kind, scale, derive_seed(seed, 200))?,
        ),
        (
            "perturbed-0.10".into(),
            perturb_set(reference, 0.1, &mut Rng::child(seed, 201))?,
        ),
        (
            "perturbed-0.50".into(),
            perturb_set(reference, 0.5, &mut Rng::child(seed, 202))?,
        ),
        (
            "matched-er".into(),
            generate_er_matched(reference, &mut Rng::child(seed, 203))?,
        ),
    ])
}

struct Runner {
    out_dir: PathBuf,
    manifest: Manifest,
}

impl Runner {
    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        match f(self) {
            Ok(v) => {
                self.manifest.stages.push(StageRecord {
                    stage: name.into(),
                    status: "ok".into(),
                    error: None,
                });
                Ok(v)
            }
            Err(e) => {
                let e = match e {
                    Error::Stage { .. } => e,
                    other => other.in_stage(name),
                };
                self.manifest.stages.push(StageRecord {
                    stage: name.into(),
                    status: "failed".into(),
                    error: Some(e.to_string()),
                });
                let _ = self.write_manifest();
                Err(e)
            }
        }
    }

    fn write_report<T: Serialize>(&mut self, file: &str, value: &T) -> Result<()> {
        write_json(&self.out_dir.join("reports").join(file), value)?;
        self.manifest.reports.push(format!("reports/{file}"));
        Ok(())
    }

    fn write_csv(&mut self, file: &str, text: String) -> Result<()> {
        write_atomic(&self.out_dir.join("reports").join(file), text.as_bytes())?;
        self.manifest.reports.push(format!("reports/{file}"));
        Ok(())
    }

    fn write_manifest(&self) -> Result<()> {
        write_json(&self.out_dir.join("manifest.json"), &self.manifest)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn reports_csv(reports: &[MetricReport], key: impl Fn(&MetricReport) -> String) -> String {
    let mut out = String::from("candidate,metric,mean,std\n");
    for r in reports {
        for (name, v) in &r.metrics {
            out.push_str(&format!("{},{name},{:e},{}\n", key(r), v.mean, fmt_opt(v.std)));
        }
    }
    out
}

/// Everything written by [`run_config`].
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub manifest: Manifest,
    pub perturbation: Option<PerturbationResult>,
    pub ranking: Option<RankingOutcome>,
}

/// Generates data, trains, runs the selected experiments and writes
/// `reports/*.json`, optional CSV files and `manifest.json` under `out_dir`.
pub fn run_config(config: &RunConfig, out_dir: &Path) -> Result<RunOutput> {
    config.validate()?;
    let master = config.seeds.master;
    let pipeline = config.pipeline();
    let mut runner = Runner {
        out_dir: out_dir.to_path_buf(),
        manifest: Manifest {
            tool: "ggeval".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            model_file_version: MODEL_VERSION,
            config: config.clone(),
            master_seed: master,
            repetition_seeds: (0..config.repetitions).map(|r| derive_seed(master, r as u64)).collect(),
            dataset_config: config.dataset_config.name().into(),
            classes: config.dataset_config.class_names(),
            class_count: config.dataset_config.class_names().len(),
            test_accuracy: Vec::new(),
            stages: Vec::new(),
            reports: Vec::new(),
            notes: vec!["GIN without batch normalization".into()],
        },
    };
    std::fs::create_dir_all(out_dir.join("reports")).map_err(|e| Error::io(out_dir, e))?;

    let reference = runner.stage("reference", |_| {
        generate_dataset(config.reference, config.scale(), master)
    })?;
    let models = runner.stage("train", |_| prepare_models(&pipeline, master, config.repetitions))?;
    runner.manifest.test_accuracy = models.iter().filter_map(|m| m.test_accuracy).collect();

    let mut output = RunOutput {
        manifest: runner.manifest.clone(),
        perturbation: None,
        ranking: None,
    };
    if config.experiments.contains(&ExperimentKind::Perturbation) {
        let result = runner.stage("perturbation", |_| {
            perturbation_experiment_with(&reference, &config.levels, &pipeline, &models)
        })?;
        runner.stage("write perturbation", |r| {
            r.write_report("perturbation.json", &result)?;
            if config.csv {
                let csv = reports_csv(&result.reports, |m| {
                    m.hyper
                        .get("perturbation_level")
                        .map(|v| v.to_string())
                        .unwrap_or_default()
                });
                r.write_csv("perturbation.csv", csv)?;
            }
            Ok(())
        })?;
        output.perturbation = Some(result);
    }
    if config.experiments.contains(&ExperimentKind::Ranking) {
        let candidates = runner.stage("candidates", |_| {
            let mut c = default_candidates(&reference, config.reference, config.scale(), master)?;
            for spec in &config.datasets {
                c.push((spec.name.clone(), read_graphset(&spec.path)?));
            }
            Ok(c)
        })?;
        let result = runner.stage("ranking", |_| {
            ranking_experiment_with(&reference, &candidates, &pipeline, &models)
        })?;
        runner.stage("write ranking", |r| {
            r.write_report("ranking.json", &result)?;
            if config.csv {
                r.write_csv("ranking.csv", reports_csv(&result.reports, |m| m.candidate.clone()))?;
            }
            Ok(())
        })?;
        output.ranking = Some(result);
    }
    runner.write_manifest()?;
    output.manifest = runner.manifest;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_unknown_fields() {
        let c = RunConfig::from_json(r#"{"dataset_config": "full", "metrics": ["mmd_degree"]}"#).unwrap();
        assert_eq!(c.dataset_config, DatasetConfigName::Full);
        assert_eq!(c.levels.len(), 11);
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
        let bad = RunConfig::from_json(r#"{"metrics": ["nope"]}"#).unwrap();
        assert!(bad.validate().is_err());
    }
}
