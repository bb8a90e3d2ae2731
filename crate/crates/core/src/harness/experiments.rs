//! Perturbation and ranking experiments over repeated (re)trained models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::embed_metrics::{evaluate_embeddings, EmbedMetricsConfig, DEFAULT_K};
use crate::error::{Error, Result};
use crate::generators::perturb_set;
use crate::gin::{embed, fit_features_seeded, model::GinModel, train, FeatureMode, Readout, TrainHyper};
use crate::graph::GraphSet;
use crate::harness::datasets::{build_dataset_config, DatasetConfigName, Scale};
use crate::harness::spearman::spearman_abs;
use crate::mmd::{mmd_suite, MmdConfig};
use crate::report::{MetricReport, MetricValue};
use crate::rng::{derive_seed, Rng};

pub const EMBEDDING_METRICS: [&str; 8] = [
    "fd",
    "fd_raw",
    "precision",
    "recall",
    "density",
    "coverage",
    "f1_pr",
    "f1_dc",
];
pub const MMD_METRICS: [&str; 4] = ["mmd_degree", "mmd_clustering", "mmd_orbit", "mmd_spectral"];

/// Distances rank ascending, similarity scores descending.
pub fn lower_is_better(metric: &str) -> bool {
    metric.starts_with("fd") || metric.starts_with("mmd")
}

pub fn default_levels() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub dataset_config: DatasetConfigName,
    pub scale: Scale,
    pub feature_mode: FeatureMode,
    pub readout: Readout,
    /// Skip training and embed with the random initialization.
    pub untrained: bool,
    pub train: TrainHyper,
    pub k: usize,
    pub sigma: f64,
    pub metrics: Vec<String>,
    /// Keep level 0 (the unperturbed copy) in the Spearman correlation.
    pub include_zero_level: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dataset_config: DatasetConfigName::Base,
            scale: Scale::Desk,
            feature_mode: FeatureMode::OneHotDegree,
            readout: Readout::Sum,
            untrained: false,
            train: TrainHyper::default(),
            k: DEFAULT_K,
            sigma: 1.0,
            metrics: vec!["fd".into(), "f1_pr".into(), "f1_dc".into()],
            include_zero_level: true,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.metrics.is_empty() {
            return Err(Error::param("no metrics selected"));
        }
        for m in &self.metrics {
            if !EMBEDDING_METRICS.contains(&m.as_str()) && !MMD_METRICS.contains(&m.as_str()) {
                return Err(Error::param(format!("unknown metric `{m}`")));
            }
        }
        if self.k == 0 {
            return Err(Error::param("k must be positive"));
        }
        if self.sigma.is_nan() || self.sigma <= 0.0 {
            return Err(Error::param("sigma must be positive"));
        }
        Ok(())
    }

    fn needs_embeddings(&self) -> bool {
        self.metrics.iter().any(|m| EMBEDDING_METRICS.contains(&m.as_str()))
    }

    fn embed_config(&self) -> EmbedMetricsConfig {
        let has = |names: &[&str]| self.metrics.iter().any(|m| names.contains(&m.as_str()));
        EmbedMetricsConfig {
            k: self.k,
            fd: has(&["fd", "fd_raw"]),
            prdc: has(&["precision", "recall", "density", "coverage", "f1_pr", "f1_dc"]),
        }
    }

    fn mmd_config(&self) -> Option<MmdConfig> {
        let has = |name: &str| self.metrics.iter().any(|m| m == name);
        let cfg = MmdConfig {
            sigma: self.sigma,
            degree: has("mmd_degree"),
            clustering: has("mmd_clustering"),
            orbit: has("mmd_orbit"),
            spectral: has("mmd_spectral"),
            ..MmdConfig::default()
        };
        (cfg.degree || cfg.clustering || cfg.orbit || cfg.spectral).then_some(cfg)
    }

    fn describe(&self, report: &mut MetricReport) {
        report.hyper("dataset_config", self.dataset_config.name());
        report.hyper("scale", serde_json::to_value(self.scale).unwrap_or_default());
        report.hyper(
            "feature_mode",
            serde_json::to_value(self.feature_mode).unwrap_or_default(),
        );
        report.hyper("readout", serde_json::to_value(self.readout).unwrap_or_default());
        report.hyper("trained", !self.untrained);
        report.hyper("batch_norm", false);
        report.hyper(
            "train",
            serde_json::json!({
                "epochs": self.train.epochs,
                "batch_size": self.train.batch_size,
                "learning_rate": self.train.learning_rate,
                "test_fraction": self.train.test_fraction,
                "layers": self.train.layers,
                "hidden": self.train.hidden,
            }),
        );
    }
}

/// One repetition's model and the facts worth reporting about it.
#[derive(Debug, Clone)]
pub struct PreparedModel {
    pub repetition: usize,
    pub seed: u64,
    pub model: Option<GinModel>,
    pub class_names: Vec<String>,
    pub test_accuracy: Option<f64>,
}

/// Builds the training data and (re)trains or re-instantiates the GIN for
/// every repetition. Repetition `r` uses seed `derive_seed(master, r)`.
pub fn prepare_models(pipeline: &PipelineConfig, master_seed: u64, repetitions: usize) -> Result<Vec<PreparedModel>> {
    pipeline.validate()?;
    if repetitions == 0 {
        return Err(Error::param("repetitions must be at least 1"));
    }
    (0..repetitions)
        .map(|r| {
            let seed = derive_seed(master_seed, r as u64);
            if !pipeline.needs_embeddings() {
                return Ok(PreparedModel {
                    repetition: r,
                    seed,
                    model: None,
                    class_names: Vec::new(),
                    test_accuracy: None,
                });
            }
            let data = build_dataset_config(pipeline.dataset_config, pipeline.scale, seed)
                .map_err(|e| e.in_stage("datasets"))?;
            let features = fit_features_seeded(&data.sets, pipeline.feature_mode, derive_seed(seed, 2))?;
            let (model, test_accuracy) = if pipeline.untrained {
                let m = GinModel::new(
                    features,
                    data.class_count(),
                    pipeline.train.layers,
                    pipeline.train.hidden,
                    pipeline.readout,
                    &mut Rng::child(seed, 3),
                )?;
                (m, None)
            } else {
                let hyper = TrainHyper {
                    readout: pipeline.readout,
                    seed: derive_seed(seed, 1),
                    ..pipeline.train.clone()
                };
                let outcome = train(&data.sets, &features, &hyper).map_err(|e| e.in_stage("train"))?;
                log::info!(
                    "repetition {r}: test accuracy {:.3} on {} classes",
                    outcome.final_test_accuracy(),
                    data.class_count()
                );
                let acc = outcome.final_test_accuracy();
                (outcome.model, Some(acc))
            };
            Ok(PreparedModel {
                repetition: r,
                seed,
                model: Some(model),
                class_names: data.class_names,
                test_accuracy,
            })
        })
        .collect()
}

/// Compares `reference` and `candidate` with every enabled metric.
fn compare(
    reference: &GraphSet,
    reference_name: &str,
    candidate: &GraphSet,
    candidate_name: &str,
    prepared: &PreparedModel,
    pipeline: &PipelineConfig,
) -> Result<MetricReport> {
    let mut report = MetricReport::new(reference_name, candidate_name);
    pipeline.describe(&mut report);
    report.seeds.insert("repetition".into(), prepared.seed);
    if let Some(model) = &prepared.model {
        let embed_seed = derive_seed(prepared.seed, 4);
        let real = embed(model, reference, embed_seed).map_err(|e| e.in_stage("embed"))?;
        let gen = embed(model, candidate, derive_seed(embed_seed, 1)).map_err(|e| e.in_stage("embed"))?;
        evaluate_embeddings(&real, &gen, &pipeline.embed_config(), &mut report)
            .map_err(|e| e.in_stage("embedding metrics"))?;
        report.hyper(
            "degree_vocab",
            serde_json::to_value(&model.feature_config.degree_vocab).unwrap_or_default(),
        );
        report.hyper(
            "classes",
            serde_json::to_value(&prepared.class_names).unwrap_or_default(),
        );
        if let Some(acc) = prepared.test_accuracy {
            report.hyper("test_accuracy", acc);
        }
    }
    if let Some(cfg) = pipeline.mmd_config() {
        let m = mmd_suite(reference, candidate, &cfg).map_err(|e| e.in_stage("mmd"))?;
        for (k, v) in m.metrics {
            report.metrics.insert(k, v);
        }
        for (k, v) in m.hyper {
            report.hyper.insert(k, v);
        }
    }
    report.metrics.retain(|name, _| pipeline.metrics.contains(name));
    Ok(report)
}

/// Candidate order and rank statistics for one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRanking {
    /// Candidates ordered best first by the mean value.
    pub order: Vec<String>,
    /// Best-first order within each repetition.
    pub repetition_orders: Vec<Vec<String>>,
    /// Mean 1-based rank of each candidate over repetitions.
    pub mean_rank: BTreeMap<String, f64>,
    /// `|rho|` against the ground-truth order, per repetition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman: Option<MetricValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub experiment: String,
    pub reference: String,
    pub candidates: Vec<String>,
    pub metrics: BTreeMap<String, MetricRanking>,
    pub repetitions: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

fn best_first(values: &[f64], metric: &str) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        let ord = values[a].total_cmp(&values[b]);
        let ord = if lower_is_better(metric) { ord } else { ord.reverse() };
        ord.then(a.cmp(&b))
    });
    idx
}

/// `per_rep[r][c]` holds candidate `c`'s value in repetition `r`.
fn rank_metric(
    metric: &str,
    names: &[String],
    per_rep: &[Vec<f64>],
    truth: Option<&[f64]>,
) -> Result<(MetricRanking, bool)> {
    let reps = per_rep.len();
    let mut mean_rank = vec![0.0; names.len()];
    let mut repetition_orders = Vec::with_capacity(reps);
    let mut rhos = Vec::new();
    let mut degenerate = false;
    for values in per_rep {
        let order = best_first(values, metric);
        for (pos, &c) in order.iter().enumerate() {
            mean_rank[c] += (pos + 1) as f64 / reps as f64;
        }
        repetition_orders.push(order.iter().map(|&c| names[c].clone()).collect());
        if let Some(t) = truth {
            let s = spearman_abs(t, values)?;
            degenerate |= s.degenerate;
            rhos.push(s.value);
        }
    }
    let means: Vec<f64> = (0..names.len())
        .map(|c| per_rep.iter().map(|v| v[c]).sum::<f64>() / reps as f64)
        .collect();
    let order = best_first(&means, metric)
        .into_iter()
        .map(|c| names[c].clone())
        .collect();
    Ok((
        MetricRanking {
            order,
            repetition_orders,
            mean_rank: names.iter().cloned().zip(mean_rank).collect(),
            spearman: truth.map(|_| MetricValue::from_runs(rhos)),
        },
        degenerate,
    ))
}

fn rankings(
    experiment: &str,
    reference: &str,
    names: &[String],
    reports: &[Vec<MetricReport>],
    metrics: &[String],
    truth: Option<&[f64]>,
    truth_mask: Option<&[bool]>,
) -> Result<RankingResult> {
    let mut out = RankingResult {
        experiment: experiment.into(),
        reference: reference.into(),
        candidates: names.to_vec(),
        metrics: BTreeMap::new(),
        repetitions: reports.len(),
        flags: Vec::new(),
    };
    let keep: Vec<usize> = (0..names.len()).filter(|&c| truth_mask.is_none_or(|m| m[c])).collect();
    for metric in metrics {
        let per_rep: Vec<Vec<f64>> = reports
            .iter()
            .map(|rep| {
                rep.iter()
                    .map(|r| {
                        r.value(metric)
                            .ok_or_else(|| Error::param(format!("metric `{metric}` missing")))
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        let (ranking, degenerate) = match truth {
            Some(t) => {
                // Spearman over the selected levels only; orders over all.
                let t_sel: Vec<f64> = keep.iter().map(|&c| t[c]).collect();
                let sel: Vec<Vec<f64>> = per_rep.iter().map(|v| keep.iter().map(|&c| v[c]).collect()).collect();
                let sel_names: Vec<String> = keep.iter().map(|&c| names[c].clone()).collect();
                let (with_rho, degenerate) = rank_metric(metric, &sel_names, &sel, Some(&t_sel))?;
                let (mut all, _) = rank_metric(metric, names, &per_rep, None)?;
                all.spearman = with_rho.spearman;
                (all, degenerate)
            }
            None => rank_metric(metric, names, &per_rep, None)?,
        };
        if degenerate {
            out.flags.push(format!(
                "{metric}: spearman undefined (constant sequence), reported as 0"
            ));
        }
        out.metrics.insert(metric.clone(), ranking);
    }
    Ok(out)
}

/// Output of [`perturbation_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub levels: Vec<f64>,
    pub ranking: RankingResult,
    /// One aggregated report per level.
    pub reports: Vec<MetricReport>,
}

pub fn level_name(level: f64) -> String {
    format!("perturbed-{level:.2}")
}

/// Compares `reference` against rewired copies at each level and scores
/// every metric by `|Spearman|` against the level.
pub fn perturbation_experiment(
    reference: &GraphSet,
    levels: &[f64],
    pipeline: &PipelineConfig,
    repetitions: usize,
    master_seed: u64,
) -> Result<PerturbationResult> {
    let models = prepare_models(pipeline, master_seed, repetitions)?;
    perturbation_experiment_with(reference, levels, pipeline, &models)
}

pub fn perturbation_experiment_with(
    reference: &GraphSet,
    levels: &[f64],
    pipeline: &PipelineConfig,
    models: &[PreparedModel],
) -> Result<PerturbationResult> {
    pipeline.validate()?;
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("levels must be non-empty and strictly increasing"));
    }
    if levels[0] != 0.0 {
        return Err(Error::param("levels must include 0"));
    }
    if models.is_empty() {
        return Err(Error::param("repetitions must be at least 1"));
    }
    let names: Vec<String> = levels.iter().map(|&l| level_name(l)).collect();
    let mut per_rep = Vec::with_capacity(models.len());
    for prepared in models {
        let mut reports = Vec::with_capacity(levels.len());
        for (i, &level) in levels.iter().enumerate() {
            let mut rng = Rng::child(prepared.seed, 1000 + i as u64);
            let copy = perturb_set(reference, level, &mut rng).map_err(|e| e.in_stage("perturb"))?;
            let mut report = compare(reference, "reference", &copy, &names[i], prepared, pipeline)?;
            report.hyper("perturbation_level", level);
            reports.push(report);
        }
        per_rep.push(reports);
    }
    let mask: Vec<bool> = levels
        .iter()
        .map(|&l| pipeline.include_zero_level || l != 0.0)
        .collect();
    let mut ranking = rankings(
        "perturbation",
        "reference",
        &names,
        &per_rep,
        &pipeline.metrics,
        Some(levels),
        Some(&mask),
    )?;
    if mask.iter().filter(|&&m| m).count() < 2 {
        ranking
            .flags
            .push("fewer than two levels: spearman undefined, reported as 0".into());
    }
    ranking.flags.sort();
    ranking.flags.dedup();
    let reports = (0..levels.len())
        .map(|i| {
            let reps: Vec<MetricReport> = per_rep.iter().map(|r| r[i].clone()).collect();
            MetricReport::aggregate(&reps).expect("at least one repetition")
        })
        .collect();
    Ok(PerturbationResult {
        levels: levels.to_vec(),
        ranking,
        reports,
    })
}

/// Output of [`ranking_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingOutcome {
    pub ranking: RankingResult,
    pub reports: Vec<MetricReport>,
}

/// Orders named candidate sets by their similarity to `reference`.
pub fn ranking_experiment(
    reference: &GraphSet,
    candidates: &[(String, GraphSet)],
    pipeline: &PipelineConfig,
    repetitions: usize,
    master_seed: u64,
) -> Result<RankingOutcome> {
    let models = prepare_models(pipeline, master_seed, repetitions)?;
    ranking_experiment_with(reference, candidates, pipeline, &models)
}

pub fn ranking_experiment_with(
    reference: &GraphSet,
    candidates: &[(String, GraphSet)],
    pipeline: &PipelineConfig,
    models: &[PreparedModel],
) -> Result<RankingOutcome> {
    pipeline.validate()?;
    if candidates.len() < 2 {
        return Err(Error::param("ranking needs at least two candidates"));
    }
    if models.is_empty() {
        return Err(Error::param("repetitions must be at least 1"));
    }
    let names: Vec<String> = candidates.iter().map(|(n, _)| n.clone()).collect();
    let mut per_rep = Vec::with_capacity(models.len());
    for prepared in models {
        let reports = candidates
            .iter()
            .map(|(name, set)| compare(reference, "reference", set, name, prepared, pipeline))
            .collect::<Result<Vec<_>>>()?;
        per_rep.push(reports);
    }
    let ranking = rankings("ranking", "reference", &names, &per_rep, &pipeline.metrics, None, None)?;
    let reports = (0..names.len())
        .map(|i| {
            let reps: Vec<MetricReport> = per_rep.iter().map(|r| r[i].clone()).collect();
            MetricReport::aggregate(&reps).expect("at least one repetition")
        })
        .collect();
    Ok(RankingOutcome { ranking, reports })
}
