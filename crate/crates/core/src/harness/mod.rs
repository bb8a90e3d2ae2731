//! Experiment protocols: dataset configurations, perturbation scoring,
//! candidate ranking and config-driven runs.

pub mod datasets;
pub mod experiments;
pub mod run;
pub mod spearman;

pub use datasets::{
    build_dataset_config, generate_dataset, resample_dataset, DatasetConfig, DatasetConfigName, DatasetKind, Scale,
};
pub use experiments::{
    perturbation_experiment, perturbation_experiment_with, prepare_models, ranking_experiment, ranking_experiment_with,
    PerturbationResult, PipelineConfig, PreparedModel, RankingOutcome, RankingResult,
};
pub use run::{default_candidates, run_config, RunConfig};
pub use spearman::{spearman_abs, Spearman};
