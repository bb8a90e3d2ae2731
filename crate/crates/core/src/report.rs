//! Metric reports with full hyperparameter provenance.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// One metric over `runs.len()` repetitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub mean: f64,
    /// Sample standard deviation (N - 1); absent for a single run.
    pub std: Option<f64>,
    pub runs: Vec<f64>,
}

impl MetricValue {
    pub fn from_runs(runs: Vec<f64>) -> Self {
        let n = runs.len();
        let mean = runs.iter().sum::<f64>() / n.max(1) as f64;
        let std = (n >= 2).then(|| {
            let ss: f64 = runs.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        });
        MetricValue { mean, std, runs }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub reference: String,
    pub candidate: String,
    pub metrics: BTreeMap<String, MetricValue>,
    pub hyper: BTreeMap<String, serde_json::Value>,
    pub seeds: BTreeMap<String, u64>,
    pub repetitions: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl MetricReport {
    pub fn new(reference: &str, candidate: &str) -> Self {
        MetricReport {
            reference: reference.to_string(),
            candidate: candidate.to_string(),
            metrics: BTreeMap::new(),
            hyper: BTreeMap::new(),
            seeds: BTreeMap::new(),
            repetitions: 1,
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.metrics
            .insert(name.to_string(), MetricValue::from_runs(vec![value]));
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).map(|m| m.mean)
    }

    pub fn hyper(&mut self, key: &str, value: impl Into<serde_json::Value>) {
        self.hyper.insert(key.to_string(), value.into());
    }

    /// Merges per-repetition reports of one comparison. Hyperparameters come
    /// from the first report; seeds are suffixed by repetition index.
    pub fn aggregate(reports: &[MetricReport]) -> Option<MetricReport> {
        let first = reports.first()?;
        let mut out = MetricReport::new(&first.reference, &first.candidate);
        out.hyper = first.hyper.clone();
        out.repetitions = reports.len();
        for name in first.metrics.keys() {
            let runs: Vec<f64> = reports
                .iter()
                .filter_map(|r| r.metrics.get(name))
                .flat_map(|m| m.runs.iter().copied())
                .collect();
            out.metrics.insert(name.clone(), MetricValue::from_runs(runs));
        }
        for (i, r) in reports.iter().enumerate() {
            for (k, v) in &r.seeds {
                out.seeds.insert(format!("{k}[{i}]"), *v);
            }
            out.notes.extend(r.notes.iter().cloned());
        }
        out.notes.sort();
        out.notes.dedup();
        Some(out)
    }
}
