//! Metrics over embedding matrices: Fréchet distance and manifold
//! precision, recall, density and coverage.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gin::EmbeddingMatrix;
use crate::linalg::{singular_values, symmetric_eigen, Matrix};
use crate::report::MetricReport;

pub const DEFAULT_K: usize = 5;
/// Regularize when the smallest covariance eigenvalue is below this.
pub const REGULARIZATION_THRESHOLD: f64 = 1e-10;
/// Ridge size relative to the mean eigenvalue `Tr(C) / d`.
pub const REGULARIZATION_SCALE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSummary {
    pub mean: Vec<f64>,
    pub covariance: Matrix,
}

/// Sample mean and the `1/(N-1)` covariance (two-pass).
pub fn gaussian_summary(e: &EmbeddingMatrix) -> Result<GaussianSummary> {
    let n = e.len();
    if n < 2 {
        return Err(Error::param("a Gaussian summary needs at least two embeddings"));
    }
    let d = e.dim();
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, x) in mean.iter_mut().zip(e.row(i)) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centered: Vec<Vec<f64>> = (0..n)
        .map(|i| e.row(i).iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let lower: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|a| {
            (0..=a)
                .map(|b| {
                    let mut s = 0.0;
                    for row in &centered {
                        s += row[a] * row[b];
                    }
                    s / (n - 1) as f64
                })
                .collect()
        })
        .collect();
    let mut covariance = Matrix::zeros(d, d);
    for (a, row) in lower.iter().enumerate() {
        for (b, &v) in row.iter().enumerate() {
            covariance[(a, b)] = v;
            covariance[(b, a)] = v;
        }
    }
    Ok(GaussianSummary { mean, covariance })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetDistance {
    /// May be slightly negative from cancellation.
    pub raw: f64,
    /// `max(raw, 0)`.
    pub clamped: f64,
    /// Ridge added to each covariance (0 when none was needed).
    pub ridge_a: f64,
    pub ridge_b: f64,
}

struct Prepared {
    values: Vec<f64>,
    vectors: Matrix,
    ridge: f64,
}

fn prepare(c: &Matrix) -> Result<Prepared> {
    let eig = symmetric_eigen(c)?;
    let d = c.rows();
    let min = eig.values.first().copied().unwrap_or(0.0);
    let ridge = if d > 0 && min < REGULARIZATION_THRESHOLD {
        (REGULARIZATION_SCALE * c.trace() / d as f64).max(0.0)
    } else {
        0.0
    };
    // Adding a multiple of the identity shifts eigenvalues and keeps vectors.
    let values = eig.values.iter().map(|&l| (l + ridge).max(0.0)).collect();
    Ok(Prepared {
        values,
        vectors: eig.vectors,
        ridge,
    })
}

/// `V Λ^{1/2}`, a square-root factor of the prepared covariance.
fn scaled_columns(p: &Prepared) -> Matrix {
    let mut out = p.vectors.clone();
    let d = p.values.len();
    for r in 0..out.rows() {
        for c in 0..d {
            out[(r, c)] *= p.values[c].sqrt();
        }
    }
    out
}

/// `‖m_a − m_b‖² + Tr(C_a) + Tr(C_b) − 2 Tr((C_a^{1/2} C_b C_a^{1/2})^{1/2})`.
///
/// The cross term is taken as the sum of singular values of
/// `Λ_b^{1/2} V_bᵀ V_a Λ_a^{1/2}`, which keeps tiny eigenvalues from losing
/// half their digits to a square root.
pub fn frechet_distance(a: &GaussianSummary, b: &GaussianSummary) -> Result<FrechetDistance> {
    let d = a.mean.len();
    if b.mean.len() != d || a.covariance.rows() != d || b.covariance.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "Gaussian summaries of dimension {d} and {}",
            b.mean.len()
        )));
    }
    let pa = prepare(&a.covariance)?;
    let pb = prepare(&b.covariance)?;
    // Tr((C_a^{1/2} C_b C_a^{1/2})^{1/2}) is the nuclear norm of C_b^{1/2} C_a^{1/2}.
    let factor_a = scaled_columns(&pa);
    let factor_b = scaled_columns(&pb);
    let cross: f64 = singular_values(&factor_b.transpose().matmul(&factor_a))?.iter().sum();
    let mean_term: f64 = a.mean.iter().zip(&b.mean).map(|(x, y)| (x - y) * (x - y)).sum();
    let trace_a = a.covariance.trace() + d as f64 * pa.ridge;
    let trace_b = b.covariance.trace() + d as f64 * pb.ridge;
    let raw = mean_term + trace_a + trace_b - 2.0 * cross;
    if !raw.is_finite() {
        return Err(Error::Numerical("Fréchet distance is not finite".into()));
    }
    Ok(FrechetDistance {
        raw,
        clamped: raw.max(0.0),
        ridge_a: pa.ridge,
        ridge_b: pb.ridge,
    })
}

/// Euclidean distance, summed in index order.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        let t = x - y;
        s += t * t;
    }
    s.sqrt()
}

/// Balls around every point with radius equal to the distance to the k-th
/// nearest other point.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldIndex {
    pub points: Matrix,
    pub k: usize,
    pub radii: Vec<f64>,
}

pub fn build_manifold(e: &EmbeddingMatrix, k: usize) -> Result<ManifoldIndex> {
    let n = e.len();
    if k == 0 || n <= k {
        return Err(Error::param(format!("manifold needs N > k >= 1 (N = {n}, k = {k})")));
    }
    let radii = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dist: Vec<f64> = (0..n)
                .filter(|&j| j != i)
                .map(|j| euclidean(e.row(i), e.row(j)))
                .collect();
            dist.select_nth_unstable_by(k - 1, f64::total_cmp);
            dist[k - 1]
        })
        .collect();
    Ok(ManifoldIndex {
        points: e.rows.clone(),
        k,
        radii,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prdc {
    pub precision: f64,
    pub recall: f64,
    pub density: f64,
    pub coverage: f64,
}

/// Ball membership is boundary-inclusive (`distance <= radius`).
pub fn prdc(real: &EmbeddingMatrix, gen: &EmbeddingMatrix, k: usize) -> Result<Prdc> {
    if real.dim() != gen.dim() {
        return Err(Error::DimensionMismatch(format!(
            "real embeddings have dimension {}, generated {}",
            real.dim(),
            gen.dim()
        )));
    }
    let rm = build_manifold(real, k)?;
    let gm = build_manifold(gen, k)?;
    let (nr, ng) = (real.len(), gen.len());
    // dist[j][i] between gen j and real i
    let dist: Vec<Vec<f64>> = (0..ng)
        .into_par_iter()
        .map(|j| (0..nr).map(|i| euclidean(gen.row(j), real.row(i))).collect())
        .collect();
    let mut precise = 0usize;
    let mut density_hits = 0usize;
    let mut covered = vec![false; nr];
    let mut recalled = vec![false; nr];
    for (j, row) in dist.iter().enumerate() {
        let mut inside = false;
        for (i, &dji) in row.iter().enumerate() {
            if dji <= rm.radii[i] {
                inside = true;
                density_hits += 1;
                covered[i] = true;
            }
            if dji <= gm.radii[j] {
                recalled[i] = true;
            }
        }
        if inside {
            precise += 1;
        }
    }
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64;
    Ok(Prdc {
        precision: precise as f64 / ng as f64,
        recall: count(&recalled) / nr as f64,
        density: density_hits as f64 / (k * ng) as f64,
        coverage: count(&covered) / nr as f64,
    })
}

/// Harmonic mean, 0 when both inputs are 0.
pub fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedMetricsConfig {
    pub k: usize,
    pub fd: bool,
    pub prdc: bool,
}

impl Default for EmbedMetricsConfig {
    fn default() -> Self {
        EmbedMetricsConfig {
            k: DEFAULT_K,
            fd: true,
            prdc: true,
        }
    }
}

/// FD, PRDC and both F1 scores into one report.
pub fn evaluate_embeddings(
    real: &EmbeddingMatrix,
    gen: &EmbeddingMatrix,
    config: &EmbedMetricsConfig,
    report: &mut MetricReport,
) -> Result<()> {
    report.hyper("k", config.k as u64);
    report.hyper("prdc_boundary", "inclusive");
    if config.fd {
        let fd = frechet_distance(&gaussian_summary(real)?, &gaussian_summary(gen)?)?;
        report.set("fd", fd.clamped);
        report.set("fd_raw", fd.raw);
        if fd.ridge_a > 0.0 || fd.ridge_b > 0.0 {
            report.hyper("fd_ridge_real", fd.ridge_a);
            report.hyper("fd_ridge_gen", fd.ridge_b);
        }
    }
    if config.prdc {
        let m = prdc(real, gen, config.k)?;
        report.set("precision", m.precision);
        report.set("recall", m.recall);
        report.set("density", m.density);
        report.set("coverage", m.coverage);
        report.set("f1_pr", f1(m.precision, m.recall));
        report.set("f1_dc", f1(m.density, m.coverage));
    }
    Ok(())
}
