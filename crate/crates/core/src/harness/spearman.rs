use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spearman {
    /// `|rho|`, or 0 when undefined.
    pub value: f64,
    /// Set when one side is constant and the coefficient is undefined.
    pub degenerate: bool,
}

/// Ranks starting at 1; tied values share their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Absolute Spearman correlation: Pearson correlation of average ranks.
pub fn spearman_abs(x: &[f64], y: &[f64]) -> Result<Spearman> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "spearman inputs have lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Numerical("spearman input contains NaN".into()));
    }
    if x.len() < 2 {
        return Ok(Spearman {
            value: 0.0,
            degenerate: true,
        });
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let mean = (x.len() + 1) as f64 / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        let (da, db) = (a - mean, b - mean);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        log::warn!("spearman correlation undefined for a constant sequence; reporting 0");
        return Ok(Spearman {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(Spearman {
        value: (sxy / (sxx * syy).sqrt()).abs().min(1.0),
        degenerate: false,
    })
}
