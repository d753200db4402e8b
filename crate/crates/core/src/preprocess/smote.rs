//! SMOTE: minority oversampling by interpolation toward nearest minority
//! neighbours, `x_new = x + δ · (x_nn − x)` with δ ~ U[0, 1).

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, Matrix};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    pub seed: u64,
    /// Columns snapped to the nearest integer after interpolation
    /// (label-encoded categoricals).
    pub integer_columns: Vec<usize>,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            seed: rng::DEFAULT_SEED,
            integer_columns: Vec::new(),
        }
    }
}

/// Provenance of one synthetic row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticRow {
    pub base: usize,
    pub neighbor: usize,
    pub delta: f64,
}

/// Writes `base + delta * (neighbor - base)` into `out`.
fn interpolate(base: &[f64], neighbor: &[f64], delta: f64, out: &mut [f64]) {
    for ((o, b), n) in out.iter_mut().zip(base).zip(neighbor) {
        *o = b + delta * (n - b);
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// The `k` candidate rows closest to `query` (Euclidean), excluding the
/// query row itself. Ties go to the lower row index.
pub fn nearest_neighbors(x: &Matrix, candidates: &[usize], query: usize, k: usize) -> Result<Vec<usize>> {
    let q = x.row(query);
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|&&c| c != query)
        .map(|&c| (sq_dist(q, x.row(c)), c))
        .collect();
    if k > scored.len() {
        return Err(Error::KTooLarge {
            k,
            available: scored.len(),
        });
    }
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < scored.len() && k > 0 {
        scored.select_nth_unstable_by(k - 1, by_dist);
    }
    scored.truncate(k);
    scored.sort_by(by_dist);
    Ok(scored.into_iter().map(|(_, i)| i).collect())
}

pub fn smote_oversample(data: &LabeledMatrix, cfg: &SmoteConfig) -> Result<LabeledMatrix> {
    smote_trace(data, cfg).map(|(m, _)| m)
}

/// Like [`smote_oversample`], also returning where each appended row came
/// from. Synthetic rows follow the originals, which keep their order.
pub fn smote_trace(data: &LabeledMatrix, cfg: &SmoteConfig) -> Result<(LabeledMatrix, Vec<SyntheticRow>)> {
    if cfg.k_neighbors == 0 {
        return Err(Error::InvalidConfig("SMOTE needs k_neighbors >= 1".into()));
    }
    let [neg, pos] = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::DegenerateLabels);
    }
    if neg == pos {
        return Ok((data.clone(), Vec::new()));
    }
    let minority_label = u8::from(pos < neg);
    let minority: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == minority_label).collect();
    if minority.len() <= cfg.k_neighbors {
        return Err(Error::TooFewMinority {
            minority: minority.len(),
            k: cfg.k_neighbors,
        });
    }
    let needed = neg.max(pos) - minority.len();

    let neighbors: Vec<Vec<usize>> = minority
        .par_iter()
        .map(|&q| nearest_neighbors(&data.features, &minority, q, cfg.k_neighbors))
        .collect::<Result<_>>()?;

    let mut rng = rng::seeded(cfg.seed);
    let mut out = data.clone();
    let mut trace = Vec::with_capacity(needed);
    let mut row = vec![0.0; data.n_features()];
    for _ in 0..needed {
        let slot = rng.random_range(0..minority.len() * cfg.k_neighbors);
        let base = minority[slot / cfg.k_neighbors];
        let neighbor = neighbors[slot / cfg.k_neighbors][slot % cfg.k_neighbors];
        let delta: f64 = rng.random();
        interpolate(data.features.row(base), data.features.row(neighbor), delta, &mut row);
        for &j in &cfg.integer_columns {
            row[j] = row[j].round();
        }
        out.features.push_row(&row)?;
        out.labels.push(minority_label);
        trace.push(SyntheticRow { base, neighbor, delta });
    }
    Ok((out, trace))
}
