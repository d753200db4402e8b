//! Bagged ensembles of CART trees: random forests and extremely
//! randomized trees.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::params::ForestParams;
use super::tree::{build_cart_weighted, CartParams, ClassTree, ThresholdRule};
use crate::matrix::Matrix;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForestKind {
    /// Bootstrap resample per tree, best threshold per candidate feature.
    RandomForest,
    /// All rows per tree, one random threshold per candidate feature.
    ExtraTrees,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub kind: ForestKind,
    pub trees: Vec<ClassTree>,
}

impl Forest {
    /// Number of trees whose leaf says positive.
    pub fn positive_votes(&self, x: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict_proba(x) >= 0.5).count()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        self.positive_votes(x) as f64 / self.trees.len() as f64
    }
}

/// Bootstrap multiplicities: `n` draws with replacement from `0..n`.
pub(crate) fn bootstrap_weights(n: usize, rng: &mut rng::Rng) -> Vec<f64> {
    let mut w = vec![0.0; n];
    for _ in 0..n {
        w[rng.random_range(0..n)] += 1.0;
    }
    w
}

/// Trains one tree per index in parallel; tree `t` uses the stream
/// `(seed, t)` so the forest does not depend on the thread count.
pub fn train_forest(x: &Matrix, y: &[u8], kind: ForestKind, params: &ForestParams, seed: u64) -> Forest {
    let n = x.n_rows();
    let cart = CartParams {
        constraints: params.constraints(),
        max_features: params.max_features,
        rule: match kind {
            ForestKind::RandomForest => ThresholdRule::Best,
            ForestKind::ExtraTrees => ThresholdRule::Random,
        },
    };
    let trees = (0..params.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(seed, t as u64);
            let (w, rows) = match kind {
                ForestKind::RandomForest => {
                    let w = bootstrap_weights(n, &mut r);
                    let rows = (0..n).filter(|&i| w[i] > 0.0).collect();
                    (w, rows)
                }
                ForestKind::ExtraTrees => (vec![1.0; n], (0..n).collect()),
            };
            build_cart_weighted(x, y, &w, rows, &cart, &mut r)
        })
        .collect();
    Forest { kind, trees }
}
