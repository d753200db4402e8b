use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::Classifier;
use crate::matrix::LabeledMatrix;
use crate::model::ModelSpec;
use crate::preprocess::{smote_oversample, SmoteConfig};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub k: usize,
    pub repetitions: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            k: 5,
            repetitions: 5,
            seed: rng::DEFAULT_SEED,
        }
    }
}

/// Shuffles `0..n` and cuts it into `k` folds whose sizes differ by at most
/// one; each fold is sorted ascending.
pub fn kfold_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        let mut fold = order[start..start + len].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        start += len;
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvFold {
    pub repetition: usize,
    pub fold: usize,
    pub accuracy: f64,
    /// Rows of the input data held out in this fold.
    pub test_indices: Vec<usize>,
    pub train_rows: usize,
    /// Synthetic rows SMOTE appended to the training part.
    pub synthetic_rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub config: CvConfig,
    /// `grid[repetition][fold]` accuracies.
    pub grid: Vec<Vec<f64>>,
    pub mean: f64,
    pub folds: Vec<CvFold>,
}

impl CvResult {
    /// `repetition,fold,accuracy` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("repetition,fold,accuracy\n");
        for (r, row) in self.grid.iter().enumerate() {
            for (f, acc) in row.iter().enumerate() {
                s.push_str(&format!("{},{},{}\n", r + 1, f + 1, acc));
            }
        }
        s
    }
}

fn run_fold(
    spec: &ModelSpec,
    data: &LabeledMatrix,
    folds: &[Vec<usize>],
    (repetition, fold): (usize, usize),
    rep_seed: u64,
    smote: Option<&SmoteConfig>,
) -> Result<CvFold> {
    let test_idx = &folds[fold];
    let train_idx: Vec<usize> = folds
        .iter()
        .enumerate()
        .filter(|(f, _)| *f != fold)
        .flat_map(|(_, idx)| idx.iter().copied())
        .collect();
    let fold_seed = rng::derive_seed(rep_seed, fold as u64);
    let train = data.select(&train_idx);
    let train = match smote {
        Some(cfg) => smote_oversample(
            &train,
            &SmoteConfig {
                seed: fold_seed,
                ..cfg.clone()
            },
        )?,
        None => train,
    };
    let model = spec.fit(&train, fold_seed)?;
    let test = data.select(test_idx);
    let predicted = model.predict_labels(&test.features)?;
    let hits = predicted.iter().zip(&test.labels).filter(|(p, t)| p == t).count();
    Ok(CvFold {
        repetition,
        fold,
        accuracy: hits as f64 / test.len() as f64,
        test_indices: test_idx.clone(),
        train_rows: train.len(),
        synthetic_rows: train.len() - train_idx.len(),
    })
}

/// Repeated k-fold cross-validation. Each repetition reshuffles; each fold
/// balances its training part with SMOTE (when configured), fits `spec`, and
/// scores accuracy on the untouched held-out rows. Folds run in parallel
/// with seeds derived from `(seed, repetition, fold)`.
pub fn repeated_cv(
    spec: &ModelSpec,
    data: &LabeledMatrix,
    cfg: &CvConfig,
    smote: Option<&SmoteConfig>,
) -> Result<CvResult> {
    if cfg.repetitions == 0 {
        return Err(Error::InvalidConfig("cv repetitions must be >= 1".into()));
    }
    let [neg, pos] = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::DegenerateLabels);
    }
    let rep_seeds: Vec<u64> = (0..cfg.repetitions)
        .map(|r| rng::derive_seed(cfg.seed, r as u64))
        .collect();
    let partitions = rep_seeds
        .iter()
        .map(|&s| kfold_partition(data.len(), cfg.k, s))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.repetitions)
        .flat_map(|r| (0..cfg.k).map(move |f| (r, f)))
        .collect();
    let folds = jobs
        .par_iter()
        .map(|&(r, f)| {
            run_fold(spec, data, &partitions[r], (r, f), rep_seeds[r], smote).map_err(|e| Error::Fold {
                repetition: r,
                fold: f,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let grid: Vec<Vec<f64>> = folds
        .chunks(cfg.k)
        .map(|c| c.iter().map(|f| f.accuracy).collect())
        .collect();
    let mean = folds.iter().map(|f| f.accuracy).sum::<f64>() / folds.len() as f64;
    Ok(CvResult {
        config: *cfg,
        grid,
        mean,
        folds,
    })
}
