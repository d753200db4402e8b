//! Bootstrap majority-vote ensemble.
//!
//! Five bootstrap samples, each the size of the training set, are drawn with
//! replacement. Member `k` is trained on sample `k`, and the ensemble
//! predicts the label chosen by at least three of the five members.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::{self, Classifier, LearnerId, LearnerSpec, TrainedModel};
use crate::matrix::{class_counts, LabeledMatrix};
use crate::rng;

pub const N_MEMBERS: usize = 5;
pub const MAX_REDRAWS: usize = 10;

pub const MEMBER_IDS: [LearnerId; N_MEMBERS] = [
    LearnerId::HistGb,
    LearnerId::DecisionTree,
    LearnerId::Gbdt,
    LearnerId::RandomForest,
    LearnerId::ExtraTrees,
];

/// Member seeds live in a separate stream range from the bootstrap draws.
const MEMBER_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BootstrapPlan {
    pub seed: u64,
    pub samples: Vec<Vec<usize>>,
}

fn draw(n: usize, sub_seed: u64) -> Vec<usize> {
    let mut r = rng::seeded(sub_seed);
    (0..n).map(|_| r.random_range(0..n)).collect()
}

/// Seed of the `attempt`-th draw of sample `k`.
fn sample_seed(seed: u64, k: usize, attempt: usize) -> u64 {
    rng::derive_seed(seed, k as u64).wrapping_add(attempt as u64)
}

/// `count` index sequences of length `n`, drawn uniformly with replacement.
pub fn bootstrap_indices(n: usize, seed: u64, count: usize) -> BootstrapPlan {
    BootstrapPlan {
        seed,
        samples: (0..count).map(|k| draw(n, sample_seed(seed, k, 0))).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub members: [LearnerSpec; N_MEMBERS],
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            members: MEMBER_IDS.map(LearnerSpec::default_for),
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        for m in &self.members {
            m.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VotingEnsemble {
    pub seed: u64,
    pub plan: BootstrapPlan,
    pub members: Vec<TrainedModel>,
}

/// Draws sample `k`, redrawing while it holds a single class.
fn usable_sample(labels: &[u8], seed: u64, k: usize) -> Result<Vec<usize>> {
    let n = labels.len();
    for attempt in 0..=MAX_REDRAWS {
        let idx = draw(n, sample_seed(seed, k, attempt));
        let first = labels[idx[0]];
        if idx.iter().any(|&i| labels[i] != first) {
            return Ok(idx);
        }
    }
    Err(Error::DegenerateBootstrap {
        sample: k,
        attempts: MAX_REDRAWS + 1,
    })
}

pub fn fit_voting_ensemble(data: &LabeledMatrix, spec: &EnsembleSpec, seed: u64) -> Result<VotingEnsemble> {
    spec.validate()?;
    let [neg, pos] = class_counts(&data.labels);
    if neg == 0 || pos == 0 {
        return Err(Error::DegenerateLabels);
    }
    let samples = (0..N_MEMBERS)
        .map(|k| usable_sample(&data.labels, seed, k))
        .collect::<Result<Vec<_>>>()?;
    let members = samples
        .par_iter()
        .zip(spec.members.par_iter())
        .enumerate()
        .map(|(k, (idx, member))| {
            let member_seed = rng::derive_seed(seed, MEMBER_STREAM_OFFSET + k as u64);
            learners::train(member, &data.select(idx), member_seed)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VotingEnsemble {
        seed,
        plan: BootstrapPlan { seed, samples },
        members,
    })
}

impl VotingEnsemble {
    /// Member labels for `x`, in member order.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<u8>> {
        self.members.iter().map(|m| m.predict(x)).collect()
    }

    pub fn predict_majority(&self, x: &[f64]) -> Result<u8> {
        let positive = self.votes(x)?.iter().filter(|&&v| v == 1).count();
        Ok(u8::from(2 * positive > self.members.len()))
    }
}

impl Classifier for VotingEnsemble {
    fn n_features(&self) -> usize {
        self.members[0].n_features
    }

    /// Fraction of members voting positive.
    fn score_unchecked(&self, x: &[f64]) -> f64 {
        let positive = self
            .members
            .iter()
            .filter(|m| learners::label_for(m.score_unchecked(x)) == 1)
            .count();
        positive as f64 / self.members.len() as f64
    }
}
