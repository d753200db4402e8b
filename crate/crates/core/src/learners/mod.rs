//! The twelve binary classifiers.
//!
//! Every fitted model exposes a score in `[0, 1]` that grows with confidence
//! in class 1, and predicts 1 exactly when that score is at least 0.5.

pub mod adaboost;
pub mod boosting;
pub mod discriminant;
pub mod forest;
pub mod logistic;
pub mod naive_bayes;
pub mod neighbors;
mod params;
pub mod tree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, Matrix};

pub use params::*;
pub use tree::{best_split, build_cart, gini_impurity, ClassLeaf, ClassTree, MaxFeatures, SplitConstraints, TreeNode};

use adaboost::AdaBoost;
use boosting::BoostedTrees;
use discriminant::{Lda, Qda};
use forest::{Forest, ForestKind};
use logistic::LogisticRegression;
use naive_bayes::GaussianNb;
use neighbors::Knn;

pub const DECISION_THRESHOLD: f64 = 0.5;

/// Anything that maps a feature row to a class-1 score.
pub trait Classifier: Sync {
    fn n_features(&self) -> usize;

    /// Score for a row already known to have the right width.
    fn score_unchecked(&self, x: &[f64]) -> f64;

    fn predict_score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(self.score_unchecked(x))
    }

    fn predict(&self, x: &[f64]) -> Result<u8> {
        self.predict_score(x).map(label_for)
    }

    fn predict_scores(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.n_cols() != self.n_features() {
            return Err(Error::DimensionMismatch {
                expected: self.n_features(),
                got: x.n_cols(),
            });
        }
        Ok((0..x.n_rows())
            .into_par_iter()
            .map(|i| self.score_unchecked(x.row(i)))
            .collect())
    }

    fn predict_labels(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.predict_scores(x)?.into_iter().map(label_for).collect())
    }
}

pub fn label_for(score: f64) -> u8 {
    u8::from(score >= DECISION_THRESHOLD)
}

/// Always predicts the most frequent training label; ties go to 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dummy {
    pub majority: u8,
}

impl Dummy {
    pub fn fit(y: &[u8]) -> Dummy {
        let [neg, pos] = crate::matrix::class_counts(y);
        Dummy {
            majority: u8::from(pos > neg),
        }
    }

    pub fn score(&self) -> f64 {
        f64::from(self.majority)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "fitted", rename_all = "snake_case")]
pub enum FittedState {
    Boosted(BoostedTrees),
    Forest(Forest),
    Tree(ClassTree),
    Knn(Knn),
    AdaBoost(AdaBoost),
    Lda(Lda),
    LogReg(LogisticRegression),
    Dummy(Dummy),
    Gnb(GaussianNb),
    Qda(Qda),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: LearnerSpec,
    pub seed: u64,
    pub n_features: usize,
    pub state: FittedState,
}

impl TrainedModel {
    pub fn id(&self) -> LearnerId {
        self.spec.id()
    }
}

impl Classifier for TrainedModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        match &self.state {
            FittedState::Boosted(m) => m.score(x),
            FittedState::Forest(m) => m.score(x),
            FittedState::Tree(m) => m.predict_proba(x),
            FittedState::Knn(m) => m.score(x),
            FittedState::AdaBoost(m) => m.score(x),
            FittedState::Lda(m) => m.score(x),
            FittedState::LogReg(m) => m.score(x),
            FittedState::Dummy(m) => m.score(),
            FittedState::Gnb(m) => m.score(x),
            FittedState::Qda(m) => m.score(x),
        }
    }
}

/// Fits `spec` on `data`. The same `(spec, data, seed)` always produces the
/// same model.
pub fn train(spec: &LearnerSpec, data: &LabeledMatrix, seed: u64) -> Result<TrainedModel> {
    spec.validate()?;
    if data.is_empty() {
        return Err(Error::DegenerateLabels);
    }
    let (x, y) = (&data.features, data.labels.as_slice());
    let state = match spec {
        LearnerSpec::HistGb(p) => FittedState::Boosted(boosting::train_hist_gb(x, y, p)?),
        LearnerSpec::Gbdt(p) => FittedState::Boosted(boosting::train_gbdt(x, y, p)?),
        LearnerSpec::RandomForest(p) => {
            FittedState::Forest(forest::train_forest(x, y, ForestKind::RandomForest, p, seed))
        }
        LearnerSpec::ExtraTrees(p) => FittedState::Forest(forest::train_forest(x, y, ForestKind::ExtraTrees, p, seed)),
        LearnerSpec::DecisionTree(p) => {
            let params = tree::CartParams {
                constraints: p.constraints(),
                ..Default::default()
            };
            FittedState::Tree(build_cart(x, y, &params, &mut crate::rng::seeded(seed)))
        }
        LearnerSpec::Knn(p) => FittedState::Knn(Knn::fit(x, y, p)),
        LearnerSpec::AdaBoost(p) => FittedState::AdaBoost(adaboost::train_adaboost(x, y, p, seed)?),
        LearnerSpec::Lda(p) => FittedState::Lda(discriminant::train_lda(x, y, p)?),
        LearnerSpec::LogReg(p) => FittedState::LogReg(logistic::train_logreg(x, y, p)?),
        LearnerSpec::Dummy(_) => FittedState::Dummy(Dummy::fit(y)),
        LearnerSpec::Gnb(p) => FittedState::Gnb(naive_bayes::train_gnb(x, y, p)?),
        LearnerSpec::Qda(p) => FittedState::Qda(discriminant::train_qda(x, y, p)?),
    };
    Ok(TrainedModel {
        spec: *spec,
        seed,
        n_features: x.n_cols(),
        state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;

    fn sample(n: usize, seed: u64) -> LabeledMatrix {
        let mut r = rng::seeded(seed);
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = u8::from(i % 4 == 0);
            let shift = f64::from(c) * 0.8;
            rows.push([shift + r.random::<f64>(), r.random::<f64>() - shift, r.random::<f64>()]);
            y.push(c);
        }
        LabeledMatrix::new(Matrix::from_rows(&rows).unwrap(), y).unwrap()
    }

    fn small(id: LearnerId) -> LearnerSpec {
        match LearnerSpec::default_for(id) {
            LearnerSpec::RandomForest(p) => LearnerSpec::RandomForest(ForestParams { n_estimators: 10, ..p }),
            LearnerSpec::ExtraTrees(p) => LearnerSpec::ExtraTrees(ForestParams { n_estimators: 10, ..p }),
            LearnerSpec::Gbdt(p) => LearnerSpec::Gbdt(GbdtParams { n_estimators: 10, ..p }),
            LearnerSpec::HistGb(p) => LearnerSpec::HistGb(HistGbParams { max_iter: 10, ..p }),
            s => s,
        }
    }

    #[test]
    fn every_learner_trains_and_scores_in_range() {
        let data = sample(120, 1);
        for id in LearnerId::ALL {
            let m = train(&small(id), &data, 7).unwrap();
            assert_eq!(m.id(), id);
            let scores = m.predict_scores(&data.features).unwrap();
            assert!(scores.iter().all(|s| (0.0..=1.0).contains(s)), "{id}");
            let labels = m.predict_labels(&data.features).unwrap();
            for (s, l) in scores.iter().zip(&labels) {
                assert_eq!(*l, label_for(*s));
            }
            assert!(matches!(
                m.predict(&[0.0; 2]),
                Err(Error::DimensionMismatch { expected: 3, got: 2 })
            ));
        }
    }

    #[test]
    fn score_of_one_half_predicts_positive() {
        assert_eq!(label_for(0.5), 1);
        assert_eq!(label_for(0.4999999), 0);
    }

    #[test]
    fn dummy_predicts_majority() {
        let data = sample(100, 2);
        let m = train(&LearnerSpec::default_for(LearnerId::Dummy), &data, 0).unwrap();
        assert!(m.predict_labels(&data.features).unwrap().iter().all(|&l| l == 0));
        assert_eq!(m.predict_score(&[9.0, 9.0, 9.0]).unwrap(), 0.0);
        // a tie keeps class 0
        assert_eq!(Dummy::fit(&[0, 1]).majority, 0);
        assert_eq!(Dummy::fit(&[1, 1, 0]).majority, 1);
    }

    #[test]
    fn single_leaf_tree_reports_frequency() {
        let x = Matrix::from_rows(&vec![[1.0]; 10]).unwrap();
        let data = LabeledMatrix::new(x, vec![0, 0, 1, 1, 1, 1, 1, 1, 1, 1]).unwrap();
        let m = train(&LearnerSpec::default_for(LearnerId::DecisionTree), &data, 0).unwrap();
        assert_eq!(m.predict_score(&[1.0]).unwrap(), 0.8);
        assert_eq!(m.predict(&[1.0]).unwrap(), 1);
    }

    #[test]
    fn training_is_deterministic() {
        let data = sample(80, 3);
        for id in LearnerId::ALL {
            assert_eq!(
                train(&small(id), &data, 5).unwrap(),
                train(&small(id), &data, 5).unwrap()
            );
        }
    }

    #[test]
    fn one_class_rejected_where_needed() {
        let mut data = sample(40, 4);
        data.labels.iter_mut().for_each(|l| *l = 0);
        for id in [
            LearnerId::Gbdt,
            LearnerId::HistGb,
            LearnerId::LogReg,
            LearnerId::Lda,
            LearnerId::Qda,
            LearnerId::Gnb,
            LearnerId::AdaBoost,
        ] {
            assert!(train(&small(id), &data, 0).is_err(), "{id}");
        }
        for id in [
            LearnerId::Dummy,
            LearnerId::DecisionTree,
            LearnerId::RandomForest,
            LearnerId::Knn,
        ] {
            assert!(train(&small(id), &data, 0).is_ok(), "{id}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn deterministic_learners_ignore_row_order(seed in any::<u64>()) {
            let data = sample(60, seed);
            let mut order: Vec<usize> = (0..60).collect();
            order.shuffle(&mut rng::seeded(seed ^ 1));
            let shuffled = data.select(&order);
            let probe = sample(20, seed ^ 2);
            for id in [LearnerId::Knn, LearnerId::Lda, LearnerId::Qda, LearnerId::Gnb, LearnerId::Dummy, LearnerId::LogReg] {
                let a = train(&small(id), &data, 0).unwrap().predict_labels(&probe.features).unwrap();
                let b = train(&small(id), &shuffled, 0).unwrap().predict_labels(&probe.features).unwrap();
                prop_assert_eq!(a, b, "{}", id);
            }
        }
    }
}
