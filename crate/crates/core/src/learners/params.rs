//! Hyperparameters for every learner, with the defaults used by the
//! experiment.
//!
//! | learner         | setting                          | default |
//! |-----------------|----------------------------------|---------|
//! | `hist_gb`       | iterations                       | 50      |
//! |                 | max depth                        | 20      |
//! |                 | max leaves                       | 31      |
//! |                 | bins per feature                 | 255     |
//! |                 | shrinkage                        | 0.1     |
//! |                 | min rows / min hessian per leaf  | 20 / 1e-3 |
//! | `gbdt`          | stages, shrinkage                | 100, 0.1 |
//! |                 | max depth                        | 3       |
//! |                 | min split / min leaf             | 4 / 1   |
//! | `random_forest` | trees, criterion                 | 100, gini |
//! |                 | features per split               | ⌊√d⌋    |
//! |                 | max depth                        | none    |
//! | `decision_tree` | min split / min leaf             | 2 / 1   |
//! | `extra_trees`   | trees, features per split        | 100, ⌊√d⌋ |
//! | `knn`           | k, Minkowski p, leaf size        | 5, 2, 20 |
//! | `adaboost`      | stumps, learning rate            | 50, 0.5 |
//! | `lda`           | shrinkage                        | auto (Ledoit-Wolf) |
//! | `logreg`        | penalty, C, tol, max iterations  | l2, 1.0, 1e-4, 100 |
//! | `dummy`         | strategy                         | most frequent |
//! | `gnb`           | variance smoothing               | 1e-9    |
//! | `qda`           | tol, reg_param                   | 1e-4, 0 |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::tree::{MaxFeatures, SplitConstraints};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerId {
    HistGb,
    Gbdt,
    RandomForest,
    DecisionTree,
    ExtraTrees,
    Knn,
    #[serde(rename = "adaboost")]
    AdaBoost,
    Lda,
    #[serde(rename = "logreg")]
    LogReg,
    Dummy,
    Gnb,
    Qda,
}

impl LearnerId {
    pub const ALL: [LearnerId; 12] = [
        LearnerId::HistGb,
        LearnerId::Gbdt,
        LearnerId::RandomForest,
        LearnerId::DecisionTree,
        LearnerId::ExtraTrees,
        LearnerId::Knn,
        LearnerId::AdaBoost,
        LearnerId::Lda,
        LearnerId::LogReg,
        LearnerId::Dummy,
        LearnerId::Gnb,
        LearnerId::Qda,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerId::HistGb => "hist_gb",
            LearnerId::Gbdt => "gbdt",
            LearnerId::RandomForest => "random_forest",
            LearnerId::DecisionTree => "decision_tree",
            LearnerId::ExtraTrees => "extra_trees",
            LearnerId::Knn => "knn",
            LearnerId::AdaBoost => "adaboost",
            LearnerId::Lda => "lda",
            LearnerId::LogReg => "logreg",
            LearnerId::Dummy => "dummy",
            LearnerId::Gnb => "gnb",
            LearnerId::Qda => "qda",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            LearnerId::HistGb => "Light Gradient Boosting Machine",
            LearnerId::Gbdt => "Gradient Boosting Classifier",
            LearnerId::RandomForest => "Random Forest Classifier",
            LearnerId::DecisionTree => "Decision Tree Classifier",
            LearnerId::ExtraTrees => "Extra Trees Classifier",
            LearnerId::Knn => "K Neighbors Classifier",
            LearnerId::AdaBoost => "Ada Boost Classifier",
            LearnerId::Lda => "Linear Discriminant Analysis",
            LearnerId::LogReg => "Logistic Regression",
            LearnerId::Dummy => "Dummy Classifier",
            LearnerId::Gnb => "Naive Bayes",
            LearnerId::Qda => "Quadratic Discriminant Analysis",
        }
    }
}

impl fmt::Display for LearnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for LearnerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LearnerId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::MissingModel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HistGbParams {
    pub max_iter: usize,
    pub max_depth: usize,
    pub max_leaves: usize,
    pub max_bins: usize,
    pub learning_rate: f64,
    pub min_samples_leaf: usize,
    pub min_hessian_leaf: f64,
}

impl Default for HistGbParams {
    fn default() -> Self {
        HistGbParams {
            max_iter: 50,
            max_depth: 20,
            max_leaves: 31,
            max_bins: 255,
            learning_rate: 0.1,
            min_samples_leaf: 20,
            min_hessian_leaf: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GbdtParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for GbdtParams {
    fn default() -> Self {
        GbdtParams {
            n_estimators: 100,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_split: 4,
            min_samples_leaf: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
    pub max_features: MaxFeatures,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_estimators: 100,
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
            max_features: MaxFeatures::Sqrt,
        }
    }
}

impl ForestParams {
    pub fn constraints(&self) -> SplitConstraints {
        SplitConstraints {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecisionTreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for DecisionTreeParams {
    fn default() -> Self {
        DecisionTreeParams {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

impl DecisionTreeParams {
    pub fn constraints(&self) -> SplitConstraints {
        SplitConstraints {
            max_depth: self.max_depth,
            min_samples_split: self.min_samples_split,
            min_samples_leaf: self.min_samples_leaf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub n_neighbors: usize,
    /// Minkowski exponent; 2 is Euclidean.
    pub p: f64,
    /// Accepted for parity with tree-backed neighbour search; the brute
    /// force search here ignores it.
    pub leaf_size: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            n_neighbors: 5,
            p: 2.0,
            leaf_size: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaBoostParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
}

impl Default for AdaBoostParams {
    fn default() -> Self {
        AdaBoostParams {
            n_estimators: 50,
            learning_rate: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shrinkage {
    None,
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LdaParams {
    pub shrinkage: Shrinkage,
}

impl Default for LdaParams {
    fn default() -> Self {
        LdaParams {
            shrinkage: Shrinkage::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogRegParams {
    /// Inverse L2 strength.
    pub c: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams {
            c: 1.0,
            tol: 1e-4,
            max_iter: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DummyParams {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GnbParams {
    pub var_smoothing: f64,
}

impl Default for GnbParams {
    fn default() -> Self {
        GnbParams { var_smoothing: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QdaParams {
    pub tol: f64,
    pub reg_param: f64,
}

impl Default for QdaParams {
    fn default() -> Self {
        QdaParams {
            tol: 1e-4,
            reg_param: 0.0,
        }
    }
}

/// A learner together with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "learner", content = "params", rename_all = "snake_case")]
pub enum LearnerSpec {
    HistGb(HistGbParams),
    Gbdt(GbdtParams),
    RandomForest(ForestParams),
    DecisionTree(DecisionTreeParams),
    ExtraTrees(ForestParams),
    Knn(KnnParams),
    #[serde(rename = "adaboost")]
    AdaBoost(AdaBoostParams),
    Lda(LdaParams),
    #[serde(rename = "logreg")]
    LogReg(LogRegParams),
    Dummy(DummyParams),
    Gnb(GnbParams),
    Qda(QdaParams),
}

impl LearnerSpec {
    pub fn default_for(id: LearnerId) -> Self {
        match id {
            LearnerId::HistGb => LearnerSpec::HistGb(Default::default()),
            LearnerId::Gbdt => LearnerSpec::Gbdt(Default::default()),
            LearnerId::RandomForest => LearnerSpec::RandomForest(Default::default()),
            LearnerId::DecisionTree => LearnerSpec::DecisionTree(Default::default()),
            LearnerId::ExtraTrees => LearnerSpec::ExtraTrees(Default::default()),
            LearnerId::Knn => LearnerSpec::Knn(Default::default()),
            LearnerId::AdaBoost => LearnerSpec::AdaBoost(Default::default()),
            LearnerId::Lda => LearnerSpec::Lda(Default::default()),
            LearnerId::LogReg => LearnerSpec::LogReg(Default::default()),
            LearnerId::Dummy => LearnerSpec::Dummy(Default::default()),
            LearnerId::Gnb => LearnerSpec::Gnb(Default::default()),
            LearnerId::Qda => LearnerSpec::Qda(Default::default()),
        }
    }

    pub fn id(&self) -> LearnerId {
        match self {
            LearnerSpec::HistGb(_) => LearnerId::HistGb,
            LearnerSpec::Gbdt(_) => LearnerId::Gbdt,
            LearnerSpec::RandomForest(_) => LearnerId::RandomForest,
            LearnerSpec::DecisionTree(_) => LearnerId::DecisionTree,
            LearnerSpec::ExtraTrees(_) => LearnerId::ExtraTrees,
            LearnerSpec::Knn(_) => LearnerId::Knn,
            LearnerSpec::AdaBoost(_) => LearnerId::AdaBoost,
            LearnerSpec::Lda(_) => LearnerId::Lda,
            LearnerSpec::LogReg(_) => LearnerId::LogReg,
            LearnerSpec::Dummy(_) => LearnerId::Dummy,
            LearnerSpec::Gnb(_) => LearnerId::Gnb,
            LearnerSpec::Qda(_) => LearnerId::Qda,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidHyperparameter(format!("{}: {msg}", self.id())));
        let rate_ok = |r: f64| r > 0.0 && r.is_finite();
        match *self {
            LearnerSpec::HistGb(p) => {
                if p.max_iter == 0 || p.max_depth == 0 {
                    return bad("max_iter and max_depth must be >= 1".into());
                }
                if p.max_leaves < 2 {
                    return bad("max_leaves must be >= 2".into());
                }
                if !(2..=256).contains(&p.max_bins) {
                    return bad("max_bins must lie in 2..=256".into());
                }
                if !rate_ok(p.learning_rate) || p.min_samples_leaf == 0 || p.min_hessian_leaf < 0.0 {
                    return bad("learning_rate > 0, min_samples_leaf >= 1, min_hessian_leaf >= 0".into());
                }
            }
            LearnerSpec::Gbdt(p) => {
                if p.n_estimators == 0 || p.max_depth == 0 || !rate_ok(p.learning_rate) {
                    return bad("n_estimators, max_depth >= 1 and learning_rate > 0".into());
                }
                SplitConstraints {
                    max_depth: Some(p.max_depth),
                    min_samples_split: p.min_samples_split,
                    min_samples_leaf: p.min_samples_leaf,
                }
                .validate()?;
            }
            LearnerSpec::RandomForest(p) | LearnerSpec::ExtraTrees(p) => {
                if p.n_estimators == 0 {
                    return bad("n_estimators must be >= 1".into());
                }
                if p.max_features == MaxFeatures::Count(0) {
                    return bad("max_features must be >= 1".into());
                }
                p.constraints().validate()?;
            }
            LearnerSpec::DecisionTree(p) => p.constraints().validate()?,
            LearnerSpec::Knn(p) => {
                if p.n_neighbors == 0 || !(p.p >= 1.0) || p.leaf_size == 0 {
                    return bad("n_neighbors >= 1, p >= 1, leaf_size >= 1".into());
                }
            }
            LearnerSpec::AdaBoost(p) => {
                if p.n_estimators == 0 || !rate_ok(p.learning_rate) {
                    return bad("n_estimators >= 1 and learning_rate > 0".into());
                }
            }
            LearnerSpec::Lda(p) => {
                if let Shrinkage::Fixed(s) = p.shrinkage {
                    if !(0.0..=1.0).contains(&s) {
                        return bad("fixed shrinkage must lie in [0, 1]".into());
                    }
                }
            }
            LearnerSpec::LogReg(p) => {
                if !rate_ok(p.c) || !rate_ok(p.tol) || p.max_iter == 0 {
                    return bad("C > 0, tol > 0, max_iter >= 1".into());
                }
            }
            LearnerSpec::Dummy(_) => {}
            LearnerSpec::Gnb(p) => {
                if !(p.var_smoothing >= 0.0) {
                    return bad("var_smoothing must be >= 0".into());
                }
            }
            LearnerSpec::Qda(p) => {
                if !(p.tol >= 0.0) || !(0.0..=1.0).contains(&p.reg_param) {
                    return bad("tol >= 0 and reg_param in [0, 1]".into());
                }
            }
        }
        Ok(())
    }
}
