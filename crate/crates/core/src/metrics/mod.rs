//! Binary classification metrics with class 1 (failure) as the positive
//! class, ROC analysis, and repeated k-fold cross-validation.

mod cv;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learners::Classifier;
use crate::matrix::LabeledMatrix;

pub use cv::{kfold_partition, repeated_cv, CvConfig, CvFold, CvResult};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion_matrix(y_true: &[u8], y_pred: &[u8]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t == 1, p == 1) {
            (true, true) => cm.tp += 1,
            (false, true) => cm.fp += 1,
            (true, false) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// The four threshold metrics; a ratio with a zero denominator is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMetrics {
    pub accuracy: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn compute_metrics(cm: &ConfusionMatrix) -> ThresholdMetrics {
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ThresholdMetrics {
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        recall,
        precision,
        f1,
    }
}

/// Serialised with keys in the order accuracy, auc, recall, precision, f1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub auc: f64,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
}

impl MetricsReport {
    pub fn new(m: ThresholdMetrics, auc: f64) -> Self {
        MetricsReport {
            accuracy: m.accuracy,
            auc,
            recall: m.recall,
            precision: m.precision,
            f1: m.f1,
        }
    }

    pub fn values(&self) -> [f64; 5] {
        [self.accuracy, self.auc, self.recall, self.precision, self.f1]
    }

    pub const KEYS: [&'static str; 5] = ["accuracy", "auc", "recall", "precision", "f1"];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Scores at or above this value count as positive; infinite for the
    /// origin.
    pub threshold: f64,
    pub fp: u64,
    pub tp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub positives: u64,
    pub negatives: u64,
}

fn check_scores(y_true: &[u8], scores: &[f64]) -> Result<(u64, u64)> {
    if y_true.len() != scores.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: scores.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(Error::InvalidConfig(format!("score {i} is not finite")));
    }
    let pos = y_true.iter().filter(|&&y| y == 1).count() as u64;
    let neg = y_true.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// One point per distinct score, thresholds descending, plus the origin.
pub fn roc_curve(y_true: &[u8], scores: &[f64]) -> Result<RocCurve> {
    let (pos, neg) = check_scores(y_true, scores)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut points = vec![RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
        fp: 0,
        tp: 0,
    }];
    let (mut tp, mut fp) = (0u64, 0u64);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: s,
            fp,
            tp,
        });
    }
    Ok(RocCurve {
        points,
        positives: pos,
        negatives: neg,
    })
}

/// Trapezoidal area under the curve, accumulated in integer counts.
pub fn auc(curve: &RocCurve) -> f64 {
    let twice: u128 = curve
        .points
        .windows(2)
        .map(|w| u128::from(w[1].fp - w[0].fp) * u128::from(w[1].tp + w[0].tp))
        .sum();
    twice as f64 / (2.0 * curve.positives as f64 * curve.negatives as f64)
}

/// `(concordant + ties / 2) / (P N)` over all positive-negative pairs.
pub fn auc_rank(y_true: &[u8], scores: &[f64]) -> Result<f64> {
    let (pos, neg) = check_scores(y_true, scores)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_unstable_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let (mut twice, mut neg_below) = (0u128, 0u128);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        let (mut p, mut n) = (0u128, 0u128);
        while i < order.len() && scores[order[i]] == s {
            if y_true[order[i]] == 1 {
                p += 1;
            } else {
                n += 1;
            }
            i += 1;
        }
        twice += 2 * p * neg_below + p * n;
        neg_below += n;
    }
    Ok(twice as f64 / (2.0 * pos as f64 * neg as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub confusion: ConfusionMatrix,
    pub report: MetricsReport,
    pub roc: RocCurve,
}

/// Scores every row of `data` and computes all five metrics.
pub fn evaluate<C: Classifier + ?Sized>(model: &C, data: &LabeledMatrix) -> Result<Evaluation> {
    let scores = model.predict_scores(&data.features)?;
    let predicted: Vec<u8> = scores.iter().map(|&s| crate::learners::label_for(s)).collect();
    let confusion = confusion_matrix(&data.labels, &predicted)?;
    let roc = roc_curve(&data.labels, &scores)?;
    let report = MetricsReport::new(compute_metrics(&confusion), auc(&roc));
    Ok(Evaluation { confusion, report, roc })
}
