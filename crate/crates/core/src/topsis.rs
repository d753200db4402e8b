//! TOPSIS ranking of alternatives by closeness to an ideal point.
//!
//! Columns are divided by their Euclidean norm, scaled by the criterion
//! weights, and each alternative is scored `d⁻ / (d⁺ + d⁻)` from its
//! distances to the ideal and the negative-ideal points.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    alternatives: Vec<String>,
    criteria: Vec<String>,
    /// One row per alternative.
    values: Vec<Vec<f64>>,
    weights: Vec<f64>,
    /// `true` when larger is better.
    benefit: Vec<bool>,
}

const WEIGHT_TOLERANCE: f64 = 1e-12;

impl DecisionMatrix {
    pub fn new(
        alternatives: Vec<String>,
        criteria: Vec<String>,
        values: Vec<Vec<f64>>,
        weights: Vec<f64>,
        benefit: Vec<bool>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidDecisionMatrix(m));
        if alternatives.len() < 2 {
            return Err(Error::TooFewModels(alternatives.len()));
        }
        let m = criteria.len();
        if m == 0 {
            return bad("no criteria".into());
        }
        if values.len() != alternatives.len() {
            return bad(format!("{} rows for {} alternatives", values.len(), alternatives.len()));
        }
        if weights.len() != m || benefit.len() != m {
            return bad("weights and orientation need one entry per criterion".into());
        }
        for (a, row) in alternatives.iter().zip(&values) {
            if row.len() != m {
                return bad(format!("row {a:?} has {} values, expected {m}", row.len()));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return bad(format!("row {a:?} holds {v}; values must be finite and >= 0"));
            }
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return bad("weights must be finite and >= 0".into());
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return bad(format!("weights sum to {total}, not 1"));
        }
        Ok(DecisionMatrix {
            alternatives,
            criteria,
            values,
            weights,
            benefit,
        })
    }

    /// Equal weights, every criterion a benefit.
    pub fn equal_weights(alternatives: Vec<String>, criteria: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let m = criteria.len();
        let weights = vec![1.0 / m as f64; m];
        Self::new(alternatives, criteria, values, weights, vec![true; m])
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedAlternative {
    pub name: String,
    pub score: f64,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisRanking {
    /// Best first.
    pub entries: Vec<RankedAlternative>,
    pub ideal: Vec<f64>,
    pub negative_ideal: Vec<f64>,
}

impl TopsisRanking {
    /// `model,score,rank` rows, best first.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("model,score,rank\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{}\n", e.name, e.score, e.rank));
        }
        s
    }

    pub fn score_of(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.score)
    }
}

/// Divides by the Euclidean norm; an all-zero column is returned as is.
pub fn vector_normalize(column: &[f64]) -> Vec<f64> {
    let norm = column.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        column.to_vec()
    } else {
        column.iter().map(|v| v / norm).collect()
    }
}

pub fn topsis_rank(dm: &DecisionMatrix) -> TopsisRanking {
    let n = dm.alternatives.len();
    let m = dm.criteria.len();
    let mut weighted = vec![vec![0.0; m]; n];
    for j in 0..m {
        let col: Vec<f64> = dm.values.iter().map(|r| r[j]).collect();
        for (i, v) in vector_normalize(&col).into_iter().enumerate() {
            weighted[i][j] = v * dm.weights[j];
        }
    }
    let mut ideal = vec![0.0; m];
    let mut negative_ideal = vec![0.0; m];
    for j in 0..m {
        let (lo, hi) = weighted.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
            (lo.min(r[j]), hi.max(r[j]))
        });
        (ideal[j], negative_ideal[j]) = if dm.benefit[j] { (hi, lo) } else { (lo, hi) };
    }
    let dist = |r: &[f64], p: &[f64]| r.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let mut entries: Vec<RankedAlternative> = weighted
        .iter()
        .zip(&dm.alternatives)
        .map(|(r, name)| {
            let (plus, minus) = (dist(r, &ideal), dist(r, &negative_ideal));
            let score = if plus + minus == 0.0 {
                0.5
            } else {
                minus / (plus + minus)
            };
            RankedAlternative {
                name: name.clone(),
                score,
                rank: 0,
            }
        })
        .collect();
    // equal scores fall back to name order so ranks stay a permutation
    entries.sort_by(|a, b| match b.score.total_cmp(&a.score) {
        Ordering::Equal => a.name.cmp(&b.name),
        o => o,
    });
    for (i, e) in entries.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    TopsisRanking {
        entries,
        ideal,
        negative_ideal,
    }
}
