//! Discrete AdaBoost (SAMME, two classes) over weighted decision stumps.

use serde::{Deserialize, Serialize};

use super::params::AdaBoostParams;
use super::tree::{build_cart_weighted, CartParams, ClassTree, SplitConstraints};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoost {
    pub stumps: Vec<ClassTree>,
    pub alphas: Vec<f64>,
}

impl AdaBoost {
    /// Weighted share of stumps voting positive.
    pub fn score(&self, x: &[f64]) -> f64 {
        let total: f64 = self.alphas.iter().sum();
        let pos: f64 = self
            .stumps
            .iter()
            .zip(&self.alphas)
            .filter(|(s, _)| s.predict_proba(x) >= 0.5)
            .map(|(_, a)| a)
            .sum();
        pos / total
    }
}

pub fn train_adaboost(x: &Matrix, y: &[u8], params: &AdaBoostParams, seed: u64) -> Result<AdaBoost> {
    let n = x.n_rows();
    if n == 0 || y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateLabels);
    }
    let cart = CartParams {
        constraints: SplitConstraints {
            max_depth: Some(1),
            ..Default::default()
        },
        ..Default::default()
    };
    let mut r = rng::seeded(seed);
    let mut w = vec![1.0 / n as f64; n];
    let mut model = AdaBoost {
        stumps: Vec::new(),
        alphas: Vec::new(),
    };
    for _ in 0..params.n_estimators {
        let stump = build_cart_weighted(x, y, &w, (0..n).collect(), &cart, &mut r);
        let miss: Vec<bool> = (0..n)
            .map(|i| u8::from(stump.predict_proba(x.row(i)) >= 0.5) != y[i])
            .collect();
        let err: f64 = w.iter().zip(&miss).filter(|(_, &m)| m).map(|(w, _)| w).sum::<f64>() / w.iter().sum::<f64>();
        if err <= 0.0 {
            model.stumps.push(stump);
            model.alphas.push(1.0);
            break;
        }
        if err >= 0.5 {
            // no better than chance; keep it only when nothing else exists
            if model.stumps.is_empty() {
                model.stumps.push(stump);
                model.alphas.push(1.0);
            }
            break;
        }
        let alpha = params.learning_rate * ((1.0 - err) / err).ln();
        let boost = alpha.exp();
        for (wi, &m) in w.iter_mut().zip(&miss) {
            if m {
                *wi *= boost;
            }
        }
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|wi| *wi /= total);
        model.stumps.push(stump);
        model.alphas.push(alpha);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn separable_by_one_stump_stops_early() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0]]).unwrap();
        let m = train_adaboost(&x, &[0, 0, 1, 1], &AdaBoostParams::default(), 0).unwrap();
        assert_eq!(m.stumps.len(), 1);
        assert_eq!(m.score(&[0.5]), 0.0);
        assert_eq!(m.score(&[2.5]), 1.0);
    }

    #[test]
    fn first_alpha_matches_hand_value() {
        // one stump misclassifies one of five rows: err 0.2,
        // alpha = 0.5 ln(0.8 / 0.2) = ln 2
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0], [3.0], [4.0]]).unwrap();
        let m = train_adaboost(&x, &[0, 0, 1, 1, 0], &AdaBoostParams::default(), 0).unwrap();
        assert!((m.alphas[0] - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(m.stumps.len() > 1);
        assert!(m.stumps.iter().all(|s| s.depth() <= 1));
    }

    #[test]
    fn interval_rule_needs_several_stumps() {
        let mut r = rng::seeded(3);
        let rows: Vec<[f64; 1]> = (0..300).map(|_| [r.random::<f64>()]).collect();
        let y: Vec<u8> = rows.iter().map(|p| u8::from((0.3..0.7).contains(&p[0]))).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let m = train_adaboost(&x, &y, &AdaBoostParams::default(), 0).unwrap();
        let hits = (0..300).filter(|&i| u8::from(m.score(x.row(i)) >= 0.5) == y[i]).count();
        assert!(hits >= 285, "{hits}");
        assert!((0..300).all(|i| (0.0..=1.0).contains(&m.score(x.row(i)))));
    }

    #[test]
    fn one_class_rejected() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert!(train_adaboost(&x, &[1, 1], &AdaBoostParams::default(), 0).is_err());
    }
}
