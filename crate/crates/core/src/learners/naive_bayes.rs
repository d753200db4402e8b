use serde::{Deserialize, Serialize};

use super::boosting::sigmoid;
use super::params::GnbParams;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Variance used when smoothing leaves a feature with none at all.
const VARIANCE_FLOOR: f64 = 1e-12;

/// Gaussian naive Bayes: independent per-class normal densities per
/// feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
    pub log_priors: [f64; 2],
}

impl GaussianNb {
    fn joint(&self, c: usize, x: &[f64]) -> f64 {
        let mut s = self.log_priors[c];
        for ((v, m), var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
            s -= 0.5 * ((std::f64::consts::TAU * var).ln() + (v - m) * (v - m) / var);
        }
        s
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.joint(1, x) - self.joint(0, x))
    }
}

/// Per-class moments with `var_smoothing` times the largest overall feature
/// variance added to every variance.
pub fn train_gnb(x: &Matrix, y: &[u8], params: &GnbParams) -> Result<GaussianNb> {
    let n = x.n_rows();
    let d = x.n_cols();
    let counts = crate::matrix::class_counts(y);
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::DegenerateLabels);
    }
    let moments = |sel: &dyn Fn(usize) -> bool, count: usize| {
        let mut mean = vec![0.0; d];
        for i in (0..n).filter(|&i| sel(i)) {
            for j in 0..d {
                mean[j] += x.get(i, j);
            }
        }
        mean.iter_mut().for_each(|m| *m /= count as f64);
        let mut var = vec![0.0; d];
        for i in (0..n).filter(|&i| sel(i)) {
            for j in 0..d {
                let e = x.get(i, j) - mean[j];
                var[j] += e * e;
            }
        }
        var.iter_mut().for_each(|v| *v /= count as f64);
        (mean, var)
    };
    let (_, total_var) = moments(&|_| true, n);
    let eps = params.var_smoothing * total_var.iter().copied().fold(0.0, f64::max);
    let (m0, v0) = moments(&|i| y[i] == 0, counts[0]);
    let (m1, v1) = moments(&|i| y[i] == 1, counts[1]);
    let smooth = |v: Vec<f64>| v.into_iter().map(|v| (v + eps).max(VARIANCE_FLOOR)).collect();
    Ok(GaussianNb {
        means: [m0, m1],
        variances: [smooth(v0), smooth(v1)],
        log_priors: counts.map(|c| (c as f64 / n as f64).ln()),
    })
}
