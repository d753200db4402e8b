//! L2-regularised logistic regression fitted by damped Newton iterations.
//!
//! Minimises `mean log-loss + |w|² / (2 C n)` with the intercept left
//! unpenalised, which is the usual `C · Σ loss + |w|² / 2` objective scaled
//! by `1 / (C n)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::boosting::{logistic_loss, sigmoid};
use super::params::LogRegParams;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticRegression {
    pub weights: Vec<f64>,
    pub intercept: f64,
    /// Whether the gradient max-norm fell below `tol`.
    pub converged: bool,
    pub iterations: usize,
}

impl LogisticRegression {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.intercept + self.weights.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }
}

struct Problem<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    penalty: f64,
}

impl Problem<'_> {
    /// `theta` is `[w_0 .. w_{d-1}, b]`.
    fn raw(&self, theta: &DVector<f64>, i: usize) -> f64 {
        let d = self.x.n_cols();
        theta[d] + self.x.row(i).iter().enumerate().map(|(j, v)| theta[j] * v).sum::<f64>()
    }

    fn objective(&self, theta: &DVector<f64>) -> f64 {
        let n = self.x.n_rows();
        let d = self.x.n_cols();
        let loss: f64 = (0..n).map(|i| logistic_loss(self.raw(theta, i), self.y[i])).sum();
        let reg: f64 = theta.rows(0, d).norm_squared();
        loss / n as f64 + 0.5 * self.penalty * reg
    }

    fn gradient_hessian(&self, theta: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.x.n_rows();
        let d = self.x.n_cols();
        let mut g = DVector::zeros(d + 1);
        let mut h = DMatrix::zeros(d + 1, d + 1);
        let mut z = vec![0.0; d + 1];
        for i in 0..n {
            z[..d].copy_from_slice(self.x.row(i));
            z[d] = 1.0;
            let p = sigmoid(self.raw(theta, i));
            let r = p - f64::from(self.y[i]);
            let s = p * (1.0 - p);
            for a in 0..=d {
                g[a] += r * z[a];
                for b in 0..=a {
                    h[(a, b)] += s * z[a] * z[b];
                }
            }
        }
        let inv_n = 1.0 / n as f64;
        g *= inv_n;
        h *= inv_n;
        for a in 0..=d {
            for b in 0..a {
                h[(b, a)] = h[(a, b)];
            }
        }
        for j in 0..d {
            g[j] += self.penalty * theta[j];
            h[(j, j)] += self.penalty;
        }
        (g, h)
    }
}

fn newton_direction(h: DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let scale = h.diagonal().max().max(1e-300);
    let mut ridge = 0.0;
    loop {
        let mut hr = h.clone();
        for a in 0..hr.nrows() {
            hr[(a, a)] += ridge;
        }
        if let Some(ch) = hr.cholesky() {
            return -ch.solve(g);
        }
        ridge = if ridge == 0.0 { 1e-12 * scale } else { ridge * 10.0 };
        if ridge > scale * 1e6 {
            return -g.clone();
        }
    }
}

pub fn train_logreg(x: &Matrix, y: &[u8], params: &LogRegParams) -> Result<LogisticRegression> {
    let n = x.n_rows();
    if n == 0 || y.iter().all(|&v| v == y[0]) {
        return Err(Error::DegenerateLabels);
    }
    let d = x.n_cols();
    let prob = Problem {
        x,
        y,
        penalty: 1.0 / (params.c * n as f64),
    };
    let mut theta = DVector::zeros(d + 1);
    let mut f = prob.objective(&theta);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < params.max_iter {
        let (g, h) = prob.gradient_hessian(&theta);
        if g.amax() < params.tol {
            converged = true;
            break;
        }
        iterations += 1;
        let dir = newton_direction(h, &g);
        let slope = g.dot(&dir);
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..50 {
            let cand = &theta + &dir * step;
            let fc = prob.objective(&cand);
            if fc <= f + 1e-4 * step * slope {
                theta = cand;
                f = fc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if !converged {
        converged = prob.gradient_hessian(&theta).0.amax() < params.tol;
    }
    Ok(LogisticRegression {
        weights: theta.rows(0, d).iter().copied().collect(),
        intercept: theta[d],
        converged,
        iterations,
    })
}
