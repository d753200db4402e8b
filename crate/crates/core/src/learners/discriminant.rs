//! Gaussian discriminant analysis: linear with a shared shrunk covariance,
//! quadratic with one covariance per class.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::boosting::sigmoid;
use super::params::{LdaParams, QdaParams, Shrinkage};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

struct ClassData {
    rows: Vec<Vec<f64>>,
    mean: Vec<f64>,
}

fn split_classes(x: &Matrix, y: &[u8]) -> Result<[ClassData; 2]> {
    let d = x.n_cols();
    let mut parts = [Vec::new(), Vec::new()];
    for (row, &label) in x.rows().zip(y) {
        parts[usize::from(label == 1)].push(row.to_vec());
    }
    if parts[0].is_empty() || parts[1].is_empty() {
        return Err(Error::DegenerateLabels);
    }
    for (c, p) in parts.iter().enumerate() {
        if p.len() < 2 {
            return Err(Error::SingularCovariance { class: c as u8 });
        }
    }
    Ok(parts.map(|rows| {
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for r in &rows {
            for j in 0..d {
                mean[j] += r[j] / n;
            }
        }
        ClassData { rows, mean }
    }))
}

/// Centred data matrix (rows × features).
fn centred(c: &ClassData) -> DMatrix<f64> {
    let d = c.mean.len();
    DMatrix::from_fn(c.rows.len(), d, |i, j| c.rows[i][j] - c.mean[j])
}

/// Ledoit-Wolf shrinkage intensity for centred data `x` (n × p).
pub fn ledoit_wolf_shrinkage(x: &DMatrix<f64>) -> f64 {
    let (n, p) = (x.nrows() as f64, x.ncols() as f64);
    let x2 = x.map(|v| v * v);
    let emp_trace: f64 = x2.sum() / n;
    let mu = emp_trace / p;
    let beta_sum = (x2.transpose() * &x2).sum();
    let delta_sum = (x.transpose() * x).map(|v| v * v).sum() / (n * n);
    let beta = (beta_sum / n - delta_sum) / (p * n);
    let delta = (delta_sum - 2.0 * mu * emp_trace + p * mu * mu) / p;
    let beta = beta.min(delta);
    if beta == 0.0 {
        0.0
    } else {
        beta / delta
    }
}

/// Class covariance (divisor n) shrunk towards a scaled identity on the
/// standardised features, then mapped back to the original scale.
fn shrunk_covariance(c: &ClassData, shrinkage: Shrinkage) -> DMatrix<f64> {
    let xc = centred(c);
    let n = xc.nrows() as f64;
    let d = xc.ncols();
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            let s = (xc.column(j).norm_squared() / n).sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let z = DMatrix::from_fn(xc.nrows(), d, |i, j| xc[(i, j)] / scale[j]);
    let emp = z.transpose() * &z / n;
    let s = match shrinkage {
        Shrinkage::None => 0.0,
        Shrinkage::Auto => ledoit_wolf_shrinkage(&z),
        Shrinkage::Fixed(s) => s,
    };
    let mu = emp.trace() / d as f64;
    let mut shrunk = emp * (1.0 - s);
    for j in 0..d {
        shrunk[(j, j)] += s * mu;
    }
    DMatrix::from_fn(d, d, |a, b| shrunk[(a, b)] * scale[a] * scale[b])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lda {
    pub coef: Vec<f64>,
    pub intercept: f64,
}

impl Lda {
    pub fn decision(&self, x: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.decision(x))
    }
}

pub fn train_lda(x: &Matrix, y: &[u8], params: &LdaParams) -> Result<Lda> {
    let classes = split_classes(x, y)?;
    let n = y.len() as f64;
    let priors = classes.each_ref().map(|c| c.rows.len() as f64 / n);
    let d = x.n_cols();
    let mut pooled = DMatrix::zeros(d, d);
    for (c, prior) in classes.iter().zip(priors) {
        pooled += shrunk_covariance(c, params.shrinkage) * prior;
    }
    let means = classes.each_ref().map(|c| DVector::from_column_slice(&c.mean));
    // Σ⁻¹ μ_k for both classes, with a growing ridge if Σ is singular
    let scale = pooled.diagonal().max().max(f64::MIN_POSITIVE);
    let mut ridge = 0.0;
    let solved = loop {
        let mut s = pooled.clone();
        for j in 0..d {
            s[(j, j)] += ridge;
        }
        if let Some(ch) = s.cholesky() {
            break means.each_ref().map(|m| ch.solve(m));
        }
        ridge = if ridge == 0.0 { 1e-12 * scale } else { ridge * 10.0 };
        if ridge > 1e-2 * scale {
            return Err(Error::SingularCovariance { class: 0 });
        }
    };
    let coef = &solved[1] - &solved[0];
    let half = |k: usize| -0.5 * means[k].dot(&solved[k]) + priors[k].ln();
    Ok(Lda {
        coef: coef.iter().copied().collect(),
        intercept: half(1) - half(0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdaClass {
    pub mean: Vec<f64>,
    /// Eigenvectors of the class covariance, stored column-major (d × d).
    pub rotation: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub log_prior: f64,
}

impl QdaClass {
    fn log_likelihood(&self, x: &[f64]) -> f64 {
        let d = self.mean.len();
        let mut quad = 0.0;
        for k in 0..d {
            let col = &self.rotation[k * d..(k + 1) * d];
            let proj: f64 = col.iter().zip(x).zip(&self.mean).map(|((r, v), m)| r * (v - m)).sum();
            quad += proj * proj / self.eigenvalues[k];
        }
        let log_det: f64 = self.eigenvalues.iter().map(|l| l.ln()).sum();
        self.log_prior - 0.5 * (log_det + quad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qda {
    pub classes: [QdaClass; 2],
}

impl Qda {
    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.classes[1].log_likelihood(x) - self.classes[0].log_likelihood(x))
    }
}

pub fn train_qda(x: &Matrix, y: &[u8], params: &QdaParams) -> Result<Qda> {
    let classes = split_classes(x, y)?;
    let n = y.len() as f64;
    let d = x.n_cols();
    let mut fitted = Vec::with_capacity(2);
    for (k, c) in classes.iter().enumerate() {
        let xc = centred(c);
        let cov = xc.transpose() * &xc / (xc.nrows() as f64 - 1.0);
        let eig = cov.symmetric_eigen();
        let top = eig.eigenvalues.max();
        if !(top > 0.0) {
            return Err(Error::SingularCovariance { class: k as u8 });
        }
        let floor = params.tol * top;
        let eigenvalues = eig
            .eigenvalues
            .iter()
            .map(|&l| {
                let l = (1.0 - params.reg_param) * l + params.reg_param;
                l.max(floor)
            })
            .collect();
        fitted.push(QdaClass {
            mean: c.mean.clone(),
            rotation: eig.eigenvectors.as_slice().to_vec(),
            eigenvalues,
            log_prior: (c.rows.len() as f64 / n).ln(),
        });
        debug_assert_eq!(fitted[k].rotation.len(), d * d);
    }
    let c1 = fitted.pop().unwrap();
    let c0 = fitted.pop().unwrap();
    Ok(Qda { classes: [c0, c1] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand_distr::{Distribution, Normal};

    fn gaussians(n: usize, seed: u64, sd1: f64) -> (Matrix, Vec<u8>) {
        let mut r = rng::seeded(seed);
        let z = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let c = u8::from(i % 3 == 0);
            let (m, s) = if c == 1 { (1.5, sd1) } else { (0.0, 1.0) };
            rows.push([
                m + s * z.sample(&mut r),
                m + s * z.sample(&mut r) + 0.3 * z.sample(&mut r),
            ]);
            y.push(c);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn shrinkage_in_unit_interval() {
        let (x, _) = gaussians(300, 1, 1.0);
        let c = ClassData {
            rows: x.rows().map(<[f64]>::to_vec).collect(),
            mean: {
                let n = x.n_rows() as f64;
                (0..2).map(|j| x.column(j).iter().sum::<f64>() / n).collect()
            },
        };
        let s = ledoit_wolf_shrinkage(&centred(&c));
        assert!((0.0..=1.0).contains(&s), "{s}");
    }

    #[test]
    fn ledoit_wolf_hand_case() {
        // two uncorrelated unit-variance columns already at the target:
        // rows (±1, ±1) in all four sign patterns
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0]);
        // emp = I, mu = 1, delta = 0 -> beta = min(beta, 0) = 0
        assert_eq!(ledoit_wolf_shrinkage(&x), 0.0);
    }

    #[test]
    fn lda_without_shrinkage_matches_closed_form() {
        // equal spherical covariances: boundary is the perpendicular
        // bisector shifted by the log prior ratio
        let (x, y) = gaussians(600, 2, 1.0);
        let m = train_lda(
            &x,
            &y,
            &LdaParams {
                shrinkage: Shrinkage::None,
            },
        )
        .unwrap();
        let classes = split_classes(&x, &y).unwrap();
        let n = 600.0;
        let mut pooled = DMatrix::zeros(2, 2);
        for c in &classes {
            let xc = centred(c);
            pooled += xc.transpose() * &xc / n;
        }
        let inv = pooled.try_inverse().unwrap();
        let dm = DVector::from_vec(vec![
            classes[1].mean[0] - classes[0].mean[0],
            classes[1].mean[1] - classes[0].mean[1],
        ]);
        let w = inv * dm;
        assert!((w[0] - m.coef[0]).abs() < 1e-9 && (w[1] - m.coef[1]).abs() < 1e-9);
    }

    #[test]
    fn lda_separates_shifted_gaussians() {
        let (x, y) = gaussians(600, 3, 1.0);
        let m = train_lda(&x, &y, &LdaParams::default()).unwrap();
        let hits = (0..600).filter(|&i| u8::from(m.score(x.row(i)) >= 0.5) == y[i]).count();
        assert!(hits > 480, "{hits}");
    }

    #[test]
    fn qda_prefers_wide_class_far_out() {
        let (x, y) = gaussians(900, 4, 3.0);
        let m = train_qda(&x, &y, &QdaParams::default()).unwrap();
        assert!(m.score(&[-8.0, -8.0]) > 0.5);
        assert!(m.score(&[0.0, 0.0]) < 0.5);
    }

    #[test]
    fn qda_log_likelihood_matches_direct_density() {
        let (x, y) = gaussians(300, 5, 2.0);
        let m = train_qda(
            &x,
            &y,
            &QdaParams {
                tol: 0.0,
                reg_param: 0.0,
            },
        )
        .unwrap();
        let classes = split_classes(&x, &y).unwrap();
        let c = &classes[1];
        let xc = centred(c);
        let cov = xc.transpose() * &xc / (xc.nrows() as f64 - 1.0);
        let q = [0.4, -1.1];
        let diff = DVector::from_vec(vec![q[0] - c.mean[0], q[1] - c.mean[1]]);
        let quad = (diff.transpose() * cov.clone().try_inverse().unwrap() * &diff)[0];
        let want = (c.rows.len() as f64 / 300.0).ln() - 0.5 * (cov.determinant().ln() + quad);
        assert!((m.classes[1].log_likelihood(&q) - want).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(
            train_qda(&x, &[0, 0, 1], &QdaParams::default()),
            Err(Error::SingularCovariance { class: 1 })
        ));
        assert!(matches!(
            train_lda(&x, &[0, 0, 0], &LdaParams::default()),
            Err(Error::DegenerateLabels)
        ));
        let x = Matrix::from_rows(&[[0.0], [0.0], [1.0], [1.0]]).unwrap();
        assert!(matches!(
            train_qda(&x, &[0, 0, 1, 1], &QdaParams::default()),
            Err(Error::SingularCovariance { class: 0 })
        ));
    }
}
