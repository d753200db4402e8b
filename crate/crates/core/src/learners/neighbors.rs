use serde::{Deserialize, Serialize};

use super::params::KnnParams;
use crate::matrix::Matrix;

/// Brute-force k-nearest-neighbour vote over the stored training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    pub k: usize,
    pub p: f64,
    pub x: Matrix,
    pub y: Vec<u8>,
}

impl Knn {
    pub fn fit(x: &Matrix, y: &[u8], params: &KnnParams) -> Knn {
        Knn {
            k: params.n_neighbors,
            p: params.p,
            x: x.clone(),
            y: y.to_vec(),
        }
    }

    /// Monotone in the Minkowski distance; the root is skipped.
    fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.p == 2.0 {
            a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
        } else if self.p == 1.0 {
            a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum()
        } else {
            a.iter().zip(b).map(|(u, v)| (u - v).abs().powf(self.p)).sum()
        }
    }

    /// Indices of the `k` nearest training rows, closest first; equal
    /// distances keep the lower index.
    pub fn neighbors(&self, q: &[f64]) -> Vec<usize> {
        let k = self.k.min(self.x.n_rows());
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        for (i, row) in self.x.rows().enumerate() {
            let d = self.dist(q, row);
            if best.len() == k && d >= best[k - 1].0 {
                continue;
            }
            let pos = best.partition_point(|&(bd, _)| bd <= d);
            best.insert(pos, (d, i));
            best.truncate(k);
        }
        best.into_iter().map(|(_, i)| i).collect()
    }

    /// Fraction of positive labels among the neighbours.
    pub fn score(&self, q: &[f64]) -> f64 {
        let nb = self.neighbors(q);
        let pos = nb.iter().filter(|&&i| self.y[i] == 1).count();
        pos as f64 / nb.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> (Matrix, Vec<u8>) {
        let x = Matrix::from_rows(&(0..10).map(|i| [f64::from(i)]).collect::<Vec<_>>()).unwrap();
        (x, vec![0, 0, 0, 1, 1, 0, 1, 1, 1, 1])
    }

    #[test]
    fn k1_returns_own_label() {
        let (x, y) = line();
        let m = Knn::fit(
            &x,
            &y,
            &KnnParams {
                n_neighbors: 1,
                ..Default::default()
            },
        );
        for i in 0..10 {
            assert_eq!(m.score(x.row(i)), f64::from(y[i]));
        }
    }

    #[test]
    fn vote_fraction() {
        let (x, y) = line();
        let m = Knn::fit(&x, &y, &KnnParams::default());
        // nearest five to 2.0: 2, 1, 3, 0, 4 -> labels 0 0 1 0 1
        assert_eq!(m.neighbors(&[2.0]), vec![2, 1, 3, 0, 4]);
        assert_eq!(m.score(&[2.0]), 0.4);
    }

    #[test]
    fn ties_keep_lower_index() {
        let x = Matrix::from_rows(&[[1.0], [-1.0], [1.0]]).unwrap();
        let m = Knn::fit(
            &x,
            &[0, 1, 1],
            &KnnParams {
                n_neighbors: 2,
                ..Default::default()
            },
        );
        assert_eq!(m.neighbors(&[0.0]), vec![0, 1]);
    }

    #[test]
    fn manhattan_metric() {
        let x = Matrix::from_rows(&[[0.0, 3.0], [2.0, 2.0]]).unwrap();
        let m = Knn::fit(
            &x,
            &[0, 1],
            &KnnParams {
                n_neighbors: 1,
                p: 1.0,
                ..Default::default()
            },
        );
        // L1: 3 vs 4; L2: 3 vs 2.83
        assert_eq!(m.neighbors(&[0.0, 0.0]), vec![0]);
        let m = Knn::fit(
            &x,
            &[0, 1],
            &KnnParams {
                n_neighbors: 1,
                ..Default::default()
            },
        );
        assert_eq!(m.neighbors(&[0.0, 0.0]), vec![1]);
    }

    #[test]
    fn fewer_rows_than_k() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let m = Knn::fit(&x, &[1, 0], &KnnParams::default());
        assert_eq!(m.score(&[5.0]), 0.5);
    }
}
