//! Gradient boosting on the logistic loss.
//!
//! Both variants fit an additive model `F(x) = F0 + Σ f_m(x)` on the
//! log-odds scale. Stage trees are grown on the loss gradient and each leaf
//! takes a damped Newton step `lr · Σ(y - p) / Σ p(1 - p)`. A leaf step that
//! would raise that leaf's loss is halved until it does not, so the training
//! loss never increases from one stage to the next.
//!
//! `gbdt` grows depth-limited trees with exact splits on the residuals.
//! `hist_gb` bins every feature into at most 255 buckets and grows trees
//! leaf-wise, always splitting the leaf with the largest gain.

use serde::{Deserialize, Serialize};

use super::params::{GbdtParams, HistGbParams};
use super::tree::{midpoint, partition, Node, SplitConstraints, Tree, GAIN_EPS};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

const BACKTRACK_STEPS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedTrees {
    /// Log-odds of the training base rate.
    pub init: f64,
    pub learning_rate: f64,
    /// Leaf values already include the learning rate and any damping.
    pub stages: Vec<Tree<f64>>,
    /// Mean training loss before the first stage and after each stage.
    pub train_loss: Vec<f64>,
}

impl BoostedTrees {
    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.init + self.stages.iter().map(|t| *t.leaf(x)).sum::<f64>()
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        sigmoid(self.raw_score(x))
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Logistic loss of raw score `f` against label `y`: `log(1 + e^f) - y f`.
pub fn logistic_loss(f: f64, y: u8) -> f64 {
    let softplus = f.max(0.0) + (-f.abs()).exp().ln_1p();
    softplus - f64::from(y) * f
}

fn mean_loss(f: &[f64], y: &[u8]) -> f64 {
    f.iter().zip(y).map(|(&f, &y)| logistic_loss(f, y)).sum::<f64>() / f.len() as f64
}

fn base_log_odds(y: &[u8]) -> Result<f64> {
    let pos = y.iter().filter(|&&v| v == 1).count();
    if pos == 0 || pos == y.len() {
        return Err(Error::DegenerateLabels);
    }
    let p = pos as f64 / y.len() as f64;
    Ok((p / (1.0 - p)).ln())
}

/// Damped Newton step for the rows of one leaf; updates `f` in place and
/// returns the step.
fn leaf_step(rows: &[usize], f: &mut [f64], y: &[u8], lr: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for &i in rows {
        let p = sigmoid(f[i]);
        num += f64::from(y[i]) - p;
        den += p * (1.0 - p);
    }
    if den < 1e-150 {
        return 0.0;
    }
    let leaf_loss = |step: f64| rows.iter().map(|&i| logistic_loss(f[i] + step, y[i])).sum::<f64>();
    let base = leaf_loss(0.0);
    let mut step = lr * num / den;
    let mut accepted = false;
    for _ in 0..BACKTRACK_STEPS {
        if leaf_loss(step) <= base {
            accepted = true;
            break;
        }
        step *= 0.5;
    }
    if !accepted {
        return 0.0;
    }
    for &i in rows {
        f[i] += step;
    }
    step
}

/// Fits leaf values for a grown stage tree whose leaves hold placeholders.
fn finish_stage(
    mut nodes: Vec<Node<f64>>,
    leaves: Vec<(usize, Vec<usize>)>,
    f: &mut [f64],
    y: &[u8],
    lr: f64,
) -> Tree<f64> {
    for (id, rows) in leaves {
        nodes[id] = Node::Leaf(leaf_step(&rows, f, y, lr));
    }
    Tree::from_nodes(nodes)
}

// ---- exact regression trees ----

struct RegressionGrower<'a> {
    x: &'a Matrix,
    r: &'a [f64],
    constraints: SplitConstraints,
    nodes: Vec<Node<f64>>,
    leaves: Vec<(usize, Vec<usize>)>,
    buf: Vec<(f64, f64)>,
}

impl RegressionGrower<'_> {
    /// Highest squared-error reduction split; ties keep the lowest feature,
    /// then the lowest threshold.
    fn best_split(&mut self, rows: &[usize]) -> Option<(usize, f64)> {
        let n = rows.len();
        let min_leaf = self.constraints.min_samples_leaf;
        let total: f64 = rows.iter().map(|&i| self.r[i]).sum();
        let parent = total * total / n as f64;
        let mut best: Option<(usize, f64, f64)> = None;
        for feat in 0..self.x.n_cols() {
            self.buf.clear();
            self.buf.extend(rows.iter().map(|&i| (self.x.get(i, feat), self.r[i])));
            self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = 0.0;
            for i in 0..n - 1 {
                left += self.buf[i].1;
                let nl = i + 1;
                if self.buf[i].0 >= self.buf[i + 1].0 || nl < min_leaf || n - nl < min_leaf {
                    continue;
                }
                let right = total - left;
                let gain = left * left / nl as f64 + right * right / (n - nl) as f64 - parent;
                if gain > GAIN_EPS && best.is_none_or(|b| gain > b.2) {
                    best = Some((feat, midpoint(self.buf[i].0, self.buf[i + 1].0), gain));
                }
            }
        }
        best.map(|(f, t, _)| (f, t))
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(0.0));
        let split = if self.constraints.can_split(rows.len(), depth) {
            self.best_split(rows)
        } else {
            None
        };
        let Some((feature, threshold)) = split else {
            self.leaves.push((id, rows.to_vec()));
            return id;
        };
        let mid = partition(rows, |i| self.x.get(i, feature) <= threshold);
        let (l, r) = rows.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

pub fn train_gbdt(x: &Matrix, y: &[u8], params: &GbdtParams) -> Result<BoostedTrees> {
    let init = base_log_odds(y)?;
    let n = x.n_rows();
    let mut f = vec![init; n];
    let mut train_loss = vec![mean_loss(&f, y)];
    let constraints = SplitConstraints {
        max_depth: Some(params.max_depth),
        min_samples_split: params.min_samples_split,
        min_samples_leaf: params.min_samples_leaf,
    };
    let mut stages = Vec::with_capacity(params.n_estimators);
    let mut r = vec![0.0; n];
    for _ in 0..params.n_estimators {
        for i in 0..n {
            r[i] = f64::from(y[i]) - sigmoid(f[i]);
        }
        let mut g = RegressionGrower {
            x,
            r: &r,
            constraints,
            nodes: Vec::new(),
            leaves: Vec::new(),
            buf: Vec::with_capacity(n),
        };
        let mut rows: Vec<usize> = (0..n).collect();
        g.grow(&mut rows, 0);
        let (nodes, leaves) = (g.nodes, g.leaves);
        stages.push(finish_stage(nodes, leaves, &mut f, y, params.learning_rate));
        train_loss.push(mean_loss(&f, y));
    }
    Ok(BoostedTrees {
        init,
        learning_rate: params.learning_rate,
        stages,
        train_loss,
    })
}

// ---- histogram trees ----

/// Features discretised into at most 256 ordered bins. A value falls in bin
/// `b` when exactly `b` thresholds lie below it, so `bin <= b` is the same
/// test as `value <= thresholds[b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMatrix {
    n_rows: usize,
    /// Column-major bin codes.
    codes: Vec<u8>,
    pub thresholds: Vec<Vec<f64>>,
}

impl BinnedMatrix {
    pub fn new(x: &Matrix, max_bins: usize) -> Self {
        let n = x.n_rows();
        let mut codes = Vec::with_capacity(n * x.n_cols());
        let mut thresholds = Vec::with_capacity(x.n_cols());
        for f in 0..x.n_cols() {
            let col = x.column(f);
            let t = bin_thresholds(&col, max_bins);
            codes.extend(col.iter().map(|&v| t.partition_point(|&c| c < v) as u8));
            thresholds.push(t);
        }
        BinnedMatrix {
            n_rows: n,
            codes,
            thresholds,
        }
    }

    #[inline]
    pub fn code(&self, row: usize, feature: usize) -> u8 {
        self.codes[feature * self.n_rows + row]
    }

    pub fn n_bins(&self, feature: usize) -> usize {
        self.thresholds[feature].len() + 1
    }

    pub fn n_features(&self) -> usize {
        self.thresholds.len()
    }
}

/// Midpoints between consecutive distinct values when there are at most
/// `max_bins` of them, otherwise midpoints at evenly spaced quantiles.
pub fn bin_thresholds(values: &[f64], max_bins: usize) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() <= max_bins {
        return distinct.windows(2).map(|w| midpoint(w[0], w[1])).collect();
    }
    let n = sorted.len();
    let mut out: Vec<f64> = Vec::with_capacity(max_bins - 1);
    for k in 1..max_bins {
        let idx = k * n / max_bins;
        if idx == 0 || sorted[idx - 1] >= sorted[idx] {
            continue;
        }
        let t = midpoint(sorted[idx - 1], sorted[idx]);
        if out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistSplit {
    pub feature: usize,
    /// Rows with `code <= bin` go left.
    pub bin: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct HistConstraints {
    pub min_samples_leaf: usize,
    pub min_hessian_leaf: f64,
}

#[derive(Clone, Copy, Default)]
struct Bucket {
    g: f64,
    h: f64,
    n: usize,
}

/// Best second-order split of `rows` over the binned features: maximises
/// `GL²/HL + GR²/HR - G²/H`. Ties keep the lowest feature, then the lowest
/// bin. Only strictly positive gains count.
pub fn hist_best_split(
    bins: &BinnedMatrix,
    g: &[f64],
    h: &[f64],
    rows: &[usize],
    c: &HistConstraints,
) -> Option<HistSplit> {
    let mut best: Option<HistSplit> = None;
    let (gt, ht): (f64, f64) = rows.iter().fold((0.0, 0.0), |(a, b), &i| (a + g[i], b + h[i]));
    if ht <= 0.0 {
        return None;
    }
    let parent = gt * gt / ht;
    let n = rows.len();
    let mut hist = Vec::new();
    for f in 0..bins.n_features() {
        hist.clear();
        hist.resize(bins.n_bins(f), Bucket::default());
        for &i in rows {
            let b = &mut hist[bins.code(i, f) as usize];
            b.g += g[i];
            b.h += h[i];
            b.n += 1;
        }
        let mut left = Bucket::default();
        for (b, bucket) in hist.iter().enumerate().take(hist.len() - 1) {
            left.g += bucket.g;
            left.h += bucket.h;
            left.n += bucket.n;
            let (gr, hr, nr) = (gt - left.g, ht - left.h, n - left.n);
            if left.n < c.min_samples_leaf || nr < c.min_samples_leaf {
                continue;
            }
            if left.h < c.min_hessian_leaf || hr < c.min_hessian_leaf || left.h <= 0.0 || hr <= 0.0 {
                continue;
            }
            let gain = left.g * left.g / left.h + gr * gr / hr - parent;
            if gain > GAIN_EPS && best.is_none_or(|s| gain > s.gain) {
                best = Some(HistSplit {
                    feature: f,
                    bin: b,
                    gain,
                });
            }
        }
    }
    best
}

struct OpenLeaf {
    node: usize,
    rows: Vec<usize>,
    depth: usize,
    split: Option<HistSplit>,
}

pub fn train_hist_gb(x: &Matrix, y: &[u8], params: &HistGbParams) -> Result<BoostedTrees> {
    let init = base_log_odds(y)?;
    let n = x.n_rows();
    let bins = BinnedMatrix::new(x, params.max_bins);
    let c = HistConstraints {
        min_samples_leaf: params.min_samples_leaf,
        min_hessian_leaf: params.min_hessian_leaf,
    };
    let mut f = vec![init; n];
    let mut train_loss = vec![mean_loss(&f, y)];
    let mut stages = Vec::with_capacity(params.max_iter);
    let (mut g, mut h) = (vec![0.0; n], vec![0.0; n]);

    for _ in 0..params.max_iter {
        for i in 0..n {
            let p = sigmoid(f[i]);
            g[i] = p - f64::from(y[i]);
            h[i] = p * (1.0 - p);
        }
        let find = |rows: &[usize], depth: usize| {
            if depth >= params.max_depth {
                None
            } else {
                hist_best_split(&bins, &g, &h, rows, &c)
            }
        };
        let all: Vec<usize> = (0..n).collect();
        let mut nodes = vec![Node::Leaf(0.0)];
        let mut open = vec![OpenLeaf {
            split: find(&all, 0),
            node: 0,
            rows: all,
            depth: 0,
        }];
        let mut closed = Vec::new();
        while open.len() + closed.len() < params.max_leaves {
            // largest gain first, lowest node id on ties
            let pick = open
                .iter()
                .enumerate()
                .filter_map(|(k, l)| l.split.map(|s| (k, s.gain, l.node)))
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.2.cmp(&a.2)));
            let Some((k, _, _)) = pick else { break };
            let leaf = open.swap_remove(k);
            let s = leaf.split.expect("picked leaf has a split");
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = leaf
                .rows
                .iter()
                .partition(|&&i| bins.code(i, s.feature) as usize <= s.bin);
            let (l, r) = (nodes.len(), nodes.len() + 1);
            nodes.push(Node::Leaf(0.0));
            nodes.push(Node::Leaf(0.0));
            nodes[leaf.node] = Node::Split {
                feature: s.feature,
                threshold: bins.thresholds[s.feature][s.bin],
                left: l,
                right: r,
            };
            for (node, rows) in [(l, left_rows), (r, right_rows)] {
                let split = find(&rows, leaf.depth + 1);
                let child = OpenLeaf {
                    node,
                    rows,
                    depth: leaf.depth + 1,
                    split,
                };
                if child.split.is_some() {
                    open.push(child);
                } else {
                    closed.push(child);
                }
            }
        }
        let leaves = open.into_iter().chain(closed).map(|l| (l.node, l.rows)).collect();
        stages.push(finish_stage(nodes, leaves, &mut f, y, params.learning_rate));
        train_loss.push(mean_loss(&f, y));
    }
    Ok(BoostedTrees {
        init,
        learning_rate: params.learning_rate,
        stages,
        train_loss,
    })
}
