//! Binary CART trees with Gini splits.
//!
//! Trees are stored flat: node 0 is the root and a split node sends a row
//! left when `x[feature] <= threshold`. The same container backs the
//! classification trees here and the regression trees used by boosting.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::Rng;

/// Gains at or below this count as zero.
pub(crate) const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node<L> {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf(L),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree<L> {
    nodes: Vec<Node<L>>,
}

impl<L> Tree<L> {
    pub(crate) fn from_nodes(nodes: Vec<Node<L>>) -> Self {
        debug_assert!(!nodes.is_empty());
        Tree { nodes }
    }

    pub fn nodes(&self) -> &[Node<L>] {
        &self.nodes
    }

    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
                Node::Leaf(_) => return i,
            }
        }
    }

    pub fn leaf(&self, x: &[f64]) -> &L {
        match &self.nodes[self.leaf_index(x)] {
            Node::Leaf(l) => l,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// Length of the longest root-to-leaf path in edges.
    pub fn depth(&self) -> usize {
        fn walk<L>(nodes: &[Node<L>], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, *left).max(walk(nodes, *right)),
            }
        }
        walk(&self.nodes, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassLeaf {
    /// Weighted `[negatives, positives]` that reached the leaf.
    pub counts: [f64; 2],
    pub probability: f64,
}

impl ClassLeaf {
    fn from_counts(counts: [f64; 2]) -> Self {
        ClassLeaf {
            counts,
            probability: counts[1] / (counts[0] + counts[1]),
        }
    }
}

pub type TreeNode = Node<ClassLeaf>;
pub type ClassTree = Tree<ClassLeaf>;

impl ClassTree {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.leaf(x).probability
    }
}

pub fn gini_impurity(counts: [usize; 2]) -> Result<f64> {
    if counts[0] + counts[1] == 0 {
        return Err(Error::EmptyNode);
    }
    Ok(gini(counts[0] as f64, counts[1] as f64))
}

#[inline]
fn gini(w0: f64, w1: f64) -> f64 {
    let w = w0 + w1;
    if w <= 0.0 {
        return 0.0;
    }
    let (p0, p1) = (w0 / w, w1 / w);
    1.0 - (p0 * p0 + p1 * p1)
}

/// Largest value in `[a, b)` halfway between them; used as split point
/// between consecutive distinct sorted values.
#[inline]
pub(crate) fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) * 0.5;
    if m < b {
        m
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConstraints {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub min_samples_leaf: usize,
}

impl Default for SplitConstraints {
    fn default() -> Self {
        SplitConstraints {
            max_depth: None,
            min_samples_split: 2,
            min_samples_leaf: 1,
        }
    }
}

impl SplitConstraints {
    pub fn validate(&self) -> Result<()> {
        if self.min_samples_split < 2 {
            return Err(Error::InvalidHyperparameter("min_samples_split must be >= 2".into()));
        }
        if self.min_samples_leaf < 1 {
            return Err(Error::InvalidHyperparameter("min_samples_leaf must be >= 1".into()));
        }
        if self.max_depth == Some(0) {
            return Err(Error::InvalidHyperparameter("max_depth must be >= 1".into()));
        }
        Ok(())
    }

    pub(crate) fn can_split(&self, n_rows: usize, depth: usize) -> bool {
        n_rows >= self.min_samples_split
            && n_rows >= 2 * self.min_samples_leaf
            && self.max_depth.is_none_or(|d| depth < d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            MaxFeatures::All => n_features,
            MaxFeatures::Sqrt => ((n_features as f64).sqrt().floor() as usize).max(1),
            MaxFeatures::Count(c) => c.clamp(1, n_features.max(1)),
        }
    }
}

/// How candidate thresholds are chosen per feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ThresholdRule {
    /// Every midpoint between consecutive distinct values.
    Best,
    /// One uniform draw between the node's min and max (extremely
    /// randomized trees).
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartParams {
    pub constraints: SplitConstraints,
    pub max_features: MaxFeatures,
    pub rule: ThresholdRule,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            constraints: SplitConstraints::default(),
            max_features: MaxFeatures::All,
            rule: ThresholdRule::Best,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

struct SortedColumn {
    buf: Vec<(f64, u8, f64)>,
}

impl SortedColumn {
    fn new() -> Self {
        SortedColumn { buf: Vec::new() }
    }

    fn fill(&mut self, x: &Matrix, y: &[u8], w: &[f64], rows: &[usize], feature: usize) {
        self.buf.clear();
        self.buf.extend(rows.iter().map(|&r| (x.get(r, feature), y[r], w[r])));
        self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    }
}

fn totals(y: &[u8], w: &[f64], rows: &[usize]) -> [f64; 2] {
    let mut t = [0.0; 2];
    for &r in rows {
        t[usize::from(y[r] == 1)] += w[r];
    }
    t
}

/// Best Gini split of one feature over every midpoint, or `None` when no
/// boundary satisfies `min_samples_leaf`. Ties keep the lowest threshold.
fn scan_best(col: &SortedColumn, total: [f64; 2], min_leaf: usize, feature: usize) -> Option<Split> {
    let buf = &col.buf;
    let n = buf.len();
    let w_all = total[0] + total[1];
    let parent = gini(total[0], total[1]);
    let mut left = [0.0; 2];
    let mut best: Option<Split> = None;
    for i in 0..n.saturating_sub(1) {
        left[usize::from(buf[i].1 == 1)] += buf[i].2;
        let n_left = i + 1;
        if buf[i].0 >= buf[i + 1].0 || n_left < min_leaf || n - n_left < min_leaf {
            continue;
        }
        let right = [total[0] - left[0], total[1] - left[1]];
        let (wl, wr) = (left[0] + left[1], right[0] + right[1]);
        let gain = parent - (wl / w_all) * gini(left[0], left[1]) - (wr / w_all) * gini(right[0], right[1]);
        if best.is_none_or(|b| gain > b.gain) {
            best = Some(Split {
                feature,
                threshold: midpoint(buf[i].0, buf[i + 1].0),
                gain,
            });
        }
    }
    best
}

/// Highest-gain Gini split over `features` for the node holding `rows`.
///
/// Candidate thresholds are midpoints between consecutive distinct values.
/// Ties go to the lowest feature index, then the lowest threshold. Returns
/// `None` unless some split has strictly positive gain and leaves at least
/// `min_samples_leaf` rows on each side.
pub fn best_split(
    x: &Matrix,
    y: &[u8],
    rows: &[usize],
    features: &[usize],
    constraints: &SplitConstraints,
) -> Option<Split> {
    let w = vec![1.0; x.n_rows()];
    let mut sorted: Vec<usize> = features.to_vec();
    sorted.sort_unstable();
    best_split_weighted(
        x,
        y,
        &w,
        rows,
        &sorted,
        constraints.min_samples_leaf,
        &mut SortedColumn::new(),
    )
    .filter(|s| s.gain > GAIN_EPS)
}

fn best_split_weighted(
    x: &Matrix,
    y: &[u8],
    w: &[f64],
    rows: &[usize],
    features: &[usize],
    min_leaf: usize,
    col: &mut SortedColumn,
) -> Option<Split> {
    let total = totals(y, w, rows);
    let mut best: Option<Split> = None;
    for &f in features {
        col.fill(x, y, w, rows, f);
        if let Some(s) = scan_best(col, total, min_leaf, f) {
            if best.is_none_or(|b| s.gain > b.gain) {
                best = Some(s);
            }
        }
    }
    best
}

/// Split on `feature` at the distinct-value boundary closest to the median
/// row, respecting `min_leaf`.
fn median_split(col: &SortedColumn, min_leaf: usize, feature: usize) -> Option<Split> {
    let buf = &col.buf;
    let n = buf.len();
    let half = n as f64 / 2.0;
    (0..n.saturating_sub(1))
        .filter(|&i| buf[i].0 < buf[i + 1].0 && i + 1 >= min_leaf && n - i - 1 >= min_leaf)
        .min_by(|&a, &b| {
            let da = ((a + 1) as f64 - half).abs();
            let db = ((b + 1) as f64 - half).abs();
            da.total_cmp(&db).then(a.cmp(&b))
        })
        .map(|i| Split {
            feature,
            threshold: midpoint(buf[i].0, buf[i + 1].0),
            gain: 0.0,
        })
}

fn random_split(
    x: &Matrix,
    y: &[u8],
    w: &[f64],
    rows: &[usize],
    feature: usize,
    min_leaf: usize,
    (lo, hi): (f64, f64),
    rng: &mut Rng,
) -> Option<Split> {
    let threshold = rng.random_range(lo..hi);
    let total = totals(y, w, rows);
    let mut left = [0.0; 2];
    let mut n_left = 0;
    for &r in rows {
        if x.get(r, feature) <= threshold {
            left[usize::from(y[r] == 1)] += w[r];
            n_left += 1;
        }
    }
    let n = rows.len();
    if n_left < min_leaf || n - n_left < min_leaf {
        return None;
    }
    let right = [total[0] - left[0], total[1] - left[1]];
    let w_all = total[0] + total[1];
    let (wl, wr) = (left[0] + left[1], right[0] + right[1]);
    let gain =
        gini(total[0], total[1]) - (wl / w_all) * gini(left[0], left[1]) - (wr / w_all) * gini(right[0], right[1]);
    Some(Split {
        feature,
        threshold,
        gain,
    })
}

fn column_range(x: &Matrix, rows: &[usize], feature: usize) -> (f64, f64) {
    rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
        let v = x.get(r, feature);
        (lo.min(v), hi.max(v))
    })
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    w: &'a [f64],
    params: CartParams,
    rng: &'a mut Rng,
    nodes: Vec<TreeNode>,
    col: SortedColumn,
    feature_order: Vec<usize>,
}

impl Grower<'_> {
    fn leaf(&mut self, rows: &[usize]) -> usize {
        let id = self.nodes.len();
        self.nodes
            .push(Node::Leaf(ClassLeaf::from_counts(totals(self.y, self.w, rows))));
        id
    }

    /// Features to evaluate at this node: the first `max_features`
    /// non-constant ones in a random order (all features when unlimited),
    /// sorted ascending, each with its range over the node.
    fn candidates(&mut self, rows: &[usize]) -> Vec<(usize, (f64, f64))> {
        let d = self.x.n_cols();
        let want = self.params.max_features.resolve(d);
        if want < d {
            self.feature_order.shuffle(self.rng);
        } else {
            self.feature_order.sort_unstable();
        }
        let mut chosen = Vec::with_capacity(want);
        for i in 0..d {
            let f = self.feature_order[i];
            let range = column_range(self.x, rows, f);
            if range.0 < range.1 {
                chosen.push((f, range));
                if chosen.len() == want {
                    break;
                }
            }
        }
        chosen.sort_unstable_by_key(|c| c.0);
        chosen
    }

    fn choose(&mut self, rows: &[usize]) -> Option<Split> {
        let min_leaf = self.params.constraints.min_samples_leaf;
        let candidates = self.candidates(rows);
        match self.params.rule {
            ThresholdRule::Best => {
                let features: Vec<usize> = candidates.iter().map(|c| c.0).collect();
                let best = best_split_weighted(self.x, self.y, self.w, rows, &features, min_leaf, &mut self.col);
                if let Some(s) = best.filter(|s| s.gain > GAIN_EPS) {
                    return Some(s);
                }
                // impure but no split improves Gini (XOR-like layouts):
                // cut the lowest-index usable feature near its median
                for &f in &features {
                    self.col.fill(self.x, self.y, self.w, rows, f);
                    if let Some(s) = median_split(&self.col, min_leaf, f) {
                        return Some(s);
                    }
                }
                None
            }
            ThresholdRule::Random => {
                let mut best: Option<Split> = None;
                for (f, range) in candidates {
                    if let Some(s) = random_split(self.x, self.y, self.w, rows, f, min_leaf, range, self.rng) {
                        if best.is_none_or(|b| s.gain > b.gain) {
                            best = Some(s);
                        }
                    }
                }
                best
            }
        }
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let t = totals(self.y, self.w, rows);
        let pure = t[0] == 0.0 || t[1] == 0.0;
        if pure || !self.params.constraints.can_split(rows.len(), depth) {
            return self.leaf(rows);
        }
        let Some(split) = self.choose(rows) else {
            return self.leaf(rows);
        };
        let mid = partition(rows, |r| self.x.get(r, split.feature) <= split.threshold);
        debug_assert!(mid > 0 && mid < rows.len());

        let id = self.nodes.len();
        self.nodes.push(Node::Leaf(ClassLeaf::from_counts(t)));
        let (l, r) = rows.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        id
    }
}

/// In-place partition; returns the number of rows satisfying `pred`, which
/// end up at the front.
pub(crate) fn partition(rows: &mut [usize], mut pred: impl FnMut(usize) -> bool) -> usize {
    let mut i = 0;
    for j in 0..rows.len() {
        if pred(rows[j]) {
            rows.swap(i, j);
            i += 1;
        }
    }
    i
}

/// Grows a classification tree on all rows with unit weights.
pub fn build_cart(x: &Matrix, y: &[u8], params: &CartParams, rng: &mut Rng) -> ClassTree {
    let rows: Vec<usize> = (0..x.n_rows()).collect();
    let w = vec![1.0; x.n_rows()];
    build_cart_weighted(x, y, &w, rows, params, rng)
}

/// Grows a classification tree on `rows`, each weighted by `w[row]`.
/// `rows` must be non-empty with positive weights.
pub fn build_cart_weighted(
    x: &Matrix,
    y: &[u8],
    w: &[f64],
    mut rows: Vec<usize>,
    params: &CartParams,
    rng: &mut Rng,
) -> ClassTree {
    assert!(!rows.is_empty(), "cannot grow a tree on zero rows");
    let mut g = Grower {
        x,
        y,
        w,
        params: *params,
        rng,
        nodes: Vec::new(),
        col: SortedColumn::new(),
        feature_order: (0..x.n_cols()).collect(),
    };
    g.grow(&mut rows, 0);
    Tree::from_nodes(g.nodes)
}
