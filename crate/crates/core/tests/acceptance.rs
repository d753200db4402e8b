//! Acceptance suite. Every criterion prints its individual checks and a
//! closing `criterion N: PASS|FAIL` line straight to stdout (bypassing the
//! test harness capture), then fails the test if any check failed.
//!
//! Criteria that are defined on the AI4I 2020 file read it from `$AI4I_CSV`
//! or `<workspace>/data/ai4i2020.csv`. When the file is absent those checks
//! report FAIL with the reason. Criteria 3 and 10 are properties of the
//! implementation rather than of the data and fall back to the synthetic
//! generator, saying so in their output.

use std::fmt::Display;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdm_core::dataio::{self, surrogate, CanonicalDataset, RawRecord, TypeCode};
use pdm_core::learners::boosting::train_gbdt;
use pdm_core::learners::{self, Classifier, FittedState, GbdtParams, LearnerId, LearnerSpec};
use pdm_core::matrix::{LabeledMatrix, Matrix};
use pdm_core::metrics::{auc, auc_rank, compute_metrics, confusion_matrix, evaluate, repeated_cv, roc_curve, CvConfig};
use pdm_core::model::{Model, ModelName, ModelSpec};
use pdm_core::pipeline::{prepare, PrepareConfig, Prepared};
use pdm_core::preprocess::{encode_records, encode_type, fit_records, smote_oversample};
use pdm_core::topsis::{topsis_rank, DecisionMatrix};

// ---------------------------------------------------------------------------
// reporting

fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

struct Criterion {
    id: u8,
    title: &'static str,
    checks: usize,
    failed: Vec<String>,
}

impl Criterion {
    fn new(id: u8, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            checks: 0,
            failed: Vec::new(),
        }
    }

    fn check(&mut self, what: &str, ok: bool, detail: impl Display) {
        self.checks += 1;
        let tag = if ok { "PASS" } else { "FAIL" };
        emit(&format!("  [{}] {tag} {what}: {detail}", self.id));
        if !ok {
            self.failed.push(what.to_string());
        }
    }

    fn note(&self, text: impl Display) {
        emit(&format!("  [{}] note {text}", self.id));
    }

    fn finish(self) {
        let verdict = if self.failed.is_empty() { "PASS" } else { "FAIL" };
        emit(&format!(
            "criterion {}: {verdict} {} ({}/{} checks)",
            self.id,
            self.title,
            self.checks - self.failed.len(),
            self.checks
        ));
        assert!(
            self.failed.is_empty(),
            "criterion {} failed: {}",
            self.id,
            self.failed.join("; ")
        );
    }
}

// ---------------------------------------------------------------------------
// data

fn workspace_root() -> PathBuf {
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    manifest.ancestors().nth(2).unwrap_or(manifest).to_path_buf()
}

fn canonical_path() -> PathBuf {
    match std::env::var_os("AI4I_CSV") {
        Some(p) => PathBuf::from(p),
        None => workspace_root().join("data/ai4i2020.csv"),
    }
}

fn canonical() -> Result<&'static CanonicalDataset, String> {
    static DS: OnceLock<Result<CanonicalDataset, String>> = OnceLock::new();
    DS.get_or_init(|| {
        let path = canonical_path();
        if !path.exists() {
            return Err(format!("canonical dataset not found at {}", path.display()));
        }
        dataio::load_csv(&path).map_err(|e| format!("{}: {e}", path.display()))
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn canonical_prepared() -> Result<&'static Prepared, String> {
    static P: OnceLock<Result<Prepared, String>> = OnceLock::new();
    P.get_or_init(|| {
        let ds = canonical()?;
        prepare(ds, &PrepareConfig::default()).map_err(|e| e.to_string())
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn surrogate_prepared() -> &'static Prepared {
    static P: OnceLock<Prepared> = OnceLock::new();
    P.get_or_init(|| {
        let ds = CanonicalDataset::from_records(surrogate::generate(10_000, 42));
        prepare(&ds, &PrepareConfig::default()).expect("surrogate data prepares")
    })
}

/// Canonical data when present, otherwise the synthetic stand-in.
fn property_data(c: &Criterion) -> &'static Prepared {
    match canonical_prepared() {
        Ok(p) => {
            c.note("using the canonical AI4I 2020 file");
            p
        }
        Err(why) => {
            c.note(format!("{why}; using 10000 synthetic rows (seed 42) instead"));
            surrogate_prepared()
        }
    }
}

fn accuracy_of(model: &impl Classifier, data: &LabeledMatrix) -> f64 {
    let pred = model.predict_labels(&data.features).unwrap();
    pred.iter().zip(&data.labels).filter(|(p, t)| p == t).count() as f64 / data.len() as f64
}

// ---------------------------------------------------------------------------
// 1

#[test]
fn criterion_01_dataset_facts() {
    let mut c = Criterion::new(1, "dataset facts");
    let path = canonical_path();
    if !path.exists() {
        c.check("load canonical file", false, format!("not found at {}", path.display()));
        return c.finish();
    }
    let t = Instant::now();
    let loaded = dataio::load_csv(&path);
    let secs = t.elapsed().as_secs_f64();
    match loaded {
        Err(e) => c.check("load canonical file", false, e),
        Ok(ds) => {
            let pos = ds.labels().iter().filter(|&&l| l == 1).count();
            c.check("row count", ds.len() == 10_000, format!("{} (want 10000)", ds.len()));
            c.check("machine failures", pos == 339, format!("{pos} (want 339)"));
            c.check("load time", secs < 5.0, format!("{secs:.3} s (limit 5 s)"));
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 2

const TABLE1_MACHINE0: [f64; 6] = [2.0, 0.304347826, 0.358024691, 0.222933644, 0.535714286, 0.0];

#[test]
fn criterion_02_preprocessing_fidelity() {
    let mut c = Criterion::new(2, "preprocessing fidelity");
    let codes = [
        encode_type(TypeCode::L),
        encode_type(TypeCode::M),
        encode_type(TypeCode::H),
    ];
    c.check(
        "type encoding L/M/H",
        codes == [1, 2, 0],
        format!("{codes:?} (want [1, 2, 0])"),
    );

    match canonical_prepared() {
        Err(why) => c.check("machine 0 encoded row", false, why),
        Ok(p) => {
            let row = p.encoded.features.row(0);
            let worst = row
                .iter()
                .zip(TABLE1_MACHINE0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            c.check(
                "machine 0 encoded row",
                worst <= 1e-6,
                format!("{row:?}, max deviation {worst:.2e} (limit 1e-6)"),
            );
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 3

#[test]
fn criterion_03_balancing_counts() {
    let mut c = Criterion::new(3, "balancing counts");
    let p = property_data(&c);
    let n_train = p.train_original.len();
    let [_, pos] = p.train_original.class_counts();
    let [neg_after, pos_after] = p.train.class_counts();
    c.check(
        "positives after SMOTE = n_train - p",
        pos_after == n_train - pos,
        format!("n_train {n_train}, p {pos}, positives after {pos_after}"),
    );
    c.check(
        "equal class counts",
        neg_after == pos_after,
        format!("{neg_after} / {pos_after}"),
    );
    c.check(
        "synthetic rows added",
        p.synthetic_rows() == n_train - 2 * pos,
        format!("{} (want {})", p.synthetic_rows(), n_train - 2 * pos),
    );
    let originals_kept = p.train.features.as_slice()[..p.train_original.features.as_slice().len()]
        == *p.train_original.features.as_slice()
        && p.train.labels[..n_train] == p.train_original.labels[..];
    c.check("original rows kept in place", originals_kept, "prefix identical");
    if canonical_prepared().is_ok() {
        c.check(
            "stratified train positives",
            (237..=238).contains(&pos),
            format!("{pos} (want 237 or 238)"),
        );
    }

    // A 7000-row training part holding 240 positives must balance to
    // 6760 / 6760 = 13520 rows.
    let records = surrogate::generate(10_000, 42);
    let positives: Vec<RawRecord> = records
        .iter()
        .filter(|r| r.machine_failure == 1)
        .take(240)
        .cloned()
        .collect();
    let negatives: Vec<RawRecord> = records
        .iter()
        .filter(|r| r.machine_failure == 0)
        .take(6760)
        .cloned()
        .collect();
    let train: Vec<RawRecord> = negatives.into_iter().chain(positives).collect();
    let scaler = fit_records(&train).unwrap();
    let encoded = encode_records(&train, &scaler);
    let balanced = smote_oversample(&encoded, &PrepareConfig::default().smote).unwrap();
    let counts = balanced.class_counts();
    c.check(
        "240 / 6760 training part",
        counts == [6760, 6760] && balanced.len() == 13_520,
        format!("{counts:?}, total {} (want [6760, 6760], 13520)", balanced.len()),
    );
    c.finish();
}

// ---------------------------------------------------------------------------
// 4

#[test]
fn criterion_04_ensemble_band() {
    let mut c = Criterion::new(4, "ensemble performance band");
    match canonical_prepared() {
        Err(why) => {
            c.check("ensemble test accuracy >= 0.97", false, &why);
            c.check("ensemble test AUC >= 0.92", false, &why);
            c.check("runtime < 300 s", false, &why);
        }
        Ok(p) => {
            let t = Instant::now();
            let model = ModelSpec::default_for(ModelName::Ensemble).fit(&p.train, 42).unwrap();
            let ev = evaluate(&model, &p.test).unwrap();
            let secs = t.elapsed().as_secs_f64();
            let r = ev.report;
            c.check(
                "ensemble test accuracy >= 0.97",
                r.accuracy >= 0.97,
                format!("{:.4} (published 0.9893)", r.accuracy),
            );
            c.check(
                "ensemble test AUC >= 0.92",
                r.auc >= 0.92,
                format!("{:.4} (published 0.957)", r.auc),
            );
            c.check("runtime < 300 s", secs < 300.0, format!("{secs:.1} s"));
        }
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 5

#[test]
fn criterion_05_baseline_bands() {
    let mut c = Criterion::new(5, "baseline sanity bands");
    let p = match canonical_prepared() {
        Ok(p) => p,
        Err(why) => {
            for what in ["decision_tree", "random_forest", "gbdt", "dummy accuracy", "dummy AUC"] {
                c.check(what, false, &why);
            }
            return c.finish();
        }
    };
    for (id, published) in [
        (LearnerId::DecisionTree, 0.981),
        (LearnerId::RandomForest, 0.9817),
        (LearnerId::Gbdt, 0.9821),
    ] {
        let m = learners::train(&LearnerSpec::default_for(id), &p.train, 42).unwrap();
        let acc = accuracy_of(&m, &p.test);
        c.check(
            &format!("{id} accuracy >= 0.96"),
            acc >= 0.96,
            format!("{acc:.4} (published {published})"),
        );
    }
    let dummy = learners::train(&LearnerSpec::default_for(LearnerId::Dummy), &p.train, 42).unwrap();
    let ev = evaluate(&dummy, &p.test).unwrap();
    let [neg, pos] = p.test.class_counts();
    let majority = neg.max(pos) as f64 / p.test.len() as f64;
    c.check(
        "dummy accuracy",
        ev.report.accuracy == majority,
        format!(
            "{} (test majority fraction {majority}, published 0.9676)",
            ev.report.accuracy
        ),
    );
    c.check(
        "dummy AUC",
        ev.report.auc == 0.5,
        format!("{} (want 0.5)", ev.report.auc),
    );
    c.finish();
}

// ---------------------------------------------------------------------------
// 6

#[test]
fn criterion_06_repeated_cv() {
    let mut c = Criterion::new(6, "repeated cross-validation");
    let p = match canonical_prepared() {
        Ok(p) => p,
        Err(why) => {
            for what in [
                "mean accuracy in [0.92, 0.98]",
                "grid shape 5x5",
                "no synthetic row in a test fold",
            ] {
                c.check(what, false, &why);
            }
            return c.finish();
        }
    };
    let spec = ModelSpec::default_for(ModelName::Ensemble);
    let res = repeated_cv(
        &spec,
        &p.encoded,
        &CvConfig::default(),
        Some(&PrepareConfig::default().smote),
    )
    .unwrap();
    c.check(
        "mean accuracy in [0.92, 0.98]",
        (0.92..=0.98).contains(&res.mean),
        format!("{:.4} (published 0.9536)", res.mean),
    );
    let shape_ok = res.grid.len() == 5 && res.grid.iter().all(|r| r.len() == 5);
    c.check(
        "grid shape 5x5",
        shape_ok,
        format!(
            "{} x {:?}",
            res.grid.len(),
            res.grid.iter().map(Vec::len).collect::<Vec<_>>()
        ),
    );
    let n = p.encoded.len();
    let mut clean = true;
    for rep in 0..5 {
        let mut seen = vec![0u8; n];
        for f in res.folds.iter().filter(|f| f.repetition == rep) {
            for &i in &f.test_indices {
                // indices at or past n would address SMOTE output
                if i >= n {
                    clean = false;
                } else {
                    seen[i] += 1;
                }
            }
            if f.train_rows != n - f.test_indices.len() + f.synthetic_rows {
                clean = false;
            }
        }
        clean &= seen.iter().all(|&s| s == 1);
    }
    c.check(
        "no synthetic row in a test fold",
        clean,
        "test folds partition the original rows in every repetition",
    );
    c.finish();
}

// ---------------------------------------------------------------------------
// 7

fn random_labels(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<u8> {
    (0..n).map(|_| u8::from(rng.random_bool(p))).collect()
}

/// Concordant-pair probability, ties counted half.
fn pair_auc(y: &[u8], s: &[f64]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..y.len() {
        for j in 0..y.len() {
            if y[i] == 1 && y[j] == 0 {
                den += 1.0;
                if s[i] > s[j] {
                    num += 1.0;
                } else if s[i] == s[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

#[test]
fn criterion_07_metric_oracles() {
    let mut c = Criterion::new(7, "metric oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut count_bad, mut metric_bad, mut worst) = (0, 0, 0.0f64);
    for _ in 0..1000 {
        let n = rng.random_range(1..400);
        let (pt, pp) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        let y_true = random_labels(&mut rng, n, pt);
        let y_pred = random_labels(&mut rng, n, pp);
        let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
        for i in 0..n {
            match (y_true[i], y_pred[i]) {
                (1, 1) => tp += 1,
                (0, 1) => fp += 1,
                (1, 0) => fn_ += 1,
                _ => tn += 1,
            }
        }
        let cm = confusion_matrix(&y_true, &y_pred).unwrap();
        if (cm.tp, cm.fp, cm.fn_, cm.tn) != (tp, fp, fn_, tn) {
            count_bad += 1;
        }
        let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = div(tp, tp + fp);
        let recall = div(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let accuracy = div(tp + tn, n as u64);
        let m = compute_metrics(&cm);
        let dev = [
            (m.accuracy - accuracy).abs(),
            (m.precision - precision).abs(),
            (m.recall - recall).abs(),
            (m.f1 - f1).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        worst = worst.max(dev);
        if dev > 1e-12 {
            metric_bad += 1;
        }
    }
    c.check(
        "confusion counts on 1000 vectors",
        count_bad == 0,
        format!("{count_bad} mismatches"),
    );
    c.check(
        "accuracy/precision/recall/F1 on 1000 vectors",
        metric_bad == 0,
        format!("{metric_bad} beyond 1e-12, max deviation {worst:.2e}"),
    );

    let (mut auc_bad, mut worst_auc) = (0, 0.0f64);
    for case in 0..500 {
        let n = rng.random_range(2..300);
        let mut y = random_labels(&mut rng, n, 0.3);
        y[0] = 0;
        y[1] = 1;
        // coarse grids in half the cases to force tied scores
        let levels = if case % 2 == 0 { 0 } else { rng.random_range(2..8) };
        let s: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                if levels == 0 {
                    u
                } else {
                    (u * levels as f64).floor() / levels as f64
                }
            })
            .collect();
        let trap = auc(&roc_curve(&y, &s).unwrap());
        let rank = auc_rank(&y, &s).unwrap();
        let pair = pair_auc(&y, &s);
        let dev = (trap - rank).abs().max((trap - pair).abs());
        worst_auc = worst_auc.max(dev);
        if dev > 1e-12 {
            auc_bad += 1;
        }
    }
    c.check(
        "trapezoidal AUC = rank AUC on 500 score vectors",
        auc_bad == 0,
        format!("{auc_bad} beyond 1e-12, max deviation {worst_auc:.2e} (pair-count oracle included)"),
    );
    c.finish();
}

// ---------------------------------------------------------------------------
// 8

/// Textbook TOPSIS over benefit criteria, written out from scratch.
fn topsis_oracle(values: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let m = values.len();
    let n = weights.len();
    let mut v = vec![vec![0.0; n]; m];
    for j in 0..n {
        let mut sq = 0.0;
        for row in values {
            sq += row[j] * row[j];
        }
        let norm = sq.sqrt();
        for i in 0..m {
            let r = if norm > 0.0 { values[i][j] / norm } else { 0.0 };
            v[i][j] = weights[j] * r;
        }
    }
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut worst = vec![f64::INFINITY; n];
    for row in &v {
        for j in 0..n {
            best[j] = best[j].max(row[j]);
            worst[j] = worst[j].min(row[j]);
        }
    }
    v.iter()
        .map(|row| {
            let mut dp = 0.0;
            let mut dm = 0.0;
            for j in 0..n {
                dp += (row[j] - best[j]).powi(2);
                dm += (row[j] - worst[j]).powi(2);
            }
            let (dp, dm) = (dp.sqrt(), dm.sqrt());
            if dp + dm == 0.0 {
                0.5
            } else {
                dm / (dp + dm)
            }
        })
        .collect()
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|r| r / sum).collect();
    let rest: f64 = w[..n - 1].iter().sum();
    w[n - 1] = 1.0 - rest;
    w
}

fn matrix_of(values: Vec<Vec<f64>>, weights: Vec<f64>) -> DecisionMatrix {
    let names = (0..values.len()).map(|i| format!("m{i:03}")).collect();
    let criteria = (0..weights.len()).map(|j| format!("c{j}")).collect();
    let n = weights.len();
    DecisionMatrix::new(names, criteria, values, weights, vec![true; n]).unwrap()
}

#[test]
fn criterion_08_topsis() {
    let mut c = Criterion::new(8, "TOPSIS");
    let mut rng = ChaCha8Rng::seed_from_u64(8);

    let (mut bad, mut worst) = (0, 0.0f64);
    for _ in 0..100 {
        let m = rng.random_range(2..15);
        let n = rng.random_range(1..7);
        let values: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let w = random_weights(&mut rng, n);
        let want = topsis_oracle(&values, &w);
        let ranking = topsis_rank(&matrix_of(values, w));
        let dev = want
            .iter()
            .enumerate()
            .map(|(i, s)| (ranking.score_of(&format!("m{i:03}")).unwrap() - s).abs())
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        if dev > 1e-12 {
            bad += 1;
        }
    }
    c.check(
        "agreement with oracle on 100 matrices",
        bad == 0,
        format!("{bad} matrices beyond 1e-12, max deviation {worst:.2e}"),
    );

    let mut dom_bad = 0;
    let mut scale_bad = 0;
    for _ in 0..300 {
        let m = rng.random_range(2..10);
        let n = rng.random_range(1..6);
        let mut values: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(0.01..1.0)).collect())
            .collect();
        // alternative 0 dominates alternative 1
        for j in 0..n {
            values[0][j] = values[1][j] + rng.random_range(0.0..0.5);
        }
        let w = random_weights(&mut rng, n);
        let base = topsis_rank(&matrix_of(values.clone(), w.clone()));
        if base.score_of("m000").unwrap() < base.score_of("m001").unwrap() - 1e-12 {
            dom_bad += 1;
        }
        let col = rng.random_range(0..n);
        let k = rng.random_range(0.01..100.0);
        let mut scaled = values.clone();
        scaled.iter_mut().for_each(|r| r[col] *= k);
        let again = topsis_rank(&matrix_of(scaled, w));
        let dev = base
            .entries
            .iter()
            .map(|e| (e.score - again.score_of(&e.name).unwrap()).abs())
            .fold(0.0, f64::max);
        if dev > 1e-12 {
            scale_bad += 1;
        }
    }
    c.check(
        "dominance on 300 fuzzed matrices",
        dom_bad == 0,
        format!("{dom_bad} violations"),
    );
    c.check(
        "column-scale invariance on 300 fuzzed matrices",
        scale_bad == 0,
        format!("{scale_bad} violations"),
    );

    // Published evaluation table, columns accuracy, auc, recall, precision, f1.
    let table: [(&str, [f64; 5]); 13] = [
        (
            "Light Gradient Boosting Machine",
            [0.9847, 0.9768, 0.6215, 0.8748, 0.7208],
        ),
        ("Decision Tree Classifier", [0.981, 0.8539, 0.718, 0.7103, 0.7095]),
        ("Extra Trees Classifier", [0.9777, 0.9602, 0.3344, 0.9456, 0.4906]),
        ("K Neighbors Classifier", [0.9741, 0.8194, 0.268, 0.8194, 0.3952]),
        ("Ada Boost Classifier", [0.9727, 0.9548, 0.401, 0.6216, 0.4834]),
        (
            "Quadratic Discriminant Analysis",
            [0.8319, 0.807, 0.4547, 0.2939, 0.2889],
        ),
        ("Gradient Boosting Classifier", [0.9821, 0.9734, 0.5911, 0.8102, 0.6796]),
        ("Random Forest Classifier", [0.9817, 0.9654, 0.4978, 0.9018, 0.6351]),
        ("Linear Discriminant Analysis", [0.9687, 0.8748, 0.3573, 0.5413, 0.4241]),
        ("Logistic Regression", [0.968, 0.8472, 0.0132, 0.2, 0.0247]),
        ("Dummy Classifier", [0.9676, 0.5, 0.0, 0.0, 0.0]),
        ("Naive Bayes", [0.961, 0.8696, 0.2241, 0.3451, 0.27]),
        ("Proposed Ensemble Model", [0.9893, 0.957, 0.9903, 0.9980, 0.9941]),
    ];
    let dm = DecisionMatrix::equal_weights(
        table.iter().map(|(n, _)| n.to_string()).collect(),
        ["accuracy", "auc", "recall", "precision", "f1"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
        table.iter().map(|(_, v)| v.to_vec()).collect(),
    )
    .unwrap();
    let ranking = topsis_rank(&dm);
    let top = &ranking.entries[0];
    c.check(
        "published table ranks the ensemble first",
        top.name == "Proposed Ensemble Model" && top.rank == 1,
        format!("rank 1 = {} (score {:.4})", top.name, top.score),
    );
    c.finish();
}

// ---------------------------------------------------------------------------
// 9

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn criterion_09_learner_properties() {
    let mut c = Criterion::new(9, "learner properties");
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let mut imperfect = 0;
    for _ in 0..200 {
        let d = rng.random_range(1..6u32);
        let n = rng.random_range(2..150).min(6usize.pow(d));
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        while rows.len() < n {
            // small integer grid so that ties and duplicate values occur
            let r: Vec<f64> = (0..d as usize).map(|_| f64::from(rng.random_range(0..6u8))).collect();
            if !rows.contains(&r) {
                rows.push(r);
            }
        }
        let mut y: Vec<u8> = (0..rows.len()).map(|_| u8::from(rng.random_bool(0.5))).collect();
        y[0] = 0;
        y[1] = 1;
        let data = LabeledMatrix::new(Matrix::from_rows(&rows).unwrap(), y).unwrap();
        let tree = learners::train(&LearnerSpec::default_for(LearnerId::DecisionTree), &data, 0).unwrap();
        if accuracy_of(&tree, &data) != 1.0 {
            imperfect += 1;
        }
    }
    c.check(
        "unconstrained CART fits conflict-free data (200 cases)",
        imperfect == 0,
        format!("{imperfect} cases below training accuracy 1.0"),
    );

    let mut rises = 0;
    let mut worst_rise = 0.0f64;
    for case in 0..20 {
        let n = 200;
        let x: Vec<[f64; 3]> = (0..n).map(|_| [rng.random(), rng.random(), rng.random()]).collect();
        let y: Vec<u8> = x
            .iter()
            .map(|r| u8::from(r[0] + 0.5 * r[1] + 0.3 * rng.random::<f64>() > 0.8))
            .collect();
        let params = GbdtParams {
            n_estimators: 60,
            learning_rate: [0.1, 0.5, 1.0, 2.0][case % 4],
            ..GbdtParams::default()
        };
        let model = train_gbdt(&Matrix::from_rows(&x).unwrap(), &y, &params).unwrap();
        for w in model.train_loss.windows(2) {
            let rise = w[1] - w[0];
            worst_rise = worst_rise.max(rise);
            if rise > 1e-9 {
                rises += 1;
            }
        }
    }
    c.check(
        "GBDT per-stage training loss non-increasing",
        rises == 0,
        format!("{rises} increases beyond 1e-9 over 20 fits, largest step {worst_rise:.2e}"),
    );

    let data = &surrogate_prepared().train;
    for id in [LearnerId::RandomForest, LearnerId::ExtraTrees] {
        let spec = LearnerSpec::default_for(id);
        let fits: Vec<_> = [1, 2, 8]
            .into_iter()
            .map(|t| in_pool(t, || learners::train(&spec, data, 42).unwrap()))
            .collect();
        let same = fits.windows(2).all(|w| w[0] == w[1]);
        assert!(matches!(fits[0].state, FittedState::Forest(_)));
        c.check(
            &format!("{id} identical under 1, 2 and 8 threads"),
            same,
            format!("{} training rows", data.len()),
        );
    }
    c.finish();
}

// ---------------------------------------------------------------------------
// 10

#[test]
fn criterion_10_persistence() {
    let mut c = Criterion::new(10, "persistence");
    let p = property_data(&c);
    for name in ModelName::all() {
        let model = ModelSpec::default_for(name).fit(&p.train, 42).unwrap();
        let mut doc = Vec::new();
        model.save(&mut doc).unwrap();
        let back = Model::load(doc.as_slice()).unwrap();
        let a = model.predict_scores(&p.test.features).unwrap();
        let b = back.predict_scores(&p.test.features).unwrap();
        let identical = back == model && a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits());
        let la = model.predict_labels(&p.test.features).unwrap();
        let lb = back.predict_labels(&p.test.features).unwrap();
        c.check(
            &format!("{name} save/load/predict"),
            identical && la == lb,
            format!("{} test rows, {} byte document", p.test.len(), doc.len()),
        );
    }
    c.finish();
}
