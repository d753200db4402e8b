use std::path::{Path, PathBuf};

use serde_json::json;

use pdm_core::dataio::{self, surrogate, CanonicalDataset};
use pdm_core::matrix::LabeledMatrix;
use pdm_core::metrics::{evaluate as evaluate_model, repeated_cv, CvResult, Evaluation, MetricsReport};
use pdm_core::model::{Model, ModelName};
use pdm_core::pipeline::{self, Prepared};
use pdm_core::preprocess::{read_encoded_csv, write_encoded_csv};
use pdm_core::topsis::{topsis_rank, DecisionMatrix, TopsisRanking};
use pdm_core::Error;

use crate::artifacts::{self, DatasetInfo, Layout, Manifest, StepWriter};
use crate::config::RunConfig;
use crate::{svg, Failure};

pub struct Context {
    pub cfg: RunConfig,
    pub layout: Layout,
    /// Print progress and tables to stdout.
    pub verbose: bool,
}

impl Context {
    pub fn new(cfg: RunConfig) -> Self {
        let layout = Layout::new(cfg.out_dir.clone());
        Context {
            cfg,
            layout,
            verbose: true,
        }
    }

    fn say(&self, line: impl AsRef<str>) {
        if self.verbose {
            println!("{}", line.as_ref());
        }
    }

    fn record(&self, step: &str, writer: StepWriter, summary: serde_json::Value) -> Result<(), Failure> {
        let mut m = Manifest::open(&self.layout, &self.cfg)?;
        m.steps.insert(step.to_string(), writer.finish(summary));
        m.save(&self.layout)
    }

    /// Like `record`, but folds into an earlier record of the same step so
    /// that per-model invocations accumulate.
    fn record_merged(
        &self,
        step: &str,
        writer: StepWriter,
        summary: serde_json::Value,
        key: &str,
    ) -> Result<(), Failure> {
        let mut m = Manifest::open(&self.layout, &self.cfg)?;
        let new = writer.finish(summary);
        match m.steps.get_mut(step) {
            Some(prev) => prev.merge(new, key),
            None => {
                m.steps.insert(step.to_string(), new);
            }
        }
        m.save(&self.layout)
    }

    fn record_dataset(&self, ds: &CanonicalDataset) -> Result<(), Failure> {
        let mut m = Manifest::open(&self.layout, &self.cfg)?;
        m.dataset = Some(DatasetInfo {
            path: self.cfg.dataset.clone(),
            sha256: ds.source_digest.clone(),
            rows: ds.len(),
            positives: ds.labels().iter().filter(|&&l| l == 1).count(),
        });
        m.save(&self.layout)
    }
}

/// `all` or a single model name.
pub fn parse_selector(s: &str) -> Result<Vec<ModelName>, Failure> {
    if s == "all" {
        Ok(ModelName::all())
    } else {
        Ok(vec![s.parse::<ModelName>()?])
    }
}

/// Attaches the file name unless the error already carries a path.
fn with_file(e: Error, path: &Path) -> Failure {
    match e {
        Error::Io { .. } => e.into(),
        other => Failure::from(other).context(path.display().to_string()),
    }
}

fn load_dataset(ctx: &Context) -> Result<CanonicalDataset, Failure> {
    let path = &ctx.cfg.dataset;
    dataio::load_csv(path).map_err(|e| with_file(e, path))
}

fn load_prepared(ctx: &Context) -> Result<(CanonicalDataset, Prepared), Failure> {
    let ds = load_dataset(ctx)?;
    let prepared = pipeline::prepare(&ds, &ctx.cfg.prepare_config()).map_err(|e| with_file(e, &ctx.cfg.dataset))?;
    Ok((ds, prepared))
}

fn read_matrix(path: &Path) -> Result<LabeledMatrix, Failure> {
    if !path.exists() {
        return Err(Failure {
            kind: "MissingData",
            message: format!("{} not found; run `pdm prepare` first", path.display()),
        });
    }
    let bytes = artifacts::read(path)?;
    read_encoded_csv(bytes.as_slice()).map_err(|e| with_file(e, path))
}

fn encoded_bytes(m: &LabeledMatrix) -> Result<Vec<u8>, Failure> {
    let mut out = Vec::new();
    write_encoded_csv(m, &mut out)?;
    Ok(out)
}

fn counts(m: &LabeledMatrix) -> String {
    let [neg, pos] = m.class_counts();
    format!("{} rows ({neg} negative / {pos} positive)", m.len())
}

pub fn prepare(ctx: &Context) -> Result<Prepared, Failure> {
    let (ds, p) = load_prepared(ctx)?;
    let l = &ctx.layout;
    let mut w = StepWriter::new(l);
    w.write(&l.encoded_csv(), &encoded_bytes(&p.encoded)?)?;
    w.write(&l.train_csv(), &encoded_bytes(&p.train)?)?;
    w.write(&l.test_csv(), &encoded_bytes(&p.test)?)?;
    let details = json!({
        "scaler": p.scaler,
        "split": p.split,
        "validation": p.validation,
    });
    let mut bytes = serde_json::to_vec_pretty(&details).map_err(Error::from)?;
    bytes.push(b'\n');
    w.write(&l.preprocessing_json(), &bytes)?;

    ctx.say(format!(
        "dataset  {} ({})",
        ctx.cfg.dataset.display(),
        counts(&p.encoded)
    ));
    ctx.say(format!("train    {}", counts(&p.train_original)));
    ctx.say(format!(
        "smote    {} (+{} synthetic)",
        counts(&p.train),
        p.synthetic_rows()
    ));
    ctx.say(format!("test     {}", counts(&p.test)));

    ctx.record_dataset(&ds)?;
    let summary = json!({
        "rows": p.encoded.len(),
        "class_counts": p.encoded.class_counts(),
        "train_before_smote": p.train_original.class_counts(),
        "train_after_smote": p.train.class_counts(),
        "synthetic_rows": p.synthetic_rows(),
        "test": p.test.class_counts(),
    });
    ctx.record("prepare", w, summary)?;
    Ok(p)
}

pub fn train(ctx: &Context, names: &[ModelName]) -> Result<Vec<Model>, Failure> {
    let data = read_matrix(&ctx.layout.train_csv())?;
    let mut w = StepWriter::new(&ctx.layout);
    let mut models = Vec::with_capacity(names.len());
    let mut seeds = serde_json::Map::new();
    for &name in names {
        let spec = ctx.cfg.model_spec(name)?;
        let seed = ctx.cfg.model_seed(name);
        let model = spec
            .fit(&data, seed)
            .map_err(|e| Failure::from(e).context(format!("training {name}")))?;
        let mut bytes = Vec::new();
        model.save(&mut bytes)?;
        let path = ctx.layout.model(name);
        w.write(&path, &bytes)?;
        ctx.say(format!("trained  {name:<14} -> {}", path.display()));
        seeds.insert(name.to_string(), json!(seed));
        models.push(model);
    }
    ctx.record_merged("train", w, json!({ "seeds": seeds }), "seeds")?;
    Ok(models)
}

pub fn load_model(layout: &Layout, name: ModelName) -> Result<Model, Failure> {
    let path = layout.model(name);
    if !path.exists() {
        return Err(Error::MissingModel(format!("{name} (expected {})", path.display())).into());
    }
    let bytes = artifacts::read(&path)?;
    Model::load(bytes.as_slice()).map_err(|e| with_file(e, &path))
}

fn metrics_line(name: &str, r: &MetricsReport) -> String {
    format!(
        "{name:<14} {:>8.4} {:>8.4} {:>8.4} {:>9.4} {:>8.4}",
        r.accuracy, r.auc, r.recall, r.precision, r.f1
    )
}

fn table_header() -> String {
    format!(
        "{:<14} {:>8} {:>8} {:>8} {:>9} {:>8}",
        "model", "accuracy", "auc", "recall", "precision", "f1"
    )
}

pub fn evaluate(ctx: &Context, names: &[ModelName]) -> Result<Vec<(ModelName, Evaluation)>, Failure> {
    let test = read_matrix(&ctx.layout.test_csv())?;
    let mut w = StepWriter::new(&ctx.layout);
    let mut out = Vec::with_capacity(names.len());
    ctx.say(table_header());
    for &name in names {
        let model = load_model(&ctx.layout, name)?;
        let ev = evaluate_model(&model, &test).map_err(|e| Failure::from(e).context(format!("evaluating {name}")))?;
        let mut bytes = serde_json::to_vec_pretty(&ev.report).map_err(Error::from)?;
        bytes.push(b'\n');
        w.write(&ctx.layout.metrics(name), &bytes)?;
        if name == ModelName::Ensemble {
            let title = format!("{} (test set)", name.display_name());
            w.write(
                &ctx.layout.confusion_svg(),
                svg::confusion_matrix(&ev.confusion, &title).as_bytes(),
            )?;
        }
        ctx.say(metrics_line(name.as_str(), &ev.report));
        out.push((name, ev));
    }
    let reports: serde_json::Map<String, serde_json::Value> = out
        .iter()
        .map(|(n, ev)| (n.to_string(), json!({ "report": ev.report, "confusion": ev.confusion })))
        .collect();
    ctx.record_merged(
        "evaluate",
        w,
        json!({ "test_rows": test.len(), "models": reports }),
        "models",
    )?;
    Ok(out)
}

pub fn cv(ctx: &Context) -> Result<CvResult, Failure> {
    let name = ctx.cfg.cv_model()?;
    let spec = ctx.cfg.model_spec(name)?;
    let ds = load_dataset(ctx)?;
    let enc = pipeline::encode_dataset(&ds, &ctx.cfg.prepare_config()).map_err(|e| with_file(e, &ctx.cfg.dataset))?;
    let smote = ctx.cfg.cv.smote.then_some(&ctx.cfg.smote);
    let res = repeated_cv(&spec, &enc.matrix, &ctx.cfg.cv_config(), smote)
        .map_err(|e| Failure::from(e).context(format!("cross-validating {name}")))?;
    let mut w = StepWriter::new(&ctx.layout);
    w.write(&ctx.layout.cv_grid_csv(), res.to_csv().as_bytes())?;
    w.write(&ctx.layout.cv_svg(), svg::cv_lines(&res.grid, res.mean).as_bytes())?;
    for (r, row) in res.grid.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|a| format!("{a:.4}")).collect();
        ctx.say(format!("repetition {}  {}", r + 1, cells.join(" ")));
    }
    ctx.say(format!("mean accuracy {}", res.mean));
    ctx.record_dataset(&ds)?;
    let summary = json!({
        "model": name.as_str(),
        "k": res.config.k,
        "repetitions": res.config.repetitions,
        "mean": res.mean,
        "smote": ctx.cfg.cv.smote,
    });
    ctx.record("cv", w, summary)?;
    Ok(res)
}

pub fn load_metrics(path: &Path) -> Result<MetricsReport, Failure> {
    let bytes = artifacts::read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| with_file(Error::from(e), path))
}

pub fn rank(ctx: &Context) -> Result<TopsisRanking, Failure> {
    let mut names = Vec::new();
    let mut values = Vec::new();
    for name in ModelName::all() {
        let path = ctx.layout.metrics(name);
        if path.exists() {
            names.push(name.to_string());
            values.push(load_metrics(&path)?.values().to_vec());
        }
    }
    if names.len() < 2 {
        return Err(Error::TooFewModels(names.len()).into());
    }
    let criteria = MetricsReport::KEYS.iter().map(|k| k.to_string()).collect();
    let dm = DecisionMatrix::new(names, criteria, values, ctx.cfg.topsis.weights.clone(), vec![true; 5])?;
    let ranking = topsis_rank(&dm);
    let mut w = StepWriter::new(&ctx.layout);
    w.write(&ctx.layout.ranking_csv(), ranking.to_csv().as_bytes())?;
    ctx.say(format!("{:<4} {:<34} {:>8}", "rank", "model", "score"));
    for e in &ranking.entries {
        let display = e.name.parse::<ModelName>().map(|n| n.display_name()).unwrap_or(&e.name);
        ctx.say(format!("{:<4} {:<34} {:>8.4}", e.rank, display, e.score));
    }
    ctx.record("rank", w, json!({ "models": ranking.entries.len() }))?;
    Ok(ranking)
}

/// prepare, train all, evaluate all, cv, rank.
pub fn run_all(ctx: &Context) -> Result<TopsisRanking, Failure> {
    let all = ModelName::all();
    prepare(ctx)?;
    train(ctx, &all)?;
    evaluate(ctx, &all)?;
    cv(ctx)?;
    rank(ctx)
}

/// Writes a synthetic AI4I-shaped dataset.
pub fn synth(rows: usize, seed: u64, output: &PathBuf) -> Result<(), Failure> {
    let records = surrogate::generate(rows, seed);
    let mut bytes = Vec::new();
    dataio::write_csv(&records, &mut bytes)?;
    artifacts::write_atomic(output, &bytes)?;
    let pos = records.iter().filter(|r| r.machine_failure == 1).count();
    println!("wrote {} rows ({pos} failures) to {}", records.len(), output.display());
    Ok(())
}
