//! Run configuration: a TOML document plus `--set key=value` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use pdm_core::dataio::SplitConfig;
use pdm_core::ensemble::{EnsembleSpec, MEMBER_IDS};
use pdm_core::learners::{LearnerId, LearnerSpec};
use pdm_core::metrics::CvConfig;
use pdm_core::model::{ModelName, ModelSpec};
use pdm_core::pipeline::{PrepareConfig, ScalerFit};
use pdm_core::preprocess::SmoteConfig;
use pdm_core::rng::DEFAULT_SEED;

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub out_dir: PathBuf,
    pub scaler_fit: ScalerFit,
    pub split: SplitConfig,
    pub smote: SmoteConfig,
    pub train: TrainConfig,
    /// Hyperparameter overrides keyed by learner; absent keys keep defaults.
    pub learners: BTreeMap<LearnerId, toml::Table>,
    pub ensemble: EnsembleConfig,
    pub cv: CvSection,
    pub topsis: TopsisConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: PathBuf::from("data/ai4i2020.csv"),
            out_dir: PathBuf::from("runs/default"),
            scaler_fit: ScalerFit::Full,
            split: SplitConfig::default(),
            smote: PrepareConfig::default().smote,
            train: TrainConfig::default(),
            learners: BTreeMap::new(),
            ensemble: EnsembleConfig::default(),
            cv: CvSection::default(),
            topsis: TopsisConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Seed handed to every base learner.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// Drives the bootstrap plan and member training.
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSection {
    pub k: usize,
    pub repetitions: usize,
    pub seed: u64,
    /// Model evaluated by `cv`.
    pub model: String,
    /// Balance each training fold with SMOTE.
    pub smote: bool,
}

impl Default for CvSection {
    fn default() -> Self {
        let c = CvConfig::default();
        CvSection {
            k: c.k,
            repetitions: c.repetitions,
            seed: c.seed,
            model: "ensemble".into(),
            smote: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopsisConfig {
    /// One weight per metric in the order accuracy, auc, recall, precision, f1.
    pub weights: Vec<f64>,
}

impl Default for TopsisConfig {
    fn default() -> Self {
        TopsisConfig { weights: vec![0.2; 5] }
    }
}

/// Seeds in effect for a run, as recorded in the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub split: u64,
    pub smote: u64,
    pub train: u64,
    pub ensemble: u64,
    pub cv: u64,
}

impl RunConfig {
    /// Reads a TOML file, or the `config` member of a JSON run manifest.
    pub fn load(path: Option<&Path>, sets: &[String]) -> Result<RunConfig, Failure> {
        let mut table = match path {
            None => toml::Table::new(),
            Some(p) => read_table(p)?,
        };
        for s in sets {
            apply_set(&mut table, s)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Failure::config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.split.seed = seed;
        self.smote.seed = seed;
        self.train.seed = seed;
        self.ensemble.seed = seed;
        self.cv.seed = seed;
    }

    pub fn seeds(&self) -> Seeds {
        Seeds {
            split: self.split.seed,
            smote: self.smote.seed,
            train: self.train.seed,
            ensemble: self.ensemble.seed,
            cv: self.cv.seed,
        }
    }

    pub fn validate(&self) -> Result<(), Failure> {
        self.split.validate()?;
        for id in LearnerId::ALL {
            self.learner_spec(id)?;
        }
        self.cv_model()?;
        if self.topsis.weights.len() != 5 {
            return Err(Failure::config(format!(
                "topsis.weights needs 5 entries, got {}",
                self.topsis.weights.len()
            )));
        }
        Ok(())
    }

    pub fn learner_spec(&self, id: LearnerId) -> Result<LearnerSpec, Failure> {
        let spec = match self.learners.get(&id) {
            None => LearnerSpec::default_for(id),
            Some(params) => {
                let doc = serde_json::json!({ "learner": id.as_str(), "params": params });
                serde_json::from_value(doc).map_err(|e| Failure::config(format!("learners.{id}: {e}")))?
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn model_spec(&self, name: ModelName) -> Result<ModelSpec, Failure> {
        Ok(match name {
            ModelName::Learner(id) => ModelSpec::Learner(self.learner_spec(id)?),
            ModelName::Ensemble => {
                let mut members = EnsembleSpec::default().members;
                for (slot, id) in members.iter_mut().zip(MEMBER_IDS) {
                    *slot = self.learner_spec(id)?;
                }
                ModelSpec::Ensemble(EnsembleSpec { members })
            }
        })
    }

    pub fn model_seed(&self, name: ModelName) -> u64 {
        match name {
            ModelName::Learner(_) => self.train.seed,
            ModelName::Ensemble => self.ensemble.seed,
        }
    }

    pub fn cv_model(&self) -> Result<ModelName, Failure> {
        self.cv
            .model
            .parse()
            .map_err(|_| Failure::config(format!("cv.model: unknown model {:?}", self.cv.model)))
    }

    pub fn prepare_config(&self) -> PrepareConfig {
        PrepareConfig {
            scaler_fit: self.scaler_fit,
            split: self.split,
            smote: self.smote.clone(),
        }
    }

    pub fn cv_config(&self) -> CvConfig {
        CvConfig {
            k: self.cv.k,
            repetitions: self.cv.repetitions,
            seed: self.cv.seed,
        }
    }
}

fn read_table(path: &Path) -> Result<toml::Table, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| pdm_core::Error::io(path, e))?;
    let ctx = |msg: String| Failure::config(format!("{}: {msg}", path.display()));
    if path.extension().is_some_and(|e| e == "json") {
        let mut doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| ctx(e.to_string()))?;
        let cfg = if doc.get("config").is_some() {
            doc["config"].take()
        } else {
            doc
        };
        match toml::Value::try_from(cfg).map_err(|e| ctx(e.to_string()))? {
            toml::Value::Table(t) => Ok(t),
            _ => Err(ctx("expected a JSON object".into())),
        }
    } else {
        text.parse::<toml::Table>().map_err(|e| ctx(e.message().to_string()))
    }
}

/// Parses the right-hand side as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn apply_set(table: &mut toml::Table, assignment: &str) -> Result<(), Failure> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Failure::config(format!("--set expects key=value, got {assignment:?}")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(Failure::config(format!("--set: bad key {key:?}")));
    }
    let (last, parents) = path.split_last().expect("split yields at least one part");
    let mut node = table;
    for part in parents {
        let entry = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        node = entry
            .as_table_mut()
            .ok_or_else(|| Failure::config(format!("--set: `{part}` in {key:?} is not a table")))?;
    }
    node.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}
