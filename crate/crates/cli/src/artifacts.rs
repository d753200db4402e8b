//! Output layout, atomic file writes and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use pdm_core::dataio::hex_digest;
use pdm_core::model::ModelName;
use pdm_core::Error;

use crate::config::{RunConfig, Seeds};
use crate::Failure;

pub const MANIFEST: &str = "manifest.json";

/// Paths of every artifact under one output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Layout { root: root.into() }
    }

    pub fn encoded_csv(&self) -> PathBuf {
        self.root.join("data/encoded.csv")
    }

    pub fn train_csv(&self) -> PathBuf {
        self.root.join("data/train.csv")
    }

    pub fn test_csv(&self) -> PathBuf {
        self.root.join("data/test.csv")
    }

    pub fn preprocessing_json(&self) -> PathBuf {
        self.root.join("data/preprocessing.json")
    }

    pub fn model(&self, name: ModelName) -> PathBuf {
        self.root.join(format!("models/{name}.model.json"))
    }

    pub fn metrics(&self, name: ModelName) -> PathBuf {
        self.root.join(format!("metrics/{name}.metrics.json"))
    }

    pub fn confusion_svg(&self) -> PathBuf {
        self.root.join("confusion.svg")
    }

    pub fn cv_grid_csv(&self) -> PathBuf {
        self.root.join("cv_grid.csv")
    }

    pub fn cv_svg(&self) -> PathBuf {
        self.root.join("cv.svg")
    }

    pub fn ranking_csv(&self) -> PathBuf {
        self.root.join("ranking.csv")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join(MANIFEST)
    }

    /// `path` relative to the output root, with forward slashes.
    pub fn relative(&self, path: &Path) -> String {
        path.strip_prefix(&self.root)
            .unwrap_or(path)
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Error::io(path, e).into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub path: PathBuf,
    pub sha256: String,
    pub rows: usize,
    pub positives: usize,
}

/// What one subcommand produced.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// Output path (relative to the run root) to SHA-256.
    pub outputs: BTreeMap<String, String>,
    pub summary: serde_json::Value,
}

impl StepRecord {
    /// Folds a later record of the same step into this one. Outputs are
    /// unioned, the object under `key` in the summary is extended, and every
    /// other summary field takes the newer value.
    pub fn merge(&mut self, mut newer: StepRecord, key: &str) {
        self.outputs.append(&mut newer.outputs);
        let mut inner = self
            .summary
            .get(key)
            .and_then(|v| v.as_object())
            .cloned()
            .unwrap_or_default();
        if let Some(n) = newer.summary.get(key).and_then(|v| v.as_object()) {
            inner.extend(n.clone());
        }
        self.summary = newer.summary;
        if let Some(obj) = self.summary.as_object_mut() {
            obj.insert(key.to_string(), serde_json::Value::Object(inner));
        }
    }
}

/// Everything needed to repeat a run: the resolved config, the seeds, the
/// input digest and the digests of what each step wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub seeds: Seeds,
    pub dataset: Option<DatasetInfo>,
    pub steps: BTreeMap<String, StepRecord>,
}

impl Manifest {
    /// Loads the manifest in `layout`, or starts a fresh one. The config and
    /// seeds are always replaced by `cfg`.
    pub fn open(layout: &Layout, cfg: &RunConfig) -> Result<Manifest, Failure> {
        let path = layout.manifest();
        let mut m = if path.exists() {
            let bytes = read(&path)?;
            serde_json::from_slice::<Manifest>(&bytes)
                .map_err(|e| Failure::from(Error::from(e)).context(path.display().to_string()))?
        } else {
            Manifest {
                tool: "pdm".into(),
                version: env!("CARGO_PKG_VERSION").into(),
                config: cfg.clone(),
                seeds: cfg.seeds(),
                dataset: None,
                steps: BTreeMap::new(),
            }
        };
        m.version = env!("CARGO_PKG_VERSION").into();
        m.config = cfg.clone();
        m.seeds = cfg.seeds();
        Ok(m)
    }

    pub fn save(&self, layout: &Layout) -> Result<(), Failure> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(Error::from)?;
        bytes.push(b'\n');
        write_atomic(&layout.manifest(), &bytes)
    }
}

/// Collects the outputs of one step while writing them.
pub struct StepWriter<'a> {
    layout: &'a Layout,
    record: StepRecord,
}

impl<'a> StepWriter<'a> {
    pub fn new(layout: &'a Layout) -> Self {
        StepWriter {
            layout,
            record: StepRecord::default(),
        }
    }

    pub fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<(), Failure> {
        write_atomic(path, bytes)?;
        self.record
            .outputs
            .insert(self.layout.relative(path), hex_digest(bytes));
        Ok(())
    }

    pub fn finish(self, summary: serde_json::Value) -> StepRecord {
        StepRecord { summary, ..self.record }
    }
}
