//! Raw dataset to model-ready matrices: validate, scale, encode, split,
//! and balance the training part.

use serde::{Deserialize, Serialize};

use crate::dataio::{train_test_split, validate, CanonicalDataset, DataSplit, SplitConfig, ValidationReport};
use crate::error::{Error, Result};
use crate::matrix::LabeledMatrix;
use crate::preprocess::{encode_records, fit_minmax, smote_oversample, ScalerParams, SmoteConfig};

/// Rows the min-max bounds are fitted on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalerFit {
    /// Every row, before the split.
    #[default]
    Full,
    /// Training rows only.
    Train,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrepareConfig {
    pub scaler_fit: ScalerFit,
    pub split: SplitConfig,
    pub smote: SmoteConfig,
}

impl Default for PrepareConfig {
    fn default() -> Self {
        PrepareConfig {
            scaler_fit: ScalerFit::Full,
            split: SplitConfig::default(),
            smote: SmoteConfig {
                // F1, the label-encoded product type
                integer_columns: vec![0],
                ..SmoteConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub validation: ValidationReport,
    pub scaler: ScalerParams,
    /// Every row, encoded, in file order.
    pub encoded: LabeledMatrix,
    pub split: DataSplit,
    /// Training rows before balancing.
    pub train_original: LabeledMatrix,
    /// Training rows after SMOTE; originals first.
    pub train: LabeledMatrix,
    pub test: LabeledMatrix,
}

impl Prepared {
    pub fn synthetic_rows(&self) -> usize {
        self.train.len() - self.train_original.len()
    }
}

/// The dataset after validation, scaling and encoding, before balancing.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub validation: ValidationReport,
    pub scaler: ScalerParams,
    /// Every row, in file order.
    pub matrix: LabeledMatrix,
    pub split: DataSplit,
}

/// Validates, splits, fits the scaler and encodes every row.
pub fn encode_dataset(ds: &CanonicalDataset, cfg: &PrepareConfig) -> Result<Encoded> {
    cfg.split.validate()?;
    let validation = validate(ds);
    if let Some(v) = validation.violations.first() {
        return Err(Error::InvalidData(format!(
            "{} problem(s), first at record {} column {} ({:?})",
            validation.violations.len(),
            v.row + 1,
            v.column,
            v.kind
        )));
    }
    let split = train_test_split(ds, &cfg.split)?;
    let physical: Vec<[f64; 5]> = match cfg.scaler_fit {
        ScalerFit::Full => ds.records.iter().map(|r| r.physical()).collect(),
        ScalerFit::Train => split.train_indices.iter().map(|&i| ds.records[i].physical()).collect(),
    };
    let scaler = fit_minmax(&physical)?;
    let matrix = encode_records(&ds.records, &scaler);
    Ok(Encoded {
        validation,
        scaler,
        matrix,
        split,
    })
}

/// [`encode_dataset`] followed by SMOTE on the training rows.
pub fn prepare(ds: &CanonicalDataset, cfg: &PrepareConfig) -> Result<Prepared> {
    let Encoded {
        validation,
        scaler,
        matrix: encoded,
        split,
    } = encode_dataset(ds, cfg)?;
    let train_original = encoded.select(&split.train_indices);
    let test = encoded.select(&split.test_indices);
    let train = smote_oversample(&train_original, &cfg.smote)?;
    Ok(Prepared {
        validation,
        scaler,
        encoded,
        split,
        train_original,
        train,
        test,
    })
}
