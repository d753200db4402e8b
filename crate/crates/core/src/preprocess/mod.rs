//! Feature encoding and class balancing.
//!
//! Rows are encoded into six features in table order: `F1` is the product
//! type label-encoded as L→1, M→2, H→0; `F2..F6` are air temperature,
//! process temperature, rotational speed, torque and tool wear, each
//! min-max scaled with bounds fitted on a reference population.

mod smote;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dataio::{RawRecord, TypeCode};
use crate::error::{Error, Result};
use crate::matrix::{LabeledMatrix, Matrix};

pub use smote::{nearest_neighbors, smote_oversample, smote_trace, SmoteConfig, SyntheticRow};

/// Number of min-max scaled columns (F2..F6).
pub const SCALED_COLUMNS: usize = 5;
pub const ENCODED_HEADER: [&str; 7] = ["F1", "F2", "F3", "F4", "F5", "F6", "label"];

/// Encoded feature matrix: six columns plus a binary label per row.
pub type EncodedMatrix = LabeledMatrix;

/// Column-wise bounds of the raw physical features.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub min: [f64; SCALED_COLUMNS],
    pub max: [f64; SCALED_COLUMNS],
}

impl ScalerParams {
    /// Columns whose fitted range is empty; they scale to 0.0.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..SCALED_COLUMNS).filter(|&j| self.max[j] == self.min[j]).collect()
    }

    pub fn apply(&self, raw: &[f64; SCALED_COLUMNS]) -> [f64; SCALED_COLUMNS] {
        let mut out = [0.0; SCALED_COLUMNS];
        for j in 0..SCALED_COLUMNS {
            let span = self.max[j] - self.min[j];
            out[j] = if span > 0.0 { (raw[j] - self.min[j]) / span } else { 0.0 };
        }
        out
    }

    pub fn inverse(&self, scaled: &[f64; SCALED_COLUMNS]) -> [f64; SCALED_COLUMNS] {
        let mut out = [0.0; SCALED_COLUMNS];
        for j in 0..SCALED_COLUMNS {
            out[j] = self.min[j] + scaled[j] * (self.max[j] - self.min[j]);
        }
        out
    }
}

pub fn fit_minmax(rows: &[[f64; SCALED_COLUMNS]]) -> Result<ScalerParams> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("min-max scaler needs at least one row".into()));
    }
    let mut p = ScalerParams {
        min: [f64::INFINITY; SCALED_COLUMNS],
        max: [f64::NEG_INFINITY; SCALED_COLUMNS],
    };
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite value in row {i}, column {j}")));
            }
            p.min[j] = p.min[j].min(v);
            p.max[j] = p.max[j].max(v);
        }
    }
    Ok(p)
}

pub fn fit_records(records: &[RawRecord]) -> Result<ScalerParams> {
    let rows: Vec<_> = records.iter().map(RawRecord::physical).collect();
    fit_minmax(&rows)
}

pub fn encode_type(code: TypeCode) -> u8 {
    match code {
        TypeCode::L => 1,
        TypeCode::M => 2,
        TypeCode::H => 0,
    }
}

pub fn encode_type_str(code: &str) -> Result<u8> {
    code.parse::<TypeCode>().map(encode_type)
}

pub fn encode_record(record: &RawRecord, params: &ScalerParams) -> [f64; 6] {
    let scaled = params.apply(&record.physical());
    let mut out = [0.0; 6];
    out[0] = f64::from(encode_type(record.type_code));
    out[1..].copy_from_slice(&scaled);
    out
}

pub fn encode_records(records: &[RawRecord], params: &ScalerParams) -> EncodedMatrix {
    let mut features = Matrix::with_cols(6);
    let mut labels = Vec::with_capacity(records.len());
    for r in records {
        features
            .push_row(&encode_record(r, params))
            .expect("six encoded columns");
        labels.push(r.machine_failure);
    }
    LabeledMatrix { features, labels }
}

/// `F1,...,F6,label` CSV, one row per sample.
pub fn write_encoded_csv<W: Write>(m: &EncodedMatrix, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(ENCODED_HEADER)?;
    let mut fields = Vec::with_capacity(7);
    for (row, label) in m.features.rows().zip(&m.labels) {
        fields.clear();
        fields.extend(row.iter().map(|v| v.to_string()));
        fields.push(label.to_string());
        w.write_record(&fields)?;
    }
    w.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

pub fn read_encoded_csv<R: Read>(reader: R) -> Result<EncodedMatrix> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    for name in ENCODED_HEADER {
        if !headers.iter().any(|h| h == name) {
            return Err(Error::MissingColumn(name.to_string()));
        }
    }
    let n_features = headers.len() - 1;
    let mut features = Matrix::with_cols(n_features);
    let mut labels = Vec::new();
    let mut row = Vec::with_capacity(n_features);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        row.clear();
        for (j, field) in rec.iter().enumerate().take(n_features) {
            row.push(field.parse::<f64>().map_err(|_| Error::TypeParse {
                row: i + 1,
                column: headers[j].to_string(),
                value: field.to_string(),
            })?);
        }
        let label = rec.get(n_features).unwrap_or("");
        labels.push(match label {
            "0" => 0,
            "1" => 1,
            _ => {
                return Err(Error::TypeParse {
                    row: i + 1,
                    column: "label".into(),
                    value: label.to_string(),
                })
            }
        });
        features.push_row(&row)?;
    }
    if labels.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(LabeledMatrix { features, labels })
}
