//! Ingest and validation of AI4I 2020 predictive-maintenance CSV files.
//!
//! The expected header is
//!
//! ```text
//! UDI,Product ID,Type,Air temperature [K],Process temperature [K],Rotational speed [rpm],Torque [Nm],Tool wear [min],Machine failure,TWF,HDF,PWF,OSF,RNF
//! ```
//!
//! Columns are located by name. The five failure-mode flags are parsed and
//! kept on each [`RawRecord`] but nothing downstream reads them; the binary
//! `Machine failure` column is the only target.

mod split;
pub mod surrogate;

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use split::{train_test_split, DataSplit, SplitConfig};

pub const HEADER: [&str; 14] = [
    "UDI",
    "Product ID",
    "Type",
    "Air temperature [K]",
    "Process temperature [K]",
    "Rotational speed [rpm]",
    "Torque [Nm]",
    "Tool wear [min]",
    "Machine failure",
    "TWF",
    "HDF",
    "PWF",
    "OSF",
    "RNF",
];

/// Product quality variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeCode {
    L,
    M,
    H,
}

impl FromStr for TypeCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L" => Ok(TypeCode::L),
            "M" => Ok(TypeCode::M),
            "H" => Ok(TypeCode::H),
            other => Err(Error::UnknownCategory(other.to_string())),
        }
    }
}

impl fmt::Display for TypeCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeCode::L => "L",
            TypeCode::M => "M",
            TypeCode::H => "H",
        })
    }
}

/// Failure-mode flags. Retained for completeness only.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureModes {
    pub twf: bool,
    pub hdf: bool,
    pub pwf: bool,
    pub osf: bool,
    pub rnf: bool,
}

/// One row of the dataset in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecord {
    pub udi: u64,
    pub product_id: String,
    pub type_code: TypeCode,
    /// Kelvin.
    pub air_temp: f64,
    /// Kelvin.
    pub process_temp: f64,
    /// Revolutions per minute.
    pub rot_speed: f64,
    /// Newton-metres.
    pub torque: f64,
    /// Minutes.
    pub tool_wear: f64,
    pub machine_failure: u8,
    pub modes: FailureModes,
}

impl RawRecord {
    /// The five continuous features in column order.
    pub fn physical(&self) -> [f64; 5] {
        [
            self.air_temp,
            self.process_temp,
            self.rot_speed,
            self.torque,
            self.tool_wear,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDataset {
    pub records: Vec<RawRecord>,
    /// Lowercase hex SHA-256 of the source bytes.
    pub source_digest: String,
}

impl CanonicalDataset {
    /// Wraps in-memory records; the digest is that of their CSV rendering.
    pub fn from_records(records: Vec<RawRecord>) -> Self {
        let mut bytes = Vec::new();
        write_csv(&records, &mut bytes).expect("writing to memory cannot fail");
        CanonicalDataset {
            records,
            source_digest: hex_digest(&bytes),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<u8> {
        self.records.iter().map(|r| r.machine_failure).collect()
    }
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<CanonicalDataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&bytes)
}

pub fn read_csv<R: Read>(mut reader: R) -> Result<CanonicalDataset> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes).map_err(|e| Error::io("<reader>", e))?;
    parse_csv(&bytes)
}

fn parse_csv(bytes: &[u8]) -> Result<CanonicalDataset> {
    let source_digest = hex_digest(bytes);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);

    let headers = rdr.headers()?.clone();
    let mut positions = [0usize; HEADER.len()];
    for (slot, name) in positions.iter_mut().zip(HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))?;
    }

    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let field = |col: usize| -> Result<&str> {
            rec.get(positions[col]).ok_or_else(|| Error::TypeParse {
                row,
                column: HEADER[col].to_string(),
                value: String::new(),
            })
        };
        let bad = |col: usize, value: &str| Error::TypeParse {
            row,
            column: HEADER[col].to_string(),
            value: value.to_string(),
        };
        let real = |col: usize| -> Result<f64> {
            let s = field(col)?;
            s.parse::<f64>().map_err(|_| bad(col, s))
        };
        let flag = |col: usize| -> Result<u8> {
            let s = field(col)?;
            match s {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => Err(bad(col, s)),
            }
        };

        let udi_s = field(0)?;
        let type_s = field(2)?;
        records.push(RawRecord {
            udi: udi_s.parse().map_err(|_| bad(0, udi_s))?,
            product_id: field(1)?.to_string(),
            type_code: type_s.parse().map_err(|_| bad(2, type_s))?,
            air_temp: real(3)?,
            process_temp: real(4)?,
            rot_speed: real(5)?,
            torque: real(6)?,
            tool_wear: real(7)?,
            machine_failure: flag(8)?,
            modes: FailureModes {
                twf: flag(9)? == 1,
                hdf: flag(10)? == 1,
                pwf: flag(11)? == 1,
                osf: flag(12)? == 1,
                rnf: flag(13)? == 1,
            },
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyFile);
    }
    Ok(CanonicalDataset { records, source_digest })
}

/// Lowercase hex SHA-256 of `bytes`.
pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes records back out under the canonical header.
pub fn write_csv<W: std::io::Write>(records: &[RawRecord], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(HEADER)?;
    let b = |v: bool| if v { "1" } else { "0" };
    for r in records {
        w.write_record([
            r.udi.to_string().as_str(),
            &r.product_id,
            &r.type_code.to_string(),
            &r.air_temp.to_string(),
            &r.process_temp.to_string(),
            &r.rot_speed.to_string(),
            &r.torque.to_string(),
            &r.tool_wear.to_string(),
            &r.machine_failure.to_string(),
            b(r.modes.twf),
            b(r.modes.hdf),
            b(r.modes.pwf),
            b(r.modes.osf),
            b(r.modes.rnf),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<writer>", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub column: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    NotFinite,
    Negative,
    NonPositiveSpeed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Zero-based record index.
    pub row: usize,
    pub column: String,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_rows: usize,
    /// `[negatives, positives]`.
    pub class_counts: [usize; 2],
    pub ranges: Vec<ColumnRange>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate(ds: &CanonicalDataset) -> ValidationReport {
    validate_records(&ds.records)
}

pub fn validate_records(records: &[RawRecord]) -> ValidationReport {
    let names = &HEADER[3..8];
    let mut ranges: Vec<ColumnRange> = names
        .iter()
        .map(|n| ColumnRange {
            column: n.to_string(),
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        })
        .collect();
    let mut violations = Vec::new();
    let mut class_counts = [0usize; 2];

    for (row, r) in records.iter().enumerate() {
        class_counts[usize::from(r.machine_failure == 1)] += 1;
        for (j, v) in r.physical().into_iter().enumerate() {
            let kind = if !v.is_finite() {
                Some(ViolationKind::NotFinite)
            } else if v < 0.0 {
                Some(ViolationKind::Negative)
            } else if j == 2 && v == 0.0 {
                Some(ViolationKind::NonPositiveSpeed)
            } else {
                None
            };
            match kind {
                Some(kind) => violations.push(Violation {
                    row,
                    column: names[j].to_string(),
                    kind,
                }),
                None => {
                    ranges[j].min = ranges[j].min.min(v);
                    ranges[j].max = ranges[j].max.max(v);
                }
            }
        }
    }
    if records.is_empty() {
        ranges.clear();
    }
    ValidationReport {
        n_rows: records.len(),
        class_counts,
        ranges,
        violations,
    }
}
