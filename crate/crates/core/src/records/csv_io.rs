use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::{FeatureSchema, FeatureVector, LABEL_COLUMN};
use crate::error::{Error, Result};

/// Row accounting for one ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub rows_read: usize,
    pub rows_rejected: usize,
    /// One message per rejected row, with its line number.
    pub rejections: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct LoadedCohort {
    pub rows: Vec<FeatureVector>,
    pub report: ParseReport,
}

/// Reads a student-schema cohort file, failing on the first bad row.
pub fn load_cohort_csv(path: impl AsRef<Path>) -> Result<LoadedCohort> {
    let file = File::open(path)?;
    read_cohort(file, &FeatureSchema::student(), false)
}

/// Reads a cohort whose header names every `schema` column plus
/// [`LABEL_COLUMN`], in any order; other columns are ignored.
///
/// With `skip_bad_rows` unparsable rows are counted in the report instead of
/// aborting the read. A missing column is always an error.
pub fn read_cohort<R: Read>(
    reader: R,
    schema: &FeatureSchema,
    skip_bad_rows: bool,
) -> Result<LoadedCohort> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = csv.headers()?.clone();
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let feature_cols = schema
        .names()
        .iter()
        .map(|n| find(n))
        .collect::<Result<Vec<_>>>()?;
    let label_col = find(LABEL_COLUMN)?;

    let mut rows = Vec::new();
    let mut report = ParseReport::default();
    for record in csv.records() {
        let record = record?;
        report.rows_read += 1;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |idx: usize, name: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("");
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::Parse {
                    line,
                    column: name.to_string(),
                    value: raw.to_string(),
                }),
            }
        };
        let parsed = (|| {
            let values = feature_cols
                .iter()
                .zip(schema.names())
                .map(|(&idx, name)| cell(idx, name))
                .collect::<Result<Vec<_>>>()?;
            let label = match cell(label_col, LABEL_COLUMN)? {
                0.0 => 0,
                1.0 => 1,
                _ => {
                    return Err(Error::Parse {
                        line,
                        column: LABEL_COLUMN.to_string(),
                        value: record.get(label_col).unwrap_or("").to_string(),
                    })
                }
            };
            Ok(FeatureVector::new(values, label))
        })();
        match parsed {
            Ok(fv) => rows.push(fv),
            Err(e) if skip_bad_rows => {
                report.rows_rejected += 1;
                report.rejections.push(e.to_string());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(LoadedCohort { rows, report })
}

/// Writes rows in schema order followed by the label column. Numbers use the
/// shortest representation that parses back to the same `f64`.
pub fn write_cohort<W: Write>(
    writer: W,
    schema: &FeatureSchema,
    rows: &[FeatureVector],
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record(
        schema
            .names()
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(LABEL_COLUMN)),
    )?;
    for (i, row) in rows.iter().enumerate() {
        if row.values.len() != schema.len() {
            return Err(Error::LengthMismatch {
                expected: schema.len(),
                got: row.values.len(),
            });
        }
        if let Some(j) = row.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: i,
                feature: schema.name(j).to_string(),
            });
        }
        csv.write_record(
            row.values
                .iter()
                .map(|v| v.to_string())
                .chain(std::iter::once(row.label.to_string())),
        )?;
    }
    csv.flush()?;
    Ok(())
}
