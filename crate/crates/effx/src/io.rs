//! CSV reading and writing for DMU datasets.
//!
//! The dialect is plain RFC 4180: comma separated, one header row, cells
//! trimmed. Columns are located by header name so their order in the file
//! does not matter; `name` and `GROUP` are optional.

use std::path::Path;

use effx_core::fixture::{INPUT_NAMES, OUTPUT_NAMES};
use effx_core::{Dataset, DatasetError, DmuRecord};

use crate::error::EffxError;

/// Which columns are inputs and which are outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Default for Schema {
    /// The airport layout of the bundled fixture.
    fn default() -> Self {
        Self {
            inputs: INPUT_NAMES.iter().map(|s| s.to_string()).collect(),
            outputs: OUTPUT_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn required(headers: &csv::StringRecord, name: &str) -> Result<usize, DatasetError> {
    column(headers, name).ok_or_else(|| DatasetError::MissingColumn {
        column: name.to_string(),
    })
}

fn parse_flag(cell: &str) -> Option<bool> {
    match cell {
        "1" | "true" | "TRUE" | "yes" => Some(true),
        "0" | "false" | "FALSE" | "no" | "" => Some(false),
        _ => None,
    }
}

/// Parses a dataset from CSV text. Row numbers in errors count data rows
/// from 1.
pub fn parse_dataset(text: &str, schema: &Schema) -> Result<Dataset, DatasetError> {
    if text.trim().is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut rdr = reader(text);
    let headers = rdr.headers().map_err(|_| DatasetError::Empty)?.clone();
    let id_col = required(&headers, "id")?;
    let name_col = column(&headers, "name");
    let group_col = column(&headers, "GROUP");
    let in_cols = schema
        .inputs
        .iter()
        .map(|c| required(&headers, c))
        .collect::<Result<Vec<_>, _>>()?;
    let out_cols = schema
        .outputs
        .iter()
        .map(|c| required(&headers, c))
        .collect::<Result<Vec<_>, _>>()?;

    let mut dmus = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|_| DatasetError::RowLength {
            row,
            expected: headers.len(),
            found: 0,
        })?;
        if record.len() != headers.len() {
            return Err(DatasetError::RowLength {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let number = |col: usize, name: &str| -> Result<f64, DatasetError> {
            record[col]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DatasetError::NonNumericCell {
                    row,
                    column: name.to_string(),
                })
        };
        let inputs = in_cols
            .iter()
            .zip(&schema.inputs)
            .map(|(&c, n)| number(c, n))
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = out_cols
            .iter()
            .zip(&schema.outputs)
            .map(|(&c, n)| number(c, n))
            .collect::<Result<Vec<_>, _>>()?;
        let mut dmu = DmuRecord::new(&record[id_col], inputs, outputs);
        if let Some(c) = name_col {
            if !record[c].is_empty() {
                dmu = dmu.with_name(&record[c]);
            }
        }
        if let Some(c) = group_col {
            let flag = parse_flag(&record[c]).ok_or_else(|| DatasetError::NonNumericCell {
                row,
                column: "GROUP".to_string(),
            })?;
            dmu = dmu.with_group(flag);
        }
        dmus.push(dmu);
    }
    Dataset::new(schema.inputs.clone(), schema.outputs.clone(), dmus)
}

pub fn read_dataset(path: &Path, schema: &Schema) -> Result<Dataset, EffxError> {
    let text = read_text(path)?;
    Ok(parse_dataset(&text, schema)?)
}

pub(crate) fn read_text(path: &Path) -> Result<String, EffxError> {
    std::fs::read_to_string(path).map_err(|source| EffxError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `id,name,<inputs>,<outputs>,GROUP`. Numbers use the shortest
/// representation that parses back to the same `f64`.
pub fn serialize_dataset(ds: &Dataset) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["id".to_string(), "name".to_string()];
    header.extend(ds.input_names().iter().cloned());
    header.extend(ds.output_names().iter().cloned());
    header.push("GROUP".to_string());
    w.write_record(&header).expect("in-memory write");
    for d in ds.dmus() {
        let mut rec = vec![d.id.clone(), d.name.clone()];
        rec.extend(d.inputs.iter().chain(&d.outputs).map(|v| v.to_string()));
        rec.push(if d.group { "1" } else { "0" }.to_string());
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}
