//! Second-stage covariates, joined to efficiency scores by DMU id.

use std::collections::HashMap;
use std::fmt;

use effx_core::DenseMatrix;

/// Regressor columns, in the order they enter the design matrix.
pub const COVARIATE_NAMES: [&str; 6] = ["SUSTAINABILITY", "EBITDA", "LCC", "OWNERSHIP", "GROUP", "LOGAREAPAX"];

#[derive(Clone, Debug, PartialEq)]
pub enum CovariateError {
    Empty,
    MissingColumn {
        column: String,
    },
    NonNumericCell {
        row: usize,
        column: String,
    },
    OutOfRange {
        row: usize,
        column: String,
        expected: &'static str,
    },
    DuplicateId {
        id: String,
    },
    RowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    /// A scored DMU has no covariate row.
    MissingId {
        id: String,
    },
}

impl CovariateError {
    pub fn name(&self) -> &'static str {
        match self {
            CovariateError::Empty => "Empty",
            CovariateError::MissingColumn { .. } => "MissingColumn",
            CovariateError::NonNumericCell { .. } => "NonNumericCell",
            CovariateError::OutOfRange { .. } => "OutOfRange",
            CovariateError::DuplicateId { .. } => "DuplicateId",
            CovariateError::RowLength { .. } => "RowLength",
            CovariateError::MissingId { .. } => "MissingId",
        }
    }
}

impl fmt::Display for CovariateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CovariateError::Empty => f.write_str("covariate file has no rows"),
            CovariateError::MissingColumn { column } => write!(f, "required column `{column}` not found"),
            CovariateError::NonNumericCell { row, column } => {
                write!(f, "row {row}, column `{column}`: not a finite number")
            }
            CovariateError::OutOfRange { row, column, expected } => {
                write!(f, "row {row}, column `{column}`: expected {expected}")
            }
            CovariateError::DuplicateId { id } => write!(f, "id `{id}` appears more than once"),
            CovariateError::RowLength { row, expected, found } => {
                write!(f, "row {row}: expected {expected} cells, found {found}")
            }
            CovariateError::MissingId { id } => write!(f, "no covariates for DMU `{id}`"),
        }
    }
}

impl std::error::Error for CovariateError {}

#[derive(Clone, Debug, PartialEq)]
pub struct CovariateTable {
    rows: HashMap<String, Vec<f64>>,
}

fn check_domain(column: &str, v: f64) -> Option<&'static str> {
    match column {
        "SUSTAINABILITY" if !(v.fract() == 0.0 && (0.0..=7.0).contains(&v)) => Some("an integer from 0 to 7"),
        "OWNERSHIP" | "GROUP" if v != 0.0 && v != 1.0 => Some("0 or 1"),
        _ => None,
    }
}

impl CovariateTable {
    /// Parses `id,SUSTAINABILITY,EBITDA,LCC,OWNERSHIP,GROUP,LOGAREAPAX` (any
    /// column order; extra columns ignored).
    pub fn parse(text: &str) -> Result<Self, CovariateError> {
        if text.trim().is_empty() {
            return Err(CovariateError::Empty);
        }
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|_| CovariateError::Empty)?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| CovariateError::MissingColumn {
                    column: name.to_string(),
                })
        };
        let id_col = find("id")?;
        let cols = COVARIATE_NAMES.iter().map(|c| find(c)).collect::<Result<Vec<_>, _>>()?;
        let mut rows = HashMap::new();
        for (idx, record) in rdr.records().enumerate() {
            let row = idx + 1;
            let record = record.map_err(|_| CovariateError::RowLength {
                row,
                expected: headers.len(),
                found: 0,
            })?;
            if record.len() != headers.len() {
                return Err(CovariateError::RowLength {
                    row,
                    expected: headers.len(),
                    found: record.len(),
                });
            }
            let mut values = Vec::with_capacity(cols.len());
            for (&c, name) in cols.iter().zip(COVARIATE_NAMES) {
                let v = record[c].parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    CovariateError::NonNumericCell {
                        row,
                        column: name.to_string(),
                    }
                })?;
                if let Some(expected) = check_domain(name, v) {
                    return Err(CovariateError::OutOfRange {
                        row,
                        column: name.to_string(),
                        expected,
                    });
                }
                values.push(v);
            }
            let id = record[id_col].to_string();
            if rows.insert(id.clone(), values).is_some() {
                return Err(CovariateError::DuplicateId { id });
            }
        }
        if rows.is_empty() {
            return Err(CovariateError::Empty);
        }
        Ok(Self { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Design matrix for `ids` in the given order: an intercept column
    /// followed by the covariates.
    pub fn design(&self, ids: &[&str]) -> Result<DenseMatrix, CovariateError> {
        let mut rows = Vec::with_capacity(ids.len());
        for id in ids {
            let values = self
                .rows
                .get(*id)
                .ok_or_else(|| CovariateError::MissingId { id: id.to_string() })?;
            let mut row = vec![1.0];
            row.extend_from_slice(values);
            rows.push(row);
        }
        Ok(DenseMatrix::from_rows(&rows).expect("rectangular by construction"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "id,SUSTAINABILITY,EBITDA,LCC,OWNERSHIP,GROUP,LOGAREAPAX";

    #[test]
    fn joins_in_requested_order() {
        let text = format!("{HEADER}\nA,3,0.2,0.5,1,0,9.1\nB,0,-0.4,0.1,0,1,7.5\n");
        let t = CovariateTable::parse(&text).unwrap();
        let x = t.design(&["B", "A"]).unwrap();
        assert_eq!(x.row(0), &[1.0, 0.0, -0.4, 0.1, 0.0, 1.0, 7.5]);
        assert_eq!(x.row(1)[1], 3.0);
        assert_eq!(t.design(&["C"]), Err(CovariateError::MissingId { id: "C".into() }));
    }

    #[test]
    fn domain_checks() {
        let bad_sust = format!("{HEADER}\nA,8,0.2,0.5,1,0,9.1\n");
        assert!(matches!(
            CovariateTable::parse(&bad_sust),
            Err(CovariateError::OutOfRange { .. })
        ));
        let frac = format!("{HEADER}\nA,2.5,0.2,0.5,1,0,9.1\n");
        assert!(matches!(
            CovariateTable::parse(&frac),
            Err(CovariateError::OutOfRange { .. })
        ));
        let flag = format!("{HEADER}\nA,2,0.2,0.5,2,0,9.1\n");
        assert!(matches!(
            CovariateTable::parse(&flag),
            Err(CovariateError::OutOfRange { .. })
        ));
        assert_eq!(CovariateTable::parse(HEADER), Err(CovariateError::Empty));
        assert!(matches!(
            CovariateTable::parse("id,EBITDA\nA,1\n"),
            Err(CovariateError::MissingColumn { .. })
        ));
    }
}
