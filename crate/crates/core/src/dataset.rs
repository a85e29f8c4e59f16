//! Decision-making units and the validated population they form.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use libm::sqrt;

#[derive(Clone, Debug, PartialEq)]
pub struct DmuRecord {
    pub id: String,
    pub name: String,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
    /// Unit aggregates several sites run by one corporate group.
    pub group: bool,
}

impl DmuRecord {
    pub fn new(id: impl Into<String>, inputs: Vec<f64>, outputs: Vec<f64>) -> Self {
        let id = id.into();
        Self {
            name: id.clone(),
            id,
            inputs,
            outputs,
            group: false,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_group(mut self, group: bool) -> Self {
        self.group = group;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetError {
    Empty,
    NoInputs,
    NoOutputs,
    MissingColumn { column: String },
    NonNumericCell { row: usize, column: String },
    NonPositiveInput { row: usize, column: String },
    NegativeOutput { row: usize, column: String },
    DuplicateId { id: String },
    EmptyId { row: usize },
    RowLength { row: usize, expected: usize, found: usize },
}

impl DatasetError {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetError::Empty => "Empty",
            DatasetError::NoInputs => "NoInputs",
            DatasetError::NoOutputs => "NoOutputs",
            DatasetError::MissingColumn { .. } => "MissingColumn",
            DatasetError::NonNumericCell { .. } => "NonNumericCell",
            DatasetError::NonPositiveInput { .. } => "NonPositiveInput",
            DatasetError::NegativeOutput { .. } => "NegativeOutput",
            DatasetError::DuplicateId { .. } => "DuplicateId",
            DatasetError::EmptyId { .. } => "EmptyId",
            DatasetError::RowLength { .. } => "RowLength",
        }
    }
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::Empty => f.write_str("dataset must contain at least one DMU (n >= 1)"),
            DatasetError::NoInputs => f.write_str("dataset must declare at least one input (m >= 1)"),
            DatasetError::NoOutputs => f.write_str("dataset must declare at least one output (s >= 1)"),
            DatasetError::MissingColumn { column } => write!(f, "missing column `{column}`"),
            DatasetError::NonNumericCell { row, column } => {
                write!(f, "row {row}, column `{column}`: not a finite number")
            }
            DatasetError::NonPositiveInput { row, column } => {
                write!(f, "row {row}, column `{column}`: inputs must be strictly positive")
            }
            DatasetError::NegativeOutput { row, column } => {
                write!(f, "row {row}, column `{column}`: outputs must be non-negative")
            }
            DatasetError::DuplicateId { id } => write!(f, "duplicate DMU id `{id}`"),
            DatasetError::EmptyId { row } => write!(f, "row {row}: empty DMU id"),
            DatasetError::RowLength { row, expected, found } => {
                write!(f, "row {row}: expected {expected} values, found {found}")
            }
        }
    }
}

impl core::error::Error for DatasetError {}

/// Rules of thumb relating the number of units to the number of variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Discrimination {
    /// `n > 3·(m + s)`
    pub strong_rule: bool,
    /// `n ≥ m + s`
    pub weak_rule: bool,
}

/// An immutable, validated population of DMUs.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    dmus: Vec<DmuRecord>,
    input_names: Vec<String>,
    output_names: Vec<String>,
}

impl Dataset {
    /// Validates and assembles a dataset. Row numbers in errors are 1-based
    /// positions in `dmus`.
    pub fn new(
        input_names: Vec<String>,
        output_names: Vec<String>,
        dmus: Vec<DmuRecord>,
    ) -> Result<Self, DatasetError> {
        if input_names.is_empty() {
            return Err(DatasetError::NoInputs);
        }
        if output_names.is_empty() {
            return Err(DatasetError::NoOutputs);
        }
        if dmus.is_empty() {
            return Err(DatasetError::Empty);
        }
        let (m, s) = (input_names.len(), output_names.len());
        for (idx, d) in dmus.iter().enumerate() {
            let row = idx + 1;
            if d.id.trim().is_empty() {
                return Err(DatasetError::EmptyId { row });
            }
            if d.inputs.len() != m || d.outputs.len() != s {
                return Err(DatasetError::RowLength {
                    row,
                    expected: m + s,
                    found: d.inputs.len() + d.outputs.len(),
                });
            }
            for (v, name) in d.inputs.iter().zip(&input_names) {
                if !v.is_finite() {
                    return Err(DatasetError::NonNumericCell {
                        row,
                        column: name.clone(),
                    });
                }
                if *v <= 0.0 {
                    return Err(DatasetError::NonPositiveInput {
                        row,
                        column: name.clone(),
                    });
                }
            }
            for (v, name) in d.outputs.iter().zip(&output_names) {
                if !v.is_finite() {
                    return Err(DatasetError::NonNumericCell {
                        row,
                        column: name.clone(),
                    });
                }
                if *v < 0.0 {
                    return Err(DatasetError::NegativeOutput {
                        row,
                        column: name.clone(),
                    });
                }
            }
            if dmus[..idx].iter().any(|other| other.id == d.id) {
                return Err(DatasetError::DuplicateId { id: d.id.clone() });
            }
        }
        Ok(Self {
            dmus,
            input_names,
            output_names,
        })
    }

    pub fn n(&self) -> usize {
        self.dmus.len()
    }

    pub fn m(&self) -> usize {
        self.input_names.len()
    }

    pub fn s(&self) -> usize {
        self.output_names.len()
    }

    pub fn dmus(&self) -> &[DmuRecord] {
        &self.dmus
    }

    pub fn dmu(&self, j: usize) -> &DmuRecord {
        &self.dmus[j]
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.dmus.iter().position(|d| d.id == id)
    }

    pub fn discrimination(&self) -> Discrimination {
        let vars = self.m() + self.s();
        Discrimination {
            strong_rule: self.n() > 3 * vars,
            weak_rule: self.n() >= vars,
        }
    }

    /// Values of input column `i` across all DMUs.
    pub fn input_column(&self, i: usize) -> Vec<f64> {
        self.dmus.iter().map(|d| d.inputs[i]).collect()
    }

    pub fn output_column(&self, o: usize) -> Vec<f64> {
        self.dmus.iter().map(|d| d.outputs[o]).collect()
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<String>, Vec<DmuRecord>) {
        (self.input_names, self.output_names, self.dmus)
    }
}

/// Descriptive statistics of one column.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    pub name: String,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 when `count < 2`.
    pub stdev: f64,
    pub stdev_defined: bool,
}

/// Quantile by linear interpolation between closest ranks
/// (`h = (n - 1)·p`, Hyndman–Fan type 7). `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0);
    let h = (n - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize_column(name: &str, values: &[f64]) -> SummaryStats {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let (stdev, stdev_defined) = if n > 1 {
        let ss: f64 = sorted.iter().map(|v| (v - mean) * (v - mean)).sum();
        (sqrt(ss / (n - 1) as f64), true)
    } else {
        (0.0, false)
    };
    SummaryStats {
        name: name.into(),
        count: n,
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        mean,
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
        stdev,
        stdev_defined,
    }
}

/// Per-column statistics, inputs first, in schema order.
pub fn summarize(ds: &Dataset) -> Vec<SummaryStats> {
    let inputs = (0..ds.m()).map(|i| summarize_column(&ds.input_names[i], &ds.input_column(i)));
    let outputs = (0..ds.s()).map(|o| summarize_column(&ds.output_names[o], &ds.output_column(o)));
    inputs.chain(outputs).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn minimal_dataset() {
        let ds = Dataset::new(
            names(&["x"]),
            names(&["y"]),
            vec![DmuRecord::new("a", vec![1.0], vec![1.0])],
        )
        .unwrap();
        assert_eq!((ds.n(), ds.m(), ds.s()), (1, 1, 1));
        let disc = ds.discrimination();
        assert!(!disc.strong_rule);
        assert!(!disc.weak_rule);
    }

    #[test]
    fn validation_errors() {
        let mk = |rows: Vec<DmuRecord>| Dataset::new(names(&["x"]), names(&["y"]), rows);
        assert_eq!(mk(vec![]), Err(DatasetError::Empty));
        assert_eq!(
            mk(vec![DmuRecord::new("a", vec![0.0], vec![1.0])]),
            Err(DatasetError::NonPositiveInput {
                row: 1,
                column: "x".into()
            })
        );
        assert_eq!(
            mk(vec![DmuRecord::new("a", vec![1.0], vec![-1.0])]),
            Err(DatasetError::NegativeOutput {
                row: 1,
                column: "y".into()
            })
        );
        assert_eq!(
            mk(vec![
                DmuRecord::new("a", vec![1.0], vec![1.0]),
                DmuRecord::new("a", vec![2.0], vec![1.0]),
            ]),
            Err(DatasetError::DuplicateId { id: "a".into() })
        );
        assert!(matches!(
            mk(vec![DmuRecord::new("a", vec![1.0, 2.0], vec![1.0])]),
            Err(DatasetError::RowLength { .. })
        ));
        assert!(matches!(
            mk(vec![DmuRecord::new("a", vec![f64::NAN], vec![1.0])]),
            Err(DatasetError::NonNumericCell { .. })
        ));
        // zero outputs are legal
        assert!(mk(vec![DmuRecord::new("a", vec![1.0], vec![0.0])]).is_ok());
    }

    #[test]
    fn type7_quantiles() {
        let s = summarize_column("v", &[4.0, 1.0, 3.0, 2.0]);
        assert_eq!(s.q1, 1.75);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.q3, 3.25);
        assert_eq!(s.mean, 2.5);
        assert!((s.stdev - libm::sqrt(5.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn single_value_column() {
        let s = summarize_column("v", &[7.5]);
        assert_eq!((s.min, s.mean, s.max, s.median), (7.5, 7.5, 7.5, 7.5));
        assert_eq!(s.stdev, 0.0);
        assert!(!s.stdev_defined);
    }

    #[test]
    fn constant_column_has_zero_spread() {
        let s = summarize_column("v", &[3.0; 9]);
        assert_eq!(s.stdev, 0.0);
        assert_eq!(s.min, s.max);
    }
}
