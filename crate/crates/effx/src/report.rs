//! Rectangular report tables and their CSV / JSON renderings.
//!
//! Values are stored at full precision and rounded only when rendered,
//! half away from zero, to the decimals attached to each cell.

use std::collections::BTreeMap;

use effx_core::dataset::SummaryStats;
use effx_core::tobit::{InferenceReport, PseudoR2Variant};
use effx_core::{FrontierReport, Rts};
use serde_json::{Map, Number, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    /// Rounded to `decimals` places on output.
    Num {
        value: f64,
        decimals: u8,
    },
    /// Shortest round-trip representation, no rounding.
    Exact(f64),
    Empty,
}

impl Cell {
    pub fn num(value: f64, decimals: u8) -> Self {
        Cell::Num { value, decimals }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Num { value, decimals } => round_half_away(*value, *decimals),
            Cell::Exact(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => Value::from(*i),
            Cell::Num { .. } | Cell::Exact(_) => {
                let text = self.render();
                text.parse::<f64>()
                    .ok()
                    .and_then(Number::from_f64)
                    .map_or(Value::String(text), Value::Number)
            }
            Cell::Empty => Value::Null,
        }
    }
}

/// Formats `v` with `decimals` places, rounding ties away from zero.
pub fn round_half_away(v: f64, decimals: u8) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let scale = 10f64.powi(decimals as i32);
    let r = (v * scale).round() / scale;
    let r = if r == 0.0 { 0.0 } else { r };
    format!("{:.*}", decimals as usize, r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportTable {
    pub title: String,
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
    pub footnotes: Vec<String>,
}

impl ReportTable {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            footnotes: Vec::new(),
        }
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Appends a row. Panics on a ragged row; tables are built in code.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.headers.len(), "ragged row in `{}`", self.title);
        self.rows.push(row);
    }

    pub fn footnote(&mut self, note: impl Into<String>) {
        self.footnotes.push(note.into());
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: BTreeMap<&str, Value> = self
                    .headers
                    .iter()
                    .map(String::as_str)
                    .zip(row.iter().map(Cell::json))
                    .collect();
                Value::Object(obj.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
            })
            .collect();
        let mut out = Map::new();
        out.insert("title".into(), Value::String(self.title.clone()));
        out.insert("columns".into(), Value::from(self.headers.clone()));
        out.insert("rows".into(), Value::Array(rows));
        out.insert("footnotes".into(), Value::from(self.footnotes.clone()));
        Value::Object(out)
    }
}

/// Renders one or more tables. CSV output separates tables with a blank
/// line; JSON output is one object per table, or `{"tables": [...]}`.
pub fn render(tables: &[ReportTable], format: Format) -> String {
    match format {
        Format::Csv => tables.iter().map(ReportTable::to_csv).collect::<Vec<_>>().join("\n"),
        Format::Json => {
            let value = match tables {
                [one] => one.to_json_value(),
                many => {
                    let mut m = Map::new();
                    m.insert(
                        "tables".into(),
                        Value::Array(many.iter().map(ReportTable::to_json_value).collect()),
                    );
                    Value::Object(m)
                }
            };
            let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

pub const SCORE_DECIMALS: u8 = 2;
pub const COEF_DECIMALS: u8 = 3;
pub const SUMMARY_DECIMALS: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RtsSelection {
    Crs,
    Vrs,
    Both,
}

/// Table 3 layout: one row per DMU in dataset order.
pub fn efficiency_table(report: &FrontierReport, selection: RtsSelection) -> ReportTable {
    let headers: &[&str] = match selection {
        RtsSelection::Both => &["id", "ote", "pte", "se", "rts"],
        RtsSelection::Crs => &["id", "ote", "rts"],
        RtsSelection::Vrs => &["id", "pte"],
    };
    let mut t = ReportTable::new("DEA efficiency scores (input oriented)", headers);
    for r in &report.results {
        let id = Cell::text(&r.dmu_id);
        let ote = Cell::num(r.ote, SCORE_DECIMALS);
        let pte = Cell::num(r.pte, SCORE_DECIMALS);
        let rts = Cell::text(r.rts.as_str());
        t.push(match selection {
            RtsSelection::Both => vec![id, ote, pte, Cell::num(r.se, SCORE_DECIMALS), rts],
            RtsSelection::Crs => vec![id, ote, rts],
            RtsSelection::Vrs => vec![id, pte],
        });
    }
    let n = report.results.len();
    if selection != RtsSelection::Vrs {
        t.footnote(format!(
            "{} of {n} units efficient under constant returns; mean OTE {}",
            report.crs_efficient,
            round_half_away(report.mean_ote, 4)
        ));
        t.footnote(format!(
            "returns to scale: {} constant, {} increasing, {} decreasing",
            report.rts_count(Rts::Constant),
            report.rts_count(Rts::Increasing),
            report.rts_count(Rts::Decreasing)
        ));
    }
    if selection != RtsSelection::Crs {
        t.footnote(format!(
            "{} of {n} units efficient under variable returns; mean PTE {}",
            report.vrs_efficient,
            round_half_away(report.mean_pte, 4)
        ));
    }
    t
}

/// Table 2 layout.
pub fn summary_table(stats: &[SummaryStats]) -> ReportTable {
    let mut t = ReportTable::new(
        "Summary statistics",
        &["variable", "min", "q1", "median", "mean", "q3", "max", "stdev"],
    );
    let d = SUMMARY_DECIMALS;
    for s in stats {
        t.push(vec![
            Cell::text(&s.name),
            Cell::num(s.min, d),
            Cell::num(s.q1, d),
            Cell::num(s.median, d),
            Cell::num(s.mean, d),
            Cell::num(s.q3, d),
            Cell::num(s.max, d),
            if s.stdev_defined {
                Cell::num(s.stdev, d)
            } else {
                Cell::Empty
            },
        ]);
    }
    t.footnote("quartiles by linear interpolation between order statistics; sample standard deviation");
    t
}

pub const SIGNIFICANCE_NOTE: &str = "*p<0.1; **p<0.05; ***p<0.01";

/// Table 5 layout: one column group per model, regressor rows first, then
/// fit statistics. For statistic rows `estimate` holds the statistic and
/// `p` its p-value.
/// A summary-statistic row: label plus the six cells filled per model.
type StatRow = (&'static str, fn(&InferenceReport) -> [Cell; 6]);

pub fn regression_table(models: &[(&str, &InferenceReport)], regressors: &[&str]) -> ReportTable {
    let mut headers = vec!["term".to_string()];
    for (label, _) in models {
        for suffix in ["estimate", "robust_se", "z", "p", "stars", "marginal_effect"] {
            headers.push(format!("{label}_{suffix}"));
        }
    }
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut t = ReportTable::new("Two-limit Tobit regressions on efficiency scores", &header_refs);
    let d = COEF_DECIMALS;
    let coef_count = models.first().map_or(0, |(_, r)| r.coefficients.len());
    // Regressors first, intercept last, as in the published layout.
    let order: Vec<usize> = (1..coef_count)
        .chain(std::iter::once(0))
        .filter(|_| coef_count > 0)
        .collect();
    for &j in &order {
        let name = if j == 0 {
            "Constant"
        } else {
            regressors.get(j - 1).copied().unwrap_or("x")
        };
        let mut row = vec![Cell::text(name)];
        for (_, r) in models {
            let c = &r.coefficients[j];
            row.extend([
                Cell::num(c.estimate, d),
                Cell::num(c.robust_se, d),
                Cell::num(c.z, d),
                Cell::num(c.p_value, d),
                Cell::text(c.stars),
                Cell::num(r.marginal_effects[j], d),
            ]);
        }
        t.push(row);
    }
    let stat_rows: [StatRow; 8] = [
        ("sigma", |r| {
            [
                Cell::num(r.sigma, COEF_DECIMALS),
                Cell::num(r.sigma_se, COEF_DECIMALS),
                Cell::Empty,
                Cell::Empty,
                Cell::text(""),
                Cell::Empty,
            ]
        }),
        ("Observations", |r| stat(Cell::Int(r.n_obs as i64), None, "")),
        ("Censored at lower limit", |r| {
            stat(Cell::Int(r.n_lower as i64), None, "")
        }),
        ("Censored at upper limit", |r| {
            stat(Cell::Int(r.n_upper as i64), None, "")
        }),
        ("Log Likelihood", |r| stat(Cell::num(r.loglik, COEF_DECIMALS), None, "")),
        ("Wald Test", |r| {
            stat(
                Cell::num(r.wald.stat, COEF_DECIMALS),
                Some(r.wald.p_value),
                effx_core::tobit::significance_stars(r.wald.p_value),
            )
        }),
        ("LR Test", |r| {
            stat(
                Cell::num(r.lr.stat, COEF_DECIMALS),
                Some(r.lr.p_value),
                effx_core::tobit::significance_stars(r.lr.p_value),
            )
        }),
        ("Pseudo R2", |r| {
            stat(Cell::num(r.pseudo_r2.value, COEF_DECIMALS), None, "")
        }),
    ];
    for (name, f) in stat_rows {
        let label = match (name, models.first()) {
            ("Wald Test", Some((_, r))) => format!("Wald Test (df = {})", r.wald.df),
            ("LR Test", Some((_, r))) => format!("LR Test (df = {})", r.lr.df),
            _ => name.to_string(),
        };
        let mut row = vec![Cell::text(label)];
        for (_, r) in models {
            row.extend(f(r));
        }
        t.push(row);
    }
    t.footnote(SIGNIFICANCE_NOTE);
    t.footnote("z-tests use White robust standard errors and the normal reference distribution");
    t.footnote("marginal effects are on the unconditional censored mean, averaged over observations");
    for (label, r) in models {
        let variant = match r.pseudo_r2.variant {
            PseudoR2Variant::McFadden => "McFadden 1 - ll/ll0",
            PseudoR2Variant::SquaredCorrelation => "squared correlation of y with fitted E[y|x]",
        };
        t.footnote(format!("{label}: pseudo R2 is {variant}"));
    }
    t
}

fn stat(value: Cell, p: Option<f64>, stars: &str) -> [Cell; 6] {
    [
        value,
        Cell::Empty,
        Cell::Empty,
        p.map_or(Cell::Empty, |p| Cell::num(p, COEF_DECIMALS)),
        Cell::text(stars),
        Cell::Empty,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(0.125, 2), "0.13");
        assert_eq!(round_half_away(-0.125, 2), "-0.13");
        assert_eq!(round_half_away(2.5, 0), "3");
        assert_eq!(round_half_away(-0.0001, 2), "0.00");
        assert_eq!(round_half_away(0.864965, 2), "0.86");
        assert_eq!(round_half_away(1.0, 3), "1.000");
    }

    #[test]
    fn empty_table_renders_header_only() {
        let t = ReportTable::new("t", &["id", "ote"]);
        assert_eq!(t.to_csv(), "id,ote\n");
        let json = render(&[t], Format::Json);
        let v: Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["rows"], Value::Array(vec![]));
    }

    #[test]
    fn json_is_key_stable_and_typed() {
        let mut t = ReportTable::new("t", &["zeta", "alpha"]);
        t.push(vec![Cell::num(0.126, 2), Cell::text("x")]);
        let a = render(&[t.clone()], Format::Json);
        assert_eq!(a, render(&[t], Format::Json));
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["rows"][0]["zeta"], serde_json::json!(0.13));
        let row = a.find("\"alpha\"").unwrap();
        assert!(row < a.rfind("\"zeta\"").unwrap());
    }

    #[test]
    #[should_panic(expected = "ragged")]
    fn ragged_rows_are_rejected() {
        ReportTable::new("t", &["a", "b"]).push(vec![Cell::Empty]);
    }
}
