use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use effx_core::dataset::summarize;
use effx_core::fixture::bundled_fixture;
use effx_core::tobit::infer;
use effx_core::{CensoredSample, Dataset, DatasetError, DeaOptions, DenseMatrix, InferenceReport, TobitOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::covariates::{CovariateTable, COVARIATE_NAMES};
use crate::error::EffxError;
use crate::io::{read_dataset, read_text, serialize_dataset, Schema};
use crate::parallel::{run_frontier_parallel, thread_cap};
use crate::report::{
    efficiency_table, regression_table, render, summary_table, Cell, Format, ReportTable, RtsSelection,
};

#[derive(Debug, Parser)]
#[command(
    name = "effx",
    version,
    about = "Input-oriented DEA scores and two-limit Tobit second-stage regressions"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// CCR-I and BCC-I efficiency, scale efficiency and returns to scale
    Dea(DeaArgs),
    /// Two-limit Tobit regression on a CSV sample or a simulated one
    Tobit(TobitArgs),
    /// DEA scores joined to covariates, then one Tobit fit per score
    Pipeline(PipelineArgs),
    /// Min, quartiles, mean, max and standard deviation of every variable
    Summary(SummaryArgs),
    /// Print the bundled airport dataset
    Fixture(OutputArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// DMU dataset in CSV form
    #[arg(long, value_name = "PATH", conflicts_with = "fixture")]
    input: Option<PathBuf>,
    /// Use the bundled 30-airport dataset
    #[arg(long)]
    fixture: bool,
    /// Input column names (default: the airport schema)
    #[arg(long, value_delimiter = ',', value_name = "COLS", requires = "input")]
    inputs: Option<Vec<String>>,
    /// Output column names (default: the airport schema)
    #[arg(long, value_delimiter = ',', value_name = "COLS", requires = "input")]
    outputs: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write here instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RtsArg {
    Crs,
    Vrs,
    Both,
}

#[derive(Debug, Args)]
struct DeaArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = RtsArg::Both)]
    rts: RtsArg,
    /// Scores within this distance of 1 count as efficient
    #[arg(long, value_name = "X", default_value_t = 1e-6)]
    tol_efficiency: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SummaryArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long, value_name = "X", default_value_t = 0.0, allow_negative_numbers = true)]
    lower: f64,
    #[arg(long, value_name = "X", default_value_t = 1.0, allow_negative_numbers = true)]
    upper: f64,
}

#[derive(Debug, Args)]
struct TobitArgs {
    /// Sample in CSV form: a response column plus numeric regressors
    #[arg(
        long,
        value_name = "PATH",
        conflicts_with = "simulate",
        required_unless_present = "simulate"
    )]
    input: Option<PathBuf>,
    /// Response column
    #[arg(long, value_name = "COL", default_value = "y")]
    response: String,
    /// Regressor columns (default: every column except id, name and the response)
    #[arg(long, value_delimiter = ',', value_name = "COLS")]
    regressors: Option<Vec<String>>,
    /// Simulate N observations from the two-limit model instead of reading a file
    #[arg(long, value_name = "N")]
    simulate: Option<usize>,
    #[arg(long, value_name = "N", default_value_t = 0)]
    seed: u64,
    /// True coefficients for --simulate, intercept first
    #[arg(long, value_delimiter = ',', value_name = "B", default_values_t = [0.5, 0.3], allow_negative_numbers = true)]
    beta: Vec<f64>,
    /// True error scale for --simulate
    #[arg(long, value_name = "X", default_value_t = 0.2)]
    sigma: f64,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Covariates CSV: id,SUSTAINABILITY,EBITDA,LCC,OWNERSHIP,GROUP,LOGAREAPAX
    #[arg(long, value_name = "PATH")]
    covariates: PathBuf,
    #[arg(long, value_name = "X", default_value_t = 1e-6)]
    tol_efficiency: f64,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// Parses `argv`, runs the command and returns the process exit code.
/// Reports go to `out` (or the `--out` file), diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "effx: usage error {:?}: {rendered}", e.kind());
            }
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "effx: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), EffxError> {
    match command {
        Command::Dea(a) => {
            let ds = load(&a.source, err)?;
            let opts = dea_options(a.tol_efficiency)?;
            let report = run_frontier_parallel(&ds, &opts, thread_cap())?;
            let selection = match a.rts {
                RtsArg::Crs => RtsSelection::Crs,
                RtsArg::Vrs => RtsSelection::Vrs,
                RtsArg::Both => RtsSelection::Both,
            };
            emit(&[efficiency_table(&report, selection)], &a.output, out)
        }
        Command::Summary(a) => {
            let ds = load(&a.source, err)?;
            emit(&[summary_table(&summarize(&ds))], &a.output, out)
        }
        Command::Fixture(o) => {
            let ds = bundled_fixture();
            match o.format {
                FormatArg::Csv => write_output(&serialize_dataset(&ds), o.out.as_deref(), out),
                FormatArg::Json => emit(&[dataset_table(&ds)], &o, out),
            }
        }
        Command::Tobit(a) => {
            let (sample, names) = match a.simulate {
                Some(n) => simulate(n, a.seed, &a.beta, a.sigma, a.limits.lower, a.limits.upper)?,
                None => {
                    let path = existing(a.input.as_deref().expect("required unless simulating"))?;
                    read_tobit_sample(&read_text(path)?, &a.response, a.regressors.as_deref(), &a.limits)?
                }
            };
            let report = infer(&sample, &TobitOptions::default())?;
            let label = if a.simulate.is_some() { "y" } else { a.response.as_str() };
            let names: Vec<&str> = names.iter().map(String::as_str).collect();
            emit(&[regression_table(&[(label, &report)], &names)], &a.output, out)
        }
        Command::Pipeline(a) => {
            let ds = load(&a.source, err)?;
            let opts = dea_options(a.tol_efficiency)?;
            let covariates = CovariateTable::parse(&read_text(existing(&a.covariates)?)?)?;
            let report = run_frontier_parallel(&ds, &opts, thread_cap())?;
            let ids: Vec<&str> = ds.dmus().iter().map(|d| d.id.as_str()).collect();
            let x = covariates.design(&ids)?;
            let snap = |v: f64| if (v - 1.0).abs() <= opts.efficiency_tol { 1.0 } else { v };
            let ote: Vec<f64> = report.results.iter().map(|r| snap(r.ote)).collect();
            let pte: Vec<f64> = report.results.iter().map(|r| snap(r.pte)).collect();
            let fit_one = |y: Vec<f64>| -> Result<InferenceReport, EffxError> {
                let s = CensoredSample::new(y, x.clone(), a.limits.lower, a.limits.upper)?;
                Ok(infer(&s, &TobitOptions::default())?)
            };
            let ote_fit = fit_one(ote)?;
            let pte_fit = fit_one(pte)?;
            let tables = [
                efficiency_table(&report, RtsSelection::Both),
                regression_table(&[("ote", &ote_fit), ("pte", &pte_fit)], &COVARIATE_NAMES),
            ];
            emit(&tables, &a.output, out)
        }
    }
}

fn dea_options(tol: f64) -> Result<DeaOptions, EffxError> {
    let opts = DeaOptions {
        efficiency_tol: tol,
        ..DeaOptions::default()
    };
    opts.validate()?;
    Ok(opts)
}

fn existing(path: &Path) -> Result<&Path, EffxError> {
    if path.exists() {
        Ok(path)
    } else {
        Err(EffxError::usage(format!("PathNotFound: {}", path.display())))
    }
}

fn load(source: &SourceArgs, err: &mut dyn Write) -> Result<Dataset, EffxError> {
    let ds = match (&source.input, source.fixture) {
        (Some(path), false) => {
            let mut schema = Schema::default();
            if let Some(i) = &source.inputs {
                schema.inputs = i.clone();
            }
            if let Some(o) = &source.outputs {
                schema.outputs = o.clone();
            }
            read_dataset(existing(path)?, &schema)?
        }
        (None, true) => bundled_fixture(),
        _ => {
            return Err(EffxError::usage(
                "MissingSource: pass exactly one of --input PATH or --fixture",
            ))
        }
    };
    let disc = ds.discrimination();
    if !disc.strong_rule {
        let _ = writeln!(
            err,
            "effx: warning: {} units for {} variables is below the 3(m+s) rule of thumb; scores discriminate poorly",
            ds.n(),
            ds.m() + ds.s()
        );
    }
    Ok(ds)
}

fn emit(tables: &[ReportTable], o: &OutputArgs, out: &mut dyn Write) -> Result<(), EffxError> {
    let format = match o.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    write_output(&render(tables, format), o.out.as_deref(), out)
}

fn write_output(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), EffxError> {
    let result = match path {
        Some(p) => std::fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    };
    result.map_err(|source| EffxError::Io {
        path: path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf),
        source,
    })
}

fn dataset_table(ds: &Dataset) -> ReportTable {
    let mut headers = vec!["id", "name"];
    headers.extend(ds.input_names().iter().map(String::as_str));
    headers.extend(ds.output_names().iter().map(String::as_str));
    headers.push("GROUP");
    let mut t = ReportTable::new("DMU dataset", &headers);
    for d in ds.dmus() {
        let mut row = vec![Cell::text(&d.id), Cell::text(&d.name)];
        row.extend(d.inputs.iter().chain(&d.outputs).map(|v| Cell::Exact(*v)));
        row.push(Cell::Int(d.group as i64));
        t.push(row);
    }
    t
}

/// Reads `response` and the regressors from CSV text; an intercept is
/// prepended to the design.
fn read_tobit_sample(
    text: &str,
    response: &str,
    regressors: Option<&[String]>,
    limits: &LimitArgs,
) -> Result<(CensoredSample, Vec<String>), EffxError> {
    if text.trim().is_empty() {
        return Err(DatasetError::Empty.into());
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|_| DatasetError::Empty)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DatasetError::MissingColumn {
                column: name.to_string(),
            })
    };
    let y_col = find(response)?;
    let names: Vec<String> = match regressors {
        Some(r) => r.to_vec(),
        None => headers
            .iter()
            .filter(|h| !matches!(*h, "id" | "name") && *h != response)
            .map(str::to_string)
            .collect(),
    };
    let cols = names.iter().map(|n| find(n)).collect::<Result<Vec<_>, _>>()?;
    let mut y = Vec::new();
    let mut rows = Vec::new();
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
            }
            .into());
        }
        let number = |c: usize| {
            record[c]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DatasetError::NonNumericCell {
                    row,
                    column: headers[c].to_string(),
                })
        };
        y.push(number(y_col)?);
        let mut xr = vec![1.0];
        for &c in &cols {
            xr.push(number(c)?);
        }
        rows.push(xr);
    }
    if y.is_empty() {
        return Err(DatasetError::Empty.into());
    }
    let x = DenseMatrix::from_rows(&rows).expect("rectangular by construction");
    Ok((CensoredSample::new(y, x, limits.lower, limits.upper)?, names))
}

/// Draws `y = clamp(xβ + ε)` with covariates uniform on [0, 1].
fn simulate(
    n: usize,
    seed: u64,
    beta: &[f64],
    sigma: f64,
    lower: f64,
    upper: f64,
) -> Result<(CensoredSample, Vec<String>), EffxError> {
    if n == 0 || beta.is_empty() {
        return Err(EffxError::usage(
            "InvalidSimulation: need N > 0 and at least one coefficient",
        ));
    }
    let noise = Normal::new(0.0, sigma)
        .map_err(|_| EffxError::usage("InvalidSimulation: --sigma must be positive and finite"))?;
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = beta.len();
    let mut y = Vec::with_capacity(n);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0];
        row.extend((1..k).map(|_| unit.sample(&mut rng)));
        let mu: f64 = row.iter().zip(beta).map(|(a, b)| a * b).sum();
        y.push((mu + noise.sample(&mut rng)).clamp(lower, upper));
        rows.push(row);
    }
    let x = DenseMatrix::from_rows(&rows).expect("rectangular by construction");
    let names = (1..k).map(|j| format!("x{j}")).collect();
    Ok((CensoredSample::new(y, x, lower, upper)?, names))
}
