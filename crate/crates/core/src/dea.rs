//! Input-oriented envelopment models.
//!
//! For the evaluated unit `j` the CCR model solves
//!
//! ```text
//! min θ  s.t.  θ·x_ij − Σ_k λ_k x_ik ≥ 0   (each input i)
//!              Σ_k λ_k y_ok ≥ y_oj          (each output o)
//!              λ ≥ 0
//! ```
//!
//! and the BCC model adds `Σ_k λ_k = 1`. Scores are purely radial; no
//! second-stage slack maximization is performed. The evaluated unit is
//! always part of its own reference set.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::{Dataset, Discrimination};
use crate::lp::{solve_lp, LpError, LpOptions, LpProblem, LpStatus, Relation};

/// Technology assumption for the envelopment program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturnsToScale {
    /// CCR: constant returns to scale.
    Constant,
    /// BCC: variable returns to scale (convexity row added).
    Variable,
}

/// Returns-to-scale class of a unit's projection on the CRS frontier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rts {
    Constant,
    Increasing,
    Decreasing,
}

impl Rts {
    pub fn as_str(self) -> &'static str {
        match self {
            Rts::Constant => "Constant",
            Rts::Increasing => "Increasing",
            Rts::Decreasing => "Decreasing",
        }
    }
}

impl fmt::Display for Rts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeaOptions {
    pub returns_to_scale: ReturnsToScale,
    /// `|θ − 1| ≤ efficiency_tol` counts as efficient.
    pub efficiency_tol: f64,
    /// Width of the band around 1 used by the Σλ range test.
    pub rts_tol: f64,
    pub lp: LpOptions,
}

impl Default for DeaOptions {
    fn default() -> Self {
        Self {
            returns_to_scale: ReturnsToScale::Constant,
            efficiency_tol: 1e-6,
            rts_tol: 1e-6,
            lp: LpOptions::default(),
        }
    }
}

impl DeaOptions {
    pub fn with_rts(self, returns_to_scale: ReturnsToScale) -> Self {
        Self {
            returns_to_scale,
            ..self
        }
    }

    pub fn validate(&self) -> Result<(), DeaError> {
        let ok = |t: f64| t > 0.0 && t < 1e-2;
        if !ok(self.efficiency_tol) {
            return Err(DeaError::InvalidOptions("efficiency tolerance must lie in (0, 0.01)"));
        }
        if !ok(self.rts_tol) {
            return Err(DeaError::InvalidOptions(
                "returns-to-scale tolerance must lie in (0, 0.01)",
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeaError {
    InvalidOptions(&'static str),
    IndexOutOfRange {
        index: usize,
        n: usize,
    },
    Solver {
        dmu_id: String,
        source: LpError,
    },
    UnexpectedStatus {
        dmu_id: String,
        status: LpStatus,
    },
    /// OTE exceeds PTE beyond tolerance: the two solves disagree.
    Domain {
        ote: f64,
        pte: f64,
    },
}

impl DeaError {
    pub fn name(&self) -> &'static str {
        match self {
            DeaError::InvalidOptions(_) => "InvalidOptions",
            DeaError::IndexOutOfRange { .. } => "IndexOutOfRange",
            DeaError::Solver { .. } => "SolverFailure",
            DeaError::UnexpectedStatus { .. } => "SolverFailure",
            DeaError::Domain { .. } => "DomainError",
        }
    }
}

impl fmt::Display for DeaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeaError::InvalidOptions(msg) => f.write_str(msg),
            DeaError::IndexOutOfRange { index, n } => write!(f, "DMU index {index} out of range (n = {n})"),
            DeaError::Solver { dmu_id, source } => write!(f, "DMU `{dmu_id}`: {source} ({})", source.name()),
            DeaError::UnexpectedStatus { dmu_id, status } => {
                write!(f, "DMU `{dmu_id}`: envelopment program reported {status:?}")
            }
            DeaError::Domain { ote, pte } => {
                write!(f, "overall efficiency {ote} exceeds pure technical efficiency {pte}")
            }
        }
    }
}

impl core::error::Error for DeaError {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            DeaError::Solver { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Envelopment program for unit `j`. Variable 0 is θ (sign-unrestricted),
/// variables `1..=n` are the intensities λ.
pub fn build_envelopment_lp(ds: &Dataset, j: usize, rts: ReturnsToScale) -> LpProblem {
    let n = ds.n();
    let target = ds.dmu(j);
    let mut objective = vec![0.0; n + 1];
    objective[0] = 1.0;
    let mut lp = LpProblem::new(objective);
    lp.set_free(0);
    for i in 0..ds.m() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(target.inputs[i]);
        row.extend(ds.dmus().iter().map(|d| -d.inputs[i]));
        lp.add_constraint(row, Relation::Ge, 0.0);
    }
    for o in 0..ds.s() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(0.0);
        row.extend(ds.dmus().iter().map(|d| d.outputs[o]));
        lp.add_constraint(row, Relation::Ge, target.outputs[o]);
    }
    if rts == ReturnsToScale::Variable {
        let mut row = vec![1.0; n + 1];
        row[0] = 0.0;
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    lp
}

/// Optimal radial contraction and the intensities attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct Envelopment {
    pub theta: f64,
    pub lambda: Vec<f64>,
}

fn check_index(ds: &Dataset, j: usize) -> Result<(), DeaError> {
    if j >= ds.n() {
        return Err(DeaError::IndexOutOfRange { index: j, n: ds.n() });
    }
    Ok(())
}

fn solve_for(ds: &Dataset, j: usize, lp: &LpProblem, opts: &LpOptions) -> Result<Vec<f64>, DeaError> {
    let dmu_id = || ds.dmu(j).id.clone();
    let sol = solve_lp(lp, opts).map_err(|source| DeaError::Solver {
        dmu_id: dmu_id(),
        source,
    })?;
    if sol.status != LpStatus::Optimal {
        return Err(DeaError::UnexpectedStatus {
            dmu_id: dmu_id(),
            status: sol.status,
        });
    }
    Ok(sol.x)
}

pub fn solve_envelopment(ds: &Dataset, j: usize, opts: &DeaOptions) -> Result<Envelopment, DeaError> {
    check_index(ds, j)?;
    let lp = build_envelopment_lp(ds, j, opts.returns_to_scale);
    let x = solve_for(ds, j, &lp, &opts.lp)?;
    // θ ≤ 1 always holds in exact arithmetic since λ = e_j is feasible.
    let theta = x[0].min(1.0);
    let lambda = x[1..].iter().map(|v| v.max(0.0)).collect();
    Ok(Envelopment { theta, lambda })
}

/// Radial input efficiency θ of unit `j` under `opts.returns_to_scale`.
pub fn efficiency(ds: &Dataset, j: usize, opts: &DeaOptions) -> Result<f64, DeaError> {
    solve_envelopment(ds, j, opts).map(|e| e.theta)
}

/// `ote / pte`, the share of overall inefficiency not explained by
/// management once scale is allowed to vary.
pub fn scale_efficiency(ote: f64, pte: f64, tol: f64) -> Result<f64, DeaError> {
    let domain = || DeaError::Domain { ote, pte };
    if !(ote > 0.0) || !(pte > 0.0) || pte > 1.0 + tol || ote > pte + tol {
        return Err(domain());
    }
    Ok((ote / pte).min(1.0))
}

/// `[min Σλ, max Σλ]` over all CCR optima for unit `j`, given its optimal
/// score `theta`.
pub fn lambda_sum_range(ds: &Dataset, j: usize, theta: f64, opts: &DeaOptions) -> Result<(f64, f64), DeaError> {
    check_index(ds, j)?;
    let n = ds.n();
    let target = ds.dmu(j);
    // The recovered θ can sit a hair below the true optimum; widen the
    // input budget until the restricted program is feasible.
    let mut last = None;
    for relax in [1e-10, 1e-8, 1e-6] {
        let budget = theta * (1.0 + relax);
        let mut bounds = [0.0; 2];
        let mut feasible = true;
        for (slot, sense) in [(0usize, 1.0), (1, -1.0)] {
            let mut lp = LpProblem::new(vec![sense; n]);
            for i in 0..ds.m() {
                let row = ds.dmus().iter().map(|d| d.inputs[i]).collect();
                lp.add_constraint(row, Relation::Le, budget * target.inputs[i]);
            }
            for o in 0..ds.s() {
                let row = ds.dmus().iter().map(|d| d.outputs[o]).collect();
                lp.add_constraint(row, Relation::Ge, target.outputs[o]);
            }
            let sol = solve_lp(&lp, &opts.lp).map_err(|source| DeaError::Solver {
                dmu_id: target.id.clone(),
                source,
            })?;
            match sol.status {
                LpStatus::Optimal => bounds[slot] = sense * sol.objective_value,
                status => {
                    feasible = false;
                    last = Some(status);
                    break;
                }
            }
        }
        if feasible {
            return Ok((bounds[0], bounds[1]));
        }
    }
    Err(DeaError::UnexpectedStatus {
        dmu_id: target.id.clone(),
        status: last.unwrap_or(LpStatus::Infeasible),
    })
}

/// Classifies a Σλ range: constant if it contains 1, increasing if it lies
/// below, decreasing if above.
pub fn rts_from_range(range: (f64, f64), tol: f64) -> Rts {
    let (lo, hi) = range;
    if hi < 1.0 - tol {
        Rts::Increasing
    } else if lo > 1.0 + tol {
        Rts::Decreasing
    } else {
        Rts::Constant
    }
}

pub fn classify_rts(ds: &Dataset, j: usize, opts: &DeaOptions) -> Result<Rts, DeaError> {
    let crs = opts.with_rts(ReturnsToScale::Constant);
    let theta = efficiency(ds, j, &crs)?;
    let range = lambda_sum_range(ds, j, theta, opts)?;
    Ok(rts_from_range(range, opts.rts_tol))
}

/// Both scores, their ratio, and the returns-to-scale class for one unit.
#[derive(Clone, Debug, PartialEq)]
pub struct EfficiencyResult {
    pub dmu_id: String,
    pub ote: f64,
    pub pte: f64,
    pub se: f64,
    pub rts: Rts,
    pub lambda_crs: Vec<f64>,
    pub lambda_sum_range: (f64, f64),
}

impl EfficiencyResult {
    pub fn crs_efficient(&self, tol: f64) -> bool {
        (self.ote - 1.0).abs() <= tol
    }

    pub fn vrs_efficient(&self, tol: f64) -> bool {
        (self.pte - 1.0).abs() <= tol
    }
}

/// Solves both envelopment programs for unit `j` and classifies it.
/// `opts.returns_to_scale` is ignored.
pub fn evaluate_dmu(ds: &Dataset, j: usize, opts: &DeaOptions) -> Result<EfficiencyResult, DeaError> {
    opts.validate()?;
    let crs = solve_envelopment(ds, j, &opts.with_rts(ReturnsToScale::Constant))?;
    let vrs = solve_envelopment(ds, j, &opts.with_rts(ReturnsToScale::Variable))?;
    let ote = crs.theta;
    if ote > vrs.theta + opts.efficiency_tol {
        return Err(DeaError::Domain { ote, pte: vrs.theta });
    }
    // The VRS feasible set is nested in the CRS one; absorb round-off.
    let pte = vrs.theta.max(ote);
    let se = scale_efficiency(ote, pte, opts.efficiency_tol)?;
    let range = lambda_sum_range(ds, j, ote, opts)?;
    Ok(EfficiencyResult {
        dmu_id: ds.dmu(j).id.clone(),
        ote,
        pte,
        se,
        rts: rts_from_range(range, opts.rts_tol),
        lambda_crs: crs.lambda,
        lambda_sum_range: range,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierReport {
    pub results: Vec<EfficiencyResult>,
    pub crs_efficient: usize,
    pub vrs_efficient: usize,
    pub mean_ote: f64,
    pub mean_pte: f64,
    pub discrimination: Discrimination,
}

impl FrontierReport {
    /// Aggregates per-unit results, kept in dataset order.
    pub fn from_results(results: Vec<EfficiencyResult>, discrimination: Discrimination, efficiency_tol: f64) -> Self {
        let n = results.len().max(1) as f64;
        Self {
            crs_efficient: results.iter().filter(|r| r.crs_efficient(efficiency_tol)).count(),
            vrs_efficient: results.iter().filter(|r| r.vrs_efficient(efficiency_tol)).count(),
            mean_ote: results.iter().map(|r| r.ote).sum::<f64>() / n,
            mean_pte: results.iter().map(|r| r.pte).sum::<f64>() / n,
            results,
            discrimination,
        }
    }

    pub fn rts_count(&self, rts: Rts) -> usize {
        self.results.iter().filter(|r| r.rts == rts).count()
    }
}

/// Evaluates every unit sequentially. Failing discrimination rules is
/// reported through [`FrontierReport::discrimination`], not as an error.
pub fn run_frontier(ds: &Dataset, opts: &DeaOptions) -> Result<FrontierReport, DeaError> {
    opts.validate()?;
    let results = (0..ds.n())
        .map(|j| evaluate_dmu(ds, j, opts))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FrontierReport::from_results(
        results,
        ds.discrimination(),
        opts.efficiency_tol,
    ))
}
