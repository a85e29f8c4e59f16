//! Dense two-phase primal simplex.
//!
//! Problems are stated as `min c·x` subject to rows `a_i·x {≤,=,≥} b_i` and
//! `x ≥ 0`, with optional sign-unrestricted variables that the solver splits
//! into a difference of two non-negative columns. Rows are equilibrated by
//! their largest coefficient before the tableau is built, which keeps the
//! pivot tolerances meaningful across data spanning many orders of
//! magnitude.
//!
//! Pricing is Dantzig's most-negative reduced cost. After
//! [`LpOptions::stall_threshold`] consecutive pivots that fail to improve the
//! objective the solver switches to Bland's smallest-index rule for the rest
//! of the solve, which guarantees termination on degenerate problems.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Sense of a constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization problem over `x ≥ 0` (except for variables marked free).
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    free: Vec<bool>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let free = vec![false; objective.len()];
        Self {
            objective,
            constraints: Vec::new(),
            free,
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    /// Marks variable `j` as sign-unrestricted.
    pub fn set_free(&mut self, j: usize) -> &mut Self {
        self.free[j] = true;
        self
    }

    pub fn is_free(&self, j: usize) -> bool {
        self.free[j]
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let d = self.num_vars();
        if d == 0 {
            return Err(LpError::InvalidProblem("problem has no variables"));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::InvalidProblem("objective has a non-finite entry"));
        }
        for row in &self.constraints {
            if row.coeffs.len() != d {
                return Err(LpError::InvalidProblem(
                    "constraint row length differs from variable count",
                ));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(LpError::InvalidProblem("constraint has a non-finite entry"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions {
    pub pivot_tol: f64,
    pub feas_tol: f64,
    pub opt_tol: f64,
    pub max_iterations: usize,
    /// Non-improving pivots tolerated before switching to Bland's rule.
    pub stall_threshold: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-10,
            feas_tol: 1e-7,
            opt_tol: 1e-9,
            max_iterations: 10_000,
            stall_threshold: 50,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point in the caller's variables. Empty when infeasible; the
    /// last basic feasible point when unbounded.
    pub x: Vec<f64>,
    /// `c·x` when optimal, `+inf` when infeasible, `-inf` when unbounded.
    pub objective_value: f64,
    /// Row multipliers for the caller's constraints (sign convention:
    /// `≥` rows non-negative, `≤` rows non-positive) when optimal.
    pub duals: Vec<f64>,
    /// Basic columns of the final tableau, in the solver's working column
    /// numbering (structural columns first, free variables split in two).
    pub basis: Vec<usize>,
    pub iterations: usize,
    /// Direction of unbounded descent when unbounded.
    pub ray: Option<Vec<f64>>,
    /// Whether Bland's rule was engaged during the solve.
    pub used_bland: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpError {
    InvalidProblem(&'static str),
    CycleLimitExceeded { iterations: usize },
    NumericalBreakdown { pivot: f64 },
}

impl LpError {
    pub fn name(&self) -> &'static str {
        match self {
            LpError::InvalidProblem(_) => "InvalidProblem",
            LpError::CycleLimitExceeded { .. } => "CycleLimitExceeded",
            LpError::NumericalBreakdown { .. } => "NumericalBreakdown",
        }
    }
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::InvalidProblem(msg) => write!(f, "invalid linear program: {msg}"),
            LpError::CycleLimitExceeded { iterations } => {
                write!(f, "simplex pivot limit reached after {iterations} iterations")
            }
            LpError::NumericalBreakdown { pivot } => {
                write!(f, "simplex numerical breakdown (pivot magnitude {pivot:e})")
            }
        }
    }
}

impl core::error::Error for LpError {}

/// Where a working column came from.
#[derive(Clone, Copy, Debug)]
enum ColumnKind {
    Structural { var: usize, sign: f64 },
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows × (cols + 1)`, last entry of each row is the right-hand side.
    cells: Vec<f64>,
    rows: usize,
    cols: usize,
    basis: Vec<usize>,
    kinds: Vec<ColumnKind>,
    /// Reduced costs for the active phase, plus the objective value in the
    /// trailing slot (stored negated, as in the classic objective row).
    reduced: Vec<f64>,
}

impl Tableau {
    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * (self.cols + 1) + j]
    }

    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.cells[i * (self.cols + 1) + self.cols]
    }

    fn set_rhs(&mut self, i: usize, v: f64) {
        let w = self.cols + 1;
        self.cells[i * w + self.cols] = v;
    }

    fn price(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        let mut reduced = Vec::with_capacity(w);
        reduced.extend_from_slice(cost);
        reduced.push(0.0);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.cells[i * w..(i + 1) * w];
                for (r, a) in reduced.iter_mut().zip(row) {
                    *r -= cb * a;
                }
            }
        }
        self.reduced = reduced;
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let w = self.cols + 1;
        let p = self.at(r, e);
        let inv = 1.0 / p;
        for j in 0..w {
            self.cells[r * w + j] *= inv;
        }
        self.cells[r * w + e] = 1.0;
        let pivot_row: Vec<f64> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + e];
            if f != 0.0 {
                let row = &mut self.cells[i * w..(i + 1) * w];
                for (a, pr) in row.iter_mut().zip(&pivot_row) {
                    *a -= f * pr;
                }
                row[e] = 0.0;
            }
        }
        let f = self.reduced[e];
        if f != 0.0 {
            for (a, pr) in self.reduced.iter_mut().zip(&pivot_row) {
                *a -= f * pr;
            }
            self.reduced[e] = 0.0;
        }
        self.basis[r] = e;
    }

    fn objective(&self) -> f64 {
        -self.reduced[self.cols]
    }
}

enum PhaseOutcome {
    Optimal,
    Unbounded(usize),
}

struct Driver<'a> {
    opts: &'a LpOptions,
    iterations: usize,
    bland: bool,
    used_bland: bool,
}

impl Driver<'_> {
    fn run(&mut self, t: &mut Tableau, allowed: &dyn Fn(usize) -> bool) -> Result<PhaseOutcome, LpError> {
        let mut stalled = 0usize;
        loop {
            let entering = self.choose_entering(t, allowed);
            let Some(e) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };
            if self.iterations >= self.opts.max_iterations {
                return Err(LpError::CycleLimitExceeded {
                    iterations: self.iterations,
                });
            }
            let Some(r) = self.choose_leaving(t, e)? else {
                return Ok(PhaseOutcome::Unbounded(e));
            };
            let before = t.objective();
            t.pivot(r, e);
            self.iterations += 1;
            let after = t.objective();
            if before - after <= 1e-12 * (1.0 + before.abs()) {
                stalled += 1;
                if stalled >= self.opts.stall_threshold && !self.bland {
                    self.bland = true;
                    self.used_bland = true;
                }
            } else {
                stalled = 0;
            }
        }
    }

    fn choose_entering(&self, t: &Tableau, allowed: &dyn Fn(usize) -> bool) -> Option<usize> {
        let tol = self.opts.opt_tol;
        if self.bland {
            return (0..t.cols).find(|&j| allowed(j) && t.reduced[j] < -tol);
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..t.cols {
            let d = t.reduced[j];
            if d < -tol && allowed(j) && best.is_none_or(|(_, b)| d < b) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    }

    fn choose_leaving(&self, t: &Tableau, e: usize) -> Result<Option<usize>, LpError> {
        let tol = self.opts.pivot_tol;
        let mut best: Option<(usize, f64, f64)> = None;
        let mut tiny = 0.0f64;
        for i in 0..t.rows {
            let a = t.at(i, e);
            if a <= tol {
                if a > 1e-13 {
                    tiny = tiny.max(a);
                }
                continue;
            }
            let ratio = t.rhs(i).max(0.0) / a;
            best = match best {
                None => Some((i, ratio, a)),
                Some((bi, br, ba)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                    if ratio < br && !tie {
                        Some((i, ratio, a))
                    } else if tie {
                        let better = if self.bland { t.basis[i] < t.basis[bi] } else { a > ba };
                        if better {
                            Some((i, ratio.min(br), a))
                        } else {
                            Some((bi, br.min(ratio), ba))
                        }
                    } else {
                        Some((bi, br, ba))
                    }
                }
            };
        }
        match best {
            Some((i, _, _)) => Ok(Some(i)),
            None if tiny > 0.0 => Err(LpError::NumericalBreakdown { pivot: tiny }),
            None => Ok(None),
        }
    }
}

/// Solves `p` to optimality, or proves it infeasible or unbounded.
pub fn solve_lp(p: &LpProblem, opts: &LpOptions) -> Result<LpSolution, LpError> {
    p.validate()?;
    let d = p.num_vars();

    // Structural columns, with free variables split into (+, -).
    let mut kinds: Vec<ColumnKind> = Vec::new();
    let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(d);
    for j in 0..d {
        let pos = kinds.len();
        kinds.push(ColumnKind::Structural { var: j, sign: 1.0 });
        if p.free[j] {
            kinds.push(ColumnKind::Structural { var: j, sign: -1.0 });
            var_cols.push((pos, Some(pos + 1)));
        } else {
            var_cols.push((pos, None));
        }
    }
    let structural = kinds.len();

    // Equilibrate and orient rows so every right-hand side is non-negative.
    struct Row {
        source: usize,
        coeffs: Vec<f64>,
        relation: Relation,
        rhs: f64,
        /// Multiplier applied to the caller's row to obtain this one.
        factor: f64,
    }
    let mut rows: Vec<Row> = Vec::with_capacity(p.num_rows());
    for (i, c) in p.constraints.iter().enumerate() {
        let scale = c.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            let ok = match c.relation {
                Relation::Le => c.rhs >= -opts.feas_tol,
                Relation::Ge => c.rhs <= opts.feas_tol,
                Relation::Eq => c.rhs.abs() <= opts.feas_tol,
            };
            if !ok {
                return Ok(infeasible(0));
            }
            continue;
        }
        let mut factor = 1.0 / scale;
        let mut relation = c.relation;
        if c.rhs * factor < 0.0 {
            factor = -factor;
            relation = relation.flipped();
        }
        let mut coeffs = vec![0.0; structural];
        for (j, &(pos, neg)) in var_cols.iter().enumerate() {
            let a = c.coeffs[j] * factor;
            coeffs[pos] = a;
            if let Some(neg) = neg {
                coeffs[neg] = -a;
            }
        }
        rows.push(Row {
            source: i,
            coeffs,
            relation,
            rhs: c.rhs * factor,
            factor,
        });
    }

    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
    let n_art = rows.iter().filter(|r| r.relation != Relation::Le).count();
    let cols = structural + n_slack + n_art;
    let w = cols + 1;
    let mut cells = vec![0.0; m * w];
    let mut basis = vec![0usize; m];
    // Column whose initial tableau image is e_i; used to recover duals.
    let mut unit_col = vec![0usize; m];
    kinds.extend(core::iter::repeat_n(ColumnKind::Slack, n_slack));
    kinds.extend(core::iter::repeat_n(ColumnKind::Artificial, n_art));
    let mut next_slack = structural;
    let mut next_art = structural + n_slack;
    for (i, row) in rows.iter().enumerate() {
        let base = i * w;
        cells[base..base + structural].copy_from_slice(&row.coeffs);
        cells[base + cols] = row.rhs;
        match row.relation {
            Relation::Le => {
                cells[base + next_slack] = 1.0;
                basis[i] = next_slack;
                unit_col[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                cells[base + next_slack] = -1.0;
                next_slack += 1;
                cells[base + next_art] = 1.0;
                basis[i] = next_art;
                unit_col[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                cells[base + next_art] = 1.0;
                basis[i] = next_art;
                unit_col[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut t = Tableau {
        cells,
        rows: m,
        cols,
        basis,
        kinds,
        reduced: Vec::new(),
    };
    let mut driver = Driver {
        opts,
        iterations: 0,
        bland: false,
        used_bland: false,
    };
    let is_artificial = |j: usize, kinds: &[ColumnKind]| matches!(kinds[j], ColumnKind::Artificial);

    if n_art > 0 {
        let phase1_cost: Vec<f64> = t
            .kinds
            .iter()
            .map(|k| if matches!(k, ColumnKind::Artificial) { 1.0 } else { 0.0 })
            .collect();
        t.price(&phase1_cost);
        let kinds = t.kinds.clone();
        match driver.run(&mut t, &|_| true)? {
            PhaseOutcome::Optimal => {}
            // The phase-one objective is bounded below by zero.
            PhaseOutcome::Unbounded(_) => unreachable!("phase one cannot be unbounded"),
        }
        if t.objective() > opts.feas_tol {
            return Ok(infeasible(driver.iterations));
        }
        // Drive remaining artificials out of the basis; rows where that is
        // impossible are redundant and keep a zero-valued artificial.
        for i in 0..m {
            if !is_artificial(t.basis[i], &kinds) {
                continue;
            }
            t.set_rhs(i, 0.0);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..cols {
                if is_artificial(j, &kinds) {
                    continue;
                }
                let a = t.at(i, j).abs();
                if a > opts.pivot_tol && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                t.pivot(i, j);
                driver.iterations += 1;
            }
        }
    }

    let mut phase2_cost = vec![0.0; cols];
    for (j, k) in t.kinds.iter().enumerate() {
        if let ColumnKind::Structural { var, sign } = *k {
            phase2_cost[j] = sign * p.objective[var];
        }
    }
    t.price(&phase2_cost);
    driver.bland = false;
    let kinds = t.kinds.clone();
    let outcome = driver.run(&mut t, &|j| !is_artificial(j, &kinds))?;

    let working = working_values(&t);
    let x = collect_primal(&t, &working, d, p);

    match outcome {
        PhaseOutcome::Unbounded(e) => {
            let mut ray = vec![0.0; d];
            let mut add = |col: usize, amount: f64| {
                if let ColumnKind::Structural { var, sign } = t.kinds[col] {
                    ray[var] += sign * amount;
                }
            };
            add(e, 1.0);
            for i in 0..m {
                add(t.basis[i], -t.at(i, e));
            }
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                x,
                objective_value: f64::NEG_INFINITY,
                duals: Vec::new(),
                basis: t.basis.clone(),
                iterations: driver.iterations,
                ray: Some(ray),
                used_bland: driver.used_bland,
            })
        }
        PhaseOutcome::Optimal => {
            let mut duals = vec![0.0; p.num_rows()];
            for (i, row) in rows.iter().enumerate() {
                let scaled = -t.reduced[unit_col[i]];
                duals[row.source] = scaled * row.factor;
            }
            let objective_value = dot(&p.objective, &x);
            let sol = LpSolution {
                status: LpStatus::Optimal,
                x,
                objective_value,
                duals,
                basis: t.basis.clone(),
                iterations: driver.iterations,
                ray: None,
                used_bland: driver.used_bland,
            };
            let violation = max_row_violation(p, &sol.x);
            if violation > opts.feas_tol {
                return Err(LpError::NumericalBreakdown { pivot: violation });
            }
            Ok(sol)
        }
    }
}

fn infeasible(iterations: usize) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        x: Vec::new(),
        objective_value: f64::INFINITY,
        duals: Vec::new(),
        basis: Vec::new(),
        iterations,
        ray: None,
        used_bland: false,
    }
}

fn working_values(t: &Tableau) -> Vec<f64> {
    let mut v = vec![0.0; t.cols];
    for i in 0..t.rows {
        v[t.basis[i]] = t.rhs(i);
    }
    v
}

fn collect_primal(t: &Tableau, working: &[f64], d: usize, p: &LpProblem) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for (j, k) in t.kinds.iter().enumerate() {
        if let ColumnKind::Structural { var, sign } = *k {
            x[var] += sign * working[j];
        }
    }
    for (j, v) in x.iter_mut().enumerate() {
        if !p.free[j] && *v < 0.0 && *v > -1e-9 {
            *v = 0.0;
        }
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest primal infeasibility of `x`, each row measured relative to the
/// magnitude of its terms.
fn max_row_violation(p: &LpProblem, x: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (j, &v) in x.iter().enumerate() {
        if !p.free[j] {
            worst = worst.max(-v);
        }
    }
    for c in &p.constraints {
        let (ax, scale) = row_activity(c, x);
        let gap = match c.relation {
            Relation::Le => ax - c.rhs,
            Relation::Ge => c.rhs - ax,
            Relation::Eq => (ax - c.rhs).abs(),
        };
        worst = worst.max(gap / scale);
    }
    worst
}

fn row_activity(c: &Constraint, x: &[f64]) -> (f64, f64) {
    let mut ax = 0.0;
    let mut scale = c.rhs.abs().max(1.0);
    for (a, v) in c.coeffs.iter().zip(x) {
        let term = a * v;
        ax += term;
        scale = scale.max(term.abs());
    }
    (ax, scale)
}

/// Verifies an optimality certificate: primal feasibility, dual
/// feasibility, complementary slackness, and `objective_value = c·x`,
/// all within `opts.feas_tol` relative to the size of the terms involved.
pub fn check_solution(p: &LpProblem, s: &LpSolution, opts: &LpOptions) -> bool {
    let tol = opts.feas_tol;
    let d = p.num_vars();
    if s.status != LpStatus::Optimal || s.x.len() != d || s.duals.len() != p.num_rows() {
        return false;
    }
    if p.validate().is_err() || s.x.iter().chain(&s.duals).any(|v| !v.is_finite()) {
        return false;
    }
    let cx = dot(&p.objective, &s.x);
    if (cx - s.objective_value).abs() > 1e-9 * (1.0 + cx.abs()) {
        return false;
    }
    if max_row_violation(p, &s.x) > tol {
        return false;
    }
    let cscale = p.objective.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    for (c, &y) in p.constraints.iter().zip(&s.duals) {
        let sign_ok = match c.relation {
            Relation::Ge => y >= -tol * cscale,
            Relation::Le => y <= tol * cscale,
            Relation::Eq => true,
        };
        if !sign_ok {
            return false;
        }
        let (ax, scale) = row_activity(c, &s.x);
        if (y * (ax - c.rhs)).abs() > tol * cscale * scale {
            return false;
        }
    }
    for j in 0..d {
        let mut reduced = p.objective[j];
        let mut scale = p.objective[j].abs().max(1.0);
        for (c, &y) in p.constraints.iter().zip(&s.duals) {
            let term = y * c.coeffs[j];
            reduced -= term;
            scale = scale.max(term.abs());
        }
        if p.free[j] {
            if reduced.abs() > tol * scale {
                return false;
            }
        } else {
            if reduced < -tol * scale {
                return false;
            }
            if (reduced * s.x[j]).abs() > tol * scale * s.x[j].abs().max(1.0) {
                return false;
            }
        }
    }
    true
}
