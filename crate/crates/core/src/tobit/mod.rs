//! Two-limit censored (Tobit) regression.
//!
//! The latent response `y* = xβ + ε`, `ε ~ N(0, σ²)`, is observed clipped
//! to `[lower, upper]`. Estimation maximizes the censored likelihood in the
//! unconstrained parameterization `(β, ln σ)`; every covariance matrix
//! reported by this module is expressed in that parameterization (its β
//! block is the same as in `(β, σ)`).

mod fit;
mod inference;
mod likelihood;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::numerics::{DenseMatrix, NumericsError};

pub use fit::{fit, fit_intercept_only, TobitFit, TobitOptions};
pub use inference::{
    censored_mean, infer, lr_test, marginal_effects, pseudo_r2, robust_covariance, significance_stars, wald_test,
    CoefficientRow, InferenceReport, PseudoR2, PseudoR2Variant, TestResult,
};
pub use likelihood::{log_likelihood, row_scores, score_and_hessian, ScoreHessian};

/// Where an observation sits relative to the censoring limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Censoring {
    Interior,
    AtLower,
    AtUpper,
}

/// Responses, design matrix, and censoring limits. By convention the first
/// design column is an all-ones intercept.
#[derive(Clone, Debug, PartialEq)]
pub struct CensoredSample {
    y: Vec<f64>,
    x: DenseMatrix,
    lower: f64,
    upper: f64,
    status: Vec<Censoring>,
}

impl CensoredSample {
    /// Builds a sample; rows with `y == lower` or `y == upper` are censored.
    /// Either limit may be infinite.
    pub fn new(y: Vec<f64>, x: DenseMatrix, lower: f64, upper: f64) -> Result<Self, TobitError> {
        if lower.is_nan() || upper.is_nan() || !(lower < upper) {
            return Err(TobitError::InvalidSample(String::from(
                "censoring limits must satisfy lower < upper",
            )));
        }
        if x.rows() != y.len() {
            return Err(TobitError::InvalidSample(alloc::format!(
                "design has {} rows but there are {} responses",
                x.rows(),
                y.len()
            )));
        }
        if y.is_empty() || x.cols() == 0 {
            return Err(TobitError::InvalidSample(String::from("sample is empty")));
        }
        if !x.is_finite() {
            return Err(TobitError::InvalidSample(String::from(
                "design matrix has non-finite entries",
            )));
        }
        let mut status = Vec::with_capacity(y.len());
        for (i, &v) in y.iter().enumerate() {
            if !v.is_finite() || v < lower || v > upper {
                return Err(TobitError::InvalidSample(alloc::format!(
                    "row {}: response {v} outside [{lower}, {upper}]",
                    i + 1
                )));
            }
            status.push(if v == lower {
                Censoring::AtLower
            } else if v == upper {
                Censoring::AtUpper
            } else {
                Censoring::Interior
            });
        }
        Ok(Self {
            y,
            x,
            lower,
            upper,
            status,
        })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn status(&self) -> &[Censoring] {
        &self.status
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    /// Number of regressors, intercept included.
    pub fn k(&self) -> usize {
        self.x.cols()
    }

    pub fn count(&self, c: Censoring) -> usize {
        self.status.iter().filter(|&&s| s == c).count()
    }

    /// Same responses and limits with an intercept-only design.
    pub fn intercept_only(&self) -> Self {
        let n = self.n();
        Self {
            y: self.y.clone(),
            x: DenseMatrix::from_row_major(n, 1, alloc::vec![1.0; n]).expect("n x 1"),
            lower: self.lower,
            upper: self.upper,
            status: self.status.clone(),
        }
    }

    /// Order-independent summary used to check two fits share a sample.
    pub(crate) fn fingerprint(&self) -> SampleFingerprint {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for v in &self.y {
            sum += v;
            sum_sq += v * v;
        }
        SampleFingerprint {
            n: self.n(),
            sum,
            sum_sq,
            lower: self.lower,
            upper: self.upper,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleFingerprint {
    pub n: usize,
    pub sum: f64,
    pub sum_sq: f64,
    pub lower: f64,
    pub upper: f64,
}

impl SampleFingerprint {
    fn matches(&self, other: &Self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
        self.n == other.n
            && close(self.sum, other.sum)
            && close(self.sum_sq, other.sum_sq)
            && self.lower == other.lower
            && self.upper == other.upper
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TobitError {
    InvalidSample(String),
    /// Rank-deficient design or no uncensored observations.
    NotIdentified(&'static str),
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },
    NotPositiveDefinite(NumericsError),
    NonFinite,
    SampleMismatch,
    /// The test needs at least one slope coefficient.
    NoSlopes,
}

impl TobitError {
    pub fn name(&self) -> &'static str {
        match self {
            TobitError::InvalidSample(_) => "InvalidSample",
            TobitError::NotIdentified(_) => "NotIdentified",
            TobitError::NoConvergence { .. } => "NoConvergence",
            TobitError::NotPositiveDefinite(_) => "NotPositiveDefinite",
            TobitError::NonFinite => "NonFinite",
            TobitError::SampleMismatch => "SampleMismatch",
            TobitError::NoSlopes => "NoSlopes",
        }
    }
}

impl fmt::Display for TobitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TobitError::InvalidSample(msg) => write!(f, "invalid censored sample: {msg}"),
            TobitError::NotIdentified(why) => write!(f, "model not identified: {why}"),
            TobitError::NoConvergence {
                iterations,
                gradient_norm,
            } => write!(
                f,
                "Newton iterations did not converge after {iterations} steps (gradient norm {gradient_norm:e})"
            ),
            TobitError::NotPositiveDefinite(e) => write!(f, "information matrix not invertible: {e}"),
            TobitError::NonFinite => f.write_str("log-likelihood evaluated to a non-finite value"),
            TobitError::SampleMismatch => f.write_str("fits were estimated on different samples"),
            TobitError::NoSlopes => f.write_str("model has no slope coefficients to test"),
        }
    }
}

impl core::error::Error for TobitError {}
