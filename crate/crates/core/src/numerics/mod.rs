//! Numerical kernels shared by the DEA and Tobit stages.

mod diff;
mod linalg;
mod normal;
mod special;

use core::fmt;

pub use diff::fd_gradient;
pub use linalg::{solve_spd, Cholesky, DenseMatrix, PD_TOL};
pub use normal::{log_normal_cdf, log_normal_pdf, mills_ratio, normal_cdf, normal_pdf, normal_two_sided_p};
pub use special::{chi_square_sf, regularized_gamma_q};

#[derive(Clone, Debug, PartialEq)]
pub enum NumericsError {
    NotPositiveDefinite { index: usize, pivot: f64 },
    DimensionMismatch { expected: usize, found: usize },
    NotSymmetric { row: usize, col: usize },
    NonFiniteEvaluation { index: usize },
}

impl NumericsError {
    pub fn name(&self) -> &'static str {
        match self {
            NumericsError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            NumericsError::DimensionMismatch { .. } => "DimensionMismatch",
            NumericsError::NotSymmetric { .. } => "NotSymmetric",
            NumericsError::NonFiniteEvaluation { .. } => "NonFiniteEvaluation",
        }
    }
}

impl fmt::Display for NumericsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericsError::NotPositiveDefinite { index, pivot } => {
                write!(f, "matrix is not positive definite (pivot {index} = {pivot:e})")
            }
            NumericsError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            NumericsError::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at ({row}, {col})")
            }
            NumericsError::NonFiniteEvaluation { index } => {
                write!(f, "function is not finite near coordinate {index}")
            }
        }
    }
}

impl core::error::Error for NumericsError {}
