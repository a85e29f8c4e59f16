//! Command-line front end and file formats for `effx-core`.
//!
//! * [`io`] reads and writes DMU datasets as CSV.
//! * [`covariates`] parses the second-stage regressors and joins them to
//!   scores by DMU id.
//! * [`parallel`] spreads the per-DMU programs over threads.
//! * [`report`] builds the printed tables and renders them as CSV or JSON.
//! * [`cli`] wires it together behind `effx`.

pub mod cli;
pub mod covariates;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::EffxError;
