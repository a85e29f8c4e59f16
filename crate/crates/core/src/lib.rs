//! Two-stage efficiency analysis without the standard library.
//!
//! The first stage scores decision-making units (DMUs) against an
//! input-oriented envelopment frontier under constant and variable returns
//! to scale ([`dea`]), solved with a dense two-phase simplex ([`lp`]). The
//! second stage regresses the scores on covariates with a two-limit censored
//! (Tobit) model fitted by Newton's method ([`tobit`]).
//!
//! Everything here is pure computation over `alloc` collections; file
//! formats, threading, and the command-line front end live in the `effx`
//! crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so NaN fails the check; dense kernels index
// several slices in lockstep.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod dea;
pub mod fixture;
pub mod lp;
pub mod numerics;
pub mod tobit;

pub use dataset::{Dataset, DatasetError, DmuRecord, SummaryStats};
pub use dea::{DeaError, DeaOptions, EfficiencyResult, FrontierReport, ReturnsToScale, Rts};
pub use lp::{LpError, LpOptions, LpProblem, LpSolution, LpStatus, Relation};
pub use numerics::DenseMatrix;
pub use tobit::{CensoredSample, InferenceReport, TobitError, TobitFit, TobitOptions};
