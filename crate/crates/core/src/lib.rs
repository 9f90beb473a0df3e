//! Leader allocation under the selectorate model of political survival.
//!
//! A leader facing a challenger chooses public goods `g` and per-member private
//! goods `z` for a winning coalition of size `W` drawn from a selectorate `S`.
//! This crate evaluates the model's budget and first-order conditions, solves
//! the leader's program under asymmetric uncertainty, equal uncertainty and a
//! continuum of retention probabilities between them, cross-checks the solvers
//! with a brute-force grid oracle, and sweeps parameters for comparative statics.

// `!(x > 0.0)` is deliberate throughout: NaN must fail these checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod oracle;
pub mod params;
pub mod root;
pub mod solver;
pub mod statics;

pub use error::{Error, Result};
pub use oracle::{oracle_grid_maximize, oracle_grid_search, OracleConstraint, OracleOutcome};
pub use params::{Allocation, Benchmark, FunctionFamily, PolityParams, PowerFn};
pub use root::{root_find_bracketed, Root, RootOptions};
pub use solver::{
    closed_form_equal_sqrt, solve, solve_asymmetric, solve_challenger, solve_equal, solve_general, Diagnostics,
    EquilibriumSolution, GeneralRegimeSpec, Regime, Residuals,
};
pub use statics::{
    detect_gap_decay, sweep, GapDecayReport, GapMetrics, GapTrend, SweepParameter, SweepResult, SweepRow, SweepSpec,
};
