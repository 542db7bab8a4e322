//! Intermittent-demand forecasting primitives.
//!
//! Six one-step-ahead forecasters (SES, Croston, SBA, SY, TSB and
//! hyperbolic-exponential smoothing), Bernoulli demand generators with
//! logarithmic or geometric sizes, pooled accuracy metrics, and a
//! Monte-Carlo grid runner built on common random numbers.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line front end and the parallel executor live in the `hesmooth` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

mod error;
pub mod experiment;
pub mod forecasters;
pub mod generators;
pub mod metrics;

pub use error::{Error, Result};
pub use experiment::{
    compare_tables, grid_combos, head_to_head, run_grid, run_pair, run_single, select_best,
    CellComparison, Combo, ComparisonReport, ExperimentSpec, GoldenTable, HeadToHeadReport, Metric,
    ResultRow, ResultTable, RowKey, RunExecutor, RunRecords, Selection, Sequential, Tolerances,
};
pub use forecasters::{Forecaster, Method, SmoothingParams};
pub use generators::{DemandSeries, OccurrenceProfile, RngStream, Scenario, SizeDistribution};
pub use metrics::{
    ErrorRecord, MaseScale, MetricAccumulator, MetricSummary, PairAccumulator, PairSummary,
};
