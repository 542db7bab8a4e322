//! Monte-Carlo experiment runner.
//!
//! A run draws one [`DemandSeries`] and feeds it to every requested
//! forecaster (common random numbers). Each forecaster is burned in on the
//! initialization stretch with updates only, then evaluated one step ahead
//! over the horizon. Per-run accumulators are merged in run order, so a
//! table is bit-identical whatever [`RunExecutor`] produced the runs.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::forecasters::{Forecaster, Method, SmoothingParams};
use crate::generators::{DemandSeries, RngStream, Scenario};
use crate::metrics::{
    ErrorRecord, MaseScale, MetricAccumulator, MetricSummary, PairAccumulator, PairSummary,
};

/// Size smoothing factors of the published grid.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.1, 0.2, 0.3];
/// Interval/probability smoothing factors of the published grid.
pub const DEFAULT_BETAS: [f64; 8] = [0.01, 0.02, 0.03, 0.04, 0.05, 0.1, 0.2, 0.3];
/// Methods reported in the published tables.
pub const DEFAULT_METHODS: [Method; 5] = [
    Method::Cr,
    Method::Sba,
    Method::Sy,
    Method::Tsb,
    Method::Hes,
];
/// Runs per table in the published protocol.
pub const DEFAULT_RUNS: u32 = 100;

/// Two keys address the same row when the factors agree to this precision.
const KEY_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Combo {
    pub method: Method,
    pub params: SmoothingParams,
}

impl Combo {
    pub fn new(method: Method, alpha: f64, beta: f64) -> Result<Self> {
        Ok(Self {
            method,
            params: SmoothingParams::new(alpha, beta)?,
        })
    }

    pub fn key(&self) -> RowKey {
        RowKey {
            method: self.method,
            alpha: self.params.alpha(),
            beta: self.params.beta(),
        }
    }
}

/// Expands method and factor grids into combos. Single-factor methods get
/// `beta = alpha` only; TSB and HES get the full cross product.
pub fn grid_combos(methods: &[Method], alphas: &[f64], betas: &[f64]) -> Result<Vec<Combo>> {
    let mut combos = Vec::new();
    for &method in methods {
        for &alpha in alphas {
            if method.is_single_factor() {
                combos.push(Combo::new(method, alpha, alpha)?);
            } else {
                for &beta in betas {
                    combos.push(Combo::new(method, alpha, beta)?);
                }
            }
        }
    }
    Ok(combos)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub scenario: Scenario,
    pub combos: Vec<Combo>,
    pub runs: u32,
    pub base_seed: u64,
    pub issue_only: bool,
}

impl ExperimentSpec {
    pub fn new(scenario: Scenario, combos: Vec<Combo>, runs: u32, base_seed: u64) -> Result<Self> {
        let spec = Self {
            scenario,
            combos,
            runs,
            base_seed,
            issue_only: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The published grid: CR, SBA, SY at `alpha = beta`, TSB and HES over
    /// all 24 factor pairs.
    pub fn default_grid(scenario: Scenario, runs: u32, base_seed: u64) -> Result<Self> {
        let combos = grid_combos(&DEFAULT_METHODS, &DEFAULT_ALPHAS, &DEFAULT_BETAS)?;
        Self::new(scenario, combos, runs, base_seed)
    }

    pub fn with_issue_only(mut self, issue_only: bool) -> Self {
        self.issue_only = issue_only;
        self
    }

    pub fn with_combos(mut self, combos: Vec<Combo>) -> Self {
        self.combos = combos;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.runs == 0 {
            return Err(Error::Experiment("runs must be at least 1"));
        }
        if self.combos.is_empty() {
            return Err(Error::Experiment("no method combos requested"));
        }
        if self.scenario.init_len < 2 {
            return Err(Error::SeriesTooShort(self.scenario.init_len));
        }
        Ok(())
    }

    pub fn rng_for_run(&self, run_index: u32) -> RngStream {
        RngStream::for_run(self.base_seed, &self.scenario.id(), u64::from(run_index))
    }
}

/// Produces one value per run index, returned in run order.
pub trait RunExecutor {
    fn map_runs<T, F>(&self, runs: u32, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u32) -> T + Sync + Send;
}

/// Runs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl RunExecutor for Sequential {
    fn map_runs<T, F>(&self, runs: u32, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u32) -> T + Sync + Send,
    {
        (0..runs).map(f).collect()
    }
}

/// Burns a fresh forecaster in on `init` with updates only.
pub fn burn_in(combo: &Combo, init: &[u32]) -> Result<Forecaster> {
    let mut forecaster = Forecaster::new(combo.method, combo.params);
    for &y in init {
        forecaster.update(f64::from(y))?;
    }
    Ok(forecaster)
}

/// Burns in on `series.init`, then emits one record per evaluation period.
/// The random-walk forecast for the first period is the last initialization
/// demand.
pub fn evaluate<F>(combo: &Combo, series: &DemandSeries, mut sink: F) -> Result<()>
where
    F: FnMut(ErrorRecord),
{
    let mut forecaster = burn_in(combo, &series.init)?;
    let mut previous = series.init.last().copied().map_or(0.0, f64::from);
    for (t, &y) in series.eval.iter().enumerate() {
        let y = f64::from(y);
        let f = forecaster.step(y)?;
        sink(ErrorRecord {
            period: t as u32 + 1,
            y,
            f,
            f_naive: previous,
        });
        previous = y;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecords {
    pub series: DemandSeries,
    pub scale: MaseScale,
    pub records: Vec<ErrorRecord>,
}

/// One run of one forecaster on a freshly drawn series.
pub fn run_single(combo: &Combo, scenario: &Scenario, rng: &mut RngStream) -> Result<RunRecords> {
    let series = scenario.generate(rng);
    let scale = MaseScale::from_series(series.init.iter().copied())?;
    let mut records = Vec::with_capacity(series.eval.len());
    evaluate(combo, &series, |r| records.push(r))?;
    Ok(RunRecords {
        series,
        scale,
        records,
    })
}

/// Accumulators for every combo of `spec` over run `run_index`.
pub fn run_accumulators(spec: &ExperimentSpec, run_index: u32) -> Result<Vec<MetricAccumulator>> {
    let series = spec.scenario.generate(&mut spec.rng_for_run(run_index));
    let scale = MaseScale::from_series(series.init.iter().copied())?;
    spec.combos
        .iter()
        .map(|combo| {
            let mut acc = MetricAccumulator::new(spec.issue_only);
            evaluate(combo, &series, |r| acc.accumulate(&r, &scale))?;
            Ok(acc)
        })
        .collect()
}

/// Pools every combo over `spec.runs` runs and finalizes one row per combo.
pub fn run_grid<E: RunExecutor>(spec: &ExperimentSpec, executor: &E) -> Result<ResultTable> {
    spec.validate()?;
    let per_run = executor.map_runs(spec.runs, |r| run_accumulators(spec, r));
    let mut pooled = vec![MetricAccumulator::new(spec.issue_only); spec.combos.len()];
    for run in per_run {
        for (total, acc) in pooled.iter_mut().zip(run?.iter()) {
            total.merge(acc);
        }
    }
    let rows = spec
        .combos
        .iter()
        .zip(&pooled)
        .map(|(combo, acc)| Ok(ResultRow::from_summary(combo.key(), &acc.finalize()?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ResultTable {
        scenario_id: Some(spec.scenario.id()),
        runs: Some(spec.runs),
        seed: Some(spec.base_seed),
        issue_only: spec.issue_only,
        rows,
    })
}

/// Compares the errors of `a` against those of `b` period by period over
/// `spec.runs` runs with common random numbers.
pub fn run_pair<E: RunExecutor>(
    spec: &ExperimentSpec,
    a: &Combo,
    b: &Combo,
    executor: &E,
) -> Result<PairSummary> {
    spec.validate()?;
    let per_run = executor.map_runs(spec.runs, |r| -> Result<PairAccumulator> {
        let series = spec.scenario.generate(&mut spec.rng_for_run(r));
        let mut errors_b = Vec::with_capacity(series.eval.len());
        evaluate(b, &series, |rec| errors_b.push(rec))?;
        let mut pair = PairAccumulator::default();
        let mut i = 0;
        evaluate(a, &series, |rec| {
            let other = errors_b[i];
            i += 1;
            if !spec.issue_only || rec.is_issue_point() {
                pair.accumulate(rec.error(), other.error());
            }
        })?;
        Ok(pair)
    });
    let mut total = PairAccumulator::default();
    for pair in per_run {
        total.merge(&pair?);
    }
    total.finalize()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// Smallest MAD/Mean ratio.
    MmrBest,
    /// Smallest U2.
    U2Best,
}

impl Selection {
    pub fn label(self) -> &'static str {
        match self {
            Selection::MmrBest => "mmr",
            Selection::U2Best => "u2",
        }
    }

    fn score(self, row: &ResultRow) -> f64 {
        match self {
            Selection::MmrBest => row.mmr,
            Selection::U2Best => row.u2,
        }
    }
}

/// Row of `method` with the smallest criterion; ties go to the earlier row.
pub fn select_best(table: &ResultTable, method: Method, selection: Selection) -> Option<RowKey> {
    table
        .rows
        .iter()
        .filter(|r| r.key.method == method)
        .fold(None::<&ResultRow>, |best, row| match best {
            Some(b) if selection.score(b) <= selection.score(row) => Some(b),
            _ => Some(row),
        })
        .map(|r| r.key)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadToHeadReport {
    pub scenario_id: String,
    pub selection: Selection,
    pub tsb: RowKey,
    pub hes: RowKey,
    /// HES errors relative to TSB errors.
    pub summary: PairSummary,
}

/// Picks the best TSB and HES factors from `grid` and compares the two
/// forecasters head to head on fresh common-random-number runs.
pub fn head_to_head<E: RunExecutor>(
    spec: &ExperimentSpec,
    grid: &ResultTable,
    selection: Selection,
    executor: &E,
) -> Result<HeadToHeadReport> {
    let tsb = select_best(grid, Method::Tsb, selection)
        .ok_or(Error::Experiment("grid has no TSB rows"))?;
    let hes = select_best(grid, Method::Hes, selection)
        .ok_or(Error::Experiment("grid has no HES rows"))?;
    let summary = run_pair(spec, &hes.combo()?, &tsb.combo()?, executor)?;
    Ok(HeadToHeadReport {
        scenario_id: spec.scenario.id(),
        selection,
        tsb,
        hes,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowKey {
    pub method: Method,
    pub alpha: f64,
    pub beta: f64,
}

impl RowKey {
    pub fn new(method: Method, alpha: f64, beta: f64) -> Self {
        Self {
            method,
            alpha,
            beta,
        }
    }

    pub fn matches(&self, other: &RowKey) -> bool {
        self.method == other.method
            && libm::fabs(self.alpha - other.alpha) < KEY_EPSILON
            && libm::fabs(self.beta - other.beta) < KEY_EPSILON
    }

    pub fn combo(&self) -> Result<Combo> {
        Combo::new(self.method, self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub key: RowKey,
    pub mase: f64,
    pub mmr: f64,
    pub u2: f64,
    pub mase_abs: Option<f64>,
}

impl ResultRow {
    pub fn from_summary(key: RowKey, m: &MetricSummary) -> Self {
        Self {
            key,
            mase: m.mase,
            mmr: m.mmr,
            u2: m.u2,
            mase_abs: Some(m.mase_abs),
        }
    }

    pub fn metric(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Mase => self.mase,
            Metric::Mmr => self.mmr,
            Metric::U2 => self.u2,
        }
    }
}

/// `(method, alpha, beta) -> (mase, mmr, u2)` grid, either computed or
/// transcribed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub scenario_id: Option<String>,
    pub runs: Option<u32>,
    pub seed: Option<u64>,
    pub issue_only: bool,
    pub rows: Vec<ResultRow>,
}

/// Published tables share the computed layout.
pub type GoldenTable = ResultTable;

impl ResultTable {
    pub fn get(&self, key: &RowKey) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.key.matches(key))
    }

    pub fn row(&self, method: Method, alpha: f64, beta: f64) -> Option<&ResultRow> {
        self.get(&RowKey::new(method, alpha, beta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Mase,
    Mmr,
    U2,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Mase, Metric::Mmr, Metric::U2];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mase => "mase",
            Metric::Mmr => "mmr",
            Metric::U2 => "u2",
        }
    }
}

/// Absolute per-cell tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub mase: f64,
    pub mmr: f64,
    pub u2: f64,
}

impl Tolerances {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Mase => self.mase,
            Metric::Mmr => self.mmr,
            Metric::U2 => self.u2,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mase: 0.02,
            mmr: 0.05,
            u2: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellComparison {
    pub key: RowKey,
    pub metric: Metric,
    pub result: f64,
    pub golden: f64,
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub cells: Vec<CellComparison>,
    /// Result rows with no golden counterpart.
    pub uncompared: Vec<RowKey>,
    /// Golden rows absent from the result.
    pub missing: Vec<RowKey>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CellComparison> {
        self.cells.iter().filter(|c| !c.pass)
    }

    pub fn max_deviation(&self) -> f64 {
        self.cells.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }
}

/// Cell-by-cell absolute deviations of `result` from `golden`.
pub fn compare_tables(
    result: &ResultTable,
    golden: &GoldenTable,
    tolerances: &Tolerances,
) -> ComparisonReport {
    let mut report = ComparisonReport::default();
    for row in &result.rows {
        let Some(gold) = golden.get(&row.key) else {
            report.uncompared.push(row.key);
            continue;
        };
        for metric in Metric::ALL {
            let (r, g) = (row.metric(metric), gold.metric(metric));
            let deviation = libm::fabs(r - g);
            let tolerance = tolerances.get(metric);
            report.cells.push(CellComparison {
                key: row.key,
                metric,
                result: r,
                golden: g,
                deviation,
                tolerance,
                // absorbs decimal rounding of the parsed values
                pass: deviation <= tolerance + 1e-12,
            });
        }
    }
    report.missing = golden
        .rows
        .iter()
        .filter(|g| result.get(&g.key).is_none())
        .map(|g| g.key)
        .collect();
    report
}
