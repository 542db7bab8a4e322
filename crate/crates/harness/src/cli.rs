//! The `hesmooth` command line.
//!
//! Data goes to stdout (or `--out`), diagnostics to stderr. Exit status is 0
//! on success, 1 when a comparison fails, 2 for usage and validation errors
//! and 3 for I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hesmooth_core::experiment::{grid_combos, DEFAULT_ALPHAS, DEFAULT_BETAS, DEFAULT_METHODS};
use hesmooth_core::generators::DEFAULT_HORIZON;
use hesmooth_core::{
    compare_tables, head_to_head, run_grid, ExperimentSpec, Forecaster, Method, RngStream,
    Scenario, Selection, SmoothingParams,
};

use crate::config::{CliConfig, ToleranceConfig};
use crate::scenario_id::{parse_scenario_id, parse_size, ProfileKind, ScenarioParams};
use crate::table_io::{sig6, write_records, write_table};
use crate::{golden, CliError, ExitCode, Parallel};

#[derive(Debug, Parser)]
#[command(
    name = "hesmooth",
    version,
    about = "Intermittent-demand forecasting experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one demand series (initialization then evaluation periods).
    Gen(GenArgs),
    /// Per-period forecasts of selected methods on one generated series.
    Trace(TraceArgs),
    /// Run a factor grid and write `<out>/<scenario-id>.csv`.
    Run(RunArgs),
    /// Compare a result table with a reference table cell by cell.
    Compare(CompareArgs),
    /// Best-factor TSB against best-factor HES on common random numbers.
    H2h(H2hArgs),
}

#[derive(Debug, Args)]
pub struct Shared {
    /// TOML file with defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (gen, trace, h2h) or directory (run).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// csv or markdown.
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Score only periods with nonzero demand.
    #[arg(long, global = true)]
    pub issue_only: bool,
}

#[derive(Debug, Args)]
pub struct ScenarioFlags {
    /// Scenario id such as `log-0.9-p0.5-stationary`, or `builtin:<table>`
    /// for the scenario of a bundled reference table. Other scenario flags
    /// are ignored when given.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Size distribution: log:<ell>, geo:<g> or const:<c>.
    #[arg(long)]
    pub size: Option<String>,
    /// Demand probability (at the first evaluation period for decreasing).
    #[arg(long)]
    pub p0: Option<f64>,
    /// stationary, decreasing or sudden.
    #[arg(long)]
    pub profile: Option<String>,
    /// Last period with demand.
    #[arg(long)]
    pub cutoff: Option<u32>,
    /// Evaluation periods.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Initialization periods ahead of the evaluation periods.
    #[arg(long)]
    pub init_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GridFlags {
    /// Comma-separated methods (SES, CR, SBA, SY, TSB, HES).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    #[arg(long)]
    pub runs: Option<u32>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Run index whose series to emit.
    #[arg(long, default_value_t = 0)]
    pub run: u64,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    /// Comma-separated methods; SY,TSB,HES by default.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub run: u64,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub grid: GridFlags,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Result table (CSV).
    pub result: String,
    /// Reference table: a CSV path or `builtin:<label>`.
    pub golden: String,
    #[arg(long)]
    pub tol_mase: Option<f64>,
    #[arg(long)]
    pub tol_mmr: Option<f64>,
    #[arg(long)]
    pub tol_u2: Option<f64>,
    #[command(flatten)]
    pub shared: Shared,
}

#[derive(Debug, Args)]
pub struct H2hArgs {
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[command(flatten)]
    pub grid: GridFlags,
    /// mmr, u2 or both.
    #[arg(long, default_value = "both")]
    pub selection: String,
    #[command(flatten)]
    pub shared: Shared,
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::Usage
            } else {
                ExitCode::Ok
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Gen(a) => cmd_gen(&a),
        Command::Trace(a) => cmd_trace(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::H2h(a) => cmd_h2h(&a),
    }
}

impl Shared {
    fn to_config(&self) -> Result<CliConfig, CliError> {
        Ok(CliConfig {
            seed: self.seed,
            out: self.out.clone(),
            format: self.format.as_deref().map(str::parse).transpose()?,
            threads: self.threads,
            issue_only: self.issue_only.then_some(true),
            ..CliConfig::default()
        })
    }

    /// Flags over the config file over nothing.
    fn merged(&self, flags: CliConfig) -> Result<CliConfig, CliError> {
        let flags = flags.or(self.to_config()?);
        match &self.config {
            Some(path) => Ok(flags.or(CliConfig::load(path)?)),
            None => Ok(flags),
        }
    }
}

impl ScenarioFlags {
    fn to_config(&self) -> CliConfig {
        CliConfig {
            size: self.size.clone(),
            p0: self.p0,
            profile: self.profile.clone(),
            cutoff: self.cutoff,
            horizon: self.horizon,
            init_len: self.init_len,
            ..CliConfig::default()
        }
    }

    fn build(&self, config: &CliConfig, defaults: &ScenarioParams) -> Result<Scenario, CliError> {
        if let Some(id) = &self.scenario {
            return match id.strip_prefix("builtin:") {
                Some(label) => golden::scenario(label),
                None => parse_scenario_id(id),
            };
        }
        let params = ScenarioParams {
            size: match &config.size {
                Some(s) => parse_size(s)?,
                None => defaults.size,
            },
            p0: config.p0.unwrap_or(defaults.p0),
            profile: match &config.profile {
                Some(p) => p.parse()?,
                None => defaults.profile,
            },
            cutoff: config.cutoff.or(defaults.cutoff),
            decrease_end: None,
            horizon: config.horizon.unwrap_or(defaults.horizon),
            init_len: config.init_len.unwrap_or(defaults.init_len),
            init_p0: None,
        };
        params.build()
    }
}

impl GridFlags {
    fn to_config(&self) -> CliConfig {
        CliConfig {
            methods: self.methods.clone(),
            alphas: self.alphas.clone(),
            betas: self.betas.clone(),
            runs: self.runs,
            ..CliConfig::default()
        }
    }
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>, CliError> {
    let methods = names
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<Method>()
                .map_err(|e| CliError::usage(format!("`{s}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err(CliError::usage("method list is empty"));
    }
    Ok(methods)
}

fn spec_from(
    config: &CliConfig,
    scenario: Scenario,
    issue_only: bool,
) -> Result<ExperimentSpec, CliError> {
    let methods = match &config.methods {
        Some(m) => parse_methods(m)?,
        None => DEFAULT_METHODS.to_vec(),
    };
    let alphas = config
        .alphas
        .clone()
        .unwrap_or_else(|| DEFAULT_ALPHAS.to_vec());
    let betas = config
        .betas
        .clone()
        .unwrap_or_else(|| DEFAULT_BETAS.to_vec());
    let combos = grid_combos(&methods, &alphas, &betas)?;
    let runs = config
        .runs
        .unwrap_or(hesmooth_core::experiment::DEFAULT_RUNS);
    let spec = ExperimentSpec::new(scenario, combos, runs, config.seed.unwrap_or(0))?;
    Ok(spec.with_issue_only(issue_only))
}

fn executor(config: &CliConfig) -> Result<Parallel, CliError> {
    match config.threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        t => Ok(Parallel::new(t)),
    }
}

/// Writes to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

fn cmd_gen(a: &GenArgs) -> Result<ExitCode, CliError> {
    let config = a.shared.merged(a.scenario.to_config())?;
    let scenario = a.scenario.build(&config, &ScenarioParams::default())?;
    let seed = config.seed.unwrap_or(0);
    let series = scenario.generate(&mut RngStream::for_run(seed, &scenario.id(), a.run));
    let rows: Vec<Vec<String>> = series
        .iter()
        .enumerate()
        .map(|(i, d)| vec![(i + 1).to_string(), d.to_string()])
        .collect();
    let text = write_records(
        &["period", "demand"],
        &rows,
        config.format.unwrap_or_default(),
    );
    emit(config.out.as_deref(), &text)?;
    Ok(ExitCode::Ok)
}

fn cmd_trace(a: &TraceArgs) -> Result<ExitCode, CliError> {
    let flags = CliConfig {
        methods: a.methods.clone(),
        ..a.scenario.to_config()
    };
    let config = a.shared.merged(flags)?;
    let defaults = ScenarioParams {
        size: hesmooth_core::SizeDistribution::Constant { c: 1 },
        p0: 0.25,
        profile: ProfileKind::Stationary,
        init_len: 0,
        horizon: DEFAULT_HORIZON,
        ..ScenarioParams::default()
    };
    let scenario = a.scenario.build(&config, &defaults)?;
    let methods = match &config.methods {
        Some(m) => parse_methods(m)?,
        None => vec![Method::Sy, Method::Tsb, Method::Hes],
    };
    let first = |v: &Option<Vec<f64>>| v.as_ref().and_then(|v| v.first().copied());
    let alpha = a.alpha.or(first(&config.alphas)).unwrap_or(0.1);
    let beta = a.beta.or(first(&config.betas)).unwrap_or(0.1);
    let mut forecasters: Vec<Forecaster> = methods
        .iter()
        .map(|&m| {
            let params = if m.is_single_factor() {
                SmoothingParams::single(alpha)
            } else {
                SmoothingParams::new(alpha, beta)
            };
            params.map(|p| Forecaster::new(m, p))
        })
        .collect::<Result<_, _>>()?;

    let seed = config.seed.unwrap_or(0);
    let series = scenario.generate(&mut RngStream::for_run(seed, &scenario.id(), a.run));
    let mut header = vec!["period".to_string(), "demand".to_string()];
    header.extend(methods.iter().map(|m| format!("f_{m}")));
    let mut rows = Vec::new();
    for (i, d) in series.iter().enumerate() {
        let mut row = vec![(i + 1).to_string(), d.to_string()];
        for f in &mut forecasters {
            row.push(sig6(f.step(f64::from(d))?));
        }
        rows.push(row);
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let text = write_records(&header, &rows, config.format.unwrap_or_default());
    emit(config.out.as_deref(), &text)?;
    Ok(ExitCode::Ok)
}

fn cmd_run(a: &RunArgs) -> Result<ExitCode, CliError> {
    let flags = a.grid.to_config().or(a.scenario.to_config());
    let config = a.shared.merged(flags)?;
    let scenario = a.scenario.build(&config, &ScenarioParams::default())?;
    let spec = spec_from(&config, scenario, config.issue_only.unwrap_or(false))?;
    let format = config.format.unwrap_or_default();
    let dir = config.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let table = run_grid(&spec, &executor(&config)?)?;
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let path = dir.join(format!("{}.{}", spec.scenario.id(), format.extension()));
    emit(Some(&path), &write_table(&table, format))?;
    eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
    Ok(ExitCode::Ok)
}

fn cmd_compare(a: &CompareArgs) -> Result<ExitCode, CliError> {
    let flags = CliConfig {
        tolerances: Some(ToleranceConfig {
            mase: a.tol_mase,
            mmr: a.tol_mmr,
            u2: a.tol_u2,
        }),
        ..CliConfig::default()
    };
    let config = a.shared.merged(flags)?;
    let tolerances = config.tolerances.unwrap_or_default().resolve()?;
    let result = golden::load_table(&a.result)?;
    let reference = golden::load_table(&a.golden)?;
    let report = compare_tables(&result, &reference, &tolerances);

    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                c.key.method.name().to_string(),
                format!("{}", c.key.alpha),
                format!("{}", c.key.beta),
                c.metric.name().to_string(),
                sig6(c.result),
                sig6(c.golden),
                sig6(c.deviation),
                format!("{}", c.tolerance),
                if c.pass { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let header = [
        "method",
        "alpha",
        "beta",
        "metric",
        "result",
        "golden",
        "deviation",
        "tolerance",
        "status",
    ];
    let text = write_records(&header, &rows, config.format.unwrap_or_default());
    emit(config.out.as_deref(), &text)?;

    let failed = report.failures().count();
    eprintln!(
        "{} of {} cells within tolerance (max deviation {})",
        report.cells.len() - failed,
        report.cells.len(),
        sig6(report.max_deviation())
    );
    for c in report.failures() {
        eprintln!(
            "FAIL {} alpha={} beta={} {}: {} vs {} (deviation {} > {})",
            c.key.method,
            c.key.alpha,
            c.key.beta,
            c.metric.name(),
            sig6(c.result),
            sig6(c.golden),
            sig6(c.deviation),
            c.tolerance
        );
    }
    if !report.missing.is_empty() {
        eprintln!("{} reference rows have no result row", report.missing.len());
    }
    if !report.uncompared.is_empty() {
        eprintln!(
            "{} result rows have no reference row",
            report.uncompared.len()
        );
    }
    Ok(if report.passed() && !report.cells.is_empty() {
        ExitCode::Ok
    } else {
        ExitCode::CompareFailed
    })
}

fn cmd_h2h(a: &H2hArgs) -> Result<ExitCode, CliError> {
    let flags = a.grid.to_config().or(a.scenario.to_config());
    let config = a.shared.merged(flags)?;
    let scenario = a.scenario.build(&config, &ScenarioParams::default())?;
    let selections = match a.selection.trim().to_ascii_lowercase().as_str() {
        "mmr" => vec![Selection::MmrBest],
        "u2" => vec![Selection::U2Best],
        "both" => vec![Selection::MmrBest, Selection::U2Best],
        other => {
            return Err(CliError::usage(format!(
                "selection `{other}`: expected mmr, u2 or both"
            )))
        }
    };
    let flags_methods = CliConfig {
        methods: Some(vec!["TSB".into(), "HES".into()]),
        ..config.clone()
    };
    let spec = spec_from(&flags_methods, scenario, config.issue_only.unwrap_or(false))?;
    let exec = executor(&config)?;
    let grid = run_grid(&spec, &exec)?;
    let mut rows = Vec::new();
    for selection in selections {
        let r = head_to_head(&spec, &grid, selection, &exec)?;
        rows.push(vec![
            r.scenario_id.clone(),
            selection.label().to_string(),
            format!("{}", r.tsb.alpha),
            format!("{}", r.tsb.beta),
            format!("{}", r.hes.alpha),
            format!("{}", r.hes.beta),
            sig6(r.summary.rgrmse),
            sig6(r.summary.pb),
        ]);
    }
    let header = [
        "scenario",
        "selection",
        "alpha_tsb",
        "beta_tsb",
        "alpha_hes",
        "beta_hes",
        "rgrmse",
        "pb",
    ];
    let text = write_records(&header, &rows, config.format.unwrap_or_default());
    emit(config.out.as_deref(), &text)?;
    Ok(ExitCode::Ok)
}
