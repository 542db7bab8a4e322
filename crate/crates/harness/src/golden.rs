//! Published reference tables, bundled with the crate.
//!
//! Grid tables (`sta*` stationary logarithmic, `stu*` stationary geometric,
//! `dec*` linearly decreasing, `obs*` sudden obsolescence) share the schema
//! `method,alpha,beta,mase,mmr,u2`; each names its scenario in a
//! `# scenario:` line. `logcomp` and `geocomp` hold the TSB/HES head-to-head
//! results. Anything notable about a transcription sits in `# note:` lines.
//! From the command line they are addressed as `builtin:<label>`.

use std::path::Path;

use hesmooth_core::{GoldenTable, Scenario, SizeDistribution};

use crate::scenario_id::parse_scenario_id;
use crate::table_io::{read_comparison, read_table, read_table_file, ComparisonRow};
use crate::CliError;

macro_rules! bundled {
    ($($label:literal),* $(,)?) => {
        &[$(($label, include_str!(concat!("../golden/", $label, ".csv")))),*]
    };
}

/// Grid tables in publication order.
pub const GRID_LABELS: [&str; 16] = [
    "sta1", "sta2", "sta3", "sta4", "stu1", "stu2", "stu3", "stu4", "dec1", "dec2", "dec3", "dec4",
    "obs1", "obs2", "obs3", "obs4",
];
pub const COMPARISON_LABELS: [&str; 2] = ["logcomp", "geocomp"];

const FILES: &[(&str, &str)] = bundled![
    "sta1", "sta2", "sta3", "sta4", "stu1", "stu2", "stu3", "stu4", "dec1", "dec2", "dec3", "dec4",
    "obs1", "obs2", "obs3", "obs4", "logcomp", "geocomp",
];

const PREFIX: &str = "builtin:";

/// Raw CSV text of a bundled table.
pub fn raw(label: &str) -> Option<&'static str> {
    FILES
        .iter()
        .find(|(l, _)| *l == label)
        .map(|(_, text)| *text)
}

fn require(label: &str) -> Result<&'static str, CliError> {
    raw(label).ok_or_else(|| {
        CliError::usage(format!(
            "no bundled table `{label}` (known: {}, {})",
            GRID_LABELS.join(", "),
            COMPARISON_LABELS.join(", ")
        ))
    })
}

pub fn table(label: &str) -> Result<GoldenTable, CliError> {
    if COMPARISON_LABELS.contains(&label) {
        return Err(CliError::usage(format!("`{label}` is a comparison table")));
    }
    read_table(require(label)?, &format!("{PREFIX}{label}"))
}

/// Scenario a bundled grid table was produced on.
pub fn scenario(label: &str) -> Result<Scenario, CliError> {
    let table = table(label)?;
    let id = table
        .scenario_id
        .ok_or_else(|| CliError::usage(format!("`{label}` names no scenario")))?;
    parse_scenario_id(&id)
}

pub fn comparison(label: &str) -> Result<Vec<ComparisonRow>, CliError> {
    if !COMPARISON_LABELS.contains(&label) {
        return Err(CliError::usage(format!(
            "`{label}` is not a comparison table"
        )));
    }
    read_comparison(require(label)?, &format!("{PREFIX}{label}"))
}

/// Stationary scenario behind one comparison row.
///
/// Geometric rows print 0.900/0.001 in the parameter column; they belong to
/// the tables labelled g = 0.8 and g = 0.2, whose sizes have mean 5 and 1.25,
/// i.e. a success probability of 0.2 and 0.8.
pub fn comparison_scenario(label: &str, row: &ComparisonRow) -> Result<Scenario, CliError> {
    let size = match label {
        "logcomp" => SizeDistribution::logarithmic(row.dist_param)?,
        "geocomp" if (row.dist_param - 0.9).abs() < 1e-9 => SizeDistribution::geometric(0.2)?,
        "geocomp" if (row.dist_param - 0.001).abs() < 1e-9 => SizeDistribution::geometric(0.8)?,
        _ => {
            return Err(CliError::usage(format!(
                "`{label}`: no scenario for parameter {}",
                row.dist_param
            )))
        }
    };
    Ok(Scenario::stationary(size, row.p0)?)
}

/// `builtin:<label>` or a file path.
pub fn load_table(spec: &str) -> Result<GoldenTable, CliError> {
    match spec.strip_prefix(PREFIX) {
        Some(label) => table(label),
        None => read_table_file(Path::new(spec)),
    }
}
