//! Text forms of scenarios: size specs such as `log:0.9` and scenario ids
//! such as `geo-0.2-p0.5-sudden-c40`.

use std::fmt;
use std::str::FromStr;

use hesmooth_core::generators::{DEFAULT_HORIZON, DEFAULT_INIT_LEN};
use hesmooth_core::{OccurrenceProfile, Scenario, SizeDistribution};

use crate::CliError;

/// Parses `log:<ell>`, `geo:<g>` or `const:<c>`.
pub fn parse_size(spec: &str) -> Result<SizeDistribution, CliError> {
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("size `{spec}`: expected KIND:VALUE")))?;
    let bad = || CliError::usage(format!("size `{spec}`: bad number `{value}`"));
    let size = match kind.trim().to_ascii_lowercase().as_str() {
        "log" | "logarithmic" => {
            SizeDistribution::logarithmic(value.trim().parse().map_err(|_| bad())?)
        }
        "geo" | "geometric" => {
            SizeDistribution::geometric(value.trim().parse().map_err(|_| bad())?)
        }
        "const" | "constant" => {
            SizeDistribution::constant(value.trim().parse().map_err(|_| bad())?)
        }
        other => {
            return Err(CliError::usage(format!(
                "size `{spec}`: unknown kind `{other}` (log, geo or const)"
            )))
        }
    };
    Ok(size?)
}

/// Inverse of [`parse_size`].
pub fn size_spec(size: &SizeDistribution) -> String {
    match *size {
        SizeDistribution::Logarithmic { ell } => format!("log:{ell}"),
        SizeDistribution::Geometric { g } => format!("geo:{g}"),
        SizeDistribution::Constant { c } => format!("const:{c}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProfileKind {
    #[default]
    Stationary,
    Decreasing,
    Sudden,
}

impl FromStr for ProfileKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stationary" => Ok(Self::Stationary),
            "decreasing" => Ok(Self::Decreasing),
            "sudden" => Ok(Self::Sudden),
            _ => Err(CliError::usage(format!(
                "profile `{s}`: expected stationary, decreasing or sudden"
            ))),
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Stationary => "stationary",
            Self::Decreasing => "decreasing",
            Self::Sudden => "sudden",
        })
    }
}

/// Everything needed to build a [`Scenario`] from flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub size: SizeDistribution,
    pub p0: f64,
    pub profile: ProfileKind,
    /// Last period with demand under [`ProfileKind::Sudden`]; half the
    /// horizon when absent. Under another profile, a cutoff turns demand off
    /// after that period as well.
    pub cutoff: Option<u32>,
    /// Period at which a linear decrease reaches zero; the horizon when
    /// absent.
    pub decrease_end: Option<u32>,
    pub horizon: usize,
    pub init_len: usize,
    /// Initialization probability when it differs from `p0`.
    pub init_p0: Option<f64>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            size: SizeDistribution::Logarithmic { ell: 0.9 },
            p0: 0.5,
            profile: ProfileKind::Stationary,
            cutoff: None,
            decrease_end: None,
            horizon: DEFAULT_HORIZON,
            init_len: DEFAULT_INIT_LEN,
            init_p0: None,
        }
    }
}

impl ScenarioParams {
    pub fn build(&self) -> Result<Scenario, CliError> {
        let horizon = u32::try_from(self.horizon)
            .map_err(|_| CliError::usage(format!("horizon {} too large", self.horizon)))?;
        let profile = match (self.profile, self.cutoff) {
            (ProfileKind::Sudden, cutoff) | (ProfileKind::Stationary, cutoff @ Some(_)) => {
                OccurrenceProfile::Sudden {
                    p0: self.p0,
                    cutoff: cutoff.unwrap_or(horizon / 2),
                }
            }
            (ProfileKind::Stationary, None) => OccurrenceProfile::Stationary { p0: self.p0 },
            (ProfileKind::Decreasing, Some(_)) => {
                return Err(CliError::usage(
                    "--cutoff applies to stationary or sudden demand",
                ))
            }
            (ProfileKind::Decreasing, None) => OccurrenceProfile::LinearDecreasing {
                p0: self.p0,
                horizon: self.decrease_end.unwrap_or(horizon),
            },
        };
        let mut scenario = Scenario::new(self.size, profile)?
            .with_horizon(self.horizon)
            .with_init_len(self.init_len);
        if let Some(p) = self.init_p0 {
            scenario.init_p0 = p;
        }
        scenario.validate()?;
        Ok(scenario)
    }
}

/// Parses ids produced by [`Scenario::id`].
pub fn parse_scenario_id(id: &str) -> Result<Scenario, CliError> {
    let bad = |why: &str| CliError::usage(format!("scenario id `{id}`: {why}"));
    let parts: Vec<&str> = id.trim().split('-').collect();
    let [kind, param, p0, profile, rest @ ..] = parts.as_slice() else {
        return Err(bad("expected SIZE-PARAM-pP0-PROFILE"));
    };
    let size = parse_size(&format!("{kind}:{param}"))?;
    let p0 = p0
        .strip_prefix('p')
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| bad("bad occurrence probability"))?;
    let mut params = ScenarioParams {
        size,
        p0,
        profile: profile.parse()?,
        ..ScenarioParams::default()
    };
    for token in rest {
        let number = |prefix: &str| token[prefix.len()..].parse::<u64>().ok();
        if let Some(p) = token.strip_prefix("ip") {
            params.init_p0 = Some(
                p.parse()
                    .map_err(|_| bad("bad initialization probability"))?,
            );
        } else if token.starts_with('h') && params.profile == ProfileKind::Decreasing {
            params.decrease_end = number("h").and_then(|n| u32::try_from(n).ok());
            params.decrease_end.ok_or_else(|| bad("bad decrease end"))?;
        } else if token.starts_with('c') && params.profile == ProfileKind::Sudden {
            params.cutoff = number("c").and_then(|n| u32::try_from(n).ok());
            params.cutoff.ok_or_else(|| bad("bad cutoff"))?;
        } else if token.starts_with('n') {
            params.horizon = number("n").ok_or_else(|| bad("bad horizon"))? as usize;
        } else if token.starts_with('i') {
            params.init_len = number("i").ok_or_else(|| bad("bad initialization length"))? as usize;
        } else {
            return Err(bad(&format!("unknown suffix `{token}`")));
        }
    }
    params.build()
}
