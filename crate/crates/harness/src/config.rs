//! TOML configuration. Every key is optional and mirrors a command-line
//! flag; flags win over the file.
//!
//! ```toml
//! size = "log:0.9"
//! p0 = 0.5
//! profile = "stationary"
//! runs = 1000
//! seed = 1
//! betas = [0.01, 0.05, 0.1]
//!
//! [tolerances]
//! mase = 0.02
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use hesmooth_core::Tolerances;
use serde::Deserialize;

use crate::table_io::Format;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    pub size: Option<String>,
    pub p0: Option<f64>,
    pub profile: Option<String>,
    pub cutoff: Option<u32>,
    pub horizon: Option<usize>,
    pub init_len: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub alphas: Option<Vec<f64>>,
    pub betas: Option<Vec<f64>>,
    pub runs: Option<u32>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub issue_only: Option<bool>,
    pub tolerances: Option<ToleranceConfig>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub mase: Option<f64>,
    pub mmr: Option<f64>,
    pub u2: Option<f64>,
}

impl ToleranceConfig {
    pub fn or(self, base: Self) -> Self {
        Self {
            mase: self.mase.or(base.mase),
            mmr: self.mmr.or(base.mmr),
            u2: self.u2.or(base.u2),
        }
    }

    pub fn resolve(self) -> Result<Tolerances, CliError> {
        let d = Tolerances::default();
        let t = Tolerances {
            mase: self.mase.unwrap_or(d.mase),
            mmr: self.mmr.unwrap_or(d.mmr),
            u2: self.u2.unwrap_or(d.u2),
        };
        if [t.mase, t.mmr, t.u2]
            .iter()
            .any(|x| !(*x >= 0.0 && x.is_finite()))
        {
            return Err(CliError::usage(
                "tolerances must be finite and non-negative",
            ));
        }
        Ok(t)
    }
}

impl CliConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// `self` with gaps filled from `base`.
    pub fn or(self, base: Self) -> Self {
        Self {
            size: self.size.or(base.size),
            p0: self.p0.or(base.p0),
            profile: self.profile.or(base.profile),
            cutoff: self.cutoff.or(base.cutoff),
            horizon: self.horizon.or(base.horizon),
            init_len: self.init_len.or(base.init_len),
            methods: self.methods.or(base.methods),
            alphas: self.alphas.or(base.alphas),
            betas: self.betas.or(base.betas),
            runs: self.runs.or(base.runs),
            seed: self.seed.or(base.seed),
            out: self.out.or(base.out),
            format: self.format.or(base.format),
            threads: self.threads.or(base.threads),
            issue_only: self.issue_only.or(base.issue_only),
            tolerances: match (self.tolerances, base.tolerances) {
                (Some(a), Some(b)) => Some(a.or(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = CliConfig::parse(
            "p0 = 0.2\nruns = 10\nformat = \"markdown\"\n[tolerances]\nmase = 0.1\nu2 = 0.3\n",
            Path::new("c.toml"),
        )
        .unwrap();
        let flags = CliConfig {
            p0: Some(0.5),
            tolerances: Some(ToleranceConfig {
                mase: Some(0.01),
                ..Default::default()
            }),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.p0, Some(0.5));
        assert_eq!(merged.runs, Some(10));
        assert_eq!(merged.format, Some(Format::Markdown));
        let tol = merged.tolerances.unwrap().resolve().unwrap();
        assert_eq!((tol.mase, tol.mmr, tol.u2), (0.01, 0.05, 0.3));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = CliConfig::parse("rnus = 3\n", Path::new("c.toml")).unwrap_err();
        assert!(err.to_string().contains("rnus"), "{err}");
        assert!(CliConfig::parse("[tolerances]\nmape = 1.0\n", Path::new("c.toml")).is_err());
    }
}
