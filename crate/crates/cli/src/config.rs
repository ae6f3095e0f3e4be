//! JSON run configuration. Every field is optional; command-line flags win.

use std::path::{Path, PathBuf};

use sasmag::ToleranceProfile;
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub q: Option<f64>,
    pub theta: Option<f64>,
    pub c: Option<Vec<f64>>,
    pub d: Option<Vec<f64>>,
    pub h: Option<Vec<f64>>,
    pub lambda_zero: Option<bool>,
    pub p0: Option<Vec<f64>>,
    pub v0: Option<Vec<f64>>,
    pub tmax: Option<f64>,
    pub dt: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tolerance: Option<String>,
    pub qs: Option<Vec<f64>>,
    pub thetas: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
    }

    /// Flag, then config file, then environment, then strict.
    pub fn profile(&self, flag: Option<&str>) -> CliResult<ToleranceProfile> {
        if let Some(s) = flag.or(self.tolerance.as_deref()) {
            return s.parse().map_err(CliError::Input);
        }
        ToleranceProfile::from_env().map_err(CliError::Input)
    }
}

/// First present value, or an error naming the missing parameter.
pub fn require<T>(name: &str, flag: Option<T>, config: Option<T>) -> CliResult<T> {
    flag.or(config)
        .ok_or_else(|| CliError::input(format!("missing parameter `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"q": 1.0, "bogus": 2}"#).is_err());
        let c: RunConfig = serde_json::from_str(r#"{"q": 1.0, "qs": [1, -1]}"#).unwrap();
        assert_eq!(c.qs, Some(vec![1.0, -1.0]));
    }

    #[test]
    fn flag_beats_config() {
        assert_eq!(require("q", Some(2.0), Some(1.0)).unwrap(), 2.0);
        assert_eq!(require("q", None, Some(1.0)).unwrap(), 1.0);
        assert!(require::<f64>("q", None, None).is_err());
    }

    #[test]
    fn profile_precedence() {
        let c = RunConfig {
            tolerance: Some("ode".into()),
            ..RunConfig::default()
        };
        assert_eq!(c.profile(None).unwrap(), ToleranceProfile::Ode);
        assert_eq!(c.profile(Some("strict")).unwrap(), ToleranceProfile::Strict);
        assert!(c.profile(Some("lax")).is_err());
    }
}
