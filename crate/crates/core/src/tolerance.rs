//! Numerical thresholds shared by the analysis modules.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

/// Environment variable selecting the tolerance profile (`strict` or `ode`).
pub const PROFILE_ENV: &str = "SASMAG_TOLERANCE";

/// Lorentz residual above which a trajectory is not magnetic.
pub const MAGNETIC_RESIDUAL: f64 = 1e-4;
/// Agreement required between estimated curvatures and their closed forms.
pub const FORMULA_CHECK: f64 = 1e-3;
/// sinθ at or below which the frame formulas are singular.
pub const SINGULAR_SIN: f64 = 1e-6;
/// |cosθ| below which ε = sgn(cosθ) is treated as undefined.
pub const EPSILON_UNDEFINED: f64 = 1e-8;
/// Conservation drift that triggers a warning.
pub const CONSERVATION_WARN: f64 = 1e-8;
/// Agreement required for the helix angle condition of strength recovery.
pub const HELIX_ANGLE_TOL: f64 = 1e-9;

/// Curvatures below `1e-6·max(1, |q|)` count as zero.
pub fn curvature_zero(q: f64) -> f64 {
    1e-6 * q.abs().max(1.0)
}

/// Noise floor for equality tests on angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceProfile {
    /// Closed-form inputs.
    #[default]
    Strict,
    /// Numerically integrated inputs.
    Ode,
}

impl ToleranceProfile {
    /// Tolerance for tests like `cosθ = 0` or `cosθ = ±1`.
    pub fn angle_eq(self) -> f64 {
        match self {
            ToleranceProfile::Strict => 1e-6,
            ToleranceProfile::Ode => 1e-3,
        }
    }

    /// Reads [`PROFILE_ENV`]; unset means `Strict`.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(PROFILE_ENV) {
            Ok(s) => s.parse(),
            Err(_) => Ok(Self::Strict),
        }
    }
}

impl FromStr for ToleranceProfile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "strict" => Ok(Self::Strict),
            "ode" => Ok(Self::Ode),
            other => Err(format!("unknown tolerance profile `{other}` (expected strict or ode)")),
        }
    }
}

impl fmt::Display for ToleranceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ToleranceProfile::Strict => "strict",
            ToleranceProfile::Ode => "ode",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_profiles() {
        assert_eq!("ODE".parse::<ToleranceProfile>().unwrap(), ToleranceProfile::Ode);
        assert_eq!(" strict".parse::<ToleranceProfile>().unwrap(), ToleranceProfile::Strict);
        assert!("loose".parse::<ToleranceProfile>().is_err());
    }

    #[test]
    fn curvature_threshold_scales_with_q() {
        assert_eq!(curvature_zero(0.5), 1e-6);
        assert_eq!(curvature_zero(-3.0), 3e-6);
    }
}
