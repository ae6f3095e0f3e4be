//! Classification of magnetic trajectories and recovery of the field strength.
//!
//! Forward direction: a pseudo-Hermitian magnetic curve is a non-Legendre
//! slant geodesic (including integral curves of ξ), a Legendre circle with
//! `k̂₁ = |q|`, or a slant helix with `k̂₁ = |λ| sinθ`, `k̂₂ = |λ| |cosθ|`.
//!
//! Inverse direction: given the curvatures, contact angle and frame signs of
//! a φ-helix of order ≤ 3, decide which strengths `q` (if any) make it
//! magnetic.

use serde::Serialize;

use crate::closed_form::{lorentz_residual, sample, CurveSpec};
use crate::error::{Error, Result};
use crate::frenet::{frenet_apparatus_for, FrenetReport, Sign};
use crate::model_space::{metric, phi, Dimension};
use crate::tolerance::{ToleranceProfile, FORMULA_CHECK, HELIX_ANGLE_TOL, MAGNETIC_RESIDUAL};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// Integral curve of ±ξ.
    GeodesicXi,
    /// Non-Legendre slant geodesic with cosθ = q/2.
    SlantGeodesic,
    LegendreCircle,
    SlantHelix,
    NotMagnetic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub cos_theta: f64,
    /// q − 2cosθ
    pub lambda: f64,
    pub k1: f64,
    pub k2: f64,
    pub osc_order: u8,
    /// Lorentz residual max |∇̂_{E₁}E₁ − (−q + 2cosθ)φE₁|.
    pub residual: f64,
}

/// Closed-form curvatures `k̂₁ = |λ| sinθ`, `k̂₂ = |λ| |cosθ|` for `(q, θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedCurvatures {
    pub k1: f64,
    pub k2: f64,
}

impl PredictedCurvatures {
    pub fn new(q: f64, cos_theta: f64) -> Self {
        let lambda = (q - 2.0 * cos_theta).abs();
        let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
        Self {
            k1: lambda * sin_theta,
            k2: lambda * cos_theta.abs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub branch: Branch,
    pub evidence: Evidence,
    pub predicted: PredictedCurvatures,
}

/// Classifies with the strict (closed-form) tolerance profile.
pub fn classify(traj: &Trajectory, q: f64) -> Result<Classification> {
    classify_with(traj, q, ToleranceProfile::Strict)
}

pub fn classify_with(traj: &Trajectory, q: f64, profile: ToleranceProfile) -> Result<Classification> {
    let report = frenet_apparatus_for(traj, q)?;
    let residual = lorentz_residual(traj, q)?;
    Ok(classify_report(&report, q, residual, profile))
}

/// Branch decision from an existing Frenet report and Lorentz residual.
pub fn classify_report(
    report: &FrenetReport,
    q: f64,
    residual: f64,
    profile: ToleranceProfile,
) -> Classification {
    let tol = profile.angle_eq();
    let cos_t = report.cos_theta;
    let k1 = if report.osc_order >= 2 { report.k1.mean } else { 0.0 };
    let k2 = match (&report.k2, report.osc_order) {
        (Some(k2), 3) => k2.mean,
        _ => 0.0,
    };
    let predicted = PredictedCurvatures::new(q, cos_t);
    let evidence = Evidence {
        cos_theta: cos_t,
        lambda: q - 2.0 * cos_t,
        k1,
        k2,
        osc_order: report.osc_order,
        residual,
    };

    let branch = if residual.is_nan() || residual > MAGNETIC_RESIDUAL {
        Branch::NotMagnetic
    } else if 1.0 - cos_t.abs() <= tol {
        Branch::GeodesicXi
    } else if report.osc_order == 1 {
        if (cos_t - q / 2.0).abs() <= FORMULA_CHECK {
            Branch::SlantGeodesic
        } else {
            Branch::NotMagnetic
        }
    } else if cos_t.abs() <= tol {
        if (k1 - q.abs()).abs() <= FORMULA_CHECK && report.osc_order == 2 {
            Branch::LegendreCircle
        } else {
            Branch::NotMagnetic
        }
    } else if report.osc_order == 3
        && (k1 - predicted.k1).abs() <= FORMULA_CHECK
        && (k2 - predicted.k2).abs() <= FORMULA_CHECK
    {
        Branch::SlantHelix
    } else {
        Branch::NotMagnetic
    };
    Classification {
        branch,
        evidence,
        predicted,
    }
}

/// Curvature data of a pseudo-Hermitian φ-helix of order ≤ 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HelixData {
    k1: f64,
    k2: f64,
    cos_theta: f64,
    /// sgn g(φE₁, E₂)
    delta: Sign,
    /// sgn cosθ
    epsilon: Sign,
}

impl HelixData {
    pub fn new(k1: f64, k2: f64, cos_theta: f64, delta: Sign, epsilon: Sign) -> Result<Self> {
        if !(k1.is_finite() && k1 >= 0.0) || !(k2.is_finite() && k2 >= 0.0) {
            return Err(Error::InvalidHelix("curvatures must be finite and non-negative".into()));
        }
        if k2 > 0.0 && k1 == 0.0 {
            return Err(Error::InvalidHelix("k2 > 0 requires k1 > 0".into()));
        }
        if !(-1.0..=1.0).contains(&cos_theta) {
            return Err(Error::InvalidHelix(format!("cosθ = {cos_theta} outside [−1, 1]")));
        }
        if cos_theta != 0.0 && Sign::of(cos_theta) != Some(epsilon) {
            return Err(Error::InvalidHelix(format!(
                "ε = {} disagrees with sgn(cosθ) for cosθ = {cos_theta}",
                epsilon.value()
            )));
        }
        Ok(Self {
            k1,
            k2,
            cos_theta,
            delta,
            epsilon,
        })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn k2(&self) -> f64 {
        self.k2
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    pub fn delta(&self) -> Sign {
        self.delta
    }

    pub fn epsilon(&self) -> Sign {
        self.epsilon
    }
}

/// Which hypothesis of the strength recovery applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum StrengthCase {
    /// cosθ ∉ {−1, 0, 1}, k̂₁ = 0: q = 2cosθ.
    SlantGeodesic,
    /// cosθ = 0, k̂₁ > 0, k̂₂ = 0: q = −δk̂₁.
    LegendreCircle,
    /// k̂₂ > 0 with cosθ = εk̂₂/√(k̂₁² + k̂₂²).
    SlantHelix,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Strength {
    /// cosθ = ±1: magnetic for every q.
    ArbitraryQ,
    UniqueQ { q: f64, case: StrengthCase },
    /// Not magnetic for any q.
    Impossible,
}

/// Strength recovery with the default angle tolerance (1e-9).
pub fn strength_for_phi_helix(h: &HelixData) -> Strength {
    strength_for_phi_helix_tol(h, HELIX_ANGLE_TOL)
}

/// Strength recovery where `tol` decides the equalities `cosθ = 0`,
/// `cosθ = ±1`, `k̂ = 0` and the helix angle condition.
pub fn strength_for_phi_helix_tol(h: &HelixData, tol: f64) -> Strength {
    let c = h.cos_theta;
    let is_pm_one = 1.0 - c.abs() <= tol;
    let is_zero = c.abs() <= tol;
    let k1_zero = h.k1 <= tol;
    let k2_zero = h.k2 <= tol;
    if is_pm_one {
        return Strength::ArbitraryQ;
    }
    if !is_zero && k1_zero {
        return Strength::UniqueQ {
            q: 2.0 * c,
            case: StrengthCase::SlantGeodesic,
        };
    }
    if is_zero && !k1_zero && k2_zero {
        return Strength::UniqueQ {
            q: -h.delta.value() * h.k1,
            case: StrengthCase::LegendreCircle,
        };
    }
    if !k2_zero {
        let r = h.k1.hypot(h.k2);
        let eps = h.epsilon.value();
        if (c - eps * h.k2 / r).abs() <= tol {
            return Strength::UniqueQ {
                q: -h.delta.value() * r + 2.0 * eps * h.k2 / r,
                case: StrengthCase::SlantHelix,
            };
        }
    }
    Strength::Impossible
}

/// Builds helix data from an estimated Frenet report. δ is read from the
/// frame as sgn g(φE₁, E₂); angles within the profile tolerance of 0 or ±1
/// are snapped.
pub fn helix_data_from_report(report: &FrenetReport, profile: ToleranceProfile) -> Result<HelixData> {
    let tol = profile.angle_eq();
    let mut c = report.cos_theta;
    if c.abs() <= tol {
        c = 0.0;
    } else if 1.0 - c.abs() <= tol {
        c = c.signum();
    }
    let k1 = if report.osc_order >= 2 { report.k1.mean } else { 0.0 };
    let k2 = match (&report.k2, report.osc_order) {
        (Some(k2), 3) => k2.mean,
        _ => 0.0,
    };
    let delta = match &report.e2 {
        Some(e2) => {
            let (lo, hi) = report.window;
            let s: f64 = (lo..hi)
                .map(|k| metric(&phi(&report.e1.samples()[k]), &e2.samples()[k]))
                .sum();
            Sign::of(s).unwrap_or(Sign::Plus)
        }
        None => Sign::Plus,
    };
    let epsilon = Sign::of(c).unwrap_or(Sign::Plus);
    HelixData::new(k1, k2, c, delta, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripOutcome {
    pub q: f64,
    pub theta: f64,
    pub helix: HelixData,
    pub strength: Strength,
    pub recovered: bool,
}

/// Arc length sampled by the round-trip check.
pub const ROUNDTRIP_TMAX: f64 = 5.0;
pub const ROUNDTRIP_DT: f64 = 1e-3;

/// Closed-form curve for `(q, θ)` → Frenet estimate → strength recovery.
pub fn roundtrip(q: f64, theta: f64, dim: Dimension, profile: ToleranceProfile) -> Result<RoundtripOutcome> {
    let spec = CurveSpec::canonical(dim, q, theta)?;
    let traj = sample(&spec, ROUNDTRIP_TMAX, ROUNDTRIP_DT)?;
    let report = frenet_apparatus_for(&traj, q)?;
    let helix = helix_data_from_report(&report, profile)?;
    let strength = strength_for_phi_helix_tol(&helix, profile.angle_eq());
    let recovered = match strength {
        Strength::ArbitraryQ => theta.sin() <= profile.angle_eq(),
        Strength::UniqueQ { q: found, .. } => (found - q).abs() <= FORMULA_CHECK,
        Strength::Impossible => false,
    };
    Ok(RoundtripOutcome {
        q,
        theta,
        helix,
        strength,
        recovered,
    })
}

/// True iff the generating strength is recovered within 1e-3.
pub fn roundtrip_check(q: f64, theta: f64, dim: Dimension) -> bool {
    roundtrip(q, theta, dim, ToleranceProfile::Strict)
        .map(|o| o.recovered)
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn d(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn helix_validation() {
        assert!(HelixData::new(-1.0, 0.0, 0.5, Sign::Plus, Sign::Plus).is_err());
        assert!(HelixData::new(0.0, 1.0, 0.5, Sign::Plus, Sign::Plus).is_err());
        assert!(HelixData::new(1.0, 1.0, 0.5, Sign::Plus, Sign::Minus).is_err());
        assert!(HelixData::new(1.0, 1.0, 1.5, Sign::Plus, Sign::Plus).is_err());
        assert!(HelixData::new(1.0, 0.0, 0.0, Sign::Plus, Sign::Minus).is_ok());
    }

    #[test]
    fn strength_cases() {
        let h = HelixData::new(0.7, 0.2, 1.0, Sign::Plus, Sign::Plus).unwrap();
        assert_eq!(strength_for_phi_helix(&h), Strength::ArbitraryQ);

        let h = HelixData::new(2.0, 0.0, 0.0, Sign::Plus, Sign::Plus).unwrap();
        assert_eq!(
            strength_for_phi_helix(&h),
            Strength::UniqueQ { q: -2.0, case: StrengthCase::LegendreCircle }
        );

        let h = HelixData::new(3f64.sqrt(), 1.0, 0.5, Sign::Minus, Sign::Plus).unwrap();
        match strength_for_phi_helix(&h) {
            Strength::UniqueQ { q, case: StrengthCase::SlantHelix } => assert!((q - 3.0).abs() < 1e-12),
            other => panic!("{other:?}"),
        }

        let c = FRAC_PI_4.cos();
        let h = HelixData::new(0.0, 0.0, c, Sign::Plus, Sign::Plus).unwrap();
        assert_eq!(
            strength_for_phi_helix(&h),
            Strength::UniqueQ { q: 2.0 * c, case: StrengthCase::SlantGeodesic }
        );

        // helix angle condition violated
        let h = HelixData::new(3f64.sqrt(), 1.0, 0.45, Sign::Minus, Sign::Plus).unwrap();
        assert_eq!(strength_for_phi_helix(&h), Strength::Impossible);
        // non-Legendre circle
        let h = HelixData::new(1.0, 0.0, 0.3, Sign::Minus, Sign::Plus).unwrap();
        assert_eq!(strength_for_phi_helix(&h), Strength::Impossible);
    }

    #[test]
    fn classify_examples() {
        let spec = CurveSpec::canonical(d(1), 0.7, 0.0).unwrap();
        let t = sample(&spec, 3.0, 1e-3).unwrap();
        assert_eq!(classify(&t, 0.7).unwrap().branch, Branch::GeodesicXi);

        let spec = CurveSpec::canonical(d(1), 1.0, FRAC_PI_3).unwrap();
        assert!(spec.is_linear());
        let t = sample(&spec, 3.0, 1e-3).unwrap();
        assert_eq!(classify(&t, 1.0).unwrap().branch, Branch::SlantGeodesic);

        let spec = CurveSpec::canonical(d(1), 3.0, FRAC_PI_3).unwrap();
        let t = sample(&spec, 3.0, 1e-3).unwrap();
        let c = classify(&t, 3.0).unwrap();
        assert_eq!(c.branch, Branch::SlantHelix);
        assert!((c.evidence.k1 - 3f64.sqrt()).abs() < 1e-4);
        assert!((c.evidence.k2 - 1.0).abs() < 1e-4);

        let spec = CurveSpec::canonical(d(2), -1.0, FRAC_PI_2).unwrap();
        let t = sample(&spec, 3.0, 1e-3).unwrap();
        assert_eq!(classify(&t, -1.0).unwrap().branch, Branch::LegendreCircle);
        // wrong strength
        assert_eq!(classify(&t, 0.0 - 2.0).unwrap().branch, Branch::NotMagnetic);
    }

    #[test]
    fn roundtrip_examples() {
        assert!(roundtrip_check(3.0, FRAC_PI_3, d(1)));
        let o = roundtrip(1.0, FRAC_PI_2, d(2), ToleranceProfile::Strict).unwrap();
        assert!(o.recovered);
        assert!(matches!(o.strength, Strength::UniqueQ { case: StrengthCase::LegendreCircle, .. }));
        let q = 2.0 * FRAC_PI_4.cos();
        let o = roundtrip(q, FRAC_PI_4, d(1), ToleranceProfile::Strict).unwrap();
        match o.strength {
            Strength::UniqueQ { q: found, case: StrengthCase::SlantGeodesic } => {
                assert!((found - 2f64.sqrt()).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
    }
}
