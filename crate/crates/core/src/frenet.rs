//! Pseudo-Hermitian Frenet apparatus of a sampled curve.
//!
//! Gram-Schmidt along ∇̂:
//!
//! ```text
//! ∇̂_{E₁}E₁ = k̂₁E₂
//! ∇̂_{E₁}E₂ = −k̂₁E₁ + k̂₂E₃
//! ∇̂_{E₁}E₃ = −k̂₂E₂ + k̂₃E₄
//! ```
//!
//! Curvature statistics are taken over the interior 80% of the grid, where
//! repeated finite differencing has not yet reached the one-sided stencils.

use serde::Serialize;

use crate::connections::{covariant_along, ConnectionKind, FieldAlongCurve};
use crate::error::{Error, Result};
use crate::model_space::{metric, phi, FrameTangent};
use crate::tolerance::{curvature_zero, EPSILON_UNDEFINED, SINGULAR_SIN};
use crate::trajectory::Trajectory;

/// Fewest nodes the three nested derivatives can work with.
pub const MIN_FRENET_NODES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    /// `None` for zero or NaN.
    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Per-node values of one curvature with their summary over the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureSeries {
    pub per_node: Vec<f64>,
    pub mean: f64,
    /// max |k − mean| over the window
    pub max_deviation: f64,
}

impl CurvatureSeries {
    fn new(per_node: Vec<f64>, window: (usize, usize)) -> Self {
        let w = &per_node[window.0..window.1];
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let max_deviation = w.iter().fold(0.0_f64, |m, k| m.max((k - mean).abs()));
        Self {
            per_node,
            mean,
            max_deviation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrenetReport {
    pub q: f64,
    /// Mean of η(E₁) over all nodes.
    pub cos_theta: f64,
    pub theta: f64,
    /// Half-open node range used for statistics.
    pub window: (usize, usize),
    /// Zero threshold applied to the curvatures.
    pub threshold: f64,
    pub osc_order: u8,
    pub k1: CurvatureSeries,
    pub k2: Option<CurvatureSeries>,
    pub k3: Option<CurvatureSeries>,
    pub e1: FieldAlongCurve,
    pub e2: Option<FieldAlongCurve>,
    pub e3: Option<FieldAlongCurve>,
    /// sgn(−q + 2cosθ)
    pub delta: Option<Sign>,
    /// sgn(cosθ); undefined when |cosθ| < 1e-8
    pub epsilon: Option<Sign>,
}

impl FrenetReport {
    /// Largest |g(E_a, E_b) − δ_ab| over the window, across the reported frames.
    pub fn orthonormality_defect(&self) -> f64 {
        let frames: Vec<&FieldAlongCurve> = std::iter::once(&self.e1)
            .chain(self.e2.as_ref())
            .chain(self.e3.as_ref())
            .collect();
        let mut worst = 0.0_f64;
        for node in self.window.0..self.window.1 {
            for (i, a) in frames.iter().enumerate() {
                for (j, b) in frames.iter().enumerate().skip(i) {
                    let g = metric(&a.samples()[node], &b.samples()[node]);
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((g - target).abs());
                }
            }
        }
        worst
    }

    pub fn nodes(&self) -> usize {
        self.e1.len()
    }
}

/// Node range `[⌊N/10⌋, N − ⌊N/10⌋)`.
pub fn statistics_window(len: usize) -> (usize, usize) {
    let cut = len / 10;
    (cut, len - cut)
}

/// `numerator / k` per node, zero where `k` is below `threshold`.
fn normalize_field(numerator: &FieldAlongCurve, k: &[f64], threshold: f64) -> FieldAlongCurve {
    FieldAlongCurve::new(
        numerator
            .samples()
            .iter()
            .zip(k)
            .map(|(v, &k)| {
                if k < threshold {
                    FrameTangent::zero(v.dim())
                } else {
                    v.scaled(1.0 / k)
                }
            })
            .collect(),
    )
}

/// `∇̂_{E₁}E_next + k·E_prev`, the next Gram-Schmidt numerator.
fn next_numerator(
    traj: &Trajectory,
    current: &FieldAlongCurve,
    k_prev: &[f64],
    prev: &FieldAlongCurve,
) -> Result<FieldAlongCurve> {
    let d = covariant_along(traj, current, ConnectionKind::TanakaWebster)?;
    Ok(FieldAlongCurve::new(
        d.samples()
            .iter()
            .zip(prev.samples())
            .zip(k_prev)
            .map(|((dv, p), &k)| {
                let mut out = dv.clone();
                out.add_scaled(k, p);
                out
            })
            .collect(),
    ))
}

fn norms(field: &FieldAlongCurve) -> Vec<f64> {
    field.samples().iter().map(FrameTangent::norm).collect()
}

/// Frenet frame and curvatures of `traj` with respect to ∇̂, using the
/// trajectory's own `q` for δ and the zero threshold.
pub fn frenet_apparatus(traj: &Trajectory) -> Result<FrenetReport> {
    frenet_apparatus_for(traj, traj.q())
}

/// As [`frenet_apparatus`] with an explicit magnetic strength.
pub fn frenet_apparatus_for(traj: &Trajectory, q: f64) -> Result<FrenetReport> {
    if traj.len() < MIN_FRENET_NODES {
        return Err(Error::GridTooShort {
            nodes: traj.len(),
            required: MIN_FRENET_NODES,
        });
    }
    if let Some(node) = traj.velocities().iter().position(|v| v.norm() < 1e-12) {
        return Err(Error::DegenerateVelocity(node));
    }
    let threshold = curvature_zero(q);
    let window = statistics_window(traj.len());

    let e1 = FieldAlongCurve::tangent(traj);
    let cos_theta = (e1.samples().iter().map(FrameTangent::eta).sum::<f64>() / e1.len() as f64)
        .clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let delta = Sign::of(-q + 2.0 * cos_theta);
    let epsilon = if cos_theta.abs() < EPSILON_UNDEFINED {
        None
    } else {
        Sign::of(cos_theta)
    };

    let m2 = covariant_along(traj, &e1, ConnectionKind::TanakaWebster)?;
    let k1_nodes = norms(&m2);
    let k1 = CurvatureSeries::new(k1_nodes.clone(), window);

    let mut report = FrenetReport {
        q,
        cos_theta,
        theta,
        window,
        threshold,
        osc_order: 1,
        k1,
        k2: None,
        k3: None,
        e1,
        e2: None,
        e3: None,
        delta,
        epsilon,
    };
    if report.k1.mean < threshold {
        return Ok(report);
    }

    let e2 = normalize_field(&m2, &k1_nodes, threshold);
    let m3 = next_numerator(traj, &e2, &k1_nodes, &report.e1)?;
    let k2_nodes = norms(&m3);
    let k2 = CurvatureSeries::new(k2_nodes.clone(), window);
    report.osc_order = 2;
    let k2_zero = k2.mean < threshold;
    report.e2 = Some(e2);
    report.k2 = Some(k2);
    if k2_zero {
        return Ok(report);
    }

    let e3 = normalize_field(&m3, &k2_nodes, threshold);
    let m4 = next_numerator(traj, &e3, &k2_nodes, report.e2.as_ref().expect("set above"))?;
    report.k3 = Some(CurvatureSeries::new(norms(&m4), window));
    report.e3 = Some(e3);
    report.osc_order = 3;
    Ok(report)
}

/// Residuals of the closed-form frame fields against the estimated frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameResiduals {
    /// max |E₂ − (δ/sinθ)φE₁|, when E₂ exists.
    pub r2: Option<f64>,
    /// max |E₃ − (ε/sinθ)(ξ − cosθE₁)|, when E₃ exists and ε is defined.
    pub r3: Option<f64>,
    /// max |g(φE₁, φE₁) − sin²θ| over all nodes.
    pub phi_norm_defect: f64,
    /// max |g(ξ − cosθE₁, ξ − cosθE₁) − sin²θ| over all nodes.
    pub xi_split_defect: f64,
}

/// Compares the estimated frame with `E₂ = (δ/sinθ)φE₁` and
/// `E₃ = (ε/sinθ)(ξ − cosθE₁)`.
pub fn frame_formula_residuals(traj: &Trajectory, report: &FrenetReport) -> Result<FrameResiduals> {
    let cos_t = report.cos_theta;
    let sin_t = report.theta.sin();
    if sin_t <= SINGULAR_SIN {
        return Err(Error::SingularAngle(sin_t));
    }
    if traj.len() != report.nodes() {
        return Err(Error::FieldLength {
            expected: traj.len(),
            found: report.nodes(),
        });
    }
    let sin2 = sin_t * sin_t;
    let dim = traj.dim();
    let xi = FrameTangent::xi(dim);
    let (lo, hi) = report.window;

    let mut phi_norm_defect = 0.0_f64;
    let mut xi_split_defect = 0.0_f64;
    for e1 in report.e1.samples() {
        let pe = phi(e1);
        phi_norm_defect = phi_norm_defect.max((pe.dot(&pe) - sin2).abs());
        let mut s = xi.clone();
        s.add_scaled(-cos_t, e1);
        xi_split_defect = xi_split_defect.max((s.dot(&s) - sin2).abs());
    }

    let r2 = match (&report.e2, report.delta) {
        (Some(e2), Some(delta)) => {
            let scale = delta.value() / sin_t;
            let mut worst = 0.0_f64;
            for node in lo..hi {
                let mut r = e2.samples()[node].clone();
                r.add_scaled(-scale, &phi(&report.e1.samples()[node]));
                worst = worst.max(r.norm());
            }
            Some(worst)
        }
        _ => None,
    };
    let r3 = match (&report.e3, report.epsilon) {
        (Some(e3), Some(eps)) => {
            let scale = eps.value() / sin_t;
            let mut worst = 0.0_f64;
            for node in lo..hi {
                let mut expected = xi.clone();
                expected.add_scaled(-cos_t, &report.e1.samples()[node]);
                let r = &e3.samples()[node] - &expected.scaled(scale);
                worst = worst.max(r.norm());
            }
            Some(worst)
        }
        _ => None,
    };
    Ok(FrameResiduals {
        r2,
        r3,
        phi_norm_defect,
        xi_split_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::{sample, CurveSpec};
    use crate::model_space::Dimension;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn traj(n: usize, q: f64, theta: f64) -> Trajectory {
        let spec = CurveSpec::canonical(Dimension::new(n).unwrap(), q, theta).unwrap();
        sample(&spec, 5.0, 1e-3).unwrap()
    }

    #[test]
    fn sign_of() {
        assert_eq!(Sign::of(-0.1), Some(Sign::Minus));
        assert_eq!(Sign::of(0.0), None);
        assert_eq!(Sign::of(f64::NAN), None);
    }

    #[test]
    fn xi_integral_curve_is_order_one() {
        let r = frenet_apparatus(&traj(1, 2.0, 0.0)).unwrap();
        assert_eq!(r.osc_order, 1);
        assert!(r.k1.mean <= 1e-8);
        assert!(r.e2.is_none());
    }

    #[test]
    fn legendre_circle() {
        let t = traj(1, 1.0, FRAC_PI_2);
        let r = frenet_apparatus(&t).unwrap();
        assert_eq!(r.osc_order, 2);
        assert!((r.k1.mean - 1.0).abs() < 1e-4);
        assert_eq!(r.delta, Some(Sign::Minus));
        let res = frame_formula_residuals(&t, &r).unwrap();
        assert!(res.r2.unwrap() < 1e-5);
        assert!(res.r3.is_none());
    }

    #[test]
    fn slant_helix() {
        let t = traj(1, 3.0, FRAC_PI_3);
        let r = frenet_apparatus(&t).unwrap();
        assert_eq!(r.osc_order, 3);
        assert!((r.k1.mean - 3f64.sqrt()).abs() < 1e-4, "{}", r.k1.mean);
        assert!((r.k2.as_ref().unwrap().mean - 1.0).abs() < 1e-4);
        assert!(r.k3.as_ref().unwrap().mean < 1e-4);
        assert!(r.orthonormality_defect() < 1e-6);
        assert_eq!((r.delta, r.epsilon), (Some(Sign::Minus), Some(Sign::Plus)));
        let res = frame_formula_residuals(&t, &r).unwrap();
        assert!(res.r2.unwrap() < 1e-5 && res.r3.unwrap() < 1e-5, "{res:?}");
        assert!(res.xi_split_defect < 1e-10 && res.phi_norm_defect < 1e-10);
    }

    #[test]
    fn singular_angle_is_rejected() {
        let t = traj(1, 2.0, 0.0);
        let r = frenet_apparatus(&t).unwrap();
        assert!(matches!(frame_formula_residuals(&t, &r), Err(Error::SingularAngle(_))));
    }

    #[test]
    fn short_trajectory_is_rejected() {
        let spec = CurveSpec::canonical(Dimension::new(1).unwrap(), 1.0, 1.0).unwrap();
        let t = sample(&spec, 0.07, 0.01).unwrap();
        assert!(matches!(frenet_apparatus(&t), Err(Error::GridTooShort { .. })));
    }
}
