//! Exact pseudo-Hermitian magnetic curves of ℝ^{2n+1}(−3).
//!
//! With `λ = q − 2cosθ` there are two families.
//!
//! Rotating (`λ ≠ 0`), amplitudes with `Σ c_i² = 4sin²θ`:
//!
//! ```text
//! x_i = (c_i/λ) sin(λt + d_i) + h_i
//! y_i = −(c_i/λ) cos(λt + d_i) + h_{n+i}
//! z   = 2cosθ t + Σ { −c_i²/(4λ²) [2(λt + d_i) + sin 2(λt + d_i)]
//!                     + (c_i h_{n+i}/λ) sin(λt + d_i) } + h_{2n+1}
//! ```
//!
//! Linear (`λ = 0`, i.e. `q = 2cosθ`), slopes with `q² + Σ_{i≤2n} c_i² = 4`:
//!
//! ```text
//! x_i = c_i t + d_i,   y_i = c_{n+i} t + d_{n+i}
//! z   = 2cosθ t + Σ c_i (c_{n+i} t²/2 + d_{n+i} t) + c_{2n+1}
//! ```

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::connections::{covariant_along, interior_nodes, ConnectionKind, FieldAlongCurve};
use crate::error::{Error, Result};
use crate::integrator::MagneticIvp;
use crate::model_space::{phi, to_frame, CoordTangent, Dimension, Point};
use crate::trajectory::Trajectory;

/// Smallest |λ| accepted by the rotating family.
pub const MIN_ROTATION_RATE: f64 = 1e-9;
/// Tolerance on the amplitude constraints.
pub const AMPLITUDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum CurveConstants {
    /// `λ ≠ 0`: amplitudes `c` (n), phases `d` (n), offsets `h` (2n+1).
    Rotating {
        c: Vec<f64>,
        d: Vec<f64>,
        h: Vec<f64>,
    },
    /// `λ = 0`: slopes `c` (2n+1, the last is the z offset) and intercepts `d` (2n).
    Linear { c: Vec<f64>, d: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawCurveSpec {
    n: usize,
    q: f64,
    theta: f64,
    #[serde(flatten)]
    constants: CurveConstants,
}

/// Parameters of one closed-form magnetic curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurveSpec", into = "RawCurveSpec")]
pub struct CurveSpec {
    dim: Dimension,
    q: f64,
    theta: f64,
    constants: CurveConstants,
}

impl TryFrom<RawCurveSpec> for CurveSpec {
    type Error = Error;
    fn try_from(raw: RawCurveSpec) -> Result<Self> {
        let dim = Dimension::new(raw.n)?;
        match raw.constants {
            CurveConstants::Rotating { c, d, h } => Self::rotating(dim, raw.q, raw.theta, c, d, h),
            CurveConstants::Linear { c, d } => Self::linear(dim, raw.q, raw.theta, c, d),
        }
    }
}

impl From<CurveSpec> for RawCurveSpec {
    fn from(s: CurveSpec) -> Self {
        RawCurveSpec {
            n: s.dim.n(),
            q: s.q,
            theta: s.theta,
            constants: s.constants,
        }
    }
}

fn check_len(what: &str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::InvalidSpec(format!(
            "{what} needs {expected} values, got {}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidSpec(format!("{what} has a non-finite value")));
    }
    Ok(())
}

fn check_common(q: f64, theta: f64) -> Result<()> {
    if !q.is_finite() || q == 0.0 {
        return Err(Error::InvalidSpec("q must be finite and non-zero".into()));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::InvalidSpec(format!("θ = {theta} is outside [0, π]")));
    }
    Ok(())
}

impl CurveSpec {
    pub fn rotating(
        dim: Dimension,
        q: f64,
        theta: f64,
        c: Vec<f64>,
        d: Vec<f64>,
        h: Vec<f64>,
    ) -> Result<Self> {
        check_common(q, theta)?;
        let n = dim.n();
        check_len("c", &c, n)?;
        check_len("d", &d, n)?;
        check_len("h", &h, 2 * n + 1)?;
        let sum: f64 = c.iter().map(|x| x * x).sum();
        let target = 4.0 * theta.sin().powi(2);
        if (sum - target).abs() > AMPLITUDE_TOL {
            return Err(Error::InvalidSpec(format!(
                "Σ c_i² ≠ 4 sin²θ ({sum} vs {target})"
            )));
        }
        let d = d.into_iter().map(|x| x.rem_euclid(TAU)).collect();
        Ok(Self {
            dim,
            q,
            theta,
            constants: CurveConstants::Rotating { c, d, h },
        })
    }

    pub fn linear(dim: Dimension, q: f64, theta: f64, c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        check_common(q, theta)?;
        let n = dim.n();
        check_len("c", &c, 2 * n + 1)?;
        check_len("d", &d, 2 * n)?;
        if (q - 2.0 * theta.cos()).abs() > AMPLITUDE_TOL {
            return Err(Error::InvalidSpec(format!(
                "the λ = 0 branch requires q = 2cosθ (q = {q}, 2cosθ = {})",
                2.0 * theta.cos()
            )));
        }
        let sum: f64 = c[..2 * n].iter().map(|x| x * x).sum();
        if (q * q + sum - 4.0).abs() > AMPLITUDE_TOL {
            return Err(Error::InvalidSpec(format!(
                "q² + Σ c_i² ≠ 4 ({})",
                q * q + sum
            )));
        }
        Ok(Self {
            dim,
            q,
            theta,
            constants: CurveConstants::Linear { c, d },
        })
    }

    /// A representative curve for `(n, q, θ)`: equal amplitudes in every
    /// φ-plane, phases `d_i = i/2`, zero offsets. Picks the linear family when
    /// `|λ| < 1e-9`.
    pub fn canonical(dim: Dimension, q: f64, theta: f64) -> Result<Self> {
        check_common(q, theta)?;
        let n = dim.n();
        let lambda = q - 2.0 * theta.cos();
        if lambda.abs() < MIN_ROTATION_RATE {
            let slope = 2.0 * theta.sin() / ((2 * n) as f64).sqrt();
            let mut c = vec![slope; 2 * n];
            c.push(0.0);
            // land exactly on the constraint surface
            let q = 2.0 * theta.cos();
            return Self::linear(dim, q, theta, normalize(c, 2 * n, (4.0 - q * q).max(0.0)), vec![0.0; 2 * n]);
        }
        let amp = 2.0 * theta.sin() / (n as f64).sqrt();
        let c = normalize(vec![amp; n], n, 4.0 * theta.sin().powi(2));
        let d = (0..n).map(|i| 0.5 * i as f64).collect();
        Self::rotating(dim, q, theta, c, d, vec![0.0; 2 * n + 1])
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn constants(&self) -> &CurveConstants {
        &self.constants
    }

    /// `λ = q − 2cosθ`.
    pub fn lambda(&self) -> f64 {
        self.q - 2.0 * self.theta.cos()
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.constants, CurveConstants::Linear { .. })
    }
}

/// Rescales the first `k` entries so their squares sum to `target`.
fn normalize(mut c: Vec<f64>, k: usize, target: f64) -> Vec<f64> {
    let sum: f64 = c[..k].iter().map(|x| x * x).sum();
    if sum > 0.0 {
        let s = (target / sum).sqrt();
        c[..k].iter_mut().for_each(|x| *x *= s);
    }
    c
}

/// Position, velocity and acceleration of a curve at one parameter value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveEval {
    pub position: Point,
    pub velocity: CoordTangent,
    pub acceleration: CoordTangent,
}

/// Evaluates the closed-form curve and its first two derivatives at `t`.
pub fn generate(spec: &CurveSpec, t: f64) -> Result<CurveEval> {
    let n = spec.dim.n();
    let cos_t = spec.theta.cos();
    let lambda = spec.lambda();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut dx = vec![0.0; n];
    let mut dy = vec![0.0; n];
    let mut ddx = vec![0.0; n];
    let mut ddy = vec![0.0; n];
    let z;
    match &spec.constants {
        CurveConstants::Rotating { c, d, h } => {
            if lambda.abs() < MIN_ROTATION_RATE {
                return Err(Error::DegenerateRotation(lambda));
            }
            let mut zsum = 0.0;
            for i in 0..n {
                let f = lambda * t + d[i];
                let (s, co) = f.sin_cos();
                x[i] = c[i] / lambda * s + h[i];
                y[i] = -c[i] / lambda * co + h[n + i];
                dx[i] = c[i] * co;
                dy[i] = c[i] * s;
                ddx[i] = -c[i] * lambda * s;
                ddy[i] = c[i] * lambda * co;
                zsum += -c[i] * c[i] / (4.0 * lambda * lambda) * (2.0 * f + (2.0 * f).sin())
                    + c[i] * h[n + i] / lambda * s;
            }
            z = 2.0 * cos_t * t + zsum + h[2 * n];
        }
        CurveConstants::Linear { c, d } => {
            let mut zsum = 0.0;
            for i in 0..n {
                x[i] = c[i] * t + d[i];
                y[i] = c[n + i] * t + d[n + i];
                dx[i] = c[i];
                dy[i] = c[n + i];
                zsum += c[i] * (0.5 * c[n + i] * t * t + d[n + i] * t);
            }
            z = 2.0 * cos_t * t + zsum + c[2 * n];
        }
    }
    // z' = 2cosθ + Σ x_i' y_i and its derivative
    let dz = 2.0 * cos_t + dx.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    let ddz: f64 = (0..n).map(|i| ddx[i] * y[i] + dx[i] * dy[i]).sum();
    Ok(CurveEval {
        position: Point::new(x, y, z)?,
        velocity: CoordTangent::new(dx, dy, dz)?,
        acceleration: CoordTangent::new(ddx, ddy, ddz)?,
    })
}

/// Samples the curve on `t = k·dt`, `k = 0..=⌊tmax/dt⌋`.
pub fn sample(spec: &CurveSpec, t_max: f64, dt: f64) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0 && t_max.is_finite() && t_max >= dt) {
        return Err(Error::InvalidSpec(format!(
            "sampling needs 0 < dt ≤ tmax (dt = {dt}, tmax = {t_max})"
        )));
    }
    let steps = (t_max / dt * (1.0 + 1e-12)).floor() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let ev = generate(spec, t)?;
        velocities.push(to_frame(&ev.position, &ev.velocity));
        points.push(ev.position);
        times.push(t);
    }
    Trajectory::new(times, points, velocities, spec.q)
}

/// Initial value problem reproducing `spec` from its state at `t = 0`.
pub fn initial_value_problem(spec: &CurveSpec, t_max: f64, dt: f64) -> Result<MagneticIvp> {
    let ev = generate(spec, 0.0)?;
    let v0 = to_frame(&ev.position, &ev.velocity);
    MagneticIvp::new(spec.q, ev.position, v0, t_max, dt)
}

/// Largest g-norm of `∇̂_{E₁}E₁ − (−q + 2cosθ)φE₁` over interior nodes, with
/// cosθ taken from the trajectory.
pub fn lorentz_residual(traj: &Trajectory, q: f64) -> Result<f64> {
    let e1 = FieldAlongCurve::tangent(traj);
    let acc = covariant_along(traj, &e1, ConnectionKind::TanakaWebster)?;
    let k = -q + 2.0 * traj.cos_theta();
    let mut worst = 0.0_f64;
    for node in interior_nodes(traj.len()) {
        let mut r = acc.samples()[node].clone();
        r.add_scaled(-k, &phi(&e1.samples()[node]));
        worst = worst.max(r.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn d(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn legendre_circle() -> CurveSpec {
        CurveSpec::rotating(d(1), 1.0, FRAC_PI_2, vec![2.0], vec![0.0], vec![0.0; 3]).unwrap()
    }

    #[test]
    fn legendre_circle_formulas() {
        let spec = legendre_circle();
        for &t in &[0.0, 0.3, 1.7, 4.0] {
            let ev = generate(&spec, t).unwrap();
            let zc = FRAC_PI_2.cos(); // 6e-17, kept exact in the comparison
            let z = 2.0 * zc * t - (2.0 * t + (2.0 * t).sin());
            assert!((ev.position.x[0] - 2.0 * t.sin()).abs() < 1e-15);
            assert!((ev.position.y[0] + 2.0 * t.cos()).abs() < 1e-15);
            assert!((ev.position.z - z).abs() < 1e-14);
        }
        let ev = generate(&spec, 0.0).unwrap();
        for (got, want) in ev.position.to_flat().iter().zip([0.0, -2.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        // z'(0) = 2cosθ + x'(0) y(0) = −4
        assert!((ev.velocity.u[0] - 2.0).abs() < 1e-15);
        assert!(ev.velocity.v[0].abs() < 1e-15);
        assert!((ev.velocity.w + 4.0).abs() < 1e-14);
    }

    #[test]
    fn linear_branch_formulas() {
        let theta = FRAC_PI_3;
        let q = 2.0 * theta.cos();
        let c1 = 1.0;
        let c2 = (4.0 - q * q - c1 * c1).sqrt();
        let spec = CurveSpec::linear(d(1), q, theta, vec![c1, c2, 0.25], vec![0.5, -1.0]).unwrap();
        let t = 1.3;
        let ev = generate(&spec, t).unwrap();
        assert!((ev.position.x[0] - (c1 * t + 0.5)).abs() < 1e-15);
        assert!((ev.position.y[0] - (c2 * t - 1.0)).abs() < 1e-15);
        let z = q * t + c1 * (c2 * t * t / 2.0 - t) + 0.25;
        assert!((ev.position.z - z).abs() < 1e-14);
    }

    #[test]
    fn spec_validation_messages() {
        let err = CurveSpec::rotating(d(1), 1.0, FRAC_PI_2, vec![1.0], vec![0.0], vec![0.0; 3])
            .unwrap_err();
        assert!(err.to_string().contains("Σ c_i² ≠ 4 sin²θ"), "{err}");
        let err = CurveSpec::linear(d(1), 1.5, FRAC_PI_3, vec![1.0, 1.0, 0.0], vec![0.0; 2])
            .unwrap_err();
        assert!(err.to_string().contains("q = 2cosθ"), "{err}");
        assert!(CurveSpec::rotating(d(1), 0.0, 1.0, vec![2.0 * 1f64.sin()], vec![0.0], vec![0.0; 3]).is_err());
        assert!(CurveSpec::canonical(d(1), 1.0, PI + 0.1).is_err());
    }

    #[test]
    fn degenerate_rotating_spec_is_rejected_at_evaluation() {
        // q = 2cosθ with the rotating constants
        let theta = FRAC_PI_3;
        let spec = CurveSpec::rotating(
            d(1),
            2.0 * theta.cos(),
            theta,
            vec![2.0 * theta.sin()],
            vec![0.0],
            vec![0.0; 3],
        )
        .unwrap();
        assert!(matches!(generate(&spec, 0.0), Err(Error::DegenerateRotation(_))));
    }

    #[test]
    fn phases_are_reduced() {
        let spec = CurveSpec::rotating(d(1), 1.0, FRAC_PI_2, vec![2.0], vec![-1.0], vec![0.0; 3]).unwrap();
        match spec.constants() {
            CurveConstants::Rotating { d, .. } => assert!((d[0] - (TAU - 1.0)).abs() < 1e-15),
            _ => unreachable!(),
        }
    }

    #[test]
    fn canonical_picks_branch() {
        assert!(CurveSpec::canonical(d(2), 1.0, FRAC_PI_3).unwrap().is_linear());
        assert!(!CurveSpec::canonical(d(2), 3.0, FRAC_PI_3).unwrap().is_linear());
    }

    #[test]
    fn spec_json_roundtrip_and_validation() {
        let spec = CurveSpec::canonical(d(2), 3.0, FRAC_PI_3).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"branch\":\"rotating\""), "{text}");
        let back: CurveSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"n":1,"q":1.0,"theta":1.0,"branch":"rotating","c":[1.0],"d":[0.0],"h":[0,0,0]}"#;
        assert!(serde_json::from_str::<CurveSpec>(bad).is_err());
    }

    #[test]
    fn sample_slant_values() {
        let traj = sample(&legendre_circle(), 2.0, 0.01).unwrap();
        assert_eq!(traj.len(), 201);
        assert!(traj.velocities().iter().all(|v| v.eta().abs() < 1e-14));
        let spec = CurveSpec::canonical(d(1), 3.0, FRAC_PI_3).unwrap();
        let traj = sample(&spec, 2.0, 0.01).unwrap();
        assert!(traj.velocities().iter().all(|v| (v.eta() - 0.5).abs() < 1e-14));
    }

    #[test]
    fn residual_of_xi_line_is_zero() {
        let spec = CurveSpec::canonical(d(1), 1.5, 0.0).unwrap();
        let traj = sample(&spec, 1.0, 0.01).unwrap();
        assert!(lorentz_residual(&traj, 1.5).unwrap() <= 1e-10);
        assert!(lorentz_residual(&traj, -4.0).unwrap() <= 1e-10);
    }
}
