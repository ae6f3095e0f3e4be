//! Fixed-step RK4 integration of the normal magnetic curve equation.
//!
//! The state is `(x, y, z, a, b, c)`: coordinates of the point and frame
//! components of the unit tangent E₁. With the Tanaka-Webster frame table
//! vanishing, `∇̂_{E₁}E₁ = (−q + 2η(E₁))φE₁` is the block rotation
//!
//! ```text
//! a_i' = (q − 2c) b_i,   b_i' = (2c − q) a_i,   c' = 0,
//! ```
//!
//! and the point moves by `to_coord(p, E₁)`.

use crate::connections::ConnectionTable;
use crate::error::{Error, Result};
use crate::model_space::{phi, to_coord, CoordTangent, Dimension, FrameTangent, Point};
use crate::trajectory::Trajectory;

/// Allowed |g(v0, v0) − 1| for an initial velocity.
pub const UNIT_SPEED_TOL: f64 = 1e-12;
/// Drift beyond which integration aborts.
pub const ABORT_DRIFT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MagneticIvp {
    dim: Dimension,
    q: f64,
    p0: Point,
    v0: FrameTangent,
    t_max: f64,
    dt: f64,
}

impl MagneticIvp {
    pub fn new(q: f64, p0: Point, v0: FrameTangent, t_max: f64, dt: f64) -> Result<Self> {
        let dim = Dimension::new(p0.n())?;
        if v0.n() != dim.n() {
            return Err(Error::DimensionMismatch {
                expected: dim.n(),
                found: v0.n(),
            });
        }
        if !q.is_finite() || q == 0.0 {
            return Err(Error::InvalidIvp(
                "magnetic strength q must be finite and non-zero".into(),
            ));
        }
        let speed = v0.dot(&v0);
        if (speed - 1.0).abs() > UNIT_SPEED_TOL {
            return Err(Error::InvalidIvp(format!(
                "initial velocity must be unit: g(v0, v0) = {speed}"
            )));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidIvp("tmax must be positive".into()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidIvp("dt must be positive".into()));
        }
        if dt > t_max {
            return Err(Error::InvalidIvp(format!(
                "dt = {dt} exceeds tmax = {t_max}"
            )));
        }
        Ok(Self {
            dim,
            q,
            p0,
            v0,
            t_max,
            dt,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p0(&self) -> &Point {
        &self.p0
    }

    pub fn v0(&self) -> &FrameTangent {
        &self.v0
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of steps; the last node is the largest `k·dt ≤ tmax`.
    pub fn steps(&self) -> usize {
        (self.t_max / self.dt * (1.0 + 1e-12)).floor() as usize
    }

    /// `λ = q − 2cosθ` with cosθ = η(v0).
    pub fn lambda(&self) -> f64 {
        self.q - 2.0 * self.v0.eta()
    }
}

/// Position rate and velocity rate of the magnetic flow at `(p, v)`.
pub fn lorentz_rhs(p: &Point, v: &FrameTangent, q: f64) -> (CoordTangent, FrameTangent) {
    let rate = (-q + 2.0 * v.eta()) * &phi(v);
    (to_coord(p, v), rate)
}

/// Flat-state right-hand side: writes `d(state)/dt` into `out`.
fn magnetic_rhs_flat(n: usize, q: f64, s: &[f64], out: &mut [f64]) {
    let (y, c) = (&s[n..2 * n], s[4 * n + 1]);
    let (a, b) = (&s[2 * n + 1..3 * n + 1], &s[3 * n + 1..4 * n + 1]);
    let k = q - 2.0 * c;
    let mut twist = 0.0;
    for i in 0..n {
        out[i] = 2.0 * b[i];
        out[n + i] = 2.0 * a[i];
        twist += b[i] * y[i];
        out[2 * n + 1 + i] = k * b[i];
        out[3 * n + 1 + i] = -k * a[i];
    }
    out[2 * n] = 2.0 * c + 2.0 * twist;
    out[4 * n + 1] = 0.0;
}

/// One classical RK4 step of size `h`, in place.
fn rk4_step(
    state: &mut [f64],
    h: f64,
    rhs: &mut impl FnMut(&[f64], &mut [f64]),
    scratch: &mut Rk4Scratch,
) {
    let Rk4Scratch { k1, k2, k3, k4, tmp } = scratch;
    rhs(state, k1);
    for ((t, s), k) in tmp.iter_mut().zip(state.iter()).zip(k1.iter()) {
        *t = s + 0.5 * h * k;
    }
    rhs(tmp, k2);
    for ((t, s), k) in tmp.iter_mut().zip(state.iter()).zip(k2.iter()) {
        *t = s + 0.5 * h * k;
    }
    rhs(tmp, k3);
    for ((t, s), k) in tmp.iter_mut().zip(state.iter()).zip(k3.iter()) {
        *t = s + h * k;
    }
    rhs(tmp, k4);
    for (i, s) in state.iter_mut().enumerate() {
        *s += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

struct Rk4Scratch {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Scratch {
    fn new(len: usize) -> Self {
        Self {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            tmp: vec![0.0; len],
        }
    }
}

fn split_state(n: usize, s: &[f64]) -> Result<(Point, FrameTangent)> {
    let m = 2 * n + 1;
    Ok((Point::from_flat(&s[..m])?, FrameTangent::from_flat(&s[m..])?))
}

fn check_node(node: usize, v: &FrameTangent, v0: &FrameTangent) -> Result<()> {
    let speed = (v.dot(v) - 1.0).abs();
    if speed > ABORT_DRIFT {
        return Err(Error::InvariantBreach {
            node,
            quantity: "unit speed",
            drift: speed,
        });
    }
    let slant = (v.eta() - v0.eta()).abs();
    if slant > ABORT_DRIFT {
        return Err(Error::InvariantBreach {
            node,
            quantity: "contact angle",
            drift: slant,
        });
    }
    Ok(())
}

fn run(ivp: &MagneticIvp, mut rhs: impl FnMut(&[f64], &mut [f64])) -> Result<Trajectory> {
    let n = ivp.dim.n();
    let steps = ivp.steps();
    let mut state = ivp.p0.to_flat();
    state.extend(ivp.v0.to_flat());
    let mut scratch = Rk4Scratch::new(state.len());

    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    let mut velocities = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push(ivp.p0.clone());
    velocities.push(ivp.v0.clone());
    for k in 1..=steps {
        rk4_step(&mut state, ivp.dt, &mut rhs, &mut scratch);
        if state.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("integrator state"));
        }
        let (p, v) = split_state(n, &state)?;
        check_node(k, &v, &ivp.v0)?;
        times.push(k as f64 * ivp.dt);
        points.push(p);
        velocities.push(v);
    }
    Trajectory::new(times, points, velocities, ivp.q)
}

/// Integrates the magnetic flow from `ivp` with fixed-step RK4.
pub fn integrate(ivp: &MagneticIvp) -> Result<Trajectory> {
    let (n, q) = (ivp.dim.n(), ivp.q);
    run(ivp, |s, out| magnetic_rhs_flat(n, q, s, out))
}

/// `Σ_{A,B} E₁^A E₁^B ∇_{e_A} e_B` for the Levi-Civita connection.
pub fn lc_connection_term(table: &ConnectionTable, e1: &FrameTangent) -> FrameTangent {
    table.contract(e1, e1)
}

/// Integrates `∇_{E₁}E₁ = −qφE₁` with the Levi-Civita connection terms
/// assembled from the frame table, as an independent check on [`integrate`].
pub fn integrate_lc_crosscheck(ivp: &MagneticIvp) -> Result<Trajectory> {
    let n = ivp.dim.n();
    let m = 2 * n + 1;
    let q = ivp.q;
    let table = ConnectionTable::levi_civita(ivp.dim);
    let mut gamma = vec![0.0; m];
    run(ivp, move |s, out| {
        let (y, e1) = (&s[n..2 * n], &s[m..]);
        let (a, b, c) = (&e1[..n], &e1[n..2 * n], e1[2 * n]);
        let mut twist = 0.0;
        for i in 0..n {
            out[i] = 2.0 * b[i];
            out[n + i] = 2.0 * a[i];
            twist += b[i] * y[i];
        }
        out[2 * n] = 2.0 * c + 2.0 * twist;
        // dE₁/dt = −qφE₁ − Γ(E₁, E₁)
        table.contract_flat(e1, e1, &mut gamma);
        for i in 0..n {
            out[m + i] = q * b[i] - gamma[i];
            out[m + n + i] = -q * a[i] - gamma[n + i];
        }
        out[m + 2 * n] = -gamma[2 * n];
    })
}
