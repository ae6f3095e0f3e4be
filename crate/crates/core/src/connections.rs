//! Covariant differentiation along sampled curves.
//!
//! For a field `V = V^B e_B` along a curve with tangent `E₁ = E₁^A e_A`,
//!
//! ```text
//! ∇_{E₁} V = (dV^B/dt) e_B + E₁^A V^B ∇_{e_A} e_B,
//! ```
//!
//! with `dV^B/dt` taken by finite differences on the uniform grid and the
//! connection terms `∇_{e_A} e_B` read from a constant frame table. The
//! Tanaka-Webster connection is available through two independent routes:
//! the Levi-Civita result plus the correction
//! `η(X)φY + η(Y)φX − g(φX, Y)ξ`, and its own frame table (which vanishes).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_space::{metric, phi, Dimension, FrameIndex, FrameTangent};
use crate::trajectory::Trajectory;

/// Minimum number of grid nodes for the five-point stencils.
pub const MIN_STENCIL_NODES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConnectionKind {
    LeviCivita,
    TanakaWebster,
}

/// How a Tanaka-Webster derivative is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwRoute {
    /// Levi-Civita derivative plus the Sasakian correction terms.
    Correction,
    /// Direct use of the Tanaka-Webster frame table.
    FrameTable,
}

/// A vector field sampled at the nodes of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FieldAlongCurve {
    samples: Vec<FrameTangent>,
}

impl FieldAlongCurve {
    pub fn new(samples: Vec<FrameTangent>) -> Self {
        Self { samples }
    }

    /// The unit tangent E₁ of `traj`.
    pub fn tangent(traj: &Trajectory) -> Self {
        Self::new(traj.velocities().to_vec())
    }

    /// A field with the same frame components at every node.
    pub fn constant(v: &FrameTangent, nodes: usize) -> Self {
        Self::new(vec![v.clone(); nodes])
    }

    pub fn samples(&self) -> &[FrameTangent] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<FrameTangent> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn map(&self, f: impl Fn(&FrameTangent) -> FrameTangent) -> Self {
        Self::new(self.samples.iter().map(f).collect())
    }

    pub fn zip_map(
        &self,
        other: &Self,
        f: impl Fn(&FrameTangent, &FrameTangent) -> FrameTangent,
    ) -> Self {
        assert_eq!(self.len(), other.len(), "fields on different grids");
        Self::new(
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(x, y)| f(x, y))
                .collect(),
        )
    }
}

/// `∇_{e_a} e_b` for the Levi-Civita connection of ℝ^{2n+1}(−3).
///
/// Non-zero entries:
/// `∇_{X_i}X_{n+i} = ξ`, `∇_{X_{n+i}}X_i = −ξ`,
/// `∇_{X_i}ξ = ∇_ξ X_i = −X_{n+i}`, `∇_{X_{n+i}}ξ = ∇_ξ X_{n+i} = X_i`.
pub fn lc_frame_table(dim: Dimension, a: FrameIndex, b: FrameIndex) -> Result<FrameTangent> {
    a.slot(dim)?;
    b.slot(dim)?;
    use FrameIndex::*;
    let entry = match (a, b) {
        (X(i), PhiX(j)) if i == j => FrameTangent::xi(dim),
        (PhiX(i), X(j)) if i == j => -&FrameTangent::xi(dim),
        (X(i), Xi) | (Xi, X(i)) => -&FrameTangent::basis(dim, PhiX(i))?,
        (PhiX(i), Xi) | (Xi, PhiX(i)) => FrameTangent::basis(dim, X(i))?,
        _ => FrameTangent::zero(dim),
    };
    Ok(entry)
}

/// `∇̂_{e_a} e_b` for the Tanaka-Webster connection: identically zero in this frame.
pub fn tw_frame_table(dim: Dimension, a: FrameIndex, b: FrameIndex) -> Result<FrameTangent> {
    a.slot(dim)?;
    b.slot(dim)?;
    Ok(FrameTangent::zero(dim))
}

/// Dense connection coefficients `Γ^C_{AB}` = C-component of `∇_{e_A} e_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTable {
    dim: Dimension,
    gamma: Vec<f64>,
}

impl ConnectionTable {
    fn from_entries(
        dim: Dimension,
        entry: impl Fn(Dimension, FrameIndex, FrameIndex) -> Result<FrameTangent>,
    ) -> Self {
        let m = dim.manifold_dim();
        let idx = FrameIndex::all(dim);
        let mut gamma = vec![0.0; m * m * m];
        for (ai, &a) in idx.iter().enumerate() {
            for (bi, &b) in idx.iter().enumerate() {
                let e = entry(dim, a, b).expect("indices come from FrameIndex::all");
                for (ci, v) in e.to_flat().into_iter().enumerate() {
                    gamma[(ai * m + bi) * m + ci] = v;
                }
            }
        }
        Self { dim, gamma }
    }

    pub fn levi_civita(dim: Dimension) -> Self {
        Self::from_entries(dim, lc_frame_table)
    }

    pub fn tanaka_webster(dim: Dimension) -> Self {
        Self::from_entries(dim, tw_frame_table)
    }

    pub fn for_kind(dim: Dimension, kind: ConnectionKind) -> Self {
        match kind {
            ConnectionKind::LeviCivita => Self::levi_civita(dim),
            ConnectionKind::TanakaWebster => Self::tanaka_webster(dim),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// `Σ_{A,B} X^A Y^B ∇_{e_A} e_B` written into `out` (flat layout).
    pub fn contract_flat(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let m = self.dim.manifold_dim();
        out.iter_mut().for_each(|o| *o = 0.0);
        for (ai, &xa) in x.iter().enumerate() {
            if xa == 0.0 {
                continue;
            }
            for (bi, &yb) in y.iter().enumerate() {
                let w = xa * yb;
                if w == 0.0 {
                    continue;
                }
                let row = &self.gamma[(ai * m + bi) * m..(ai * m + bi + 1) * m];
                for (o, g) in out.iter_mut().zip(row) {
                    *o += w * g;
                }
            }
        }
    }

    pub fn contract(&self, x: &FrameTangent, y: &FrameTangent) -> FrameTangent {
        let mut out = vec![0.0; self.dim.manifold_dim()];
        self.contract_flat(&x.to_flat(), &y.to_flat(), &mut out);
        FrameTangent::from_flat(&out).expect("finite contraction")
    }
}

/// `η(X)φY + η(Y)φX − g(φX, Y)ξ`, the Tanaka-Webster minus Levi-Civita term.
pub fn tanaka_webster_correction(x: &FrameTangent, y: &FrameTangent) -> FrameTangent {
    let phi_x = phi(x);
    let mut out = phi(y).scaled(x.eta());
    out.add_scaled(y.eta(), &phi_x);
    out.c -= metric(&phi_x, y);
    out
}

/// `T̂(V, W) = 2 g(V, φW) ξ`.
pub fn torsion_tw(v: &FrameTangent, w: &FrameTangent) -> FrameTangent {
    FrameTangent::xi(v.dim()).scaled(2.0 * metric(v, &phi(w)))
}

/// Fourth-order finite-difference derivative of uniformly sampled values:
/// central five-point stencil inside, one-sided five-point stencils on the
/// two nodes at each end.
pub fn differentiate_scalar(values: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < MIN_STENCIL_NODES {
        return Err(Error::GridTooShort {
            nodes: n,
            required: MIN_STENCIL_NODES,
        });
    }
    let f = values;
    let s = 1.0 / (12.0 * dt);
    let mut out = vec![0.0; n];
    out[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    out[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for k in 2..n - 2 {
        out[k] = s * (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]);
    }
    let e = n - 1;
    out[e - 1] = -s * (-3.0 * f[e] - 10.0 * f[e - 1] + 18.0 * f[e - 2] - 6.0 * f[e - 3] + f[e - 4]);
    out[e] = -s * (-25.0 * f[e] + 48.0 * f[e - 1] - 36.0 * f[e - 2] + 16.0 * f[e - 3] - 3.0 * f[e - 4]);
    Ok(out)
}

/// Componentwise derivative of frame components.
pub fn differentiate(samples: &[FrameTangent], dt: f64) -> Result<Vec<FrameTangent>> {
    let n = samples.len();
    if n < MIN_STENCIL_NODES {
        return Err(Error::GridTooShort {
            nodes: n,
            required: MIN_STENCIL_NODES,
        });
    }
    let width = samples[0].n() * 2 + 1;
    let flats: Vec<Vec<f64>> = samples.iter().map(FrameTangent::to_flat).collect();
    let mut out = vec![vec![0.0; width]; n];
    let mut column = vec![0.0; n];
    for j in 0..width {
        for (c, f) in column.iter_mut().zip(&flats) {
            *c = f[j];
        }
        for (o, d) in out.iter_mut().zip(differentiate_scalar(&column, dt)?) {
            o[j] = d;
        }
    }
    out.iter()
        .map(|f| FrameTangent::from_flat(f))
        .collect::<Result<Vec<_>>>()
}

/// Nodes where the central stencil applies.
pub fn interior_nodes(len: usize) -> std::ops::Range<usize> {
    2..len.saturating_sub(2).max(2)
}

fn check_field(traj: &Trajectory, field: &FieldAlongCurve) -> Result<()> {
    if traj.len() < MIN_STENCIL_NODES {
        return Err(Error::GridTooShort {
            nodes: traj.len(),
            required: MIN_STENCIL_NODES,
        });
    }
    if field.len() != traj.len() {
        return Err(Error::FieldLength {
            expected: traj.len(),
            found: field.len(),
        });
    }
    Ok(())
}

fn covariant_with_table(
    traj: &Trajectory,
    field: &FieldAlongCurve,
    table: &ConnectionTable,
) -> Result<Vec<FrameTangent>> {
    let mut out = differentiate(field.samples(), traj.dt())?;
    for ((d, e1), v) in out.iter_mut().zip(traj.velocities()).zip(field.samples()) {
        *d += &table.contract(e1, v);
    }
    Ok(out)
}

/// `∇_{E₁} V` along `traj`. Tanaka-Webster derivatives use the frame table.
pub fn covariant_along(
    traj: &Trajectory,
    field: &FieldAlongCurve,
    kind: ConnectionKind,
) -> Result<FieldAlongCurve> {
    match kind {
        ConnectionKind::LeviCivita => {
            check_field(traj, field)?;
            let table = ConnectionTable::levi_civita(traj.dim());
            covariant_with_table(traj, field, &table).map(FieldAlongCurve::new)
        }
        ConnectionKind::TanakaWebster => covariant_tw(traj, field, TwRoute::FrameTable),
    }
}

/// `∇̂_{E₁} V` along `traj`, evaluated by the chosen route.
pub fn covariant_tw(
    traj: &Trajectory,
    field: &FieldAlongCurve,
    route: TwRoute,
) -> Result<FieldAlongCurve> {
    check_field(traj, field)?;
    let out = match route {
        TwRoute::FrameTable => {
            covariant_with_table(traj, field, &ConnectionTable::tanaka_webster(traj.dim()))?
        }
        TwRoute::Correction => {
            let mut lc =
                covariant_with_table(traj, field, &ConnectionTable::levi_civita(traj.dim()))?;
            for ((d, e1), v) in lc.iter_mut().zip(traj.velocities()).zip(field.samples()) {
                *d += &tanaka_webster_correction(e1, v);
            }
            lc
        }
    };
    Ok(FieldAlongCurve::new(out))
}
