//! Randomized audit of the contact structure and the connections.
//!
//! Each property draws seeded random inputs, measures the worst violation and
//! compares it with a fixed tolerance. The φ action is injectable so that a
//! deliberately broken structure can be shown to fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_form::{sample, CurveSpec};
use crate::connections::{
    covariant_along, covariant_tw, differentiate_scalar, interior_nodes, lc_frame_table,
    tanaka_webster_correction, ConnectionKind, FieldAlongCurve, TwRoute,
};
use crate::error::Result;
use crate::model_space::{
    eta_coefficients, metric, to_coord, to_frame, CoordTangent, Dimension, FrameIndex,
    FrameTangent, Point,
};
use crate::trajectory::Trajectory;

pub type PhiMap = fn(&FrameTangent) -> FrameTangent;

/// A φ with the sign of the `X_{n+i} ↦ −X_i` block flipped; fails φ² = −I + η⊗ξ.
pub fn corrupted_phi(v: &FrameTangent) -> FrameTangent {
    FrameTangent {
        a: v.b.clone(),
        b: v.a.clone(),
        c: 0.0,
    }
}

/// All property names in run order.
pub const PROPERTIES: &[&str] = &[
    "phi_squared",
    "eta_phi_vanishes",
    "compatible_metric",
    "phi_norm",
    "two_form_antisymmetric",
    "torsion_antisymmetric",
    "frame_roundtrip",
    "contact_d_eta",
    "lc_table_metric",
    "tw_table_vanishes",
    "tw_routes_agree",
    "tw_metricity",
    "tw_phi_parallel",
    "tw_xi_parallel",
    "lc_metricity",
];

#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub seed: u64,
    /// Random inputs per algebraic property.
    pub samples: usize,
    pub phi: PhiMap,
    /// Restrict to these property names; `None` runs everything.
    pub only: Option<Vec<String>>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 1000,
            phi: crate::model_space::phi,
            only: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub seed: u64,
    pub samples: usize,
    pub properties: Vec<PropertyOutcome>,
    pub passed: bool,
}

fn random_dim(rng: &mut ChaCha8Rng) -> Dimension {
    Dimension::new(rng.gen_range(1..=3)).expect("n ≥ 1")
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn random_frame(rng: &mut ChaCha8Rng, dim: Dimension) -> FrameTangent {
    let n = dim.n();
    FrameTangent {
        a: random_vec(rng, n, 2.0),
        b: random_vec(rng, n, 2.0),
        c: rng.gen_range(-2.0..2.0),
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: Dimension) -> FrameTangent {
    loop {
        let v = random_frame(rng, dim);
        let norm = v.norm();
        if norm > 1e-3 {
            return v.scaled(1.0 / norm);
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, dim: Dimension) -> Point {
    let n = dim.n();
    Point {
        x: random_vec(rng, n, 5.0),
        y: random_vec(rng, n, 5.0),
        z: rng.gen_range(-5.0..5.0),
    }
}

fn coord_basis(dim: Dimension, slot: usize) -> CoordTangent {
    let mut flat = vec![0.0; dim.manifold_dim()];
    flat[slot] = 1.0;
    let n = dim.n();
    CoordTangent {
        u: flat[..n].to_vec(),
        v: flat[n..2 * n].to_vec(),
        w: flat[2 * n],
    }
}

/// Smooth field with components `Σ A sin(ωt + φ)`.
fn random_field(rng: &mut ChaCha8Rng, traj: &Trajectory) -> FieldAlongCurve {
    let m = traj.dim().manifold_dim();
    let params: Vec<(f64, f64, f64)> = (0..m)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    FieldAlongCurve::new(
        traj.times()
            .iter()
            .map(|&t| {
                let flat: Vec<f64> = params.iter().map(|(a, w, p)| a * (w * t + p).sin()).collect();
                FrameTangent::from_flat(&flat).expect("finite field")
            })
            .collect(),
    )
}

fn random_trajectory(rng: &mut ChaCha8Rng) -> Result<Trajectory> {
    let dim = random_dim(rng);
    let mut q = rng.gen_range(-3.0..3.0);
    if f64::abs(q) < 0.2 {
        q = 1.0;
    }
    let theta = rng.gen_range(0.2..std::f64::consts::PI - 0.2);
    let spec = CurveSpec::canonical(dim, q, theta)?;
    sample(&spec, 2.0, 1e-3)
}

struct Runner {
    config: AuditConfig,
    rng: ChaCha8Rng,
    outcomes: Vec<PropertyOutcome>,
}

impl Runner {
    fn wants(&self, name: &str) -> bool {
        self.config
            .only
            .as_ref()
            .is_none_or(|only| only.iter().any(|o| o == name))
    }

    fn record(&mut self, name: &str, worst: f64, tolerance: f64) {
        self.outcomes.push(PropertyOutcome {
            name: name.to_string(),
            passed: worst <= tolerance,
            worst,
            tolerance,
        });
    }

    /// Worst value of `check` over the configured number of random draws.
    fn sweep(&mut self, mut check: impl FnMut(&mut ChaCha8Rng, PhiMap) -> f64) -> f64 {
        let phi = self.config.phi;
        (0..self.config.samples).fold(0.0_f64, |m, _| {
            let v = check(&mut self.rng, phi);
            if v.is_nan() {
                f64::INFINITY
            } else {
                m.max(v)
            }
        })
    }

    fn algebraic(&mut self, name: &str, tol: f64, check: impl FnMut(&mut ChaCha8Rng, PhiMap) -> f64) {
        if self.wants(name) {
            let worst = self.sweep(check);
            self.record(name, worst, tol);
        }
    }
}

/// Runs the audit.
pub fn run_audit(config: AuditConfig) -> Result<AuditReport> {
    let mut r = Runner {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        config,
        outcomes: Vec::new(),
    };

    r.algebraic("phi_squared", 1e-12, |rng, phi| {
        let d = random_dim(rng);
        let v = random_frame(rng, d);
        let mut expected = -&v;
        expected.c += v.eta();
        (&phi(&phi(&v)) - &expected).max_abs()
    });
    r.algebraic("eta_phi_vanishes", 1e-12, |rng, phi| {
        let d = random_dim(rng);
        let v = random_frame(rng, d);
        let xi = FrameTangent::xi(d);
        phi(&v)
            .eta()
            .abs()
            .max(phi(&xi).max_abs())
            .max((xi.eta() - 1.0).abs())
    });
    r.algebraic("compatible_metric", 1e-12, |rng, phi| {
        let d = random_dim(rng);
        let (v, w) = (random_frame(rng, d), random_frame(rng, d));
        let g = metric(&v, &w);
        (g - metric(&phi(&v), &phi(&w)) - v.eta() * w.eta()).abs() / g.abs().max(1.0)
    });
    r.algebraic("phi_norm", 1e-12, |rng, phi| {
        let d = random_dim(rng);
        let e = random_unit(rng, d);
        let pe = phi(&e);
        (metric(&pe, &pe) - (1.0 - e.eta() * e.eta())).abs()
    });
    r.algebraic("two_form_antisymmetric", 1e-12, |rng, phi| {
        let d = random_dim(rng);
        let (v, w) = (random_frame(rng, d), random_frame(rng, d));
        let omega = |x: &FrameTangent, y: &FrameTangent| metric(x, &phi(y));
        (omega(&v, &w) + omega(&w, &v))
            .abs()
            .max(omega(&v, &FrameTangent::xi(d)).abs())
    });
    r.algebraic("torsion_antisymmetric", 1e-12, |rng, phi| {
        let d = random_dim(rng);
        let (v, w) = (random_frame(rng, d), random_frame(rng, d));
        let torsion = |x: &FrameTangent, y: &FrameTangent| FrameTangent::xi(d).scaled(2.0 * metric(x, &phi(y)));
        (&torsion(&v, &w) + &torsion(&w, &v))
            .max_abs()
            .max(torsion(&FrameTangent::xi(d), &v).max_abs())
            .max(torsion(&v, &v).max_abs())
    });
    r.algebraic("frame_roundtrip", 1e-12, |rng, _| {
        let d = random_dim(rng);
        let p = random_point(rng, d);
        let v = random_frame(rng, d);
        let back = to_frame(&p, &to_coord(&p, &v));
        let w = to_coord(&p, &v);
        let w_back = to_coord(&p, &to_frame(&p, &w));
        let coord_err = w
            .to_flat()
            .iter()
            .zip(w_back.to_flat())
            .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs() / x.abs().max(1.0)));
        (&back - &v).max_abs().max(coord_err)
    });
    // dη(∂_A, ∂_B) = ½(∂_A η_B − ∂_B η_A) against Ω(∂_A, ∂_B) = g(∂_A, φ∂_B)
    r.algebraic("contact_d_eta", 1e-6, |rng, phi| {
        let d = random_dim(rng);
        let p = random_point(rng, d);
        let m = d.manifold_dim();
        let (ia, ib) = (rng.gen_range(0..m), rng.gen_range(0..m));
        let h = 1e-4;
        let coeff = |pt: &Point, slot: usize| {
            let (ex, ey, ez) = eta_coefficients(pt);
            ex.into_iter().chain(ey).chain(std::iter::once(ez)).nth(slot).expect("slot < 2n+1")
        };
        let partial = |along: usize, of: usize| {
            let mut fp = p.to_flat();
            let mut fm = p.to_flat();
            fp[along] += h;
            fm[along] -= h;
            let pp = Point::from_flat(&fp).expect("finite");
            let pm = Point::from_flat(&fm).expect("finite");
            (coeff(&pp, of) - coeff(&pm, of)) / (2.0 * h)
        };
        let d_eta = 0.5 * (partial(ia, ib) - partial(ib, ia));
        let ea = to_frame(&p, &coord_basis(d, ia));
        let eb = to_frame(&p, &coord_basis(d, ib));
        (d_eta - metric(&ea, &phi(&eb))).abs()
    });

    if r.wants("lc_table_metric") {
        let mut worst = 0.0_f64;
        for n in 1..=3 {
            let d = Dimension::new(n)?;
            let all = FrameIndex::all(d);
            for &a in &all {
                for &b in &all {
                    for &c in &all {
                        let eb = FrameTangent::basis(d, b)?;
                        let ec = FrameTangent::basis(d, c)?;
                        let s = metric(&lc_frame_table(d, a, b)?, &ec)
                            + metric(&eb, &lc_frame_table(d, a, c)?);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        r.record("lc_table_metric", worst, 1e-12);
    }
    if r.wants("tw_table_vanishes") {
        let mut worst = 0.0_f64;
        for n in 1..=3 {
            let d = Dimension::new(n)?;
            for a in FrameIndex::all(d) {
                for b in FrameIndex::all(d) {
                    let ea = FrameTangent::basis(d, a)?;
                    let eb = FrameTangent::basis(d, b)?;
                    let tw = &lc_frame_table(d, a, b)? + &tanaka_webster_correction(&ea, &eb);
                    worst = worst.max(tw.max_abs());
                }
            }
        }
        r.record("tw_table_vanishes", worst, 1e-12);
    }

    let along = [
        ("tw_routes_agree", 1e-7),
        ("tw_metricity", 1e-6),
        ("tw_phi_parallel", 1e-6),
        ("tw_xi_parallel", 0.0),
        ("lc_metricity", 1e-6),
    ];
    if along.iter().any(|(name, _)| r.wants(name)) {
        let mut worst = [0.0_f64; 5];
        for _ in 0..4 {
            let traj = random_trajectory(&mut r.rng)?;
            let v = random_field(&mut r.rng, &traj);
            let w = random_field(&mut r.rng, &traj);
            let checks = along_curve_defects(&traj, &v, &w)?;
            for (slot, val) in worst.iter_mut().zip(checks) {
                *slot = slot.max(val);
            }
        }
        for ((name, tol), val) in along.iter().zip(worst) {
            if r.wants(name) {
                r.record(name, val, *tol);
            }
        }
    }

    let passed = r.outcomes.iter().all(|o| o.passed);
    Ok(AuditReport {
        seed: r.config.seed,
        samples: r.config.samples,
        properties: r.outcomes,
        passed,
    })
}

/// Defects along one trajectory, in the order: route agreement, ∇̂g, ∇̂φ,
/// ∇̂ξ, ∇g.
pub fn along_curve_defects(
    traj: &Trajectory,
    v: &FieldAlongCurve,
    w: &FieldAlongCurve,
) -> Result<[f64; 5]> {
    let interior = interior_nodes(traj.len());
    let tw_v = covariant_tw(traj, v, TwRoute::FrameTable)?;
    let tw_v_alt = covariant_tw(traj, v, TwRoute::Correction)?;
    let tw_w = covariant_along(traj, w, ConnectionKind::TanakaWebster)?;
    let lc_v = covariant_along(traj, v, ConnectionKind::LeviCivita)?;
    let lc_w = covariant_along(traj, w, ConnectionKind::LeviCivita)?;

    let routes = interior
        .clone()
        .map(|k| (&tw_v.samples()[k] - &tw_v_alt.samples()[k]).max_abs())
        .fold(0.0_f64, f64::max);

    let g: Vec<f64> = v
        .samples()
        .iter()
        .zip(w.samples())
        .map(|(a, b)| metric(a, b))
        .collect();
    let dg = differentiate_scalar(&g, traj.dt())?;
    let metricity = |dv: &FieldAlongCurve, dw: &FieldAlongCurve| {
        interior
            .clone()
            .map(|k| {
                (dg[k] - metric(&dv.samples()[k], &w.samples()[k]) - metric(&v.samples()[k], &dw.samples()[k])).abs()
            })
            .fold(0.0_f64, f64::max)
    };
    let tw_metric = metricity(&tw_v, &tw_w);
    let lc_metric = metricity(&lc_v, &lc_w);

    let phi_v = v.map(crate::model_space::phi);
    let tw_phi_v = covariant_along(traj, &phi_v, ConnectionKind::TanakaWebster)?;
    let phi_parallel = interior
        .clone()
        .map(|k| (&tw_phi_v.samples()[k] - &crate::model_space::phi(&tw_v.samples()[k])).max_abs())
        .fold(0.0_f64, f64::max);

    let xi = FieldAlongCurve::constant(&FrameTangent::xi(traj.dim()), traj.len());
    let xi_parallel = covariant_along(traj, &xi, ConnectionKind::TanakaWebster)?
        .samples()
        .iter()
        .map(FrameTangent::max_abs)
        .fold(0.0_f64, f64::max);

    Ok([routes, tw_metric, phi_parallel, xi_parallel, lc_metric])
}
