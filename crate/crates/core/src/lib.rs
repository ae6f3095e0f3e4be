//! Pseudo-Hermitian magnetic curves in the Sasakian space form ℝ^{2n+1}(−3).
//!
//! The crate builds the contact metric structure of ℝ^{2n+1}(−3), covariant
//! derivatives along sampled curves for the Levi-Civita and Tanaka-Webster
//! connections, an RK4 integrator for the magnetic (Lorentz) equation, the
//! closed-form magnetic curves, a Frenet-frame estimator, and the
//! classification of magnetic curves into geodesics, Legendre circles and
//! slant helices.

pub mod audit;
pub mod classifier;
pub mod closed_form;
pub mod connections;
pub mod error;
pub mod frenet;
pub mod integrator;
pub mod model_space;
pub mod tolerance;
pub mod trajectory;

pub use classifier::{classify, roundtrip_check, strength_for_phi_helix, Branch, Classification, HelixData, Strength};
pub use closed_form::{generate, lorentz_residual, sample, CurveEval, CurveSpec};
pub use connections::{covariant_along, torsion_tw, ConnectionKind, FieldAlongCurve};
pub use error::{Error, Result};
pub use frenet::{frame_formula_residuals, frenet_apparatus, FrenetReport};
pub use integrator::{integrate, integrate_lc_crosscheck, MagneticIvp};
pub use model_space::{CoordTangent, Dimension, FrameTangent, Point};
pub use tolerance::ToleranceProfile;
pub use trajectory::Trajectory;
