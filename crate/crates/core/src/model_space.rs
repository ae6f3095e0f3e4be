//! Contact metric structure of the Sasakian space form ℝ^{2n+1}(−3).
//!
//! Coordinates are `(x_1..x_n, y_1..y_n, z)` with
//!
//! ```text
//! η = ½(dz − Σ y_i dx_i),    ξ = 2∂/∂z,
//! g = η⊗η + ¼ Σ (dx_i² + dy_i²),
//! ```
//!
//! and the g-orthonormal frame
//!
//! ```text
//! X_i = 2∂/∂y_i,   X_{n+i} = φX_i = 2(∂/∂x_i + y_i ∂/∂z),   ξ = 2∂/∂z.
//! ```
//!
//! All tensor algebra is done on [`FrameTangent`] components: in the frame the
//! metric is the Euclidean dot product and φ is the constant block rotation
//! `(a, b, c) ↦ (−b, a, 0)`. Coordinate components ([`CoordTangent`]) only
//! appear at I/O boundaries and in the closed-form parametrizations.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The structural operator `h = ½ L_ξ φ` vanishes identically on a Sasakian
/// manifold, so the Tanaka-Webster connection and its torsion are used in
/// their reduced forms throughout the crate.
pub const STRUCTURE_OPERATOR_H_IS_ZERO: bool = true;

/// Half-dimension `n` of the manifold ℝ^{2n+1}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension);
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn n(self) -> usize {
        self.0
    }

    /// `2n + 1`.
    #[inline]
    pub fn manifold_dim(self) -> usize {
        2 * self.0 + 1
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        Self::new(n)
    }
}

impl From<Dimension> for usize {
    fn from(d: Dimension) -> usize {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn all_finite(xs: &[f64]) -> bool {
    xs.iter().all(|x| x.is_finite())
}

/// A point `(x, y, z)` of ℝ^{2n+1}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: f64,
}

impl Point {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        if !all_finite(&x) || !all_finite(&y) || !z.is_finite() {
            return Err(Error::NonFinite("point"));
        }
        Ok(Self { x, y, z })
    }

    pub fn origin(dim: Dimension) -> Self {
        Self {
            x: vec![0.0; dim.n()],
            y: vec![0.0; dim.n()],
            z: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Flattened `(x_1..x_n, y_1..y_n, z)`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.n() + 1);
        out.extend_from_slice(&self.x);
        out.extend_from_slice(&self.y);
        out.push(self.z);
        out
    }

    /// Inverse of [`Point::to_flat`]; `flat.len()` must be odd and at least 3.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let n = split_len(flat.len())?;
        Self::new(flat[..n].to_vec(), flat[n..2 * n].to_vec(), flat[2 * n])
    }
}

fn split_len(len: usize) -> Result<usize> {
    if len < 3 || len.is_multiple_of(2) {
        return Err(Error::InvalidDimension);
    }
    Ok((len - 1) / 2)
}

/// Tangent vector in coordinate components:
/// `u_i ∂/∂x_i + v_i ∂/∂y_i + w ∂/∂z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoordTangent {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: f64,
}

impl CoordTangent {
    pub fn new(u: Vec<f64>, v: Vec<f64>, w: f64) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        if !all_finite(&u) || !all_finite(&v) || !w.is_finite() {
            return Err(Error::NonFinite("coordinate tangent"));
        }
        Ok(Self { u, v, w })
    }

    pub fn zero(dim: Dimension) -> Self {
        Self {
            u: vec![0.0; dim.n()],
            v: vec![0.0; dim.n()],
            w: 0.0,
        }
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.n() + 1);
        out.extend_from_slice(&self.u);
        out.extend_from_slice(&self.v);
        out.push(self.w);
        out
    }

    /// `η(V) = ½(w − Σ y_i u_i)` at `p`.
    pub fn eta_at(&self, p: &Point) -> f64 {
        let twist: f64 = p.y.iter().zip(&self.u).map(|(y, u)| y * u).sum();
        0.5 * (self.w - twist)
    }
}

/// Label of a frame field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameIndex {
    /// `X_{i+1} = 2∂/∂y_{i+1}` (zero-based `i`).
    X(usize),
    /// `X_{n+i+1} = φX_{i+1}` (zero-based `i`).
    PhiX(usize),
    Xi,
}

impl FrameIndex {
    /// All `2n + 1` frame labels, in storage order.
    pub fn all(dim: Dimension) -> Vec<FrameIndex> {
        let n = dim.n();
        (0..n)
            .map(FrameIndex::X)
            .chain((0..n).map(FrameIndex::PhiX))
            .chain(std::iter::once(FrameIndex::Xi))
            .collect()
    }

    /// Position in the flat `(a, b, c)` layout.
    pub fn slot(self, dim: Dimension) -> Result<usize> {
        let n = dim.n();
        match self {
            FrameIndex::X(i) if i < n => Ok(i),
            FrameIndex::PhiX(i) if i < n => Ok(n + i),
            FrameIndex::Xi => Ok(2 * n),
            other => Err(Error::InvalidFrameIndex {
                index: other.to_string(),
                n,
            }),
        }
    }
}

impl fmt::Display for FrameIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameIndex::X(i) => write!(f, "X_{}", i + 1),
            FrameIndex::PhiX(i) => write!(f, "X_(n+{})", i + 1),
            FrameIndex::Xi => write!(f, "ξ"),
        }
    }
}

/// Tangent vector in the g-orthonormal frame:
/// `a_i X_i + b_i X_{n+i} + c ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameTangent {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl FrameTangent {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidDimension);
        }
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        if !all_finite(&a) || !all_finite(&b) || !c.is_finite() {
            return Err(Error::NonFinite("frame tangent"));
        }
        Ok(Self { a, b, c })
    }

    pub fn zero(dim: Dimension) -> Self {
        Self {
            a: vec![0.0; dim.n()],
            b: vec![0.0; dim.n()],
            c: 0.0,
        }
    }

    /// The characteristic field ξ.
    pub fn xi(dim: Dimension) -> Self {
        let mut v = Self::zero(dim);
        v.c = 1.0;
        v
    }

    pub fn basis(dim: Dimension, index: FrameIndex) -> Result<Self> {
        let slot = index.slot(dim)?;
        let mut flat = vec![0.0; dim.manifold_dim()];
        flat[slot] = 1.0;
        Self::from_flat(&flat)
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> Dimension {
        Dimension(self.a.len())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.n() + 1);
        out.extend_from_slice(&self.a);
        out.extend_from_slice(&self.b);
        out.push(self.c);
        out
    }

    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        let n = split_len(flat.len())?;
        Self::new(flat[..n].to_vec(), flat[n..2 * n].to_vec(), flat[2 * n])
    }

    /// Component along a frame field.
    pub fn component(&self, index: FrameIndex) -> Result<f64> {
        let slot = index.slot(self.dim())?;
        let n = self.n();
        Ok(if slot < n {
            self.a[slot]
        } else if slot < 2 * n {
            self.b[slot - n]
        } else {
            self.c
        })
    }

    /// `η(V)`, the ξ-component.
    #[inline]
    pub fn eta(&self) -> f64 {
        self.c
    }

    pub fn dot(&self, other: &Self) -> f64 {
        metric(self, other)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn phi(&self) -> Self {
        phi(self)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a.iter().map(|x| s * x).collect(),
            b: self.b.iter().map(|x| s * x).collect(),
            c: s * self.c,
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &Self) {
        assert_eq!(self.n(), other.n(), "frame tangents of different dimension");
        for (x, y) in self.a.iter_mut().zip(&other.a) {
            *x += s * y;
        }
        for (x, y) in self.b.iter_mut().zip(&other.b) {
            *x += s * y;
        }
        self.c += s * other.c;
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.b)
            .chain(std::iter::once(&self.c))
            .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

impl Add for &FrameTangent {
    type Output = FrameTangent;
    fn add(self, rhs: &FrameTangent) -> FrameTangent {
        let mut out = self.clone();
        out.add_scaled(1.0, rhs);
        out
    }
}

impl Sub for &FrameTangent {
    type Output = FrameTangent;
    fn sub(self, rhs: &FrameTangent) -> FrameTangent {
        let mut out = self.clone();
        out.add_scaled(-1.0, rhs);
        out
    }
}

impl AddAssign<&FrameTangent> for FrameTangent {
    fn add_assign(&mut self, rhs: &FrameTangent) {
        self.add_scaled(1.0, rhs);
    }
}

impl Mul<&FrameTangent> for f64 {
    type Output = FrameTangent;
    fn mul(self, rhs: &FrameTangent) -> FrameTangent {
        rhs.scaled(self)
    }
}

impl Neg for &FrameTangent {
    type Output = FrameTangent;
    fn neg(self) -> FrameTangent {
        self.scaled(-1.0)
    }
}

/// Coordinate components to frame components at `p`.
pub fn to_frame(p: &Point, v: &CoordTangent) -> FrameTangent {
    assert_eq!(p.n(), v.n(), "point and tangent of different dimension");
    let twist: f64 = v.u.iter().zip(&p.y).map(|(u, y)| u * y).sum();
    FrameTangent {
        a: v.v.iter().map(|x| 0.5 * x).collect(),
        b: v.u.iter().map(|x| 0.5 * x).collect(),
        c: 0.5 * (v.w - twist),
    }
}

/// Frame components to coordinate components at `p`.
pub fn to_coord(p: &Point, v: &FrameTangent) -> CoordTangent {
    assert_eq!(p.n(), v.n(), "point and tangent of different dimension");
    let twist: f64 = v.b.iter().zip(&p.y).map(|(b, y)| b * y).sum();
    CoordTangent {
        u: v.b.iter().map(|x| 2.0 * x).collect(),
        v: v.a.iter().map(|x| 2.0 * x).collect(),
        w: 2.0 * v.c + 2.0 * twist,
    }
}

/// The metric g; in frame components it is the Euclidean dot product.
pub fn metric(v: &FrameTangent, w: &FrameTangent) -> f64 {
    assert_eq!(v.n(), w.n(), "frame tangents of different dimension");
    let ab: f64 = v
        .a
        .iter()
        .zip(&w.a)
        .chain(v.b.iter().zip(&w.b))
        .map(|(x, y)| x * y)
        .sum();
    ab + v.c * w.c
}

/// φ(a, b, c) = (−b, a, 0).
pub fn phi(v: &FrameTangent) -> FrameTangent {
    FrameTangent {
        a: v.b.iter().map(|x| -x).collect(),
        b: v.a.clone(),
        c: 0.0,
    }
}

/// Ω(V, W) = g(V, φW).
pub fn fundamental_two_form(v: &FrameTangent, w: &FrameTangent) -> f64 {
    metric(v, &phi(w))
}

/// Coefficients `(η_x, η_y, η_z)` of η in the coordinate coframe at `p`.
pub fn eta_coefficients(p: &Point) -> (Vec<f64>, Vec<f64>, f64) {
    (
        p.y.iter().map(|y| -0.5 * y).collect(),
        vec![0.0; p.n()],
        0.5,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim1() -> Dimension {
        Dimension::new(1).unwrap()
    }

    fn pt1(y: f64) -> Point {
        Point::new(vec![0.7], vec![y], -1.3).unwrap()
    }

    #[test]
    fn dimension_rejects_zero() {
        assert!(matches!(Dimension::new(0), Err(Error::InvalidDimension)));
        assert_eq!(Dimension::new(3).unwrap().manifold_dim(), 7);
    }

    #[test]
    fn xi_in_coordinates_is_two_dz() {
        let p = pt1(5.0);
        let v = CoordTangent::new(vec![0.0], vec![0.0], 2.0).unwrap();
        assert_eq!(to_frame(&p, &v), FrameTangent::xi(dim1()));
        let back = to_coord(&p, &FrameTangent::xi(dim1()));
        assert_eq!(back, v);
    }

    #[test]
    fn phi_x1_in_coordinates() {
        let p = pt1(3.0);
        let v = CoordTangent::new(vec![2.0], vec![0.0], 6.0).unwrap();
        let f = to_frame(&p, &v);
        assert_eq!(f, FrameTangent::new(vec![0.0], vec![1.0], 0.0).unwrap());
        assert_eq!(to_coord(&p, &f), v);
    }

    #[test]
    fn mixed_frame_solve() {
        // u = 2b, v = 2a, w = 2c + 2 b y: with y = 1 → a = 2, b = 1, c = 1
        let p = pt1(1.0);
        let v = CoordTangent::new(vec![2.0], vec![4.0], 4.0).unwrap();
        let f = to_frame(&p, &v);
        assert_eq!(f, FrameTangent::new(vec![2.0], vec![1.0], 1.0).unwrap());
        assert_eq!(v.eta_at(&p), 1.0);
        assert_eq!(f.eta(), 1.0);
        assert_eq!(metric(&f, &f), 6.0);
    }

    #[test]
    fn eta_on_frame_fields() {
        let d = Dimension::new(2).unwrap();
        let p = Point::new(vec![0.3, -2.0], vec![1.5, 0.25], 4.0).unwrap();
        for idx in FrameIndex::all(d) {
            let e = FrameTangent::basis(d, idx).unwrap();
            let expected = if idx == FrameIndex::Xi { 1.0 } else { 0.0 };
            assert_eq!(to_coord(&p, &e).eta_at(&p), expected, "{idx}");
        }
    }

    #[test]
    fn phi_table() {
        let d = Dimension::new(2).unwrap();
        let xi = FrameTangent::xi(d);
        assert_eq!(phi(&xi), FrameTangent::zero(d));
        for i in 0..2 {
            let x = FrameTangent::basis(d, FrameIndex::X(i)).unwrap();
            let px = FrameTangent::basis(d, FrameIndex::PhiX(i)).unwrap();
            assert_eq!(phi(&x), px);
            assert_eq!(phi(&px), -&x);
        }
    }

    #[test]
    fn frame_orthonormality() {
        let d = Dimension::new(3).unwrap();
        let all = FrameIndex::all(d);
        for &i in &all {
            for &j in &all {
                let g = metric(
                    &FrameTangent::basis(d, i).unwrap(),
                    &FrameTangent::basis(d, j).unwrap(),
                );
                assert_eq!(g, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn two_form_examples() {
        let d = dim1();
        let x1 = FrameTangent::basis(d, FrameIndex::X(0)).unwrap();
        let x2 = FrameTangent::basis(d, FrameIndex::PhiX(0)).unwrap();
        assert_eq!(fundamental_two_form(&x1, &x1), 0.0);
        assert_eq!(fundamental_two_form(&x2, &x1), 1.0);
        assert_eq!(fundamental_two_form(&x1, &x2), -1.0);
        let v = FrameTangent::new(vec![0.4], vec![-3.0], 2.0).unwrap();
        assert_eq!(fundamental_two_form(&v, &FrameTangent::xi(d)), 0.0);
    }

    #[test]
    fn bad_frame_index_is_rejected() {
        let d = dim1();
        assert!(matches!(
            FrameIndex::X(1).slot(d),
            Err(Error::InvalidFrameIndex { .. })
        ));
    }

    #[test]
    fn constructors_reject_non_finite() {
        assert!(Point::new(vec![f64::NAN], vec![0.0], 0.0).is_err());
        assert!(FrameTangent::new(vec![0.0], vec![0.0], f64::INFINITY).is_err());
        assert!(FrameTangent::new(vec![0.0, 1.0], vec![0.0], 0.0).is_err());
    }
}
