//! Discretized curves on a uniform arc-length grid, and their CSV form.
//!
//! CSV layout: header `t,x1..xn,y1..yn,z,a1..an,b1..bn,c`, one row per node,
//! every value written with 17 significant digits, `\n` line endings.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model_space::{Dimension, FrameTangent, Point};

/// Relative tolerance on grid spacing when validating uniformity.
const GRID_SPACING_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: Dimension,
    dt: f64,
    times: Vec<f64>,
    points: Vec<Point>,
    velocities: Vec<FrameTangent>,
    q: f64,
    cos_theta: f64,
}

/// Worst-case drift of the conserved quantities of a magnetic trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConservationDrift {
    /// max |g(E₁, E₁) − 1|
    pub unit_speed: f64,
    /// max |η(E₁) − cosθ|
    pub slant: f64,
    /// max over planes of |a_i² + b_i² − (a_i² + b_i²)(0)|
    pub plane_amplitude: f64,
}

impl ConservationDrift {
    pub fn max(&self) -> f64 {
        self.unit_speed.max(self.slant).max(self.plane_amplitude)
    }
}

impl Trajectory {
    /// Builds a trajectory from samples; the grid must be uniform. `cos_theta`
    /// is read off the first velocity.
    pub fn new(
        times: Vec<f64>,
        points: Vec<Point>,
        velocities: Vec<FrameTangent>,
        q: f64,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::GridTooShort {
                nodes: times.len(),
                required: 2,
            });
        }
        if points.len() != times.len() {
            return Err(Error::FieldLength {
                expected: times.len(),
                found: points.len(),
            });
        }
        if velocities.len() != times.len() {
            return Err(Error::FieldLength {
                expected: times.len(),
                found: velocities.len(),
            });
        }
        let dim = Dimension::new(points[0].n())?;
        for (p, v) in points.iter().zip(&velocities) {
            for found in [p.n(), v.n()] {
                if found != dim.n() {
                    return Err(Error::DimensionMismatch {
                        expected: dim.n(),
                        found,
                    });
                }
            }
        }
        if !times.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFinite("time grid"));
        }
        let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
        if dt.is_nan() || dt <= 0.0 {
            return Err(Error::NonUniformGrid {
                node: 1,
                spacing: times[1] - times[0],
                expected: dt,
            });
        }
        for (k, w) in times.windows(2).enumerate() {
            let spacing = w[1] - w[0];
            if (spacing - dt).abs() > GRID_SPACING_RTOL * dt + 8.0 * f64::EPSILON * w[1].abs() {
                return Err(Error::NonUniformGrid {
                    node: k + 1,
                    spacing,
                    expected: dt,
                });
            }
        }
        let cos_theta = velocities[0].eta();
        Ok(Self {
            dim,
            dt,
            times,
            points,
            velocities,
            q,
            cos_theta,
        })
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    /// Grid spacing.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Unit tangent E₁ in frame components, one per node.
    pub fn velocities(&self) -> &[FrameTangent] {
        &self.velocities
    }

    /// Magnetic strength the trajectory was produced for.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// η(E₁) at the first node.
    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = q;
        self
    }

    pub fn conservation_drift(&self) -> ConservationDrift {
        let v0 = &self.velocities[0];
        let amp0: Vec<f64> = v0.a.iter().zip(&v0.b).map(|(a, b)| a * a + b * b).collect();
        let mut drift = ConservationDrift {
            unit_speed: 0.0,
            slant: 0.0,
            plane_amplitude: 0.0,
        };
        for v in &self.velocities {
            drift.unit_speed = drift.unit_speed.max((v.dot(v) - 1.0).abs());
            drift.slant = drift.slant.max((v.eta() - self.cos_theta).abs());
            for ((a, b), a0) in v.a.iter().zip(&v.b).zip(&amp0) {
                drift.plane_amplitude = drift.plane_amplitude.max((a * a + b * b - a0).abs());
            }
        }
        drift
    }

    pub fn csv_header(dim: Dimension) -> String {
        let n = dim.n();
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=n).map(|i| format!("x{i}")));
        cols.extend((1..=n).map(|i| format!("y{i}")));
        cols.push("z".into());
        cols.extend((1..=n).map(|i| format!("a{i}")));
        cols.extend((1..=n).map(|i| format!("b{i}")));
        cols.push("c".into());
        cols.join(",")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv {
            line: 0,
            msg: e.to_string(),
        };
        w.write_record(Self::csv_header(self.dim).split(',')).map_err(csv_err)?;
        let mut row = Vec::with_capacity(1 + 2 * self.dim.manifold_dim());
        for ((t, p), v) in self.times.iter().zip(&self.points).zip(&self.velocities) {
            row.clear();
            row.push(fmt_value(*t));
            row.extend(p.to_flat().into_iter().chain(v.to_flat()).map(fmt_value));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses the CSV layout written by [`Trajectory::write_csv`]. The strength
    /// `q` is not part of the file and must be supplied.
    pub fn read_csv<R: Read>(input: R, q: f64) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        let header = reader
            .headers()
            .map_err(|e| Error::Csv {
                line: 1,
                msg: e.to_string(),
            })?
            .clone();
        let ncols = header.len();
        // 1 + (2n+1) + (2n+1) columns
        if ncols < 7 || (ncols - 1) % 2 != 0 || ((ncols - 1) / 2) % 2 != 1 {
            return Err(Error::Csv {
                line: 1,
                msg: format!("unexpected column count {ncols}"),
            });
        }
        let dim = Dimension::new(((ncols - 1) / 2 - 1) / 2)?;
        let expected = Self::csv_header(dim);
        if header.iter().collect::<Vec<_>>().join(",") != expected {
            return Err(Error::Csv {
                line: 1,
                msg: format!("expected header `{expected}`"),
            });
        }
        let width = dim.manifold_dim();
        let mut times = Vec::new();
        let mut points = Vec::new();
        let mut velocities = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Csv {
                line: e.position().map_or(0, |p| p.line() as usize),
                msg: e.to_string(),
            })?;
            let lineno = record.position().map_or(0, |p| p.line() as usize);
            let csv_err = |msg: String| Error::Csv { line: lineno, msg };
            if record.len() != ncols {
                return Err(csv_err(format!("expected {ncols} fields, found {}", record.len())));
            }
            let vals = record
                .iter()
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| csv_err(e.to_string()))?;
            times.push(vals[0]);
            points.push(Point::from_flat(&vals[1..1 + width]).map_err(|e| csv_err(e.to_string()))?);
            velocities.push(FrameTangent::from_flat(&vals[1 + width..]).map_err(|e| csv_err(e.to_string()))?);
        }
        Self::new(times, points, velocities, q)
    }
}

/// 17 significant digits, which round-trips every finite f64.
pub fn fmt_value(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_traj(nodes: usize) -> Trajectory {
        let dt = 0.1;
        let times: Vec<f64> = (0..nodes).map(|k| k as f64 * dt).collect();
        let points = times
            .iter()
            .map(|t| Point::new(vec![0.0], vec![0.0], 2.0 * t).unwrap())
            .collect();
        let d = Dimension::new(1).unwrap();
        let velocities = vec![FrameTangent::xi(d); nodes];
        Trajectory::new(times, points, velocities, 1.0).unwrap()
    }

    #[test]
    fn header_layout() {
        let d = Dimension::new(2).unwrap();
        assert_eq!(Trajectory::csv_header(d), "t,x1,x2,y1,y2,z,a1,a2,b1,b2,c");
    }

    #[test]
    fn rejects_non_uniform_grid() {
        let d = Dimension::new(1).unwrap();
        let times = vec![0.0, 0.1, 0.25, 0.3];
        let points = vec![Point::origin(d); 4];
        let vel = vec![FrameTangent::xi(d); 4];
        assert!(matches!(
            Trajectory::new(times, points, vel, 1.0),
            Err(Error::NonUniformGrid { .. })
        ));
    }

    #[test]
    fn csv_roundtrip_is_byte_identical() {
        let traj = line_traj(12);
        let mut first = Vec::new();
        traj.write_csv(&mut first).unwrap();
        let back = Trajectory::read_csv(first.as_slice(), 1.0).unwrap();
        let mut second = Vec::new();
        back.write_csv(&mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(back, traj);
    }

    #[test]
    fn malformed_csv_reports_line() {
        let text = "t,x1,y1,z,a1,b1,c\n0,0,0,0,0,0,1\n0.1,0,0,zz,0,0,1\n";
        match Trajectory::read_csv(text.as_bytes(), 1.0) {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let text = "t,x1,y1,z\n";
        assert!(matches!(
            Trajectory::read_csv(text.as_bytes(), 1.0),
            Err(Error::Csv { line: 1, .. })
        ));
    }

    #[test]
    fn drift_of_constant_field_is_zero() {
        let d = line_traj(5).conservation_drift();
        assert_eq!(d.max(), 0.0);
    }
}
