//! Curvature sweep over a (q, θ) grid.
//!
//! Writes `sweep.csv` with one row per grid point and two gnuplot-style data
//! files, `k1.dat` and `k2.dat`, with one block per θ.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sasmag::classifier::{classify_report, Branch, PredictedCurvatures};
use sasmag::closed_form::{initial_value_problem, sample, CurveSpec};
use sasmag::frenet::{frame_formula_residuals, frenet_apparatus_for};
use sasmag::{integrate, lorentz_residual, Dimension, ToleranceProfile};

use crate::commands::{DEFAULT_DT, DEFAULT_TMAX};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::SweepArgs;

pub const DEFAULT_QS: [f64; 5] = [-3.0, -1.0, 0.5, 1.0, 3.0];
pub const DEFAULT_THETAS: [f64; 5] = [PI / 6.0, PI / 4.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0];

pub const CSV_HEADER: &str = "q,theta,n,lambda,branch,osc_order,k1_predicted,k2_predicted,\
k1_estimated,k2_estimated,k3_estimated,lorentz_residual,e2_residual,e3_residual,drift";

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub q: f64,
    pub theta: f64,
    pub n: usize,
    pub branch: Branch,
    pub osc_order: u8,
    /// Empty for integral curves of ξ.
    pub curvatures: Option<Curvatures>,
    pub lorentz_residual: f64,
    pub e2_residual: Option<f64>,
    pub e3_residual: Option<f64>,
    pub drift: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct Curvatures {
    pub predicted: PredictedCurvatures,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

/// Shortest round-trip text, in exponent form outside [1e-4, 1e6).
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn cell(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl SweepRow {
    fn csv_line(&self) -> String {
        let k = self.curvatures;
        [
            num(self.q),
            num(self.theta),
            self.n.to_string(),
            num(self.q - 2.0 * self.theta.cos()),
            format!("{:?}", self.branch),
            self.osc_order.to_string(),
            cell(k.map(|k| k.predicted.k1)),
            cell(k.map(|k| k.predicted.k2)),
            cell(k.map(|k| k.k1)),
            cell(k.map(|k| k.k2)),
            cell(k.map(|k| k.k3)),
            num(self.lorentz_residual),
            cell(self.e2_residual),
            cell(self.e3_residual),
            num(self.drift),
        ]
        .join(",")
    }
}

fn row(
    dim: Dimension,
    q: f64,
    theta: f64,
    tmax: f64,
    dt: f64,
    closed_form: bool,
    profile: ToleranceProfile,
) -> CliResult<SweepRow> {
    let spec = CurveSpec::canonical(dim, q, theta)?;
    let traj = if closed_form {
        sample(&spec, tmax, dt)?
    } else {
        integrate(&initial_value_problem(&spec, tmax, dt)?)?
    };
    let report = frenet_apparatus_for(&traj, q)?;
    let residual = lorentz_residual(&traj, q)?;
    let class = classify_report(&report, q, residual, profile);
    let frames = frame_formula_residuals(&traj, &report).ok();
    let curvatures = (class.branch != Branch::GeodesicXi).then(|| Curvatures {
        predicted: class.predicted,
        k1: class.evidence.k1,
        k2: class.evidence.k2,
        k3: report.k3.as_ref().map_or(0.0, |k| k.mean),
    });
    Ok(SweepRow {
        q,
        theta,
        n: dim.n(),
        branch: class.branch,
        osc_order: report.osc_order,
        curvatures,
        lorentz_residual: residual,
        e2_residual: frames.and_then(|f| f.r2),
        e3_residual: frames.and_then(|f| f.r3),
        drift: traj.conservation_drift().max(),
    })
}

/// Evaluates every grid point, in parallel, in row-major (q, θ) order.
pub fn sweep_rows(
    dim: Dimension,
    qs: &[f64],
    thetas: &[f64],
    tmax: f64,
    dt: f64,
    closed_form: bool,
    profile: ToleranceProfile,
) -> CliResult<Vec<SweepRow>> {
    if let Some(q) = qs.iter().find(|q| !q.is_finite() || **q == 0.0) {
        return Err(CliError::input(format!("q = {q} is not allowed")));
    }
    if let Some(t) = thetas.iter().find(|t| !(0.0..=PI).contains(*t)) {
        return Err(CliError::input(format!("θ = {t} is outside [0, π]")));
    }
    let grid: Vec<(f64, f64)> = qs
        .iter()
        .flat_map(|&q| thetas.iter().map(move |&t| (q, t)))
        .collect();
    grid.par_iter()
        .map(|&(q, t)| row(dim, q, t, tmax, dt, closed_form, profile))
        .collect()
}

fn write_plot(path: &Path, rows: &[SweepRow], thetas: &[f64], pick: fn(&Curvatures) -> (f64, f64)) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# q predicted estimated")?;
    for &theta in thetas {
        writeln!(w, "\n# theta = {theta}")?;
        for r in rows.iter().filter(|r| r.theta == theta) {
            if let Some(k) = &r.curvatures {
                let (p, e) = pick(k);
                writeln!(w, "{} {} {}", num(r.q), num(p), num(e))?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(args: &SweepArgs, cfg: &RunConfig, profile: ToleranceProfile) -> CliResult<()> {
    let dim = Dimension::new(args.n.or(cfg.n).unwrap_or(1))?;
    let qs = args.qs.clone().or_else(|| cfg.qs.clone()).unwrap_or(DEFAULT_QS.to_vec());
    let thetas = args
        .thetas
        .clone()
        .or_else(|| cfg.thetas.clone())
        .unwrap_or(DEFAULT_THETAS.to_vec());
    let tmax = args.tmax.or(cfg.tmax).unwrap_or(DEFAULT_TMAX);
    let dt = args.dt.or(cfg.dt).unwrap_or(DEFAULT_DT);
    let dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;

    let rows = sweep_rows(dim, &qs, &thetas, tmax, dt, args.closed_form, profile)?;

    let mut w = BufWriter::new(File::create(dir.join("sweep.csv"))?);
    writeln!(w, "{CSV_HEADER}")?;
    for r in &rows {
        writeln!(w, "{}", r.csv_line())?;
    }
    w.flush()?;
    write_plot(&dir.join("k1.dat"), &rows, &thetas, |k| (k.predicted.k1, k.k1))?;
    write_plot(&dir.join("k2.dat"), &rows, &thetas, |k| (k.predicted.k2, k.k2))?;
    eprintln!("sasmag: {} rows written to {}", rows.len(), dir.join("sweep.csv").display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicted_row_for_q3_pi3() {
        let dim = Dimension::new(1).unwrap();
        let rows = sweep_rows(dim, &[3.0], &[PI / 3.0], 5.0, 1e-3, true, ToleranceProfile::Strict).unwrap();
        let k = rows[0].curvatures.unwrap();
        assert!((k.predicted.k1 - 3f64.sqrt()).abs() < 1e-12);
        assert!((k.predicted.k2 - 1.0).abs() < 1e-12);
        assert_eq!(rows[0].branch, Branch::SlantHelix);
    }

    #[test]
    fn vertical_row_has_empty_curvatures() {
        let dim = Dimension::new(1).unwrap();
        let rows = sweep_rows(dim, &[1.0], &[0.0], 2.0, 1e-3, false, ToleranceProfile::Strict).unwrap();
        assert_eq!(rows[0].branch, Branch::GeodesicXi);
        let line = rows[0].csv_line();
        assert!(line.contains("GeodesicXi,1,,,,,,"), "{line}");
    }

    #[test]
    fn rejects_zero_strength() {
        let dim = Dimension::new(1).unwrap();
        assert!(sweep_rows(dim, &[0.0], &[1.0], 1.0, 1e-2, true, ToleranceProfile::Strict).is_err());
    }
}
