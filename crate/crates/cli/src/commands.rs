use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;

use sasmag::audit::{corrupted_phi, run_audit, AuditConfig};
use sasmag::classifier::{
    classify_report, helix_data_from_report, strength_for_phi_helix_tol, PredictedCurvatures,
};
use sasmag::closed_form::{initial_value_problem, sample, CurveSpec};
use sasmag::frenet::{frame_formula_residuals, frenet_apparatus_for, Sign};
use sasmag::tolerance::{CONSERVATION_WARN, EPSILON_UNDEFINED};
use sasmag::{
    integrate as integrate_ivp, lorentz_residual, Dimension, FrameTangent, MagneticIvp, Point,
    ToleranceProfile, Trajectory,
};
use serde_json::json;

use crate::config::{require, RunConfig};
use crate::error::{CliError, CliResult};
use crate::{AnalyzeArgs, CurveArgs, GenerateArgs, IntegrateArgs, VerifyArgs};

pub const DEFAULT_TMAX: f64 = 10.0;
pub const DEFAULT_DT: f64 = 1e-3;

/// Writes through `f` to the file at `path`, or to stdout.
pub fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match path {
        Some(p) => {
            let file = File::create(p)
                .map_err(|e| CliError::Output(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn emit_json(path: Option<&Path>, value: &serde_json::Value) -> CliResult<()> {
    emit(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    })
}

fn dimension(args: &CurveArgs, cfg: &RunConfig) -> CliResult<Dimension> {
    Ok(Dimension::new(require("n", args.n, cfg.n)?)?)
}

fn grid(args: &CurveArgs, cfg: &RunConfig) -> (f64, f64) {
    (
        args.tmax.or(cfg.tmax).unwrap_or(DEFAULT_TMAX),
        args.dt.or(cfg.dt).unwrap_or(DEFAULT_DT),
    )
}

fn output<'a>(flag: Option<&'a Path>, cfg: &'a RunConfig) -> Option<&'a Path> {
    flag.or(cfg.output.as_deref())
}

fn curve_spec(args: &GenerateArgs, cfg: &RunConfig) -> CliResult<CurveSpec> {
    if let Some(path) = &args.spec {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read spec {}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("spec {}: {e}", path.display())));
    }
    let dim = dimension(&args.curve, cfg)?;
    let n = dim.n();
    let q = require("q", args.curve.q, cfg.q)?;
    let theta = require("theta", args.curve.theta, cfg.theta)?;
    let c = args.c.clone().or_else(|| cfg.c.clone());
    let d = args.d.clone().or_else(|| cfg.d.clone());
    let h = args.h.clone().or_else(|| cfg.h.clone());
    let lambda_zero = args.lambda_zero || cfg.lambda_zero.unwrap_or(false);

    let spec = if lambda_zero {
        match c {
            Some(c) => CurveSpec::linear(dim, q, theta, c, d.unwrap_or_else(|| vec![0.0; 2 * n]))?,
            None => {
                let lambda = q - 2.0 * theta.cos();
                if lambda.abs() > sasmag::closed_form::AMPLITUDE_TOL {
                    return Err(CliError::input(format!(
                        "the λ = 0 branch requires q = 2cosθ (q = {q}, 2cosθ = {})",
                        2.0 * theta.cos()
                    )));
                }
                CurveSpec::canonical(dim, q, theta)?
            }
        }
    } else if let Some(c) = c {
        CurveSpec::rotating(
            dim,
            q,
            theta,
            c,
            d.unwrap_or_else(|| vec![0.0; n]),
            h.unwrap_or_else(|| vec![0.0; 2 * n + 1]),
        )?
    } else {
        CurveSpec::canonical(dim, q, theta)?
    };
    Ok(spec)
}

pub fn generate(args: &GenerateArgs, cfg: &RunConfig) -> CliResult<()> {
    let spec = curve_spec(args, cfg)?;
    let (tmax, dt) = grid(&args.curve, cfg);
    let traj = sample(&spec, tmax, dt)?;
    emit(output(args.curve.output.as_deref(), cfg), |w| Ok(traj.write_csv(w)?))
}

fn magnetic_ivp(args: &IntegrateArgs, cfg: &RunConfig) -> CliResult<MagneticIvp> {
    let dim = dimension(&args.curve, cfg)?;
    let q = require("q", args.curve.q, cfg.q)?;
    let theta = args.curve.theta.or(cfg.theta);
    let (tmax, dt) = grid(&args.curve, cfg);
    let p0 = args
        .p0
        .clone()
        .or_else(|| cfg.p0.clone())
        .map(|p| {
            if p.len() != dim.manifold_dim() {
                return Err(CliError::input(format!(
                    "p0 needs {} values, got {}",
                    dim.manifold_dim(),
                    p.len()
                )));
            }
            Ok(Point::from_flat(&p)?)
        })
        .transpose()?;

    match args.v0.clone().or_else(|| cfg.v0.clone()) {
        Some(v) => {
            if v.len() != dim.manifold_dim() {
                return Err(CliError::input(format!(
                    "v0 needs {} values, got {}",
                    dim.manifold_dim(),
                    v.len()
                )));
            }
            let v0 = FrameTangent::from_flat(&v)?;
            if let Some(theta) = theta {
                if (v0.eta() - theta.cos()).abs() > 1e-9 {
                    return Err(CliError::input(format!(
                        "θ conflicts with v0: η(v0) = {}, cosθ = {}",
                        v0.eta(),
                        theta.cos()
                    )));
                }
            }
            Ok(MagneticIvp::new(q, p0.unwrap_or_else(|| Point::origin(dim)), v0, tmax, dt)?)
        }
        None => {
            let theta = require("theta (or v0)", theta, None)?;
            let ivp = initial_value_problem(&CurveSpec::canonical(dim, q, theta)?, tmax, dt)?;
            match p0 {
                Some(p) => Ok(MagneticIvp::new(q, p, ivp.v0().clone(), tmax, dt)?),
                None => Ok(ivp),
            }
        }
    }
}

pub fn integrate(args: &IntegrateArgs, cfg: &RunConfig) -> CliResult<()> {
    let ivp = magnetic_ivp(args, cfg)?;
    let traj = integrate_ivp(&ivp)?;
    let drift = traj.conservation_drift();
    if drift.max() > CONSERVATION_WARN {
        eprintln!(
            "sasmag: warning: conservation drift {:.3e} (speed {:.3e}, slant {:.3e}, planes {:.3e})",
            drift.max(),
            drift.unit_speed,
            drift.slant,
            drift.plane_amplitude
        );
    }
    emit(output(args.curve.output.as_deref(), cfg), |w| Ok(traj.write_csv(w)?))
}

fn load_trajectory(args: &AnalyzeArgs, cfg: &RunConfig) -> CliResult<(Trajectory, f64)> {
    let q = require("q", args.q, cfg.q)?;
    let file = File::open(&args.input)
        .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
    let traj = Trajectory::read_csv(BufReader::new(file), q)
        .map_err(|e| CliError::input(format!("{}: {e}", args.input.display())))?;
    Ok((traj, q))
}

fn predicted_block(q: f64, cos_theta: f64) -> serde_json::Value {
    let p = PredictedCurvatures::new(q, cos_theta);
    let lambda = q - 2.0 * cos_theta;
    let epsilon = if cos_theta.abs() < EPSILON_UNDEFINED {
        None
    } else {
        Sign::of(cos_theta)
    };
    json!({
        "k1": p.k1,
        "k2": p.k2,
        "lambda": lambda,
        "delta": Sign::of(-lambda),
        "epsilon": epsilon,
        "legendre_k1": q.abs(),
    })
}

pub fn analyze(args: &AnalyzeArgs, cfg: &RunConfig, profile: ToleranceProfile) -> CliResult<()> {
    let (traj, q) = load_trajectory(args, cfg)?;
    let report = frenet_apparatus_for(&traj, q)?;
    let residual = lorentz_residual(&traj, q)?;
    let class = classify_report(&report, q, residual, profile);
    let residuals = frame_formula_residuals(&traj, &report).ok();
    let value = json!({
        "q": q,
        "n": traj.dim().n(),
        "nodes": traj.len(),
        "dt": traj.dt(),
        "tolerance": profile.to_string(),
        "branch": class.branch,
        "evidence": class.evidence,
        "lorentz_residual": residual,
        "conservation": traj.conservation_drift(),
        "frame_residuals": residuals,
        "orthonormality_defect": report.orthonormality_defect(),
        "predicted": predicted_block(q, report.cos_theta),
        "report": report,
    });
    emit_json(output(args.output.as_deref(), cfg), &value)
}

pub fn classify(args: &AnalyzeArgs, cfg: &RunConfig, profile: ToleranceProfile) -> CliResult<()> {
    let (traj, q) = load_trajectory(args, cfg)?;
    let report = frenet_apparatus_for(&traj, q)?;
    let residual = lorentz_residual(&traj, q)?;
    let class = classify_report(&report, q, residual, profile);
    let helix = helix_data_from_report(&report, profile)?;
    let strength = strength_for_phi_helix_tol(&helix, profile.angle_eq());
    let value = json!({
        "q": q,
        "tolerance": profile.to_string(),
        "branch": class.branch,
        "evidence": class.evidence,
        "predicted": predicted_block(q, report.cos_theta),
        "helix": helix,
        "strength": strength,
    });
    emit_json(output(args.output.as_deref(), cfg), &value)
}

pub fn verify(args: &VerifyArgs, cfg: &RunConfig) -> CliResult<()> {
    let mut config = AuditConfig {
        seed: args.seed.or(cfg.seed).unwrap_or(0),
        samples: args.samples.or(cfg.samples).unwrap_or(1000),
        // `--only ''` selects nothing
        only: args
            .only
            .as_ref()
            .map(|v| v.iter().filter(|s| !s.is_empty()).cloned().collect()),
        ..AuditConfig::default()
    };
    if args.corrupt_phi {
        config.phi = corrupted_phi;
    }
    if let Some(only) = &config.only {
        if let Some(bad) = only
            .iter()
            .find(|p| !sasmag::audit::PROPERTIES.contains(&p.as_str()))
        {
            return Err(CliError::input(format!("unknown property `{bad}`")));
        }
    }
    let report = run_audit(config)?;
    let value = serde_json::to_value(&report).map_err(|e| CliError::Output(e.to_string()))?;
    emit_json(output(args.output.as_deref(), cfg), &value)?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::VerifyFailed)
    }
}
