use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use proptest::prelude::*;
use sasmag::closed_form::{generate, initial_value_problem, lorentz_residual, sample, CurveSpec};
use sasmag::model_space::{to_frame, CoordTangent, Dimension};
use sasmag::integrate;

fn d(n: usize) -> Dimension {
    Dimension::new(n).unwrap()
}

fn rotating_spec() -> impl Strategy<Value = CurveSpec> {
    (1usize..=3, -4.0..4.0f64, 0.05..PI - 0.05)
        .prop_filter("q ≠ 0 and λ away from 0", |(_, q, th)| {
            q.abs() > 0.1 && (q - 2.0 * th.cos()).abs() > 0.05
        })
        .prop_flat_map(|(n, q, th)| {
            (
                Just((n, q, th)),
                prop::collection::vec(0.1..1.0f64, n),
                prop::collection::vec(-10.0..10.0f64, n),
                prop::collection::vec(-3.0..3.0f64, 2 * n + 1),
            )
        })
        .prop_map(|((n, q, th), dir, phases, h)| {
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            let c: Vec<f64> = dir.iter().map(|x| x / norm * 2.0 * th.sin()).collect();
            let c = match CurveSpec::rotating(d(n), q, th, c.clone(), phases.clone(), h.clone()) {
                Ok(_) => c,
                // renormalize the last amplitude when rounding leaves the constraint surface
                Err(_) => {
                    let mut c = c;
                    let rest: f64 = c[..n - 1].iter().map(|x| x * x).sum();
                    c[n - 1] = (4.0 * th.sin().powi(2) - rest).max(0.0).sqrt();
                    c
                }
            };
            CurveSpec::rotating(d(n), q, th, c, phases, h).unwrap()
        })
}

/// Five-point central difference.
fn fd(f: impl Fn(f64) -> Vec<f64>, t: f64, h: f64) -> Vec<f64> {
    let (m2, m1, p1, p2) = (f(t - 2.0 * h), f(t - h), f(t + h), f(t + 2.0 * h));
    (0..m1.len())
        .map(|i| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivatives_match_finite_differences(spec in rotating_spec(), t in -5.0..5.0f64) {
        let ev = generate(&spec, t).unwrap();
        let dpos = fd(|s| generate(&spec, s).unwrap().position.to_flat(), t, 1e-4);
        let dvel = fd(|s| generate(&spec, s).unwrap().velocity.to_flat(), t, 1e-4);
        for (a, b) in ev.velocity.to_flat().iter().zip(&dpos) {
            prop_assert!((a - b).abs() <= 1e-8, "velocity {a} vs fd {b}");
        }
        for (a, b) in ev.acceleration.to_flat().iter().zip(&dvel) {
            prop_assert!((a - b).abs() <= 1e-8, "acceleration {a} vs fd {b}");
        }
    }

    #[test]
    fn unit_and_slant_conditions(spec in rotating_spec(), t in -20.0..20.0f64) {
        let ev = generate(&spec, t).unwrap();
        let n = spec.dim().n();
        let planar: f64 = ev.velocity.u.iter().chain(&ev.velocity.v).map(|x| x * x).sum();
        prop_assert!((planar - 4.0 * spec.theta().sin().powi(2)).abs() <= 1e-12);
        let slant = 2.0 * spec.theta().cos()
            + (0..n).map(|i| ev.velocity.u[i] * ev.position.y[i]).sum::<f64>();
        prop_assert!((ev.velocity.w - slant).abs() <= 1e-12 * slant.abs().max(1.0));
        let e1 = to_frame(&ev.position, &ev.velocity);
        prop_assert!((e1.dot(&e1) - 1.0).abs() <= 1e-12);
        prop_assert!((e1.eta() - spec.theta().cos()).abs() <= 1e-12);
    }
}

#[test]
fn lambda_zero_limit_is_continuous() {
    let theta = FRAC_PI_3;
    let q0 = 2.0 * theta.cos();
    let (lambda, c, ph): (f64, f64, f64) = (1e-3, 2.0 * theta.sin(), 0.3);
    // offsets chosen so that α(0) = 0 and the 1/λ terms stay bounded
    let h3 = c * c / (4.0 * lambda * lambda) * (2.0 * ph + (2.0 * ph).sin())
        - c * (c / lambda * ph.cos()) / lambda * ph.sin();
    let h = vec![-c / lambda * ph.sin(), c / lambda * ph.cos(), h3];
    let rot = CurveSpec::rotating(d(1), q0 + lambda, theta, vec![c], vec![ph], h).unwrap();
    let start = generate(&rot, 0.0).unwrap();
    let (p, v) = (&start.position, &start.velocity);
    let lin = CurveSpec::linear(d(1), q0, theta, vec![v.u[0], v.v[0], p.z], vec![p.x[0], p.y[0]]).unwrap();
    for k in 0..=100 {
        let t = k as f64 / 100.0;
        let a = generate(&rot, t).unwrap().position.to_flat();
        let b = generate(&lin, t).unwrap().position.to_flat();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-2, "t={t}: {x} vs {y}");
        }
    }
}

#[test]
fn lambda_recovered_from_phase_rate() {
    for (q, theta) in [(1.0, FRAC_PI_2), (3.0, FRAC_PI_3), (-0.5, 2.0 * FRAC_PI_3)] {
        let spec = CurveSpec::canonical(d(1), q, theta).unwrap();
        let phase = |t: f64| {
            let v: CoordTangent = generate(&spec, t).unwrap().velocity;
            v.v[0].atan2(v.u[0])
        };
        for t in [0.4, 1.3, 2.9] {
            let h = 1e-4;
            let mut delta = phase(t + h) - phase(t - h);
            delta -= (delta / (2.0 * PI)).round() * 2.0 * PI;
            let rate = delta / (2.0 * h);
            assert!((rate - (q - 2.0 * theta.cos())).abs() <= 1e-6, "q={q}: {rate}");
        }
    }
}

#[test]
fn residual_small_on_exact_curves_and_large_for_wrong_q() {
    for (n, q, theta) in [(1, 1.0, FRAC_PI_2), (2, 3.0, FRAC_PI_3), (1, -0.5, 2.0), (2, 1.0, FRAC_PI_3)] {
        let traj = sample(&CurveSpec::canonical(d(n), q, theta).unwrap(), 5.0, 1e-3).unwrap();
        assert!(lorentz_residual(&traj, q).unwrap() <= 1e-6);
        assert!(lorentz_residual(&traj, q + 1.0).unwrap() >= 0.1 * theta.sin());
    }
}

#[test]
fn initial_value_problem_reproduces_the_curve() {
    for (n, q, theta) in [(1, 1.0, FRAC_PI_2), (2, 3.0, FRAC_PI_3)] {
        let spec = CurveSpec::canonical(d(n), q, theta).unwrap();
        let exact = sample(&spec, 10.0, 1e-3).unwrap();
        let numeric = integrate(&initial_value_problem(&spec, 10.0, 1e-3).unwrap()).unwrap();
        assert_eq!(exact.len(), numeric.len());
        for (a, b) in exact.points().iter().zip(numeric.points()) {
            for (x, y) in a.to_flat().iter().zip(b.to_flat()) {
                assert!((x - y).abs() <= 1e-6);
            }
        }
    }
}
