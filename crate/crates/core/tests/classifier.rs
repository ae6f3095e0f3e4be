use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use sasmag::classifier::{classify_with, roundtrip, Branch, HelixData, Strength, StrengthCase};
use sasmag::closed_form::{initial_value_problem, sample, CurveSpec};
use sasmag::frenet::Sign;
use sasmag::{integrate, roundtrip_check, strength_for_phi_helix, Dimension, ToleranceProfile};

fn d(n: usize) -> Dimension {
    Dimension::new(n).unwrap()
}

#[test]
fn integrated_curves_classify_like_closed_form_ones() {
    let cases = [
        (1.0, 0.0, Branch::GeodesicXi),
        (1.0, FRAC_PI_3, Branch::SlantGeodesic),
        (-2.0, FRAC_PI_2, Branch::LegendreCircle),
        (3.0, FRAC_PI_3, Branch::SlantHelix),
        (-0.5, 2.0, Branch::SlantHelix),
    ];
    for n in [1, 2] {
        for (q, theta, want) in cases {
            let spec = CurveSpec::canonical(d(n), q, theta).unwrap();
            let exact = sample(&spec, 5.0, 1e-3).unwrap();
            let numeric = integrate(&initial_value_problem(&spec, 5.0, 1e-3).unwrap()).unwrap();
            assert_eq!(classify_with(&exact, q, ToleranceProfile::Strict).unwrap().branch, want);
            assert_eq!(classify_with(&numeric, q, ToleranceProfile::Ode).unwrap().branch, want);
        }
    }
}

#[test]
fn wrong_strength_is_not_magnetic() {
    let traj = sample(&CurveSpec::canonical(d(1), 3.0, FRAC_PI_3).unwrap(), 5.0, 1e-3).unwrap();
    let c = classify_with(&traj, 2.0, ToleranceProfile::Strict).unwrap();
    assert_eq!(c.branch, Branch::NotMagnetic);
}

#[test]
fn roundtrip_over_signs_and_dimensions() {
    for n in [1, 2, 3] {
        for q in [-3.0, -1.0, 0.5, 2.5] {
            for theta in [0.3, FRAC_PI_4, FRAC_PI_2, 2.5] {
                assert!(roundtrip_check(q, theta, d(n)), "n={n} q={q} θ={theta}");
            }
        }
    }
    let out = roundtrip(-1.0, PI, d(2), ToleranceProfile::Strict).unwrap();
    assert_eq!(out.strength, Strength::ArbitraryQ);
}

#[test]
fn helix_formula_inverts_the_curvatures() {
    for q in [-4.0, -0.7, 0.3, 5.0] {
        for theta in [0.2, 1.0, 2.0, 2.9] {
            let cos_t: f64 = f64::cos(theta);
            let lambda: f64 = q - 2.0 * cos_t;
            let h = HelixData::new(
                lambda.abs() * theta.sin(),
                lambda.abs() * cos_t.abs(),
                cos_t,
                Sign::of(-lambda).unwrap(),
                Sign::of(cos_t).unwrap(),
            )
            .unwrap();
            match strength_for_phi_helix(&h) {
                Strength::UniqueQ { q: found, case: StrengthCase::SlantHelix } => {
                    assert!((found - q).abs() < 1e-12, "{q} vs {found}")
                }
                other => panic!("q={q} θ={theta}: {other:?}"),
            }
        }
    }
}
