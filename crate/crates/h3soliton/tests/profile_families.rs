//! Family-level checks for the translator profiles: oracle regression
//! values, the qualitative trichotomy of the vertical-chart IVP, explicit
//! exponential bounds, and the universal asymptote bound.

use h3soliton::ode::{integrate, locate_zero, Direction, IntegrationConfig, OdeProblem};
use h3soliton::profiles::*;
use proptest::prelude::*;

/// Independently computed reference values (high-accuracy adaptive RK with
/// rtol 1e-12, chart switch at |slope| = 10, stop at |slope| < 1e-9).
const R_PLUS_ORACLE_R1: f64 = 1.690614836;
const R_MINUS_ORACLE_R1: f64 = 0.645446561;
const LAMBDA_PLUS_ORACLE_L1: f64 = 2.317302448;
const LAMBDA_MINUS_ORACLE_L1: f64 = 0.502169525;

#[test]
fn catenoid_r1_brackets_match_the_oracle() {
    let cfg = IntegrationConfig::default();
    let p = solve_catenoid(1.0, &cfg).unwrap();
    let [plo, phi] = p.r_plus_bracket;
    let [mlo, mhi] = p.r_minus_bracket;
    assert!(phi - plo < 1e-6, "r+ bracket width {:e}", phi - plo);
    assert!(mhi - mlo < 1e-6, "r- bracket width {:e}", mhi - mlo);
    assert!(
        (0.5 * (plo + phi) - R_PLUS_ORACLE_R1).abs() < 1e-6,
        "r+ = [{plo}, {phi}]"
    );
    assert!(
        (0.5 * (mlo + mhi) - R_MINUS_ORACLE_R1).abs() < 1e-6,
        "r- = [{mlo}, {mhi}]"
    );
}

#[test]
fn catenoid_family_bounds_hold() {
    let cfg = IntegrationConfig::default();
    let e = upper_asymptote_bound();
    for r in [0.05, 0.5, 1.0, 2.0, 20.0] {
        let p = solve_catenoid(r, &cfg).unwrap();
        assert!(p.r_plus_bracket[1] <= e + 1e-12, "r = {r}");
        // Large-r inequality on the certified upper endpoint.
        assert!(
            p.large_r_bound() <= std::f64::consts::FRAC_PI_4 + 1e-6,
            "r = {r}: bound {}",
            p.large_r_bound()
        );
        // The neck is the minimum of d, attained exactly at z = 1.
        for s in p.horizontal_chart.samples() {
            if s.t != 1.0 {
                assert!(s.y[0] > p.r);
            }
        }
    }
}

#[test]
fn catenoid_residual_is_tiny_at_every_stored_sample() {
    let cfg = IntegrationConfig::default();
    let p = solve_catenoid(1.0, &cfg).unwrap();
    for s in p.upper_vertical_chart.samples() {
        let res = translator_residual_rotational(s.t, s.y[0], s.y[1], s.dy[1]).unwrap();
        assert!(res.abs() < 1e-8, "residual {res:e} at s = {}", s.t);
    }
    for s in p.lower_vertical_chart.samples() {
        let res = translator_residual_rotational(s.t, s.y[0], s.y[1], s.dy[1]).unwrap();
        assert!(res.abs() < 1e-8);
    }
    for s in p.horizontal_chart.samples() {
        let res = translator_residual_horizontal(s.t, s.y[0], s.y[1], s.dy[1]).unwrap();
        assert!(res.abs() < 1e-8);
    }
}

#[test]
fn vertical_ivp_trichotomy_with_exponential_bounds() {
    // phi(s0) = z0, phi'(s0) = lambda: constant, or increasing-concave with
    // sup phi <= z0 e^{pi/(4 sqrt 2)}, or decreasing-convex with
    // inf phi >= z0 e^{atan(lambda)/(2 sqrt 2)}.
    let cfg = IntegrationConfig::default();
    let upper = upper_asymptote_bound();
    for &lambda in &[-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
        for &z0 in &[0.5, 1.0, 2.0] {
            let problem = OdeProblem::new(1.0, vec![z0, lambda], Direction::Forward, |s, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[1] * (1.0 + y[1] * y[1]) * (2.0 * s / (y[0] * y[0]) + 1.0 / s);
            });
            let tr = integrate(&problem, &cfg, 50.0).unwrap();
            let lower_bound = z0 * ((lambda.atan()) / (2.0 * 2.0_f64.sqrt())).exp();
            for s in tr.samples() {
                if lambda == 0.0 {
                    assert_eq!(s.y[0], z0, "constant solution drifted");
                } else if lambda > 0.0 {
                    assert!(s.y[1] > 0.0 && s.dy[1] < 0.0, "lambda {lambda} z0 {z0}");
                    assert!(s.y[0] <= z0 * upper, "sup bound violated");
                } else {
                    assert!(s.y[1] < 0.0 && s.dy[1] > 0.0, "lambda {lambda} z0 {z0}");
                    assert!(s.y[0] >= lower_bound, "inf bound violated");
                }
            }
        }
    }
}

#[test]
fn grim_reaper_structure_and_oracle() {
    let cfg = IntegrationConfig::default();
    let p = solve_grim_reaper(1.0, 40.0, &cfg).unwrap();
    let [ulo, uhi] = p.lambda_plus_bracket;
    let [llo, lhi] = p.lambda_minus_bracket;
    assert!((0.5 * (ulo + uhi) - LAMBDA_PLUS_ORACLE_L1).abs() < 1e-6);
    assert!((0.5 * (llo + lhi) - LAMBDA_MINUS_ORACLE_L1).abs() < 1e-6);
    assert!(0.0 < llo && lhi < 1.0 && 1.0 < ulo && uhi.is_finite());

    // The concavity flip sits at y = 0: one sign change of phi''.
    let roots = locate_zero(&p.trajectory, |t, y| {
        -y[1] * (1.0 + y[1] * y[1]) * 2.0 * t / (y[0] * y[0])
    });
    assert_eq!(roots.len(), 1, "roots {roots:?}");
    assert!(roots[0].abs() < 1e-9);

    // Paper-style positive lower bound for lambda-: evaluated at y0 = -1.
    let phi_m1 = p.trajectory.eval(-1.0).unwrap()[0];
    let bound = 1.0 / (1.0 / phi_m1 + std::f64::consts::FRAC_PI_2);
    assert!(llo >= bound, "lambda- lo {llo} below analytic bound {bound}");
}

#[test]
fn grim_reaper_slab_ordering_across_lambdas() {
    let cfg = IntegrationConfig::default();
    for lambda in [0.5, 1.0, 2.0] {
        let p = solve_grim_reaper(lambda, 40.0, &cfg).unwrap();
        let [_, lhi] = p.lambda_minus_bracket;
        let [ulo, _] = p.lambda_plus_bracket;
        assert!(0.0 < lhi && lhi < 1.0 && 1.0 < ulo, "lambda = {lambda}");
        // Every stored height stays inside the slab.
        for s in p.trajectory.samples() {
            assert!(s.y[0] > p.lambda_minus_bracket[0] - 1e-12);
            assert!(s.y[0] < p.lambda_plus_bracket[1] + 1e-12);
        }
    }
}

proptest! {
    /// 2u/v^2 + 1/u >= 2 sqrt(2)/v, with equality within 1e-10 iff u = v/sqrt(2).
    #[test]
    fn auxiliary_estimate_holds(u in 1e-3..1e3f64, v in 1e-3..1e3f64) {
        let lhs = 2.0 * u / (v * v) + 1.0 / u;
        let rhs = 2.0 * 2.0_f64.sqrt() / v;
        prop_assert!(lhs >= rhs * (1.0 - 1e-12));
        let at_min = (u - v / 2.0_f64.sqrt()).abs() < 1e-10 * v;
        if at_min {
            prop_assert!((lhs - rhs).abs() < 1e-8 * rhs);
        } else {
            prop_assert!(lhs > rhs * (1.0 - 1e-12));
        }
    }

    /// The ODE right-hand sides are odd where the statements say so.
    #[test]
    fn rhs_symmetries(s in 0.1..10.0f64, phi in 0.1..10.0f64, p in -5.0..5.0f64) {
        let a = rhs_vertical_rotational(s, phi, p).unwrap();
        let b = rhs_vertical_rotational(s, phi, -p).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0));
        let c = rhs_parabolic(s, phi, p).unwrap();
        let d = rhs_parabolic(-s, phi, p).unwrap();
        prop_assert!((c + d).abs() <= 1e-12 * c.abs().max(d.abs()).max(1.0));
    }
}

#[test]
fn small_and_large_r_regression() {
    // Oracle run (independent integrator): r = 0.01 gives
    // r+ = 1.050521176, r- = 0.950342577.
    let cfg = IntegrationConfig::default();
    let p = solve_catenoid(0.01, &cfg).unwrap();
    assert!((p.r_plus_bracket[1] - 1.0).abs() <= 0.050522 + 1e-3);
    assert!((1.0 - p.r_minus_bracket[0]).abs() <= 0.049658 + 1e-3);
    let p = solve_catenoid(100.0, &cfg).unwrap();
    assert!((p.r_plus_bracket[1] - 1.0).abs() < 0.02);
    assert!((1.0 - p.r_minus_bracket[0]).abs() < 0.02);
}
