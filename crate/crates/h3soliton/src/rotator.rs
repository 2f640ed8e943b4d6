//! Helicoidal rotators: the planar system in the position components
//! `tau = <alpha, T>` and `mu = <alpha, N>` along the generating curve's
//! Frenet frame, and the reconstruction of the curve itself.
//!
//! The generating curve of a rotator of pitch `h` has curvature
//! `k(tau, mu)` given by [`curvature_k`]; the Frenet relations then close
//! into the autonomous system `tau' = 1 + k mu`, `mu' = -k tau`. Every
//! solution crosses `tau = 0` exactly once; anchoring there,
//! [`integrate_rotator`] rebuilds the curve twice over — in polar form
//! through `r' = tau/r`, `omega' = -mu/r^2` and by direct Frenet
//! integration of the tangent angle — so the two routes can be checked
//! against each other.

use crate::ode::{
    integrate, locate_zero, Direction, IntegrationConfig, OdeProblem, StopReason, Trajectory,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RotatorError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

/// The helicoidal pitch `h > 0`.
#[derive(Debug, Clone, Copy)]
pub struct HelicoidalParams {
    pub pitch: f64,
}

impl HelicoidalParams {
    pub fn new(pitch: f64) -> Result<Self, RotatorError> {
        if !(pitch.is_finite() && pitch > 0.0) {
            return Err(RotatorError::InvalidParameter(format!(
                "pitch must be positive and finite, got {pitch}"
            )));
        }
        Ok(HelicoidalParams { pitch })
    }
}

/// A state of the planar system along the generating curve.
#[derive(Debug, Clone, Copy)]
pub struct RotatorState {
    pub s: f64,
    pub tau: f64,
    pub mu: f64,
}

impl RotatorState {
    /// `r^2 = tau^2 + mu^2`, the squared distance of the curve point to the origin.
    pub fn radius_sq(&self) -> f64 {
        self.tau * self.tau + self.mu * self.mu
    }
}

/// Curvature of the generating curve of a rotator of pitch `h`:
/// `k = [2(h^2+(tau+h mu)^2)((h+1)tau + h mu) + h(h tau - mu)] / [h((h^2+1)r^2 + h^2)]`.
/// The denominator is at least `h^3 > 0`.
pub fn curvature_k(tau: f64, mu: f64, h: f64) -> f64 {
    let r2 = tau * tau + mu * mu;
    let u = tau + h * mu;
    let num = 2.0 * (h * h + u * u) * ((h + 1.0) * tau + h * mu) + h * (h * tau - mu);
    let den = h * ((h * h + 1.0) * r2 + h * h);
    num / den
}

/// The planar system in factored form: `(tau', mu') = (1 + k mu, -k tau)`.
pub fn system_rhs(tau: f64, mu: f64, h: f64) -> (f64, f64) {
    let k = curvature_k(tau, mu, h);
    (1.0 + k * mu, -k * tau)
}

/// Target mean curvature of a rotator: `H = h tau / sqrt(h^2 + (h mu + tau)^2)`.
pub fn rotator_target_h(tau: f64, mu: f64, h: f64) -> f64 {
    let u = tau + h * mu;
    h * tau / (h * h + u * u).sqrt()
}

/// Mean curvature of the helicoidal surface evaluated from the full
/// curvature formula; on rotator states it coincides with
/// [`rotator_target_h`].
pub fn helicoid_mean_curvature(tau: f64, mu: f64, h: f64) -> f64 {
    let r2 = tau * tau + mu * mu;
    let u = tau + h * mu;
    let q = h * h + u * u;
    let rho = h / q.sqrt();
    let k = curvature_k(tau, mu, h);
    (rho / h) * (h * (k * ((h * h + 1.0) * r2 + h * h) - (h * tau - mu)) / (2.0 * q) - u)
}

/// Difference of the two closed forms for `<xi, eta>` along a helicoidal
/// surface: the rotation field gives `rho <J alpha, N>` and the downward
/// translation of speed `h` gives `-h rho (mu - (tau + h mu)/h)`; both
/// reduce to `rho tau`, so the residual vanishes identically.
pub fn rotator_translator_equivalence_residual(tau: f64, mu: f64, h: f64) -> f64 {
    let u = tau + h * mu;
    let rho = h / (h * h + u * u).sqrt();
    // Rotation side, evaluated in the frame T = e1, N = e2: alpha = (tau, mu),
    // J alpha = (-mu, tau), so <J alpha, N> = tau.
    let rotation_side = rho * tau;
    let translation_side = -h * rho * (mu - u / h);
    rotation_side - translation_side
}

/// The reconstructed generating curve of one rotator solution.
#[derive(Debug, Clone)]
pub struct RotatorCurve {
    pub params: HelicoidalParams,
    /// `(tau, mu)` over `[-span, span]` from the requested initial state.
    pub phase_trajectory: Trajectory,
    /// `(r, omega)` anchored at the tau-zero: `r(s0) = |mu(s0)|`, `omega(s0) = 0`.
    pub polar_trajectory: Trajectory,
    /// `(x, y, psi)` from direct Frenet integration, anchored at the same point.
    pub frenet_trajectory: Trajectory,
    /// Abscissa of the unique zero of tau.
    pub tau_zero: f64,
    /// Joint reconstruction `(tau, mu, r, omega, x, y, psi)` the two
    /// trajectories above are projections of.
    pub reconstruction: Trajectory,
}

fn rotator_system(h: f64) -> impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + Copy {
    move |_s: f64, y: &[f64], dy: &mut [f64]| {
        let (tp, mp) = system_rhs(y[0], y[1], h);
        dy[0] = tp;
        dy[1] = mp;
    }
}

/// Integrates the planar system over `[-span, span]`, locates the unique
/// tau-zero, and rebuilds the generating curve via both the polar and the
/// Frenet route.
pub fn integrate_rotator(
    h: f64,
    tau0: f64,
    mu0: f64,
    span: f64,
    cfg: &IntegrationConfig,
) -> Result<RotatorCurve, RotatorError> {
    let params = HelicoidalParams::new(h)?;
    if !(tau0.is_finite() && mu0.is_finite()) {
        return Err(RotatorError::InvalidParameter(
            "initial state must be finite".into(),
        ));
    }
    if !(span.is_finite() && span > 0.0) {
        return Err(RotatorError::InvalidParameter(format!(
            "span must be positive and finite, got {span}"
        )));
    }

    let phase_trajectory = two_sided(h, [tau0, mu0], span, cfg, rotator_system(h))?;

    let zeros = locate_zero(&phase_trajectory, |_s, y| y[0]);
    if zeros.len() != 1 {
        return Err(RotatorError::Construction(format!(
            "expected exactly one tau-zero in [-{span}, {span}], found {}: {zeros:?}",
            zeros.len()
        )));
    }
    let tau_zero = zeros[0];
    let at_zero = phase_trajectory
        .eval(tau_zero)
        .expect("tau-zero lies inside the trajectory");
    let (tau_z, mu_z) = (at_zero[0], at_zero[1]);
    let r0 = mu_z.abs();
    if r0 < 1e-12 {
        return Err(RotatorError::Construction(
            "generating curve passes through the origin (r^2 minimum is zero)".into(),
        ));
    }

    // Anchor: alpha = (r0, 0). From T = (tau/r^2) alpha + omega' J alpha,
    // the tangent there is (tau_z/r0, -mu_z/r0).
    let psi0 = (-mu_z / r0).atan2(tau_z / r0);
    let y0 = vec![tau_z, mu_z, r0, 0.0, r0, 0.0, psi0];
    let joint = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        let (tau, mu, r, _om, _x, _y, psi) = (y[0], y[1], y[2], y[3], y[4], y[5], y[6]);
        let k = curvature_k(tau, mu, h);
        dy[0] = 1.0 + k * mu;
        dy[1] = -k * tau;
        dy[2] = tau / r;
        dy[3] = -mu / (r * r);
        dy[4] = psi.cos();
        dy[5] = psi.sin();
        dy[6] = k;
    };

    let fwd_span = span - tau_zero;
    let back_span = span + tau_zero;
    let reconstruction = {
        let fwd = if fwd_span > 0.0 {
            let p = OdeProblem::new(tau_zero, y0.clone(), Direction::Forward, joint);
            Some(run_plain(&p, cfg, tau_zero + fwd_span)?)
        } else {
            None
        };
        let back = if back_span > 0.0 {
            let p = OdeProblem::new(tau_zero, y0.clone(), Direction::Backward, joint);
            Some(run_plain(&p, cfg, tau_zero - back_span)?)
        } else {
            None
        };
        match (back, fwd) {
            (Some(b), Some(f)) => b.reversed().concat(f),
            (Some(b), None) => b.reversed(),
            (None, Some(f)) => f,
            (None, None) => unreachable!("span > 0"),
        }
    };

    let polar_trajectory = reconstruction.project(&[2, 3]);
    let frenet_trajectory = reconstruction.project(&[4, 5, 6]);

    let curve = RotatorCurve {
        params,
        phase_trajectory,
        polar_trajectory,
        frenet_trajectory,
        tau_zero,
        reconstruction,
    };
    curve.validate()?;
    Ok(curve)
}

fn two_sided(
    _h: f64,
    y0: [f64; 2],
    span: f64,
    cfg: &IntegrationConfig,
    rhs: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + Copy + 'static,
) -> Result<Trajectory, RotatorError> {
    let fwd = {
        let p = OdeProblem::new(0.0, y0.to_vec(), Direction::Forward, rhs);
        run_plain(&p, cfg, span)?
    };
    let back = {
        let p = OdeProblem::new(0.0, y0.to_vec(), Direction::Backward, rhs);
        run_plain(&p, cfg, -span)?
    };
    Ok(back.reversed().concat(fwd))
}

fn run_plain(
    p: &OdeProblem,
    cfg: &IntegrationConfig,
    t_end: f64,
) -> Result<Trajectory, RotatorError> {
    let run_cfg = IntegrationConfig {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_step: cfg.max_step,
        min_step: cfg.min_step,
        max_steps: cfg.max_steps,
        stop_events: Vec::new(),
        store_trajectory: cfg.store_trajectory,
    };
    let tr = integrate(p, &run_cfg, t_end).map_err(|e| RotatorError::Construction(e.to_string()))?;
    if tr.stop_reason != StopReason::MaxTime {
        return Err(RotatorError::Construction(format!(
            "integration stopped early with {:?} at s = {}",
            tr.stop_reason,
            tr.last().t
        )));
    }
    Ok(tr)
}

impl RotatorCurve {
    fn validate(&self) -> Result<(), RotatorError> {
        for s in self.polar_trajectory.samples() {
            if !(s.y[0] > 0.0) {
                return Err(RotatorError::Construction(format!(
                    "polar radius {} <= 0 at s = {}",
                    s.y[0], s.t
                )));
            }
        }
        // r^2 from the polar route must track tau^2 + mu^2 of the same run.
        for s in self.reconstruction.samples() {
            let r2 = s.y[2] * s.y[2];
            let from_phase = s.y[0] * s.y[0] + s.y[1] * s.y[1];
            if (r2 - from_phase).abs() > 1e-8 * from_phase.max(1.0) {
                return Err(RotatorError::Construction(format!(
                    "polar radius diverged from phase state at s = {}: {} vs {}",
                    s.t, r2, from_phase
                )));
            }
        }
        Ok(())
    }

    /// Winding accumulated on each arm: `(omega(-span) - omega(s0), omega(span) - omega(s0))`.
    pub fn omega_spans(&self) -> (f64, f64) {
        let a = self.polar_trajectory.first().y[1];
        let b = self.polar_trajectory.last().y[1];
        (a, b)
    }

    /// Largest pointwise gap between the polar and the Frenet reconstruction.
    pub fn reconstruction_gap(&self) -> f64 {
        let mut worst = 0.0f64;
        for s in self.reconstruction.samples() {
            let (r, om, x, y) = (s.y[2], s.y[3], s.y[4], s.y[5]);
            let gap = ((r * om.cos() - x).powi(2) + (r * om.sin() - y).powi(2)).sqrt();
            worst = worst.max(gap);
        }
        worst
    }
}

/// `omega(signed_span) - omega(0)` for the standard run starting at
/// `(tau, mu) = (0, -mu0)`, without storing the trajectory. The winding
/// grows like `((h+1)/h) ln s`, so reaching a fixed angle needs long spans;
/// this keeps memory flat.
pub fn winding_at(h: f64, mu0: f64, signed_span: f64, cfg: &IntegrationConfig) -> Result<f64, RotatorError> {
    HelicoidalParams::new(h)?;
    if !(mu0.is_finite() && mu0 > 0.0) {
        return Err(RotatorError::InvalidParameter(format!(
            "mu0 must be positive and finite, got {mu0}"
        )));
    }
    let rhs = move |_s: f64, y: &[f64], dy: &mut [f64]| {
        let (tau, mu) = (y[0], y[1]);
        let k = curvature_k(tau, mu, h);
        dy[0] = 1.0 + k * mu;
        dy[1] = -k * tau;
        dy[2] = -mu / (tau * tau + mu * mu);
    };
    let dir = if signed_span > 0.0 {
        Direction::Forward
    } else {
        Direction::Backward
    };
    let p = OdeProblem::new(0.0, vec![0.0, -mu0, 0.0], dir, rhs);
    let run_cfg = IntegrationConfig {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_step: cfg.max_step,
        min_step: cfg.min_step,
        max_steps: cfg.max_steps,
        stop_events: Vec::new(),
        store_trajectory: false,
    };
    let tr = integrate(&p, &run_cfg, signed_span)
        .map_err(|e| RotatorError::Construction(e.to_string()))?;
    if tr.stop_reason != StopReason::MaxTime {
        return Err(RotatorError::Construction(format!(
            "winding run stopped early with {:?} at s = {}",
            tr.stop_reason,
            tr.last().t
        )));
    }
    Ok(tr.last().y[2])
}

/// One row of the phase-portrait vector field: position and normalized direction.
#[derive(Debug, Clone, Copy)]
pub struct PhaseArrow {
    pub tau: f64,
    pub mu: f64,
    pub dtau: f64,
    pub dmu: f64,
}

/// Uniform sampling of the normalized vector field on `[-range, range]^2`.
/// The system has no equilibria, so every arrow is well defined.
pub fn phase_portrait(h: f64, grid: usize, range: f64) -> Result<Vec<PhaseArrow>, RotatorError> {
    HelicoidalParams::new(h)?;
    if grid < 2 {
        return Err(RotatorError::InvalidParameter(format!(
            "grid must be at least 2, got {grid}"
        )));
    }
    let mut arrows = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        let tau = -range + 2.0 * range * i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let mu = -range + 2.0 * range * j as f64 / (grid - 1) as f64;
            let (dt, dm) = system_rhs(tau, mu, h);
            let norm = (dt * dt + dm * dm).sqrt();
            arrows.push(PhaseArrow {
                tau,
                mu,
                dtau: dt / norm,
                dmu: dm / norm,
            });
        }
    }
    Ok(arrows)
}

pub const PHASE_CSV_HEADER: &str = "tau,mu,dtau,dmu";
pub const CURVE_CSV_HEADER: &str = "s,tau,mu,r,omega,k,H,x,y";

pub fn phase_portrait_csv(arrows: &[PhaseArrow]) -> String {
    use std::fmt::Write;
    let mut out = String::from(PHASE_CSV_HEADER);
    out.push('\n');
    for a in arrows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            crate::fmt17(a.tau),
            crate::fmt17(a.mu),
            crate::fmt17(a.dtau),
            crate::fmt17(a.dmu)
        );
    }
    out
}

/// Curve CSV over the joint reconstruction's nodes.
pub fn rotator_curve_csv(curve: &RotatorCurve) -> String {
    use std::fmt::Write;
    let h = curve.params.pitch;
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for s in curve.reconstruction.samples() {
        let (tau, mu) = (s.y[0], s.y[1]);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            crate::fmt17(s.t),
            crate::fmt17(tau),
            crate::fmt17(mu),
            crate::fmt17(s.y[2]),
            crate::fmt17(s.y[3]),
            crate::fmt17(curvature_k(tau, mu, h)),
            crate::fmt17(helicoid_mean_curvature(tau, mu, h)),
            crate::fmt17(s.y[4]),
            crate::fmt17(s.y[5])
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curvature_examples() {
        assert_eq!(curvature_k(0.0, 0.0, 1.0), 0.0);
        assert!((curvature_k(0.0, 1.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((curvature_k(1.0, 0.0, 1.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn system_rhs_examples() {
        let (tp, mp) = system_rhs(0.0, 1.0, 1.0);
        assert!((tp - 2.0).abs() < 1e-15 && mp.abs() < 1e-15);
        let (tp, mp) = system_rhs(1.0, 0.0, 1.0);
        assert!((tp - 1.0).abs() < 1e-15 && (mp + 3.0).abs() < 1e-15);
    }

    #[test]
    fn tau_prime_is_positive_on_the_zero_section() {
        // Closed form consistent with the curvature formula:
        // tau' = h^2 (1+mu^2)(1+2 mu^2) / ((h^2+1) mu^2 + h^2).
        for h in [0.3, 0.5, 1.0, 2.0, 3.7] {
            for mu in [-2.0, -0.3, 0.3, 1.0, 5.0] {
                let (tp, _) = system_rhs(0.0, mu, h);
                let closed =
                    h * h * (1.0 + mu * mu) * (1.0 + 2.0 * mu * mu) / ((h * h + 1.0) * mu * mu + h * h);
                assert!((tp - closed).abs() < 1e-12 * closed, "h={h} mu={mu}");
                assert!(tp > 0.0);
            }
        }
    }

    #[test]
    fn factored_rhs_matches_the_expanded_system() {
        // Deterministic pseudo-random states.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..10_000 {
            let tau = 10.0 * next() - 5.0;
            let mu = 10.0 * next() - 5.0;
            let h = 0.1 + 3.0 * next();
            let r2 = tau * tau + mu * mu;
            let u = tau + h * mu;
            let den = h * ((h * h + 1.0) * r2 + h * h);
            let tp_expanded = 1.0
                + (2.0 * (h * h + u * u) * ((h + 1.0) * tau * mu + h * mu * mu)
                    + h * h * tau * mu
                    - h * mu * mu)
                    / den;
            let mp_expanded = -(2.0 * (h * h + u * u) * ((h + 1.0) * tau * tau + h * tau * mu)
                + h * h * tau * tau
                - h * tau * mu)
                / den;
            let (tp, mp) = system_rhs(tau, mu, h);
            let scale = tp.abs().max(mp.abs()).max(1.0);
            assert!((tp - tp_expanded).abs() < 1e-12 * scale);
            assert!((mp - mp_expanded).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn mean_curvature_closed_forms_agree() {
        assert_eq!(helicoid_mean_curvature(0.0, 0.0, 1.0), 0.0);
        assert!((rotator_target_h(1.0, 0.0, 1.0) - 1.0 / 2.0_f64.sqrt()).abs() < 1e-15);
        assert_eq!(rotator_target_h(0.0, 3.7, 2.0), 0.0);
        assert!(helicoid_mean_curvature(0.0, 1.0, 1.0).abs() < 1e-15);
        for h in [0.5, 1.0, 2.0] {
            for tau in [-2.0, 0.1, 1.5] {
                for mu in [-1.0, 0.0, 2.5] {
                    let a = helicoid_mean_curvature(tau, mu, h);
                    let b = rotator_target_h(tau, mu, h);
                    assert!((a - b).abs() < 1e-12, "h={h} tau={tau} mu={mu}: {a} vs {b}");
                    // sign(H) = sign(tau): the denominator is positive.
                    if tau != 0.0 {
                        assert_eq!(b.signum(), tau.signum());
                    } else {
                        assert_eq!(b, 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn equivalence_residual_vanishes() {
        for h in [0.5, 1.0, 2.0] {
            for tau in [-3.0, 0.0, 0.7] {
                for mu in [-1.2, 0.0, 4.0] {
                    assert!(rotator_translator_equivalence_residual(tau, mu, h).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn phase_portrait_has_no_zero_arrows() {
        let arrows = phase_portrait(1.0, 21, 5.0).unwrap();
        assert_eq!(arrows.len(), 441);
        for a in &arrows {
            let n = (a.dtau * a.dtau + a.dmu * a.dmu).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
        // The arrow at the origin points along +tau.
        let origin = arrows
            .iter()
            .find(|a| a.tau == 0.0 && a.mu == 0.0)
            .unwrap();
        assert!((origin.dtau - 1.0).abs() < 1e-15 && origin.dmu.abs() < 1e-15);
        assert!(phase_portrait(0.0, 21, 5.0).is_err());
        assert!(phase_portrait(1.0, 1, 5.0).is_err());
    }

    #[test]
    fn parameter_guards() {
        let cfg = IntegrationConfig::default();
        assert!(integrate_rotator(0.0, 0.0, -1.0, 5.0, &cfg).is_err());
        assert!(integrate_rotator(1.0, 0.0, f64::NAN, 5.0, &cfg).is_err());
        assert!(integrate_rotator(1.0, 0.0, -1.0, 0.0, &cfg).is_err());
        assert!(winding_at(1.0, 0.0, 10.0, &cfg).is_err());
    }
}
