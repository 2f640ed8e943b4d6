//! Adaptive explicit Runge–Kutta integration for all ODEs in the crate.
//!
//! The method is the Dormand–Prince 5(4) embedded pair with its free
//! 4th-order continuous extension. Each accepted step stores the dense
//! interpolant, so events can be located by sign-change bisection on the
//! continuous solution and profile curves can be resampled anywhere.
//!
//! Blow-up is an expected outcome, not an error: the profile charts have
//! `|slope| -> infinity` at chart boundaries. When the step controller
//! drives the step below `min_step` the integration stops gracefully with
//! [`StopReason::BlowUp`] and the last valid state; a right-hand side that
//! returns non-finite values stops with [`StopReason::DomainExit`].

mod dopri5;
mod hermite;
mod trajectory;

pub use hermite::QuinticHermite;
pub use trajectory::{locate_zero, DenseSegment, Sample, StopReason, Trajectory};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("initial state length {got} does not match problem dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("t_end = {t_end} is not on the {direction:?} side of t0 = {t0}")]
    BadTimeSpan {
        t0: f64,
        t_end: f64,
        direction: Direction,
    },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("initial state or derivative is not finite")]
    BadInitialState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

/// An initial value problem `y' = rhs(t, y)`, `y(t0) = y0`.
pub struct OdeProblem {
    pub dimension: usize,
    pub t0: f64,
    pub y0: Vec<f64>,
    pub direction: Direction,
    rhs: Box<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>,
}

impl OdeProblem {
    pub fn new(
        t0: f64,
        y0: Vec<f64>,
        direction: Direction,
        rhs: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        OdeProblem {
            dimension: y0.len(),
            t0,
            y0,
            direction,
            rhs: Box::new(rhs),
        }
    }

    pub fn eval_rhs(&self, t: f64, y: &[f64], out: &mut [f64]) {
        (self.rhs)(t, y, out)
    }
}

/// A named stopping condition: the integration halts at the first
/// sign-change root of `g(t, y)` along the solution.
pub struct StopEvent {
    pub name: String,
    g: Box<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>,
}

impl StopEvent {
    pub fn new(name: &str, g: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        StopEvent {
            name: name.to_string(),
            g: Box::new(g),
        }
    }

    pub fn eval(&self, t: f64, y: &[f64]) -> f64 {
        (self.g)(t, y)
    }
}

/// Bisection tolerance for event location, in the independent variable.
pub const EVENT_TIME_TOL: f64 = 1e-12;

pub struct IntegrationConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    pub stop_events: Vec<StopEvent>,
    /// When false, only the first and last samples are kept and no dense
    /// segments are stored (events are still located on the fly). Used for
    /// very long runs where only the endpoint matters.
    pub store_trajectory: bool,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            min_step: 1e-13,
            max_steps: 100_000_000,
            stop_events: Vec::new(),
            store_trajectory: true,
        }
    }
}

impl IntegrationConfig {
    pub fn with_tols(rel: f64, abs: f64) -> Self {
        IntegrationConfig {
            rel_tol: rel,
            abs_tol: abs,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), OdeError> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(OdeError::BadConfig("tolerances must be positive".into()));
        }
        if !(self.min_step > 0.0 && self.min_step <= self.max_step) {
            return Err(OdeError::BadConfig(
                "need 0 < min_step <= max_step".into(),
            ));
        }
        Ok(())
    }
}

/// Integrates the problem until `t_end`, a stop event, blow-up, domain
/// exit, or the step budget, whichever comes first.
pub fn integrate(
    problem: &OdeProblem,
    cfg: &IntegrationConfig,
    t_end: f64,
) -> Result<Trajectory, OdeError> {
    cfg.validate()?;
    if problem.y0.len() != problem.dimension {
        return Err(OdeError::DimensionMismatch {
            expected: problem.dimension,
            got: problem.y0.len(),
        });
    }
    let sign = problem.direction.sign();
    if (t_end - problem.t0) * sign <= 0.0 {
        return Err(OdeError::BadTimeSpan {
            t0: problem.t0,
            t_end,
            direction: problem.direction,
        });
    }
    dopri5::run(problem, cfg, t_end)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_problem() -> OdeProblem {
        OdeProblem::new(0.0, vec![1.0], Direction::Forward, |_t, y, dy| {
            dy[0] = y[0]
        })
    }

    #[test]
    fn constant_rhs_stays_constant() {
        let p = OdeProblem::new(0.0, vec![1.0], Direction::Forward, |_t, _y, dy| {
            dy[0] = 0.0
        });
        let tr = integrate(&p, &IntegrationConfig::default(), 10.0).unwrap();
        assert_eq!(tr.stop_reason, StopReason::MaxTime);
        for s in tr.samples() {
            assert_eq!(s.y[0], 1.0);
        }
        assert_eq!(tr.last().t, 10.0);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let tr = integrate(&exp_problem(), &IntegrationConfig::default(), 1.0).unwrap();
        let e = std::f64::consts::E;
        assert!(
            (tr.last().y[0] - e).abs() < 1e-9,
            "y(1) = {}, err = {:e}",
            tr.last().y[0],
            (tr.last().y[0] - e).abs()
        );
    }

    #[test]
    fn halving_rel_tol_never_increases_exponential_error() {
        let e = std::f64::consts::E;
        let mut rel = 1e-5;
        let mut prev_err = f64::INFINITY;
        while rel > 0.9e-11 {
            let cfg = IntegrationConfig::with_tols(rel, rel * 1e-2);
            let tr = integrate(&exp_problem(), &cfg, 1.0).unwrap();
            let err = (tr.last().y[0] - e).abs();
            assert!(
                err <= prev_err,
                "rel_tol {rel:e}: err {err:e} > previous {prev_err:e}"
            );
            prev_err = err;
            rel *= 0.5;
        }
    }

    #[test]
    fn dense_output_reproduces_nodes_exactly() {
        let tr = integrate(&exp_problem(), &IntegrationConfig::default(), 1.0).unwrap();
        for s in tr.samples() {
            let y = tr.eval(s.t).unwrap();
            assert_eq!(y[0], s.y[0], "dense output differs at node t = {}", s.t);
        }
        // And is accurate between nodes.
        for i in 0..20 {
            let t = i as f64 / 20.0;
            let y = tr.eval(t).unwrap();
            assert!((y[0] - t.exp()).abs() < 1e-9);
        }
    }

    #[test]
    fn integration_is_deterministic() {
        let run = || {
            let p = OdeProblem::new(0.0, vec![1.0, 0.0], Direction::Forward, |_t, y, dy| {
                dy[0] = -y[1];
                dy[1] = y[0];
            });
            integrate(&p, &IntegrationConfig::default(), 7.0).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.samples().len(), b.samples().len());
        for (sa, sb) in a.samples().iter().zip(b.samples()) {
            assert!(sa.t.to_bits() == sb.t.to_bits());
            assert!(sa.y[0].to_bits() == sb.y[0].to_bits());
            assert!(sa.y[1].to_bits() == sb.y[1].to_bits());
        }
    }

    #[test]
    fn blow_up_stops_gracefully() {
        // y' = y^2, y(0) = 1 blows up at t = 1.
        let p = OdeProblem::new(0.0, vec![1.0], Direction::Forward, |_t, y, dy| {
            dy[0] = y[0] * y[0]
        });
        let tr = integrate(&p, &IntegrationConfig::default(), 2.0).unwrap();
        assert!(
            matches!(tr.stop_reason, StopReason::BlowUp | StopReason::DomainExit),
            "got {:?}",
            tr.stop_reason
        );
        assert!((tr.last().t - 1.0).abs() < 1e-3, "stopped at {}", tr.last().t);
        assert!(tr.last().y[0].is_finite());
    }

    #[test]
    fn non_finite_rhs_is_domain_exit() {
        // 1/(1-t) integrand crosses its pole; sqrt of negative exits the domain.
        let p = OdeProblem::new(0.0, vec![0.0], Direction::Forward, |t, _y, dy| {
            dy[0] = (1.0 - t).sqrt()
        });
        let tr = integrate(&p, &IntegrationConfig::default(), 2.0).unwrap();
        assert_eq!(tr.stop_reason, StopReason::DomainExit);
        assert!(tr.last().t <= 1.0 + 1e-9);
    }

    #[test]
    fn stop_event_is_bisected_to_tolerance() {
        // y = t^2/2; event at y = 2 means t = 2.
        let p = OdeProblem::new(0.0, vec![0.0], Direction::Forward, |t, _y, dy| {
            dy[0] = t
        });
        let mut cfg = IntegrationConfig::default();
        cfg.stop_events.push(StopEvent::new("level", |_t, y| y[0] - 2.0));
        let tr = integrate(&p, &cfg, 10.0).unwrap();
        assert_eq!(tr.stop_reason, StopReason::Event("level".into()));
        assert!((tr.last().t - 2.0).abs() < 1e-9);
    }

    #[test]
    fn backward_integration_runs() {
        let p = OdeProblem::new(0.0, vec![1.0], Direction::Backward, |_t, y, dy| {
            dy[0] = y[0]
        });
        let tr = integrate(&p, &IntegrationConfig::default(), -1.0).unwrap();
        assert!((tr.last().y[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert!(integrate(&p, &IntegrationConfig::default(), 1.0).is_err());
    }

    #[test]
    fn max_steps_is_reported() {
        let p = OdeProblem::new(0.0, vec![1.0], Direction::Forward, |_t, y, dy| {
            dy[0] = y[0]
        });
        let cfg = IntegrationConfig {
            max_steps: 3,
            ..Default::default()
        };
        let tr = integrate(&p, &cfg, 1e6).unwrap();
        assert_eq!(tr.stop_reason, StopReason::MaxSteps);
    }
}
