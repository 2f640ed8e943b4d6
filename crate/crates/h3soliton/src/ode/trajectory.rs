//! Sampled ODE solutions with per-step dense output.

use super::EVENT_TIME_TOL;

/// Why an integration ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    /// A named stop event fired.
    Event(String),
    /// The requested end of the integration interval was reached.
    MaxTime,
    /// The step budget was exhausted.
    MaxSteps,
    /// The step controller collapsed the step below `min_step`.
    BlowUp,
    /// The right-hand side produced non-finite values.
    DomainExit,
}

/// One accepted node: time, state, and state derivative.
#[derive(Debug, Clone)]
pub struct Sample {
    pub t: f64,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Dense-output polynomial of one accepted step, valid on the closed
/// interval between `t_start` and `t_limit`.
///
/// Evaluation uses the Dormand–Prince continuous extension
/// `y(t0 + th*h) = c1 + th*(c2 + (1-th)*(c3 + th*(c4 + (1-th)*c5)))`.
#[derive(Debug, Clone)]
pub struct DenseSegment {
    pub t_start: f64,
    /// Full step length (signed); the normalization for the polynomial.
    pub h: f64,
    /// End of validity; equals `t_start + h` unless truncated by an event.
    pub t_limit: f64,
    c1: Vec<f64>,
    c2: Vec<f64>,
    c3: Vec<f64>,
    c4: Vec<f64>,
    c5: Vec<f64>,
}

impl DenseSegment {
    pub fn new(
        t_start: f64,
        h: f64,
        c1: Vec<f64>,
        c2: Vec<f64>,
        c3: Vec<f64>,
        c4: Vec<f64>,
        c5: Vec<f64>,
    ) -> Self {
        DenseSegment {
            t_start,
            h,
            t_limit: t_start + h,
            c1,
            c2,
            c3,
            c4,
            c5,
        }
    }

    pub fn dimension(&self) -> usize {
        self.c1.len()
    }

    pub fn contains(&self, t: f64) -> bool {
        let lo = self.t_start.min(self.t_limit);
        let hi = self.t_start.max(self.t_limit);
        t >= lo && t <= hi
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let th = (t - self.t_start) / self.h;
        let th1 = 1.0 - th;
        for i in 0..self.c1.len() {
            out[i] = self.c1[i]
                + th * (self.c2[i] + th1 * (self.c3[i] + th * (self.c4[i] + th1 * self.c5[i])));
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.c1.len()];
        self.eval_into(t, &mut out);
        out
    }

    fn project(&self, components: &[usize]) -> DenseSegment {
        let pick = |v: &Vec<f64>| components.iter().map(|&i| v[i]).collect();
        DenseSegment {
            t_start: self.t_start,
            h: self.h,
            t_limit: self.t_limit,
            c1: pick(&self.c1),
            c2: pick(&self.c2),
            c3: pick(&self.c3),
            c4: pick(&self.c4),
            c5: pick(&self.c5),
        }
    }
}

/// An adaptively sampled ODE solution. Sample times are strictly monotone
/// in the presentation direction, and the dense interpolant reproduces the
/// stored states exactly at the nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    samples: Vec<Sample>,
    segments: Vec<DenseSegment>,
    pub stop_reason: StopReason,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>, segments: Vec<DenseSegment>, stop_reason: StopReason) -> Self {
        Trajectory {
            samples,
            segments,
            stop_reason,
        }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    pub fn dimension(&self) -> usize {
        self.samples.first().map_or(0, |s| s.y.len())
    }

    pub fn first(&self) -> &Sample {
        self.samples.first().expect("trajectory has samples")
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has samples")
    }

    pub fn t_range(&self) -> (f64, f64) {
        let a = self.first().t;
        let b = self.last().t;
        (a.min(b), a.max(b))
    }

    /// Dense-output evaluation; `None` outside the sampled range.
    pub fn eval(&self, t: f64) -> Option<Vec<f64>> {
        let seg = self.segment_for(t)?;
        Some(seg.eval(t))
    }

    fn segment_for(&self, t: f64) -> Option<&DenseSegment> {
        if self.segments.is_empty() {
            return None;
        }
        let ascending = self.first().t <= self.last().t;
        // Binary search over segments ordered in presentation direction.
        let idx = self.segments.partition_point(|seg| {
            let hi = seg.t_start.max(seg.t_limit);
            let lo = seg.t_start.min(seg.t_limit);
            if ascending {
                hi < t
            } else {
                lo > t
            }
        });
        let seg = self.segments.get(idx)?;
        seg.contains(t).then_some(seg)
    }

    /// The same solution presented with reversed sample order, so that a
    /// backward run reads as a forward-oriented arc.
    pub fn reversed(mut self) -> Trajectory {
        self.samples.reverse();
        self.segments.reverse();
        self
    }

    /// Concatenates two trajectories that share their junction node; the
    /// duplicate node is dropped and the tail's stop reason is kept.
    pub fn concat(mut self, mut tail: Trajectory) -> Trajectory {
        assert!(
            (self.last().t - tail.first().t).abs() <= 1e-12,
            "trajectories do not share a junction node"
        );
        self.samples.pop();
        self.samples.append(&mut tail.samples);
        self.segments.append(&mut tail.segments);
        self.stop_reason = tail.stop_reason;
        self
    }

    /// Keeps only the chosen state components (samples and dense output).
    pub fn project(&self, components: &[usize]) -> Trajectory {
        let samples = self
            .samples
            .iter()
            .map(|s| Sample {
                t: s.t,
                y: components.iter().map(|&i| s.y[i]).collect(),
                dy: components.iter().map(|&i| s.dy[i]).collect(),
            })
            .collect();
        let segments = self.segments.iter().map(|g| g.project(components)).collect();
        Trajectory {
            samples,
            segments,
            stop_reason: self.stop_reason.clone(),
        }
    }
}

/// All sign-change roots of a scalar functional of `(t, y)` along the dense
/// output, each bisected to [`EVENT_TIME_TOL`] in `t`. Roots sitting exactly
/// on a node are returned as that node. The list is empty when the scalar
/// never changes sign.
pub fn locate_zero(tr: &Trajectory, scalar: impl Fn(f64, &[f64]) -> f64) -> Vec<f64> {
    let mut roots: Vec<f64> = Vec::new();
    let samples = tr.samples();
    if samples.is_empty() {
        return roots;
    }
    let push = |t: f64, roots: &mut Vec<f64>| {
        if roots
            .last()
            .map_or(true, |&r| (r - t).abs() > EVENT_TIME_TOL)
        {
            roots.push(t);
        }
    };
    let g0 = scalar(samples[0].t, &samples[0].y);
    if g0 == 0.0 {
        push(samples[0].t, &mut roots);
    }
    let mut g_prev = g0;
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let g1 = scalar(b.t, &b.y);
        if g1 == 0.0 {
            push(b.t, &mut roots);
        } else if g_prev != 0.0 && g_prev.signum() != g1.signum() {
            let t = bisect_on_dense(tr, &scalar, a.t, b.t, g_prev);
            push(t, &mut roots);
        }
        g_prev = g1;
    }
    roots
}

pub(super) fn bisect_on_dense(
    tr: &Trajectory,
    scalar: &impl Fn(f64, &[f64]) -> f64,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
) -> f64 {
    let mut sign_lo = g_lo.signum();
    while (hi - lo).abs() > EVENT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let y = tr
            .eval(mid)
            .expect("bisection interval lies inside the trajectory");
        let g = scalar(mid, &y);
        if g == 0.0 {
            return mid;
        }
        if g.signum() == sign_lo {
            lo = mid;
            sign_lo = g.signum();
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate, Direction, IntegrationConfig, OdeProblem};

    fn line_problem() -> Trajectory {
        // y(t) = t - 2 on [0, 4].
        let p = OdeProblem::new(0.0, vec![-2.0], Direction::Forward, |_t, _y, dy| {
            dy[0] = 1.0
        });
        integrate(&p, &IntegrationConfig::default(), 4.0).unwrap()
    }

    #[test]
    fn linear_root_is_found() {
        let tr = line_problem();
        let roots = locate_zero(&tr, |_t, y| y[0]);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn constant_positive_has_no_roots() {
        let p = OdeProblem::new(0.0, vec![1.0], Direction::Forward, |_t, _y, dy| {
            dy[0] = 0.0
        });
        let tr = integrate(&p, &IntegrationConfig::default(), 4.0).unwrap();
        assert!(locate_zero(&tr, |_t, y| y[0]).is_empty());
    }

    #[test]
    fn derived_functional_roots() {
        // sin via y'' = -y: roots of y at pi, 2pi, ...
        let p = OdeProblem::new(0.0, vec![0.0, 1.0], Direction::Forward, |_t, y, dy| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let tr = integrate(&p, &IntegrationConfig::default(), 10.0).unwrap();
        let roots = locate_zero(&tr, |_t, y| y[0]);
        // t = 0 is an exact node zero, then pi, 2pi, 3pi.
        assert_eq!(roots.len(), 4);
        assert_eq!(roots[0], 0.0);
        for (k, r) in roots[1..].iter().enumerate() {
            assert!((r - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-9);
        }
    }

    #[test]
    fn projection_keeps_samples_and_dense() {
        let p = OdeProblem::new(0.0, vec![0.0, 1.0], Direction::Forward, |_t, y, dy| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let tr = integrate(&p, &IntegrationConfig::default(), 3.0).unwrap();
        let pr = tr.project(&[1]);
        assert_eq!(pr.dimension(), 1);
        let y = pr.eval(1.5).unwrap();
        assert!((y[0] - 1.5f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn reversed_concat_forms_monotone_arc() {
        let mk = |dir: Direction, t_end: f64| {
            let p = OdeProblem::new(0.0, vec![1.0], dir, |_t, y, dy| dy[0] = y[0]);
            integrate(&p, &IntegrationConfig::default(), t_end).unwrap()
        };
        let back = mk(Direction::Backward, -1.0);
        let fwd = mk(Direction::Forward, 1.0);
        let arc = back.reversed().concat(fwd);
        let ts: Vec<f64> = arc.samples().iter().map(|s| s.t).collect();
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        for t in [-0.9, -0.3, 0.0, 0.4, 1.0] {
            assert!((arc.eval(t).unwrap()[0] - t.exp()).abs() < 1e-9);
        }
    }
}
