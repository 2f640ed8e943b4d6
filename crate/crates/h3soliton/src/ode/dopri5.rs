//! The Dormand–Prince 5(4) stepper with its 4th-order continuous extension.

use super::trajectory::{DenseSegment, Sample, StopReason, Trajectory};
use super::{IntegrationConfig, OdeError, OdeProblem, EVENT_TIME_TOL};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
// Embedded 4th-order error weights (b5 - b4).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous-extension weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_SHRINK_MAX: f64 = 5.0; // h may shrink at most 5x per step
const FAC_GROW_MAX: f64 = 10.0; // and grow at most 10x

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn rms_scaled(v: &[f64], sk: &[f64]) -> f64 {
    let s: f64 = v
        .iter()
        .zip(sk)
        .map(|(x, s)| (x / s) * (x / s))
        .sum::<f64>();
    (s / v.len() as f64).sqrt()
}

/// Hairer's starting-step heuristic.
fn initial_step(
    problem: &OdeProblem,
    cfg: &IntegrationConfig,
    t_end: f64,
    y0: &[f64],
    f0: &[f64],
) -> f64 {
    let n = problem.dimension;
    let sign = problem.direction.sign();
    let span = (t_end - problem.t0).abs();
    let sk: Vec<f64> = y0
        .iter()
        .map(|y| cfg.abs_tol + cfg.rel_tol * y.abs())
        .collect();
    let d0 = rms_scaled(y0, &sk);
    let d1 = rms_scaled(f0, &sk);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    }
    .min(span)
    .min(cfg.max_step);

    let mut y1 = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    for i in 0..n {
        y1[i] = y0[i] + sign * h0 * f0[i];
    }
    problem.eval_rhs(problem.t0 + sign * h0, &y1, &mut f1);
    if !all_finite(&f1) {
        return sign * (1e-8 * span).min(h0);
    }
    let mut diff = vec![0.0; n];
    for i in 0..n {
        diff[i] = f1[i] - f0[i];
    }
    let d2 = rms_scaled(&diff, &sk) / h0;
    let der12 = d1.max(d2);
    let h1 = if der12 <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    sign * (100.0 * h0).min(h1).min(span).min(cfg.max_step)
}

pub(super) fn run(
    problem: &OdeProblem,
    cfg: &IntegrationConfig,
    t_end: f64,
) -> Result<Trajectory, OdeError> {
    let n = problem.dimension;
    let sign = problem.direction.sign();

    let mut t = problem.t0;
    let mut y = problem.y0.clone();
    let mut k1 = vec![0.0; n];
    problem.eval_rhs(t, &y, &mut k1);
    if !all_finite(&y) || !all_finite(&k1) {
        return Err(OdeError::BadInitialState);
    }

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut y_stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut err_vec = vec![0.0; n];
    let mut sk = vec![0.0; n];

    let mut samples = vec![Sample {
        t,
        y: y.clone(),
        dy: k1.clone(),
    }];
    let mut segments: Vec<DenseSegment> = Vec::new();
    let mut g_now: Vec<f64> = cfg.stop_events.iter().map(|e| e.eval(t, &y)).collect();

    let mut h = initial_step(problem, cfg, t_end, &y, &k1);
    let mut facold: f64 = 1e-4;
    let mut rejected_last = false;
    let mut nonfinite_last = false;
    let mut steps = 0usize;

    let stop_reason = 'outer: loop {
        if steps >= cfg.max_steps {
            break StopReason::MaxSteps;
        }
        steps += 1;

        if (t + h - t_end) * sign >= 0.0 {
            h = t_end - t;
        }
        if h.abs() < cfg.min_step || t + h == t {
            break if nonfinite_last {
                StopReason::DomainExit
            } else {
                StopReason::BlowUp
            };
        }

        // Stages (k1 carried over, first-same-as-last).
        for i in 0..n {
            y_stage[i] = y[i] + h * A21 * k1[i];
        }
        problem.eval_rhs(t + C2 * h, &y_stage, &mut k2);
        for i in 0..n {
            y_stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        problem.eval_rhs(t + C3 * h, &y_stage, &mut k3);
        for i in 0..n {
            y_stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        problem.eval_rhs(t + C4 * h, &y_stage, &mut k4);
        for i in 0..n {
            y_stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        problem.eval_rhs(t + C5 * h, &y_stage, &mut k5);
        for i in 0..n {
            y_stage[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        problem.eval_rhs(t + h, &y_stage, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        problem.eval_rhs(t + h, &y_new, &mut k7);

        if !(all_finite(&y_new) && all_finite(&k7) && all_finite(&k6) && all_finite(&k5)) {
            nonfinite_last = true;
            rejected_last = true;
            h *= 0.5;
            continue;
        }
        nonfinite_last = false;

        for i in 0..n {
            err_vec[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            sk[i] = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
        }
        let err = rms_scaled(&err_vec, &sk);

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            // Accepted.
            let fac = (fac11 / facold.powf(BETA) / SAFETY)
                .clamp(1.0 / FAC_GROW_MAX, FAC_SHRINK_MAX);
            facold = err.max(1e-4);
            let t1 = t + h;

            // Stop events: sign change against the previous node, ties at
            // the new node resolve to the node.
            let mut fired: Option<(f64, usize)> = None;
            let mut segment: Option<DenseSegment> = None;
            if !cfg.stop_events.is_empty() {
                for (i, ev) in cfg.stop_events.iter().enumerate() {
                    let g1 = ev.eval(t1, &y_new);
                    let cand = if g1 == 0.0 {
                        Some(t1)
                    } else if g_now[i] != 0.0 && g_now[i].signum() != g1.signum() {
                        let seg = segment.get_or_insert_with(|| {
                            make_segment(t, h, &y, &y_new, &k1, &k3, &k4, &k5, &k6, &k7)
                        });
                        Some(bisect_segment(seg, |tt, yy| ev.eval(tt, yy), t, t1, g_now[i]))
                    } else {
                        None
                    };
                    if let Some(te) = cand {
                        let earlier = fired.map_or(true, |(tf, _)| (te - tf) * sign < 0.0);
                        if earlier {
                            fired = Some((te, i));
                        }
                    }
                    g_now[i] = g1;
                }
            }

            if let Some((t_ev, idx)) = fired {
                let mut seg = segment.unwrap_or_else(|| {
                    make_segment(t, h, &y, &y_new, &k1, &k3, &k4, &k5, &k6, &k7)
                });
                seg.t_limit = t_ev;
                let y_ev = seg.eval(t_ev);
                let mut dy_ev = vec![0.0; n];
                problem.eval_rhs(t_ev, &y_ev, &mut dy_ev);
                if cfg.store_trajectory {
                    segments.push(seg);
                }
                samples.push(Sample {
                    t: t_ev,
                    y: y_ev,
                    dy: dy_ev,
                });
                break 'outer StopReason::Event(cfg.stop_events[idx].name.clone());
            }

            if cfg.store_trajectory {
                segments.push(segment.unwrap_or_else(|| {
                    make_segment(t, h, &y, &y_new, &k1, &k3, &k4, &k5, &k6, &k7)
                }));
                samples.push(Sample {
                    t: t1,
                    y: y_new.clone(),
                    dy: k7.clone(),
                });
            }

            t = t1;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);

            if t == t_end {
                break StopReason::MaxTime;
            }

            let mut h_new = h / fac;
            if rejected_last {
                // No growth right after a rejection.
                h_new = sign * h_new.abs().min(h.abs());
                rejected_last = false;
            }
            h = sign * h_new.abs().min(cfg.max_step);
        } else {
            rejected_last = true;
            h /= (fac11 / SAFETY).min(FAC_SHRINK_MAX);
        }
    };

    if !cfg.store_trajectory {
        // Keep the start node and append the final state.
        let mut dy = vec![0.0; n];
        problem.eval_rhs(t, &y, &mut dy);
        samples.push(Sample { t, y, dy });
    }
    Ok(Trajectory::new(samples, segments, stop_reason))
}

#[allow(clippy::too_many_arguments)]
fn make_segment(
    t: f64,
    h: f64,
    y: &[f64],
    y_new: &[f64],
    k1: &[f64],
    k3: &[f64],
    k4: &[f64],
    k5: &[f64],
    k6: &[f64],
    k7: &[f64],
) -> DenseSegment {
    let n = y.len();
    let mut c1 = vec![0.0; n];
    let mut c2 = vec![0.0; n];
    let mut c3 = vec![0.0; n];
    let mut c4 = vec![0.0; n];
    let mut c5 = vec![0.0; n];
    for i in 0..n {
        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        c1[i] = y[i];
        c2[i] = ydiff;
        c3[i] = bspl;
        c4[i] = ydiff - h * k7[i] - bspl;
        c5[i] = h
            * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    DenseSegment::new(t, h, c1, c2, c3, c4, c5)
}

/// Bisects one event on a single step's dense output.
fn bisect_segment(
    seg: &DenseSegment,
    g: impl Fn(f64, &[f64]) -> f64,
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
) -> f64 {
    let mut buf = vec![0.0; seg.dimension()];
    let mut sign_lo = g_lo.signum();
    while (hi - lo).abs() > EVENT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        seg.eval_into(mid, &mut buf);
        let gm = g(mid, &buf);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == sign_lo {
            lo = mid;
            sign_lo = gm.signum();
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
