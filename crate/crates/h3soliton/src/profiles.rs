//! Profile curves of the rotational and parabolic translators.
//!
//! A rotational translator is swept by a profile curve in the
//! (distance-to-axis, height) half-plane. Near the neck the curve is a
//! horizontal graph `d(z)` solving `d'' = (1+d'^2)(2d/z^2 + 1/d)`; away
//! from it, a vertical graph `phi(s)` solving
//! `phi'' = -phi'(1+phi'^2)(2s/phi^2 + 1/s)`. [`solve_catenoid`] integrates
//! the horizontal chart from the neck, hands over to the vertical chart
//! once `|slope| > 10`, and stops when the slope has collapsed; the
//! horosphere heights `r^-`, `r^+` the two ends converge to are then
//! enclosed in certified brackets. Grim reapers run the same machinery on
//! the parabolic cylinder equation `f'' = -f'(1+f'^2) 2y/f^2`.

use crate::ode::{
    integrate, Direction, IntegrationConfig, OdeProblem, StopEvent, StopReason, Trajectory,
};
use std::f64::consts::PI;
use thiserror::Error;

/// A chart is left once the graph slope exceeds this in magnitude.
pub const CHART_SWITCH_SLOPE: f64 = 10.0;
/// Default asymptote stopping rule: stop once `|slope|` falls below this.
pub const ASYMPTOTE_SLOPE: f64 = 1e-9;
/// Hard cap on the vertical-chart abscissa.
pub const MAX_CHART_ABSCISSA: f64 = 1e6;

/// The universal upper bound `e^{pi/(4 sqrt 2)}` on the top asymptote
/// height `r^+` of every translating catenoid.
pub fn upper_asymptote_bound() -> f64 {
    (PI / (4.0 * 2.0_f64.sqrt())).exp()
}

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction failed at {stage}: {detail}")]
    Construction { stage: &'static str, detail: String },
    #[error("contract violation: {0}")]
    Contract(String),
}

/// Right-hand side of the vertical-chart equation
/// `phi'' = -phi'(1+phi'^2)(2s/phi^2 + 1/s)`.
pub fn rhs_vertical_rotational(s: f64, phi: f64, phi_p: f64) -> Result<f64, ProfileError> {
    if !(s > 0.0 && phi > 0.0) {
        return Err(ProfileError::Domain(format!(
            "vertical chart needs s > 0 and phi > 0, got s = {s}, phi = {phi}"
        )));
    }
    Ok(vertical_rhs_raw(s, phi, phi_p))
}

fn vertical_rhs_raw(s: f64, phi: f64, phi_p: f64) -> f64 {
    -phi_p * (1.0 + phi_p * phi_p) * (2.0 * s / (phi * phi) + 1.0 / s)
}

/// Right-hand side of the horizontal-chart equation
/// `d'' = (1+d'^2)(2d/z^2 + 1/d)`; always positive, so `d` is strictly convex.
pub fn rhs_horizontal_rotational(z: f64, d: f64, d_p: f64) -> Result<f64, ProfileError> {
    if !(z > 0.0 && d > 0.0) {
        return Err(ProfileError::Domain(format!(
            "horizontal chart needs z > 0 and d > 0, got z = {z}, d = {d}"
        )));
    }
    Ok(horizontal_rhs_raw(z, d, d_p))
}

fn horizontal_rhs_raw(z: f64, d: f64, d_p: f64) -> f64 {
    (1.0 + d_p * d_p) * (2.0 * d / (z * z) + 1.0 / d)
}

/// Right-hand side of the parabolic-cylinder equation
/// `f'' = -f'(1+f'^2) 2y/f^2`.
pub fn rhs_parabolic(y: f64, f: f64, f_p: f64) -> Result<f64, ProfileError> {
    if !(f > 0.0) {
        return Err(ProfileError::Domain(format!(
            "parabolic cylinder needs f > 0, got f = {f}"
        )));
    }
    Ok(parabolic_rhs_raw(y, f, f_p))
}

fn parabolic_rhs_raw(y: f64, f: f64, f_p: f64) -> f64 {
    -f_p * (1.0 + f_p * f_p) * 2.0 * y / (f * f)
}

/// State at a chart switch: height, distance to the axis, horizontal slope.
#[derive(Debug, Clone, Copy)]
pub struct ChartSwitch {
    pub z: f64,
    pub d: f64,
    pub d_slope: f64,
}

/// The three-chart profile curve of the translating catenoid `Sigma_r`,
/// with certified brackets for its asymptote heights.
#[derive(Debug, Clone)]
pub struct CatenoidProfile {
    /// Neck radius: Euclidean distance to the axis at height 1.
    pub r: f64,
    /// `d(z)` over `[z_low_switch, z_high_switch]`, presented with z increasing.
    pub horizontal_chart: Trajectory,
    /// Increasing branch `phi(s)`, `s >= upper_switch.d`.
    pub upper_vertical_chart: Trajectory,
    /// Decreasing branch `phi(s)`, `s >= lower_switch.d`.
    pub lower_vertical_chart: Trajectory,
    pub r_plus_bracket: [f64; 2],
    pub r_minus_bracket: [f64; 2],
    pub upper_switch: ChartSwitch,
    pub lower_switch: ChartSwitch,
}

/// Builds the catenoid profile with the default asymptote stopping rule.
pub fn solve_catenoid(r: f64, cfg: &IntegrationConfig) -> Result<CatenoidProfile, ProfileError> {
    solve_catenoid_with_stop(r, cfg, ASYMPTOTE_SLOPE)
}

pub fn solve_catenoid_with_stop(
    r: f64,
    cfg: &IntegrationConfig,
    stop_slope: f64,
) -> Result<CatenoidProfile, ProfileError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(ProfileError::InvalidParameter(format!(
            "neck radius must be positive and finite, got {r}"
        )));
    }

    let horizontal = |z: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = horizontal_rhs_raw(z, y[0], y[1]);
    };

    // Horizontal chart, neck upward until d' = +10.
    let up = {
        let problem = OdeProblem::new(1.0, vec![r, 0.0], Direction::Forward, horizontal);
        let cfg_up = chart_config(
            cfg,
            StopEvent::new("chart_switch", |_t, y| y[1] - CHART_SWITCH_SLOPE),
        );
        integrate(&problem, &cfg_up, 2.0).map_err(construction("horizontal chart up"))?
    };
    expect_event(&up, "chart_switch", "horizontal chart up")?;

    // Horizontal chart, neck downward until d' = -10.
    let down = {
        let problem = OdeProblem::new(1.0, vec![r, 0.0], Direction::Backward, horizontal);
        let cfg_dn = chart_config(
            cfg,
            StopEvent::new("chart_switch", |_t, y| y[1] + CHART_SWITCH_SLOPE),
        );
        integrate(&problem, &cfg_dn, 1e-4).map_err(construction("horizontal chart down"))?
    };
    expect_event(&down, "chart_switch", "horizontal chart down")?;

    let upper_switch = switch_state(&up);
    let lower_switch = switch_state(&down);
    let horizontal_chart = down.reversed().concat(up);

    let vertical = |s: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = vertical_rhs_raw(s, y[0], y[1]);
    };

    // Upper vertical chart: slope starts at +1/10 and decays to zero.
    let upper_vertical_chart = {
        let y0 = vec![upper_switch.z, 1.0 / upper_switch.d_slope];
        let problem = OdeProblem::new(upper_switch.d, y0, Direction::Forward, vertical);
        let cfg_v = chart_config(
            cfg,
            StopEvent::new("asymptote", move |_t, y| y[1] - stop_slope),
        );
        integrate(&problem, &cfg_v, MAX_CHART_ABSCISSA)
            .map_err(construction("upper vertical chart"))?
    };
    expect_settled(&upper_vertical_chart, "upper vertical chart")?;

    // Lower vertical chart: slope starts at -1/10 and rises to zero.
    let lower_vertical_chart = {
        let y0 = vec![lower_switch.z, 1.0 / lower_switch.d_slope];
        let problem = OdeProblem::new(lower_switch.d, y0, Direction::Forward, vertical);
        let cfg_v = chart_config(
            cfg,
            StopEvent::new("asymptote", move |_t, y| y[1] + stop_slope),
        );
        integrate(&problem, &cfg_v, MAX_CHART_ABSCISSA)
            .map_err(construction("lower vertical chart"))?
    };
    expect_settled(&lower_vertical_chart, "lower vertical chart")?;

    let r_plus_bracket = bracket_asymptote(&upper_vertical_chart)?;
    let r_minus_bracket = bracket_asymptote_decreasing(&lower_vertical_chart)?;

    let profile = CatenoidProfile {
        r,
        horizontal_chart,
        upper_vertical_chart,
        lower_vertical_chart,
        r_plus_bracket,
        r_minus_bracket,
        upper_switch,
        lower_switch,
    };
    profile.validate()?;
    Ok(profile)
}

fn chart_config(cfg: &IntegrationConfig, event: StopEvent) -> IntegrationConfig {
    IntegrationConfig {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        max_step: cfg.max_step,
        min_step: cfg.min_step,
        max_steps: cfg.max_steps,
        stop_events: vec![event],
        store_trajectory: true,
    }
}

fn construction(stage: &'static str) -> impl FnOnce(crate::ode::OdeError) -> ProfileError {
    move |e| ProfileError::Construction {
        stage,
        detail: e.to_string(),
    }
}

fn expect_event(tr: &Trajectory, name: &str, stage: &'static str) -> Result<(), ProfileError> {
    match &tr.stop_reason {
        StopReason::Event(n) if n == name => Ok(()),
        other => Err(ProfileError::Construction {
            stage,
            detail: format!(
                "expected {name} event, integration stopped with {other:?} at t = {}",
                tr.last().t
            ),
        }),
    }
}

fn expect_settled(tr: &Trajectory, stage: &'static str) -> Result<(), ProfileError> {
    match &tr.stop_reason {
        StopReason::Event(n) if n == "asymptote" => Ok(()),
        StopReason::MaxTime => Ok(()),
        other => Err(ProfileError::Construction {
            stage,
            detail: format!("stopped with {other:?} at t = {}", tr.last().t),
        }),
    }
}

fn switch_state(horizontal: &Trajectory) -> ChartSwitch {
    let s = horizontal.last();
    ChartSwitch {
        z: s.t,
        d: s.y[0],
        d_slope: s.y[1],
    }
}

impl CatenoidProfile {
    fn validate(&self) -> Result<(), ProfileError> {
        let bad = |detail: String| ProfileError::Construction {
            stage: "profile validation",
            detail,
        };
        let neck = self
            .horizontal_chart
            .samples()
            .iter()
            .find(|s| s.t == 1.0)
            .ok_or_else(|| bad("no sample at z = 1".into()))?;
        if neck.y[0] != self.r || neck.y[1] != 0.0 {
            return Err(bad(format!("neck state ({}, {})", neck.y[0], neck.y[1])));
        }
        for s in self.horizontal_chart.samples() {
            if !(s.dy[1] > 0.0) {
                return Err(bad(format!("d'' = {} <= 0 at z = {}", s.dy[1], s.t)));
            }
            if s.y[0] < self.r {
                return Err(bad(format!(
                    "d = {} below neck radius at z = {}",
                    s.y[0], s.t
                )));
            }
        }
        for s in self.upper_vertical_chart.samples() {
            if !(s.y[1] > 0.0 && s.dy[1] < 0.0) {
                return Err(bad(format!(
                    "upper chart not increasing-concave at s = {}: phi' = {}, phi'' = {}",
                    s.t, s.y[1], s.dy[1]
                )));
            }
        }
        for s in self.lower_vertical_chart.samples() {
            if !(s.y[1] < 0.0 && s.dy[1] > 0.0) {
                return Err(bad(format!(
                    "lower chart not decreasing-convex at s = {}: phi' = {}, phi'' = {}",
                    s.t, s.y[1], s.dy[1]
                )));
            }
        }
        let e = upper_asymptote_bound();
        let [plo, phi_] = self.r_plus_bracket;
        let [mlo, mhi] = self.r_minus_bracket;
        if !(1.0 < plo && plo <= phi_ && phi_ <= e + 1e-12) {
            return Err(bad(format!("r+ bracket [{plo}, {phi_}] outside (1, {e}]")));
        }
        if !(0.0 < mlo && mlo <= mhi && mhi < 1.0) {
            return Err(bad(format!("r- bracket [{mlo}, {mhi}] outside (0, 1)")));
        }
        // Chart glue: converting the vertical chart's first node back to the
        // horizontal chart must land on the switch state.
        for (sw, chart) in [
            (&self.upper_switch, &self.upper_vertical_chart),
            (&self.lower_switch, &self.lower_vertical_chart),
        ] {
            let first = chart.first();
            let ds = (first.t - sw.d).abs();
            let dz = (first.y[0] - sw.z).abs();
            let dslope = (first.y[1] * sw.d_slope - 1.0).abs();
            if ds > 1e-8 || dz > 1e-8 || dslope > 1e-8 {
                return Err(bad(format!(
                    "charts disagree at switch: ds = {ds:e}, dz = {dz:e}, slope defect = {dslope:e}"
                )));
            }
        }
        Ok(())
    }

    /// `r(r+ - 1)/r+` evaluated on the bracket's far endpoint; bounded by
    /// `pi/4` up to bracket slack.
    pub fn large_r_bound(&self) -> f64 {
        let hi = self.r_plus_bracket[1];
        self.r * (hi - 1.0) / hi
    }
}

/// Certified bracket `[lo, hi]` for the asymptote of an increasing concave
/// vertical chart: `lo` is the last computed height, and `hi` follows from
/// integrating `-phi''/(1+phi'^2) > 2 s0 phi'/phi^2` from the endpoint out
/// to infinity, clamped by the universal bound.
pub fn bracket_asymptote(upper_chart: &Trajectory) -> Result<[f64; 2], ProfileError> {
    let (s, phi, slope) = check_vertical_chart(upper_chart, true)?;
    let lo = phi;
    let x = phi * slope.atan() / (2.0 * s);
    let e = upper_asymptote_bound();
    let hi = if 1.0 - x > 0.0 { phi / (1.0 - x) } else { e };
    Ok([lo, hi.min(e)])
}

/// Mirrored bracket for a decreasing convex chart: the asymptote lies in
/// `[phi/(1 - phi*atan(phi')/(2s)), phi]` (the arctan term is negative).
pub fn bracket_asymptote_decreasing(lower_chart: &Trajectory) -> Result<[f64; 2], ProfileError> {
    let (s, phi, slope) = check_vertical_chart(lower_chart, false)?;
    let x = phi * slope.atan() / (2.0 * s);
    let lo = phi / (1.0 - x);
    Ok([lo, phi])
}

fn check_vertical_chart(
    chart: &Trajectory,
    increasing: bool,
) -> Result<(f64, f64, f64), ProfileError> {
    if chart.samples().is_empty() {
        return Err(ProfileError::Contract("empty chart".into()));
    }
    let mut prev = f64::NEG_INFINITY;
    for s in chart.samples() {
        let (value, slope) = if increasing {
            (s.y[0], s.y[1])
        } else {
            (-s.y[0], -s.y[1])
        };
        if slope < 0.0 || value < prev {
            return Err(ProfileError::Contract(format!(
                "chart is not monotone at s = {}: phi = {}, phi' = {}",
                s.t, s.y[0], s.y[1]
            )));
        }
        prev = value;
    }
    let last = chart.last();
    if last.y[1].abs() >= 1.0 {
        return Err(ProfileError::Contract(format!(
            "final slope {} has not settled below 1",
            last.y[1]
        )));
    }
    Ok((last.t, last.y[0], last.y[1]))
}

/// The grim reaper profile: the S-shaped solution of the parabolic IVP
/// `f(0) = 1, f'(0) = lambda`, with brackets for the two horosphere
/// heights bounding its slab.
#[derive(Debug, Clone)]
pub struct GrimReaperProfile {
    pub lambda: f64,
    /// `phi(y)` presented with y increasing over the integrated range.
    pub trajectory: Trajectory,
    pub lambda_plus_bracket: [f64; 2],
    pub lambda_minus_bracket: [f64; 2],
}

pub fn solve_grim_reaper(
    lambda: f64,
    span: f64,
    cfg: &IntegrationConfig,
) -> Result<GrimReaperProfile, ProfileError> {
    solve_grim_reaper_with_stop(lambda, span, cfg, ASYMPTOTE_SLOPE)
}

pub fn solve_grim_reaper_with_stop(
    lambda: f64,
    span: f64,
    cfg: &IntegrationConfig,
    stop_slope: f64,
) -> Result<GrimReaperProfile, ProfileError> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(ProfileError::InvalidParameter(format!(
            "lambda must be >= 0 (the profile for -lambda is a rotation by pi about the \
             z-axis of the same surface, congruent to it); got {lambda}"
        )));
    }
    if !(span.is_finite() && span > 0.0) {
        return Err(ProfileError::InvalidParameter(format!(
            "span must be positive and finite, got {span}"
        )));
    }

    let parabolic = |y: f64, f: &[f64], df: &mut [f64]| {
        df[0] = f[1];
        df[1] = parabolic_rhs_raw(y, f[0], f[1]);
    };

    let fwd = {
        let problem = OdeProblem::new(0.0, vec![1.0, lambda], Direction::Forward, parabolic);
        let cfg_f = chart_config(
            cfg,
            StopEvent::new("asymptote", move |_t, f| f[1] - stop_slope),
        );
        integrate(&problem, &cfg_f, span).map_err(construction("parabolic forward"))?
    };
    expect_settled(&fwd, "parabolic forward")?;
    let back = {
        let problem = OdeProblem::new(0.0, vec![1.0, lambda], Direction::Backward, parabolic);
        let cfg_b = chart_config(
            cfg,
            StopEvent::new("asymptote", move |_t, f| f[1] - stop_slope),
        );
        integrate(&problem, &cfg_b, -span).map_err(construction("parabolic backward"))?
    };
    expect_settled(&back, "parabolic backward")?;

    let lambda_plus_bracket = slab_bracket(fwd.last(), true);
    let lambda_minus_bracket = slab_bracket(back.last(), false);
    let trajectory = back.reversed().concat(fwd);

    let profile = GrimReaperProfile {
        lambda,
        trajectory,
        lambda_plus_bracket,
        lambda_minus_bracket,
    };
    profile.validate()?;
    Ok(profile)
}

/// Bracket slack mirrors the rotational arctan bound with the `2y/f^2`
/// coefficient: width `atan(|phi'|) phi^2 / (2|y|)` beyond the last height.
fn slab_bracket(end: &crate::ode::Sample, upper: bool) -> [f64; 2] {
    let (y, phi, slope) = (end.t, end.y[0], end.y[1]);
    let slack = if y == 0.0 {
        0.0
    } else {
        slope.abs().atan() * phi * phi / (2.0 * y.abs())
    };
    if upper {
        [phi, phi + slack]
    } else {
        [phi - slack, phi]
    }
}

impl GrimReaperProfile {
    fn validate(&self) -> Result<(), ProfileError> {
        let bad = |detail: String| ProfileError::Construction {
            stage: "grim reaper validation",
            detail,
        };
        let origin = self
            .trajectory
            .samples()
            .iter()
            .find(|s| s.t == 0.0)
            .ok_or_else(|| bad("no sample at y = 0".into()))?;
        if origin.y[0] != 1.0 || origin.y[1] != self.lambda {
            return Err(bad(format!(
                "origin state ({}, {})",
                origin.y[0], origin.y[1]
            )));
        }
        if self.lambda > 0.0 {
            for s in self.trajectory.samples() {
                if !(s.y[1] > 0.0) {
                    return Err(bad(format!("phi' = {} <= 0 at y = {}", s.y[1], s.t)));
                }
                if s.t < 0.0 && !(s.dy[1] > 0.0) {
                    return Err(bad(format!("phi'' = {} <= 0 at y = {} < 0", s.dy[1], s.t)));
                }
                if s.t > 0.0 && !(s.dy[1] < 0.0) {
                    return Err(bad(format!("phi'' = {} >= 0 at y = {} > 0", s.dy[1], s.t)));
                }
            }
            let [llo, lhi] = self.lambda_minus_bracket;
            let [ulo, uhi] = self.lambda_plus_bracket;
            if !(0.0 < llo && lhi < 1.0 && 1.0 < ulo && uhi.is_finite()) {
                return Err(bad(format!(
                    "slab brackets [{llo}, {lhi}], [{ulo}, {uhi}] not in 0 < lambda- < 1 < lambda+"
                )));
            }
        }
        Ok(())
    }
}

/// Horosphere at height `h`: the trivial translator.
#[derive(Debug, Clone, Copy)]
pub struct HorosphereSpec {
    pub h: f64,
}

impl HorosphereSpec {
    pub fn new(h: f64) -> Result<Self, ProfileError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(ProfileError::InvalidParameter(format!(
                "horosphere height must be positive and finite, got {h}"
            )));
        }
        Ok(HorosphereSpec { h })
    }
}

/// Translator identity `H - <X, eta>` at a vertical-chart jet
/// `(s, phi, phi', phi'')`; vanishes iff the jet satisfies the profile ODE.
pub fn translator_residual_rotational(
    s: f64,
    phi: f64,
    phi_p: f64,
    phi_pp: f64,
) -> Result<f64, ProfileError> {
    if !(s > 0.0 && phi > 0.0) {
        return Err(ProfileError::Domain(format!(
            "vertical chart needs s > 0 and phi > 0, got s = {s}, phi = {phi}"
        )));
    }
    let w = 1.0 + phi_p * phi_p;
    let rho = 1.0 / w.sqrt();
    let h = rho * (0.5 * phi * (phi_pp / w + phi_p / s) + 1.0);
    let x_eta = rho * (phi - s * phi_p) / phi;
    Ok(h - x_eta)
}

/// Same identity in the horizontal chart at `(z, d, d', d'')`.
pub fn translator_residual_horizontal(
    z: f64,
    d: f64,
    d_p: f64,
    d_pp: f64,
) -> Result<f64, ProfileError> {
    if !(z > 0.0 && d > 0.0) {
        return Err(ProfileError::Domain(format!(
            "horizontal chart needs z > 0 and d > 0, got z = {z}, d = {d}"
        )));
    }
    let w = 1.0 + d_p * d_p;
    let rho = 1.0 / w.sqrt();
    let lam = d_pp - w / d;
    let h = rho * (0.5 * z * lam / w - d_p);
    let x_eta = rho * (d - z * d_p) / z;
    Ok(h - x_eta)
}

/// Same identity for the parabolic cylinder at `(y, f, f', f'')`.
pub fn translator_residual_parabolic(
    y: f64,
    f: f64,
    f_p: f64,
    f_pp: f64,
) -> Result<f64, ProfileError> {
    if !(f > 0.0) {
        return Err(ProfileError::Domain(format!(
            "parabolic cylinder needs f > 0, got f = {f}"
        )));
    }
    let w = 1.0 + f_p * f_p;
    let rho = 1.0 / w.sqrt();
    let h = rho * (0.5 * f * f_pp / w + 1.0);
    let x_eta = rho * (f - y * f_p) / f;
    Ok(h - x_eta)
}

fn csv_row(out: &mut String, chart: &str, t: f64, value: f64, derivative: f64, residual: f64) {
    use std::fmt::Write;
    let _ = writeln!(
        out,
        "{chart},{},{},{},{}",
        crate::fmt17(t),
        crate::fmt17(value),
        crate::fmt17(derivative),
        crate::fmt17(residual)
    );
}

pub const PROFILE_CSV_HEADER: &str = "chart,t,value,derivative,residual";

/// Profile CSV: one row per stored sample of each chart, with the
/// chart-appropriate translator residual evaluated on the sample's jet.
pub fn catenoid_profile_csv(p: &CatenoidProfile) -> String {
    let mut out = String::new();
    out.push_str(PROFILE_CSV_HEADER);
    out.push('\n');
    for s in p.lower_vertical_chart.samples() {
        let res = translator_residual_rotational(s.t, s.y[0], s.y[1], s.dy[1]).unwrap_or(f64::NAN);
        csv_row(&mut out, "vertical_lower", s.t, s.y[0], s.y[1], res);
    }
    for s in p.horizontal_chart.samples() {
        let res = translator_residual_horizontal(s.t, s.y[0], s.y[1], s.dy[1]).unwrap_or(f64::NAN);
        csv_row(&mut out, "horizontal", s.t, s.y[0], s.y[1], res);
    }
    for s in p.upper_vertical_chart.samples() {
        let res = translator_residual_rotational(s.t, s.y[0], s.y[1], s.dy[1]).unwrap_or(f64::NAN);
        csv_row(&mut out, "vertical_upper", s.t, s.y[0], s.y[1], res);
    }
    out
}

pub fn grim_reaper_profile_csv(p: &GrimReaperProfile) -> String {
    let mut out = String::new();
    out.push_str(PROFILE_CSV_HEADER);
    out.push('\n');
    for s in p.trajectory.samples() {
        let res = translator_residual_parabolic(s.t, s.y[0], s.y[1], s.dy[1]).unwrap_or(f64::NAN);
        csv_row(&mut out, "parabolic", s.t, s.y[0], s.y[1], res);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::Sample;

    #[test]
    fn vertical_rhs_examples() {
        assert_eq!(rhs_vertical_rotational(1.0, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(rhs_vertical_rotational(1.0, 1.0, 1.0).unwrap(), -6.0);
        assert_eq!(rhs_vertical_rotational(1.0, 1.0, -1.0).unwrap(), 6.0);
        assert!(rhs_vertical_rotational(0.0, 1.0, 1.0).is_err());
        assert!(rhs_vertical_rotational(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn horizontal_rhs_examples() {
        assert_eq!(rhs_horizontal_rotational(1.0, 1.0, 0.0).unwrap(), 3.0);
        assert_eq!(rhs_horizontal_rotational(1.0, 1.0, 1.0).unwrap(), 6.0);
        for (z, d, dp) in [(0.3, 2.0, -5.0), (2.0, 0.1, 0.0), (1.0, 10.0, 100.0)] {
            assert!(rhs_horizontal_rotational(z, d, dp).unwrap() > 0.0);
        }
        assert!(rhs_horizontal_rotational(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn parabolic_rhs_examples() {
        assert_eq!(rhs_parabolic(0.0, 1.0, 5.0).unwrap(), 0.0);
        assert_eq!(rhs_parabolic(1.0, 1.0, 1.0).unwrap(), -4.0);
        assert_eq!(rhs_parabolic(-1.0, 1.0, 1.0).unwrap(), 4.0);
        assert!(rhs_parabolic(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn constant_profile_is_a_horosphere() {
        for h in [0.5, 1.0, 3.0] {
            for s in [0.1, 1.0, 42.0] {
                assert_eq!(
                    translator_residual_rotational(s, h, 0.0, 0.0).unwrap(),
                    0.0
                );
            }
        }
    }

    #[test]
    fn perturbed_jet_fails_by_the_predicted_amount() {
        let (s, phi, phi_p) = (1.7, 1.3, 0.4);
        let pp = rhs_vertical_rotational(s, phi, phi_p).unwrap();
        let clean = translator_residual_rotational(s, phi, phi_p, pp).unwrap();
        assert!(clean.abs() < 1e-14);
        let bias = 0.1;
        let w = 1.0 + phi_p * phi_p;
        let predicted = bias / w.sqrt() * phi / (2.0 * w);
        let residual = translator_residual_rotational(s, phi, phi_p, pp + bias).unwrap();
        assert!(
            ((residual - predicted) / predicted).abs() < 0.05,
            "residual {residual} vs predicted {predicted}"
        );
    }

    #[test]
    fn residual_vanishes_on_ode_jets_in_all_charts() {
        for (z, d, dp) in [(1.0, 2.0, 0.0), (1.3, 0.7, 2.0), (0.8, 5.0, -3.0)] {
            let dpp = rhs_horizontal_rotational(z, d, dp).unwrap();
            assert!(
                translator_residual_horizontal(z, d, dp, dpp)
                    .unwrap()
                    .abs()
                    < 1e-13
            );
        }
        for (y, f, fp) in [(0.0, 1.0, 1.0), (2.0, 1.5, 0.2), (-3.0, 0.6, 0.9)] {
            let fpp = rhs_parabolic(y, f, fp).unwrap();
            assert!(
                translator_residual_parabolic(y, f, fp, fpp)
                    .unwrap()
                    .abs()
                    < 1e-14
            );
        }
    }

    fn synthetic_flat_chart(c: f64) -> Trajectory {
        let mk = |t: f64| Sample {
            t,
            y: vec![c, 0.0],
            dy: vec![0.0, 0.0],
        };
        Trajectory::new(vec![mk(1.0), mk(2.0), mk(3.0)], vec![], StopReason::MaxTime)
    }

    #[test]
    fn flat_chart_brackets_to_a_point() {
        let [lo, hi] = bracket_asymptote(&synthetic_flat_chart(1.25)).unwrap();
        assert_eq!([lo, hi], [1.25, 1.25]);
    }

    #[test]
    fn non_monotone_chart_is_rejected() {
        let mk = |t: f64, v: f64, sl: f64| Sample {
            t,
            y: vec![v, sl],
            dy: vec![sl, 0.0],
        };
        let tr = Trajectory::new(
            vec![mk(1.0, 1.0, 0.5), mk(2.0, 1.4, -0.5), mk(3.0, 1.2, 0.1)],
            vec![],
            StopReason::MaxTime,
        );
        assert!(matches!(
            bracket_asymptote(&tr),
            Err(ProfileError::Contract(_))
        ));
    }

    #[test]
    fn negative_lambda_is_rejected_citing_congruence() {
        let cfg = IntegrationConfig::default();
        let err = solve_grim_reaper(-1.0, 10.0, &cfg).unwrap_err();
        assert!(err.to_string().contains("congruent"));
    }

    #[test]
    fn lambda_zero_is_the_unit_horosphere() {
        let cfg = IntegrationConfig::default();
        let p = solve_grim_reaper(0.0, 10.0, &cfg).unwrap();
        assert_eq!(p.lambda_plus_bracket, [1.0, 1.0]);
        assert_eq!(p.lambda_minus_bracket, [1.0, 1.0]);
        for s in p.trajectory.samples() {
            assert_eq!(s.y[0], 1.0);
            assert_eq!(s.y[1], 0.0);
        }
    }

    #[test]
    fn horosphere_spec_guards_height() {
        assert!(HorosphereSpec::new(1.0).is_ok());
        assert!(HorosphereSpec::new(0.0).is_err());
        assert!(HorosphereSpec::new(f64::NAN).is_err());
    }
}
