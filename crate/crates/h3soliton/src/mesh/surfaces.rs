//! The concrete surface patches backing meshes and residual verification.
//!
//! Profile-backed surfaces evaluate their profile through a C^2
//! piecewise-quintic rebuilt from the trajectory's node jets, so central
//! differences across step joints see a twice-differentiable map instead
//! of the raw dense output's first-derivative kinks.

use super::{ParamSurface, ParabolicSample, ProfileSample, Rect, SurfaceKind};
use crate::ode::QuinticHermite;
use crate::profiles::{CatenoidProfile, GrimReaperProfile};
use crate::rotator::RotatorCurve;
use std::f64::consts::PI;

/// Horosphere `z = h` over `[-extent, extent]^2`.
#[derive(Debug, Clone)]
pub struct HorosphereSurface {
    pub h: f64,
    pub extent: f64,
}

impl HorosphereSurface {
    pub fn new(h: f64) -> Self {
        HorosphereSurface { h, extent: 2.0 }
    }
}

impl ParamSurface for HorosphereSurface {
    fn eval(&self, u: f64, v: f64) -> [f64; 3] {
        [u, v, self.h]
    }

    fn domain(&self) -> Rect {
        Rect {
            u: (-self.extent, self.extent),
            v: (-self.extent, self.extent),
        }
    }

    fn kind(&self) -> SurfaceKind {
        SurfaceKind::Horosphere { h: self.h }
    }

    fn partials(&self, _u: f64, _v: f64) -> Option<([f64; 3], [f64; 3])> {
        Some(([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]))
    }
}

/// Totally geodesic vertical plane through the z-axis at angle `theta`.
#[derive(Debug, Clone)]
pub struct VerticalPlaneSurface {
    pub theta: f64,
}

impl ParamSurface for VerticalPlaneSurface {
    fn eval(&self, u: f64, v: f64) -> [f64; 3] {
        [u * self.theta.cos(), u * self.theta.sin(), v]
    }

    fn domain(&self) -> Rect {
        Rect {
            u: (-2.0, 2.0),
            v: (0.5, 2.5),
        }
    }

    fn kind(&self) -> SurfaceKind {
        SurfaceKind::VerticalPlane { theta: self.theta }
    }

    fn partials(&self, _u: f64, _v: f64) -> Option<([f64; 3], [f64; 3])> {
        Some((
            [self.theta.cos(), self.theta.sin(), 0.0],
            [0.0, 0.0, 1.0],
        ))
    }
}

/// The translating catenoid as a surface of revolution, parameterized by
/// `(theta, v)` with `v in [-1, 1]` traversing lower arm, neck region and
/// upper arm; the three chart pieces map affinely onto `[-1, -1/3]`,
/// `[-1/3, 1/3]` and `[1/3, 1]`.
pub struct CatenoidSurface {
    r: f64,
    lower: QuinticHermite,
    horizontal: QuinticHermite,
    upper: QuinticHermite,
    lower_s_range: (f64, f64),
    z_range: (f64, f64),
    upper_s_range: (f64, f64),
}

impl CatenoidSurface {
    pub fn new(profile: &CatenoidProfile) -> Self {
        let lower = QuinticHermite::from_trajectory_pair(&profile.lower_vertical_chart, 0, 1);
        let horizontal = QuinticHermite::from_trajectory_pair(&profile.horizontal_chart, 0, 1);
        let upper = QuinticHermite::from_trajectory_pair(&profile.upper_vertical_chart, 0, 1);
        CatenoidSurface {
            r: profile.r,
            lower_s_range: profile.lower_vertical_chart.t_range(),
            z_range: profile.horizontal_chart.t_range(),
            upper_s_range: profile.upper_vertical_chart.t_range(),
            lower,
            horizontal,
            upper,
        }
    }

    /// Profile point and in-plane unit normal at parameter `v`: the normal
    /// is the traversal tangent turned a quarter left, which points toward
    /// the axis at the neck and keeps a single orientation across charts.
    pub fn profile_at(&self, v: f64) -> (f64, f64, [f64; 2]) {
        let third = 1.0 / 3.0;
        if v <= -third {
            // Lower arm, traversed from the far end toward the switch.
            let (s_lo, s_hi) = self.lower_s_range;
            let s = s_hi + (v + 1.0) / (2.0 * third) * (s_lo - s_hi);
            let phi = self.lower.eval(s);
            let m = self.lower.eval_d(s);
            let w = (1.0 + m * m).sqrt();
            (s, phi, [m / w, -1.0 / w])
        } else if v < third {
            let (z_lo, z_hi) = self.z_range;
            let z = z_lo + (v + third) / (2.0 * third) * (z_hi - z_lo);
            let d = self.horizontal.eval(z);
            let dp = self.horizontal.eval_d(z);
            let w = (1.0 + dp * dp).sqrt();
            (d, z, [-1.0 / w, dp / w])
        } else {
            let (s_lo, s_hi) = self.upper_s_range;
            let s = s_lo + (v - third) / (2.0 * third) * (s_hi - s_lo);
            let phi = self.upper.eval(s);
            let m = self.upper.eval_d(s);
            let w = (1.0 + m * m).sqrt();
            (s, phi, [-m / w, 1.0 / w])
        }
    }

    /// v-parameter of the neck circle (z = 1 inside the horizontal piece).
    pub fn neck_v(&self) -> f64 {
        let (z_lo, z_hi) = self.z_range;
        -1.0 / 3.0 + (1.0 - z_lo) / (z_hi - z_lo) * (2.0 / 3.0)
    }

    /// Uniform profile polyline over `v in [-1, 1]`, ready to revolve.
    pub fn profile_polyline(&self, n: usize) -> Vec<ProfileSample> {
        (0..n)
            .map(|i| {
                let v = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                let (radial, height, normal2) = self.profile_at(v);
                ProfileSample {
                    v,
                    radial,
                    height,
                    normal2,
                }
            })
            .collect()
    }
}

impl ParamSurface for CatenoidSurface {
    fn eval(&self, u: f64, v: f64) -> [f64; 3] {
        let (radial, height, _) = self.profile_at(v);
        [radial * u.cos(), radial * u.sin(), height]
    }

    fn domain(&self) -> Rect {
        Rect {
            u: (0.0, 2.0 * PI),
            v: (-1.0, 1.0),
        }
    }

    fn kind(&self) -> SurfaceKind {
        SurfaceKind::Catenoid { r: self.r }
    }

    fn seams_v(&self) -> Vec<f64> {
        vec![-1.0 / 3.0, self.neck_v(), 1.0 / 3.0]
    }
}

/// The grim reaper as an entire graph `(x, y, phi(y))`.
pub struct GrimReaperSurface {
    lambda: f64,
    phi: QuinticHermite,
    y_range: (f64, f64),
    pub x_extent: f64,
}

impl GrimReaperSurface {
    pub fn new(profile: &GrimReaperProfile) -> Self {
        GrimReaperSurface {
            lambda: profile.lambda,
            phi: QuinticHermite::from_trajectory_pair(&profile.trajectory, 0, 1),
            y_range: profile.trajectory.t_range(),
            x_extent: 2.0,
        }
    }

    pub fn height_at(&self, y: f64) -> (f64, f64) {
        (self.phi.eval(y), self.phi.eval_d(y))
    }

    pub fn profile_polyline(&self, n: usize) -> Vec<ParabolicSample> {
        let (y0, y1) = self.y_range;
        (0..n)
            .map(|i| {
                let y = y0 + (y1 - y0) * i as f64 / (n - 1) as f64;
                let (phi, slope) = self.height_at(y);
                ParabolicSample { y, phi, slope }
            })
            .collect()
    }
}

impl ParamSurface for GrimReaperSurface {
    fn eval(&self, u: f64, v: f64) -> [f64; 3] {
        [u, v, self.phi.eval(v)]
    }

    fn domain(&self) -> Rect {
        Rect {
            u: (-self.x_extent, self.x_extent),
            v: self.y_range,
        }
    }

    fn kind(&self) -> SurfaceKind {
        SurfaceKind::GrimReaper {
            lambda: self.lambda,
        }
    }

    fn partials(&self, _u: f64, v: f64) -> Option<([f64; 3], [f64; 3])> {
        Some(([1.0, 0.0, 0.0], [0.0, 1.0, self.phi.eval_d(v)]))
    }
}

/// The helicoidal sweep `X(u, v) = e^{hv}(e^{vJ} alpha(u), 1)` of a
/// rotator's generating curve.
pub struct HelicoidSurface {
    h: f64,
    x: QuinticHermite,
    y: QuinticHermite,
    u_range: (f64, f64),
    pub v_range: (f64, f64),
}

impl HelicoidSurface {
    pub fn new(curve: &RotatorCurve, v_range: (f64, f64)) -> Self {
        // Jets of the plane curve: alpha' = (cos psi, sin psi),
        // alpha'' = k (-sin psi, cos psi).
        let jets_x: Vec<(f64, f64, f64, f64)> = curve
            .reconstruction
            .samples()
            .iter()
            .map(|s| (s.t, s.y[4], s.dy[4], -s.dy[5] * s.dy[6]))
            .collect();
        let jets_y: Vec<(f64, f64, f64, f64)> = curve
            .reconstruction
            .samples()
            .iter()
            .map(|s| (s.t, s.y[5], s.dy[5], s.dy[4] * s.dy[6]))
            .collect();
        HelicoidSurface {
            h: curve.params.pitch,
            x: QuinticHermite::from_jets(&jets_x),
            y: QuinticHermite::from_jets(&jets_y),
            u_range: curve.reconstruction.t_range(),
            v_range,
        }
    }

    pub fn curve_point(&self, u: f64) -> [f64; 2] {
        [self.x.eval(u), self.y.eval(u)]
    }
}

impl ParamSurface for HelicoidSurface {
    fn eval(&self, u: f64, v: f64) -> [f64; 3] {
        let scale = (self.h * v).exp();
        let (sin_v, cos_v) = v.sin_cos();
        let x = self.x.eval(u);
        let y = self.y.eval(u);
        [
            scale * (x * cos_v - y * sin_v),
            scale * (x * sin_v + y * cos_v),
            scale,
        ]
    }

    fn domain(&self) -> Rect {
        Rect {
            u: self.u_range,
            v: self.v_range,
        }
    }

    fn kind(&self) -> SurfaceKind {
        SurfaceKind::Helicoid { h: self.h }
    }
}
