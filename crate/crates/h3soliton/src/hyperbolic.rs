//! Half-space model primitives.
//!
//! Points, tangent vectors and surface samples are stored in the Euclidean
//! chart of `{z > 0}`; the hyperbolic metric `ds^2 = (dx^2+dy^2+dz^2)/z^2`
//! enters only through [`hyperbolic_inner`] and the two lifts
//! [`lift_normal`] (`eta = z * eta_bar`) and [`lift_mean_curvature`]
//! (`H = z * H_bar + eta_bar_3`), so there is a single source of truth for
//! the conformal relation between Euclidean and hyperbolic data.

use thiserror::Error;

/// Allowed deviation of a stored Euclidean normal from unit length.
pub const UNIT_NORMAL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point must satisfy z > 0 with finite coordinates, got ({0}, {1}, {2})")]
    InvalidPoint(f64, f64, f64),
    #[error("tangent vectors based at different points: {0:?} vs {1:?}")]
    BasePointMismatch(HPoint, HPoint),
    #[error("euclidean normal must be unit length within {UNIT_NORMAL_TOL}, |n| = {0}")]
    NotUnitNormal(f64),
    #[error("translation speed must be positive and finite, got {0}")]
    InvalidSpeed(f64),
}

/// A point of the open upper half-space, `z > 0` strictly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        if !(x.is_finite() && y.is_finite() && z.is_finite() && z > 0.0) {
            return Err(GeometryError::InvalidPoint(x, y, z));
        }
        Ok(HPoint { x, y, z })
    }

    pub fn coords(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Image under the hyperbolic translation `Gamma_t(p) = e^t p`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        HPoint::new(self.x * factor, self.y * factor, self.z * factor)
    }
}

/// A tangent vector at a base point, components in the Euclidean chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVec {
    pub base: HPoint,
    pub components: [f64; 3],
}

impl TangentVec {
    pub fn new(base: HPoint, components: [f64; 3]) -> Self {
        TangentVec { base, components }
    }

    pub fn euclidean_norm(&self) -> f64 {
        let [a, b, c] = self.components;
        (a * a + b * b + c * c).sqrt()
    }
}

/// The three Killing fields used by the soliton families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KillingField {
    /// Hyperbolic translations `Gamma_t(p) = e^t p`: `xi(p) = p`.
    HyperbolicTranslation,
    /// Rotations about the z-axis: `xi(p) = J pi(p)` with `pi` the horizontal
    /// projection and `J` the quarter-turn of the horizontal plane.
    Rotation,
    /// Downward translations of speed `h`: `xi(p) = -h p`, `h > 0`.
    ScaledDownTranslation { h: f64 },
}

impl KillingField {
    pub fn scaled_down_translation(h: f64) -> Result<Self, GeometryError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(GeometryError::InvalidSpeed(h));
        }
        Ok(KillingField::ScaledDownTranslation { h })
    }
}

/// A pointwise sample of an oriented surface: position, Euclidean-unit
/// normal `eta_bar` and Euclidean mean curvature `H_bar`.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    point: HPoint,
    euclidean_normal: [f64; 3],
    euclidean_mean_curvature: f64,
}

impl SurfaceSample {
    pub fn new(
        point: HPoint,
        euclidean_normal: [f64; 3],
        euclidean_mean_curvature: f64,
    ) -> Result<Self, GeometryError> {
        let [a, b, c] = euclidean_normal;
        let norm = (a * a + b * b + c * c).sqrt();
        if (norm - 1.0).abs() > UNIT_NORMAL_TOL {
            return Err(GeometryError::NotUnitNormal(norm));
        }
        Ok(SurfaceSample {
            point,
            euclidean_normal,
            euclidean_mean_curvature,
        })
    }

    pub fn point(&self) -> HPoint {
        self.point
    }

    /// `eta_bar` as a tangent vector at the sample point.
    pub fn unit_euclidean_normal(&self) -> TangentVec {
        TangentVec::new(self.point, self.euclidean_normal)
    }

    pub fn euclidean_mean_curvature(&self) -> f64 {
        self.euclidean_mean_curvature
    }

    /// The same sample with the opposite orientation `(eta_bar, H_bar) -> (-eta_bar, -H_bar)`.
    pub fn flipped(&self) -> SurfaceSample {
        let [a, b, c] = self.euclidean_normal;
        SurfaceSample {
            point: self.point,
            euclidean_normal: [-a, -b, -c],
            euclidean_mean_curvature: -self.euclidean_mean_curvature,
        }
    }
}

/// The hyperbolic inner product `<u, v> = (u . v)_euclidean / z^2` at the
/// common base point.
pub fn hyperbolic_inner(u: &TangentVec, v: &TangentVec) -> Result<f64, GeometryError> {
    if u.base != v.base {
        return Err(GeometryError::BasePointMismatch(u.base, v.base));
    }
    let [a1, a2, a3] = u.components;
    let [b1, b2, b3] = v.components;
    let z = u.base.z;
    Ok((a1 * b1 + a2 * b2 + a3 * b3) / (z * z))
}

/// The hyperbolic-unit normal `eta = z * eta_bar`.
pub fn lift_normal(s: &SurfaceSample) -> TangentVec {
    let z = s.point.z;
    let [a, b, c] = s.euclidean_normal;
    TangentVec::new(s.point, [z * a, z * b, z * c])
}

/// The hyperbolic mean curvature `H = z * H_bar + eta_bar_3`.
pub fn lift_mean_curvature(s: &SurfaceSample) -> f64 {
    s.point.z * s.euclidean_mean_curvature + s.euclidean_normal[2]
}

/// Evaluates the Killing field at a point, in the Euclidean chart.
pub fn killing_eval(field: &KillingField, p: HPoint) -> TangentVec {
    let components = match field {
        KillingField::HyperbolicTranslation => [p.x, p.y, p.z],
        KillingField::Rotation => [-p.y, p.x, 0.0],
        KillingField::ScaledDownTranslation { h } => [-h * p.x, -h * p.y, -h * p.z],
    };
    TangentVec::new(p, components)
}

/// The pointwise soliton residual `H - <xi, eta>`; zero iff the sample
/// satisfies the soliton equation for `field`.
pub fn soliton_residual(s: &SurfaceSample, field: &KillingField) -> f64 {
    let eta = lift_normal(s);
    let xi = killing_eval(field, s.point());
    let inner = hyperbolic_inner(&xi, &eta).expect("xi and eta share the sample's base point");
    lift_mean_curvature(s) - inner
}

/// Numeric thresholds shared by construction and verification, overridable
/// from the command line in one place.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// ODE relative tolerance.
    pub ode_rel: f64,
    /// ODE absolute tolerance.
    pub ode_abs: f64,
    /// Profile charts stop once `|slope|` falls below this.
    pub asymptote_slope: f64,
    /// Finite-difference step in parameter units.
    pub fd_step: f64,
    /// Residual gate for `verify`.
    pub verify_max_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rel: 1e-10,
            ode_abs: 1e-12,
            asymptote_slope: 1e-9,
            fd_step: 1e-5,
            verify_max_residual: 1e-4,
        }
    }
}
