//! Soliton surfaces to mean curvature flow in the hyperbolic 3-space
//! `H^3 = ({z > 0}, (dx^2 + dy^2 + dz^2)/z^2)`.
//!
//! The crate constructs the invariant surfaces that move self-similarly
//! under mean curvature flow in the upper half-space model:
//!
//! * translating catenoids — rotational annuli asymptotic to two horospheres,
//! * grim reapers — parabolic cylinders trapped in a horospherical slab,
//! * horospheres and vertical planes — the trivial translators,
//! * helicoidal rotators — spiral surfaces rotating about the vertical axis.
//!
//! Each family reduces to an ODE for its generating curve; [`ode`] provides
//! the shared adaptive integrator with dense output, event location and
//! blow-up stopping, [`profiles`] and [`rotator`] build the curves,
//! [`mesh`] turns them into triangle meshes, and [`verify`] checks the
//! soliton equation `H = <xi, eta>` by finite differences without trusting
//! the construction path.

pub mod hyperbolic;
pub mod mesh;
pub mod ode;
pub mod profiles;
pub mod rotator;
pub mod verify;

/// Formats a float with 17 significant digits, enough to round-trip f64.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}
