//! Triangulated surface patches in the half-space chart.
//!
//! Surfaces are built from profile curves (surfaces of revolution,
//! parabolic cylinders) or from a rotator's generating curve (helicoidal
//! sweeps). Vertices carry their parameter coordinates so verification can
//! re-evaluate analytic formulas per vertex instead of estimating from the
//! mesh alone, and per-vertex normals come from the chart's closed-form
//! normal, not from triangle averaging.

mod export;
pub mod measure;
mod surfaces;

pub use export::{export, export_to_path, parse_obj, MeshFormat, MESH_CSV_HEADER};
pub use surfaces::{
    CatenoidSurface, GrimReaperSurface, HelicoidSurface, HorosphereSurface, VerticalPlaneSurface,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid mesh: {0}")]
    Invalid(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

/// Which construction a surface came from, with its defining parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Catenoid { r: f64 },
    GrimReaper { lambda: f64 },
    Horosphere { h: f64 },
    Helicoid { h: f64 },
    VerticalPlane { theta: f64 },
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceKind::Catenoid { r } => write!(f, "catenoid:{r}"),
            SurfaceKind::GrimReaper { lambda } => write!(f, "grim-reaper:{lambda}"),
            SurfaceKind::Horosphere { h } => write!(f, "horosphere:{h}"),
            SurfaceKind::Helicoid { h } => write!(f, "helicoid:{h}"),
            SurfaceKind::VerticalPlane { theta } => write!(f, "vertical-plane:{theta}"),
        }
    }
}

/// Parameter rectangle of a surface patch.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub u: (f64, f64),
    pub v: (f64, f64),
}

/// A deterministic parametrized surface patch with `z > 0` over its whole
/// rectangle.
pub trait ParamSurface: Sync {
    fn eval(&self, u: f64, v: f64) -> [f64; 3];
    fn domain(&self) -> Rect;
    fn kind(&self) -> SurfaceKind;

    /// v-values finite-difference grids must keep clear of (chart seams,
    /// orientation-degenerate lines).
    fn seams_v(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Analytic first partials where the construction provides them.
    fn partials(&self, _u: f64, _v: f64) -> Option<([f64; 3], [f64; 3])> {
        None
    }
}

/// A mesh vertex: position, parameter coordinates, Euclidean-unit normal.
#[derive(Debug, Clone, Copy)]
pub struct Vertex {
    pub point: [f64; 3],
    pub uv: [f64; 2],
    pub normal: [f64; 3],
}

/// An indexed triangle mesh with consistent orientation.
#[derive(Debug, Clone)]
pub struct TriMesh {
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<[u32; 3]>,
    pub kind: Option<SurfaceKind>,
}

impl TriMesh {
    pub fn empty() -> TriMesh {
        TriMesh {
            vertices: Vec::new(),
            triangles: Vec::new(),
            kind: None,
        }
    }

    pub fn triangle_points(&self, t: [u32; 3]) -> [[f64; 3]; 3] {
        [
            self.vertices[t[0] as usize].point,
            self.vertices[t[1] as usize].point,
            self.vertices[t[2] as usize].point,
        ]
    }

    /// Checks index ranges, z > 0, unit normals, nonzero triangle areas, and
    /// orientation consistency across shared edges.
    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len() as u32;
        for (i, v) in self.vertices.iter().enumerate() {
            if !(v.point[2] > 0.0) {
                return Err(MeshError::Invalid(format!(
                    "vertex {i} has z = {} <= 0",
                    v.point[2]
                )));
            }
            let nn = norm3(v.normal);
            if (nn - 1.0).abs() > 1e-10 {
                return Err(MeshError::Invalid(format!(
                    "vertex {i} normal has length {nn}"
                )));
            }
        }
        let mut directed = std::collections::HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for &i in t {
                if i >= n {
                    return Err(MeshError::Invalid(format!(
                        "triangle {ti} references vertex {i} out of {n}"
                    )));
                }
            }
            let [a, b, c] = self.triangle_points(*t);
            if triangle_area(a, b, c) <= 0.0 {
                return Err(MeshError::Invalid(format!("triangle {ti} is degenerate")));
            }
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let count = directed.entry(e).or_insert(0u32);
                *count += 1;
                if *count > 1 {
                    return Err(MeshError::Invalid(format!(
                        "directed edge {e:?} used twice: inconsistent orientation"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn triangle_area(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    0.5 * norm3(cross3(sub3(b, a), sub3(c, a)))
}

/// One node of a profile polyline in the (distance-to-axis, height)
/// half-plane, with its surface parameter and in-plane unit normal.
#[derive(Debug, Clone, Copy)]
pub struct ProfileSample {
    /// Surface v-parameter this node corresponds to.
    pub v: f64,
    pub radial: f64,
    pub height: f64,
    /// Unit normal in (radial, height) components.
    pub normal2: [f64; 2],
}

/// Surface of revolution about the z-axis. The profile is sampled once per
/// node; the revolution wraps, sharing the seam vertices, so every profile
/// point appears exactly once per angle.
pub fn revolve(profile: &[ProfileSample], angular_res: usize) -> Result<TriMesh, MeshError> {
    if angular_res < 8 {
        return Err(MeshError::Domain(format!(
            "angular resolution must be at least 8, got {angular_res}"
        )));
    }
    if profile.len() < 2 {
        return Err(MeshError::Domain("profile needs at least 2 nodes".into()));
    }
    for p in profile {
        if !(p.height > 0.0) {
            return Err(MeshError::Domain(format!(
                "profile touches z = 0 at v = {}",
                p.v
            )));
        }
        if !(p.radial > 0.0) {
            return Err(MeshError::Domain(format!(
                "profile touches the axis at v = {}",
                p.v
            )));
        }
    }
    let na = angular_res;
    let np = profile.len();
    let mut vertices = Vec::with_capacity(na * np);
    for p in profile {
        for j in 0..na {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / na as f64;
            let (sin, cos) = theta.sin_cos();
            vertices.push(Vertex {
                point: [p.radial * cos, p.radial * sin, p.height],
                uv: [theta, p.v],
                normal: [p.normal2[0] * cos, p.normal2[0] * sin, p.normal2[1]],
            });
        }
    }
    let mut triangles = Vec::with_capacity(2 * na * (np - 1));
    for i in 0..np - 1 {
        for j in 0..na {
            let j1 = (j + 1) % na;
            let a = (i * na + j) as u32;
            let b = (i * na + j1) as u32;
            let c = ((i + 1) * na + j) as u32;
            let d = ((i + 1) * na + j1) as u32;
            triangles.push([a, b, c]);
            triangles.push([b, d, c]);
        }
    }
    let mesh = TriMesh {
        vertices,
        triangles,
        kind: None,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// One node of a parabolic-cylinder profile `(y, phi(y), phi'(y))`.
#[derive(Debug, Clone, Copy)]
pub struct ParabolicSample {
    pub y: f64,
    pub phi: f64,
    pub slope: f64,
}

/// Parabolic cylinder `(x, y, phi(y))` over `x_range`; normals
/// `rho (0, -phi', 1)` are independent of x.
pub fn extrude_parabolic(
    profile: &[ParabolicSample],
    x_range: (f64, f64),
    x_res: usize,
) -> Result<TriMesh, MeshError> {
    if x_res < 2 || profile.len() < 2 {
        return Err(MeshError::Domain(
            "need at least 2 samples in each direction".into(),
        ));
    }
    if x_range.1 <= x_range.0 {
        return Err(MeshError::Domain("empty x-range".into()));
    }
    for p in profile {
        if !(p.phi > 0.0) {
            return Err(MeshError::Domain(format!(
                "profile touches z = 0 at y = {}",
                p.y
            )));
        }
    }
    let mut vertices = Vec::with_capacity(x_res * profile.len());
    for p in profile {
        let rho = 1.0 / (1.0 + p.slope * p.slope).sqrt();
        for i in 0..x_res {
            let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / (x_res - 1) as f64;
            vertices.push(Vertex {
                point: [x, p.y, p.phi],
                uv: [x, p.y],
                normal: [0.0, -p.slope * rho, rho],
            });
        }
    }
    let triangles = grid_triangles(profile.len(), x_res);
    let mesh = TriMesh {
        vertices,
        triangles,
        kind: None,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// Helicoidal sweep `X(u, v) = e^{hv} (e^{vJ} alpha(u), 1)` of a rotator's
/// generating curve; normals come from the closed form
/// `rho (e^{vJ} N, -(tau + h mu)/h)` with `rho = h (h^2 + (tau+h mu)^2)^{-1/2}`,
/// which is invariant under the `e^{hv}` scaling.
pub fn sweep_helicoid(
    curve: &crate::rotator::RotatorCurve,
    v_range: (f64, f64),
    res: usize,
) -> Result<TriMesh, MeshError> {
    if res < 2 {
        return Err(MeshError::Domain("resolution must be at least 2".into()));
    }
    if v_range.1 <= v_range.0 {
        return Err(MeshError::Domain("empty v-range".into()));
    }
    let h = curve.params.pitch;
    let (u0, u1) = curve.reconstruction.t_range();
    let mut vertices = Vec::with_capacity(res * res);
    for i in 0..res {
        let v = v_range.0 + (v_range.1 - v_range.0) * i as f64 / (res - 1) as f64;
        let scale = (h * v).exp();
        let (sin_v, cos_v) = v.sin_cos();
        for j in 0..res {
            let u = u0 + (u1 - u0) * j as f64 / (res - 1) as f64;
            let state = curve
                .reconstruction
                .eval(u)
                .expect("u inside the reconstruction range");
            let (tau, mu, x, y, psi) = (state[0], state[1], state[4], state[5], state[6]);
            let point = [
                scale * (x * cos_v - y * sin_v),
                scale * (x * sin_v + y * cos_v),
                scale,
            ];
            // N = J T rotated by v.
            let (sin_p, cos_p) = psi.sin_cos();
            let n_plane = [-sin_p, cos_p];
            let rotated = [
                n_plane[0] * cos_v - n_plane[1] * sin_v,
                n_plane[0] * sin_v + n_plane[1] * cos_v,
            ];
            let w = tau + h * mu;
            let rho = h / (h * h + w * w).sqrt();
            vertices.push(Vertex {
                point,
                uv: [u, v],
                normal: [rho * rotated[0], rho * rotated[1], -rho * w / h],
            });
        }
    }
    let triangles = grid_triangles(res, res);
    let mesh = TriMesh {
        vertices,
        triangles,
        kind: Some(SurfaceKind::Helicoid { h }),
    };
    mesh.validate()?;
    Ok(mesh)
}

fn grid_triangles(rows: usize, cols: usize) -> Vec<[u32; 3]> {
    let mut triangles = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            let a = (i * cols + j) as u32;
            let b = (i * cols + j + 1) as u32;
            let c = ((i + 1) * cols + j) as u32;
            let d = ((i + 1) * cols + j + 1) as u32;
            triangles.push([a, b, c]);
            triangles.push([b, d, c]);
        }
    }
    triangles
}
