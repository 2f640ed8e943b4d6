//! Distances between meshes and surfaces, for the refinement convergence
//! checks.

use super::{cross3, dot3, norm3, sub3, ParamSurface, TriMesh};

/// Euclidean distance from a point to a triangle (closest-feature walk).
pub fn point_triangle_distance(p: [f64; 3], a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let ab = sub3(b, a);
    let ac = sub3(c, a);
    let ap = sub3(p, a);
    let d1 = dot3(ab, ap);
    let d2 = dot3(ac, ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return norm3(ap);
    }
    let bp = sub3(p, b);
    let d3 = dot3(ab, bp);
    let d4 = dot3(ac, bp);
    if d3 >= 0.0 && d4 <= d3 {
        return norm3(bp);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let t = d1 / (d1 - d3);
        return norm3(sub3(ap, [ab[0] * t, ab[1] * t, ab[2] * t]));
    }
    let cp = sub3(p, c);
    let d5 = dot3(ab, cp);
    let d6 = dot3(ac, cp);
    if d6 >= 0.0 && d5 <= d6 {
        return norm3(cp);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let t = d2 / (d2 - d6);
        return norm3(sub3(ap, [ac[0] * t, ac[1] * t, ac[2] * t]));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        let bc = sub3(c, b);
        return norm3(sub3(bp, [bc[0] * t, bc[1] * t, bc[2] * t]));
    }
    // Interior: project onto the plane.
    let n = cross3(ab, ac);
    let nn = norm3(n);
    (dot3(ap, n) / nn).abs()
}

/// Minimum distance from a point to any triangle of the mesh.
pub fn distance_to_mesh(p: [f64; 3], mesh: &TriMesh) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = mesh.triangle_points(*t);
            point_triangle_distance(p, a, b, c)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Vertices, edge midpoints and centroids of every triangle.
pub fn sample_points(mesh: &TriMesh) -> Vec<[f64; 3]> {
    let mut pts: Vec<[f64; 3]> = mesh.vertices.iter().map(|v| v.point).collect();
    for t in &mesh.triangles {
        let [a, b, c] = mesh.triangle_points(*t);
        pts.push(mid(a, b));
        pts.push(mid(b, c));
        pts.push(mid(c, a));
        pts.push([
            (a[0] + b[0] + c[0]) / 3.0,
            (a[1] + b[1] + c[1]) / 3.0,
            (a[2] + b[2] + c[2]) / 3.0,
        ]);
    }
    pts
}

fn mid(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        0.5 * (a[0] + b[0]),
        0.5 * (a[1] + b[1]),
        0.5 * (a[2] + b[2]),
    ]
}

/// One-sided Hausdorff distance from the sample points of `a` to `b`.
pub fn hausdorff_one_sided(a: &TriMesh, b: &TriMesh) -> f64 {
    use rayon::prelude::*;
    sample_points(a)
        .par_iter()
        .map(|&p| distance_to_mesh(p, b))
        .reduce(|| 0.0, f64::max)
}

/// Symmetric Hausdorff distance between two meshes.
pub fn hausdorff(a: &TriMesh, b: &TriMesh) -> f64 {
    hausdorff_one_sided(a, b).max(hausdorff_one_sided(b, a))
}

/// Largest deviation of the mesh's edge midpoints from the analytic
/// surface, measured by re-evaluating the surface at the midpoint's
/// parameter coordinates.
pub fn max_midpoint_deviation(mesh: &TriMesh, surface: &dyn ParamSurface) -> f64 {
    let mut worst = 0.0f64;
    for t in &mesh.triangles {
        for (i, j) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            let vi = &mesh.vertices[i as usize];
            let vj = &mesh.vertices[j as usize];
            // Skip the angular wrap seam, where averaging uv is meaningless.
            if (vi.uv[0] - vj.uv[0]).abs() > 3.0 {
                continue;
            }
            let um = 0.5 * (vi.uv[0] + vj.uv[0]);
            let vm = 0.5 * (vi.uv[1] + vj.uv[1]);
            let on_surface = surface.eval(um, vm);
            let chord = mid(vi.point, vj.point);
            worst = worst.max(norm3(sub3(on_surface, chord)));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_triangle_distance_cases() {
        let a = [0.0, 0.0, 0.0];
        let b = [1.0, 0.0, 0.0];
        let c = [0.0, 1.0, 0.0];
        // Above the interior.
        assert!((point_triangle_distance([0.2, 0.2, 1.0], a, b, c) - 1.0).abs() < 1e-15);
        // Closest to vertex a.
        assert!((point_triangle_distance([-1.0, -1.0, 0.0], a, b, c) - 2f64.sqrt()).abs() < 1e-15);
        // Closest to edge ab.
        assert!((point_triangle_distance([0.5, -2.0, 0.0], a, b, c) - 2.0).abs() < 1e-15);
        // On the triangle.
        assert_eq!(point_triangle_distance([0.25, 0.25, 0.0], a, b, c), 0.0);
    }
}
