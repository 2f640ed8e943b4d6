//! Mesh serialization: Wavefront OBJ and per-vertex CSV, both UTF-8 with
//! LF line endings and 17-significant-digit decimals.

use super::{MeshError, TriMesh, Vertex};
use crate::fmt17;
use std::fmt::Write as _;
use std::io::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Csv,
}

pub const MESH_CSV_HEADER: &str = "u,v,x,y,z,nx,ny,nz";

/// Serializes the mesh. An empty mesh yields only the header comment (OBJ)
/// or the header row (CSV).
pub fn export(mesh: &TriMesh, format: MeshFormat) -> String {
    match format {
        MeshFormat::Obj => export_obj(mesh),
        MeshFormat::Csv => export_csv(mesh),
    }
}

fn export_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# triangulated surface patch ({} vertices, {} triangles)",
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    for v in &mesh.vertices {
        let _ = writeln!(
            out,
            "v {} {} {}",
            fmt17(v.point[0]),
            fmt17(v.point[1]),
            fmt17(v.point[2])
        );
    }
    for v in &mesh.vertices {
        let _ = writeln!(
            out,
            "vn {} {} {}",
            fmt17(v.normal[0]),
            fmt17(v.normal[1]),
            fmt17(v.normal[2])
        );
    }
    for t in &mesh.triangles {
        let _ = writeln!(
            out,
            "f {}//{} {}//{} {}//{}",
            t[0] + 1,
            t[0] + 1,
            t[1] + 1,
            t[1] + 1,
            t[2] + 1,
            t[2] + 1
        );
    }
    out
}

fn export_csv(mesh: &TriMesh) -> String {
    let mut out = String::from(MESH_CSV_HEADER);
    out.push('\n');
    for v in &mesh.vertices {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt17(v.uv[0]),
            fmt17(v.uv[1]),
            fmt17(v.point[0]),
            fmt17(v.point[1]),
            fmt17(v.point[2]),
            fmt17(v.normal[0]),
            fmt17(v.normal[1]),
            fmt17(v.normal[2])
        );
    }
    out
}

/// Writes the serialized mesh atomically (temp file, then rename).
pub fn export_to_path(
    mesh: &TriMesh,
    format: MeshFormat,
    path: &std::path::Path,
) -> Result<(), MeshError> {
    let body = export(mesh, format);
    let io_err = |source| MeshError::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("tmp");
    let mut file = std::fs::File::create(&tmp).map_err(io_err)?;
    file.write_all(body.as_bytes()).map_err(io_err)?;
    file.sync_all().map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

/// Parses the OBJ subset produced by [`export`]: `v`, `vn` and `f a//a b//b c//c`
/// lines. Parameter coordinates are not part of OBJ and come back as zeros.
pub fn parse_obj(text: &str) -> Result<TriMesh, MeshError> {
    let mut points: Vec<[f64; 3]> = Vec::new();
    let mut normals: Vec<[f64; 3]> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        let err = |detail: String| MeshError::Parse {
            line: lineno + 1,
            detail,
        };
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") | Some("vn") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    *c = parts
                        .next()
                        .ok_or_else(|| err("missing coordinate".into()))?
                        .parse()
                        .map_err(|e| err(format!("bad float: {e}")))?;
                }
                if line.starts_with("vn") {
                    normals.push(coords);
                } else {
                    points.push(coords);
                }
            }
            Some("f") => {
                let mut idx = [0u32; 3];
                for i in idx.iter_mut() {
                    let token = parts.next().ok_or_else(|| err("missing face index".into()))?;
                    let first = token.split('/').next().unwrap();
                    let one_based: u32 = first
                        .parse()
                        .map_err(|e| err(format!("bad index: {e}")))?;
                    if one_based == 0 {
                        return Err(err("obj indices are 1-based".into()));
                    }
                    *i = one_based - 1;
                }
                triangles.push(idx);
            }
            Some(other) => return Err(err(format!("unsupported directive {other}"))),
            None => {}
        }
    }
    if normals.len() != points.len() && !normals.is_empty() {
        return Err(MeshError::Parse {
            line: 0,
            detail: format!("{} vertices but {} normals", points.len(), normals.len()),
        });
    }
    let vertices = points
        .into_iter()
        .enumerate()
        .map(|(i, point)| Vertex {
            point,
            uv: [0.0, 0.0],
            normal: normals.get(i).copied().unwrap_or([0.0, 0.0, 1.0]),
        })
        .collect();
    Ok(TriMesh {
        vertices,
        triangles,
        kind: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_triangle() -> TriMesh {
        let v = |x: f64, y: f64| Vertex {
            point: [x, y, 1.0],
            uv: [x, y],
            normal: [0.0, 0.0, 1.0],
        };
        TriMesh {
            vertices: vec![v(0.0, 0.0), v(1.0, 0.0), v(0.0, 1.0)],
            triangles: vec![[0, 1, 2]],
            kind: None,
        }
    }

    #[test]
    fn minimal_mesh_has_the_expected_line_counts() {
        let text = export(&one_triangle(), MeshFormat::Obj);
        let count = |p: &str| {
            text.lines()
                .filter(|l| l.starts_with(p) && !l.starts_with('#'))
                .count()
        };
        assert_eq!(count("v "), 3);
        assert_eq!(count("vn "), 3);
        assert_eq!(count("f "), 1);
        assert!(text.lines().next().unwrap().starts_with('#'));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn empty_mesh_exports_header_only() {
        let text = export(&TriMesh::empty(), MeshFormat::Obj);
        assert_eq!(text.lines().count(), 1);
        assert!(text.starts_with('#'));
        let csv = export(&TriMesh::empty(), MeshFormat::Csv);
        assert_eq!(csv.trim_end(), MESH_CSV_HEADER);
    }

    #[test]
    fn obj_round_trip_preserves_geometry() {
        let mesh = one_triangle();
        let parsed = parse_obj(&export(&mesh, MeshFormat::Obj)).unwrap();
        assert_eq!(parsed.vertices.len(), mesh.vertices.len());
        assert_eq!(parsed.triangles, mesh.triangles);
        for (a, b) in parsed.vertices.iter().zip(&mesh.vertices) {
            assert_eq!(a.point, b.point);
            assert_eq!(a.normal, b.normal);
        }
    }

    #[test]
    fn csv_has_one_row_per_vertex() {
        let csv = export(&one_triangle(), MeshFormat::Csv);
        assert_eq!(csv.lines().count(), 4);
        assert_eq!(csv.lines().next().unwrap(), MESH_CSV_HEADER);
    }
}
