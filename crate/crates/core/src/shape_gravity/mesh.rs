use std::collections::HashMap;
use std::path::Path;

use nalgebra::Point3;

use super::{GravityError, ShapeModel};

/// Reads an OBJ-subset mesh: `v x y z` and `f i j k` lines with 1-based
/// indices. Blank lines and `#` comments are skipped; `f` entries may carry
/// `/vt/vn` suffixes, which are ignored.
pub fn load_shape(path: impl AsRef<Path>, density: f64) -> Result<ShapeModel, GravityError> {
    let text = std::fs::read_to_string(path)?;
    parse_shape(&text, density)
}

pub fn parse_shape(text: &str, density: f64) -> Result<ShapeModel, GravityError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let tag = tokens.next().unwrap_or_default();
        let fields: Vec<&str> = tokens.collect();
        let err = |message: String| GravityError::Parse { line, message };
        match tag {
            "v" => {
                if fields.len() != 3 {
                    return Err(err(format!(
                        "vertex needs 3 coordinates, found {}",
                        fields.len()
                    )));
                }
                let mut xyz = [0.0; 3];
                for (slot, tok) in xyz.iter_mut().zip(&fields) {
                    *slot = tok
                        .parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(format!("bad coordinate `{tok}`")))?;
                }
                vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
            }
            "f" => {
                if fields.len() != 3 {
                    return Err(err(format!(
                        "only triangular faces are supported, found {} indices",
                        fields.len()
                    )));
                }
                let mut ijk = [0usize; 3];
                for (slot, tok) in ijk.iter_mut().zip(&fields) {
                    let head = tok.split('/').next().unwrap_or_default();
                    let one_based: usize = head
                        .parse()
                        .map_err(|_| err(format!("bad vertex index `{tok}`")))?;
                    if one_based == 0 {
                        return Err(err("vertex indices are 1-based".to_string()));
                    }
                    *slot = one_based - 1;
                }
                faces.push(ijk);
            }
            other => return Err(err(format!("unsupported directive `{other}`"))),
        }
    }

    ShapeModel::new(vertices, faces, density)
}

/// Axis-aligned cube of edge `side` centred on the origin.
pub fn cube(side: f64, density: f64) -> ShapeModel {
    let h = 0.5 * side;
    let vertices = (0..8)
        .map(|i| {
            let s = |bit: usize| if i & bit != 0 { h } else { -h };
            Point3::new(s(1), s(2), s(4))
        })
        .collect();
    let faces = vec![
        [0, 2, 1],
        [1, 2, 3],
        [4, 5, 6],
        [5, 7, 6],
        [0, 1, 5],
        [0, 5, 4],
        [2, 6, 7],
        [2, 7, 3],
        [0, 4, 6],
        [0, 6, 2],
        [1, 3, 7],
        [1, 7, 5],
    ];
    ShapeModel::new(vertices, faces, density).expect("cube mesh is valid")
}

/// Geodesic sphere: an icosahedron split `subdivisions` times, projected to `radius`.
pub fn icosphere(subdivisions: u32, radius: f64, density: f64) -> ShapeModel {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|c| Point3::from(nalgebra::Vector3::from(*c).normalize()))
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Point3<f64>>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = nalgebra::center(&verts[a], &verts[b]);
                verts.push(Point3::from(m.coords.normalize()));
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }

    for f in &mut faces {
        let [p, q, r] = f.map(|i| vertices[i]);
        if (q - p).cross(&(r - p)).dot(&p.coords) < 0.0 {
            f.swap(1, 2);
        }
    }
    let vertices = vertices.into_iter().map(|v| v * radius).collect();
    ShapeModel::new(vertices, faces, density).expect("icosphere mesh is valid")
}
