//! Gravity of homogeneous triangulated bodies.
//!
//! Shapes are closed, outward-oriented triangle meshes. The field is evaluated
//! with the edge-dyad/face-dyad polyhedron formulation, which is exact for a
//! constant-density polyhedron at any exterior point. Potentials follow the
//! physics sign convention (negative, vanishing at infinity) so that
//! `acceleration == -grad(potential)`. Very distant points fall back to the
//! body's quadrupole expansion, where the direct sums cancel catastrophically.

mod field;
mod map;
mod mesh;

use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use field::{polyhedron_field, FAR_FIELD_RATIO};
pub use map::{surface_gravity_map, Axis, GravityGrid, GridSample, SampleFlag, SlicePlane};
pub use mesh::{cube, icosphere, load_shape, parse_shape};

/// Points closer than this to any face are treated as singular, in metres.
pub const SINGULARITY_GUARD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GravityError {
    #[error("i/o error reading shape: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("open or non-manifold mesh: {0}")]
    Topology(String),
    #[error("faces are inverted (signed volume {volume:e} m^3 is not positive)")]
    Orientation { volume: f64 },
    #[error("density must be positive, got {0}")]
    Density(f64),
    #[error("field point {point:?} lies within {distance:e} m of the surface")]
    Singularity { point: [f64; 3], distance: f64 },
    #[error("grid resolution must be positive, got {0}")]
    Resolution(f64),
}

/// One field evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GravitySample {
    pub point: Point3<f64>,
    /// J/kg, negative outside the body.
    pub potential: f64,
    /// m/s².
    pub acceleration: Vector3<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Edge {
    pub a: usize,
    pub b: usize,
    pub dyad: Matrix3<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Face {
    pub vertices: [usize; 3],
    pub normal: Vector3<f64>,
    pub dyad: Matrix3<f64>,
}

/// A validated, closed, outward-oriented triangle mesh with uniform density.
///
/// Construction precomputes the per-edge and per-face dyads so field
/// evaluation is a single pass over edges and faces.
#[derive(Debug, Clone)]
pub struct ShapeModel {
    vertices: Vec<Point3<f64>>,
    faces: Vec<[usize; 3]>,
    density: f64,
    volume: f64,
    centroid: Point3<f64>,
    /// Mass quadrupole ∫ρ(3xxᵀ − |x|²I)dV about the centroid, kg·m².
    pub(crate) quadrupole: Matrix3<f64>,
    bounding_radius: f64,
    pub(crate) edge_terms: Vec<Edge>,
    pub(crate) face_terms: Vec<Face>,
}

impl ShapeModel {
    /// Validates the mesh: indices in range, non-degenerate triangles, every
    /// edge shared by exactly two faces with opposite traversal, and positive
    /// signed volume.
    pub fn new(
        vertices: Vec<Point3<f64>>,
        faces: Vec<[usize; 3]>,
        density: f64,
    ) -> Result<Self, GravityError> {
        if !(density > 0.0) || !density.is_finite() {
            return Err(GravityError::Density(density));
        }
        if faces.len() < 4 {
            return Err(GravityError::Topology(format!(
                "a closed mesh needs at least 4 faces, got {}",
                faces.len()
            )));
        }
        for (k, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= vertices.len()) {
                return Err(GravityError::Topology(format!(
                    "face {k} references vertex {bad} but only {} vertices exist",
                    vertices.len()
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(GravityError::Topology(format!("face {k} repeats a vertex")));
            }
        }

        let face_terms: Vec<Face> = faces
            .iter()
            .enumerate()
            .map(|(k, &f)| {
                let [p, q, r] = f.map(|i| vertices[i]);
                let n = (q - p).cross(&(r - p));
                let norm = n.norm();
                if norm == 0.0 {
                    return Err(GravityError::Topology(format!("face {k} has zero area")));
                }
                let normal = n / norm;
                Ok(Face {
                    vertices: f,
                    normal,
                    dyad: normal * normal.transpose(),
                })
            })
            .collect::<Result<_, _>>()?;

        let edge_terms = build_edges(&vertices, &face_terms)?;

        // Divergence theorem: V = (1/6) Σ v0 · (v1 × v2).
        let mut volume = 0.0;
        let mut moment = Vector3::zeros();
        for f in &faces {
            let [p, q, r] = f.map(|i| vertices[i].coords);
            let v6 = p.dot(&q.cross(&r));
            volume += v6;
            moment += v6 * (p + q + r);
        }
        volume /= 6.0;
        if !(volume > 0.0) {
            return Err(GravityError::Orientation { volume });
        }
        let centroid = Point3::from(moment / (24.0 * volume));

        // Second moments from tetrahedra fanned out of the centroid:
        // ∫xxᵀdV = (det/120)(Σ vvᵀ + (Σv)(Σv)ᵀ) for a tetrahedron (0, a, b, c).
        let mut second = Matrix3::zeros();
        for f in &faces {
            let [a, b, c] = f.map(|i| vertices[i] - centroid);
            let det = a.dot(&b.cross(&c));
            let sum = a + b + c;
            second +=
                (a * a.transpose() + b * b.transpose() + c * c.transpose() + sum * sum.transpose())
                    * (det / 120.0);
        }
        let quadrupole = (3.0 * second - Matrix3::identity() * second.trace()) * density;
        let bounding_radius = vertices
            .iter()
            .map(|v| (v - centroid).norm())
            .fold(0.0, f64::max);

        Ok(Self {
            vertices,
            faces,
            density,
            volume,
            centroid,
            quadrupole,
            bounding_radius,
            edge_terms,
            face_terms,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// kg/m³.
    pub fn density(&self) -> f64 {
        self.density
    }

    /// m³.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// kg.
    pub fn mass(&self) -> f64 {
        self.volume * self.density
    }

    pub fn centroid(&self) -> Point3<f64> {
        self.centroid
    }

    /// Largest vertex distance from the centroid.
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    /// Same geometry with a different density.
    pub fn with_density(&self, density: f64) -> Result<Self, GravityError> {
        if !(density > 0.0) || !density.is_finite() {
            return Err(GravityError::Density(density));
        }
        Ok(Self {
            density,
            quadrupole: self.quadrupole * (density / self.density),
            ..self.clone()
        })
    }

    /// Applies `f` to every vertex and revalidates.
    pub fn map_vertices<F>(&self, f: F) -> Result<Self, GravityError>
    where
        F: Fn(&Point3<f64>) -> Point3<f64>,
    {
        Self::new(
            self.vertices.iter().map(f).collect(),
            self.faces.clone(),
            self.density,
        )
    }
}

fn build_edges(vertices: &[Point3<f64>], faces: &[Face]) -> Result<Vec<Edge>, GravityError> {
    use std::collections::BTreeMap;

    // (min, max) -> list of (face index, traversed from, traversed to)
    #[allow(clippy::type_complexity)]
    let mut uses: BTreeMap<(usize, usize), Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (k, face) in faces.iter().enumerate() {
        let [i, j, l] = face.vertices;
        for (a, b) in [(i, j), (j, l), (l, i)] {
            uses.entry((a.min(b), a.max(b)))
                .or_default()
                .push((k, a, b));
        }
    }

    let mut edges = Vec::with_capacity(uses.len());
    for ((lo, hi), users) in uses {
        if users.len() != 2 {
            return Err(GravityError::Topology(format!(
                "edge ({lo}, {hi}) is shared by {} face(s), expected 2",
                users.len()
            )));
        }
        let (fa, a0, a1) = users[0];
        let (fb, b0, b1) = users[1];
        if a0 != b1 || a1 != b0 {
            return Err(GravityError::Topology(format!(
                "faces {fa} and {fb} traverse edge ({lo}, {hi}) in the same direction"
            )));
        }
        let edge_normal = |face: &Face, from: usize, to: usize| {
            (vertices[to] - vertices[from])
                .cross(&face.normal)
                .normalize()
        };
        let na = faces[fa].normal;
        let nb = faces[fb].normal;
        let dyad = na * edge_normal(&faces[fa], a0, a1).transpose()
            + nb * edge_normal(&faces[fb], b0, b1).transpose();
        edges.push(Edge { a: a0, b: a1, dyad });
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_properties() {
        let c = cube(1.0, 2000.0);
        assert_eq!(c.faces().len(), 12);
        assert!((c.volume() - 1.0).abs() < 1e-14);
        assert!((c.mass() - 2000.0).abs() < 1e-10);
        assert!(c.centroid().coords.norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_density() {
        let c = cube(1.0, 1.0);
        assert!(matches!(c.with_density(0.0), Err(GravityError::Density(_))));
        assert!(matches!(
            ShapeModel::new(c.vertices().to_vec(), c.faces().to_vec(), -3.0),
            Err(GravityError::Density(_))
        ));
    }

    #[test]
    fn inverted_faces_fail_orientation() {
        let c = cube(1.0, 1.0);
        let flipped: Vec<_> = c.faces().iter().map(|f| [f[0], f[2], f[1]]).collect();
        match ShapeModel::new(c.vertices().to_vec(), flipped, 1.0) {
            Err(GravityError::Orientation { volume }) => assert!((volume + 1.0).abs() < 1e-14),
            other => panic!("expected orientation error, got {other:?}"),
        }
    }

    #[test]
    fn single_flipped_face_is_topology_error() {
        let c = cube(1.0, 1.0);
        let mut faces = c.faces().to_vec();
        faces[3] = [faces[3][0], faces[3][2], faces[3][1]];
        assert!(matches!(
            ShapeModel::new(c.vertices().to_vec(), faces, 1.0),
            Err(GravityError::Topology(_))
        ));
    }

    #[test]
    fn open_mesh_is_topology_error() {
        let c = cube(1.0, 1.0);
        let mut faces = c.faces().to_vec();
        faces.pop();
        assert!(matches!(
            ShapeModel::new(c.vertices().to_vec(), faces, 1.0),
            Err(GravityError::Topology(_))
        ));
    }

    #[test]
    fn icosphere_volume_approaches_sphere() {
        let s = icosphere(3, 1.0, 1.0);
        let sphere = 4.0 / 3.0 * std::f64::consts::PI;
        assert!(s.volume() < sphere);
        assert!((s.volume() - sphere).abs() / sphere < 0.01);
    }
}
