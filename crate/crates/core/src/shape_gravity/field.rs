use nalgebra::{Point3, Vector3};

use super::{GravityError, GravitySample, ShapeModel, SINGULARITY_GUARD};
use crate::GRAVITATIONAL_CONSTANT;

/// Beyond this many bounding radii the edge/face sums lose more digits to
/// cancellation (error grows like (r/R)²) than a quadrupole expansion drops.
pub const FAR_FIELD_RATIO: f64 = 1000.0;

/// Exact field of the homogeneous polyhedron at an exterior `point`.
///
/// Fails with [`GravityError::Singularity`] when `point` is within
/// [`SINGULARITY_GUARD`] of the surface, where the logarithmic edge terms blow up.
/// Points farther than [`FAR_FIELD_RATIO`] bounding radii use the
/// monopole + quadrupole expansion of the same body.
pub fn polyhedron_field(
    shape: &ShapeModel,
    point: Point3<f64>,
) -> Result<GravitySample, GravityError> {
    if is_far(shape, &point) {
        return Ok(multipole_sample(shape, point));
    }
    let distance = surface_distance(shape, &point);
    if distance <= SINGULARITY_GUARD {
        return Err(GravityError::Singularity {
            point: [point.x, point.y, point.z],
            distance,
        });
    }
    let terms = field_terms(shape, &point);
    Ok(terms.sample(shape, point))
}

pub(crate) fn is_far(shape: &ShapeModel, point: &Point3<f64>) -> bool {
    (point - shape.centroid()).norm() > FAR_FIELD_RATIO * shape.bounding_radius()
}

pub(crate) struct FieldTerms {
    /// Σ r·E·r·L − Σ r·F·r·ω, without the Gρ/2 factor.
    pub potential_sum: f64,
    /// −Σ E·r·L + Σ F·r·ω, without the Gρ factor.
    pub gradient_sum: Vector3<f64>,
    /// Total signed solid angle: 0 outside, 4π inside.
    pub solid_angle: f64,
}

impl FieldTerms {
    pub fn sample(&self, shape: &ShapeModel, point: Point3<f64>) -> GravitySample {
        let g_rho = GRAVITATIONAL_CONSTANT * shape.density();
        GravitySample {
            point,
            potential: -0.5 * g_rho * self.potential_sum,
            acceleration: g_rho * self.gradient_sum,
        }
    }
}

pub(crate) fn field_terms(shape: &ShapeModel, point: &Point3<f64>) -> FieldTerms {
    let verts = shape.vertices();
    let rel: Vec<Vector3<f64>> = verts.iter().map(|v| v - point).collect();
    let dist: Vec<f64> = rel.iter().map(|r| r.norm()).collect();

    let mut potential_sum = 0.0;
    let mut gradient_sum = Vector3::zeros();

    for edge in &shape.edge_terms {
        let (ra, rb) = (dist[edge.a], dist[edge.b]);
        let len = (verts[edge.b] - verts[edge.a]).norm();
        let wire = (2.0 * len / (ra + rb - len)).ln_1p();
        let er = edge.dyad * rel[edge.a];
        potential_sum += rel[edge.a].dot(&er) * wire;
        gradient_sum -= er * wire;
    }

    let mut solid_angle = 0.0;
    for face in &shape.face_terms {
        let [i, j, k] = face.vertices;
        let (r1, r2, r3) = (&rel[i], &rel[j], &rel[k]);
        let (d1, d2, d3) = (dist[i], dist[j], dist[k]);
        // Edge vectors are exact; the raw triple product of three long,
        // nearly parallel vectors is not.
        let num = r1.dot(&(r2 - r1).cross(&(r3 - r1)));
        let den = d1 * d2 * d3 + d1 * r2.dot(r3) + d2 * r3.dot(r1) + d3 * r1.dot(r2);
        let omega = 2.0 * num.atan2(den);
        solid_angle += omega;
        let fr = face.dyad * r1;
        potential_sum -= r1.dot(&fr) * omega;
        gradient_sum += fr * omega;
    }

    FieldTerms {
        potential_sum,
        gradient_sum,
        solid_angle,
    }
}

/// Monopole plus quadrupole expansion about the centroid.
pub(crate) fn multipole_sample(shape: &ShapeModel, point: Point3<f64>) -> GravitySample {
    let r = point - shape.centroid();
    let d2 = r.norm_squared();
    let d = d2.sqrt();
    let gm = GRAVITATIONAL_CONSTANT * shape.mass();
    let qr = shape.quadrupole * r;
    let rqr = r.dot(&qr);
    let d5 = d2 * d2 * d;
    // U = GM/r + G rᵀQr / (2 r⁵); potential = −U, acceleration = ∇U.
    let u = gm / d + 0.5 * GRAVITATIONAL_CONSTANT * rqr / d5;
    let grad = -gm * r / (d2 * d) + GRAVITATIONAL_CONSTANT * (qr / d5 - 2.5 * rqr * r / (d5 * d2));
    GravitySample {
        point,
        potential: -u,
        acceleration: grad,
    }
}

/// Unsigned distance from `p` to the nearest point on the mesh surface.
pub(crate) fn surface_distance(shape: &ShapeModel, p: &Point3<f64>) -> f64 {
    let v = shape.vertices();
    shape
        .faces()
        .iter()
        .map(|f| (closest_on_triangle(p, &v[f[0]], &v[f[1]], &v[f[2]]) - p).norm())
        .fold(f64::INFINITY, f64::min)
}

// Region-based closest point (Ericson, Real-Time Collision Detection, 5.1.5).
fn closest_on_triangle(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}
