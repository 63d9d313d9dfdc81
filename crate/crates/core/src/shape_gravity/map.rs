use nalgebra::Point3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{field_terms, is_far, multipole_sample, surface_distance};
use super::{GravityError, GravitySample, ShapeModel, SINGULARITY_GUARD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Plane `coordinate[normal] == offset`, e.g. the x–z plane is `normal: Axis::Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlicePlane {
    pub normal: Axis,
    pub offset: f64,
}

impl SlicePlane {
    /// The two in-plane axes, in increasing index order.
    pub fn in_plane_axes(&self) -> (Axis, Axis) {
        match self.normal {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::X, Axis::Z),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleFlag {
    Exterior,
    Interior,
    /// Within the singularity guard distance of the surface.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample {
    pub point: Point3<f64>,
    pub flag: SampleFlag,
    /// `None` unless `flag == Exterior`.
    pub field: Option<GravitySample>,
}

/// Row-major samples: `v` index outer, `u` index inner.
#[derive(Debug, Clone)]
pub struct GravityGrid {
    pub plane: SlicePlane,
    pub resolution: f64,
    pub u_count: usize,
    pub v_count: usize,
    pub samples: Vec<GridSample>,
}

impl GravityGrid {
    pub fn get(&self, iu: usize, iv: usize) -> &GridSample {
        &self.samples[iv * self.u_count + iu]
    }
}

/// Samples the field on `plane` over the shape's projected bounding box,
/// inflated by 50% about its centre, at spacing `resolution`. The grid is
/// symmetric about the box centre. Points inside the body or on its surface
/// are flagged rather than evaluated.
pub fn surface_gravity_map(
    shape: &ShapeModel,
    plane: SlicePlane,
    resolution: f64,
) -> Result<GravityGrid, GravityError> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(GravityError::Resolution(resolution));
    }
    let (u_axis, v_axis) = plane.in_plane_axes();
    let axis_range = |axis: Axis| {
        let k = axis.index();
        shape
            .vertices()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p[k]), hi.max(p[k]))
            })
    };
    let half_steps = |(lo, hi): (f64, f64)| {
        let centre = 0.5 * (lo + hi);
        let half = 1.5 * 0.5 * (hi - lo);
        (centre, (half / resolution).floor() as i64)
    };
    let (u_centre, u_half) = half_steps(axis_range(u_axis));
    let (v_centre, v_half) = half_steps(axis_range(v_axis));
    let u_count = (2 * u_half + 1) as usize;
    let v_count = (2 * v_half + 1) as usize;

    let points: Vec<Point3<f64>> = (-v_half..=v_half)
        .flat_map(|iv| (-u_half..=u_half).map(move |iu| (iu, iv)))
        .map(|(iu, iv)| {
            let mut p = Point3::origin();
            p[plane.normal.index()] = plane.offset;
            p[u_axis.index()] = u_centre + iu as f64 * resolution;
            p[v_axis.index()] = v_centre + iv as f64 * resolution;
            p
        })
        .collect();

    let samples = points
        .into_par_iter()
        .map(|point| classify(shape, point))
        .collect();

    Ok(GravityGrid {
        plane,
        resolution,
        u_count,
        v_count,
        samples,
    })
}

fn classify(shape: &ShapeModel, point: Point3<f64>) -> GridSample {
    if is_far(shape, &point) {
        return GridSample {
            point,
            flag: SampleFlag::Exterior,
            field: Some(multipole_sample(shape, point)),
        };
    }
    if surface_distance(shape, &point) <= SINGULARITY_GUARD {
        return GridSample {
            point,
            flag: SampleFlag::Singular,
            field: None,
        };
    }
    let terms = field_terms(shape, &point);
    // Solid angle is 0 outside and 4π inside; 2π splits the two cleanly.
    if terms.solid_angle > 2.0 * std::f64::consts::PI {
        GridSample {
            point,
            flag: SampleFlag::Interior,
            field: None,
        }
    } else {
        GridSample {
            point,
            flag: SampleFlag::Exterior,
            field: Some(terms.sample(shape, point)),
        }
    }
}
