//! Simulation stack for swarms of small asteroid landers.
//!
//! * [`shape_gravity`] evaluates the exact field of a homogeneous triangulated
//!   polyhedron and samples it on planar grids.
//! * [`mobility`] covers single-lander motion: thrust-propelled ballistic hops
//!   with PD attitude hold, and reaction-wheel tumbling/hopping about a spike.
//! * [`swarm_coverage`] spreads a swarm over a planar target area with virtual
//!   forces while keeping a minimum number of communication links.
//! * [`evolve`] tunes swarm parameters with NSGA-II over a 19-bit genotype.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod evolve;
pub mod mobility;
pub mod shape_gravity;
pub mod swarm_coverage;

/// Newtonian constant of gravitation, m³/(kg·s²).
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674e-11;

/// Standard gravity used to convert specific impulse into exhaust velocity, m/s².
pub const STANDARD_GRAVITY: f64 = 9.80665;
