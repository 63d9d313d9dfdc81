//! Single-lander mobility.
//!
//! Two actuation modes are modelled:
//!
//! * thrust-propelled ballistic hops with three-axis PD attitude hold
//!   ([`propelled_hop`]);
//! * reaction-wheel tumbling and hopping, where the lander pivots on one
//!   ground spike (the stride phase) before it either tips onto the next spike
//!   or leaves the ground ([`hybrid_control_hop`] and the closed-form helpers in
//!   [`stride`]).
//!
//! All rigid-body integration is semi-implicit Euler at a fixed step.

mod attitude;
mod hybrid;
mod propelled;
pub mod stride;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use attitude::{pd_torque, AttitudeController};
pub use hybrid::{hybrid_control_hop, HybridHopOptions, PlanarBody};
pub use propelled::{burn_time_for, propelled_hop, rocket_delta_v, PropelledHopOptions};
pub use stride::{
    hop_launch, hop_torque_for_range, hop_wheel_speed_threshold, min_tumble_torque,
    simulate_stride, stride_energy, stride_step, wheel_speed_for_range, HopLaunch, HopRequirement,
    StrideRun,
};

/// Surface gravity used when a scenario does not specify one, m/s².
pub const DEFAULT_GRAVITY: f64 = 0.001;

#[derive(Debug, Error, PartialEq)]
pub enum MobilityError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("burn needs {required:e} kg of propellant but only {available:e} kg is loaded")]
    InsufficientPropellant { required: f64, available: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("torque {torque:e} N·m does not exceed the tumbling threshold {threshold:e} N·m")]
    InsufficientTorque { torque: f64, threshold: f64 },
    #[error("commanded wheel speed {target} rad/s exceeds saturation {limit} rad/s")]
    Saturation { target: f64, limit: f64 },
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), MobilityError> {
    if ok {
        Ok(())
    } else {
        Err(MobilityError::InvalidParameter(what()))
    }
}

/// Rigid lander body in the planar pivot model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LanderBody {
    /// kg.
    pub mass: f64,
    /// Moment of inertia about the centre of mass, kg·m².
    pub inertia: f64,
    /// Distance from the pivot spike tip to the centre of mass, m.
    pub pivot_arm: f64,
    /// Rest angle of the centre-of-mass/pivot line from vertical due to the body, rad.
    pub alpha: f64,
    /// Additional rest angle due to the spike, rad.
    pub beta: f64,
    /// Wheel-to-body transfer efficiency, `0 < η ≤ 1`.
    pub efficiency: f64,
}

impl Default for LanderBody {
    /// 1 kg, 10 cm cube (I = m s²/6), 0.1 m arm, 45° rest angle, η = 0.9.
    fn default() -> Self {
        Self {
            mass: 1.0,
            inertia: 1.0 * 0.1 * 0.1 / 6.0,
            pivot_arm: 0.1,
            alpha: std::f64::consts::FRAC_PI_4,
            beta: 0.0,
            efficiency: 0.9,
        }
    }
}

impl LanderBody {
    pub fn validate(&self) -> Result<(), MobilityError> {
        check(self.mass > 0.0, || {
            format!("mass {} must be > 0", self.mass)
        })?;
        check(self.inertia > 0.0, || {
            format!("inertia {} must be > 0", self.inertia)
        })?;
        check(self.pivot_arm > 0.0, || {
            format!("pivot arm {} must be > 0", self.pivot_arm)
        })?;
        let rest = self.rest_angle();
        check((0.0..std::f64::consts::FRAC_PI_2).contains(&rest), || {
            format!("alpha + beta = {rest} must lie in [0, pi/2)")
        })?;
        check(self.efficiency > 0.0 && self.efficiency <= 1.0, || {
            format!("efficiency {} must lie in (0, 1]", self.efficiency)
        })
    }

    /// `α + β`.
    pub fn rest_angle(&self) -> f64 {
        self.alpha + self.beta
    }

    /// Moment of inertia about the pivot, `I_s + m l²`.
    pub fn pivot_inertia(&self) -> f64 {
        self.inertia + self.mass * self.pivot_arm * self.pivot_arm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactionWheel {
    /// kg·m².
    pub inertia: f64,
    /// N·m.
    pub max_torque: f64,
    /// rad/s.
    pub max_speed: f64,
    /// kg.
    pub mass: f64,
    /// m.
    pub radius: f64,
}

impl Default for ReactionWheel {
    /// 100 g solid disc of radius 4.3 cm, 10 mN·m, 1000 rad/s.
    fn default() -> Self {
        Self::solid_disc(0.1, 0.043, 0.01, 1000.0)
    }
}

impl ReactionWheel {
    pub fn solid_disc(mass: f64, radius: f64, max_torque: f64, max_speed: f64) -> Self {
        Self {
            inertia: 0.5 * mass * radius * radius,
            max_torque,
            max_speed,
            mass,
            radius,
        }
    }

    pub fn validate(&self) -> Result<(), MobilityError> {
        check(self.inertia > 0.0, || {
            format!("wheel inertia {} must be > 0", self.inertia)
        })?;
        check(self.max_torque > 0.0, || {
            format!("wheel max torque {} must be > 0", self.max_torque)
        })?;
        check(self.max_speed > 0.0, || {
            format!("wheel max speed {} must be > 0", self.max_speed)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropulsionUnit {
    /// N.
    pub thrust: f64,
    /// Specific impulse, s.
    pub isp: f64,
    /// Loaded propellant, kg.
    pub propellant_mass: f64,
}

impl Default for PropulsionUnit {
    /// RP-1/H₂O₂ micro-thruster: 44.5 mN at 370 s, 1 g of propellant loaded.
    fn default() -> Self {
        Self {
            thrust: 0.0445,
            isp: 370.0,
            propellant_mass: 1e-3,
        }
    }
}

impl PropulsionUnit {
    pub fn validate(&self) -> Result<(), MobilityError> {
        check(self.thrust > 0.0, || {
            format!("thrust {} must be > 0", self.thrust)
        })?;
        check(self.isp > 0.0, || format!("isp {} must be > 0", self.isp))?;
        check(self.propellant_mass >= 0.0, || {
            format!("propellant mass {} must be >= 0", self.propellant_mass)
        })
    }

    /// Propellant mass flow, kg/s.
    pub fn mass_flow(&self) -> f64 {
        self.thrust / (self.isp * crate::STANDARD_GRAVITY)
    }
}

/// Spike/ground contact: spring-damper along the normal, Coulomb friction along the surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactParams {
    /// N/m.
    pub stiffness: f64,
    /// N·s/m.
    pub damping: f64,
    pub friction: f64,
}

impl ContactParams {
    /// Critically damped normal response for a body of `mass`.
    pub fn critical(stiffness: f64, mass: f64, friction: f64) -> Self {
        Self {
            stiffness,
            damping: 2.0 * (stiffness * mass).sqrt(),
            friction,
        }
    }

    pub fn validate(&self) -> Result<(), MobilityError> {
        check(self.stiffness > 0.0, || {
            format!("contact stiffness {} must be > 0", self.stiffness)
        })?;
        check(self.damping >= 0.0, || {
            format!("contact damping {} must be >= 0", self.damping)
        })?;
        check(self.friction >= 0.0, || {
            format!("friction coefficient {} must be >= 0", self.friction)
        })
    }
}

impl Default for ContactParams {
    /// k = 1000 N/m, critical damping for the default 1 kg body, μ = 0.5.
    fn default() -> Self {
        Self::critical(1000.0, 1.0, 0.5)
    }
}

/// How a manoeuvre ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotionOutcome {
    /// Never left its resting contact.
    Stationary,
    /// Pivoted up and fell back onto its original spikes.
    RockedBack,
    /// Pivoted over onto the adjacent spike without leaving the ground.
    Tumbled,
    /// Left the ground and landed again.
    Hopped,
    /// Still airborne when the time budget ran out.
    Airborne,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    /// Roll, pitch, yaw, rad.
    pub euler: Vector3<f64>,
    /// Body rates, rad/s.
    pub omega: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopSummary {
    pub range_m: f64,
    pub max_speed_m_s: f64,
    pub propellant_kg: f64,
    pub escaped: bool,
}

/// Time series plus summary. `range_m` is the horizontal distance between the
/// first and last ground-contact points.
#[derive(Debug, Clone, PartialEq)]
pub struct HopTrajectory {
    pub samples: Vec<TrajectorySample>,
    pub summary: HopSummary,
    pub outcome: MotionOutcome,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        LanderBody::default().validate().unwrap();
        ReactionWheel::default().validate().unwrap();
        PropulsionUnit::default().validate().unwrap();
        ContactParams::default().validate().unwrap();
    }

    #[test]
    fn body_validation_catches_each_field() {
        let ok = LanderBody::default();
        let bad = [
            LanderBody { mass: 0.0, ..ok },
            LanderBody {
                inertia: -1.0,
                ..ok
            },
            LanderBody {
                pivot_arm: 0.0,
                ..ok
            },
            LanderBody {
                alpha: 1.0,
                beta: 0.6,
                ..ok
            },
            LanderBody { alpha: -0.1, ..ok },
            LanderBody {
                efficiency: 0.0,
                ..ok
            },
            LanderBody {
                efficiency: 1.2,
                ..ok
            },
        ];
        for b in bad {
            assert!(b.validate().is_err(), "{b:?}");
        }
    }

    #[test]
    fn wheel_from_disc() {
        let w = ReactionWheel::default();
        assert!((w.inertia - 0.5 * 0.1 * 0.043 * 0.043).abs() < 1e-18);
        assert!(ReactionWheel {
            max_speed: 0.0,
            ..w
        }
        .validate()
        .is_err());
    }

    #[test]
    fn contact_critical_damping() {
        let c = ContactParams::default();
        assert!((c.damping - 2.0 * 1000f64.sqrt()).abs() < 1e-12);
        assert!(ContactParams {
            friction: -0.1,
            ..c
        }
        .validate()
        .is_err());
    }
}
