use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{check, MobilityError};

/// Three-axis PD attitude law driving the reaction wheels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttitudeController {
    /// N·m/rad.
    pub kp: f64,
    /// N·m·s/rad.
    pub kd: f64,
    /// Commanded roll, pitch, yaw, rad.
    pub euler_des: Vector3<f64>,
    /// Commanded body rates, rad/s.
    pub omega_des: Vector3<f64>,
    /// Per-axis torque clamp, N·m.
    pub torque_limit: f64,
}

impl Default for AttitudeController {
    /// Level hold, roughly critically damped for the default 1 kg cube.
    fn default() -> Self {
        Self {
            kp: 2e-3,
            kd: 4e-3,
            euler_des: Vector3::zeros(),
            omega_des: Vector3::zeros(),
            torque_limit: 0.01,
        }
    }
}

impl AttitudeController {
    pub fn validate(&self) -> Result<(), MobilityError> {
        check(self.kp > 0.0 && self.kd > 0.0, || {
            format!("gains kp = {}, kd = {} must be > 0", self.kp, self.kd)
        })?;
        check(self.torque_limit > 0.0, || {
            format!("torque limit {} must be > 0", self.torque_limit)
        })
    }
}

/// `τ = K_p (e_des − e_act) + K_d (ω_des − ω_act)`, each axis clamped to the
/// controller's torque limit.
pub fn pd_torque(
    ctrl: &AttitudeController,
    euler_act: &Vector3<f64>,
    omega_act: &Vector3<f64>,
) -> Vector3<f64> {
    let raw = ctrl.kp * (ctrl.euler_des - euler_act) + ctrl.kd * (ctrl.omega_des - omega_act);
    raw.map(|t| t.clamp(-ctrl.torque_limit, ctrl.torque_limit))
}
