use nalgebra::{Rotation3, Vector3};

use super::{
    check, pd_torque, AttitudeController, HopSummary, HopTrajectory, LanderBody, MobilityError,
    MotionOutcome, PropulsionUnit, ReactionWheel, TrajectorySample,
};
use crate::STANDARD_GRAVITY;

/// `Δv = Isp · g₀ · ln(m0 / (m0 − burned))`.
pub fn rocket_delta_v(prop: &PropulsionUnit, m0: f64, burned: f64) -> Result<f64, MobilityError> {
    if !(burned >= 0.0) || !(burned < m0) {
        return Err(MobilityError::Domain(format!(
            "burned mass {burned} must lie in [0, {m0})"
        )));
    }
    Ok(prop.isp * STANDARD_GRAVITY * (m0 / (m0 - burned)).ln())
}

/// Burn duration that consumes `burned` kg at full thrust.
pub fn burn_time_for(prop: &PropulsionUnit, burned: f64) -> f64 {
    burned / prop.mass_flow()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropelledHopOptions {
    /// Uniform surface gravity along −z, m/s².
    pub gravity: f64,
    /// Constant-thrust burn duration from t = 0, s.
    pub burn_time: f64,
    pub dt: f64,
    /// Speeds above this set the `escaped` flag.
    pub escape_velocity: Option<f64>,
    /// Attitude at ignition (roll, pitch, yaw), rad.
    pub initial_euler: Vector3<f64>,
    /// Integration stops here even if the lander has not come down, s.
    pub max_time: f64,
    /// Record every n-th step (the first and last states are always kept).
    pub sample_every: usize,
}

impl Default for PropelledHopOptions {
    fn default() -> Self {
        Self {
            gravity: super::DEFAULT_GRAVITY,
            burn_time: 0.0,
            dt: 1e-3,
            escape_velocity: None,
            initial_euler: Vector3::zeros(),
            max_time: 1e4,
            sample_every: 1,
        }
    }
}

/// Thrust along body +z for `burn_time`, then ballistic flight under uniform
/// gravity until the lander returns to `z = 0`. A three-axis PD law on the
/// reaction wheels holds the commanded attitude throughout; wheel torque is
/// clamped to `wheel.max_torque` and wheel speed to `wheel.max_speed`.
pub fn propelled_hop(
    body: &LanderBody,
    wheel: &ReactionWheel,
    prop: &PropulsionUnit,
    ctrl: &AttitudeController,
    opts: &PropelledHopOptions,
) -> Result<HopTrajectory, MobilityError> {
    body.validate()?;
    wheel.validate()?;
    prop.validate()?;
    ctrl.validate()?;
    check(opts.gravity > 0.0, || {
        format!("gravity {} must be > 0", opts.gravity)
    })?;
    check(opts.dt > 0.0, || format!("dt {} must be > 0", opts.dt))?;
    check(opts.burn_time >= 0.0, || {
        format!("burn time {} must be >= 0", opts.burn_time)
    })?;
    check(opts.max_time > 0.0, || {
        format!("max time {} must be > 0", opts.max_time)
    })?;
    let required = prop.mass_flow() * opts.burn_time;
    if required > prop.propellant_mass {
        return Err(MobilityError::InsufficientPropellant {
            required,
            available: prop.propellant_mass,
        });
    }

    let dt = opts.dt;
    let g = opts.gravity;
    let flow = prop.mass_flow();
    let every = opts.sample_every.max(1);
    let torque_cap = wheel.max_torque.min(ctrl.torque_limit);

    let mut t = 0.0;
    let mut pos = Vector3::<f64>::zeros();
    let mut vel = Vector3::<f64>::zeros();
    let mut euler = opts.initial_euler;
    let mut omega = Vector3::<f64>::zeros();
    let mut wheel_speed = Vector3::<f64>::zeros();
    let mut mass = body.mass;
    let mut burned = 0.0;
    let mut airborne = false;
    let mut max_speed: f64 = 0.0;

    let snapshot = |t, pos, vel, euler, omega| TrajectorySample {
        t,
        position: pos,
        velocity: vel,
        euler,
        omega,
    };
    let mut samples = vec![snapshot(t, pos, vel, euler, omega)];
    let mut outcome = MotionOutcome::Airborne;
    let mut step: usize = 0;

    while t < opts.max_time {
        // Attitude: PD torque through the wheels, limited by wheel saturation.
        let mut torque = pd_torque(ctrl, &euler, &omega).map(|c| c.clamp(-torque_cap, torque_cap));
        for k in 0..3 {
            let next = wheel_speed[k] - torque[k] / wheel.inertia * dt;
            if next.abs() > wheel.max_speed {
                let bound = wheel.max_speed.copysign(next);
                torque[k] = (wheel_speed[k] - bound) * wheel.inertia / dt;
                wheel_speed[k] = bound;
            } else {
                wheel_speed[k] = next;
            }
        }

        let firing = ((opts.burn_time - t) / dt).clamp(0.0, 1.0);
        let attitude = Rotation3::from_euler_angles(euler.x, euler.y, euler.z);
        let thrust = attitude * Vector3::new(0.0, 0.0, prop.thrust * firing);
        let mut acc = thrust / mass - Vector3::new(0.0, 0.0, g);

        omega += torque / body.inertia * dt;
        euler += euler_rates(&euler, &omega) * dt;

        if !airborne {
            if acc.z <= 0.0 {
                // The ground reacts; static friction holds the footprint.
                acc = Vector3::zeros();
            } else {
                airborne = true;
            }
        }

        let prev = pos;
        vel += acc * dt;
        pos += vel * dt;
        let used = flow * firing * dt;
        mass -= used;
        burned += used;
        t += dt;
        step += 1;
        max_speed = max_speed.max(vel.norm());

        if airborne && pos.z <= 0.0 && vel.z < 0.0 {
            let s = prev.z / (prev.z - pos.z);
            pos = prev + (pos - prev) * s;
            pos.z = 0.0;
            t -= dt * (1.0 - s);
            samples.push(snapshot(t, pos, vel, euler, omega));
            outcome = MotionOutcome::Hopped;
            break;
        }
        if !airborne && firing == 0.0 {
            samples.push(snapshot(t, pos, vel, euler, omega));
            outcome = MotionOutcome::Stationary;
            break;
        }
        if step.is_multiple_of(every) {
            samples.push(snapshot(t, pos, vel, euler, omega));
        }
    }
    if outcome == MotionOutcome::Airborne && samples.last().map(|s| s.t) != Some(t) {
        samples.push(snapshot(t, pos, vel, euler, omega));
    }

    let range_m = match outcome {
        MotionOutcome::Hopped => (pos.x * pos.x + pos.y * pos.y).sqrt(),
        _ => 0.0,
    };
    let escaped = opts.escape_velocity.is_some_and(|v| max_speed > v);
    Ok(HopTrajectory {
        samples,
        summary: HopSummary {
            range_m,
            max_speed_m_s: max_speed,
            propellant_kg: burned,
            escaped,
        },
        outcome,
    })
}

/// ZYX Euler-angle rates from body rates.
fn euler_rates(euler: &Vector3<f64>, omega: &Vector3<f64>) -> Vector3<f64> {
    let (sr, cr) = euler.x.sin_cos();
    let (tp, cp) = (euler.y.tan(), euler.y.cos());
    let (p, q, r) = (omega.x, omega.y, omega.z);
    Vector3::new(
        p + (q * sr + r * cr) * tp,
        q * cr - r * sr,
        (q * sr + r * cr) / cp,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rocket_equation_values() {
        let prop = PropulsionUnit::default();
        assert_eq!(rocket_delta_v(&prop, 1.0, 0.0).unwrap(), 0.0);
        let dv = rocket_delta_v(&prop, 1.0, 20e-6).unwrap();
        // 370 · 9.80665 · ln(1 / 0.99998)
        let expected = 370.0 * 9.80665 * (1.0f64 / (1.0 - 20e-6)).ln();
        assert!((dv - expected).abs() < 1e-15);
        assert!((dv - 0.0726).abs() < 5e-5);
        let doubled = PropulsionUnit { isp: 740.0, ..prop };
        assert!((rocket_delta_v(&doubled, 1.0, 20e-6).unwrap() - 2.0 * dv).abs() < 1e-15);
    }

    #[test]
    fn rocket_equation_domain() {
        let prop = PropulsionUnit::default();
        assert!(matches!(
            rocket_delta_v(&prop, 1.0, 1.0),
            Err(MobilityError::Domain(_))
        ));
        assert!(rocket_delta_v(&prop, 1.0, -0.1).is_err());
    }

    #[test]
    fn no_burn_stays_on_ground() {
        let hop = propelled_hop(
            &LanderBody::default(),
            &ReactionWheel::default(),
            &PropulsionUnit::default(),
            &AttitudeController::default(),
            &PropelledHopOptions::default(),
        )
        .unwrap();
        assert_eq!(hop.outcome, MotionOutcome::Stationary);
        assert_eq!(hop.summary.range_m, 0.0);
        assert_eq!(hop.summary.max_speed_m_s, 0.0);
        assert!(hop.samples.iter().all(|s| s.position == Vector3::zeros()));
    }

    #[test]
    fn short_burn_too_weak_to_lift_stays_grounded() {
        let weak = PropulsionUnit {
            thrust: 1e-4,
            ..Default::default()
        };
        let opts = PropelledHopOptions {
            burn_time: 2.0,
            ..Default::default()
        };
        let hop = propelled_hop(
            &LanderBody::default(),
            &ReactionWheel::default(),
            &weak,
            &AttitudeController::default(),
            &PropelledHopOptions {
                gravity: 1.0,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(hop.outcome, MotionOutcome::Stationary);
    }

    #[test]
    fn insufficient_propellant() {
        let prop = PropulsionUnit {
            propellant_mass: 1e-6,
            ..Default::default()
        };
        let opts = PropelledHopOptions {
            burn_time: 1.0,
            ..Default::default()
        };
        let err = propelled_hop(
            &LanderBody::default(),
            &ReactionWheel::default(),
            &prop,
            &AttitudeController::default(),
            &opts,
        )
        .unwrap_err();
        assert!(matches!(err, MobilityError::InsufficientPropellant { .. }));
    }

    #[test]
    fn level_vertical_hop_has_no_range() {
        let prop = PropulsionUnit::default();
        let opts = PropelledHopOptions {
            burn_time: burn_time_for(&prop, 20e-6),
            dt: 1e-2,
            ..Default::default()
        };
        let hop = propelled_hop(
            &LanderBody::default(),
            &ReactionWheel::default(),
            &prop,
            &AttitudeController::default(),
            &opts,
        )
        .unwrap();
        assert_eq!(hop.outcome, MotionOutcome::Hopped);
        assert!(hop.summary.range_m < 1e-6);
        assert!((hop.summary.propellant_kg - 20e-6).abs() < 1e-12);
        let last = hop.samples.last().unwrap();
        assert_eq!(last.position.z, 0.0);
        assert!(hop.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn tilted_start_converges_to_level_and_drifts() {
        let prop = PropulsionUnit::default();
        let opts = PropelledHopOptions {
            burn_time: burn_time_for(&prop, 20e-6),
            dt: 1e-2,
            initial_euler: Vector3::new(0.1, -0.05, 0.2),
            escape_velocity: Some(0.05),
            ..Default::default()
        };
        let hop = propelled_hop(
            &LanderBody::default(),
            &ReactionWheel::default(),
            &prop,
            &AttitudeController::default(),
            &opts,
        )
        .unwrap();
        assert_eq!(hop.outcome, MotionOutcome::Hopped);
        assert!(hop.summary.range_m > 1e-4);
        assert!(hop.summary.escaped);
        let last = hop.samples.last().unwrap();
        assert!(last.euler.norm() < 1e-3, "{:?}", last.euler);
    }

    #[test]
    fn wheel_speed_saturation_limits_torque() {
        let prop = PropulsionUnit::default();
        let tiny = ReactionWheel {
            max_speed: 0.5,
            ..Default::default()
        };
        let opts = PropelledHopOptions {
            burn_time: burn_time_for(&prop, 20e-6),
            dt: 1e-2,
            initial_euler: Vector3::new(0.5, 0.0, 0.0),
            ..Default::default()
        };
        let free = propelled_hop(
            &LanderBody::default(),
            &ReactionWheel::default(),
            &prop,
            &AttitudeController::default(),
            &opts,
        )
        .unwrap();
        let limited = propelled_hop(
            &LanderBody::default(),
            &tiny,
            &prop,
            &AttitudeController::default(),
            &opts,
        )
        .unwrap();
        // momentum budget I_r·ω_max caps the body rate at I_r·ω_max / I_s
        let cap = tiny.inertia * tiny.max_speed / LanderBody::default().inertia;
        assert!(limited
            .samples
            .iter()
            .all(|s| s.omega.x.abs() <= cap + 1e-12));
        assert!(free.samples.iter().any(|s| s.omega.x.abs() > cap));
    }
}
