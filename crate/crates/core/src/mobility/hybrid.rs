use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};

use super::{
    check, min_tumble_torque, ContactParams, HopSummary, HopTrajectory, LanderBody, MobilityError,
    MotionOutcome, ReactionWheel, TrajectorySample,
};

/// Slip speed below which friction is scaled down linearly, m/s.
const FRICTION_REGULARISATION: f64 = 1e-4;

/// Below these the landed body counts as at rest.
const REST_SPEED: f64 = 1e-4;
const REST_RATE: f64 = 1e-3;

/// Planar outline of the lander: spikes at the corners of a rectangle whose
/// half-diagonal is the pivot arm, tilted `α + β` from vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanarBody {
    pub half_width: f64,
    pub half_height: f64,
}

impl PlanarBody {
    pub fn from_body(body: &LanderBody) -> Self {
        let a = body.rest_angle();
        Self {
            half_width: body.pivot_arm * a.sin(),
            half_height: body.pivot_arm * a.cos(),
        }
    }

    /// Spike tips relative to the centre of mass in the body frame
    /// (x along the ground, z up at rest).
    pub fn spikes(&self) -> [Vector2<f64>; 4] {
        let (w, h) = (self.half_width, self.half_height);
        [
            Vector2::new(w, -h),
            Vector2::new(-w, -h),
            Vector2::new(-w, h),
            Vector2::new(w, h),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridHopOptions {
    /// m/s².
    pub gravity: f64,
    pub dt: f64,
    /// How long to keep integrating the contact response after touchdown, s.
    /// Integration stops earlier once the body is at rest on the ground.
    pub settle_time: f64,
    /// Overall time budget after the brake, s.
    pub max_time: f64,
    pub escape_velocity: Option<f64>,
    /// Record every n-th step.
    pub sample_every: usize,
}

impl Default for HybridHopOptions {
    fn default() -> Self {
        Self {
            gravity: super::DEFAULT_GRAVITY,
            dt: 1e-3,
            settle_time: 1.0,
            max_time: 2000.0,
            escape_velocity: None,
            sample_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct RigidState {
    pos: Vector2<f64>,
    vel: Vector2<f64>,
    /// Body rotation, counter-clockwise in the x–z plane, rad.
    phi: f64,
    phi_dot: f64,
}

impl RigidState {
    fn sample(&self, t: f64) -> TrajectorySample {
        // Pitch is right-handed about +y, which is clockwise in the x–z plane.
        TrajectorySample {
            t,
            position: Vector3::new(self.pos.x, 0.0, self.pos.y),
            velocity: Vector3::new(self.vel.x, 0.0, self.vel.y),
            euler: Vector3::new(0.0, -self.phi, 0.0),
            omega: Vector3::new(0.0, -self.phi_dot, 0.0),
        }
    }

    fn spike_positions(&self, shape: &PlanarBody) -> [Vector2<f64>; 4] {
        let (s, c) = self.phi.sin_cos();
        shape
            .spikes()
            .map(|r| self.pos + Vector2::new(c * r.x - s * r.y, s * r.x + c * r.y))
    }
}

/// Reaction-wheel hop: the wheel is spun up slowly (reaction torque held
/// below the tumbling threshold, so the body stays put), then braked
/// impulsively. A fraction `η` of the wheel's kinetic energy goes into body
/// rotation about the pivot spike. The stride phase follows the pivot model
/// until the normal force goes negative (flight) or the adjacent spike lands
/// (tumble). Flight is exact ballistic motion; touchdown uses spring-damper
/// normal and regularised Coulomb tangential forces on every spike.
///
/// The hop range runs from the launch spike to the first spike that touches
/// down. Rebounds after touchdown are integrated for `settle_time` but are
/// not counted as part of this hop.
///
/// The launch pivot sits at the origin and the body tips toward +x.
pub fn hybrid_control_hop(
    body: &LanderBody,
    wheel: &ReactionWheel,
    contact: &ContactParams,
    target_omega: f64,
    opts: &HybridHopOptions,
) -> Result<HopTrajectory, MobilityError> {
    body.validate()?;
    wheel.validate()?;
    contact.validate()?;
    check(opts.gravity > 0.0, || {
        format!("gravity {} must be > 0", opts.gravity)
    })?;
    check(opts.dt > 0.0, || format!("dt {} must be > 0", opts.dt))?;
    check(target_omega >= 0.0, || {
        format!("target wheel speed {target_omega} must be >= 0")
    })?;
    if target_omega > wheel.max_speed {
        return Err(MobilityError::Saturation {
            target: target_omega,
            limit: wheel.max_speed,
        });
    }

    let g = opts.gravity;
    let dt = opts.dt;
    let every = opts.sample_every.max(1);
    let shape = PlanarBody::from_body(body);
    let a = body.rest_angle();
    let l = body.pivot_arm;
    let m = body.mass;
    let j = body.pivot_inertia();

    let rest = RigidState {
        pos: Vector2::new(-shape.half_width, shape.half_height),
        vel: Vector2::zeros(),
        phi: 0.0,
        phi_dot: 0.0,
    };
    let mut samples = vec![rest.sample(0.0)];
    if target_omega == 0.0 {
        return Ok(finish(samples, 0.0, 0.0, MotionOutcome::Stationary, opts));
    }

    // Spin-up is quasi-static; only its duration matters.
    let tumble = min_tumble_torque(body, g);
    let spin_torque = if tumble > 0.0 {
        wheel.max_torque.min(0.5 * tumble)
    } else {
        wheel.max_torque
    };
    let mut t = target_omega * wheel.inertia / spin_torque;
    samples.push(rest.sample(t));
    let t_brake = t;

    // Brake.
    let mut theta = a;
    let mut theta_dot = -(body.efficiency * wheel.inertia / j).sqrt() * target_omega;
    let pivot_state = |theta: f64, theta_dot: f64| {
        let (s, c) = theta.sin_cos();
        RigidState {
            pos: Vector2::new(-l * s, l * c),
            vel: Vector2::new(-l * c, -l * s) * theta_dot,
            phi: theta - a,
            phi_dot: theta_dot,
        }
    };
    let mut max_speed = l * theta_dot.abs();
    let landing_angle = a - std::f64::consts::FRAC_PI_2;
    let mut step = 0usize;

    // Stride.
    let launch = loop {
        let theta_ddot = m * g * l * theta.sin() / j;
        let normal =
            m * (g - l * theta.cos() * theta_dot * theta_dot - l * theta.sin() * theta_ddot);
        if normal < 0.0 {
            break pivot_state(theta, theta_dot);
        }
        theta_dot += theta_ddot * dt;
        theta += theta_dot * dt;
        t += dt;
        step += 1;
        max_speed = max_speed.max(l * theta_dot.abs());
        if theta >= a && theta_dot >= 0.0 {
            samples.push(pivot_state(a, 0.0).sample(t));
            return Ok(finish(
                samples,
                0.0,
                max_speed,
                MotionOutcome::RockedBack,
                opts,
            ));
        }
        if theta <= landing_angle {
            samples.push(pivot_state(landing_angle, 0.0).sample(t));
            let range = 2.0 * shape.half_height;
            return Ok(finish(
                samples,
                range,
                max_speed,
                MotionOutcome::Tumbled,
                opts,
            ));
        }
        if t - t_brake > opts.max_time {
            samples.push(pivot_state(theta, theta_dot).sample(t));
            return Ok(finish(
                samples,
                0.0,
                max_speed,
                MotionOutcome::Airborne,
                opts,
            ));
        }
        if step.is_multiple_of(every) {
            samples.push(pivot_state(theta, theta_dot).sample(t));
        }
    };
    if samples.last().map(|s| s.t) != Some(t) {
        samples.push(launch.sample(t));
    }

    // Flight, evaluated in closed form from the launch state.
    let t_launch = t;
    let ballistic = |tau: f64| RigidState {
        pos: launch.pos + launch.vel * tau - Vector2::new(0.0, 0.5 * g * tau * tau),
        vel: launch.vel - Vector2::new(0.0, g * tau),
        phi: launch.phi + launch.phi_dot * tau,
        phi_dot: launch.phi_dot,
    };
    let mut state;
    let mut k = 0usize;
    loop {
        k += 1;
        state = ballistic(k as f64 * dt);
        t = t_launch + k as f64 * dt;
        step += 1;
        max_speed = max_speed.max(state.vel.norm());
        if state.spike_positions(&shape).iter().any(|p| p.y <= 0.0) {
            break;
        }
        if t - t_brake > opts.max_time {
            samples.push(state.sample(t));
            return Ok(finish(
                samples,
                0.0,
                max_speed,
                MotionOutcome::Airborne,
                opts,
            ));
        }
        if step.is_multiple_of(every) {
            samples.push(state.sample(t));
        }
    }

    // Touchdown.
    let t_contact = t;
    let touchdown = state
        .spike_positions(&shape)
        .into_iter()
        .min_by(|p, q| p.y.total_cmp(&q.y))
        .expect("four spikes");
    let spikes = shape.spikes();
    while t - t_contact < opts.settle_time {
        let (s, c) = state.phi.sin_cos();
        let mut force = Vector2::new(0.0, -m * g);
        let mut torque = 0.0;
        let mut touching = false;
        for r in spikes {
            let arm = Vector2::new(c * r.x - s * r.y, s * r.x + c * r.y);
            let p = state.pos + arm;
            if p.y >= 0.0 {
                continue;
            }
            touching = true;
            let v = state.vel + state.phi_dot * Vector2::new(-arm.y, arm.x);
            let fn_ = (-contact.stiffness * p.y - contact.damping * v.y).max(0.0);
            let slip = (v.x / FRICTION_REGULARISATION).clamp(-1.0, 1.0);
            let f = Vector2::new(-contact.friction * fn_ * slip, fn_);
            force += f;
            torque += arm.x * f.y - arm.y * f.x;
        }
        state.vel += force / m * dt;
        state.phi_dot += torque / body.inertia * dt;
        state.pos += state.vel * dt;
        state.phi += state.phi_dot * dt;
        t += dt;
        step += 1;
        max_speed = max_speed.max(state.vel.norm());
        if step.is_multiple_of(every) {
            samples.push(state.sample(t));
        }
        if touching && state.vel.norm() < REST_SPEED && state.phi_dot.abs() < REST_RATE {
            break;
        }
    }
    if samples.last().map(|s| s.t) != Some(t) {
        samples.push(state.sample(t));
    }
    Ok(finish(
        samples,
        touchdown.x.abs(),
        max_speed,
        MotionOutcome::Hopped,
        opts,
    ))
}

fn finish(
    samples: Vec<TrajectorySample>,
    range_m: f64,
    max_speed: f64,
    outcome: MotionOutcome,
    opts: &HybridHopOptions,
) -> HopTrajectory {
    HopTrajectory {
        samples,
        summary: HopSummary {
            range_m,
            max_speed_m_s: max_speed,
            propellant_kg: 0.0,
            escaped: opts.escape_velocity.is_some_and(|v| max_speed > v),
        },
        outcome,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{hop_launch, hop_wheel_speed_threshold};

    fn run(body: &LanderBody, wheel: &ReactionWheel, omega: f64) -> HopTrajectory {
        hybrid_control_hop(
            body,
            wheel,
            &ContactParams::default(),
            omega,
            &HybridHopOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn zero_target_does_nothing() {
        let hop = run(&LanderBody::default(), &ReactionWheel::default(), 0.0);
        assert_eq!(hop.outcome, MotionOutcome::Stationary);
        assert_eq!(hop.summary.range_m, 0.0);
        assert_eq!(hop.samples.len(), 1);
    }

    #[test]
    fn saturation_is_rejected() {
        let wheel = ReactionWheel::default();
        let err = hybrid_control_hop(
            &LanderBody::default(),
            &wheel,
            &ContactParams::default(),
            wheel.max_speed * 1.01,
            &HybridHopOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, MobilityError::Saturation { .. }));
    }

    #[test]
    fn threshold_separates_rocking_from_tumbling() {
        let body = LanderBody::default();
        let wheel = ReactionWheel::default();
        let w = hop_wheel_speed_threshold(&body, &wheel, 0.001);
        let below = run(&body, &wheel, 0.95 * w);
        assert_eq!(below.outcome, MotionOutcome::RockedBack);
        assert_eq!(below.summary.range_m, 0.0);
        let above = run(&body, &wheel, 1.05 * w);
        assert_eq!(above.outcome, MotionOutcome::Tumbled);
        assert!((above.summary.range_m - 2.0 * 0.1 * body.rest_angle().cos()).abs() < 1e-12);
        // never airborne: centre of mass stays on the pivot circle
        for s in &above.samples {
            let pivot_dist = (s.position - Vector3::new(0.0, 0.0, 0.0)).norm();
            assert!((pivot_dist - body.pivot_arm).abs() < 1e-12);
        }
    }

    #[test]
    fn fast_brake_hops_and_lands() {
        let body = LanderBody::default();
        let wheel = ReactionWheel::default();
        let hop = run(&body, &wheel, 20.0);
        assert_eq!(hop.outcome, MotionOutcome::Hopped);
        assert!(hop.summary.range_m > 0.2);
        let last = hop.samples.last().unwrap();
        assert!(last.velocity.z.abs() < 0.2);
        assert!(hop.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn matches_closed_form_range() {
        // With I_r = η J the brake gives the body a pivot rate of η ω_r,
        // which is what the closed-form range assumes.
        let body = LanderBody::default();
        let wheel = ReactionWheel {
            inertia: body.efficiency * body.pivot_inertia(),
            ..Default::default()
        };
        for omega in [0.6, 1.0, 1.4] {
            let hop = run(&body, &wheel, omega);
            assert_eq!(hop.outcome, MotionOutcome::Hopped);
            let analytic = hop_launch(&body, &wheel, omega, f64::INFINITY, 0.001)
                .unwrap()
                .range;
            let rel = (hop.summary.range_m - analytic).abs() / analytic;
            assert!(
                rel < 0.15,
                "omega {omega}: sim {} vs {analytic}",
                hop.summary.range_m
            );
        }
    }

    #[test]
    fn flight_speed_symmetric_at_launch_height() {
        let body = LanderBody::default();
        let wheel = ReactionWheel::default();
        let opts = HybridHopOptions {
            sample_every: 1,
            ..Default::default()
        };
        let hop =
            hybrid_control_hop(&body, &wheel, &ContactParams::default(), 20.0, &opts).unwrap();
        // the launch sample is the first with nonzero velocity
        let launch = hop
            .samples
            .iter()
            .find(|s| s.velocity.norm() > 0.0)
            .unwrap();
        let v0 = launch.velocity;
        let z0 = launch.position.z;
        let g = 0.001;
        let tau = 2.0 * v0.z / g;
        let v_back = Vector3::new(v0.x, 0.0, v0.z - g * tau);
        assert!((v_back.norm() - v0.norm()).abs() / v0.norm() < 1e-9);
        // and the recorded flight samples lie on that parabola
        for s in hop
            .samples
            .iter()
            .filter(|s| s.t > launch.t && s.t < launch.t + tau * 0.9)
        {
            let dt = s.t - launch.t;
            let z = z0 + v0.z * dt - 0.5 * g * dt * dt;
            assert!((s.position.z - z).abs() < 1e-9);
        }
    }
}
