//! Closed-form relations and the single-spike pivot (stride) model.
//!
//! `θ` is the angle of the pivot-to-centre-of-mass line from vertical. The
//! lander rests at `θ = α + β`; a positive wheel reaction torque drives `θ`
//! toward zero, and crossing `θ = 0` means the body will fall onto the
//! adjacent spike.

use serde::{Deserialize, Serialize};

use super::{check, LanderBody, MobilityError, ReactionWheel};

/// One semi-implicit Euler step of `θ̈ = (m g l sinθ − τ) / (I_s + m l²)`.
pub fn stride_step(
    body: &LanderBody,
    theta: f64,
    theta_dot: f64,
    tau: f64,
    g: f64,
    dt: f64,
) -> (f64, f64) {
    let m = body.mass;
    let l = body.pivot_arm;
    let acc = (m * g * l * theta.sin() - tau) / body.pivot_inertia();
    let theta_dot = theta_dot + acc * dt;
    (theta + theta_dot * dt, theta_dot)
}

/// `½ (I_s + m l²) θ̇² + m g l cosθ`.
pub fn stride_energy(body: &LanderBody, theta: f64, theta_dot: f64, g: f64) -> f64 {
    0.5 * body.pivot_inertia() * theta_dot * theta_dot
        + body.mass * g * body.pivot_arm * theta.cos()
}

/// Smallest constant torque that starts the body rotating off its rest
/// contact: `m g l sin(α + β)`.
pub fn min_tumble_torque(body: &LanderBody, g: f64) -> f64 {
    body.mass * g * body.pivot_arm * body.rest_angle().sin()
}

/// Wheel speed whose braking energy (after transfer losses) lifts the centre
/// of mass over the pivot: `sqrt(2 m g l (1 − cos(α + β)) / (η I_r))`.
pub fn hop_wheel_speed_threshold(body: &LanderBody, wheel: &ReactionWheel, g: f64) -> f64 {
    let lift = body.mass * g * body.pivot_arm * (1.0 - body.rest_angle().cos());
    (2.0 * lift / (body.efficiency * wheel.inertia)).sqrt()
}

/// Wheel speed for a hop of `range` in the impulsive-brake limit.
pub fn wheel_speed_for_range(body: &LanderBody, range: f64, g: f64) -> Result<f64, MobilityError> {
    check(range > 0.0, || format!("hop range {range} must be > 0"))?;
    check(g > 0.0, || format!("gravity {g} must be > 0"))?;
    let s = (2.0 * body.rest_angle()).sin();
    if !(s > 0.0) {
        return Err(MobilityError::Domain(format!(
            "launch angle argument sin(2(alpha + beta)) = {s} must be positive"
        )));
    }
    let el = body.efficiency * body.pivot_arm;
    Ok((range * g / (el * el * s)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopLaunch {
    /// Pivot angle at lift-off, rad.
    pub theta: f64,
    /// Ballistic range, m.
    pub range: f64,
}

/// Launch angle and range when the wheel at `omega_r` is braked with torque
/// `tau`. `tau = f64::INFINITY` gives the impulsive limit.
pub fn hop_launch(
    body: &LanderBody,
    wheel: &ReactionWheel,
    omega_r: f64,
    tau: f64,
    g: f64,
) -> Result<HopLaunch, MobilityError> {
    check(g > 0.0, || format!("gravity {g} must be > 0"))?;
    let threshold = min_tumble_torque(body, g);
    if !(tau > threshold) {
        return Err(MobilityError::InsufficientTorque {
            torque: tau,
            threshold,
        });
    }
    let a = body.rest_angle();
    let sweep = body.efficiency * wheel.inertia * omega_r * omega_r / tau;
    let v = body.efficiency * body.pivot_arm * omega_r;
    Ok(HopLaunch {
        theta: a - 0.5 * sweep,
        range: (2.0 * a - sweep).sin() * v * v / g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopRequirement {
    /// Brake torque, N·m.
    pub torque: f64,
    /// Wheel speed before braking, rad/s.
    pub wheel_speed: f64,
}

/// Least brake torque (with the matching wheel speed) that reaches `range`.
///
/// With `x = η I_r ω_r² / τ` the range is `τ η l² x sin(2A − x) / (I_r g)`,
/// so for a given torque the best wheel speed maximises `x sin(2A − x)`.
pub fn hop_torque_for_range(
    body: &LanderBody,
    wheel: &ReactionWheel,
    range: f64,
    g: f64,
) -> Result<HopRequirement, MobilityError> {
    check(range > 0.0, || format!("hop range {range} must be > 0"))?;
    check(g > 0.0, || format!("gravity {g} must be > 0"))?;
    let a2 = 2.0 * body.rest_angle();
    if !(a2 > 0.0) {
        return Err(MobilityError::Domain(
            "alpha + beta must be positive to hop".into(),
        ));
    }
    let (x, s) = golden_max(|x| x * (a2 - x).sin(), 0.0, a2.min(std::f64::consts::PI));
    let eta = body.efficiency;
    let l = body.pivot_arm;
    let torque = (range * wheel.inertia * g / (eta * l * l * s)).max(min_tumble_torque(body, g));
    let wheel_speed = (x * torque / (eta * wheel.inertia)).sqrt();
    if wheel_speed > wheel.max_speed {
        return Err(MobilityError::Saturation {
            target: wheel_speed,
            limit: wheel.max_speed,
        });
    }
    Ok(HopRequirement {
        torque,
        wheel_speed,
    })
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-12 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Stride-phase time history.
#[derive(Debug, Clone, PartialEq)]
pub struct StrideRun {
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_dot: Vec<f64>,
    /// The centre of mass passed over the pivot.
    pub crossed_vertical: bool,
    /// The adjacent spike reached the ground (`θ ≤ α + β − π/2`).
    pub tumbled: bool,
}

/// Integrates the stride phase under constant `tau` for at most `duration`.
///
/// The ground stops the body from rotating back past its rest angle (the
/// contact there is inelastic). The run ends early once the adjacent spike
/// touches down.
pub fn simulate_stride(
    body: &LanderBody,
    theta0: f64,
    theta_dot0: f64,
    tau: f64,
    g: f64,
    dt: f64,
    duration: f64,
) -> Result<StrideRun, MobilityError> {
    body.validate()?;
    check(dt > 0.0, || format!("dt {dt} must be > 0"))?;
    check(duration >= 0.0, || {
        format!("duration {duration} must be >= 0")
    })?;
    let rest = body.rest_angle();
    let landing = rest - std::f64::consts::FRAC_PI_2;
    let steps = (duration / dt).round() as usize;

    let mut run = StrideRun {
        t: vec![0.0],
        theta: vec![theta0],
        theta_dot: vec![theta_dot0],
        crossed_vertical: theta0 <= 0.0,
        tumbled: false,
    };
    let (mut theta, mut theta_dot) = (theta0, theta_dot0);
    for k in 1..=steps {
        (theta, theta_dot) = stride_step(body, theta, theta_dot, tau, g, dt);
        if theta >= rest && theta_dot >= 0.0 {
            theta = rest;
            theta_dot = 0.0;
        }
        run.t.push(k as f64 * dt);
        run.theta.push(theta);
        run.theta_dot.push(theta_dot);
        run.crossed_vertical |= theta <= 0.0;
        if theta <= landing {
            run.tumbled = true;
            break;
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn paper_body(eta: f64) -> LanderBody {
        LanderBody {
            mass: 1.0,
            pivot_arm: 0.1,
            alpha: FRAC_PI_4,
            beta: 0.0,
            efficiency: eta,
            ..Default::default()
        }
    }

    #[test]
    fn step_keeps_vertical_equilibrium() {
        assert_eq!(
            stride_step(&paper_body(1.0), 0.0, 0.0, 0.0, 0.001, 1e-3),
            (0.0, 0.0)
        );
    }

    #[test]
    fn step_falls_away_from_vertical() {
        let b = paper_body(1.0);
        let dt = 1e-3;
        let (_, w) = stride_step(&b, 0.1, 0.0, 0.0, 0.001, dt);
        let expected = 1.0 * 0.001 * 0.1 * 0.1f64.sin() / (b.inertia + 0.01);
        assert!((w / dt - expected).abs() < 1e-15);
        assert!(w > 0.0);
    }

    #[test]
    fn tumble_torque_value() {
        let t = min_tumble_torque(&paper_body(1.0), 0.001);
        assert!((t - 7.071e-5).abs() < 1e-8);
        assert_eq!(min_tumble_torque(&paper_body(1.0), 0.0), 0.0);
        let flat = LanderBody {
            alpha: 0.0,
            ..paper_body(1.0)
        };
        assert_eq!(min_tumble_torque(&flat, 0.001), 0.0);
    }

    #[test]
    fn wheel_threshold_value() {
        let wheel = ReactionWheel {
            inertia: 1e-4,
            ..Default::default()
        };
        let w = hop_wheel_speed_threshold(&paper_body(1.0), &wheel, 0.001);
        let expected = (2.0 * 1e-4 * (1.0 - 0.5f64.sqrt()) / 1e-4).sqrt();
        assert!((w - expected).abs() < 1e-15);
        assert!((w - 0.7654).abs() < 1e-4);
        assert_eq!(
            hop_wheel_speed_threshold(&paper_body(1.0), &wheel, 0.0),
            0.0
        );
    }

    #[test]
    fn range_wheel_speed_value_and_scaling() {
        let b = paper_body(1.0);
        let w = wheel_speed_for_range(&b, 10.0, 0.001).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
        let w4 = wheel_speed_for_range(&b, 40.0, 0.001).unwrap();
        assert!((w4 - 2.0 * w).abs() < 1e-12);
        let flat = LanderBody { alpha: 0.0, ..b };
        assert!(matches!(
            wheel_speed_for_range(&flat, 10.0, 0.001),
            Err(MobilityError::Domain(_))
        ));
    }

    #[test]
    fn launch_limits() {
        let b = paper_body(1.0);
        let wheel = ReactionWheel::default();
        let hop = hop_launch(&b, &wheel, 1.0, f64::INFINITY, 0.001).unwrap();
        assert!((hop.range - 10.0).abs() < 1e-9);
        assert_eq!(hop.theta, FRAC_PI_4);
        let still = hop_launch(&b, &wheel, 0.0, 1.0, 0.001).unwrap();
        assert_eq!(still.range, 0.0);
        let half = hop_launch(&paper_body(0.5), &wheel, 1.0, f64::INFINITY, 0.001).unwrap();
        assert!((half.range - 0.25 * hop.range).abs() < 1e-12);
    }

    #[test]
    fn launch_needs_tumble_torque() {
        let b = paper_body(1.0);
        let err = hop_launch(&b, &ReactionWheel::default(), 1.0, 5e-5, 0.001).unwrap_err();
        assert!(matches!(err, MobilityError::InsufficientTorque { .. }));
    }

    #[test]
    fn required_torque_reaches_range() {
        let b = paper_body(0.9);
        let wheel = ReactionWheel::default();
        let need = hop_torque_for_range(&b, &wheel, 10.0, 0.001).unwrap();
        let hop = hop_launch(&b, &wheel, need.wheel_speed, need.torque, 0.001).unwrap();
        assert!((hop.range - 10.0).abs() < 1e-6);
        // any other wheel speed at that torque falls short
        for f in [0.9, 0.97, 1.03, 1.1] {
            let other = hop_launch(&b, &wheel, need.wheel_speed * f, need.torque, 0.001).unwrap();
            assert!(other.range < hop.range);
        }
    }

    #[test]
    fn stride_dichotomy_from_rest() {
        let b = paper_body(0.9);
        let g = 0.001;
        let tmin = min_tumble_torque(&b, g);
        let over = simulate_stride(&b, b.rest_angle(), 0.0, 1.05 * tmin, g, 1e-3, 200.0).unwrap();
        let under = simulate_stride(&b, b.rest_angle(), 0.0, 0.95 * tmin, g, 1e-3, 200.0).unwrap();
        assert!(over.crossed_vertical);
        assert!(!under.crossed_vertical);
        assert!(under.theta.iter().all(|&t| t == b.rest_angle()));
    }

    #[test]
    fn free_swing_conserves_energy() {
        let b = paper_body(0.9);
        let g = 0.001;
        let a = b.rest_angle();
        // enough spin to carry the centre of mass over the pivot
        let w0 =
            -1.2 * (2.0 * b.mass * g * b.pivot_arm * (1.0 - a.cos()) / b.pivot_inertia()).sqrt();
        let run = simulate_stride(&b, a, w0, 0.0, g, 1e-3, 100.0).unwrap();
        assert!(run.tumbled && run.crossed_vertical);
        let e0 = stride_energy(&b, a, w0, g);
        let drift = run
            .theta
            .iter()
            .zip(&run.theta_dot)
            .map(|(&t, &w)| (stride_energy(&b, t, w, g) - e0).abs() / e0)
            .fold(0.0, f64::max);
        assert!(drift < 1e-3, "{drift}");
    }
}
