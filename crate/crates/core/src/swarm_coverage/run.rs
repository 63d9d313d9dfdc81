use serde::{Deserialize, Serialize};

use super::area::{coverage_area, min_pair_distance, sensing_area};
use super::forces::{degrees, net_forces};
use super::{check, Obstacle, Point, SwarmError, SwarmState, VirtualForceParams};

/// Repulsion multiplier of an impact site relative to an ordinary obstacle.
pub const IMPACT_STRENGTH: f64 = 10.0;

/// Radius every lander must keep from an impact site.
pub const EXCLUSION_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub dt: f64,
    pub max_steps: usize,
    /// Largest per-step displacement that counts as "not moving".
    pub settle_eps: f64,
    /// Consecutive quiet steps required to call the swarm settled.
    pub settle_window: usize,
    /// Path length of one hop, for the energy count.
    pub hop_length: f64,
    /// Side of the square target area centred on the origin. Landers that
    /// reach its edge stop there (their outward velocity is removed).
    pub area_side: Option<f64>,
    /// Keep every step's positions and degrees.
    pub record_trace: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            dt: 0.1,
            max_steps: 5000,
            settle_eps: 1e-3,
            settle_window: 10,
            hop_length: 1.0,
            area_side: Some(30.0),
            record_trace: false,
        }
    }
}

impl RunOptions {
    pub fn validate(&self) -> Result<(), SwarmError> {
        check(self.dt > 0.0, || format!("dt {} must be > 0", self.dt))?;
        check(self.max_steps >= 1, || "max_steps must be >= 1".into())?;
        check(self.settle_eps > 0.0, || {
            format!("settle_eps {} must be > 0", self.settle_eps)
        })?;
        check(self.settle_window >= 1, || {
            "settle_window must be >= 1".into()
        })?;
        check(self.hop_length > 0.0, || {
            format!("hop_length {} must be > 0", self.hop_length)
        })?;
        if let Some(side) = self.area_side {
            check(side > 0.0, || format!("area side {side} must be > 0"))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageMetrics {
    /// Polygon area through the final positions.
    pub area: f64,
    /// Polygon area through the initial positions.
    pub initial_area: f64,
    /// Union of sensing disks at the final positions.
    pub sensing_area: f64,
    pub mean_degree: f64,
    pub min_pair_dist: f64,
    pub settled: bool,
    /// First step of the quiet window, or the number of steps run if the
    /// swarm never settled.
    pub t_settle: usize,
    pub hops_total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: usize,
    pub positions: Vec<Point>,
    pub degrees: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CoverageRun {
    pub final_state: SwarmState,
    /// Empty unless `record_trace` was set; otherwise one frame per step
    /// starting with the initial state.
    pub trace: Vec<Frame>,
    pub metrics: CoverageMetrics,
}

/// One synchronous semi-implicit Euler step of `m r̈ + μ ṙ = F`.
pub fn step(state: &SwarmState, params: &VirtualForceParams, dt: f64) -> SwarmState {
    integrate(state, &net_forces(state, params), params, dt)
}

pub(crate) fn integrate(
    state: &SwarmState,
    forces: &[Point],
    params: &VirtualForceParams,
    dt: f64,
) -> SwarmState {
    let mut next = state.clone();
    for ((r, v), f) in next
        .positions
        .iter_mut()
        .zip(next.velocities.iter_mut())
        .zip(forces)
    {
        *v += (f - *v * params.damping) / params.mass * dt;
        *r += *v * dt;
    }
    next.t += 1;
    next
}

fn confine(state: &mut SwarmState, half: f64) {
    for (r, v) in state.positions.iter_mut().zip(state.velocities.iter_mut()) {
        for k in 0..2 {
            if r[k] > half {
                r[k] = half;
                v[k] = v[k].min(0.0);
            } else if r[k] < -half {
                r[k] = -half;
                v[k] = v[k].max(0.0);
            }
        }
    }
}

/// Integrates until the swarm settles or `max_steps` is reached.
pub fn run_coverage(
    initial: &SwarmState,
    params: &VirtualForceParams,
    opts: &RunOptions,
) -> Result<CoverageRun, SwarmError> {
    params.validate()?;
    opts.validate()?;
    if initial.is_empty() {
        return Err(SwarmError::Empty);
    }
    let frame = |s: &SwarmState| Frame {
        t: s.t,
        positions: s.positions.clone(),
        degrees: degrees(&s.positions, params.r_c),
    };

    let mut state = initial.clone();
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(frame(&state));
    }
    let mut path = vec![0.0; state.len()];
    let mut quiet = 0usize;
    let mut quiet_start = 0usize;
    let mut settled = false;
    let mut steps = 0usize;

    for k in 1..=opts.max_steps {
        let mut next = step(&state, params, opts.dt);
        if let Some(side) = opts.area_side {
            confine(&mut next, 0.5 * side);
        }
        let mut largest: f64 = 0.0;
        for (i, (a, b)) in state.positions.iter().zip(&next.positions).enumerate() {
            let d = (b - a).norm();
            path[i] += d;
            largest = largest.max(d);
        }
        state = next;
        steps = k;
        if opts.record_trace {
            trace.push(frame(&state));
        }
        if largest < opts.settle_eps {
            if quiet == 0 {
                quiet_start = k;
            }
            quiet += 1;
            if quiet >= opts.settle_window {
                settled = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }

    let degs = degrees(&state.positions, params.r_c);
    let metrics = CoverageMetrics {
        area: coverage_area(&state.positions),
        initial_area: coverage_area(&initial.positions),
        sensing_area: sensing_area(&state.positions, params.r_s),
        mean_degree: degs.iter().sum::<usize>() as f64 / degs.len() as f64,
        min_pair_dist: min_pair_distance(&state.positions),
        settled,
        t_settle: if settled { quiet_start } else { steps },
        hops_total: path
            .iter()
            .map(|&p| (p / opts.hop_length).ceil() as u64)
            .sum(),
    };
    Ok(CoverageRun {
        final_state: state,
        trace,
        metrics,
    })
}

/// Coverage run with an extra, strong obstacle at `impact_site` so the swarm
/// forms a ring around it.
pub fn run_exclusion(
    initial: &SwarmState,
    impact_site: Point,
    params: &VirtualForceParams,
    opts: &RunOptions,
) -> Result<CoverageRun, SwarmError> {
    let mut start = initial.clone();
    start.obstacles.push(Obstacle {
        center: impact_site,
        radius: EXCLUSION_RADIUS,
        strength: IMPACT_STRENGTH,
    });
    run_coverage(&start, params, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_is_unchanged() {
        let s = SwarmState::new(vec![Point::new(1.0, 2.0)], vec![]).unwrap();
        let next = step(&s, &VirtualForceParams::default(), 0.1);
        assert_eq!(next.positions, s.positions);
        assert_eq!(next.velocities, s.velocities);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn terminal_velocity() {
        let params = VirtualForceParams::default();
        let f = Point::new(0.6, -0.2);
        let mut s = SwarmState::new(vec![Point::zeros()], vec![]).unwrap();
        let dt = 0.01;
        let tau = params.mass / params.damping;
        let n = (10.0 * tau / dt).round() as usize;
        for _ in 0..n {
            s = integrate(&s, &[f], &params, dt);
        }
        let terminal = f / params.damping;
        assert!((s.velocities[0] - terminal).norm() / terminal.norm() < 0.01);
    }

    #[test]
    fn repelling_pair_separates_monotonically() {
        let params = VirtualForceParams {
            c_com: 0.0,
            ..Default::default()
        };
        let mut s =
            SwarmState::new(vec![Point::new(-0.5, 0.0), Point::new(0.5, 0.1)], vec![]).unwrap();
        let mut last = 0.0;
        for _ in 0..200 {
            s = step(&s, &params, 0.1);
            let d = (s.positions[0] - s.positions[1]).norm();
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn single_lander_settles_immediately() {
        let s = SwarmState::new(vec![Point::new(3.0, 3.0)], vec![]).unwrap();
        let run = run_coverage(&s, &VirtualForceParams::default(), &RunOptions::default()).unwrap();
        assert!(run.metrics.settled);
        assert_eq!(run.metrics.t_settle, 1);
        assert_eq!(run.metrics.area, 0.0);
        assert_eq!(run.metrics.hops_total, 0);
    }

    #[test]
    fn boundary_stops_landers() {
        let params = VirtualForceParams {
            c_com: 0.0,
            ..Default::default()
        };
        let s = SwarmState::new(vec![Point::new(-0.1, 0.0), Point::new(0.1, 0.0)], vec![]).unwrap();
        let opts = RunOptions {
            area_side: Some(4.0),
            max_steps: 2000,
            record_trace: true,
            ..Default::default()
        };
        let run = run_coverage(&s, &params, &opts).unwrap();
        assert!(run.trace.iter().all(|f| f
            .positions
            .iter()
            .all(|p| p.x.abs() <= 2.0 && p.y.abs() <= 2.0)));
        assert!(run.metrics.settled);
        assert!((run.final_state.positions[0].x + 2.0).abs() < 1e-12);
    }

    #[test]
    fn lander_next_to_impact_site_moves_away() {
        let site = Point::new(3.0, -1.0);
        let s = SwarmState::new(vec![site + Point::new(0.01, 0.02)], vec![]).unwrap();
        let opts = RunOptions {
            max_steps: 5,
            record_trace: true,
            ..Default::default()
        };
        let run = run_exclusion(&s, site, &VirtualForceParams::default(), &opts).unwrap();
        let dir = Point::new(0.01, 0.02).normalize();
        for w in run.trace.windows(2) {
            let step = w[1].positions[0] - w[0].positions[0];
            assert!((step.normalize() - dir).norm() < 1e-9 || w[1].positions[0].x.abs() >= 15.0);
        }
    }

    #[test]
    fn trace_has_one_frame_per_step() {
        let s = SwarmState::random(5, Point::zeros(), 4.0, vec![], 1).unwrap();
        let opts = RunOptions {
            max_steps: 7,
            settle_window: 100,
            record_trace: true,
            ..Default::default()
        };
        let run = run_coverage(&s, &VirtualForceParams::default(), &opts).unwrap();
        assert_eq!(run.trace.len(), 8);
        assert!(!run.metrics.settled);
        assert_eq!(run.metrics.t_settle, 7);
        assert!(run.trace.iter().enumerate().all(|(k, f)| f.t == k));
    }
}
