//! Scenario dispatch and artifact writing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::Vector3;
use nanolander_core::evolve::{run_nsga2, CampaignConfig, GenerationStats};
use nanolander_core::mobility::{
    burn_time_for, hop_torque_for_range, hop_wheel_speed_threshold, hybrid_control_hop,
    min_tumble_torque, propelled_hop, wheel_speed_for_range, AttitudeController, ContactParams,
    HopTrajectory, HybridHopOptions, LanderBody, MotionOutcome, PropelledHopOptions,
    PropulsionUnit, ReactionWheel,
};
use nanolander_core::shape_gravity::{
    cube, icosphere, load_shape, surface_gravity_map, SlicePlane,
};
use nanolander_core::swarm_coverage::{
    run_coverage, run_exclusion, Obstacle, Point, RunOptions, SwarmState, VirtualForceParams,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{
    CoverageConfig, GravityConfig, HopConfig, ScenarioParams, ShapeKind, TumbleConfig,
};
use crate::{CliError, ScenarioConfig};

/// Files written by a scenario, relative to the output directory, and
/// whether the simulation converged.
pub(crate) struct Artifacts {
    pub files: Vec<String>,
    pub converged: bool,
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = out.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io { path, source: e })
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut w = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io {
            path: out.join(name),
            source: e,
        })
}

fn csv_writer(out: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>, CliError> {
    Ok(csv::Writer::from_writer(create(out, name)?))
}

pub(crate) fn dispatch(config: &ScenarioConfig, out: &Path) -> Result<Artifacts, CliError> {
    match &config.params {
        ScenarioParams::Gravity(c) => gravity(c, out),
        ScenarioParams::Hop(c) => hop(c, out),
        ScenarioParams::Tumble(c) => tumble(c, out),
        ScenarioParams::Coverage(c) => coverage(c, out),
        ScenarioParams::Evolve(c) => evolve(c, out),
    }
}

fn gravity(c: &GravityConfig, out: &Path) -> Result<Artifacts, CliError> {
    let shape = match c.shape {
        ShapeKind::Cube => cube(c.size, c.density),
        ShapeKind::Icosphere => icosphere(c.subdivisions, c.size, c.density),
        ShapeKind::Mesh => load_shape(
            c.mesh_path.as_ref().expect("validated: mesh needs a path"),
            c.density,
        )?,
    };
    let plane = SlicePlane {
        normal: c.plane,
        offset: c.offset,
    };
    let grid = surface_gravity_map(&shape, plane, c.resolution)?;

    let mut w = csv_writer(out, "gravity_map.csv")?;
    w.write_record(["x", "y", "z", "potential", "ax", "ay", "az"])?;
    let mut exterior = 0usize;
    for s in &grid.samples {
        let (u, a) = match &s.field {
            Some(f) => {
                exterior += 1;
                (f.potential, f.acceleration)
            }
            None => (f64::NAN, Vector3::repeat(f64::NAN)),
        };
        w.serialize((s.point.x, s.point.y, s.point.z, u, a.x, a.y, a.z))?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: out.join("gravity_map.csv"),
        source: e,
    })?;

    write_json(
        out,
        "summary.json",
        &json!({
            "mass_kg": shape.mass(),
            "volume_m3": shape.volume(),
            "bounding_radius_m": shape.bounding_radius(),
            "u_count": grid.u_count,
            "v_count": grid.v_count,
            "exterior_samples": exterior,
        }),
    )?;
    Ok(Artifacts {
        files: vec!["gravity_map.csv".into(), "summary.json".into()],
        converged: true,
    })
}

fn write_trajectory(out: &Path, name: &str, traj: &HopTrajectory) -> Result<(), CliError> {
    let mut w = csv_writer(out, name)?;
    w.write_record([
        "t", "x", "y", "z", "vx", "vy", "vz", "roll", "pitch", "yaw", "wx", "wy", "wz",
    ])?;
    for s in &traj.samples {
        let (p, v, e, o) = (s.position, s.velocity, s.euler, s.omega);
        w.serialize([
            s.t, p.x, p.y, p.z, v.x, v.y, v.z, e.x, e.y, e.z, o.x, o.y, o.z,
        ])?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: out.join(name),
        source: e,
    })
}

/// A manoeuvre that ran out of time while still airborne did not converge.
fn settled(traj: &HopTrajectory) -> bool {
    traj.outcome != MotionOutcome::Airborne || traj.summary.escaped
}

fn hop(c: &HopConfig, out: &Path) -> Result<Artifacts, CliError> {
    let body = LanderBody {
        mass: c.mass,
        inertia: c.inertia,
        ..Default::default()
    };
    let wheel = ReactionWheel {
        max_torque: c.wheel_max_torque,
        max_speed: c.wheel_max_speed,
        ..Default::default()
    };
    let prop = PropulsionUnit {
        thrust: c.thrust,
        isp: c.isp,
        propellant_mass: c.propellant_mass,
    };
    let ctrl = AttitudeController {
        kp: c.kp,
        kd: c.kd,
        torque_limit: c.torque_limit,
        ..Default::default()
    };
    let opts = PropelledHopOptions {
        gravity: c.gravity,
        burn_time: burn_time_for(&prop, c.burned),
        dt: c.dt,
        escape_velocity: c.escape_velocity,
        initial_euler: Vector3::from(c.tilt_deg.map(f64::to_radians)),
        max_time: c.max_time,
        sample_every: c.sample_every,
    };
    let traj = propelled_hop(&body, &wheel, &prop, &ctrl, &opts)?;
    write_trajectory(out, "trajectory.csv", &traj)?;
    let s = traj.summary;
    write_json(
        out,
        "summary.json",
        &json!({
            "range_m": s.range_m,
            "max_speed_m_s": s.max_speed_m_s,
            "propellant_kg": s.propellant_kg,
            "escaped": s.escaped,
            "outcome": traj.outcome,
        }),
    )?;
    Ok(Artifacts {
        files: vec!["trajectory.csv".into(), "summary.json".into()],
        converged: settled(&traj),
    })
}

fn tumble(c: &TumbleConfig, out: &Path) -> Result<Artifacts, CliError> {
    let body = LanderBody {
        mass: c.mass,
        inertia: c.inertia,
        pivot_arm: c.pivot_arm,
        alpha: c.alpha_deg.to_radians(),
        beta: c.beta_deg.to_radians(),
        efficiency: c.efficiency,
    };
    let wheel = ReactionWheel::solid_disc(
        c.wheel_mass,
        c.wheel_radius,
        c.wheel_max_torque,
        c.wheel_max_speed,
    );
    let contact = ContactParams::critical(c.contact_stiffness, c.mass, c.friction);
    let opts = HybridHopOptions {
        gravity: c.gravity,
        dt: c.dt,
        settle_time: c.settle_time,
        max_time: c.max_time,
        escape_velocity: c.escape_velocity,
        sample_every: c.sample_every,
    };
    body.validate()?;
    let omega = match c.wheel_speed {
        Some(w) => w,
        // the closed-form model launches the body at η times the wheel
        // speed; the brake transfers sqrt(η I_r / J) of it
        None => {
            wheel_speed_for_range(&body, c.range, c.gravity)?
                * (body.efficiency * body.pivot_inertia() / wheel.inertia).sqrt()
        }
    };
    log::info!("wheel speed before the brake: {omega} rad/s");
    let traj = hybrid_control_hop(&body, &wheel, &contact, omega, &opts)?;
    write_trajectory(out, "trajectory.csv", &traj)?;
    let requirement = hop_torque_for_range(&body, &wheel, c.range, c.gravity).ok();
    let s = traj.summary;
    write_json(
        out,
        "summary.json",
        &json!({
            "outcome": traj.outcome,
            "range_m": s.range_m,
            "max_speed_m_s": s.max_speed_m_s,
            "escaped": s.escaped,
            "wheel_speed_rad_s": omega,
            "min_tumble_torque_n_m": min_tumble_torque(&body, c.gravity),
            "hop_wheel_speed_threshold_rad_s": hop_wheel_speed_threshold(&body, &wheel, c.gravity),
            "hop_torque_for_range_n_m": requirement.map(|r| r.torque),
        }),
    )?;
    Ok(Artifacts {
        files: vec!["trajectory.csv".into(), "summary.json".into()],
        converged: settled(&traj),
    })
}

fn coverage(c: &CoverageConfig, out: &Path) -> Result<Artifacts, CliError> {
    let params = VirtualForceParams {
        c_cov: c.c_cov,
        c_com: c.c_com,
        c_obs: c.c_obs,
        r_c: c.r_c,
        r_s: c.r_s,
        degree: c.degree,
        mass: c.mass,
        damping: c.damping,
    };
    let opts = RunOptions {
        dt: c.dt,
        max_steps: c.max_steps,
        settle_eps: c.settle_eps,
        settle_window: c.settle_window,
        area_side: Some(c.area_side),
        record_trace: true,
        ..Default::default()
    };
    let obstacles = c
        .obstacles
        .iter()
        .map(|o| Obstacle {
            center: Point::new(o.x, o.y),
            radius: o.radius,
            strength: o.strength,
        })
        .collect();
    let start = SwarmState::random(
        c.n_landers,
        Point::zeros(),
        c.deploy_side,
        obstacles,
        c.seed,
    )?;
    let run = match c.impact_site {
        Some([x, y]) => run_exclusion(&start, Point::new(x, y), &params, &opts)?,
        None => run_coverage(&start, &params, &opts)?,
    };

    let mut w = csv_writer(out, "trace.csv")?;
    w.write_record(["t", "lander_id", "x", "y", "degree"])?;
    for frame in &run.trace {
        for (i, (p, d)) in frame.positions.iter().zip(&frame.degrees).enumerate() {
            w.serialize((frame.t, i, p.x, p.y, d))?;
        }
    }
    w.flush().map_err(|e| CliError::Io {
        path: out.join("trace.csv"),
        source: e,
    })?;

    let m = run.metrics;
    let exclusion = c.impact_site.map(|[x, y]| {
        run.final_state
            .positions
            .iter()
            .map(|p| (p - Point::new(x, y)).norm())
            .fold(f64::INFINITY, f64::min)
    });
    write_json(
        out,
        "metrics.json",
        &json!({
            "area": m.area,
            "initial_area": m.initial_area,
            "sensing_area": m.sensing_area,
            "mean_degree": m.mean_degree,
            "t_settle": m.t_settle,
            "hops_total": m.hops_total,
            "min_pair_dist": m.min_pair_dist,
            "min_impact_dist": exclusion,
            "settled": m.settled,
        }),
    )?;
    Ok(Artifacts {
        files: vec!["trace.csv".into(), "metrics.json".into()],
        converged: m.settled,
    })
}

fn generation_row(h: &GenerationStats) -> (usize, f64, f64, f64, f64, f64, usize, usize, f64, f64) {
    let b = &h.best.phenotype;
    (
        h.generation,
        h.mean_area,
        h.mean_degree,
        h.mean_time,
        h.mean_energy,
        h.best_overall,
        b.n,
        b.degree,
        b.c_cov,
        b.c_com,
    )
}

fn evolve(c: &CampaignConfig, out: &Path) -> Result<Artifacts, CliError> {
    let campaign = run_nsga2(c)?;
    let mut w = csv_writer(out, "generations.csv")?;
    w.write_record([
        "gen",
        "mean_An",
        "mean_Dn",
        "mean_Tn",
        "mean_En",
        "best_overall",
        "best_N",
        "best_D",
        "best_Ccov",
        "best_Ccom",
    ])?;
    for h in campaign.history.iter().skip(1) {
        log::info!(
            "generation {}: best overall {:.4}",
            h.generation,
            h.best_overall
        );
        w.serialize(generation_row(h))?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: out.join("generations.csv"),
        source: e,
    })?;
    write_json(out, "pareto_front.json", &campaign.pareto_front)?;
    write_json(
        out,
        "summary.json",
        &json!({
            "baseline": campaign.baseline,
            "initial_generation": campaign.history[0],
            "best": campaign.best,
            "evaluations": campaign.history.last().map(|h| h.evaluations),
        }),
    )?;
    Ok(Artifacts {
        files: vec![
            "generations.csv".into(),
            "pareto_front.json".into(),
            "summary.json".into(),
        ],
        converged: true,
    })
}
