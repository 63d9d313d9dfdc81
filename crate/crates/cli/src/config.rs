//! Scenario configuration files (TOML). Every key has a default; unknown keys
//! are rejected.

use std::path::{Path, PathBuf};

use nanolander_core::evolve::CampaignConfig;
use nanolander_core::shape_gravity::Axis;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Gravity,
    Hop,
    Tumble,
    Coverage,
    Exclusion,
    Evolve,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Gravity => "gravity",
            ScenarioKind::Hop => "hop",
            ScenarioKind::Tumble => "tumble",
            ScenarioKind::Coverage => "coverage",
            ScenarioKind::Exclusion => "exclusion",
            ScenarioKind::Evolve => "evolve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Cube,
    Icosphere,
    /// Wavefront OBJ file given by `mesh_path`.
    Mesh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GravityConfig {
    pub shape: ShapeKind,
    /// Relative to the directory of the config file.
    pub mesh_path: Option<PathBuf>,
    /// Cube side or sphere radius, m.
    pub size: f64,
    pub subdivisions: u32,
    /// kg/m³.
    pub density: f64,
    /// Normal of the sampling plane.
    pub plane: Axis,
    pub offset: f64,
    /// Grid spacing, m.
    pub resolution: f64,
}

impl Default for GravityConfig {
    fn default() -> Self {
        Self {
            shape: ShapeKind::Cube,
            mesh_path: None,
            size: 1000.0,
            subdivisions: 3,
            density: 2000.0,
            plane: Axis::Z,
            offset: 0.0,
            resolution: 50.0,
        }
    }
}

/// Thrust-propelled hop with attitude hold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HopConfig {
    pub mass: f64,
    pub inertia: f64,
    pub thrust: f64,
    pub isp: f64,
    pub propellant_mass: f64,
    /// Propellant burned during the hop, kg.
    pub burned: f64,
    pub gravity: f64,
    /// Initial roll, pitch, yaw, degrees.
    pub tilt_deg: [f64; 3],
    pub kp: f64,
    pub kd: f64,
    pub torque_limit: f64,
    pub wheel_max_torque: f64,
    pub wheel_max_speed: f64,
    pub escape_velocity: Option<f64>,
    pub dt: f64,
    pub max_time: f64,
    pub sample_every: usize,
}

impl Default for HopConfig {
    fn default() -> Self {
        use nanolander_core::mobility::{
            AttitudeController, LanderBody, PropulsionUnit, ReactionWheel,
        };
        let body = LanderBody::default();
        let prop = PropulsionUnit::default();
        let ctrl = AttitudeController::default();
        let wheel = ReactionWheel::default();
        Self {
            mass: body.mass,
            inertia: body.inertia,
            thrust: prop.thrust,
            isp: prop.isp,
            propellant_mass: prop.propellant_mass,
            burned: 20e-6,
            gravity: nanolander_core::mobility::DEFAULT_GRAVITY,
            tilt_deg: [0.0; 3],
            kp: ctrl.kp,
            kd: ctrl.kd,
            torque_limit: ctrl.torque_limit,
            wheel_max_torque: wheel.max_torque,
            wheel_max_speed: wheel.max_speed,
            escape_velocity: None,
            dt: 1e-3,
            max_time: 1e4,
            sample_every: 10,
        }
    }
}

/// Reaction-wheel tumble or hop about a ground spike.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TumbleConfig {
    pub mass: f64,
    pub inertia: f64,
    pub pivot_arm: f64,
    pub alpha_deg: f64,
    pub beta_deg: f64,
    pub efficiency: f64,
    pub wheel_mass: f64,
    pub wheel_radius: f64,
    pub wheel_max_torque: f64,
    pub wheel_max_speed: f64,
    pub gravity: f64,
    /// Wheel speed before the brake, rad/s. When absent it is chosen so the
    /// braked body rate matches the closed-form launch model for `range`.
    pub wheel_speed: Option<f64>,
    /// Intended hop range, m.
    pub range: f64,
    pub contact_stiffness: f64,
    pub friction: f64,
    pub escape_velocity: Option<f64>,
    pub dt: f64,
    pub settle_time: f64,
    pub max_time: f64,
    pub sample_every: usize,
}

impl Default for TumbleConfig {
    fn default() -> Self {
        use nanolander_core::mobility::{
            ContactParams, HybridHopOptions, LanderBody, ReactionWheel,
        };
        let body = LanderBody::default();
        let wheel = ReactionWheel::default();
        let contact = ContactParams::default();
        let opts = HybridHopOptions::default();
        Self {
            mass: body.mass,
            inertia: body.inertia,
            pivot_arm: body.pivot_arm,
            alpha_deg: body.alpha.to_degrees(),
            beta_deg: body.beta.to_degrees(),
            efficiency: body.efficiency,
            wheel_mass: wheel.mass,
            wheel_radius: wheel.radius,
            wheel_max_torque: wheel.max_torque,
            wheel_max_speed: wheel.max_speed,
            gravity: opts.gravity,
            wheel_speed: None,
            range: 1.0,
            contact_stiffness: contact.stiffness,
            friction: contact.friction,
            escape_velocity: None,
            dt: opts.dt,
            settle_time: opts.settle_time,
            max_time: opts.max_time,
            sample_every: opts.sample_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleConfig {
    pub x: f64,
    pub y: f64,
    #[serde(default = "unit")]
    pub radius: f64,
    #[serde(default = "unit")]
    pub strength: f64,
}

fn unit() -> f64 {
    1.0
}

/// Swarm dispersion; shared by the coverage and exclusion scenarios.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoverageConfig {
    pub n_landers: usize,
    pub r_c: f64,
    pub r_s: f64,
    pub degree: usize,
    pub c_cov: f64,
    pub c_com: f64,
    pub c_obs: f64,
    pub mass: f64,
    pub damping: f64,
    pub dt: f64,
    pub max_steps: usize,
    pub settle_eps: f64,
    pub settle_window: usize,
    pub seed: u64,
    pub area_side: f64,
    /// Side of the square patch the landers start in.
    pub deploy_side: f64,
    pub obstacles: Vec<ObstacleConfig>,
    /// Defaults to (3, −1) for the exclusion scenario; ignored by coverage
    /// runs when absent.
    pub impact_site: Option<[f64; 2]>,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        use nanolander_core::swarm_coverage::{RunOptions, VirtualForceParams};
        let p = VirtualForceParams::default();
        let o = RunOptions::default();
        Self {
            n_landers: 40,
            r_c: p.r_c,
            r_s: p.r_s,
            degree: p.degree,
            c_cov: p.c_cov,
            c_com: p.c_com,
            c_obs: p.c_obs,
            mass: p.mass,
            damping: p.damping,
            dt: o.dt,
            max_steps: o.max_steps,
            settle_eps: o.settle_eps,
            settle_window: o.settle_window,
            seed: 1,
            area_side: o.area_side.unwrap_or(30.0),
            deploy_side: 6.0,
            obstacles: Vec::new(),
            impact_site: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScenarioParams {
    Gravity(GravityConfig),
    Hop(HopConfig),
    Tumble(TumbleConfig),
    Coverage(CoverageConfig),
    Evolve(CampaignConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub params: ScenarioParams,
}

impl ScenarioConfig {
    /// The seed the run uses; deterministic scenarios report 0.
    pub fn seed(&self) -> u64 {
        match &self.params {
            ScenarioParams::Coverage(c) => c.seed,
            ScenarioParams::Evolve(c) => c.master_seed,
            _ => 0,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match &mut self.params {
            ScenarioParams::Coverage(c) => c.seed = seed,
            ScenarioParams::Evolve(c) => c.master_seed = seed,
            _ => {}
        }
    }

    /// Canonical JSON of the defaults-filled configuration; independent of
    /// key order in the source file.
    pub fn canonical(&self) -> String {
        serde_json::to_string(self).expect("configs serialize")
    }
}

fn invalid(ok: bool, what: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Invalid(what()))
    }
}

fn positive(name: &str, value: f64) -> Result<(), CliError> {
    invalid(value > 0.0 && value.is_finite(), || {
        format!("{name} = {value} must be positive and finite")
    })
}

fn validate(config: &ScenarioConfig) -> Result<(), CliError> {
    match &config.params {
        ScenarioParams::Gravity(c) => {
            positive("size", c.size)?;
            positive("density", c.density)?;
            positive("resolution", c.resolution)?;
            invalid(c.shape != ShapeKind::Mesh || c.mesh_path.is_some(), || {
                "shape = \"mesh\" needs mesh_path".into()
            })
        }
        ScenarioParams::Hop(c) => {
            for (name, v) in [
                ("mass", c.mass),
                ("inertia", c.inertia),
                ("thrust", c.thrust),
                ("isp", c.isp),
                ("gravity", c.gravity),
                ("dt", c.dt),
                ("max_time", c.max_time),
            ] {
                positive(name, v)?;
            }
            invalid(c.burned >= 0.0, || {
                format!("burned = {} must be >= 0", c.burned)
            })?;
            invalid(c.sample_every >= 1, || "sample_every must be >= 1".into())
        }
        ScenarioParams::Tumble(c) => {
            for (name, v) in [
                ("mass", c.mass),
                ("inertia", c.inertia),
                ("pivot_arm", c.pivot_arm),
                ("wheel_mass", c.wheel_mass),
                ("wheel_radius", c.wheel_radius),
                ("gravity", c.gravity),
                ("range", c.range),
                ("dt", c.dt),
                ("max_time", c.max_time),
            ] {
                positive(name, v)?;
            }
            if let Some(w) = c.wheel_speed {
                invalid(w >= 0.0, || format!("wheel_speed = {w} must be >= 0"))?;
            }
            invalid(c.sample_every >= 1, || "sample_every must be >= 1".into())
        }
        ScenarioParams::Coverage(c) => {
            invalid(c.n_landers >= 1, || {
                format!("n_landers = {} must be >= 1", c.n_landers)
            })?;
            for (name, v) in [
                ("r_c", c.r_c),
                ("r_s", c.r_s),
                ("c_cov", c.c_cov),
                ("c_obs", c.c_obs),
                ("mass", c.mass),
                ("damping", c.damping),
                ("dt", c.dt),
                ("settle_eps", c.settle_eps),
                ("area_side", c.area_side),
                ("deploy_side", c.deploy_side),
            ] {
                positive(name, v)?;
            }
            invalid(c.c_com >= 0.0, || {
                format!("c_com = {} must be >= 0", c.c_com)
            })?;
            invalid(c.max_steps >= 1, || "max_steps must be >= 1".into())?;
            invalid(c.settle_window >= 1, || "settle_window must be >= 1".into())
        }
        ScenarioParams::Evolve(c) => c.validate().map_err(|e| CliError::Invalid(e.to_string())),
    }
}

/// Parses `text` as a `kind` scenario, fills defaults and validates ranges.
/// Relative mesh paths are resolved against `base_dir`.
pub fn parse_config_str(
    kind: ScenarioKind,
    text: &str,
    base_dir: &Path,
) -> Result<ScenarioConfig, CliError> {
    let parse_err = |e: toml::de::Error| CliError::Parse(e.to_string());
    let params = match kind {
        ScenarioKind::Gravity => {
            let mut c: GravityConfig = toml::from_str(text).map_err(parse_err)?;
            if let Some(p) = &c.mesh_path {
                if p.is_relative() {
                    c.mesh_path = Some(base_dir.join(p));
                }
            }
            ScenarioParams::Gravity(c)
        }
        ScenarioKind::Hop => ScenarioParams::Hop(toml::from_str(text).map_err(parse_err)?),
        ScenarioKind::Tumble => ScenarioParams::Tumble(toml::from_str(text).map_err(parse_err)?),
        ScenarioKind::Coverage | ScenarioKind::Exclusion => {
            let mut c: CoverageConfig = toml::from_str(text).map_err(parse_err)?;
            if kind == ScenarioKind::Exclusion && c.impact_site.is_none() {
                c.impact_site = Some([3.0, -1.0]);
            }
            ScenarioParams::Coverage(c)
        }
        ScenarioKind::Evolve => ScenarioParams::Evolve(toml::from_str(text).map_err(parse_err)?),
    };
    let config = ScenarioConfig { kind, params };
    validate(&config)?;
    Ok(config)
}

/// Reads and parses a config file; `None` gives the defaults.
pub fn parse_config(kind: ScenarioKind, path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        None => parse_config_str(kind, "", Path::new(".")),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.to_path_buf(),
                source: e,
            })?;
            let base = path.parent().unwrap_or(Path::new("."));
            parse_config_str(kind, &text, base).map_err(|e| match e {
                CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
                other => other,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_the_defaults() {
        let c = parse_config_str(ScenarioKind::Hop, "", Path::new(".")).unwrap();
        assert_eq!(c.params, ScenarioParams::Hop(HopConfig::default()));
        let e = parse_config_str(ScenarioKind::Exclusion, "", Path::new(".")).unwrap();
        match e.params {
            ScenarioParams::Coverage(c) => assert_eq!(c.impact_site, Some([3.0, -1.0])),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_form_ignores_key_order() {
        let a = parse_config_str(
            ScenarioKind::Coverage,
            "seed = 4\nr_c = 6.0\n",
            Path::new("."),
        )
        .unwrap();
        let b = parse_config_str(
            ScenarioKind::Coverage,
            "r_c = 6.0\nseed = 4\n",
            Path::new("."),
        )
        .unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn seed_override() {
        let mut c = parse_config_str(ScenarioKind::Evolve, "", Path::new(".")).unwrap();
        c.set_seed(99);
        assert_eq!(c.seed(), 99);
        let mut g = parse_config_str(ScenarioKind::Gravity, "", Path::new(".")).unwrap();
        g.set_seed(99);
        assert_eq!(g.seed(), 0);
    }

    #[test]
    fn mesh_shape_needs_a_path() {
        let err = parse_config_str(ScenarioKind::Gravity, "shape = \"mesh\"", Path::new("."));
        assert!(matches!(err, Err(CliError::Invalid(_))));
        let ok = parse_config_str(
            ScenarioKind::Gravity,
            "shape = \"mesh\"\nmesh_path = \"body.obj\"",
            Path::new("/data"),
        )
        .unwrap();
        match ok.params {
            ScenarioParams::Gravity(g) => {
                assert_eq!(g.mesh_path, Some(PathBuf::from("/data/body.obj")))
            }
            other => panic!("{other:?}"),
        }
    }
}
