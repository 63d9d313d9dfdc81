//! Planar swarm dispersion with virtual forces.
//!
//! Every lander is a damped point mass driven by three virtual forces:
//! inverse-distance repulsion from the landers it can talk to (coverage), a
//! spring toward its nearest neighbours while it has too few communication
//! links, and inverse-distance repulsion from nearby obstacles. The swarm is integrated
//! until it stops moving; the covered area is the polygon through the lander
//! positions.

mod area;
mod forces;
mod run;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use area::{coverage_area, min_pair_distance, sensing_area};
pub use forces::{
    degree, degrees, f_com, f_cov, f_obs, net_force, net_forces, DISTANCE_FLOOR, LINK_BAND,
    TAPER_WIDTH,
};
pub use run::{
    run_coverage, run_exclusion, step, CoverageMetrics, CoverageRun, Frame, RunOptions,
    EXCLUSION_RADIUS, IMPACT_STRENGTH,
};

pub type Point = Vector2<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum SwarmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("a swarm needs at least one lander")]
    Empty,
    #[error("landers {0} and {1} share a position")]
    Coincident(usize, usize),
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), SwarmError> {
    if ok {
        Ok(())
    } else {
        Err(SwarmError::InvalidParameter(what()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualForceParams {
    pub c_cov: f64,
    pub c_com: f64,
    pub c_obs: f64,
    /// Communication range.
    pub r_c: f64,
    /// Sensing range (metrics only).
    pub r_s: f64,
    /// Required communication degree.
    pub degree: usize,
    pub mass: f64,
    pub damping: f64,
}

impl Default for VirtualForceParams {
    /// Settles 40 landers from a 6 × 6 patch for every degree from 2 to 6.
    fn default() -> Self {
        Self {
            c_cov: 1.0,
            c_com: 0.02,
            c_obs: 1.0,
            r_c: 5.0,
            r_s: 2.5,
            degree: 3,
            mass: 1.0,
            damping: 2.0,
        }
    }
}

impl VirtualForceParams {
    pub fn validate(&self) -> Result<(), SwarmError> {
        check(self.c_cov > 0.0, || {
            format!("c_cov {} must be > 0", self.c_cov)
        })?;
        check(self.c_com >= 0.0, || {
            format!("c_com {} must be >= 0", self.c_com)
        })?;
        check(self.c_obs > 0.0, || {
            format!("c_obs {} must be > 0", self.c_obs)
        })?;
        check(self.r_c > 0.0, || format!("r_c {} must be > 0", self.r_c))?;
        check(self.r_s > 0.0, || format!("r_s {} must be > 0", self.r_s))?;
        check(self.mass > 0.0, || {
            format!("mass {} must be > 0", self.mass)
        })?;
        check(self.damping > 0.0, || {
            format!("damping {} must be > 0", self.damping)
        })
    }
}

/// Point obstacle. The radius is used for reporting only; the repulsion is
/// scaled by `strength`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub center: Point,
    pub radius: f64,
    pub strength: f64,
}

impl Obstacle {
    pub fn new(center: Point, radius: f64) -> Self {
        Self {
            center,
            radius,
            strength: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState {
    pub positions: Vec<Point>,
    pub velocities: Vec<Point>,
    pub obstacles: Vec<Obstacle>,
    /// Step index.
    pub t: usize,
}

impl SwarmState {
    /// At rest, `t = 0`.
    pub fn new(positions: Vec<Point>, obstacles: Vec<Obstacle>) -> Result<Self, SwarmError> {
        if positions.is_empty() {
            return Err(SwarmError::Empty);
        }
        for (i, p) in positions.iter().enumerate() {
            if !(p.x.is_finite() && p.y.is_finite()) {
                return Err(SwarmError::InvalidParameter(format!(
                    "lander {i} has a non-finite position"
                )));
            }
            if let Some(j) = positions[..i].iter().position(|q| q == p) {
                return Err(SwarmError::Coincident(j, i));
            }
        }
        let velocities = vec![Point::zeros(); positions.len()];
        Ok(Self {
            positions,
            velocities,
            obstacles,
            t: 0,
        })
    }

    /// `n` landers drawn uniformly from the `side × side` square centred on `centre`.
    pub fn random(
        n: usize,
        centre: Point,
        side: f64,
        obstacles: Vec<Obstacle>,
        seed: u64,
    ) -> Result<Self, SwarmError> {
        check(side > 0.0, || format!("deployment side {side} must be > 0"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let half = 0.5 * side;
        let positions = (0..n)
            .map(|_| {
                centre + Point::new(rng.random_range(-half..half), rng.random_range(-half..half))
            })
            .collect();
        Self::new(positions, obstacles)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Drops the landers at `indices`; velocities go with them.
    pub fn remove(&mut self, indices: &[usize]) {
        let mut keep = vec![true; self.len()];
        for &i in indices {
            keep[i] = false;
        }
        let mut k = 0;
        self.positions.retain(|_| {
            k += 1;
            keep[k - 1]
        });
        k = 0;
        self.velocities.retain(|_| {
            k += 1;
            keep[k - 1]
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_rejects_empty_and_coincident() {
        assert_eq!(SwarmState::new(vec![], vec![]), Err(SwarmError::Empty));
        let p = Point::new(1.0, 2.0);
        assert_eq!(
            SwarmState::new(vec![p, Point::zeros(), p], vec![]),
            Err(SwarmError::Coincident(0, 2))
        );
    }

    #[test]
    fn random_deployment_is_seeded_and_bounded() {
        let a = SwarmState::random(40, Point::new(1.0, -1.0), 6.0, vec![], 7).unwrap();
        let b = SwarmState::random(40, Point::new(1.0, -1.0), 6.0, vec![], 7).unwrap();
        let c = SwarmState::random(40, Point::new(1.0, -1.0), 6.0, vec![], 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .positions
            .iter()
            .all(|p| (p.x - 1.0).abs() <= 3.0 && (p.y + 1.0).abs() <= 3.0));
    }

    #[test]
    fn remove_keeps_order() {
        let mut s =
            SwarmState::new((0..5).map(|i| Point::new(i as f64, 0.0)).collect(), vec![]).unwrap();
        s.remove(&[1, 3]);
        let xs: Vec<f64> = s.positions.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 2.0, 4.0]);
        assert_eq!(s.velocities.len(), 3);
    }

    #[test]
    fn params_validation() {
        VirtualForceParams::default().validate().unwrap();
        let bad = VirtualForceParams {
            damping: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
