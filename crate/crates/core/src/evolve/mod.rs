//! Multi-objective tuning of swarm parameters.
//!
//! A 19-bit genotype encodes the swarm size, the required communication
//! degree and two virtual-force constants. Each candidate is scored by
//! dispersing the swarm, killing a tenth of it and letting the survivors
//! settle again; the four normalized objectives (area, degree, settling
//! time, energy) drive an NSGA-II loop, and their weighted sum is reported as
//! the overall fitness.

mod fitness;
mod nsga;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::swarm_coverage::{SwarmError, VirtualForceParams};

pub use fitness::{evaluate, evaluate_mean, measure, score, Baseline, Measurement, Scenario};
pub use nsga::{
    crowding_distance, dominates, make_offspring, non_dominated_sort, run_nsga2, Campaign,
    CampaignConfig, GenerationStats, Individual,
};

pub const GENOTYPE_BITS: usize = 19;

/// Bit ranges of the four fields, most significant bit first.
pub const N_FIELD: std::ops::Range<usize> = 0..7;
pub const D_FIELD: std::ops::Range<usize> = 7..10;
pub const C_COV_FIELD: std::ops::Range<usize> = 10..14;
pub const C_COM_FIELD: std::ops::Range<usize> = 14..19;

/// Objective weights of the overall fitness: area, degree, time, energy.
pub const WEIGHTS: [f64; 4] = [0.5, 0.25, 0.125, 0.125];

#[derive(Debug, Error, PartialEq)]
pub enum EvolveError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("reference swarm did not settle within {0} steps")]
    BaselineUnsettled(usize),
    #[error(transparent)]
    Swarm(#[from] SwarmError),
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), EvolveError> {
    if ok {
        Ok(())
    } else {
        Err(EvolveError::InvalidParameter(what()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Genotype {
    pub bits: [bool; GENOTYPE_BITS],
}

impl Genotype {
    /// Packs raw field values; each is truncated to its field width.
    pub fn from_fields(n: u32, d: u32, c_cov: u32, c_com: u32) -> Self {
        let mut bits = [false; GENOTYPE_BITS];
        for (range, value) in [
            (N_FIELD, n),
            (D_FIELD, d),
            (C_COV_FIELD, c_cov),
            (C_COM_FIELD, c_com),
        ] {
            let width = range.len();
            for (k, i) in range.enumerate() {
                bits[i] = (value >> (width - 1 - k)) & 1 == 1;
            }
        }
        Self { bits }
    }

    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let mut bits = [false; GENOTYPE_BITS];
        for b in &mut bits {
            *b = rng.random_bool(0.5);
        }
        Self { bits }
    }

    /// Unsigned value of a field.
    pub fn field(&self, range: std::ops::Range<usize>) -> u32 {
        self.bits[range]
            .iter()
            .fold(0, |acc, &b| (acc << 1) | b as u32)
    }

    pub fn hamming(&self, other: &Genotype) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}

impl std::fmt::Display for Genotype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phenotype {
    pub n: usize,
    pub degree: usize,
    pub c_cov: f64,
    pub c_com: f64,
    pub c_obs: f64,
}

impl Phenotype {
    /// The 40-lander, degree-3 swarm with the default force constants that
    /// sets the time and energy references.
    pub fn reference() -> Self {
        let p = VirtualForceParams::default();
        Self {
            n: 40,
            degree: 3,
            c_cov: p.c_cov,
            c_com: p.c_com,
            c_obs: p.c_obs,
        }
    }

    /// Force parameters with the given communication and sensing ranges.
    pub fn params(&self, r_c: f64, r_s: f64) -> VirtualForceParams {
        VirtualForceParams {
            c_cov: self.c_cov,
            c_com: self.c_com,
            c_obs: self.c_obs,
            r_c,
            r_s,
            degree: self.degree,
            ..Default::default()
        }
    }
}

/// `N = max(2, n)`, `D = d + 1`, `C_cov = C_obs = 0.5 (c + 1)`,
/// `C_com = 0.05 (c + 1)` from the raw field values.
pub fn decode(g: &Genotype) -> Phenotype {
    let c_cov = 0.5 * (g.field(C_COV_FIELD) + 1) as f64;
    Phenotype {
        n: (g.field(N_FIELD) as usize).max(2),
        degree: g.field(D_FIELD) as usize + 1,
        c_cov,
        c_com: 0.05 * (g.field(C_COM_FIELD) + 1) as f64,
        c_obs: c_cov,
    }
}

/// Normalized objectives, each in `[0, 1]` with 1 best.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitnessVector {
    pub area: f64,
    pub degree: f64,
    pub time: f64,
    pub energy: f64,
    pub overall: f64,
}

impl FitnessVector {
    pub fn new(area: f64, degree: f64, time: f64, energy: f64) -> Self {
        let mut f = Self {
            area,
            degree,
            time,
            energy,
            overall: 0.0,
        };
        f.overall = overall_fitness(&f);
        f
    }

    pub fn objectives(&self) -> [f64; 4] {
        [self.area, self.degree, self.time, self.energy]
    }
}

pub fn overall_fitness(f: &FitnessVector) -> f64 {
    WEIGHTS.iter().zip(f.objectives()).map(|(w, x)| w * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_fields() {
        let g = Genotype::from_fields(0b1000001, 4, 1, 0);
        let p = decode(&g);
        assert_eq!(p.n, 65);
        assert_eq!(p.degree, 5);
        assert_eq!(p.c_cov, 1.0);
        assert_eq!(p.c_obs, 1.0);
        assert!((p.c_com - 0.05).abs() < 1e-15);
        assert_eq!(g.to_string(), "1000001100000100000");
    }

    #[test]
    fn decode_extremes() {
        let zero = decode(&Genotype::from_fields(0, 0, 0, 0));
        assert_eq!((zero.n, zero.degree, zero.c_cov), (2, 1, 0.5));
        assert!((zero.c_com - 0.05).abs() < 1e-15);
        let one = decode(&Genotype::from_fields(1, 0, 0, 0));
        assert_eq!(one.n, 2);
        let full = decode(&Genotype {
            bits: [true; GENOTYPE_BITS],
        });
        assert_eq!((full.n, full.degree, full.c_cov), (127, 8, 8.0));
        assert!((full.c_com - 1.6).abs() < 1e-12);
    }

    #[test]
    fn fields_round_trip() {
        let g = Genotype::from_fields(93, 6, 11, 27);
        assert_eq!(
            [
                g.field(N_FIELD),
                g.field(D_FIELD),
                g.field(C_COV_FIELD),
                g.field(C_COM_FIELD)
            ],
            [93, 6, 11, 27]
        );
    }

    #[test]
    fn overall_weights() {
        assert_eq!(FitnessVector::new(1.0, 1.0, 1.0, 1.0).overall, 1.0);
        assert_eq!(FitnessVector::new(0.0, 0.0, 0.0, 0.0).overall, 0.0);
        assert!((FitnessVector::new(0.8, 1.0, 0.5, 0.5).overall - 0.775).abs() < 1e-15);
    }
}
