use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check, EvolveError, FitnessVector, Phenotype};
use crate::swarm_coverage::{coverage_area, degrees, run_coverage, Point, RunOptions, SwarmState};

/// Everything about a fitness evaluation that is not part of the genotype.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Side of the square target area.
    pub area_side: f64,
    /// Side of the square patch the landers start in, centred on the target.
    pub deploy_side: f64,
    pub r_c: f64,
    pub r_s: f64,
    /// Fraction of landers killed after the first settlement (rounded up).
    pub attrition: f64,
    /// Step limit of each of the two runs.
    pub max_steps: usize,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            area_side: 30.0,
            deploy_side: 6.0,
            r_c: 5.0,
            r_s: 2.5,
            attrition: 0.1,
            max_steps: 5000,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<(), EvolveError> {
        check(self.area_side > 0.0, || {
            format!("area_side {} must be > 0", self.area_side)
        })?;
        check(self.deploy_side > 0.0, || {
            format!("deploy_side {} must be > 0", self.deploy_side)
        })?;
        check(self.r_c > 0.0, || format!("r_c {} must be > 0", self.r_c))?;
        check(self.r_s > 0.0, || format!("r_s {} must be > 0", self.r_s))?;
        check((0.0..1.0).contains(&self.attrition), || {
            format!("attrition {} must be in [0, 1)", self.attrition)
        })?;
        check(self.max_steps >= 1, || "max_steps must be >= 1".into())
    }

    fn run_options(&self) -> RunOptions {
        RunOptions {
            max_steps: self.max_steps,
            area_side: Some(self.area_side),
            ..Default::default()
        }
    }
}

/// Raw outcome of one deploy, attrition and re-settle cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Polygon area of the survivors.
    pub area: f64,
    /// Mean degree of the survivors.
    pub mean_degree: f64,
    /// Steps of both runs together.
    pub steps: usize,
    /// Both runs settled.
    pub settled: bool,
    /// Hops of both runs per deployed lander.
    pub hops_per_lander: f64,
    pub killed: usize,
}

pub fn measure(p: &Phenotype, scenario: &Scenario, seed: u64) -> Result<Measurement, EvolveError> {
    scenario.validate()?;
    check(p.n >= 2, || {
        format!("swarm of {} landers is too small", p.n)
    })?;
    let params = p.params(scenario.r_c, scenario.r_s);
    let opts = scenario.run_options();

    let start = SwarmState::random(p.n, Point::zeros(), scenario.deploy_side, vec![], seed)?;
    let first = run_coverage(&start, &params, &opts)?;

    let killed = ((scenario.attrition * p.n as f64).ceil() as usize).min(p.n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let victims = index::sample(&mut rng, p.n, killed).into_vec();
    let mut survivors = first.final_state;
    survivors.remove(&victims);
    survivors.t = 0;
    let second = run_coverage(&survivors, &params, &opts)?;

    let positions = &second.final_state.positions;
    let degs = degrees(positions, scenario.r_c);
    Ok(Measurement {
        area: coverage_area(positions),
        mean_degree: degs.iter().sum::<usize>() as f64 / degs.len() as f64,
        steps: first.metrics.t_settle + second.metrics.t_settle,
        settled: first.metrics.settled && second.metrics.settled,
        hops_per_lander: (first.metrics.hops_total + second.metrics.hops_total) as f64 / p.n as f64,
        killed,
    })
}

/// Settling time and per-lander energy of the reference swarm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    pub t_40: f64,
    pub e_40: f64,
}

impl Baseline {
    /// Averages the reference swarm over `seeds`.
    pub fn compute(scenario: &Scenario, seeds: &[u64]) -> Result<Self, EvolveError> {
        check(!seeds.is_empty(), || "at least one seed is needed".into())?;
        let reference = Phenotype::reference();
        let (mut t, mut e) = (0.0, 0.0);
        for &seed in seeds {
            let m = measure(&reference, scenario, seed)?;
            if !m.settled {
                return Err(EvolveError::BaselineUnsettled(scenario.max_steps));
            }
            t += m.steps as f64;
            e += m.hops_per_lander;
        }
        let k = seeds.len() as f64;
        Ok(Self {
            t_40: t / k,
            e_40: e / k,
        })
    }
}

/// Normalizes a measurement. Time and energy score 1 at the reference value
/// and fall linearly to 0 at twice it; an unsettled swarm scores 0 on time.
pub fn score(
    m: &Measurement,
    degree_required: usize,
    baseline: &Baseline,
    area_side: f64,
) -> FitnessVector {
    let relative =
        |value: f64, reference: f64| (1.0 - (value - reference) / reference).clamp(0.0, 1.0);
    FitnessVector::new(
        (m.area / (area_side * area_side)).clamp(0.0, 1.0),
        (m.mean_degree / degree_required as f64).clamp(0.0, 1.0),
        if m.settled {
            relative(m.steps as f64, baseline.t_40)
        } else {
            0.0
        },
        relative(m.hops_per_lander, baseline.e_40),
    )
}

pub fn evaluate(
    p: &Phenotype,
    baseline: &Baseline,
    scenario: &Scenario,
    seed: u64,
) -> Result<FitnessVector, EvolveError> {
    let m = measure(p, scenario, seed)?;
    Ok(score(&m, p.degree, baseline, scenario.area_side))
}

/// Component-wise mean of [`evaluate`] over `seeds`.
pub fn evaluate_mean(
    p: &Phenotype,
    baseline: &Baseline,
    scenario: &Scenario,
    seeds: &[u64],
) -> Result<FitnessVector, EvolveError> {
    check(!seeds.is_empty(), || "at least one seed is needed".into())?;
    let mut sum = [0.0; 4];
    for &seed in seeds {
        let f = evaluate(p, baseline, scenario, seed)?;
        for (s, x) in sum.iter_mut().zip(f.objectives()) {
            *s += x;
        }
    }
    let k = seeds.len() as f64;
    Ok(FitnessVector::new(
        sum[0] / k,
        sum[1] / k,
        sum[2] / k,
        sum[3] / k,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scores_one_against_itself() {
        let scenario = Scenario::default();
        let seeds = [5];
        let baseline = Baseline::compute(&scenario, &seeds).unwrap();
        assert!(baseline.t_40 > 0.0 && baseline.e_40 > 0.0);
        let f = evaluate(&Phenotype::reference(), &baseline, &scenario, 5).unwrap();
        assert_eq!(f.time, 1.0);
        assert_eq!(f.energy, 1.0);
        assert!(f.area > 0.0 && f.area <= 1.0);
    }

    #[test]
    fn attrition_kills_a_tenth_rounded_up() {
        let scenario = Scenario {
            max_steps: 50,
            ..Default::default()
        };
        let mut p = Phenotype::reference();
        for (n, killed) in [(40, 4), (41, 5), (2, 1), (9, 1)] {
            p.n = n;
            assert_eq!(measure(&p, &scenario, 1).unwrap().killed, killed);
        }
    }

    #[test]
    fn score_normalization() {
        let baseline = Baseline {
            t_40: 200.0,
            e_40: 10.0,
        };
        let m = Measurement {
            area: 900.0,
            mean_degree: 3.0,
            steps: 200,
            settled: true,
            hops_per_lander: 10.0,
            killed: 4,
        };
        assert_eq!(
            score(&m, 3, &baseline, 30.0),
            FitnessVector::new(1.0, 1.0, 1.0, 1.0)
        );
        let slow = Measurement {
            steps: 300,
            hops_per_lander: 25.0,
            mean_degree: 1.5,
            area: 450.0,
            ..m
        };
        let f = score(&slow, 3, &baseline, 30.0);
        assert_eq!(f.objectives(), [0.5, 0.5, 0.5, 0.0]);
        let fast = Measurement {
            steps: 100,
            settled: false,
            ..m
        };
        assert_eq!(score(&fast, 3, &baseline, 30.0).time, 0.0);
        let quick = Measurement { steps: 100, ..m };
        assert_eq!(score(&quick, 3, &baseline, 30.0).time, 1.0);
    }
}
