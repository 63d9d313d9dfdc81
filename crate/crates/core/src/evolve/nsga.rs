use std::cmp::Ordering;
use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fitness::{evaluate_mean, Baseline, Scenario};
use super::{check, decode, EvolveError, FitnessVector, Genotype, Phenotype, GENOTYPE_BITS};

/// `a` is at least as good as `b` everywhere and strictly better somewhere
/// (all objectives maximized).
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

/// Pareto fronts as index lists, best front first, each in ascending order.
pub fn non_dominated_sort<const K: usize>(objectives: &[[f64; K]]) -> Vec<Vec<usize>> {
    let n = objectives.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&objectives[i], &objectives[j]) {
                dominated_by[i].push(j);
                count[j] += 1;
            } else if dominates(&objectives[j], &objectives[i]) {
                dominated_by[j].push(i);
                count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of `front`, in the order given.
/// Extremes of every objective get infinity.
pub fn crowding_distance<const K: usize>(objectives: &[[f64; K]], front: &[usize]) -> Vec<f64> {
    let n = front.len();
    let mut distance = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut order: Vec<usize> = (0..n).collect();
    #[allow(clippy::needless_range_loop)]
    for k in 0..K {
        order.sort_by(|&a, &b| {
            objectives[front[a]][k]
                .total_cmp(&objectives[front[b]][k])
                .then(front[a].cmp(&front[b]))
        });
        let lo = objectives[front[order[0]]][k];
        let hi = objectives[front[order[n - 1]]][k];
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..n - 1 {
                let gap = objectives[front[order[w + 1]]][k] - objectives[front[order[w - 1]]][k];
                distance[order[w]] += gap / (hi - lo);
            }
        }
    }
    distance
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genotype: Genotype,
    pub phenotype: Phenotype,
    pub fitness: FitnessVector,
    /// Pareto front, starting at 1.
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    fn new(genotype: Genotype, fitness: FitnessVector) -> Self {
        Self {
            genotype,
            phenotype: decode(&genotype),
            fitness,
            rank: 0,
            crowding: 0.0,
        }
    }
}

/// Lower rank wins, then larger crowding, then the smaller genotype.
fn selection_order(a: &Individual, b: &Individual) -> Ordering {
    a.rank
        .cmp(&b.rank)
        .then(b.crowding.total_cmp(&a.crowding))
        .then(a.genotype.cmp(&b.genotype))
}

fn overall_order(a: &Individual, b: &Individual) -> Ordering {
    a.fitness
        .overall
        .total_cmp(&b.fitness.overall)
        .then(b.genotype.cmp(&a.genotype))
}

fn tournament<'a, R: Rng>(parents: &'a [Individual], rng: &mut R) -> &'a Individual {
    let a = &parents[rng.random_range(0..parents.len())];
    let b = &parents[rng.random_range(0..parents.len())];
    if selection_order(b, a) == Ordering::Less {
        b
    } else {
        a
    }
}

/// As many children as parents: binary tournaments on (rank, crowding),
/// single-point crossover with probability `p_cross`, then with probability
/// `p_mut` one uniformly chosen bit of each child is flipped.
pub fn make_offspring(
    parents: &[Individual],
    p_cross: f64,
    p_mut: f64,
    seed: u64,
) -> Vec<Genotype> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut children = Vec::with_capacity(parents.len());
    while children.len() < parents.len() {
        let mut a = tournament(parents, &mut rng).genotype;
        let mut b = tournament(parents, &mut rng).genotype;
        if rng.random_bool(p_cross) {
            let cut = rng.random_range(1..GENOTYPE_BITS);
            for i in cut..GENOTYPE_BITS {
                std::mem::swap(&mut a.bits[i], &mut b.bits[i]);
            }
        }
        for child in [a, b] {
            let mut child = child;
            if rng.random_bool(p_mut) {
                let i = rng.random_range(0..GENOTYPE_BITS);
                child.bits[i] = !child.bits[i];
            }
            if children.len() < parents.len() {
                children.push(child);
            }
        }
    }
    children
}

/// Ranks `pool`, keeps the best `m` and makes sure the best overall
/// individual of the pool survives.
fn select(mut pool: Vec<Individual>, m: usize) -> Vec<Individual> {
    let objectives: Vec<[f64; 4]> = pool.iter().map(|p| p.fitness.objectives()).collect();
    for (r, front) in non_dominated_sort(&objectives).iter().enumerate() {
        for (&i, d) in front.iter().zip(crowding_distance(&objectives, front)) {
            pool[i].rank = r + 1;
            pool[i].crowding = d;
        }
    }
    let champion = *pool
        .iter()
        .max_by(|a, b| overall_order(a, b))
        .expect("non-empty pool");
    pool.sort_by(selection_order);
    pool.truncate(m);
    if !pool.iter().any(|p| p.genotype == champion.genotype) {
        pool[m - 1] = champion;
    }
    pool
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    /// Population size, even and at least 4.
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    /// Number of deployment seeds every individual is averaged over.
    pub eval_seeds: usize,
    pub master_seed: u64,
    pub area_side: f64,
    pub r_c: f64,
    /// Step limit of each settling run.
    pub max_steps: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let scenario = Scenario::default();
        Self {
            pop_size: 50,
            generations: 40,
            p_crossover: 0.8,
            p_mutation: 0.2,
            eval_seeds: 3,
            master_seed: 1,
            area_side: scenario.area_side,
            r_c: scenario.r_c,
            max_steps: scenario.max_steps,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        check(
            self.pop_size >= 4 && self.pop_size.is_multiple_of(2),
            || format!("pop_size {} must be even and >= 4", self.pop_size),
        )?;
        check(self.generations >= 1, || "generations must be >= 1".into())?;
        check((0.0..=1.0).contains(&self.p_crossover), || {
            format!("p_crossover {} must be in [0, 1]", self.p_crossover)
        })?;
        check((0.0..=1.0).contains(&self.p_mutation), || {
            format!("p_mutation {} must be in [0, 1]", self.p_mutation)
        })?;
        check(self.eval_seeds >= 1, || "eval_seeds must be >= 1".into())?;
        self.scenario().validate()
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            area_side: self.area_side,
            r_c: self.r_c,
            max_steps: self.max_steps,
            ..Default::default()
        }
    }

    /// Deployment seeds shared by the baseline and every individual.
    pub fn seeds(&self) -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(2);
        (0..self.eval_seeds).map(|_| rng.random()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub mean_area: f64,
    pub mean_degree: f64,
    pub mean_time: f64,
    pub mean_energy: f64,
    pub best_overall: f64,
    pub best: Individual,
    /// Distinct genotypes evaluated so far.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Campaign {
    pub config: CampaignConfig,
    pub baseline: Baseline,
    /// One entry per generation, starting with the random initial population.
    pub history: Vec<GenerationStats>,
    pub population: Vec<Individual>,
    /// Distinct members of the final first front.
    pub pareto_front: Vec<Individual>,
    pub best: Individual,
}

fn stats(generation: usize, population: &[Individual], evaluations: usize) -> GenerationStats {
    let m = population.len() as f64;
    let mean = |k: usize| {
        population
            .iter()
            .map(|p| p.fitness.objectives()[k])
            .sum::<f64>()
            / m
    };
    let best = *population
        .iter()
        .max_by(|a, b| overall_order(a, b))
        .expect("non-empty population");
    GenerationStats {
        generation,
        mean_area: mean(0),
        mean_degree: mean(1),
        mean_time: mean(2),
        mean_energy: mean(3),
        best_overall: best.fitness.overall,
        best,
        evaluations,
    }
}

struct Evaluator {
    baseline: Baseline,
    scenario: Scenario,
    seeds: Vec<u64>,
    cache: HashMap<Genotype, FitnessVector>,
}

impl Evaluator {
    fn individuals(&mut self, genotypes: &[Genotype]) -> Result<Vec<Individual>, EvolveError> {
        let mut fresh: Vec<Genotype> = genotypes
            .iter()
            .filter(|g| !self.cache.contains_key(g))
            .copied()
            .collect();
        fresh.sort_unstable();
        fresh.dedup();
        let scored: Vec<(Genotype, FitnessVector)> = fresh
            .par_iter()
            .map(|g| {
                evaluate_mean(&decode(g), &self.baseline, &self.scenario, &self.seeds)
                    .map(|f| (*g, f))
            })
            .collect::<Result<_, _>>()?;
        self.cache.extend(scored);
        Ok(genotypes
            .iter()
            .map(|g| Individual::new(*g, self.cache[g]))
            .collect())
    }
}

/// Elitist NSGA-II over `generations` generations after the initial one.
pub fn run_nsga2(config: &CampaignConfig) -> Result<Campaign, EvolveError> {
    config.validate()?;
    let m = config.pop_size;
    let scenario = config.scenario();
    let seeds = config.seeds();
    let baseline = Baseline::compute(&scenario, &seeds)?;
    let mut eval = Evaluator {
        baseline,
        scenario,
        seeds,
        cache: HashMap::new(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    let initial: Vec<Genotype> = (0..m).map(|_| Genotype::random(&mut rng)).collect();
    let mut population = select(eval.individuals(&initial)?, m);
    let mut history = vec![stats(0, &population, eval.cache.len())];

    for generation in 1..=config.generations {
        let children = make_offspring(
            &population,
            config.p_crossover,
            config.p_mutation,
            rng.random(),
        );
        let mut pool = population;
        pool.extend(eval.individuals(&children)?);
        population = select(pool, m);
        history.push(stats(generation, &population, eval.cache.len()));
    }

    let mut pareto_front: Vec<Individual> =
        population.iter().filter(|p| p.rank == 1).copied().collect();
    pareto_front.sort_by_key(|p| p.genotype);
    pareto_front.dedup_by(|a, b| a.genotype == b.genotype);
    let best = history
        .last()
        .expect("history has the initial generation")
        .best;
    Ok(Campaign {
        config: *config,
        baseline,
        history,
        population,
        pareto_front,
        best,
    })
}
