//! One generation of the genetic algorithm.
//!
//! The loop order is selection, then mutation, then crossover; the best
//! individual is located after crossover.  All randomness flows through a
//! caller-supplied [`RunRng`] stream, so a run is a pure function of its seed.

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};

use crate::control::ControlAction;
use crate::error::{Error, Result};
use crate::genotype::Genotype;
use crate::landscape::FitnessLandscape;

/// The generator used for all runs: seedable, with one independent stream per
/// replica.
pub type RunRng = rand_chacha::ChaCha8Rng;

/// Name of the RNG algorithm, recorded in serialized output headers.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Independent RNG stream for one replica of an experiment.
pub fn replica_rng(master_seed: u64, replica: u64) -> RunRng {
    let mut rng = RunRng::seed_from_u64(master_seed);
    rng.set_stream(replica);
    rng
}

/// A genotype with its cached fitness.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub genotype: Genotype,
    pub fitness: f64,
}

/// A multiset of individuals sharing one genotype length.
#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    members: Vec<Individual>,
    n: usize,
}

impl Population {
    /// `m` genotypes drawn uniformly over `{0,1}^n`, fitnesses cached.
    pub fn random<R: Rng + ?Sized>(
        m: usize,
        landscape: &FitnessLandscape,
        rng: &mut R,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::Config(alloc::format!(
                "population size must be ≥ 2, got {m}"
            )));
        }
        let members = (0..m)
            .map(|_| {
                let genotype = Genotype::random(landscape.n(), rng);
                let fitness = landscape
                    .evaluate(&genotype)
                    .expect("genotype built for this landscape");
                Individual { genotype, fitness }
            })
            .collect();
        Ok(Population {
            members,
            n: landscape.n(),
        })
    }

    /// Builds a population from explicit members, validating the invariants.
    pub fn from_members(members: Vec<Individual>, n: usize) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::Config(alloc::format!(
                "population size must be ≥ 2, got {}",
                members.len()
            )));
        }
        if members.iter().any(|ind| ind.genotype.len() != n) {
            return Err(Error::Config(alloc::format!(
                "all genotypes must have length {n}"
            )));
        }
        Ok(Population { members, n })
    }

    pub(crate) fn from_vec(members: Vec<Individual>, n: usize) -> Self {
        debug_assert!(members.len() >= 2);
        Population { members, n }
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    /// Member of maximal fitness, ties broken by lowest index.
    pub fn best(&self) -> &Individual {
        let mut best = &self.members[0];
        for ind in &self.members[1..] {
            if ind.fitness > best.fitness {
                best = ind;
            }
        }
        best
    }

    /// Index of the member of minimal fitness, ties broken by lowest index.
    pub fn worst_index(&self) -> usize {
        let mut worst = 0;
        for (i, ind) in self.members.iter().enumerate().skip(1) {
            if ind.fitness < self.members[worst].fitness {
                worst = i;
            }
        }
        worst
    }

    pub fn mean_fitness(&self) -> f64 {
        self.members.iter().map(|ind| ind.fitness).sum::<f64>() / self.members.len() as f64
    }

    /// Mean pairwise Hamming distance over unordered member pairs, in bits.
    pub fn diversity(&self) -> f64 {
        let m = self.members.len();
        // pairs differing at bit i = c_i (m − c_i)
        let mut sum = 0u64;
        for i in 0..self.n {
            let c = self
                .members
                .iter()
                .filter(|ind| ind.genotype.bit(i))
                .count() as u64;
            sum += c * (m as u64 - c);
        }
        sum as f64 / (m as f64 * (m as f64 - 1.0) / 2.0)
    }

    pub(crate) fn replace_member(&mut self, index: usize, member: Individual) {
        debug_assert_eq!(member.genotype.len(), self.n);
        self.members[index] = member;
    }
}

/// Selection scheme; fitness-proportional matches the replication model the
/// mutation control is calibrated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Selection {
    FitnessProportional,
    Tournament { k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CrossoverKind {
    OnePoint,
    Uniform,
}

/// Per-generation operator parameters.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GaParams {
    /// Per-bit mutation probability, in `[0, 1]`.  Overwritten every
    /// generation when a controller is active.
    pub mutation_prob: f64,
    /// Probability that a consecutive pair is recombined, in `[0, 1]`.
    pub crossover_rate: f64,
    pub selection: Selection,
    pub crossover: CrossoverKind,
    /// Relative tolerance for fitness equality; exact comparison for
    /// integer-valued landscapes falls out of it automatically.
    pub fitness_eps: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            mutation_prob: 0.0,
            crossover_rate: 0.7,
            selection: Selection::FitnessProportional,
            crossover: CrossoverKind::OnePoint,
            fitness_eps: 1e-9,
        }
    }
}

impl GaParams {
    pub fn validate(&self, population_size: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(Error::Config(alloc::format!(
                "mutation probability must be in [0, 1], got {}",
                self.mutation_prob
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::Config(alloc::format!(
                "crossover rate must be in [0, 1], got {}",
                self.crossover_rate
            )));
        }
        if !(self.fitness_eps >= 0.0) || !self.fitness_eps.is_finite() {
            return Err(Error::Config(alloc::format!(
                "fitness tolerance must be finite and ≥ 0, got {}",
                self.fitness_eps
            )));
        }
        if let Selection::Tournament { k } = self.selection {
            if k < 2 || k > population_size {
                return Err(Error::Config(alloc::format!(
                    "tournament size must be in 2..={population_size}, got {k}"
                )));
            }
        }
        Ok(())
    }
}

/// Compares fitness values under the relative tolerance `eps`.
pub fn fitness_cmp(a: f64, b: f64, eps: f64) -> Ordering {
    use num_traits::Float;
    let scale = Float::max(Float::abs(a), Float::abs(b));
    if Float::abs(a - b) <= eps * scale {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Observables of one generation.
///
/// `alpha`/`beta` are the dichotomy bracket in effect while the generation
/// ran (both equal to `mutation_prob` for fixed-mutation runs); `actions` is
/// what the controller did after observing the generation; `best_*` reflect
/// the controller's view, so an elitist reintroduction is already applied.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub best_genotype: Genotype,
    pub mean_fitness: f64,
    pub mutation_prob: f64,
    pub alpha: f64,
    pub beta: f64,
    pub population_size: usize,
    pub diversity: f64,
    pub actions: Vec<ControlAction>,
}

/// Draws a new population of the same size.
///
/// Fitness-proportional selection draws members independently with
/// probability proportional to fitness; tournament selection takes the best
/// of `k` distinct uniform picks, so `k = m` tournaments always return the
/// population best.
pub fn select<R: Rng + ?Sized>(pop: &Population, params: &GaParams, rng: &mut R) -> Population {
    let m = pop.size();
    let members: Vec<Individual> = match params.selection {
        Selection::FitnessProportional => {
            let dist = WeightedIndex::new(pop.members().iter().map(|ind| ind.fitness))
                .expect("population fitness values are positive");
            (0..m)
                .map(|_| pop.members()[dist.sample(rng)].clone())
                .collect()
        }
        Selection::Tournament { k } => {
            debug_assert!(k >= 2 && k <= m);
            let mut indices: Vec<usize> = (0..m).collect();
            (0..m)
                .map(|_| {
                    // partial shuffle: the first k entries become the entrants
                    for j in 0..k {
                        indices.swap(j, rng.gen_range(j..m));
                    }
                    let winner = indices[..k]
                        .iter()
                        .copied()
                        .reduce(|best, cand| {
                            if pop.members()[cand].fitness > pop.members()[best].fitness {
                                cand
                            } else {
                                best
                            }
                        })
                        .expect("tournament size is at least 2");
                    pop.members()[winner].clone()
                })
                .collect()
        }
    };
    Population::from_vec(members, pop.n())
}

/// Flips each bit of each member independently with probability
/// `mutation_prob` and refreshes the fitness caches.
pub fn mutate<R: Rng + ?Sized>(
    pop: &Population,
    mutation_prob: f64,
    landscape: &FitnessLandscape,
    rng: &mut R,
) -> Population {
    debug_assert!((0.0..=1.0).contains(&mutation_prob));
    let mut members = pop.members().to_vec();
    for ind in &mut members {
        let mut changed = false;
        for i in 0..ind.genotype.len() {
            if rng.gen_bool(mutation_prob) {
                ind.genotype.flip_bit(i);
                changed = true;
            }
        }
        if changed {
            ind.fitness = landscape
                .evaluate(&ind.genotype)
                .expect("population genotypes match the landscape");
        }
    }
    Population::from_vec(members, pop.n())
}

pub(crate) fn one_point_recombine(a: Genotype, b: Genotype, cut: usize) -> (Genotype, Genotype) {
    debug_assert!(cut >= 1 && cut < a.len());
    let n = a.len();
    let low = Genotype::word_mask(cut);
    (
        Genotype::from_bits(a.bits() & low | b.bits() & !low, n),
        Genotype::from_bits(b.bits() & low | a.bits() & !low, n),
    )
}

pub(crate) fn uniform_recombine(a: Genotype, b: Genotype, swap: u64) -> (Genotype, Genotype) {
    let n = a.len();
    (
        Genotype::from_bits(a.bits() & !swap | b.bits() & swap, n),
        Genotype::from_bits(b.bits() & !swap | a.bits() & swap, n),
    )
}

/// Recombines consecutive pairs `(0,1), (2,3), …` with probability
/// `crossover_rate`; the last member of an odd-size population is untouched.
///
/// One-point crossover picks a cut uniformly in `1..n` and swaps suffixes
/// (a no-op for n = 1); uniform crossover swaps each position independently
/// with probability 1/2.
pub fn crossover<R: Rng + ?Sized>(
    pop: &Population,
    params: &GaParams,
    landscape: &FitnessLandscape,
    rng: &mut R,
) -> Population {
    let n = pop.n();
    let mut members = pop.members().to_vec();
    let pairs = members.len() / 2;
    for p in 0..pairs {
        if !rng.gen_bool(params.crossover_rate) {
            continue;
        }
        let (i, j) = (2 * p, 2 * p + 1);
        let (a, b) = (members[i].genotype, members[j].genotype);
        let (ca, cb) = match params.crossover {
            CrossoverKind::OnePoint => {
                if n < 2 {
                    (a, b)
                } else {
                    one_point_recombine(a, b, rng.gen_range(1..n))
                }
            }
            CrossoverKind::Uniform => {
                uniform_recombine(a, b, rng.gen::<u64>() & Genotype::word_mask(n))
            }
        };
        for (idx, child) in [(i, ca), (j, cb)] {
            if child != members[idx].genotype {
                members[idx] = Individual {
                    genotype: child,
                    fitness: landscape
                        .evaluate(&child)
                        .expect("population genotypes match the landscape"),
                };
            }
        }
    }
    Population::from_vec(members, pop.n())
}

/// Applies selection, mutation and crossover in that order and fills the
/// per-generation record.
///
/// The record's bracket fields default to `mutation_prob` and its action
/// list is empty; the run loop overwrites them when a controller is active.
pub fn generation_step<R: Rng + ?Sized>(
    pop: &Population,
    params: &GaParams,
    landscape: &FitnessLandscape,
    generation: usize,
    rng: &mut R,
) -> (Population, GenerationRecord) {
    let selected = select(pop, params, rng);
    let mutated = mutate(&selected, params.mutation_prob, landscape, rng);
    let crossed = crossover(&mutated, params, landscape, rng);
    let best = crossed.best();
    let record = GenerationRecord {
        generation,
        best_fitness: best.fitness,
        best_genotype: best.genotype,
        mean_fitness: crossed.mean_fitness(),
        mutation_prob: params.mutation_prob,
        alpha: params.mutation_prob,
        beta: params.mutation_prob,
        population_size: crossed.size(),
        diversity: crossed.diversity(),
        actions: Vec::new(),
    };
    (crossed, record)
}
