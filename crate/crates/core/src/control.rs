//! Feedback control of the mutation probability and the population size.
//!
//! The controller compares the best fitness of consecutive generations and
//! steers the per-bit mutation probability toward the critical rate of the
//! current search neighborhood by bisecting a bracket `[alpha, beta]`:
//!
//! * best fitness unchanged — selection dominates, raise the midpoint
//!   (`alpha = p_m`);
//! * best fitness dropped — mutation dominates, lower it (`beta = p_m`);
//! * best fitness improved — new neighborhood, restart the bracket.
//!
//! Three controller variants are provided: the basic rule, an elitist variant
//! that reinstates the lost best individual whenever fitness drops, and an
//! elitist variant that additionally controls the population size, growing it
//! when the mutation bracket has converged without progress and collapsing it
//! to two copies of the best individual on every improvement.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use rand::Rng;

use crate::error::{Error, Result};
use crate::ga::{
    fitness_cmp, generation_step, GaParams, GenerationRecord, Individual, Population, RunRng,
};
use crate::genotype::Genotype;
use crate::landscape::FitnessLandscape;

/// The bisection bracket around the conjectured critical mutation
/// probability.
///
/// Invariants: `alpha ≤ p_m ≤ beta ≤ beta_init`, `p_m` is the bracket
/// midpoint after every update, and the width halves (to within one ulp of
/// the endpoint scale) on every increase or decrease.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DichotomyState {
    alpha: f64,
    beta: f64,
    p_m: f64,
    beta_init: f64,
}

impl DichotomyState {
    /// Fresh bracket from the fitness-ratio bound `c`: `alpha = 0`,
    /// `beta = ln(c)/n` (clamped to 1, since it is a probability),
    /// `p_m = beta/2`.
    pub fn init(c: f64, n: usize) -> Result<Self> {
        if !(c > 1.0) || !c.is_finite() {
            return Err(Error::Config(format!(
                "fitness ratio bound must be finite and > 1, got {c}"
            )));
        }
        if n == 0 {
            return Err(Error::Config("genotype length must be ≥ 1".to_string()));
        }
        let beta_init = Float::min(Float::ln(c) / n as f64, 1.0);
        Ok(Self::from_beta_init(beta_init).expect("ln(c)/n is positive for c > 1"))
    }

    /// Fresh bracket with an explicit initial upper bound.
    pub fn from_beta_init(beta_init: f64) -> Result<Self> {
        if !(beta_init > 0.0 && beta_init <= 1.0) {
            return Err(Error::Config(format!(
                "initial mutation bound must be in (0, 1], got {beta_init}"
            )));
        }
        Ok(DichotomyState {
            alpha: 0.0,
            beta: beta_init,
            p_m: beta_init / 2.0,
            beta_init,
        })
    }

    /// Raise the mutation probability: `alpha = p_m`, midpoint recomputed.
    pub fn increase(&self) -> Self {
        let alpha = self.p_m;
        DichotomyState {
            alpha,
            beta: self.beta,
            p_m: (alpha + self.beta) / 2.0,
            beta_init: self.beta_init,
        }
    }

    /// Lower the mutation probability: `beta = p_m`, midpoint recomputed.
    pub fn decrease(&self) -> Self {
        let beta = self.p_m;
        DichotomyState {
            alpha: self.alpha,
            beta,
            p_m: (self.alpha + beta) / 2.0,
            beta_init: self.beta_init,
        }
    }

    /// Fresh bracket with the original upper bound.
    pub fn reinit(&self) -> Self {
        Self::from_beta_init(self.beta_init).expect("stored beta_init is valid")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mutation_prob(&self) -> f64 {
        self.p_m
    }

    pub fn beta_init(&self) -> f64 {
        self.beta_init
    }

    pub fn width(&self) -> f64 {
        self.beta - self.alpha
    }

    /// True once the bracket width has dropped strictly below the
    /// convergence threshold.
    pub fn has_converged(&self, policy: &SizePolicy) -> bool {
        self.width() < policy.convergence_eps(self.beta_init)
    }
}

/// Convergence threshold for the mutation bracket.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ConvergenceEps {
    /// Threshold scales with the initial bracket: `eps = fraction × beta_init`.
    FractionOfBetaInit(f64),
    /// Fixed absolute threshold.
    Absolute(f64),
}

/// Population-size control policy.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SizePolicy {
    /// Multiplier applied when the population grows.
    pub growth_factor: f64,
    /// Hard cap on the population size.
    pub max_size: usize,
    /// When `beta − alpha` drops below this, the mutation search has
    /// converged without progress and the population grows.
    pub eps: ConvergenceEps,
}

impl Default for SizePolicy {
    fn default() -> Self {
        SizePolicy {
            growth_factor: 2.0,
            max_size: 4096,
            eps: ConvergenceEps::FractionOfBetaInit(1.0 / 64.0),
        }
    }
}

impl SizePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.growth_factor > 1.0) || !self.growth_factor.is_finite() {
            return Err(Error::Config(format!(
                "growth factor must be finite and > 1, got {}",
                self.growth_factor
            )));
        }
        if self.max_size < 2 {
            return Err(Error::Config(format!(
                "maximum population size must be ≥ 2, got {}",
                self.max_size
            )));
        }
        let eps = match self.eps {
            ConvergenceEps::FractionOfBetaInit(f) => f,
            ConvergenceEps::Absolute(a) => a,
        };
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::Config(format!(
                "convergence threshold must be finite and > 0, got {eps}"
            )));
        }
        Ok(())
    }

    pub fn convergence_eps(&self, beta_init: f64) -> f64 {
        match self.eps {
            ConvergenceEps::FractionOfBetaInit(f) => f * beta_init,
            ConvergenceEps::Absolute(a) => a,
        }
    }

    /// Next population size after a growth step: `floor(m × growth_factor)`,
    /// at least `m + 1`, capped at `max_size`.
    pub fn grown_size(&self, m: usize) -> usize {
        let grown = (m as f64 * self.growth_factor).floor() as usize;
        grown.max(m + 1).min(self.max_size)
    }
}

/// Which controller drives a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ControllerKind {
    /// Mutation control only.
    Basic,
    /// Mutation control plus elitist reinstatement on fitness drops.
    Elitist,
    /// Elitist mutation control plus population-size control; the run
    /// starts from a population of two.
    ElitistWithSize,
}

/// Mutation control strategy for a run.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ControlStrategy {
    /// Constant mutation probability, no feedback.
    Fixed { mutation_prob: f64 },
    /// One of the feedback controllers.
    Adaptive(ControllerKind),
}

/// One primitive adjustment taken by a controller after observing a
/// generation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ControlAction {
    IncreaseMutation,
    DecreaseMutation,
    ReinitMutation,
    ReintroduceElite,
    GrowPopulation,
    ResetPopulationToTwo,
}

impl ControlAction {
    pub fn label(&self) -> &'static str {
        match self {
            ControlAction::IncreaseMutation => "increase_mutation",
            ControlAction::DecreaseMutation => "decrease_mutation",
            ControlAction::ReinitMutation => "reinit_mutation",
            ControlAction::ReintroduceElite => "reintroduce_elite",
            ControlAction::GrowPopulation => "grow_population",
            ControlAction::ResetPopulationToTwo => "reset_population_to_two",
        }
    }

    pub fn from_label(label: &str) -> Result<Self> {
        Ok(match label {
            "increase_mutation" => ControlAction::IncreaseMutation,
            "decrease_mutation" => ControlAction::DecreaseMutation,
            "reinit_mutation" => ControlAction::ReinitMutation,
            "reintroduce_elite" => ControlAction::ReintroduceElite,
            "grow_population" => ControlAction::GrowPopulation,
            "reset_population_to_two" => ControlAction::ResetPopulationToTwo,
            other => return Err(Error::Config(format!("unknown control action {other:?}"))),
        })
    }
}

impl core::fmt::Display for ControlAction {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Joins an action list into the serialized form, `"none"` when empty.
pub fn actions_label(actions: &[ControlAction]) -> String {
    if actions.is_empty() {
        return "none".to_string();
    }
    let mut out = String::new();
    for (i, a) in actions.iter().enumerate() {
        if i > 0 {
            out.push('+');
        }
        out.push_str(a.label());
    }
    out
}

/// Inverse of [`actions_label`].
pub fn parse_actions_label(label: &str) -> Result<Vec<ControlAction>> {
    if label == "none" {
        return Ok(Vec::new());
    }
    label.split('+').map(ControlAction::from_label).collect()
}

/// What a controller did with one generation's observation.
#[derive(Clone, Debug)]
pub struct ControllerOutcome {
    pub state: DichotomyState,
    /// The effective best individual after the step; equals the reinstated
    /// previous best when elitism fired.
    pub best: Individual,
    pub actions: Vec<ControlAction>,
}

/// Applies one controller decision.
///
/// `prev_best` is the best individual of the previous generation and
/// `new_best` the one just found; `pop` is modified in place by elitist
/// reinstatement and by the size-control branches.
///
/// The size controller checks its branches in this order: fitness improved,
/// mutation bracket converged, fitness unchanged, fitness dropped.  The
/// convergence branch keeps the elitist guarantee: if fitness dropped on the
/// same observation, the previous best is reinstated as part of the branch.
#[allow(clippy::too_many_arguments)]
pub fn controller_step<R: Rng + ?Sized>(
    kind: ControllerKind,
    prev_best: &Individual,
    new_best: &Individual,
    state: &DichotomyState,
    pop: &mut Population,
    policy: &SizePolicy,
    landscape: &FitnessLandscape,
    fitness_eps: f64,
    rng: &mut R,
) -> ControllerOutcome {
    use core::cmp::Ordering::*;

    // how the new best compares to the previous one
    let change = fitness_cmp(new_best.fitness, prev_best.fitness, fitness_eps);

    let reinstate = |pop: &mut Population| {
        let worst = pop.worst_index();
        pop.replace_member(worst, prev_best.clone());
    };

    match kind {
        ControllerKind::Basic => match change {
            Equal => ControllerOutcome {
                state: state.increase(),
                best: new_best.clone(),
                actions: vec![ControlAction::IncreaseMutation],
            },
            Less => ControllerOutcome {
                state: state.decrease(),
                best: new_best.clone(),
                actions: vec![ControlAction::DecreaseMutation],
            },
            Greater => ControllerOutcome {
                state: state.reinit(),
                best: new_best.clone(),
                actions: vec![ControlAction::ReinitMutation],
            },
        },
        ControllerKind::Elitist => match change {
            Equal => ControllerOutcome {
                state: state.increase(),
                best: new_best.clone(),
                actions: vec![ControlAction::IncreaseMutation],
            },
            Less => {
                reinstate(pop);
                ControllerOutcome {
                    state: state.decrease(),
                    best: prev_best.clone(),
                    actions: vec![
                        ControlAction::DecreaseMutation,
                        ControlAction::ReintroduceElite,
                    ],
                }
            }
            Greater => ControllerOutcome {
                state: state.reinit(),
                best: new_best.clone(),
                actions: vec![ControlAction::ReinitMutation],
            },
        },
        ControllerKind::ElitistWithSize => {
            if change == Greater {
                // new neighborhood: restart both controls from scratch
                let member = new_best.clone();
                *pop = Population::from_vec(vec![member.clone(), member], pop.n());
                return ControllerOutcome {
                    state: state.reinit(),
                    best: new_best.clone(),
                    actions: vec![
                        ControlAction::ReinitMutation,
                        ControlAction::ResetPopulationToTwo,
                    ],
                };
            }
            if state.has_converged(policy) {
                let target = policy.grown_size(pop.size());
                let mut members = pop.members().to_vec();
                while members.len() < target {
                    let genotype = Genotype::random(landscape.n(), rng);
                    let fitness = landscape
                        .evaluate(&genotype)
                        .expect("genotype built for this landscape");
                    members.push(Individual { genotype, fitness });
                }
                *pop = Population::from_vec(members, pop.n());
                let mut actions = vec![ControlAction::GrowPopulation, ControlAction::ReinitMutation];
                let best = if change == Less {
                    reinstate(pop);
                    actions.push(ControlAction::ReintroduceElite);
                    prev_best.clone()
                } else {
                    new_best.clone()
                };
                return ControllerOutcome {
                    state: state.reinit(),
                    best,
                    actions,
                };
            }
            match change {
                Equal => ControllerOutcome {
                    state: state.increase(),
                    best: new_best.clone(),
                    actions: vec![ControlAction::IncreaseMutation],
                },
                _ => {
                    reinstate(pop);
                    ControllerOutcome {
                        state: state.decrease(),
                        best: prev_best.clone(),
                        actions: vec![
                            ControlAction::DecreaseMutation,
                            ControlAction::ReintroduceElite,
                        ],
                    }
                }
            }
        }
    }
}

/// Why a run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Termination {
    /// The master genotype was found and `stop_on_optimum` was set.
    Optimum,
    /// The generation budget was exhausted.
    Budget,
}

impl Termination {
    pub fn label(&self) -> &'static str {
        match self {
            Termination::Optimum => "optimum",
            Termination::Budget => "budget",
        }
    }
}

/// Configuration of a single controlled (or fixed-mutation) run.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub strategy: ControlStrategy,
    pub params: GaParams,
    pub policy: SizePolicy,
    /// Initial population size; the size controller ignores it and starts
    /// from two.
    pub population_size: usize,
    /// Maximum number of generations.
    pub budget: usize,
    /// Safety factor on the max/min fitness ratio used to initialize the
    /// mutation bracket.
    pub ratio_safety: f64,
    /// Place the master genotype into the initial population.
    pub seed_master: bool,
    /// Stop as soon as the master genotype is the recorded best.
    pub stop_on_optimum: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            strategy: ControlStrategy::Adaptive(ControllerKind::Elitist),
            params: GaParams::default(),
            policy: SizePolicy::default(),
            population_size: 64,
            budget: 1000,
            ratio_safety: crate::landscape::DEFAULT_RATIO_SAFETY,
            seed_master: false,
            stop_on_optimum: true,
        }
    }
}

/// Everything a run produced.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// One record per executed generation.
    pub records: Vec<GenerationRecord>,
    pub termination: Termination,
    /// Generation at which the master genotype first became the recorded
    /// best; 0 means it was already in the initial population.
    pub first_hit: Option<usize>,
    /// Best individual at the end of the run (elitist view).
    pub final_best: Individual,
    pub final_mutation_prob: f64,
    pub final_population_size: usize,
}

impl RunResult {
    /// Cost model: one fitness evaluation per individual per generation.
    pub fn total_evaluations(&self) -> u64 {
        self.records.iter().map(|r| r.population_size as u64).sum()
    }
}

/// Runs the full loop: initialize, then repeat generation step plus
/// controller step until the budget is exhausted or the master genotype is
/// found (when `stop_on_optimum` is set).
pub fn run_ga(
    config: &RunConfig,
    landscape: &FitnessLandscape,
    rng: &mut RunRng,
) -> Result<RunResult> {
    if config.budget < 1 {
        return Err(Error::Config("budget must be ≥ 1".to_string()));
    }
    if !(config.ratio_safety >= 1.0) || !config.ratio_safety.is_finite() {
        return Err(Error::Config(format!(
            "ratio safety factor must be finite and ≥ 1, got {}",
            config.ratio_safety
        )));
    }
    let init_size = match config.strategy {
        ControlStrategy::Adaptive(ControllerKind::ElitistWithSize) => 2,
        _ => config.population_size,
    };
    if init_size < 2 {
        return Err(Error::Config(format!(
            "population size must be ≥ 2, got {init_size}"
        )));
    }
    config.params.validate(init_size)?;
    config.policy.validate()?;

    let mut params = config.params.clone();
    let mut state = match config.strategy {
        ControlStrategy::Fixed { mutation_prob } => {
            if !(0.0..=1.0).contains(&mutation_prob) {
                return Err(Error::Config(format!(
                    "fixed mutation probability must be in [0, 1], got {mutation_prob}"
                )));
            }
            params.mutation_prob = mutation_prob;
            None
        }
        ControlStrategy::Adaptive(_) => {
            let c = landscape.fitness_ratio_bound(config.ratio_safety)?;
            Some(DichotomyState::init(c, landscape.n())?)
        }
    };

    let mut pop = Population::random(init_size, landscape, rng)?;
    if config.seed_master {
        let genotype = landscape.master_genotype()?;
        let fitness = landscape.evaluate(&genotype)?;
        pop.replace_member(0, Individual { genotype, fitness });
    }
    let master = landscape.master_genotype().ok();

    let mut best = pop.best().clone();
    let mut first_hit = match &master {
        Some(mg) if best.genotype == *mg => Some(0),
        _ => None,
    };
    let mut records = Vec::new();
    let mut termination = Termination::Budget;

    if config.stop_on_optimum && first_hit.is_some() {
        termination = Termination::Optimum;
    } else {
        for generation in 1..=config.budget {
            if let Some(st) = &state {
                params.mutation_prob = st.mutation_prob();
            }
            let (next, mut record) = generation_step(&pop, &params, landscape, generation, rng);
            pop = next;
            let observed = pop.best().clone();
            match (&config.strategy, &mut state) {
                (ControlStrategy::Adaptive(kind), Some(st)) => {
                    record.alpha = st.alpha();
                    record.beta = st.beta();
                    let outcome = controller_step(
                        *kind,
                        &best,
                        &observed,
                        st,
                        &mut pop,
                        &config.policy,
                        landscape,
                        params.fitness_eps,
                        rng,
                    );
                    *st = outcome.state;
                    best = outcome.best;
                    record.actions = outcome.actions;
                }
                _ => best = observed,
            }
            record.best_fitness = best.fitness;
            record.best_genotype = best.genotype;
            records.push(record);

            if first_hit.is_none() {
                if let Some(mg) = &master {
                    if best.genotype == *mg {
                        first_hit = Some(generation);
                    }
                }
            }
            if config.stop_on_optimum && first_hit.is_some() {
                termination = Termination::Optimum;
                break;
            }
        }
    }

    Ok(RunResult {
        records,
        termination,
        first_hit,
        final_best: best,
        final_mutation_prob: state
            .as_ref()
            .map_or(params.mutation_prob, DichotomyState::mutation_prob),
        final_population_size: pop.size(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::replica_rng;

    fn ulp_diff(a: f64, b: f64) -> u64 {
        assert!(a >= 0.0 && b >= 0.0);
        a.to_bits().abs_diff(b.to_bits())
    }

    fn approx(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn init_matches_formula() {
        let s = DichotomyState::init((2.0f64).exp(), 10).unwrap();
        // exp/ln round-trips here, so compare loosely
        approx(s.alpha(), 0.0);
        approx(s.beta(), 0.2);
        approx(s.mutation_prob(), 0.1);

        let s = DichotomyState::init(core::f64::consts::E, 1).unwrap();
        approx(s.beta(), 1.0);
        approx(s.mutation_prob(), 0.5);

        // ln 8 = 3 ln 2 as an independent route
        let s = DichotomyState::init(8.0, 20).unwrap();
        assert!(ulp_diff(s.beta(), 3.0 * core::f64::consts::LN_2 / 20.0) <= 1);
        approx(s.mutation_prob(), 0.05198603854199589);
    }

    #[test]
    fn init_rejects_degenerate_bounds() {
        assert!(DichotomyState::init(1.0, 10).is_err());
        assert!(DichotomyState::init(0.5, 10).is_err());
        // probability cap for extreme ratios on short genotypes
        let s = DichotomyState::init(1e9, 2).unwrap();
        assert_eq!(s.beta(), 1.0);
    }

    #[test]
    fn increase_and_decrease_single_steps() {
        let s = DichotomyState::from_beta_init(0.2).unwrap();
        let up = s.increase();
        approx(up.alpha(), 0.1);
        approx(up.beta(), 0.2);
        approx(up.mutation_prob(), 0.15);

        let down = s.decrease();
        approx(down.alpha(), 0.0);
        approx(down.beta(), 0.1);
        approx(down.mutation_prob(), 0.05);

        let up_down = up.decrease();
        approx(up_down.alpha(), 0.1);
        approx(up_down.beta(), 0.15);
        approx(up_down.mutation_prob(), 0.125);
    }

    #[test]
    fn repeated_updates_match_closed_forms() {
        let b0 = 0.2;
        let mut up = DichotomyState::from_beta_init(b0).unwrap();
        let mut down = up;
        for k in 1..=10i32 {
            up = up.increase();
            down = down.decrease();
            let up_expected = b0 * (1.0 - 0.5f64.powi(k + 1));
            let down_expected = b0 * 0.5f64.powi(k + 1);
            assert!(
                ulp_diff(up.mutation_prob(), up_expected) <= 1,
                "increase k={k}: {} vs {up_expected}",
                up.mutation_prob()
            );
            assert!(
                ulp_diff(down.mutation_prob(), down_expected) <= 1,
                "decrease k={k}: {} vs {down_expected}",
                down.mutation_prob()
            );
        }
    }

    #[test]
    fn convergence_crossing() {
        let policy = SizePolicy::default(); // eps = beta_init / 64
        // pure decreases halve the width exactly: equality at 6 updates, strict at 7
        let mut s = DichotomyState::from_beta_init(0.2).unwrap();
        assert!(!s.has_converged(&policy));
        for _ in 0..6 {
            s = s.decrease();
        }
        assert_eq!(s.width(), 0.2 / 64.0);
        assert!(!s.has_converged(&policy));
        s = s.decrease();
        assert!(s.has_converged(&policy));

        // dyadic beta_init keeps every mix exact: all 64 six-step mixes stay
        // unconverged, all 128 seven-step mixes converge
        for (k, expect) in [(6usize, false), (7usize, true)] {
            for mix in 0u32..(1 << k) {
                let mut s = DichotomyState::from_beta_init(0.25).unwrap();
                for step in 0..k {
                    s = if mix >> step & 1 == 1 { s.increase() } else { s.decrease() };
                }
                assert_eq!(s.has_converged(&policy), expect, "mix {mix:b} at {k} steps");
            }
        }

        // a threshold above beta_init converges immediately
        let wide = SizePolicy {
            eps: ConvergenceEps::Absolute(0.5),
            ..SizePolicy::default()
        };
        let fresh = DichotomyState::from_beta_init(0.2).unwrap();
        assert!(fresh.has_converged(&wide));
    }

    #[test]
    fn reinit_restores_the_initial_state() {
        let s = DichotomyState::from_beta_init(0.2).unwrap();
        let walked = s.increase().decrease().increase().increase();
        assert_eq!(walked.reinit(), s);
    }

    fn individual(landscape: &FitnessLandscape, bits: &str) -> Individual {
        let genotype = Genotype::from_bitstring(bits).unwrap();
        let fitness = landscape.evaluate(&genotype).unwrap();
        Individual { genotype, fitness }
    }

    #[test]
    fn basic_controller_branches() {
        let landscape = FitnessLandscape::sharp_peak(4, 4.0).unwrap();
        let mut rng = replica_rng(0, 0);
        let mut pop = Population::random(4, &landscape, &mut rng).unwrap();
        let policy = SizePolicy::default();
        let state = DichotomyState::from_beta_init(0.2).unwrap();
        let low = individual(&landscape, "0000");
        let high = individual(&landscape, "1111");

        let out = controller_step(
            ControllerKind::Basic, &low, &low, &state, &mut pop, &policy, &landscape, 1e-9,
            &mut rng,
        );
        assert_eq!(out.actions, vec![ControlAction::IncreaseMutation]);
        approx(out.state.alpha(), 0.1);
        approx(out.state.mutation_prob(), 0.15);

        let out = controller_step(
            ControllerKind::Basic, &high, &low, &state, &mut pop, &policy, &landscape, 1e-9,
            &mut rng,
        );
        assert_eq!(out.actions, vec![ControlAction::DecreaseMutation]);
        assert_eq!(out.best.fitness, 1.0); // no elitism

        let out = controller_step(
            ControllerKind::Basic, &low, &high, &state, &mut pop, &policy, &landscape, 1e-9,
            &mut rng,
        );
        assert_eq!(out.actions, vec![ControlAction::ReinitMutation]);
        assert_eq!(out.state, state);
    }

    #[test]
    fn elitist_controller_reinstates_on_drop() {
        let landscape = FitnessLandscape::sharp_peak(4, 4.0).unwrap();
        let mut rng = replica_rng(1, 0);
        let mut pop = Population::random(4, &landscape, &mut rng).unwrap();
        let policy = SizePolicy::default();
        let state = DichotomyState::from_beta_init(0.2).unwrap();
        let prev = individual(&landscape, "1111"); // fitness 4
        let new = individual(&landscape, "0000"); // fitness 1

        let out = controller_step(
            ControllerKind::Elitist, &prev, &new, &state, &mut pop, &policy, &landscape, 1e-9,
            &mut rng,
        );
        assert_eq!(
            out.actions,
            vec![ControlAction::DecreaseMutation, ControlAction::ReintroduceElite]
        );
        assert_eq!(out.best.fitness, 4.0);
        assert!(pop.members().iter().any(|m| m.genotype == prev.genotype));
        approx(out.state.beta(), 0.1);
    }

    #[test]
    fn size_controller_resets_population_on_improvement() {
        let landscape = FitnessLandscape::sharp_peak(4, 4.0).unwrap();
        let mut rng = replica_rng(2, 0);
        let mut pop = Population::random(4, &landscape, &mut rng).unwrap();
        let policy = SizePolicy::default();
        let state = DichotomyState::from_beta_init(0.2).unwrap()
            .increase()
            .decrease();
        let prev = individual(&landscape, "0000");
        let new = individual(&landscape, "1111");

        let out = controller_step(
            ControllerKind::ElitistWithSize, &prev, &new, &state, &mut pop, &policy,
            &landscape, 1e-9, &mut rng,
        );
        assert_eq!(
            out.actions,
            vec![ControlAction::ReinitMutation, ControlAction::ResetPopulationToTwo]
        );
        assert_eq!(pop.size(), 2);
        assert!(pop.members().iter().all(|m| m.genotype == new.genotype));
        assert_eq!(out.state, DichotomyState::from_beta_init(0.2).unwrap());
    }

    #[test]
    fn size_controller_grows_after_convergence() {
        let landscape = FitnessLandscape::sharp_peak(4, 4.0).unwrap();
        let mut rng = replica_rng(3, 0);
        let mut pop = Population::random(2, &landscape, &mut rng).unwrap();
        let policy = SizePolicy {
            max_size: 5,
            ..SizePolicy::default()
        };
        let mut state = DichotomyState::from_beta_init(0.25).unwrap();
        for _ in 0..7 {
            state = state.decrease();
        }
        assert!(state.has_converged(&policy));
        let probe = individual(&landscape, "0000");

        let out = controller_step(
            ControllerKind::ElitistWithSize, &probe, &probe, &state, &mut pop, &policy,
            &landscape, 1e-9, &mut rng,
        );
        assert_eq!(
            out.actions,
            vec![ControlAction::GrowPopulation, ControlAction::ReinitMutation]
        );
        assert_eq!(pop.size(), 4);
        assert_eq!(out.state, state.reinit());

        // growing again hits the cap
        let mut state = out.state;
        for _ in 0..7 {
            state = state.decrease();
        }
        let out = controller_step(
            ControllerKind::ElitistWithSize, &probe, &probe, &state, &mut pop, &policy,
            &landscape, 1e-9, &mut rng,
        );
        assert!(out.actions.contains(&ControlAction::GrowPopulation));
        assert_eq!(pop.size(), 5);
    }

    #[test]
    fn size_controller_keeps_elite_when_convergence_meets_a_drop() {
        let landscape = FitnessLandscape::sharp_peak(4, 4.0).unwrap();
        let mut rng = replica_rng(4, 0);
        let mut pop = Population::random(2, &landscape, &mut rng).unwrap();
        let policy = SizePolicy::default();
        let mut state = DichotomyState::from_beta_init(0.25).unwrap();
        for _ in 0..7 {
            state = state.increase();
        }
        let prev = individual(&landscape, "1111");
        let new = individual(&landscape, "0000");

        let out = controller_step(
            ControllerKind::ElitistWithSize, &prev, &new, &state, &mut pop, &policy,
            &landscape, 1e-9, &mut rng,
        );
        assert_eq!(
            out.actions,
            vec![
                ControlAction::GrowPopulation,
                ControlAction::ReinitMutation,
                ControlAction::ReintroduceElite
            ]
        );
        assert_eq!(out.best.fitness, 4.0);
        assert!(pop.members().iter().any(|m| m.genotype == prev.genotype));
    }

    fn flat_landscape(n: usize) -> FitnessLandscape {
        FitnessLandscape::custom(n, &[], 1.5).unwrap()
    }

    #[test]
    fn basic_on_flat_landscape_follows_the_increase_closed_form() {
        let landscape = flat_landscape(8);
        let config = RunConfig {
            strategy: ControlStrategy::Adaptive(ControllerKind::Basic),
            population_size: 6,
            budget: 12,
            stop_on_optimum: false,
            ..RunConfig::default()
        };
        let mut rng = replica_rng(10, 0);
        let result = run_ga(&config, &landscape, &mut rng).unwrap();
        assert_eq!(result.records.len(), 12);
        let b0 = landscape.fitness_ratio_bound(2.0).unwrap().ln() / 8.0;
        for (i, record) in result.records.iter().enumerate() {
            assert_eq!(record.actions, vec![ControlAction::IncreaseMutation]);
            let expected = b0 * (1.0 - 0.5f64.powi(i as i32 + 1));
            assert!(
                (record.mutation_prob - expected).abs() <= 1e-12,
                "generation {}: {} vs {expected}",
                record.generation,
                record.mutation_prob
            );
        }
    }

    #[test]
    fn size_controller_doubles_forever_on_flat_landscape_with_wide_eps() {
        let landscape = flat_landscape(6);
        let config = RunConfig {
            strategy: ControlStrategy::Adaptive(ControllerKind::ElitistWithSize),
            policy: SizePolicy {
                eps: ConvergenceEps::Absolute(1.0), // converged from the start
                max_size: 16,
                ..SizePolicy::default()
            },
            budget: 6,
            stop_on_optimum: false,
            ..RunConfig::default()
        };
        let mut rng = replica_rng(11, 0);
        let result = run_ga(&config, &landscape, &mut rng).unwrap();
        let sizes: Vec<usize> = result.records.iter().map(|r| r.population_size).collect();
        assert_eq!(sizes, vec![2, 4, 8, 16, 16, 16]);
    }

    #[test]
    fn elitist_best_fitness_is_monotone() {
        let landscape = FitnessLandscape::deceptive_trap(12, 4).unwrap();
        for kind in [ControllerKind::Elitist, ControllerKind::ElitistWithSize] {
            let config = RunConfig {
                strategy: ControlStrategy::Adaptive(kind),
                population_size: 8,
                budget: 300,
                stop_on_optimum: false,
                policy: SizePolicy {
                    max_size: 32,
                    ..SizePolicy::default()
                },
                ..RunConfig::default()
            };
            let mut rng = replica_rng(12, 0);
            let result = run_ga(&config, &landscape, &mut rng).unwrap();
            let mut last = f64::MIN;
            for record in &result.records {
                assert!(record.best_fitness >= last);
                last = record.best_fitness;
            }
        }
    }

    #[test]
    fn run_rejects_bad_budget() {
        let landscape = FitnessLandscape::sharp_peak(4, 2.0).unwrap();
        let config = RunConfig {
            budget: 0,
            ..RunConfig::default()
        };
        let mut rng = replica_rng(0, 0);
        assert!(matches!(
            run_ga(&config, &landscape, &mut rng),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn seeded_master_with_stop_terminates_immediately() {
        let landscape = FitnessLandscape::sharp_peak(16, 4.0).unwrap();
        let config = RunConfig {
            seed_master: true,
            stop_on_optimum: true,
            ..RunConfig::default()
        };
        let mut rng = replica_rng(13, 0);
        let result = run_ga(&config, &landscape, &mut rng).unwrap();
        assert_eq!(result.first_hit, Some(0));
        assert_eq!(result.termination, Termination::Optimum);
        assert!(result.records.is_empty());
        assert_eq!(result.total_evaluations(), 0);
    }

    #[test]
    fn fixed_runs_record_constant_bracket() {
        let landscape = FitnessLandscape::sharp_peak(8, 4.0).unwrap();
        let config = RunConfig {
            strategy: ControlStrategy::Fixed { mutation_prob: 0.03 },
            population_size: 4,
            budget: 5,
            stop_on_optimum: false,
            ..RunConfig::default()
        };
        let mut rng = replica_rng(14, 0);
        let result = run_ga(&config, &landscape, &mut rng).unwrap();
        for record in &result.records {
            assert_eq!(record.mutation_prob, 0.03);
            assert_eq!(record.alpha, 0.03);
            assert_eq!(record.beta, 0.03);
            assert!(record.actions.is_empty());
        }
    }

    #[test]
    fn action_labels_round_trip() {
        let all = [
            ControlAction::IncreaseMutation,
            ControlAction::DecreaseMutation,
            ControlAction::ReinitMutation,
            ControlAction::ReintroduceElite,
            ControlAction::GrowPopulation,
            ControlAction::ResetPopulationToTwo,
        ];
        assert_eq!(parse_actions_label(&actions_label(&all)).unwrap(), all);
        assert_eq!(parse_actions_label("none").unwrap(), Vec::new());
        assert!(parse_actions_label("bogus").is_err());
    }
}
