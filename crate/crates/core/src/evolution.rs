//! Genetic optimization of force weights over plans generated in prior
//! mode, with a three-part evaluator (length, safety, smoothness).
//!
//! Each individual pairs a weight chromosome with a prior path drawn from
//! the bank; its plan is scored by min-max-normalized objective sums, with
//! crowding distance as a diversity tiebreaker and elitism for monotone
//! convergence. Cross-generation comparisons use a frozen reference
//! normalization captured from the first generation that produced a
//! feasible plan, so the elitism guarantee is exactly assertable.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::bank::{BankEntry, PathBank, DEFAULT_BANK_CAPACITY};
use crate::field::{generate_plan, FieldConfig, ForceWeights, Plan, PlannerMode, State};
use crate::geometry::{Point2, PriorPath, SamplingRegion, World};
use crate::rrt::{rrt_plan, simplify_path, RrtConfig};

/// Lower clamp for every gene; keeps weights strictly positive.
pub const GENE_FLOOR: f64 = 1e-6;
/// Gene initialization is log-uniform on [GENE_INIT_LO, GENE_INIT_HI].
pub const GENE_INIT_LO: f64 = 0.01;
pub const GENE_INIT_HI: f64 = 10.0;
/// Base cost assigned to plans that did not reach the goal; the final
/// distance to the goal is added so infeasible plans still order usefully.
pub const INFEASIBLE_PENALTY: f64 = 1e9;
/// Softening term in the safety objective denominator, in meters.
pub const SAFETY_EPSILON: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error("chromosomes have different gene counts: {0} vs {1}")]
    GeneCountMismatch(usize, usize),
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error("optimize requires collision-free start and goal")]
    EndpointInCollision,
}

/// GA settings. `pop_size`, `pc` and `pm` defaults follow the benchmark
/// configuration; the rest are artifact knobs.
#[derive(Debug, Clone)]
pub struct GaConfig {
    pub pop_size: usize,
    /// Crossover probability.
    pub pc: f64,
    /// Per-gene mutation probability.
    pub pm: f64,
    pub elite_count: usize,
    /// Mutation standard deviation, relative to the gene value.
    pub sigma_rel: f64,
    pub generations: usize,
    /// Upper gene bound.
    pub w_max: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            pop_size: 200,
            pc: 0.75,
            pm: 0.15,
            elite_count: 2,
            sigma_rel: 0.1,
            generations: 30,
            w_max: 100.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), EvolutionError> {
        if self.pop_size == 0 || self.pop_size % 2 != 0 {
            return Err(EvolutionError::InvalidConfig(format!(
                "pop_size must be positive and even, got {}",
                self.pop_size
            )));
        }
        if self.pop_size < 2 * self.elite_count {
            return Err(EvolutionError::InvalidConfig(format!(
                "pop_size {} must be at least twice elite_count {}",
                self.pop_size, self.elite_count
            )));
        }
        for (name, p) in [("pc", self.pc), ("pm", self.pm)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(EvolutionError::InvalidConfig(format!(
                    "{name} must be in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// The evolved vector: one repulsive weight per obstacle, then the
/// directive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    pub genes: Vec<f64>,
}

impl Chromosome {
    /// Log-uniform initialization over [GENE_INIT_LO, GENE_INIT_HI].
    pub fn random(gene_count: usize, rng: &mut ChaCha8Rng) -> Self {
        let log_lo = GENE_INIT_LO.ln();
        let log_hi = GENE_INIT_HI.ln();
        let genes = (0..gene_count)
            .map(|_| rng.gen_range(log_lo..log_hi).exp())
            .collect();
        Self { genes }
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Interpret the genes as field weights for prior-mode planning; the
    /// attractive weight is not part of the chromosome.
    pub fn to_weights(&self) -> ForceWeights {
        let m = self.genes.len() - 1;
        ForceWeights::new(0.0, self.genes[..m].to_vec(), self.genes[m])
    }

    pub fn in_bounds(&self, w_max: f64) -> bool {
        self.genes.iter().all(|g| *g >= GENE_FLOOR && *g <= w_max)
    }
}

/// Per-plan raw objective values; all non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveTriple {
    pub path_len: f64,
    pub safety_cost: f64,
    pub smoothness_cost: f64,
}

impl ObjectiveTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.path_len, self.safety_cost, self.smoothness_cost]
    }
}

/// Total traveled distance of the plan.
pub fn objective_length(plan: &Plan) -> f64 {
    plan.states
        .windows(2)
        .map(|w| w[0].position.distance(w[1].position))
        .sum()
}

/// Time-weighted inverse clearance: dt / (clearance + epsilon) summed over
/// every state. Hugging obstacles costs more than keeping distance.
pub fn objective_safety(plan: &Plan, world: &World) -> f64 {
    plan.states
        .iter()
        .map(|s| plan.dt / (world.clearance(s.position) + SAFETY_EPSILON))
        .sum()
}

/// Sum of squared heading changes between consecutive displacement
/// vectors; zero-displacement steps are skipped.
pub fn objective_smoothness(plan: &Plan) -> f64 {
    let mut headings = plan
        .states
        .windows(2)
        .filter_map(|w| (w[1].position - w[0].position).normalized())
        .map(|d| d.heading());
    let mut cost = 0.0;
    if let Some(mut prev) = headings.next() {
        for h in headings {
            let delta = crate::field::wrap_angle(h - prev);
            cost += delta * delta;
            prev = h;
        }
    }
    cost
}

pub fn plan_objectives(plan: &Plan, world: &World) -> ObjectiveTriple {
    ObjectiveTriple {
        path_len: objective_length(plan),
        safety_cost: objective_safety(plan, world),
        smoothness_cost: objective_smoothness(plan),
    }
}

/// Per-objective min/max over a reference population's feasible members;
/// the normalization frame for cost sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl ObjectiveBounds {
    /// Bounds over the feasible members only; `None` when there are none.
    pub fn from_feasible(objectives: &[ObjectiveTriple], feasible: &[bool]) -> Option<Self> {
        let mut min = [f64::INFINITY; 3];
        let mut max = [f64::NEG_INFINITY; 3];
        let mut any = false;
        for (obj, feas) in objectives.iter().zip(feasible) {
            if !feas {
                continue;
            }
            any = true;
            for (k, v) in obj.as_array().into_iter().enumerate() {
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        any.then_some(Self { min, max })
    }

    /// Sum of min-max normalized objectives; a degenerate spread
    /// contributes zero. Values outside the reference range may normalize
    /// outside [0, 1], which keeps the ordering consistent across
    /// generations.
    pub fn normalized_sum(&self, obj: &ObjectiveTriple) -> f64 {
        obj.as_array()
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                let spread = self.max[k] - self.min[k];
                if spread > 0.0 {
                    (v - self.min[k]) / spread
                } else {
                    0.0
                }
            })
            .sum()
    }
}

fn penalty(goal_dist: f64) -> f64 {
    INFEASIBLE_PENALTY + goal_dist
}

/// Scalar costs against a given normalization frame: feasible members get
/// the normalized objective sum, infeasible ones the penalty.
pub fn costs_against(
    objectives: &[ObjectiveTriple],
    feasible: &[bool],
    goal_dists: &[f64],
    bounds: Option<&ObjectiveBounds>,
) -> Vec<f64> {
    objectives
        .iter()
        .zip(feasible)
        .zip(goal_dists)
        .map(|((obj, feas), dist)| {
            if *feas {
                bounds.map_or(0.0, |b| b.normalized_sum(obj))
            } else {
                penalty(*dist)
            }
        })
        .collect()
}

/// Scalar costs normalized over the current population's feasible members.
pub fn scalar_costs(
    objectives: &[ObjectiveTriple],
    feasible: &[bool],
    goal_dists: &[f64],
) -> Vec<f64> {
    let bounds = ObjectiveBounds::from_feasible(objectives, feasible);
    costs_against(objectives, feasible, goal_dists, bounds.as_ref())
}

/// Standard crowding distances: per objective, boundary members get
/// infinity and interior members accumulate the normalized span of their
/// neighbors. Objectives with no spread are skipped; populations of one or
/// two are entirely boundary.
pub fn crowding_distance(objectives: &[ObjectiveTriple]) -> Vec<f64> {
    let n = objectives.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut crowding = vec![0.0; n];
    for k in 0..3 {
        let values: Vec<f64> = objectives.iter().map(|o| o.as_array()[k]).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
        let spread = values[order[n - 1]] - values[order[0]];
        if spread <= 0.0 {
            continue;
        }
        crowding[order[0]] = f64::INFINITY;
        crowding[order[n - 1]] = f64::INFINITY;
        for w in 1..n - 1 {
            let i = order[w];
            if crowding[i].is_finite() {
                crowding[i] += (values[order[w + 1]] - values[order[w - 1]]) / spread;
            }
        }
    }
    crowding
}

/// Gene-wise fair-coin exchange producing complementary children.
pub fn uniform_crossover(
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut ChaCha8Rng,
) -> Result<(Chromosome, Chromosome), EvolutionError> {
    if a.len() != b.len() {
        return Err(EvolutionError::GeneCountMismatch(a.len(), b.len()));
    }
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    for (&ga, &gb) in a.genes.iter().zip(&b.genes) {
        if rng.gen_bool(0.5) {
            c1.push(ga);
            c2.push(gb);
        } else {
            c1.push(gb);
            c2.push(ga);
        }
    }
    Ok((Chromosome { genes: c1 }, Chromosome { genes: c2 }))
}

/// Perturb each gene with probability `pm` by a zero-mean Gaussian whose
/// standard deviation is `sigma_rel` times the gene, clamping into bounds.
pub fn gaussian_mutate(c: &Chromosome, cfg: &GaConfig, rng: &mut ChaCha8Rng) -> Chromosome {
    let genes = c
        .genes
        .iter()
        .map(|&g| {
            if cfg.pm > 0.0 && rng.gen_bool(cfg.pm) {
                let noise = Normal::new(0.0, cfg.sigma_rel * g)
                    .expect("positive standard deviation")
                    .sample(rng);
                (g + noise).clamp(GENE_FLOOR, cfg.w_max)
            } else {
                g
            }
        })
        .collect();
    Chromosome { genes }
}

/// One evaluated member of the population.
#[derive(Debug, Clone)]
pub struct Individual {
    pub chromosome: Chromosome,
    pub prior: BankEntry,
    pub plan: Plan,
    pub objectives: ObjectiveTriple,
    pub goal_dist: f64,
    /// Cost normalized over the current population.
    pub scalar_cost: f64,
    /// Cost against the frozen reference normalization.
    pub frozen_cost: f64,
    pub crowding: f64,
}

impl Individual {
    pub fn feasible(&self) -> bool {
        self.plan.reached()
    }
}

/// Plan and score one chromosome/prior-path pairing. Population-relative
/// fields are filled by `rank_population`.
pub fn evaluate_individual(
    chromosome: Chromosome,
    prior: BankEntry,
    world: &World,
    start: Point2,
    goal: Point2,
    field_cfg: &FieldConfig,
) -> Individual {
    debug_assert_eq!(chromosome.len(), world.obstacle_count() + 1);
    let weights = chromosome.to_weights();
    let plan = generate_plan(
        State::at(start),
        goal,
        world,
        Some(&prior.path),
        &weights,
        field_cfg,
    )
    .expect("optimize validates the start state and weight count");
    let objectives = plan_objectives(&plan, world);
    let goal_dist = plan.final_goal_distance(goal);
    Individual {
        chromosome,
        prior,
        plan,
        objectives,
        goal_dist,
        scalar_cost: 0.0,
        frozen_cost: 0.0,
        crowding: 0.0,
    }
}

/// Fill scalar costs (current-population normalization), frozen costs, and
/// crowding distances.
pub fn rank_population(pop: &mut [Individual], frozen: Option<&ObjectiveBounds>) {
    let objectives: Vec<ObjectiveTriple> = pop.iter().map(|i| i.objectives).collect();
    let feasible: Vec<bool> = pop.iter().map(|i| i.feasible()).collect();
    let goal_dists: Vec<f64> = pop.iter().map(|i| i.goal_dist).collect();
    let scalar = scalar_costs(&objectives, &feasible, &goal_dists);
    let frozen_costs = costs_against(&objectives, &feasible, &goal_dists, frozen);
    let crowding = crowding_distance(&objectives);
    for (i, ind) in pop.iter_mut().enumerate() {
        ind.scalar_cost = scalar[i];
        ind.frozen_cost = frozen_costs[i];
        ind.crowding = crowding[i];
    }
}

/// Binary tournament: lower scalar cost wins, ties prefer larger crowding,
/// remaining ties flip a coin.
fn tournament(pop: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let a = rng.gen_range(0..pop.len());
    let b = rng.gen_range(0..pop.len());
    if pop[a].scalar_cost != pop[b].scalar_cost {
        if pop[a].scalar_cost < pop[b].scalar_cost {
            a
        } else {
            b
        }
    } else if pop[a].crowding != pop[b].crowding {
        if pop[a].crowding > pop[b].crowding {
            a
        } else {
            b
        }
    } else if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Indices of the `count` lowest-cost members under the frozen frame when
/// available (so elite survival keeps the frozen best-cost monotone),
/// otherwise under the population frame.
fn elite_indices(pop: &[Individual], count: usize, frozen_available: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pop.len()).collect();
    order.sort_by(|&a, &b| {
        let (ka, kb) = if frozen_available {
            (pop[a].frozen_cost, pop[b].frozen_cost)
        } else {
            (pop[a].scalar_cost, pop[b].scalar_cost)
        };
        ka.total_cmp(&kb).then(a.cmp(&b))
    });
    order.truncate(count.min(pop.len()));
    order
}

/// Breed the next population: elites pass through unchanged, the rest come
/// from tournament selection, probabilistic uniform crossover, Gaussian
/// mutation, and a fresh roulette prior-path draw per offspring.
#[allow(clippy::too_many_arguments)]
pub fn evolve_generation(
    pop: &[Individual],
    bank: &PathBank,
    world: &World,
    start: Point2,
    goal: Point2,
    field_cfg: &FieldConfig,
    ga: &GaConfig,
    frozen: Option<&ObjectiveBounds>,
    rng: &mut ChaCha8Rng,
) -> Vec<Individual> {
    let pop_size = pop.len();
    let elite_count = ga.elite_count.min(pop_size);
    let mut next: Vec<Individual> = elite_indices(pop, elite_count, frozen.is_some())
        .into_iter()
        .map(|i| pop[i].clone())
        .collect();

    while next.len() < pop_size {
        let p1 = &pop[tournament(pop, rng)];
        let p2 = &pop[tournament(pop, rng)];
        let (c1, c2) = if rng.gen_bool(ga.pc) {
            uniform_crossover(&p1.chromosome, &p2.chromosome, rng)
                .expect("population chromosomes share one gene count")
        } else {
            (p1.chromosome.clone(), p2.chromosome.clone())
        };
        for chromosome in [c1, c2] {
            if next.len() == pop_size {
                break;
            }
            let mutated = gaussian_mutate(&chromosome, ga, rng);
            let prior = bank.select_roulette(rng).clone();
            next.push(evaluate_individual(mutated, prior, world, start, goal, field_cfg));
        }
    }
    rank_population(&mut next, frozen);
    next
}

/// Per-generation convergence record. `best_cost` and `mean_cost` use the
/// frozen reference normalization; `mean_cost` covers feasible members only
/// and is NaN when there are none.
#[derive(Debug, Clone, Copy)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_cost: f64,
    pub mean_cost: f64,
    pub feasible_count: usize,
}

pub fn history_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,best_cost,mean_cost,feasible_count\n");
    for s in history {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.generation, s.best_cost, s.mean_cost, s.feasible_count
        ));
    }
    out
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub best_plan: Plan,
    pub best_weights: ForceWeights,
    pub best_prior: PriorPath,
    /// Frozen-frame cost of the best individual.
    pub best_cost: f64,
    /// False when no plan reached the goal within budget; the plan is then
    /// the best attempt.
    pub feasible: bool,
    pub history: Vec<GenerationStats>,
    /// The frozen normalization frame, for scoring external plans in the
    /// same currency.
    pub reference_bounds: Option<ObjectiveBounds>,
}

fn stats_for(pop: &[Individual], generation: usize) -> GenerationStats {
    let best_cost = pop
        .iter()
        .map(|i| i.frozen_cost)
        .fold(f64::INFINITY, f64::min);
    let feasible: Vec<f64> = pop
        .iter()
        .filter(|i| i.feasible())
        .map(|i| i.frozen_cost)
        .collect();
    let mean_cost = if feasible.is_empty() {
        f64::NAN
    } else {
        feasible.iter().sum::<f64>() / feasible.len() as f64
    };
    GenerationStats {
        generation,
        best_cost,
        mean_cost,
        feasible_count: feasible.len(),
    }
}

/// The full optimization loop: a path generator fills the bank (shrinking
/// its sampling region after every success) while the GA evolves weight
/// vectors over roulette-drawn prior paths; the best plan so far is always
/// available.
pub fn optimize(
    world: &World,
    start: Point2,
    goal: Point2,
    field_cfg: &FieldConfig,
    ga: &GaConfig,
    rrt_cfg: &RrtConfig,
) -> Result<OptimizeResult, EvolutionError> {
    ga.validate()?;
    let field_cfg = FieldConfig { mode: PlannerMode::Prior, ..field_cfg.clone() };
    if !world.point_collision_free(start, field_cfg.inflation)
        || !world.point_collision_free(goal, field_cfg.inflation)
    {
        return Err(EvolutionError::EndpointInCollision);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed);
    let mut bank =
        PathBank::new(start, goal, DEFAULT_BANK_CAPACITY).expect("validated endpoints");
    let mut region = SamplingRegion::from_bounds(world.bounds);
    let gene_count = world.obstacle_count() + 1;

    let produce = |bank: &mut PathBank, region: &mut SamplingRegion, rng: &mut ChaCha8Rng| {
        if let Ok(result) = rrt_plan(start, goal, world, region, rrt_cfg, rng) {
            if let Some(raw) = result.path {
                let simplified = simplify_path(&raw, world, rrt_cfg.inflation);
                *region = region
                    .shrunk(start, goal, simplified.total_length())
                    .expect("path length bounds the focal sum");
                let _ = bank.insert(simplified, world, rrt_cfg.inflation);
            }
        }
    };

    produce(&mut bank, &mut region, &mut rng);
    let mut pop: Vec<Individual> = (0..ga.pop_size)
        .map(|_| {
            let chromosome = Chromosome::random(gene_count, &mut rng);
            let prior = bank.select_roulette(&mut rng).clone();
            evaluate_individual(chromosome, prior, world, start, goal, &field_cfg)
        })
        .collect();

    let mut frozen = {
        let objectives: Vec<ObjectiveTriple> = pop.iter().map(|i| i.objectives).collect();
        let feasible: Vec<bool> = pop.iter().map(|i| i.feasible()).collect();
        ObjectiveBounds::from_feasible(&objectives, &feasible)
    };
    rank_population(&mut pop, frozen.as_ref());
    let mut history = vec![stats_for(&pop, 0)];

    for g in 1..=ga.generations {
        produce(&mut bank, &mut region, &mut rng);
        pop = evolve_generation(
            &pop, &bank, world, start, goal, &field_cfg, ga, frozen.as_ref(), &mut rng,
        );
        if frozen.is_none() {
            let objectives: Vec<ObjectiveTriple> = pop.iter().map(|i| i.objectives).collect();
            let feasible: Vec<bool> = pop.iter().map(|i| i.feasible()).collect();
            frozen = ObjectiveBounds::from_feasible(&objectives, &feasible);
            if frozen.is_some() {
                rank_population(&mut pop, frozen.as_ref());
            }
        }
        history.push(stats_for(&pop, g));
    }

    // Feasible members outrank infeasible ones by the penalty construction,
    // so the frozen-cost minimum is the right pick either way.
    let best = pop
        .iter()
        .min_by(|a, b| a.frozen_cost.total_cmp(&b.frozen_cost))
        .expect("population is non-empty");
    Ok(OptimizeResult {
        best_plan: best.plan.clone(),
        best_weights: best.chromosome.to_weights(),
        best_prior: best.prior.path.clone(),
        best_cost: best.frozen_cost,
        feasible: best.feasible(),
        history,
        reference_bounds: frozen,
    })
}
