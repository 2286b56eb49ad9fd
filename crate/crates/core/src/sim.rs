//! Dynamic-obstacle simulation with reactive replanning, plus the two
//! benchmarks: replan latency against a from-scratch RRT, and tree node
//! counts under the shrinking sampling region.
//!
//! The loop is a single deterministic sequence: the robot follows the
//! active plan one state per tick, obstacle events invalidate the bank and
//! trigger a replan only when the remaining plan actually collides, and a
//! bounded producer keeps feeding the bank fresh paths while the robot
//! moves. Only the recorded wall-clock latencies vary between runs.

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bank::{BankError, PathBank, DEFAULT_BANK_CAPACITY};
use crate::evolution::{optimize, EvolutionError, GaConfig};
use crate::field::{
    generate_plan, FieldConfig, FieldError, ForceWeights, Plan, PlannerMode, State,
};
use crate::geometry::{Obstacle, SamplingRegion, Segment, World};
use crate::rrt::{iterate_paths, rrt_plan, simplify_path, RrtConfig, RrtError};
use crate::scenario::{Scenario, WorldAction};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Rrt(#[from] RrtError),
    #[error(transparent)]
    Bank(#[from] BankError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}

/// Simulation knobs on top of the planner configurations.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub field: FieldConfig,
    pub rrt: RrtConfig,
    /// `generations > 0` runs the weight optimizer before motion starts;
    /// otherwise default weights are used.
    pub ga: GaConfig,
    /// Simulation time cap in seconds.
    pub time_cap: f64,
    pub bank_capacity: usize,
    /// Paths the producer generates before motion starts.
    pub initial_paths: usize,
    /// Producer cadence while driving, in ticks; 0 disables it.
    pub bank_fill_period: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        // Replanning restarts the field from wherever the robot stands, so
        // plans may first skirt a wall before closing on the goal again; a
        // longer trap window (same progress rate) tolerates that.
        let trap_window = 150;
        let field = FieldConfig {
            mode: PlannerMode::Prior,
            trap_window,
            ..FieldConfig::default()
        };
        let field = FieldConfig {
            trap_progress: 0.1 * field.speed * field.dt * trap_window as f64,
            ..field
        };
        Self {
            field,
            rrt: RrtConfig::default(),
            ga: GaConfig { generations: 0, ..GaConfig::default() },
            time_cap: 600.0,
            bank_capacity: DEFAULT_BANK_CAPACITY,
            initial_paths: 6,
            bank_fill_period: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplanTrigger {
    PlanInvalidated,
    PlanExhausted,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReplanRecord {
    pub t: f64,
    pub trigger: ReplanTrigger,
    /// Wall-clock seconds around the replan call only; the one
    /// non-deterministic field in a trace.
    pub latency_s: f64,
    pub succeeded: bool,
    pub used_rrt_fallback: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TickRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub plan_id: usize,
    pub event: bool,
    pub replanned: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimTrace {
    pub ticks: Vec<TickRecord>,
    pub replans: Vec<ReplanRecord>,
    pub reached: bool,
    /// Set when no feasible plan existed after an event and the budget ran
    /// out.
    pub unresolved: bool,
}

impl SimTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Copy with wall-clock latencies zeroed, for determinism comparisons.
    pub fn with_masked_latencies(&self) -> SimTrace {
        let mut masked = self.clone();
        for r in &mut masked.replans {
            r.latency_s = 0.0;
        }
        masked
    }
}

/// Outcome of one replanning attempt.
#[derive(Debug, Clone)]
pub struct ReplanOutcome {
    pub plan: Plan,
    pub feasible: bool,
    pub used_rrt_fallback: bool,
    /// Length of the bank path the plan tracks, when one was used.
    pub prior_length: Option<f64>,
}

fn prior_cfg(cfg: &FieldConfig) -> FieldConfig {
    FieldConfig { mode: PlannerMode::Prior, ..cfg.clone() }
}

/// Regenerate a motion plan from the current state.
///
/// Valid bank paths are tried shortest-first; the first plan that reaches
/// the goal wins. When the bank holds no valid non-trivial path, one fresh
/// RRT search over the full world bounds runs from the bank's start and its
/// simplified path is inserted before planning retries. If nothing reaches
/// the goal, a rescue search runs from the robot's own position; the robot
/// starts on that path, so tracking it stays clear of obstacles even where
/// a bank path's directive would aim straight through a wall. Call after
/// `bank.invalidate` so validity reflects the current world.
pub fn replan(
    state: &State,
    world: &World,
    bank: &mut PathBank,
    weights: &ForceWeights,
    field_cfg: &FieldConfig,
    rrt_cfg: &RrtConfig,
    rng: &mut ChaCha8Rng,
) -> ReplanOutcome {
    let cfg = prior_cfg(field_cfg);
    let goal = bank.goal();
    let mut best: Option<ReplanOutcome> = None;
    let mut had_valid_nontrivial = false;
    let consider = |candidate: ReplanOutcome, best: &mut Option<ReplanOutcome>| {
        let better = best.as_ref().map_or(true, |b| {
            candidate.plan.final_goal_distance(goal) < b.plan.final_goal_distance(goal)
        });
        if better {
            *best = Some(candidate);
        }
    };

    let candidates: Vec<_> = bank
        .entries()
        .iter()
        .filter(|e| world.path_collision_free(&e.path, cfg.inflation))
        .cloned()
        .collect();
    for entry in &candidates {
        if !entry.trivial {
            had_valid_nontrivial = true;
        }
        match generate_plan(*state, goal, world, Some(&entry.path), weights, &cfg) {
            Ok(plan) => {
                let feasible = plan.reached();
                let outcome = ReplanOutcome {
                    plan,
                    feasible,
                    used_rrt_fallback: false,
                    prior_length: Some(entry.length),
                };
                if feasible {
                    return outcome;
                }
                consider(outcome, &mut best);
            }
            Err(_) => break,
        }
    }

    if !had_valid_nontrivial {
        let region = SamplingRegion::from_bounds(world.bounds);
        if let Ok(result) = rrt_plan(bank.start(), goal, world, &region, rrt_cfg, rng) {
            if let Some(raw) = result.path {
                let fresh = simplify_path(&raw, world, rrt_cfg.inflation);
                let length = fresh.total_length();
                let _ = bank.insert(fresh.clone(), world, rrt_cfg.inflation);
                if let Ok(plan) = generate_plan(*state, goal, world, Some(&fresh), weights, &cfg) {
                    let feasible = plan.reached();
                    let outcome = ReplanOutcome {
                        plan,
                        feasible,
                        used_rrt_fallback: true,
                        prior_length: Some(length),
                    };
                    if feasible {
                        return outcome;
                    }
                    consider(outcome, &mut best);
                }
            }
        }
    }

    // Rescue: a path rooted at the robot itself. Endpoint validity drops to
    // the footprint inflation because the robot may already stand closer to
    // an obstacle than the path generator's margin.
    let rescue_cfg = RrtConfig {
        inflation: rrt_cfg.inflation.min(cfg.inflation + 0.5),
        ..rrt_cfg.clone()
    };
    let region = SamplingRegion::from_bounds(world.bounds);
    if let Ok(result) = rrt_plan(state.position, goal, world, &region, &rescue_cfg, rng) {
        if let Some(raw) = result.path {
            let fresh = simplify_path(&raw, world, rescue_cfg.inflation);
            let length = fresh.total_length();
            if let Ok(plan) = generate_plan(*state, goal, world, Some(&fresh), weights, &cfg) {
                let feasible = plan.reached();
                let outcome = ReplanOutcome {
                    plan,
                    feasible,
                    used_rrt_fallback: true,
                    prior_length: Some(length),
                };
                if feasible {
                    return outcome;
                }
                consider(outcome, &mut best);
            }
        }
    }

    best.unwrap_or_else(|| ReplanOutcome {
        // Nothing usable at all: stand still, flagged infeasible.
        plan: Plan {
            states: vec![*state],
            outcome: crate::field::PlanOutcome::Trapped,
            dt: cfg.dt,
        },
        feasible: false,
        used_rrt_fallback: false,
        prior_length: None,
    })
}

/// One full-bounds producer pass: search, simplify, insert.
fn produce_path(
    bank: &mut PathBank,
    world: &World,
    rrt_cfg: &RrtConfig,
    rng: &mut ChaCha8Rng,
) {
    let region = SamplingRegion::from_bounds(world.bounds);
    if let Ok(result) = rrt_plan(bank.start(), bank.goal(), world, &region, rrt_cfg, rng) {
        if let Some(raw) = result.path {
            let simplified = simplify_path(&raw, world, rrt_cfg.inflation);
            let _ = bank.insert(simplified, world, rrt_cfg.inflation);
        }
    }
}

/// True when the remaining plan states stay collision-free.
fn plan_still_valid(world: &World, plan: &Plan, from: usize, inflation: f64) -> bool {
    let states = &plan.states[from..];
    match states {
        [] => false,
        [only] => world.point_collision_free(only.position, inflation),
        _ => states.windows(2).all(|w| {
            if w[0].position == w[1].position {
                world.point_collision_free(w[0].position, inflation)
            } else {
                let seg = Segment::new(w[0].position, w[1].position);
                world.segment_collision_free(&seg, inflation)
            }
        }),
    }
}

fn apply_action(world: &mut World, weights: &mut ForceWeights, action: &WorldAction) {
    match action {
        WorldAction::Add(ob) => {
            world.obstacles.push(ob.clone());
            *weights = weights.resized(world.obstacle_count());
        }
        WorldAction::Remove(index) => {
            if *index < world.obstacles.len() {
                world.obstacles.remove(*index);
                *weights = weights.without_index(*index);
            }
        }
    }
}

/// Drive the scenario: follow the active plan at speed, fold in obstacle
/// events, replan when the active plan is invalidated or runs out, and
/// record everything.
pub fn run_simulation(scenario: &Scenario, cfg: &SimConfig) -> Result<SimTrace, SimError> {
    let field_cfg = prior_cfg(&cfg.field);
    let mut world = scenario.world.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bank = PathBank::new(scenario.start, scenario.goal, cfg.bank_capacity)?;
    let mut rrt_cfg = cfg.rrt.clone();

    for i in 0..cfg.initial_paths {
        rrt_cfg.seed = cfg.seed.wrapping_add(i as u64);
        produce_path(&mut bank, &world, &rrt_cfg, &mut rng);
    }

    let mut weights = if cfg.ga.generations > 0 {
        optimize(&world, scenario.start, scenario.goal, &field_cfg, &cfg.ga, &cfg.rrt)?
            .best_weights
    } else {
        ForceWeights::default_for(&world)
    };

    let mut trace = SimTrace {
        ticks: Vec::new(),
        replans: Vec::new(),
        reached: false,
        unresolved: false,
    };

    let start_state = State::at(scenario.start);
    let initial = replan(
        &start_state, &world, &mut bank, &weights, &field_cfg, &cfg.rrt, &mut rng,
    );
    if !initial.feasible {
        trace.unresolved = true;
        return Ok(trace);
    }
    let mut plan = initial.plan;
    let mut plan_id = 0usize;
    let mut idx = 0usize;
    let mut next_event = 0usize;
    let max_ticks = (cfg.time_cap / field_cfg.dt).ceil() as usize;

    for tick in 0..=max_ticks {
        let t = tick as f64 * field_cfg.dt;
        let mut event_fired = false;
        let mut replanned = false;

        while next_event < scenario.events.len() && scenario.events[next_event].time <= t {
            apply_action(&mut world, &mut weights, &scenario.events[next_event].action);
            next_event += 1;
            event_fired = true;
        }
        if event_fired {
            bank.invalidate(&world, field_cfg.inflation);
            if !plan_still_valid(&world, &plan, idx, field_cfg.inflation) {
                let state = plan.states[idx];
                let started = Instant::now();
                let outcome = replan(
                    &state, &world, &mut bank, &weights, &field_cfg, &cfg.rrt, &mut rng,
                );
                let latency_s = started.elapsed().as_secs_f64();
                trace.replans.push(ReplanRecord {
                    t,
                    trigger: ReplanTrigger::PlanInvalidated,
                    latency_s,
                    succeeded: outcome.feasible,
                    used_rrt_fallback: outcome.used_rrt_fallback,
                });
                replanned = true;
                if !outcome.feasible {
                    trace.unresolved = true;
                    break;
                }
                plan = outcome.plan;
                plan_id += 1;
                idx = 0;
            }
        }

        if cfg.bank_fill_period > 0 && tick > 0 && tick % cfg.bank_fill_period == 0 {
            rrt_cfg.seed = cfg.seed.wrapping_add(1000 + tick as u64);
            produce_path(&mut bank, &world, &rrt_cfg, &mut rng);
        }

        let state = plan.states[idx];
        trace.ticks.push(TickRecord {
            t,
            x: state.position.x,
            y: state.position.y,
            heading: state.heading,
            plan_id,
            event: event_fired,
            replanned,
        });

        if state.position.distance(scenario.goal) <= field_cfg.goal_radius {
            trace.reached = true;
            break;
        }

        if idx + 1 < plan.states.len() {
            idx += 1;
        } else {
            // Plan ran out short of the goal: replan from where we stand.
            let started = Instant::now();
            let outcome = replan(
                &state, &world, &mut bank, &weights, &field_cfg, &cfg.rrt, &mut rng,
            );
            let latency_s = started.elapsed().as_secs_f64();
            trace.replans.push(ReplanRecord {
                t,
                trigger: ReplanTrigger::PlanExhausted,
                latency_s,
                succeeded: outcome.feasible,
                used_rrt_fallback: outcome.used_rrt_fallback,
            });
            if !outcome.feasible {
                trace.unresolved = true;
                break;
            }
            plan = outcome.plan;
            plan_id += 1;
            idx = 0;
        }
    }

    Ok(trace)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LatencyStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl LatencyStats {
    fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        Some(Self {
            mean: samples.iter().sum::<f64>() / samples.len() as f64,
            min: samples.iter().copied().fold(f64::INFINITY, f64::min),
            max: samples.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Results of either benchmark; unused sections stay empty.
#[derive(Debug, Clone)]
pub struct BenchReport {
    pub trial_count: usize,
    /// (bank-replan seconds, fresh-RRT seconds) per trial.
    pub replan_rows: Vec<(f64, f64)>,
    pub replan_stats: Option<LatencyStats>,
    pub fresh_stats: Option<LatencyStats>,
    /// Mean tree node count per generator iteration.
    pub node_means: Vec<f64>,
}

impl BenchReport {
    pub fn replan_csv(&self) -> String {
        let mut out = String::from("trial,replan_seconds,fresh_rrt_seconds\n");
        for (i, (a, b)) in self.replan_rows.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, a, b));
        }
        out
    }

    pub fn nodes_csv(&self) -> String {
        let mut out = String::from("iteration,mean_nodes\n");
        for (i, mean) in self.node_means.iter().enumerate() {
            out.push_str(&format!("{},{}\n", i + 1, mean));
        }
        out
    }

    /// Mean bank-replan latency over mean fresh-RRT latency.
    pub fn replan_ratio(&self) -> Option<f64> {
        match (&self.replan_stats, &self.fresh_stats) {
            (Some(r), Some(f)) if f.mean > 0.0 => Some(r.mean / f.mean),
            _ => None,
        }
    }
}

/// For each trial: build a bank and an active plan, drop a fresh obstacle
/// onto the plan, then time (a) the bank-backed replan and (b) a fresh RRT
/// search from scratch, under identical seeds.
pub fn bench_replan(
    scenario: &Scenario,
    trials: usize,
    cfg: &SimConfig,
) -> Result<BenchReport, SimError> {
    let field_cfg = prior_cfg(&cfg.field);
    let mut rows = Vec::with_capacity(trials);

    for trial in 0..trials {
        let trial_seed = cfg.seed.wrapping_add(10_000).wrapping_add(trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let mut world = scenario.world.clone();
        let mut bank = PathBank::new(scenario.start, scenario.goal, cfg.bank_capacity)?;
        let mut rrt_cfg = cfg.rrt.clone();
        for i in 0..cfg.initial_paths {
            rrt_cfg.seed = trial_seed.wrapping_add(i as u64);
            produce_path(&mut bank, &world, &rrt_cfg, &mut rng);
        }
        let mut weights = ForceWeights::default_for(&world);
        let initial = replan(
            &State::at(scenario.start), &world, &mut bank, &weights, &field_cfg, &rrt_cfg,
            &mut rng,
        );
        if !initial.feasible {
            continue;
        }
        let plan = initial.plan;

        // Block the plan somewhere in its middle stretch, varying by trial,
        // while the robot trails far enough back to stay clear.
        let fraction = 0.35 + 0.4 * (trial as f64 / trials.max(1) as f64);
        let block_idx = ((plan.states.len() - 1) as f64 * fraction) as usize;
        let radius = 6.0;
        let lead = ((radius + field_cfg.inflation + 3.0) / (field_cfg.speed * field_cfg.dt))
            .ceil() as usize;
        let robot_idx = block_idx.saturating_sub(lead);
        let center = plan.states[block_idx].position;
        world
            .obstacles
            .push(Obstacle::circle(center, radius).expect("positive radius"));
        weights = weights.resized(world.obstacle_count());
        bank.invalidate(&world, field_cfg.inflation);
        let robot = plan.states[robot_idx];

        let bench_seed = trial_seed.wrapping_add(777);
        let mut replan_rng = ChaCha8Rng::seed_from_u64(bench_seed);
        let started = Instant::now();
        let outcome = replan(
            &robot, &world, &mut bank, &weights, &field_cfg, &rrt_cfg, &mut replan_rng,
        );
        let replan_s = started.elapsed().as_secs_f64();

        let mut fresh_rng = ChaCha8Rng::seed_from_u64(bench_seed);
        let region = SamplingRegion::from_bounds(world.bounds);
        let started = Instant::now();
        let fresh = rrt_plan(robot.position, scenario.goal, &world, &region, &rrt_cfg, &mut fresh_rng);
        if let Ok(result) = &fresh {
            if let Some(raw) = &result.path {
                let _ = simplify_path(raw, &world, rrt_cfg.inflation);
            }
        }
        let fresh_s = started.elapsed().as_secs_f64();

        let _ = outcome;
        rows.push((replan_s, fresh_s));
    }

    let replan_samples: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let fresh_samples: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(BenchReport {
        trial_count: rows.len(),
        replan_stats: LatencyStats::from_samples(&replan_samples),
        fresh_stats: LatencyStats::from_samples(&fresh_samples),
        replan_rows: rows,
        node_means: Vec::new(),
    })
}

/// Run the iterated generator `runs` times with distinct seeds and average
/// the tree node counts per iteration.
pub fn bench_nodes(
    scenario: &Scenario,
    runs: usize,
    iters: usize,
    cfg: &SimConfig,
) -> Result<BenchReport, SimError> {
    let mut sums = vec![0.0; iters];
    for run in 0..runs {
        let rrt_cfg = RrtConfig {
            seed: cfg.seed.wrapping_add(run as u64),
            ..cfg.rrt.clone()
        };
        let rounds = iterate_paths(scenario.start, scenario.goal, &scenario.world, iters, &rrt_cfg)?;
        for (i, round) in rounds.iter().enumerate() {
            sums[i] += round.node_count as f64;
        }
    }
    let node_means = sums.iter().map(|s| s / runs.max(1) as f64).collect();
    Ok(BenchReport {
        trial_count: runs,
        replan_rows: Vec::new(),
        replan_stats: None,
        fresh_stats: None,
        node_means,
    })
}
