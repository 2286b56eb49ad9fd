//! Command-line surface.
//!
//! Subcommands: `plan` (one-shot planner run), `optimize` (GA run with a
//! convergence CSV), `simulate` (event-driven run with a trace dump),
//! `bench-replan`, `bench-nodes`, and `render`. Exit codes: 0 success,
//! 1 domain failure, 2 usage error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::evolution::{history_csv, optimize, GaConfig};
use crate::field::{
    generate_plan, FieldConfig, ForceWeights, Plan, PlannerMode, State, DEFAULT_ALPHA,
    DEFAULT_BETA, DEFAULT_GAMMA,
};
use crate::geometry::{PriorPath, SamplingRegion};
use crate::render::{render_svg, GlyphGrid, RenderOptions};
use crate::rrt::{rrt_plan, simplify_path, RrtConfig};
use crate::scenario::{plan_to_json, Scenario};
use crate::sim::{bench_nodes, bench_replan, run_simulation, SimConfig};

#[derive(Parser)]
#[command(
    name = "pathfield",
    version,
    about = "2D motion planning with force fields guided by prior paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Naive,
    Prior,
}

impl From<ModeArg> for PlannerMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Naive => PlannerMode::Naive,
            ModeArg::Prior => PlannerMode::Prior,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one motion plan and write it as JSON.
    Plan {
        #[command(flatten)]
        common: CommonArgs,
        /// Planner mode: naive (attractive + repulsive) or prior
        /// (directive + repulsive over an RRT path).
        #[arg(long, value_enum, default_value = "naive")]
        mode: ModeArg,
        /// Attractive weight (naive mode).
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        /// Repulsive weight applied to every obstacle.
        #[arg(long, default_value_t = DEFAULT_BETA)]
        beta: f64,
        /// Directive weight (prior mode).
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        /// Also render the run to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Run the genetic optimizer; writes the best plan and a convergence CSV.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 30)]
        generations: usize,
        #[arg(long, default_value_t = 200)]
        pop_size: usize,
        /// Convergence history CSV path.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Drive the scenario with reactive replanning; writes a trace JSON.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Optimizer generations before motion starts (0 = default weights).
        #[arg(long, default_value_t = 0)]
        generations: usize,
    },
    /// Time bank-backed replanning against a fresh RRT; writes a CSV.
    BenchReplan {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Average RRT tree sizes across generator iterations; writes a CSV.
    BenchNodes {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 50)]
        runs: usize,
        #[arg(long, default_value_t = 10)]
        iters: usize,
    },
    /// Render the scenario world to SVG.
    Render {
        #[command(flatten)]
        common: CommonArgs,
        /// Draw the force-field glyph grid.
        #[arg(long)]
        field: bool,
        /// Mode for the glyph grid forces.
        #[arg(long, value_enum, default_value = "naive")]
        mode: ModeArg,
        /// Glyph lattice spacing in meters.
        #[arg(long, default_value_t = 15.0)]
        spacing: f64,
    },
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn load_scenario(path: &Path) -> Result<Scenario> {
    Scenario::load(path).with_context(|| format!("cannot load scenario {}", path.display()))
}

/// Build a prior path for one-shot prior-mode planning: a seeded RRT search
/// over the full bounds, simplified.
fn make_prior_path(scenario: &Scenario, seed: u64) -> Result<PriorPath> {
    let rrt_cfg = RrtConfig { seed, ..RrtConfig::default() };
    let region = SamplingRegion::from_bounds(scenario.world.bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = rrt_plan(scenario.start, scenario.goal, &scenario.world, &region, &rrt_cfg, &mut rng)
        .context("prior-path search failed")?;
    let raw = result
        .path
        .context("no prior path found within the iteration budget")?;
    Ok(simplify_path(&raw, &scenario.world, rrt_cfg.inflation))
}

fn summarize_plan(plan: &Plan) {
    let length: f64 = plan
        .states
        .windows(2)
        .map(|w| w[0].position.distance(w[1].position))
        .sum();
    println!(
        "outcome: {:?}  states: {}  length: {:.2} m",
        plan.outcome,
        plan.states.len(),
        length
    );
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Plan { common, mode, alpha, beta, gamma, svg } => {
            let scenario = load_scenario(&common.scenario)?;
            let mode: PlannerMode = mode.into();
            let cfg = FieldConfig { mode, ..FieldConfig::default() };
            let weights =
                ForceWeights::uniform(scenario.world.obstacle_count(), alpha, beta, gamma);
            let prior = match mode {
                PlannerMode::Naive => None,
                PlannerMode::Prior => Some(make_prior_path(&scenario, common.seed)?),
            };
            let plan = generate_plan(
                State::at(scenario.start),
                scenario.goal,
                &scenario.world,
                prior.as_ref(),
                &weights,
                &cfg,
            )?;
            write_file(&common.out, &plan_to_json(&plan))?;
            if let Some(svg_path) = svg {
                let opts = RenderOptions {
                    legend: true,
                    start: Some(scenario.start),
                    goal: Some(scenario.goal),
                    ..RenderOptions::default()
                };
                let priors: Vec<PriorPath> = prior.into_iter().collect();
                let doc = render_svg(&scenario.world, &priors, &[plan.clone()], &opts);
                write_file(&svg_path, &doc)?;
            }
            summarize_plan(&plan);
            Ok(())
        }
        Command::Optimize { common, generations, pop_size, history } => {
            let scenario = load_scenario(&common.scenario)?;
            let ga = GaConfig { generations, pop_size, seed: common.seed, ..GaConfig::default() };
            let rrt_cfg = RrtConfig { seed: common.seed, ..RrtConfig::default() };
            let result = optimize(
                &scenario.world,
                scenario.start,
                scenario.goal,
                &FieldConfig::prior(),
                &ga,
                &rrt_cfg,
            )?;
            write_file(&common.out, &plan_to_json(&result.best_plan))?;
            let history_path = history.unwrap_or_else(|| common.out.with_extension("history.csv"));
            write_file(&history_path, &history_csv(&result.history))?;
            println!(
                "best cost: {:.4}  feasible: {}  generations: {}",
                result.best_cost,
                result.feasible,
                result.history.len().saturating_sub(1)
            );
            summarize_plan(&result.best_plan);
            Ok(())
        }
        Command::Simulate { common, generations } => {
            let scenario = load_scenario(&common.scenario)?;
            let cfg = SimConfig {
                seed: common.seed,
                ga: GaConfig { generations, seed: common.seed, ..GaConfig::default() },
                ..SimConfig::default()
            };
            let trace = run_simulation(&scenario, &cfg)?;
            write_file(&common.out, &trace.to_json())?;
            println!(
                "reached: {}  ticks: {}  replans: {}  unresolved: {}",
                trace.reached,
                trace.ticks.len(),
                trace.replans.len(),
                trace.unresolved
            );
            Ok(())
        }
        Command::BenchReplan { common, trials } => {
            let scenario = load_scenario(&common.scenario)?;
            let cfg = SimConfig { seed: common.seed, ..SimConfig::default() };
            let report = bench_replan(&scenario, trials, &cfg)?;
            write_file(&common.out, &report.replan_csv())?;
            if let (Some(r), Some(f)) = (&report.replan_stats, &report.fresh_stats) {
                println!(
                    "replan mean: {:.3} ms  fresh RRT mean: {:.3} ms  ratio: {:.3}",
                    r.mean * 1e3,
                    f.mean * 1e3,
                    report.replan_ratio().unwrap_or(f64::NAN)
                );
            }
            Ok(())
        }
        Command::BenchNodes { common, runs, iters } => {
            let scenario = load_scenario(&common.scenario)?;
            let cfg = SimConfig { seed: common.seed, ..SimConfig::default() };
            let report = bench_nodes(&scenario, runs, iters, &cfg)?;
            write_file(&common.out, &report.nodes_csv())?;
            let means: Vec<String> =
                report.node_means.iter().map(|m| format!("{m:.1}")).collect();
            println!("mean nodes per iteration: [{}]", means.join(", "));
            Ok(())
        }
        Command::Render { common, field, mode, spacing } => {
            let scenario = load_scenario(&common.scenario)?;
            let mode: PlannerMode = mode.into();
            let prior = match (field, mode) {
                (true, PlannerMode::Prior) => Some(make_prior_path(&scenario, common.seed)?),
                _ => None,
            };
            let glyphs = field.then(|| GlyphGrid {
                weights: ForceWeights::default_for(&scenario.world),
                field: FieldConfig { mode, ..FieldConfig::default() },
                goal: scenario.goal,
                path: prior.clone(),
                spacing,
            });
            let opts = RenderOptions {
                glyphs,
                legend: true,
                start: Some(scenario.start),
                goal: Some(scenario.goal),
            };
            let priors: Vec<PriorPath> = prior.into_iter().collect();
            let doc = render_svg(&scenario.world, &priors, &[], &opts);
            write_file(&common.out, &doc)?;
            println!("wrote {}", common.out.display());
            Ok(())
        }
    }
}
