//! Force computation and plan generation.
//!
//! Two planner modes share one stepping loop: `Naive` sums an attractive
//! pull toward the goal with per-obstacle repulsion; `Prior` swaps the
//! attractive term for a unit directive force parallel to the nearest
//! segment of a prior path, which is what frees the field from local
//! minima while keeping the repulsive safety margin.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    Obstacle, Point2, PriorPath, Vec2, World, DEFAULT_FOOTPRINT_INFLATION,
};

/// Default repulsive coefficient per obstacle, sized for a 300x300 m world:
/// magnitude beta/d^3 balances an attractive pull of ~100 near d = 4.6 m,
/// above the footprint inflation radius.
pub const DEFAULT_BETA: f64 = 1e4;
pub const DEFAULT_ALPHA: f64 = 1.0;
/// Default directive coefficient. The directive force must dominate
/// repulsion along a collision-free prior path or lateral offsets push the
/// plan off the path for good (the directive is parallel to the path, so
/// offsets never decay). The ratio beta/gamma puts the repulsive standoff
/// (beta/gamma)^(1/3) = 2.71 m just inside the footprint inflation.
pub const DEFAULT_GAMMA: f64 = 500.0;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("expected {expected} repulsive weights (one per obstacle), got {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("prior mode requires a prior path")]
    MissingPriorPath,
    #[error("start state is in collision at the configured inflation")]
    StartInCollision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerMode {
    /// Attractive + repulsive forces only.
    Naive,
    /// Directive force from a prior path + repulsive forces; no attractive
    /// term, since the last path segment already points at the goal.
    Prior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kinematics {
    Holonomic,
    HeadingLimited,
}

/// Stepping-loop parameters. Defaults are sized for the 300x300 m world.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldConfig {
    pub dt: f64,
    pub speed: f64,
    pub goal_radius: f64,
    pub max_steps: usize,
    /// Window length, in steps, for the trap test.
    pub trap_window: usize,
    /// Minimum decrease in goal distance over the window before a plan
    /// counts as trapped. Oscillation around a force balance makes no
    /// progress at all; a plan that overshoots the goal region recedes and
    /// trips the same test.
    pub trap_progress: f64,
    /// Force magnitudes below this stall the step.
    pub min_force: f64,
    /// Lower clamp on the obstacle distance in the repulsive law.
    pub min_dist: f64,
    /// Collision inflation radius for the robot footprint disc.
    pub inflation: f64,
    pub mode: PlannerMode,
    pub kinematics: Kinematics,
    /// Used only by `Kinematics::HeadingLimited`, in rad/s.
    pub max_turn_rate: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        let dt = 0.1;
        let speed = 10.0;
        let trap_window = 50;
        Self {
            dt,
            speed,
            goal_radius: 2.0,
            max_steps: 5000,
            trap_window,
            trap_progress: 0.1 * speed * dt * trap_window as f64,
            min_force: 1e-9,
            min_dist: 0.05,
            inflation: DEFAULT_FOOTPRINT_INFLATION,
            mode: PlannerMode::Naive,
            kinematics: Kinematics::Holonomic,
            max_turn_rate: 1.0,
        }
    }
}

impl FieldConfig {
    pub fn prior() -> Self {
        Self { mode: PlannerMode::Prior, ..Self::default() }
    }
}

/// The tunable coefficients of the field: one attractive weight, one
/// repulsive weight per obstacle, and the directive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceWeights {
    pub alpha: f64,
    pub betas: Vec<f64>,
    pub gamma: f64,
}

impl ForceWeights {
    pub fn new(alpha: f64, betas: Vec<f64>, gamma: f64) -> Self {
        Self { alpha, betas, gamma }
    }

    pub fn uniform(obstacle_count: usize, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self::new(alpha, vec![beta; obstacle_count], gamma)
    }

    pub fn default_for(world: &World) -> Self {
        Self::uniform(world.obstacle_count(), DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_GAMMA)
    }

    /// Adjust the repulsive weight list to a changed obstacle set: new
    /// obstacles get the default weight.
    pub fn resized(&self, obstacle_count: usize) -> Self {
        let mut betas = self.betas.clone();
        betas.resize(obstacle_count, DEFAULT_BETA);
        Self::new(self.alpha, betas, self.gamma)
    }

    /// Drop the weight paired with a removed obstacle.
    pub fn without_index(&self, index: usize) -> Self {
        let mut betas = self.betas.clone();
        if index < betas.len() {
            betas.remove(index);
        }
        Self::new(self.alpha, betas, self.gamma)
    }
}

/// A robot pose sample along a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub position: Point2,
    /// Motion heading in (-pi, pi]; meaningful for heading-limited
    /// kinematics, informational otherwise.
    pub heading: f64,
    pub t: f64,
}

impl State {
    pub fn at(position: Point2) -> Self {
        Self { position, heading: 0.0, t: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanOutcome {
    Reached,
    Trapped,
    Collided,
    ExhaustedSteps,
}

/// A timestamped pose sequence emitted by the stepping loop.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan {
    pub states: Vec<State>,
    pub outcome: PlanOutcome,
    pub dt: f64,
}

impl Plan {
    pub fn reached(&self) -> bool {
        self.outcome == PlanOutcome::Reached
    }

    pub fn final_state(&self) -> &State {
        self.states.last().expect("plan always contains the start state")
    }

    pub fn final_goal_distance(&self, goal: Point2) -> f64 {
        self.final_state().position.distance(goal)
    }
}

/// alpha * (goal - s): pull toward the goal, proportional to distance.
pub fn attractive_force(s: Point2, goal: Point2, alpha: f64) -> Vec2 {
    (goal - s) * alpha
}

/// Repulsion from one obstacle: beta / d^3 in magnitude, directed from the
/// nearest obstacle point toward `s`, with `d` clamped below by `min_dist`.
/// A point exactly on the nearest obstacle point falls back to +x; callers
/// treat such states as collided anyway.
pub fn repulsive_force(s: Point2, ob: &Obstacle, beta: f64, min_dist: f64) -> Vec2 {
    let nearest = ob.nearest_boundary_point(s);
    let away = s - nearest;
    let d = away.norm().max(min_dist);
    let dir = away.normalized().unwrap_or(Vec2::new(1.0, 0.0));
    dir * (beta / (d * d * d))
}

/// Unit vector parallel to the prior-path segment nearest to `s` under the
/// elliptic distance; ties go to the lowest segment index.
pub fn directive_force(s: Point2, path: &PriorPath) -> Vec2 {
    path.segment(path.nearest_segment(s)).direction()
}

/// Weighted sum of the active force sources for the configured mode.
pub fn total_force(
    s: Point2,
    goal: Point2,
    world: &World,
    path: Option<&PriorPath>,
    w: &ForceWeights,
    cfg: &FieldConfig,
) -> Result<Vec2, FieldError> {
    if w.betas.len() != world.obstacle_count() {
        return Err(FieldError::WeightCount {
            expected: world.obstacle_count(),
            got: w.betas.len(),
        });
    }
    let guide = match cfg.mode {
        PlannerMode::Naive => attractive_force(s, goal, w.alpha),
        PlannerMode::Prior => {
            let path = path.ok_or(FieldError::MissingPriorPath)?;
            directive_force(s, path) * w.gamma
        }
    };
    Ok(world
        .obstacles
        .iter()
        .zip(&w.betas)
        .fold(guide, |acc, (ob, &beta)| {
            acc + repulsive_force(s, ob, beta, cfg.min_dist)
        }))
}

/// Advance one time step: constant speed along the force direction, with an
/// optional heading-rate limit. Forces below `min_force` stall the position.
pub fn step(state: &State, force: Vec2, cfg: &FieldConfig) -> State {
    let t = state.t + cfg.dt;
    if force.norm() < cfg.min_force {
        return State { t, ..*state };
    }
    match cfg.kinematics {
        Kinematics::Holonomic => {
            let dir = force.normalized().expect("force above stall threshold");
            State {
                position: state.position + dir * (cfg.speed * cfg.dt),
                heading: dir.heading(),
                t,
            }
        }
        Kinematics::HeadingLimited => {
            let desired = force.heading();
            let max_delta = cfg.max_turn_rate * cfg.dt;
            let delta = wrap_angle(desired - state.heading).clamp(-max_delta, max_delta);
            let heading = wrap_angle(state.heading + delta);
            State {
                position: state.position + Vec2::from_heading(heading) * (cfg.speed * cfg.dt),
                heading,
                t,
            }
        }
    }
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    } else if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

/// Run the stepping loop from `start` until the goal disc is reached, the
/// footprint collides, progress stalls, or the step budget runs out.
pub fn generate_plan(
    start: State,
    goal: Point2,
    world: &World,
    path: Option<&PriorPath>,
    w: &ForceWeights,
    cfg: &FieldConfig,
) -> Result<Plan, FieldError> {
    if w.betas.len() != world.obstacle_count() {
        return Err(FieldError::WeightCount {
            expected: world.obstacle_count(),
            got: w.betas.len(),
        });
    }
    if cfg.mode == PlannerMode::Prior && path.is_none() {
        return Err(FieldError::MissingPriorPath);
    }
    if !world.point_collision_free(start.position, cfg.inflation) {
        return Err(FieldError::StartInCollision);
    }

    let mut states = vec![start];
    let mut outcome = PlanOutcome::ExhaustedSteps;
    if start.position.distance(goal) <= cfg.goal_radius {
        return Ok(Plan { states, outcome: PlanOutcome::Reached, dt: cfg.dt });
    }

    for _ in 0..cfg.max_steps {
        let current = *states.last().unwrap();
        let force = total_force(current.position, goal, world, path, w, cfg)
            .expect("weights validated above");
        if force.norm() < cfg.min_force {
            outcome = PlanOutcome::Trapped;
            break;
        }
        let next = step(&current, force, cfg);
        if !world.point_collision_free(next.position, cfg.inflation) {
            // Truncate before the colliding state.
            outcome = PlanOutcome::Collided;
            break;
        }
        states.push(next);
        if next.position.distance(goal) <= cfg.goal_radius {
            outcome = PlanOutcome::Reached;
            break;
        }
        if states.len() > cfg.trap_window {
            let prev = states[states.len() - 1 - cfg.trap_window].position;
            let progress = prev.distance(goal) - next.position.distance(goal);
            if progress < cfg.trap_progress {
                outcome = PlanOutcome::Trapped;
                break;
            }
        }
    }

    Ok(Plan { states, outcome, dt: cfg.dt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Bounds;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    fn circle_world(cx: f64, cy: f64, r: f64) -> World {
        World::new(
            Bounds::new(300.0, 300.0).unwrap(),
            vec![Obstacle::circle(pt(cx, cy), r).unwrap()],
        )
    }

    #[test]
    fn attractive_force_basics() {
        assert_eq!(attractive_force(pt(3.0, 4.0), pt(3.0, 4.0), 1.0), Vec2::ZERO);
        assert_eq!(attractive_force(pt(0.0, 0.0), pt(3.0, 4.0), 1.0), Vec2::new(3.0, 4.0));
        let single = attractive_force(pt(1.0, 2.0), pt(5.0, -1.0), 1.5);
        let double = attractive_force(pt(1.0, 2.0), pt(5.0, -1.0), 3.0);
        assert!((double.x - 2.0 * single.x).abs() < 1e-12);
        assert!((double.y - 2.0 * single.y).abs() < 1e-12);
    }

    #[test]
    fn repulsive_magnitude_follows_inverse_cube() {
        let ob = Obstacle::circle(pt(0.0, 0.0), 1.0).unwrap();
        let beta = 7.5;
        for d in [0.5, 1.0, 2.0, 4.0] {
            let s = pt(1.0 + d, 0.0);
            let f = repulsive_force(s, &ob, beta, 0.05);
            assert!((f.norm() * d * d * d - beta).abs() < 1e-9, "d = {d}");
            // Direction points from the obstacle toward s.
            assert!(f.dot(s - pt(1.0, 0.0)) > 0.0);
        }
    }

    #[test]
    fn repulsive_clamps_at_min_dist() {
        let ob = Obstacle::circle(pt(0.0, 0.0), 1.0).unwrap();
        let on_boundary = pt(1.0, 0.0);
        let f = repulsive_force(on_boundary, &ob, 2.0, 0.05);
        assert!((f.norm() - 2.0 / 0.05_f64.powi(3)).abs() < 1e-6);
        assert_eq!(f.normalized().unwrap(), Vec2::new(1.0, 0.0));
    }

    #[test]
    fn directive_force_single_segment() {
        let path = PriorPath::new(vec![pt(0.0, 0.0), pt(10.0, 0.0)]).unwrap();
        for s in [pt(0.0, 5.0), pt(-3.0, -9.0), pt(20.0, 1.0)] {
            assert_eq!(directive_force(s, &path), Vec2::new(1.0, 0.0));
        }
    }

    #[test]
    fn directive_force_picks_elliptic_nearest() {
        let path = PriorPath::new(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0)]).unwrap();
        let s = pt(0.2, 0.1);
        let d1 = path.segment(0).elliptic_distance(s);
        let d2 = path.segment(1).elliptic_distance(s);
        assert!(d1 < d2);
        assert_eq!(directive_force(s, &path), Vec2::new(1.0, 0.0));
        // Near the far end of the second segment the winner flips.
        let up = directive_force(pt(1.05, 0.9), &path);
        assert!((up.x).abs() < 1e-12 && (up.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn directive_force_is_unit() {
        let path =
            PriorPath::new(vec![pt(0.0, 0.0), pt(3.0, 4.0), pt(-1.0, 7.0), pt(10.0, 10.0)])
                .unwrap();
        for i in 0..50 {
            let s = pt((i as f64 * 1.37) % 12.0 - 2.0, (i as f64 * 2.11) % 13.0 - 3.0);
            assert!((directive_force(s, &path).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn total_force_superposition() {
        let world = circle_world(5.0, 5.0, 1.0);
        let w = ForceWeights::new(2.0, vec![3.0], 0.0);
        let cfg = FieldConfig::default();
        let s = pt(1.0, 1.0);
        let goal = pt(9.0, 9.0);
        let total = total_force(s, goal, &world, None, &w, &cfg).unwrap();
        let expected = attractive_force(s, goal, w.alpha)
            + repulsive_force(s, &world.obstacles[0], w.betas[0], cfg.min_dist);
        assert_eq!(total, expected);
    }

    #[test]
    fn total_force_zero_weights() {
        let world = circle_world(5.0, 5.0, 1.0);
        let w = ForceWeights::new(0.0, vec![0.0], 0.0);
        let cfg = FieldConfig::default();
        let f = total_force(pt(1.0, 1.0), pt(9.0, 9.0), &world, None, &w, &cfg).unwrap();
        assert_eq!(f, Vec2::ZERO);
    }

    #[test]
    fn total_force_prior_mode_empty_world_is_directive() {
        let world = World::empty(300.0, 300.0).unwrap();
        let path = PriorPath::new(vec![pt(0.0, 0.0), pt(10.0, 10.0)]).unwrap();
        let w = ForceWeights::new(0.0, vec![], 1.0);
        let cfg = FieldConfig::prior();
        let f = total_force(pt(3.0, 1.0), pt(10.0, 10.0), &world, Some(&path), &w, &cfg).unwrap();
        assert_eq!(f, directive_force(pt(3.0, 1.0), &path));
    }

    #[test]
    fn total_force_weight_count_mismatch() {
        let world = circle_world(5.0, 5.0, 1.0);
        let w = ForceWeights::new(1.0, vec![1.0, 2.0], 0.0);
        let cfg = FieldConfig::default();
        let err = total_force(pt(0.0, 0.0), pt(1.0, 1.0), &world, None, &w, &cfg).unwrap_err();
        assert_eq!(err, FieldError::WeightCount { expected: 1, got: 2 });
    }

    #[test]
    fn step_holonomic_unit_displacement() {
        let cfg = FieldConfig { speed: 1.0, ..FieldConfig::default() };
        let s = State::at(pt(0.0, 0.0));
        let next = step(&s, Vec2::new(3.0, 4.0), &cfg);
        assert!((next.position.x - 0.06).abs() < 1e-12);
        assert!((next.position.y - 0.08).abs() < 1e-12);
        assert!((next.t - 0.1).abs() < 1e-12);
    }

    #[test]
    fn step_stalls_below_min_force() {
        let cfg = FieldConfig::default();
        let s = State::at(pt(1.0, 2.0));
        let next = step(&s, Vec2::new(0.0, 1e-12), &cfg);
        assert_eq!(next.position, s.position);
        assert!((next.t - cfg.dt).abs() < 1e-15);
    }

    #[test]
    fn step_heading_limited_clamps_turn() {
        let cfg = FieldConfig {
            kinematics: Kinematics::HeadingLimited,
            max_turn_rate: 2.0,
            ..FieldConfig::default()
        };
        // max_turn_rate * dt = 0.2; force requests a pi/2 turn.
        let s = State::at(pt(0.0, 0.0));
        let next = step(&s, Vec2::new(0.0, 5.0), &cfg);
        assert!((next.heading - 0.2).abs() < 1e-12);
        let dist = next.position.distance(s.position);
        assert!((dist - cfg.speed * cfg.dt).abs() < 1e-12);
    }

    #[test]
    fn plan_starts_inside_goal_radius() {
        let world = World::empty(300.0, 300.0).unwrap();
        let cfg = FieldConfig::default();
        let w = ForceWeights::default_for(&world);
        let plan =
            generate_plan(State::at(pt(10.0, 10.0)), pt(11.0, 10.0), &world, None, &w, &cfg)
                .unwrap();
        assert_eq!(plan.outcome, PlanOutcome::Reached);
        assert_eq!(plan.states.len(), 1);
    }

    #[test]
    fn plan_empty_world_near_straight() {
        let world = World::empty(300.0, 300.0).unwrap();
        let cfg = FieldConfig::default();
        let w = ForceWeights::new(1.0, vec![], 0.0);
        let start = pt(10.0, 10.0);
        let goal = pt(250.0, 180.0);
        let plan = generate_plan(State::at(start), goal, &world, None, &w, &cfg).unwrap();
        assert_eq!(plan.outcome, PlanOutcome::Reached);
        let len: f64 = plan
            .states
            .windows(2)
            .map(|w| w[0].position.distance(w[1].position))
            .sum();
        let straight = start.distance(goal);
        assert!(len <= straight * 1.05, "len = {len}, straight = {straight}");
    }

    #[test]
    fn plan_kinematic_feasibility() {
        let world = circle_world(150.0, 150.0, 20.0);
        let cfg = FieldConfig::default();
        let w = ForceWeights::default_for(&world);
        let plan =
            generate_plan(State::at(pt(20.0, 20.0)), pt(280.0, 280.0), &world, None, &w, &cfg)
                .unwrap();
        for pair in plan.states.windows(2) {
            let d = pair[0].position.distance(pair[1].position);
            assert!(d <= cfg.speed * cfg.dt + 1e-12);
            assert!((pair[1].t - pair[0].t - cfg.dt).abs() < 1e-9);
        }
    }

    #[test]
    fn plan_errors_on_colliding_start() {
        let world = circle_world(10.0, 10.0, 5.0);
        let cfg = FieldConfig::default();
        let w = ForceWeights::default_for(&world);
        let err =
            generate_plan(State::at(pt(10.0, 10.0)), pt(100.0, 100.0), &world, None, &w, &cfg)
                .unwrap_err();
        assert_eq!(err, FieldError::StartInCollision);
    }

    #[test]
    fn plan_determinism() {
        let world = circle_world(150.0, 140.0, 25.0);
        let cfg = FieldConfig::default();
        let w = ForceWeights::default_for(&world);
        let a = generate_plan(State::at(pt(20.0, 20.0)), pt(280.0, 280.0), &world, None, &w, &cfg)
            .unwrap();
        let b = generate_plan(State::at(pt(20.0, 20.0)), pt(280.0, 280.0), &world, None, &w, &cfg)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrap_angle_range() {
        for k in -20..20 {
            let a = k as f64 * 0.7;
            let w = wrap_angle(a);
            assert!(w > -std::f64::consts::PI && w <= std::f64::consts::PI);
            // Same direction.
            assert!(((a - w) / std::f64::consts::TAU).round() * std::f64::consts::TAU + w - a < 1e-9);
        }
    }
}
