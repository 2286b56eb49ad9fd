//! Scenario and plan file formats.
//!
//! A scenario file carries the world (bounds in meters, origin at the
//! lower-left corner), start and goal, and a timeline of obstacle events:
//!
//! ```json
//! {
//!   "bounds": {"w": 300, "h": 300},
//!   "obstacles": [
//!     {"kind": "circle", "c": [60, 40], "r": 12},
//!     {"kind": "poly", "pts": [[100, 100], [120, 100], [120, 140], [100, 140]]}
//!   ],
//!   "start": [20, 20],
//!   "goal": [280, 280],
//!   "events": [
//!     {"t": 5.0, "add": {"kind": "circle", "c": [150, 150], "r": 8}},
//!     {"t": 9.0, "remove": 0}
//!   ]
//! }
//! ```
//!
//! Plans serialize as `{"states": [[x, y, heading, t], ...], "outcome": "Reached"}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Plan, PlanOutcome, State};
use crate::geometry::{Bounds, Obstacle, Point2, World};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid field {field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid { field: field.into(), reason: reason.into() }
}

/// A world change scheduled at a point in simulation time.
#[derive(Debug, Clone, PartialEq)]
pub enum WorldAction {
    Add(Obstacle),
    Remove(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedEvent {
    pub time: f64,
    pub action: WorldAction,
}

/// Validated planning scenario. Start and goal are collision-free in the
/// initial world.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: World,
    pub start: Point2,
    pub goal: Point2,
    pub events: Vec<TimedEvent>,
}

#[derive(Serialize, Deserialize)]
struct BoundsFile {
    w: f64,
    h: f64,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ObstacleFile {
    Circle { c: [f64; 2], r: f64 },
    Poly { pts: Vec<[f64; 2]> },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventFile {
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    add: Option<ObstacleFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remove: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    bounds: BoundsFile,
    #[serde(default)]
    obstacles: Vec<ObstacleFile>,
    start: [f64; 2],
    goal: [f64; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    events: Vec<EventFile>,
}

fn obstacle_from_file(file: &ObstacleFile, field: &str) -> Result<Obstacle, ScenarioError> {
    match file {
        ObstacleFile::Circle { c, r } => Obstacle::circle(Point2::new(c[0], c[1]), *r)
            .map_err(|e| invalid(format!("{field}.r"), e.to_string())),
        ObstacleFile::Poly { pts } => {
            let vertices = pts.iter().map(|p| Point2::new(p[0], p[1])).collect();
            Obstacle::polygon(vertices).map_err(|e| invalid(format!("{field}.pts"), e.to_string()))
        }
    }
}

fn obstacle_to_file(ob: &Obstacle) -> ObstacleFile {
    match ob {
        Obstacle::Circle { center, radius } => {
            ObstacleFile::Circle { c: [center.x, center.y], r: *radius }
        }
        Obstacle::Polygon(poly) => ObstacleFile::Poly {
            pts: poly.vertices().iter().map(|p| [p.x, p.y]).collect(),
        },
    }
}

impl Scenario {
    pub fn new(
        world: World,
        start: Point2,
        goal: Point2,
        events: Vec<TimedEvent>,
    ) -> Result<Self, ScenarioError> {
        let scenario = Self { world, start, goal, events };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), ScenarioError> {
        for (name, p) in [("start", self.start), ("goal", self.goal)] {
            if !p.is_finite() {
                return Err(invalid(name, "coordinates must be finite"));
            }
            if !self.world.bounds.contains(p) {
                return Err(invalid(name, "outside the world bounds"));
            }
            if self.world.clearance(p) == 0.0 {
                return Err(invalid(name, "inside an obstacle at t = 0"));
            }
        }
        if self.start == self.goal {
            return Err(invalid("goal", "coincides with start"));
        }
        let mut obstacle_count = self.world.obstacle_count();
        let mut prev_t = f64::NEG_INFINITY;
        for (i, event) in self.events.iter().enumerate() {
            if !event.time.is_finite() || event.time < 0.0 {
                return Err(invalid(format!("events[{i}].t"), "must be finite and >= 0"));
            }
            if event.time < prev_t {
                return Err(invalid(format!("events[{i}].t"), "event times must be non-decreasing"));
            }
            prev_t = event.time;
            match &event.action {
                WorldAction::Add(_) => obstacle_count += 1,
                WorldAction::Remove(index) => {
                    if *index >= obstacle_count {
                        return Err(invalid(
                            format!("events[{i}].remove"),
                            format!("index {index} out of range ({obstacle_count} obstacles at that time)"),
                        ));
                    }
                    obstacle_count -= 1;
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let bounds = Bounds::new(file.bounds.w, file.bounds.h)
            .map_err(|e| invalid("bounds", e.to_string()))?;
        let mut obstacles = Vec::with_capacity(file.obstacles.len());
        for (i, ob) in file.obstacles.iter().enumerate() {
            obstacles.push(obstacle_from_file(ob, &format!("obstacles[{i}]"))?);
        }
        let mut events = Vec::with_capacity(file.events.len());
        for (i, event) in file.events.iter().enumerate() {
            let action = match (&event.add, &event.remove) {
                (Some(ob), None) => {
                    WorldAction::Add(obstacle_from_file(ob, &format!("events[{i}].add"))?)
                }
                (None, Some(index)) => WorldAction::Remove(*index),
                _ => {
                    return Err(invalid(
                        format!("events[{i}]"),
                        "must carry exactly one of `add` or `remove`",
                    ))
                }
            };
            events.push(TimedEvent { time: event.t, action });
        }
        Scenario::new(
            World::new(bounds, obstacles),
            Point2::new(file.start[0], file.start[1]),
            Point2::new(file.goal[0], file.goal[1]),
            events,
        )
    }

    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            bounds: BoundsFile { w: self.world.bounds.width, h: self.world.bounds.height },
            obstacles: self.world.obstacles.iter().map(obstacle_to_file).collect(),
            start: [self.start.x, self.start.y],
            goal: [self.goal.x, self.goal.y],
            events: self
                .events
                .iter()
                .map(|e| match &e.action {
                    WorldAction::Add(ob) => {
                        EventFile { t: e.time, add: Some(obstacle_to_file(ob)), remove: None }
                    }
                    WorldAction::Remove(index) => {
                        EventFile { t: e.time, add: None, remove: Some(*index) }
                    }
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("scenario serialization cannot fail")
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        fs::write(path, self.to_json())
            .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })
    }
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    states: Vec<[f64; 4]>,
    outcome: PlanOutcome,
}

pub fn plan_to_json(plan: &Plan) -> String {
    let file = PlanFile {
        states: plan
            .states
            .iter()
            .map(|s| [s.position.x, s.position.y, s.heading, s.t])
            .collect(),
        outcome: plan.outcome,
    };
    serde_json::to_string(&file).expect("plan serialization cannot fail")
}

/// The step interval is recovered from the first two timestamps; a
/// single-state plan gets the default.
pub fn plan_from_json(text: &str) -> Result<Plan, ScenarioError> {
    let file: PlanFile = serde_json::from_str(text)?;
    if file.states.is_empty() {
        return Err(invalid("states", "a plan contains at least its start state"));
    }
    let states: Vec<State> = file
        .states
        .iter()
        .map(|&[x, y, heading, t]| State { position: Point2::new(x, y), heading, t })
        .collect();
    let dt = if states.len() >= 2 { states[1].t - states[0].t } else { 0.1 };
    Ok(Plan { states, outcome: file.outcome, dt })
}
