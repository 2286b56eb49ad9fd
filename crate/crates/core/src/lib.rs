//! 2D motion planning with force fields guided by prior paths.
//!
//! The toolkit combines three pieces: a force-field planner whose directive
//! force tracks the nearest segment of a prior path, an RRT path generator
//! whose sampling region shrinks to an ellipse bounded by the best path
//! length found so far, and a genetic optimizer that tunes the force
//! weights against length, safety, and smoothness objectives. A
//! deterministic simulator with reactive replanning, two benchmarks, SVG
//! rendering, and a CLI sit on top.

pub mod bank;
pub mod cli;
pub mod evolution;
pub mod field;
pub mod geometry;
pub mod presets;
pub mod render;
pub mod rrt;
pub mod scenario;
pub mod sim;
