//! Built-in scenarios used by the test suites and shipped as JSON under
//! `scenarios/`. All live in the default 300 x 300 m world.

use crate::geometry::{Bounds, Obstacle, Point2, World};
use crate::scenario::Scenario;

fn pt(x: f64, y: f64) -> Point2 {
    Point2::new(x, y)
}

fn rect(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Obstacle {
    Obstacle::polygon(vec![
        pt(min_x, min_y),
        pt(max_x, min_y),
        pt(max_x, max_y),
        pt(min_x, max_y),
    ])
    .expect("axis-aligned rectangle is convex and counter-clockwise")
}

fn circle(x: f64, y: f64, r: f64) -> Obstacle {
    Obstacle::circle(pt(x, y), r).expect("positive radius")
}

fn world(obstacles: Vec<Obstacle>) -> World {
    World::new(Bounds::new(300.0, 300.0).unwrap(), obstacles)
}

/// A U-shaped pocket between start and goal, opening toward the start: the
/// classic local-minimum trap for a greedy attractive field. The straight
/// start-goal line runs into the closed side.
pub fn u_trap() -> Scenario {
    let obstacles = vec![
        // Closed (east) side of the U.
        rect(160.0, 105.0, 170.0, 195.0),
        // Upper arm.
        rect(100.0, 185.0, 170.0, 195.0),
        // Lower arm.
        rect(100.0, 105.0, 170.0, 115.0),
    ];
    Scenario::new(world(obstacles), pt(60.0, 150.0), pt(240.0, 150.0), Vec::new())
        .expect("preset scenario is valid")
}

/// Scattered circles and boxes with street-like gaps; the benchmark world
/// for node-count decay and replanning latency.
pub fn cluttered() -> Scenario {
    let obstacles = vec![
        circle(60.0, 60.0, 16.0),
        circle(125.0, 40.0, 14.0),
        circle(200.0, 55.0, 18.0),
        circle(262.0, 35.0, 12.0),
        circle(35.0, 130.0, 13.0),
        circle(105.0, 115.0, 17.0),
        circle(175.0, 120.0, 15.0),
        circle(245.0, 110.0, 16.0),
        circle(70.0, 200.0, 15.0),
        circle(140.0, 185.0, 14.0),
        circle(215.0, 180.0, 17.0),
        circle(280.0, 170.0, 10.0),
        circle(45.0, 262.0, 14.0),
        circle(118.0, 255.0, 16.0),
        circle(250.0, 250.0, 15.0),
        rect(160.0, 225.0, 190.0, 265.0),
        rect(25.0, 25.0, 40.0, 45.0),
        rect(282.0, 75.0, 296.0, 95.0),
    ];
    Scenario::new(world(obstacles), pt(15.0, 15.0), pt(285.0, 285.0), Vec::new())
        .expect("preset scenario is valid")
}

/// A wall across the middle with two corridors through it, so the bank can
/// hold genuinely distinct routes; used by the replanning tests.
pub fn two_corridors() -> Scenario {
    let obstacles = vec![
        rect(140.0, 0.0, 160.0, 80.0),
        rect(140.0, 120.0, 160.0, 180.0),
        rect(140.0, 220.0, 160.0, 300.0),
    ];
    Scenario::new(world(obstacles), pt(50.0, 150.0), pt(250.0, 150.0), Vec::new())
        .expect("preset scenario is valid")
}

/// Two circles straddling the direct route, forcing an S-shaped swerve.
/// The naive field succeeds here, which makes it the comparison scenario
/// for the optimizer.
pub fn sparse() -> Scenario {
    let obstacles = vec![
        circle(120.0, 158.0, 14.0),
        circle(190.0, 138.0, 14.0),
    ];
    Scenario::new(world(obstacles), pt(30.0, 150.0), pt(270.0, 150.0), Vec::new())
        .expect("preset scenario is valid")
}

/// Obstacle-free world.
pub fn empty() -> Scenario {
    Scenario::new(world(Vec::new()), pt(20.0, 20.0), pt(280.0, 280.0), Vec::new())
        .expect("preset scenario is valid")
}
