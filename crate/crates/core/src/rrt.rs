//! Prior-path generation: a seeded RRT over a sampling region, greedy path
//! simplification, and the iterative elliptic restriction that confines
//! later searches to an ellipse whose major axis is the best path length
//! found so far.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use thiserror::Error;

use crate::geometry::{
    Point2, PriorPath, SamplingRegion, Segment, World, DEFAULT_FOOTPRINT_INFLATION,
};

/// Rejection-sampling budget before a region is declared too small.
const MAX_REJECTIONS: usize = 100_000;

#[derive(Debug, Error, PartialEq)]
pub enum RrtError {
    #[error("{0} is in collision or outside the sampling region")]
    InvalidEndpoint(&'static str),
    #[error("sampling region too small: {MAX_REJECTIONS} consecutive rejections")]
    RegionTooSmall,
}

/// Extra clearance the path generator keeps beyond the robot footprint, so
/// the field planner can cut corners around path vertices without losing
/// its own collision margin.
pub const PATH_CLEARANCE_MARGIN: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct RrtConfig {
    pub step_size: f64,
    /// Probability of sampling the goal instead of the region.
    pub goal_bias: f64,
    pub max_iters: usize,
    pub goal_radius: f64,
    /// Collision inflation for tree edges and path segments.
    pub inflation: f64,
    pub seed: u64,
}

impl Default for RrtConfig {
    fn default() -> Self {
        Self {
            step_size: 5.0,
            goal_bias: 0.05,
            max_iters: 10_000,
            goal_radius: 2.0,
            inflation: DEFAULT_FOOTPRINT_INFLATION + PATH_CLEARANCE_MARGIN,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RrtNode {
    pub point: Point2,
    /// None only for the root.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct RrtTree {
    pub nodes: Vec<RrtNode>,
}

impl RrtTree {
    fn rooted_at(start: Point2) -> Self {
        Self { nodes: vec![RrtNode { point: start, parent: None }] }
    }

    fn nearest(&self, p: Point2) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, node) in self.nodes.iter().enumerate() {
            let d = (node.point - p).norm_sq();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    fn walk_to_root(&self, mut index: usize) -> Vec<Point2> {
        let mut points = vec![self.nodes[index].point];
        while let Some(parent) = self.nodes[index].parent {
            index = parent;
            points.push(self.nodes[index].point);
        }
        points.reverse();
        points
    }
}

#[derive(Debug, Clone)]
pub struct RrtResult {
    /// Absent when no path was found within `max_iters`.
    pub path: Option<PriorPath>,
    pub node_count: usize,
    pub iterations_used: usize,
}

/// Draw a point uniformly from the region by rejection against the base
/// rectangle.
pub fn sample_region(region: &SamplingRegion, rng: &mut ChaCha8Rng) -> Result<Point2, RrtError> {
    for _ in 0..MAX_REJECTIONS {
        let p = Point2::new(
            rng.gen_range(0.0..region.base.width),
            rng.gen_range(0.0..region.base.height),
        );
        if region.contains(p) {
            return Ok(p);
        }
    }
    Err(RrtError::RegionTooSmall)
}

/// Grow an RRT from `start` until a node connects to the goal disc.
///
/// Sampling draws the goal with probability `goal_bias`, otherwise a region
/// point; the nearest tree node is extended by at most `step_size`, and the
/// edge is kept only when collision-free. On success the path is the parent
/// walk with the goal appended. Exhausted sampling inside a degenerate
/// region counts as a failed search, not an error.
pub fn rrt_plan(
    start: Point2,
    goal: Point2,
    world: &World,
    region: &SamplingRegion,
    cfg: &RrtConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RrtResult, RrtError> {
    if !world.point_collision_free(start, cfg.inflation) || !region.contains(start) {
        return Err(RrtError::InvalidEndpoint("start"));
    }
    if !world.point_collision_free(goal, cfg.inflation) || !region.contains(goal) {
        return Err(RrtError::InvalidEndpoint("goal"));
    }

    let mut tree = RrtTree::rooted_at(start);
    let mut iterations_used = 0;

    for iter in 1..=cfg.max_iters {
        iterations_used = iter;
        let target = if rng.gen_bool(cfg.goal_bias) {
            goal
        } else {
            match sample_region(region, rng) {
                Ok(p) => p,
                // Degenerate region: report the search as failed.
                Err(RrtError::RegionTooSmall) => break,
                Err(e) => return Err(e),
            }
        };

        let nearest_idx = tree.nearest(target);
        let nearest = tree.nodes[nearest_idx].point;
        let offset = target - nearest;
        let dist = offset.norm();
        if dist < 1e-12 {
            continue;
        }
        let new_point = if dist <= cfg.step_size {
            target
        } else {
            nearest + offset * (cfg.step_size / dist)
        };
        let edge = Segment::new(nearest, new_point);
        if !world.segment_collision_free(&edge, cfg.inflation) {
            continue;
        }
        tree.nodes.push(RrtNode { point: new_point, parent: Some(nearest_idx) });

        if new_point.distance(goal) <= cfg.goal_radius {
            let connects = new_point == goal
                || world.segment_collision_free(&Segment::new(new_point, goal), cfg.inflation);
            if !connects {
                continue;
            }
            let mut points = tree.walk_to_root(tree.nodes.len() - 1);
            if *points.last().unwrap() != goal {
                points.push(goal);
            }
            let path = PriorPath::new(points).expect("tree path has distinct vertices");
            return Ok(RrtResult {
                path: Some(path),
                node_count: tree.nodes.len(),
                iterations_used,
            });
        }
    }

    Ok(RrtResult { path: None, node_count: tree.nodes.len(), iterations_used })
}

/// Greedy shortcutting: from each anchor vertex, jump to the farthest later
/// vertex reachable by a collision-free straight segment. Endpoints are
/// preserved and the result is never longer than the input.
pub fn simplify_path(path: &PriorPath, world: &World, inflation: f64) -> PriorPath {
    let vertices = path.vertices();
    let mut kept = vec![vertices[0]];
    let mut anchor = 0;
    let last = vertices.len() - 1;
    while anchor < last {
        let mut next = anchor + 1;
        for candidate in (anchor + 2..=last).rev() {
            let seg = Segment::new(vertices[anchor], vertices[candidate]);
            if world.segment_collision_free(&seg, inflation) {
                next = candidate;
                break;
            }
        }
        kept.push(vertices[next]);
        anchor = next;
    }
    PriorPath::new(kept).expect("shortcutting keeps distinct endpoints")
}

/// One round of the iterated generator: the path found (simplified), or
/// absent on failure, plus the tree size the search needed.
#[derive(Debug, Clone)]
pub struct PathIteration {
    pub path: Option<PriorPath>,
    pub node_count: usize,
}

/// Run the generator `iters` times, shrinking the sampling region after
/// every success to the ellipse bounded by the simplified path's length.
/// Failed iterations keep the previous region.
pub fn iterate_paths(
    start: Point2,
    goal: Point2,
    world: &World,
    iters: usize,
    cfg: &RrtConfig,
) -> Result<Vec<PathIteration>, RrtError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut region = SamplingRegion::from_bounds(world.bounds);
    let mut rounds = Vec::with_capacity(iters);
    for _ in 0..iters {
        let result = rrt_plan(start, goal, world, &region, cfg, &mut rng)?;
        match result.path {
            Some(raw) => {
                let simplified = simplify_path(&raw, world, cfg.inflation);
                region = region
                    .shrunk(start, goal, simplified.total_length())
                    .expect("path length is at least the focal distance");
                rounds.push(PathIteration {
                    path: Some(simplified),
                    node_count: result.node_count,
                });
            }
            None => rounds.push(PathIteration { path: None, node_count: result.node_count }),
        }
    }
    Ok(rounds)
}
