//! Bounded, length-sorted store of prior paths.
//!
//! The bank starts with the trivial single-segment path so planning behaves
//! like the naive field until a real path arrives, hands paths out through
//! a roulette wheel weighted by reciprocal length, and drops entries that a
//! world change has invalidated.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{Point2, PriorPath, World};

pub const DEFAULT_BANK_CAPACITY: usize = 100;
/// Endpoint matching tolerance for inserted paths, in meters.
pub const DEFAULT_ENDPOINT_TOLERANCE: f64 = 2.0;

#[derive(Debug, Error, PartialEq)]
pub enum BankError {
    #[error("start and goal coincide")]
    StartEqualsGoal,
    #[error("bank capacity must be positive")]
    ZeroCapacity,
}

/// Why an insert was refused.
#[derive(Debug, Error, PartialEq)]
pub enum InsertReject {
    #[error("path {which} endpoint is {distance:.3} m from the bank's, beyond tolerance {tolerance:.3} m")]
    EndpointMismatch { which: &'static str, distance: f64, tolerance: f64 },
    #[error("identical path already stored")]
    Duplicate,
    #[error("bank is full and the path is no shorter than the longest entry")]
    WouldEvictImmediately,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BankEntry {
    pub path: PriorPath,
    /// Cached total length of `path`.
    pub length: f64,
    /// Set only on the single-segment start-goal initializer.
    pub trivial: bool,
}

#[derive(Debug, Clone)]
pub struct PathBank {
    capacity: usize,
    start: Point2,
    goal: Point2,
    endpoint_tol: f64,
    entries: Vec<BankEntry>,
}

impl PathBank {
    /// A fresh bank holding exactly the trivial start-goal segment.
    pub fn new(start: Point2, goal: Point2, capacity: usize) -> Result<Self, BankError> {
        Self::with_tolerance(start, goal, capacity, DEFAULT_ENDPOINT_TOLERANCE)
    }

    pub fn with_tolerance(
        start: Point2,
        goal: Point2,
        capacity: usize,
        endpoint_tol: f64,
    ) -> Result<Self, BankError> {
        if capacity == 0 {
            return Err(BankError::ZeroCapacity);
        }
        if start == goal {
            return Err(BankError::StartEqualsGoal);
        }
        let mut bank = Self { capacity, start, goal, endpoint_tol, entries: Vec::new() };
        bank.entries.push(bank.trivial_entry());
        Ok(bank)
    }

    fn trivial_entry(&self) -> BankEntry {
        let path = PriorPath::new(vec![self.start, self.goal]).expect("start != goal");
        let length = path.total_length();
        BankEntry { path, length, trivial: true }
    }

    pub fn start(&self) -> Point2 {
        self.start
    }

    pub fn goal(&self) -> Point2 {
        self.goal
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in ascending length order.
    pub fn entries(&self) -> &[BankEntry] {
        &self.entries
    }

    /// Shortest stored entry.
    pub fn shortest(&self) -> &BankEntry {
        &self.entries[0]
    }

    /// Insert a path, keeping ascending length order. Duplicates and paths
    /// that would be evicted immediately are refused; the trivial entry is
    /// dropped on the first real insert if its segment collides.
    pub fn insert(
        &mut self,
        path: PriorPath,
        world: &World,
        inflation: f64,
    ) -> Result<(), InsertReject> {
        let start_dist = path.first().distance(self.start);
        if start_dist > self.endpoint_tol {
            return Err(InsertReject::EndpointMismatch {
                which: "start",
                distance: start_dist,
                tolerance: self.endpoint_tol,
            });
        }
        let goal_dist = path.last().distance(self.goal);
        if goal_dist > self.endpoint_tol {
            return Err(InsertReject::EndpointMismatch {
                which: "goal",
                distance: goal_dist,
                tolerance: self.endpoint_tol,
            });
        }
        if self.entries.iter().any(|e| e.path.vertices() == path.vertices()) {
            return Err(InsertReject::Duplicate);
        }

        // The trivial placeholder gives way once a real path exists, unless
        // its straight segment is genuinely usable.
        if let Some(pos) = self.entries.iter().position(|e| e.trivial) {
            let trivial = &self.entries[pos];
            if !world.path_collision_free(&trivial.path, inflation) {
                self.entries.remove(pos);
            }
        }

        let length = path.total_length();
        if self.entries.len() == self.capacity {
            let longest = self.entries.last().expect("bank is never empty").length;
            if length >= longest {
                return Err(InsertReject::WouldEvictImmediately);
            }
        }
        let pos = self.entries.partition_point(|e| e.length <= length);
        self.entries.insert(pos, BankEntry { path, length, trivial: false });
        if self.entries.len() > self.capacity {
            self.entries.pop();
        }
        Ok(())
    }

    /// Roulette-wheel draw with probability proportional to 1/length.
    pub fn select_roulette(&self, rng: &mut ChaCha8Rng) -> &BankEntry {
        let total: f64 = self.entries.iter().map(|e| 1.0 / e.length).sum();
        let mut ticket = rng.gen_range(0.0..1.0) * total;
        for entry in &self.entries {
            ticket -= 1.0 / entry.length;
            if ticket <= 0.0 {
                return entry;
            }
        }
        self.entries.last().expect("bank is never empty")
    }

    /// Selection probabilities in entry order; sums to 1.
    pub fn roulette_probabilities(&self) -> Vec<f64> {
        let total: f64 = self.entries.iter().map(|e| 1.0 / e.length).sum();
        self.entries.iter().map(|e| (1.0 / e.length) / total).collect()
    }

    /// Drop every entry invalidated by the current world. An emptied bank
    /// re-seeds itself with the trivial entry so a prior path always exists.
    /// Returns the number of entries removed.
    pub fn invalidate(&mut self, world: &World, inflation: f64) -> usize {
        let before = self.entries.len();
        self.entries.retain(|e| world.path_collision_free(&e.path, inflation));
        if self.entries.is_empty() {
            self.entries.push(self.trivial_entry());
        }
        before - self.entries.len().min(before)
    }
}
