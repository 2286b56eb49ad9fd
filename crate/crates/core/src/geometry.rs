//! Core 2D types: points, vectors, segments, polyline paths, obstacles,
//! world bounds, and the elliptic sampling regions used to confine search.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Distances are in meters.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Default collision inflation radius: half the diagonal of a 2.5 x 5 m
/// vehicle footprint, a rotation-invariant conservative disc bound.
pub const DEFAULT_FOOTPRINT_INFLATION: f64 = 2.795_084_971_874_737;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("segment endpoints coincide at ({0}, {1})")]
    DegenerateSegment(f64, f64),
    #[error("path needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("consecutive path vertices {0} and {1} coincide")]
    RepeatedVertex(usize, usize),
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("circle radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("polygon needs at least three vertices, got {0}")]
    TooFewPolygonVertices(usize),
    #[error("polygon is not strictly convex and counter-clockwise at vertex {0}")]
    NotConvexCcw(usize),
    #[error("bounds must have positive area, got {0} x {1}")]
    EmptyBounds(f64, f64),
    #[error("ellipse major length {major} is shorter than the focal distance {focal}")]
    EllipseTooShort { major: f64, focal: f64 },
}

/// A position in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: Point2) -> f64 {
        (*self - other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Midpoint between `self` and `other`.
    pub fn midpoint(&self, other: Point2) -> Point2 {
        Point2::new((self.x + other.x) / 2.0, (self.y + other.y) / 2.0)
    }
}

/// A displacement or force vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_heading(heading: f64) -> Self {
        Self::new(heading.cos(), heading.sin())
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dot(&self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// 2D cross product (z component of the 3D cross).
    pub fn cross(&self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vec2> {
        let n = self.norm();
        if n > 0.0 {
            Some(Vec2::new(self.x / n, self.y / n))
        } else {
            None
        }
    }

    pub fn heading(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Sub for Point2 {
    type Output = Vec2;
    fn sub(self, rhs: Point2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Add<Vec2> for Point2 {
    type Output = Point2;
    fn add(self, rhs: Vec2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// A directed line segment with strictly positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: Point2,
    pub end: Point2,
}

impl Segment {
    /// Panics if the endpoints coincide; path-level constructors validate
    /// first and report `GeometryError` instead.
    pub fn new(start: Point2, end: Point2) -> Self {
        assert!(start != end, "degenerate segment at ({}, {})", start.x, start.y);
        Self { start, end }
    }

    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }

    /// Unit vector from start to end.
    pub fn direction(&self) -> Vec2 {
        (self.end - self.start).normalized().expect("segment has positive length")
    }

    /// Closest point of the closed segment to `p`.
    pub fn closest_point(&self, p: Point2) -> Point2 {
        let d = self.end - self.start;
        let t = ((p - self.start).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
        self.start + d * t
    }

    pub fn distance_to_point(&self, p: Point2) -> f64 {
        p.distance(self.closest_point(p))
    }

    /// Normalized focal-sum distance: (|p - start| + |p - end|) / length.
    /// Always >= 1, with equality exactly on the closed segment; the level
    /// sets are ellipses with the endpoints as foci.
    pub fn elliptic_distance(&self, p: Point2) -> f64 {
        (p.distance(self.start) + p.distance(self.end)) / self.length()
    }

    /// Minimum distance between two closed segments, zero if they intersect.
    pub fn distance_to_segment(&self, other: &Segment) -> f64 {
        if self.intersects(other) {
            return 0.0;
        }
        self.distance_to_point(other.start)
            .min(self.distance_to_point(other.end))
            .min(other.distance_to_point(self.start))
            .min(other.distance_to_point(self.end))
    }

    /// Closed-segment intersection test, collinear overlaps included.
    pub fn intersects(&self, other: &Segment) -> bool {
        let d1 = self.end - self.start;
        let d2 = other.end - other.start;
        let denom = d1.cross(d2);
        let offset = other.start - self.start;
        if denom != 0.0 {
            let t = offset.cross(d2) / denom;
            let u = offset.cross(d1) / denom;
            return (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u);
        }
        // Parallel: overlapping only if collinear.
        if offset.cross(d1) != 0.0 {
            return false;
        }
        let len_sq = d1.norm_sq();
        let t0 = offset.dot(d1) / len_sq;
        let t1 = t0 + d2.dot(d1) / len_sq;
        let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        hi >= 0.0 && lo <= 1.0
    }
}

/// A collision-free polyline between start and goal; the source of the
/// directive force and the content of the path bank.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorPath {
    vertices: Vec<Point2>,
}

impl PriorPath {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(GeometryError::NonFinite);
            }
            if i > 0 && vertices[i - 1] == *v {
                return Err(GeometryError::RepeatedVertex(i - 1, i));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn first(&self) -> Point2 {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2 {
        *self.vertices.last().unwrap()
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, i: usize) -> Segment {
        Segment::new(self.vertices[i], self.vertices[i + 1])
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn total_length(&self) -> f64 {
        self.segments().map(|s| s.length()).sum()
    }

    /// Index of the segment with minimal elliptic distance to `p`; ties go
    /// to the lowest index.
    pub fn nearest_segment(&self, p: Point2) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, seg) in self.segments().enumerate() {
            let d = seg.elliptic_distance(p);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Euclidean distance from `p` to the polyline.
    pub fn distance_to(&self, p: Point2) -> f64 {
        self.segments()
            .map(|s| s.distance_to_point(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewPolygonVertices(vertices.len()));
        }
        let n = vertices.len();
        for i in 0..n {
            if !vertices[i].is_finite() {
                return Err(GeometryError::NonFinite);
            }
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(GeometryError::NotConvexCcw(i));
            }
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle helper.
    pub fn rect(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Result<Self, GeometryError> {
        Self::new(vec![
            Point2::new(min_x, min_y),
            Point2::new(max_x, min_y),
            Point2::new(max_x, max_y),
            Point2::new(min_x, max_y),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Closed containment: boundary points count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            (b - a).cross(p - a) >= 0.0
        })
    }

    pub fn nearest_boundary_point(&self, p: Point2) -> Point2 {
        let mut best = self.vertices[0];
        let mut best_d = f64::INFINITY;
        for edge in self.edges() {
            let q = edge.closest_point(p);
            let d = p.distance(q);
            if d < best_d {
                best_d = d;
                best = q;
            }
        }
        best
    }
}

/// A solid obstacle: circle or strictly convex polygon. Concave shapes are
/// modeled as unions of these.
#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    Circle { center: Point2, radius: f64 },
    Polygon(ConvexPolygon),
}

impl Obstacle {
    pub fn circle(center: Point2, radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(GeometryError::NonPositiveRadius(radius));
        }
        Ok(Obstacle::Circle { center, radius })
    }

    pub fn polygon(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        Ok(Obstacle::Polygon(ConvexPolygon::new(vertices)?))
    }

    /// Closed containment: the boundary belongs to the obstacle.
    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Obstacle::Circle { center, radius } => p.distance(*center) <= *radius,
            Obstacle::Polygon(poly) => poly.contains(p),
        }
    }

    /// Boundary point minimizing Euclidean distance to `p`. Defined for
    /// interior points too; the caller detects containment separately.
    pub fn nearest_boundary_point(&self, p: Point2) -> Point2 {
        match self {
            Obstacle::Circle { center, radius } => {
                let dir = (p - *center)
                    .normalized()
                    .unwrap_or(Vec2::new(1.0, 0.0));
                *center + dir * *radius
            }
            Obstacle::Polygon(poly) => poly.nearest_boundary_point(p),
        }
    }

    /// Distance from `p` to the solid obstacle: zero inside or on the
    /// boundary, Euclidean distance to the boundary outside.
    pub fn distance(&self, p: Point2) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        p.distance(self.nearest_boundary_point(p))
    }

    /// Minimum distance from a segment to the solid obstacle; zero if any
    /// part of the segment touches or enters it.
    pub fn segment_distance(&self, seg: &Segment) -> f64 {
        match self {
            Obstacle::Circle { center, radius } => {
                (seg.distance_to_point(*center) - radius).max(0.0)
            }
            Obstacle::Polygon(poly) => {
                if poly.contains(seg.start) || poly.contains(seg.end) {
                    return 0.0;
                }
                let mut best = f64::INFINITY;
                for edge in poly.edges() {
                    let d = seg.distance_to_segment(&edge);
                    if d == 0.0 {
                        return 0.0;
                    }
                    best = best.min(d);
                }
                best
            }
        }
    }
}

/// Axis-aligned world rectangle with its lower-left corner at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub width: f64,
    pub height: f64,
}

impl Bounds {
    pub fn new(width: f64, height: f64) -> Result<Self, GeometryError> {
        if !(width > 0.0 && height > 0.0) || !width.is_finite() || !height.is_finite() {
            return Err(GeometryError::EmptyBounds(width, height));
        }
        Ok(Self { width, height })
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }
}

/// The planning environment: bounds plus obstacles.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub bounds: Bounds,
    pub obstacles: Vec<Obstacle>,
}

impl World {
    pub fn new(bounds: Bounds, obstacles: Vec<Obstacle>) -> Self {
        Self { bounds, obstacles }
    }

    pub fn empty(width: f64, height: f64) -> Result<Self, GeometryError> {
        Ok(Self::new(Bounds::new(width, height)?, Vec::new()))
    }

    pub fn obstacle_count(&self) -> usize {
        self.obstacles.len()
    }

    /// Minimum distance from `p` to any obstacle, capped at the bounds
    /// diagonal; zero if `p` is inside an obstacle.
    pub fn clearance(&self, p: Point2) -> f64 {
        let mut best = self.bounds.diagonal();
        for ob in &self.obstacles {
            best = best.min(ob.distance(p));
            if best == 0.0 {
                break;
            }
        }
        best
    }

    /// True when the inflated disc at `p` is clear of every obstacle.
    pub fn point_collision_free(&self, p: Point2, inflation: f64) -> bool {
        self.clearance(p) > inflation
    }

    /// True iff every point of `seg` keeps clearance strictly above
    /// `inflation`; touching an obstacle counts as a collision.
    pub fn segment_collision_free(&self, seg: &Segment, inflation: f64) -> bool {
        self.obstacles
            .iter()
            .all(|ob| ob.segment_distance(seg) > inflation)
    }

    /// True iff every segment of `path` is collision-free at `inflation`.
    pub fn path_collision_free(&self, path: &PriorPath, inflation: f64) -> bool {
        path.segments()
            .all(|seg| self.segment_collision_free(&seg, inflation))
    }
}

/// Closed elliptic region: focal-sum(p) <= major_len.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseRegion {
    pub focus1: Point2,
    pub focus2: Point2,
    pub major_len: f64,
}

impl EllipseRegion {
    pub fn new(focus1: Point2, focus2: Point2, major_len: f64) -> Result<Self, GeometryError> {
        let focal = focus1.distance(focus2);
        if !(major_len >= focal) || !major_len.is_finite() {
            return Err(GeometryError::EllipseTooShort { major: major_len, focal });
        }
        Ok(Self { focus1, focus2, major_len })
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.distance(self.focus1) + p.distance(self.focus2) <= self.major_len
    }
}

/// Sampling region: a base rectangle intersected with a stack of elliptic
/// constraints. Appending an ellipse never enlarges the region.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingRegion {
    pub base: Bounds,
    pub ellipses: Vec<EllipseRegion>,
}

impl SamplingRegion {
    pub fn from_bounds(base: Bounds) -> Self {
        Self { base, ellipses: Vec::new() }
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.base.contains(p) && self.ellipses.iter().all(|e| e.contains(p))
    }

    /// Intersect with the ellipse whose foci are `start`/`goal` and whose
    /// major axis is `path_length`, the bound a path of that length puts on
    /// the focal sum of its points.
    pub fn shrunk(
        &self,
        start: Point2,
        goal: Point2,
        path_length: f64,
    ) -> Result<SamplingRegion, GeometryError> {
        let ellipse = EllipseRegion::new(start, goal, path_length)?;
        let mut next = self.clone();
        next.ellipses.push(ellipse);
        Ok(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn elliptic_distance_on_segment_is_one() {
        let seg = Segment::new(pt(0.0, 0.0), pt(1.0, 0.0));
        assert_eq!(seg.elliptic_distance(pt(0.5, 0.0)), 1.0);
        assert_eq!(seg.elliptic_distance(pt(0.0, 0.0)), 1.0);
        assert_eq!(seg.elliptic_distance(pt(1.0, 0.0)), 1.0);
    }

    #[test]
    fn elliptic_distance_equilateral_apex() {
        // Apex of the equilateral triangle over a unit segment: (1 + 1) / 1.
        let seg = Segment::new(pt(0.0, 0.0), pt(1.0, 0.0));
        let apex = pt(0.5, 3.0_f64.sqrt() / 2.0);
        assert!((seg.elliptic_distance(apex) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_point_circle_radial() {
        let ob = Obstacle::circle(pt(0.0, 0.0), 1.0).unwrap();
        let q = ob.nearest_boundary_point(pt(3.0, 0.0));
        assert!(q.distance(pt(1.0, 0.0)) < 1e-12);
        assert!((ob.distance(pt(3.0, 0.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_point_square_edge_and_vertex() {
        let ob = Obstacle::polygon(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)])
            .unwrap();
        let edge = ob.nearest_boundary_point(pt(2.0, 0.5));
        assert!(edge.distance(pt(1.0, 0.5)) < 1e-12);
        let vertex = ob.nearest_boundary_point(pt(2.0, 2.0));
        assert!(vertex.distance(pt(1.0, 1.0)) < 1e-12);
    }

    #[test]
    fn nearest_point_inside_is_on_boundary_with_zero_distance() {
        let ob = Obstacle::circle(pt(0.0, 0.0), 2.0).unwrap();
        let inside = pt(0.5, 0.0);
        assert!(ob.contains(inside));
        assert_eq!(ob.distance(inside), 0.0);
        let q = ob.nearest_boundary_point(inside);
        assert!((q.distance(pt(0.0, 0.0)) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_point_at_circle_center_uses_fallback_direction() {
        let ob = Obstacle::circle(pt(1.0, 1.0), 2.0).unwrap();
        let q = ob.nearest_boundary_point(pt(1.0, 1.0));
        assert!(q.distance(pt(3.0, 1.0)) < 1e-12);
    }

    #[test]
    fn clearance_empty_world_caps_at_diagonal() {
        let world = World::empty(300.0, 300.0).unwrap();
        let cap = 300.0 * 2.0_f64.sqrt();
        assert!((world.clearance(pt(10.0, 20.0)) - cap).abs() < 1e-9);
    }

    #[test]
    fn clearance_single_circle() {
        let world = World::new(
            Bounds::new(300.0, 300.0).unwrap(),
            vec![Obstacle::circle(pt(0.0, 0.0), 1.0).unwrap()],
        );
        assert!((world.clearance(pt(3.0, 0.0)) - 2.0).abs() < 1e-12);
        assert_eq!(world.clearance(pt(0.2, 0.0)), 0.0);
    }

    #[test]
    fn segment_collision_semantics() {
        let world = World::new(
            Bounds::new(10.0, 10.0).unwrap(),
            vec![Obstacle::circle(pt(0.0, 0.0), 1.0).unwrap()],
        );
        let through = Segment::new(pt(-2.0, 0.0), pt(2.0, 0.0));
        assert!(!world.segment_collision_free(&through, 0.0));
        let above = Segment::new(pt(-2.0, 2.0), pt(2.0, 2.0));
        assert!(world.segment_collision_free(&above, 0.5));
        assert!(!world.segment_collision_free(&above, 1.5));
        // Touching counts as collision.
        let tangent = Segment::new(pt(-2.0, 1.0), pt(2.0, 1.0));
        assert!(!world.segment_collision_free(&tangent, 0.0));
        let empty = World::empty(10.0, 10.0).unwrap();
        assert!(empty.segment_collision_free(&through, 5.0));
    }

    #[test]
    fn segment_polygon_distance() {
        let ob = Obstacle::polygon(vec![pt(0.0, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)])
            .unwrap();
        // Crossing segment.
        assert_eq!(ob.segment_distance(&Segment::new(pt(-1.0, 0.5), pt(2.0, 0.5))), 0.0);
        // Endpoint inside.
        assert_eq!(ob.segment_distance(&Segment::new(pt(0.5, 0.5), pt(3.0, 3.0))), 0.0);
        // Clear segment 1 above the top edge.
        let d = ob.segment_distance(&Segment::new(pt(-1.0, 2.0), pt(2.0, 2.0)));
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_in_ellipse_cases() {
        let e = EllipseRegion::new(pt(0.0, 0.0), pt(4.0, 0.0), 5.0).unwrap();
        assert!(e.contains(pt(0.0, 0.0)));
        assert!(e.contains(pt(2.0, 0.0)));
        // Boundary point: 2 * sqrt(4 + 2.25) = 5.
        assert!(e.contains(pt(2.0, 1.5)));
        assert!(!e.contains(pt(2.0, 1.5 + 1e-9)));
    }

    #[test]
    fn ellipse_rejects_short_major_axis() {
        let err = EllipseRegion::new(pt(0.0, 0.0), pt(4.0, 0.0), 3.9).unwrap_err();
        assert!(matches!(err, GeometryError::EllipseTooShort { .. }));
    }

    #[test]
    fn polygon_validation() {
        // Clockwise square rejected.
        assert!(ConvexPolygon::new(vec![
            pt(0.0, 0.0),
            pt(0.0, 1.0),
            pt(1.0, 1.0),
            pt(1.0, 0.0)
        ])
        .is_err());
        // Collinear triple rejected (not strictly convex).
        assert!(ConvexPolygon::new(vec![
            pt(0.0, 0.0),
            pt(1.0, 0.0),
            pt(2.0, 0.0),
            pt(1.0, 1.0)
        ])
        .is_err());
        assert!(ConvexPolygon::rect(0.0, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn prior_path_validation_and_length() {
        assert!(PriorPath::new(vec![pt(0.0, 0.0)]).is_err());
        assert!(PriorPath::new(vec![pt(0.0, 0.0), pt(0.0, 0.0)]).is_err());
        let path = PriorPath::new(vec![pt(0.0, 0.0), pt(3.0, 0.0), pt(3.0, 4.0)]).unwrap();
        assert!((path.total_length() - 7.0).abs() < 1e-12);
        assert!(path.total_length() >= path.first().distance(path.last()));
    }

    #[test]
    fn sampling_region_shrinks_monotonically() {
        let base = Bounds::new(10.0, 10.0).unwrap();
        let region = SamplingRegion::from_bounds(base);
        let shrunk = region.shrunk(pt(1.0, 5.0), pt(9.0, 5.0), 9.0).unwrap();
        let mut checked = 0;
        for i in 0..100 {
            for j in 0..100 {
                let p = pt(i as f64 / 10.0, j as f64 / 10.0);
                if shrunk.contains(p) {
                    assert!(region.contains(p));
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn degenerate_shrink_keeps_only_focal_segment() {
        let base = Bounds::new(10.0, 10.0).unwrap();
        let region = SamplingRegion::from_bounds(base);
        let a = pt(2.0, 5.0);
        let b = pt(8.0, 5.0);
        let shrunk = region.shrunk(a, b, a.distance(b)).unwrap();
        assert!(shrunk.contains(pt(5.0, 5.0)));
        assert!(shrunk.contains(a));
        assert!(!shrunk.contains(pt(5.0, 5.001)));
        assert!(!shrunk.contains(pt(1.0, 5.0)));
    }

    /// Brute-force boundary oracle: discretize the obstacle boundary and
    /// check no sample beats the reported nearest point.
    fn assert_nearest_against_boundary_samples(ob: &Obstacle, query: Point2) {
        const SAMPLES: usize = 10_000;
        let nearest = ob.nearest_boundary_point(query);
        let reported = query.distance(nearest);
        let boundary: Vec<Point2> = match ob {
            Obstacle::Circle { center, radius } => (0..SAMPLES)
                .map(|i| {
                    let a = i as f64 / SAMPLES as f64 * std::f64::consts::TAU;
                    Point2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
                })
                .collect(),
            Obstacle::Polygon(poly) => {
                let perimeter: f64 = poly.edges().map(|e| e.length()).sum();
                let mut points = Vec::with_capacity(SAMPLES);
                for edge in poly.edges() {
                    let count = ((edge.length() / perimeter) * SAMPLES as f64).ceil() as usize;
                    let dir = edge.end - edge.start;
                    for i in 0..count {
                        points.push(edge.start + dir * (i as f64 / count as f64));
                    }
                }
                points
            }
        };
        let sampled_min = boundary
            .iter()
            .map(|p| query.distance(*p))
            .fold(f64::INFINITY, f64::min);
        assert!(
            reported <= sampled_min + 1e-6,
            "reported {reported} beats no boundary sample (min {sampled_min})"
        );
        // The reported point itself lies on the boundary.
        match ob {
            Obstacle::Circle { center, radius } => {
                assert!((nearest.distance(*center) - radius).abs() < 1e-9);
            }
            Obstacle::Polygon(poly) => {
                let on_edge = poly
                    .edges()
                    .map(|e| e.distance_to_point(nearest))
                    .fold(f64::INFINITY, f64::min);
                assert!(on_edge < 1e-9);
            }
        }
    }

    #[test]
    fn nearest_point_matches_boundary_discretization_oracle() {
        let circle = Obstacle::circle(pt(3.0, -2.0), 4.5).unwrap();
        let triangle =
            Obstacle::polygon(vec![pt(0.0, 0.0), pt(8.0, 1.0), pt(3.0, 6.0)]).unwrap();
        let box_ob = Obstacle::polygon(vec![
            pt(-2.0, -2.0),
            pt(2.0, -2.0),
            pt(2.0, 3.0),
            pt(-2.0, 3.0),
        ])
        .unwrap();
        let queries = [
            pt(10.0, 10.0),
            pt(-7.0, 2.0),
            pt(3.0, -2.0),
            pt(0.5, 0.5),
            pt(4.0, 7.5),
            pt(-3.0, -9.0),
        ];
        for ob in [&circle, &triangle, &box_ob] {
            for q in queries {
                assert_nearest_against_boundary_samples(ob, q);
            }
        }
    }

    #[test]
    fn segment_intersection_cases() {
        let a = Segment::new(pt(0.0, 0.0), pt(2.0, 2.0));
        let b = Segment::new(pt(0.0, 2.0), pt(2.0, 0.0));
        assert!(a.intersects(&b));
        let c = Segment::new(pt(3.0, 0.0), pt(3.0, 2.0));
        assert!(!a.intersects(&c));
        // Collinear overlap.
        let d = Segment::new(pt(1.0, 1.0), pt(3.0, 3.0));
        assert!(a.intersects(&d));
        let e = Segment::new(pt(3.0, 3.0), pt(4.0, 4.0));
        assert!(!a.intersects(&e));
        assert_eq!(a.distance_to_segment(&b), 0.0);
        let f = Segment::new(pt(0.0, 3.0), pt(2.0, 3.0));
        assert!((Segment::new(pt(0.0, 0.0), pt(2.0, 0.0)).distance_to_segment(&f) - 3.0).abs() < 1e-12);
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn coord() -> impl Strategy<Value = f64> {
        -200.0..200.0f64
    }

    fn segment() -> impl Strategy<Value = Segment> {
        (coord(), coord(), coord(), coord())
            .prop_filter("distinct endpoints", |(ax, ay, bx, by)| {
                Point2::new(*ax, *ay).distance(Point2::new(*bx, *by)) > 1e-3
            })
            .prop_map(|(ax, ay, bx, by)| {
                Segment::new(Point2::new(ax, ay), Point2::new(bx, by))
            })
    }

    proptest! {
        #[test]
        fn elliptic_distance_at_least_one(seg in segment(), x in coord(), y in coord()) {
            let d = seg.elliptic_distance(Point2::new(x, y));
            prop_assert!(d >= 1.0 - 1e-12);
        }

        #[test]
        fn elliptic_distance_is_one_on_segment(seg in segment(), t in 0.0..=1.0f64) {
            let p = seg.start + (seg.end - seg.start) * t;
            prop_assert!((seg.elliptic_distance(p) - 1.0).abs() < 1e-9);
        }

        /// Points built on a level set c satisfy the focal-sum identity
        /// |s - a| + |s - b| = c * L: the level sets are ellipses with the
        /// segment endpoints as foci.
        #[test]
        fn elliptic_level_sets_are_ellipses(
            seg in segment(),
            c in prop::sample::select(vec![1.5, 2.0, 3.0]),
            angle in 0.0..std::f64::consts::TAU,
        ) {
            let len = seg.length();
            let semi_major = c * len / 2.0;
            let semi_minor = (semi_major * semi_major - (len / 2.0) * (len / 2.0)).sqrt();
            let center = seg.start.midpoint(seg.end);
            let axis = seg.direction();
            let local = Vec2::new(semi_major * angle.cos(), semi_minor * angle.sin());
            let s = center
                + Vec2::new(
                    axis.x * local.x - axis.y * local.y,
                    axis.y * local.x + axis.x * local.y,
                );
            let focal_sum = s.distance(seg.start) + s.distance(seg.end);
            prop_assert!(
                (focal_sum - c * len).abs() < 1e-9,
                "focal sum {} vs {}",
                focal_sum,
                c * len
            );
            prop_assert!((seg.elliptic_distance(s) - c).abs() < 1e-9);
        }

        #[test]
        fn ellipse_membership_monotone_in_major_len(
            fx in coord(), fy in coord(), gx in coord(), gy in coord(),
            px in coord(), py in coord(),
            slack in 0.0..100.0f64, extra in 0.0..100.0f64,
        ) {
            let f1 = Point2::new(fx, fy);
            let f2 = Point2::new(gx, gy);
            let focal = f1.distance(f2);
            let tight = EllipseRegion::new(f1, f2, focal + slack).unwrap();
            let loose = EllipseRegion::new(f1, f2, focal + slack + extra).unwrap();
            let p = Point2::new(px, py);
            if tight.contains(p) {
                prop_assert!(loose.contains(p));
            }
        }

        #[test]
        fn region_shrink_never_admits_new_points(
            px in 0.0..100.0f64, py in 0.0..100.0f64,
            fx in 0.0..100.0f64, fy in 0.0..100.0f64,
            gx in 0.0..100.0f64, gy in 0.0..100.0f64,
            slack in 0.0..80.0f64,
        ) {
            let base = Bounds::new(100.0, 100.0).unwrap();
            let region = SamplingRegion::from_bounds(base);
            let f1 = Point2::new(fx, fy);
            let f2 = Point2::new(gx, gy);
            let shrunk = region.shrunk(f1, f2, f1.distance(f2) + slack).unwrap();
            let p = Point2::new(px, py);
            if shrunk.contains(p) {
                prop_assert!(region.contains(p));
                prop_assert!(p.distance(f1) + p.distance(f2) <= f1.distance(f2) + slack);
            }
        }
    }
}
