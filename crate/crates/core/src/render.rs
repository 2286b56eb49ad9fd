//! SVG rendering of worlds, prior paths, plans, and force-field glyph
//! grids. Output is plain SVG 1.1 with world coordinates mapped so the
//! y axis points up.

use std::fmt::Write;

use crate::field::{total_force, FieldConfig, ForceWeights};
use crate::geometry::{Obstacle, Point2, PriorPath, Vec2, World};
use crate::field::Plan;

const PLAN_COLORS: [&str; 5] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e"];
const PRIOR_COLOR: &str = "#7f7f7f";

/// Force-field glyph layer: one arrow per lattice point showing the total
/// force direction.
#[derive(Debug, Clone)]
pub struct GlyphGrid {
    pub weights: ForceWeights,
    pub field: FieldConfig,
    pub goal: Point2,
    pub path: Option<PriorPath>,
    /// Lattice spacing in meters.
    pub spacing: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    pub glyphs: Option<GlyphGrid>,
    pub legend: bool,
    pub start: Option<Point2>,
    pub goal: Option<Point2>,
}

/// Force vectors at obstacle-free lattice points; the glyph layer's data.
pub fn glyph_vectors(world: &World, grid: &GlyphGrid) -> Vec<(Point2, Vec2)> {
    let weights = grid.weights.resized(world.obstacle_count());
    let mut out = Vec::new();
    let mut y = grid.spacing / 2.0;
    while y < world.bounds.height {
        let mut x = grid.spacing / 2.0;
        while x < world.bounds.width {
            let p = Point2::new(x, y);
            if world.clearance(p) > 0.0 {
                if let Ok(force) =
                    total_force(p, grid.goal, world, grid.path.as_ref(), &weights, &grid.field)
                {
                    out.push((p, force));
                }
            }
            x += grid.spacing;
        }
        y += grid.spacing;
    }
    out
}

fn fmt_pt(x: f64) -> String {
    // Trim trailing zeros for compact output.
    let s = format!("{x:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() { "0".into() } else { s.into() }
}

struct Canvas {
    svg: String,
    height: f64,
}

impl Canvas {
    fn flip(&self, p: Point2) -> (f64, f64) {
        (p.x, self.height - p.y)
    }

    fn polyline(&mut self, points: impl Iterator<Item = Point2>, color: &str, width: f64, dashed: bool) {
        let coords: Vec<String> = points
            .map(|p| {
                let (x, y) = self.flip(p);
                format!("{},{}", fmt_pt(x), fmt_pt(y))
            })
            .collect();
        let dash = if dashed { " stroke-dasharray=\"4 3\"" } else { "" };
        writeln!(
            self.svg,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"{dash}/>",
            coords.join(" ")
        )
        .unwrap();
    }
}

/// Render the world with optional prior paths, plans, markers, a force
/// glyph grid, and a legend. Returns the SVG document.
pub fn render_svg(
    world: &World,
    prior_paths: &[PriorPath],
    plans: &[Plan],
    opts: &RenderOptions,
) -> String {
    let w = world.bounds.width;
    let h = world.bounds.height;
    let mut canvas = Canvas { svg: String::new(), height: h };
    writeln!(
        canvas.svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">",
        fmt_pt(w),
        fmt_pt(h),
        fmt_pt(w * 3.0),
        fmt_pt(h * 3.0)
    )
    .unwrap();
    writeln!(
        canvas.svg,
        "  <defs><marker id=\"arrow\" viewBox=\"0 0 6 6\" refX=\"5\" refY=\"3\" markerWidth=\"4\" markerHeight=\"4\" orient=\"auto-start-reverse\"><path d=\"M 0 0 L 6 3 L 0 6 z\" fill=\"#4878a8\"/></marker></defs>"
    )
    .unwrap();
    writeln!(
        canvas.svg,
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\" stroke=\"#000000\" stroke-width=\"0.8\"/>",
        fmt_pt(w),
        fmt_pt(h)
    )
    .unwrap();

    for ob in &world.obstacles {
        match ob {
            Obstacle::Circle { center, radius } => {
                let (cx, cy) = canvas.flip(*center);
                writeln!(
                    canvas.svg,
                    "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#b0b0b0\" stroke=\"#606060\" stroke-width=\"0.5\"/>",
                    fmt_pt(cx),
                    fmt_pt(cy),
                    fmt_pt(*radius)
                )
                .unwrap();
            }
            Obstacle::Polygon(poly) => {
                let coords: Vec<String> = poly
                    .vertices()
                    .iter()
                    .map(|p| {
                        let (x, y) = canvas.flip(*p);
                        format!("{},{}", fmt_pt(x), fmt_pt(y))
                    })
                    .collect();
                writeln!(
                    canvas.svg,
                    "  <polygon points=\"{}\" fill=\"#b0b0b0\" stroke=\"#606060\" stroke-width=\"0.5\"/>",
                    coords.join(" ")
                )
                .unwrap();
            }
        }
    }

    if let Some(grid) = &opts.glyphs {
        let arrow_len = grid.spacing * 0.35;
        for (p, force) in glyph_vectors(world, grid) {
            if let Some(dir) = force.normalized() {
                let tip = p + dir * arrow_len;
                let (x1, y1) = canvas.flip(p);
                let (x2, y2) = canvas.flip(tip);
                writeln!(
                    canvas.svg,
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#4878a8\" stroke-width=\"0.4\" marker-end=\"url(#arrow)\"/>",
                    fmt_pt(x1),
                    fmt_pt(y1),
                    fmt_pt(x2),
                    fmt_pt(y2)
                )
                .unwrap();
            }
        }
    }

    for path in prior_paths {
        canvas.polyline(path.vertices().iter().copied(), PRIOR_COLOR, 0.9, true);
    }
    for (i, plan) in plans.iter().enumerate() {
        let color = PLAN_COLORS[i % PLAN_COLORS.len()];
        canvas.polyline(plan.states.iter().map(|s| s.position), color, 1.2, false);
    }

    for (marker, color) in [(opts.start, "#2ca02c"), (opts.goal, "#d62728")] {
        if let Some(p) = marker {
            let (cx, cy) = canvas.flip(p);
            writeln!(
                canvas.svg,
                "  <circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{color}\" stroke=\"#000000\" stroke-width=\"0.4\"/>",
                fmt_pt(cx),
                fmt_pt(cy)
            )
            .unwrap();
        }
    }

    if opts.legend {
        let mut y = 6.0;
        let mut entry = |svg: &mut String, color: &str, dashed: bool, label: &str| {
            let dash = if dashed { " stroke-dasharray=\"4 3\"" } else { "" };
            writeln!(
                svg,
                "  <line x1=\"4\" y1=\"{y}\" x2=\"16\" y2=\"{y}\" stroke=\"{color}\" stroke-width=\"1.2\"{dash}/>",
            )
            .unwrap();
            writeln!(
                svg,
                "  <text x=\"19\" y=\"{}\" font-size=\"5\" font-family=\"sans-serif\">{label}</text>",
                y + 1.8
            )
            .unwrap();
            y += 8.0;
        };
        if !prior_paths.is_empty() {
            entry(&mut canvas.svg, PRIOR_COLOR, true, "prior path");
        }
        if !plans.is_empty() {
            entry(&mut canvas.svg, PLAN_COLORS[0], false, "plan");
        }
        if opts.glyphs.is_some() {
            entry(&mut canvas.svg, "#4878a8", false, "force field");
        }
    }

    canvas.svg.push_str("</svg>\n");
    canvas.svg
}
