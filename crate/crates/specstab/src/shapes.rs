//! Shape generators and rasterization onto grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::lattice::Lattice;

/// Axis-aligned box in physical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Box2 {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Box2 { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Parametric shape families used by the bundled scenarios.
///
/// All shapes are open sets; rasterization keeps the cells whose centers lie
/// strictly inside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ShapeSpec {
    Disk {
        r: f64,
        #[serde(default)]
        cx: f64,
        #[serde(default)]
        cy: f64,
    },
    /// Open rectangle (0, a) x (0, b).
    Rectangle { a: f64, b: f64 },
    /// Open ring r_inner < |x| < r_outer about the origin.
    Annulus { r_inner: f64, r_outer: f64 },
    /// Alias of `annulus` kept for shell-flavored configs.
    BallInBallShell { r_inner: f64, r_outer: f64 },
    /// Two unit-radius lobes with a top gap `t`, joined the long way round
    /// by a U-shaped tube. Dilating past t/2 seals the gap and encloses the
    /// pocket, so the complement gains a component.
    Dumbbell { t: f64 },
    /// Square (0, side)^2 with a tentacle of width `w` and length `l`
    /// attached to the middle of its right edge.
    SquareWithTentacle { side: f64, w: f64, l: f64 },
    /// Simple polygon, even-odd interior rule.
    Polygon { vertices: Vec<[f64; 2]> },
}

const DUMBBELL_LOBE_R: f64 = 1.0;
const DUMBBELL_TUBE_HALF_WIDTH: f64 = 0.35;
const DUMBBELL_LEG_DEPTH: f64 = 1.8;

impl ShapeSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::argument(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            ShapeSpec::Disk { r, .. } => positive("disk radius", *r),
            ShapeSpec::Rectangle { a, b } => {
                positive("rectangle side a", *a)?;
                positive("rectangle side b", *b)
            }
            ShapeSpec::Annulus { r_inner, r_outer }
            | ShapeSpec::BallInBallShell { r_inner, r_outer } => {
                positive("inner radius", *r_inner)?;
                positive("outer radius", *r_outer)?;
                if r_inner >= r_outer {
                    return Err(Error::argument("annulus needs r_inner < r_outer"));
                }
                Ok(())
            }
            ShapeSpec::Dumbbell { t } => {
                if *t > 0.0 && *t < 1.0 {
                    Ok(())
                } else {
                    Err(Error::argument(format!(
                        "dumbbell neck parameter must lie in (0,1), got {t}"
                    )))
                }
            }
            ShapeSpec::SquareWithTentacle { side, w, l } => {
                positive("square side", *side)?;
                positive("tentacle width", *w)?;
                positive("tentacle length", *l)
            }
            ShapeSpec::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::argument("polygon needs at least 3 vertices"));
                }
                Ok(())
            }
        }
    }

    /// Strict interior test at a point.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            ShapeSpec::Disk { r, cx, cy } => {
                let dx = x - cx;
                let dy = y - cy;
                dx * dx + dy * dy < r * r
            }
            ShapeSpec::Rectangle { a, b } => x > 0.0 && x < a && y > 0.0 && y < b,
            ShapeSpec::Annulus { r_inner, r_outer }
            | ShapeSpec::BallInBallShell { r_inner, r_outer } => {
                let rr = x * x + y * y;
                rr > r_inner * r_inner && rr < r_outer * r_outer
            }
            ShapeSpec::Dumbbell { t } => dumbbell_contains(t, x, y),
            ShapeSpec::SquareWithTentacle { side, w, l } => {
                let in_square = x > 0.0 && x < side && y > 0.0 && y < side;
                let yc = side / 2.0;
                // Interior of the closure of the union: the joint segment on
                // x = side belongs to the open set.
                let in_tentacle =
                    x >= side && x < side + l && y > yc - w / 2.0 && y < yc + w / 2.0;
                in_square || in_tentacle
            }
            ShapeSpec::Polygon { ref vertices } => polygon_contains(vertices, x, y),
        }
    }

    /// Tight bounding box of the shape.
    pub fn bounding_box(&self) -> Box2 {
        match *self {
            ShapeSpec::Disk { r, cx, cy } => Box2::new(cx - r, cy - r, cx + r, cy + r),
            ShapeSpec::Rectangle { a, b } => Box2::new(0.0, 0.0, a, b),
            ShapeSpec::Annulus { r_outer, .. } | ShapeSpec::BallInBallShell { r_outer, .. } => {
                Box2::new(-r_outer, -r_outer, r_outer, r_outer)
            }
            ShapeSpec::Dumbbell { t } => {
                let cx = DUMBBELL_LOBE_R + t / 2.0;
                let reach = cx + DUMBBELL_LOBE_R;
                Box2::new(
                    -reach,
                    -(DUMBBELL_LEG_DEPTH + DUMBBELL_TUBE_HALF_WIDTH),
                    reach,
                    DUMBBELL_LOBE_R,
                )
            }
            ShapeSpec::SquareWithTentacle { side, w: _, l } => {
                Box2::new(0.0, 0.0, side + l, side)
            }
            ShapeSpec::Polygon { ref vertices } => {
                let mut b = Box2::new(f64::MAX, f64::MAX, f64::MIN, f64::MIN);
                for v in vertices {
                    b.x0 = b.x0.min(v[0]);
                    b.y0 = b.y0.min(v[1]);
                    b.x1 = b.x1.max(v[0]);
                    b.y1 = b.y1.max(v[1]);
                }
                b
            }
        }
    }

    /// Width of the thinnest declared feature; scenario validation requires
    /// the grid to resolve it by several cells.
    pub fn thinnest_feature(&self) -> f64 {
        match *self {
            ShapeSpec::Disk { r, .. } => 2.0 * r,
            ShapeSpec::Rectangle { a, b } => a.min(b),
            ShapeSpec::Annulus { r_inner, r_outer }
            | ShapeSpec::BallInBallShell { r_inner, r_outer } => r_outer - r_inner,
            ShapeSpec::Dumbbell { t } => t.min(2.0 * DUMBBELL_TUBE_HALF_WIDTH),
            ShapeSpec::SquareWithTentacle { w, .. } => w,
            ShapeSpec::Polygon { .. } => {
                let b = self.bounding_box();
                b.width().min(b.height())
            }
        }
    }
}

fn dist_to_segment_sq(px: f64, py: f64, ax: f64, ay: f64, bx: f64, by: f64) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len_sq = dx * dx + dy * dy;
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((px - ax) * dx + (py - ay) * dy) / len_sq).clamp(0.0, 1.0)
    };
    let (qx, qy) = (ax + t * dx, ay + t * dy);
    (px - qx) * (px - qx) + (py - qy) * (py - qy)
}

fn dumbbell_contains(t: f64, x: f64, y: f64) -> bool {
    let cx = DUMBBELL_LOBE_R + t / 2.0;
    let r2 = DUMBBELL_LOBE_R * DUMBBELL_LOBE_R;
    if (x - cx) * (x - cx) + y * y < r2 || (x + cx) * (x + cx) + y * y < r2 {
        return true;
    }
    let s2 = DUMBBELL_TUBE_HALF_WIDTH * DUMBBELL_TUBE_HALF_WIDTH;
    let legs = dist_to_segment_sq(x, y, cx, -DUMBBELL_LEG_DEPTH, cx, 0.0) < s2
        || dist_to_segment_sq(x, y, -cx, -DUMBBELL_LEG_DEPTH, -cx, 0.0) < s2
        || dist_to_segment_sq(x, y, -cx, -DUMBBELL_LEG_DEPTH, cx, -DUMBBELL_LEG_DEPTH) < s2;
    legs
}

/// Even-odd rule with a half-open edge convention.
fn polygon_contains(vertices: &[[f64; 2]], x: f64, y: f64) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let [x1, y1] = vertices[i];
        let [x2, y2] = vertices[(i + 1) % n];
        if (y1 > y) != (y2 > y) {
            let xint = x1 + (y - y1) * (x2 - x1) / (y2 - y1);
            if x < xint {
                inside = !inside;
            }
        }
    }
    inside
}

/// Rasterizes a shape at spacing `h` over the given box.
///
/// The box must strictly contain the shape inflated by `2h`; the resulting
/// mask is non-empty and strictly interior to the grid box.
pub fn rasterize(spec: &ShapeSpec, h: f64, bounds: Box2) -> Result<GridDomain> {
    spec.validate()?;
    if !(h > 0.0) {
        return Err(Error::argument(format!("spacing must be positive, got {h}")));
    }
    let bb = spec.bounding_box();
    let margin = 2.0 * h - 1e-12;
    if bb.x0 - bounds.x0 < margin
        || bb.y0 - bounds.y0 < margin
        || bounds.x1 - bb.x1 < margin
        || bounds.y1 - bb.y1 < margin
    {
        return Err(Error::geometry(format!(
            "box [{}, {}] x [{}, {}] does not contain the shape inflated by 2h",
            bounds.x0, bounds.x1, bounds.y0, bounds.y1
        )));
    }
    let nx = (bounds.width() / h).round() as usize + 1;
    let ny = (bounds.height() / h).round() as usize + 1;
    let lat = Lattice::new(h, [bounds.x0, bounds.y0], [nx, ny])?;
    let dom = GridDomain::from_predicate(lat, |x, y| spec.contains(x, y))?;
    if dom.is_empty() {
        return Err(Error::Resolution(format!(
            "spacing h = {h} too coarse: no cell center falls inside the shape"
        )));
    }
    Ok(dom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{component_count, Connectivity};

    #[test]
    fn disk_area_close_to_pi() {
        let d = rasterize(
            &ShapeSpec::Disk { r: 1.0, cx: 0.0, cy: 0.0 },
            1.0 / 64.0,
            Box2::new(-1.5, -1.5, 1.5, 1.5),
        )
        .unwrap();
        assert!((d.area() - std::f64::consts::PI).abs() < 0.05);
    }

    #[test]
    fn rectangle_cells_are_exactly_the_open_square() {
        let h = 1.0 / 128.0;
        let d = rasterize(
            &ShapeSpec::Rectangle { a: 1.0, b: 1.0 },
            h,
            Box2::new(-0.125, -0.125, 1.125, 1.125),
        )
        .unwrap();
        assert_eq!(d.cell_count(), 127 * 127);
        for idx in 0..d.interior().len() {
            let c = d.lattice().coords(idx);
            let p = d.lattice().center(c);
            let inside = p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0;
            assert_eq!(d.interior()[idx], inside);
        }
    }

    #[test]
    fn shape_exceeding_box_is_rejected() {
        let r = rasterize(
            &ShapeSpec::Disk { r: 2.0, cx: 0.0, cy: 0.0 },
            1.0 / 32.0,
            Box2::new(-1.5, -1.5, 1.5, 1.5),
        );
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn too_coarse_spacing_is_resolution_error() {
        let r = rasterize(
            &ShapeSpec::Disk { r: 0.01, cx: 0.25, cy: 0.25 },
            0.5,
            Box2::new(-4.0, -4.0, 4.0, 4.0),
        );
        assert!(matches!(r, Err(Error::Resolution(_))));
    }

    #[test]
    fn dumbbell_is_connected_and_not_convex() {
        let d = rasterize(
            &ShapeSpec::Dumbbell { t: 0.05 },
            1.0 / 256.0,
            Box2::new(-2.6, -2.7, 2.6, 1.5),
        )
        .unwrap();
        assert_eq!(d.component_count(), 1);
        assert_eq!(d.complement_component_count(), 1);
        assert!(!d.is_convex(None).unwrap());
        assert!((d.inradius().unwrap() - 1.0).abs() < 0.02);
    }

    #[test]
    fn square_with_tentacle_joint_is_open() {
        let h = 1.0 / 64.0;
        let d = rasterize(
            &ShapeSpec::SquareWithTentacle { side: 1.0, w: 0.1, l: 0.5 },
            h,
            Box2::new(-0.25, -0.25, 1.8125, 1.25),
        )
        .unwrap();
        // connected across the joint at x = side
        let lat = d.lattice().clone();
        assert_eq!(component_count(&lat, d.interior(), Connectivity::Axis), 1);
    }

    #[test]
    fn polygon_l_shape() {
        let l = ShapeSpec::Polygon {
            vertices: vec![
                [0.0, 0.0],
                [1.0, 0.0],
                [1.0, 0.5],
                [0.5, 0.5],
                [0.5, 1.0],
                [0.0, 1.0],
            ],
        };
        assert!(l.contains(0.25, 0.75));
        assert!(!l.contains(0.75, 0.75));
        let d = rasterize(&l, 1.0 / 64.0, Box2::new(-0.25, -0.25, 1.25, 1.25)).unwrap();
        assert!(!d.is_convex(None).unwrap());
    }
}
