//! Planar geometry for the planner: points, convex outlines, the
//! planning-horizon polygon and its layers, and supercover grid traversal.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::belief_map::{BeliefGrid, CellIndex};
use crate::error::{Error, Result};
use crate::sensor_model::FootprintTrapezoid;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Self) -> f64 {
        (self - o).norm()
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Left-hand perpendicular.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }

    pub fn bearing_to(self, o: Self) -> f64 {
        (o.y - self.y).atan2(o.x - self.x)
    }
}

impl Add for Point2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Wraps an angle to (-π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut a = theta.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Shoelace area; positive for counter-clockwise vertex order.
pub fn signed_area(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| poly[i].cross(poly[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// Inclusive containment test for a counter-clockwise convex polygon,
/// with `slack` metres of tolerance outside each edge.
pub fn convex_contains(poly: &[Point2], p: Point2, slack: f64) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        let len = e.norm();
        len == 0.0 || e.cross(p - a) >= -slack * len
    })
}

/// Counter-clockwise convex hull with collinear points removed.
pub fn convex_hull(points: &[Point2]) -> Result<Vec<Point2>> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry("fewer than three distinct points"));
    }
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut lower: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 || signed_area(&lower) <= 1e-12 {
        return Err(Error::DegenerateGeometry("points are collinear"));
    }
    Ok(lower)
}

/// Reference line for layer offsets: a point on the UAV path and the unit
/// direction of travel toward the predicted future position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAxis {
    pub origin: Point2,
    pub direction: Point2,
}

impl PathAxis {
    /// Axis from `from` toward `to`; falls back to `heading` when the two coincide.
    pub fn between(from: Point2, to: Point2, heading: f64) -> Self {
        let d = to - from;
        let len = d.norm();
        let direction = if len > 1e-9 {
            d * (1.0 / len)
        } else {
            Point2::from_angle(heading)
        };
        Self {
            origin: from,
            direction,
        }
    }

    pub fn normal(&self) -> Point2 {
        self.direction.perp()
    }

    /// Signed perpendicular distance; positive to the left of travel.
    pub fn offset_of(&self, p: Point2) -> f64 {
        (p - self.origin).dot(self.normal())
    }

    pub fn along(&self, p: Point2) -> f64 {
        (p - self.origin).dot(self.direction)
    }
}

/// Planning-horizon region: convex outline of the current and future swept
/// footprints, with the path axis used to slice it into layers.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonPolygon {
    pub vertices: Vec<Point2>,
    pub axis: PathAxis,
    /// Largest perpendicular extent left of the axis (upper side).
    pub half_upper: f64,
    /// Largest perpendicular extent right of the axis (lower side).
    pub half_lower: f64,
}

pub fn build_horizon_polygon(
    f_current: &FootprintTrapezoid,
    f_future: &FootprintTrapezoid,
    axis: PathAxis,
) -> Result<HorizonPolygon> {
    let mut pts = Vec::with_capacity(8);
    pts.extend_from_slice(f_current.vertices());
    pts.extend_from_slice(f_future.vertices());
    let vertices = convex_hull(&pts)?;
    let (mut up, mut low) = (0.0f64, 0.0f64);
    for &v in &vertices {
        let o = axis.offset_of(v);
        up = up.max(o);
        low = low.max(-o);
    }
    Ok(HorizonPolygon {
        vertices,
        axis,
        half_upper: up,
        half_lower: low,
    })
}

/// Signed offset of a layer from the path axis. Layer 0 is the outermost;
/// offsets move inward by `layer_ht` per layer and stop at the axis.
pub fn layer_y(layer: usize, layer_ht: f64, half_height: f64, is_upper: bool) -> f64 {
    let mag = (half_height - layer as f64 * layer_ht).max(0.0);
    if is_upper {
        mag
    } else {
        -mag
    }
}

impl HorizonPolygon {
    pub fn half_height(&self, is_upper: bool) -> f64 {
        if is_upper {
            self.half_upper
        } else {
            self.half_lower
        }
    }

    pub fn layer_height(&self, n_layers: usize, is_upper: bool) -> f64 {
        self.half_height(is_upper) / n_layers.max(1) as f64
    }

    pub fn contains(&self, p: Point2, slack: f64) -> bool {
        convex_contains(&self.vertices, p, slack)
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Endpoints of the chord parallel to the axis at signed offset `cur_y`,
    /// ordered along the direction of travel. `None` when the line misses.
    pub fn layer_endpoints(&self, cur_y: f64) -> Option<(Point2, Point2)> {
        const TOL: f64 = 1e-9;
        let n = self.vertices.len();
        let normal = self.axis.normal();
        let side = |p: Point2| {
            let s = self.axis.offset_of(p) - cur_y;
            if s.abs() <= TOL {
                0.0
            } else {
                s
            }
        };
        let mut t_min = f64::INFINITY;
        let mut t_max = f64::NEG_INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let (sa, sb) = (side(a), side(b));
            let mut hit = |p: Point2| {
                let t = self.axis.along(p);
                t_min = t_min.min(t);
                t_max = t_max.max(t);
            };
            if sa == 0.0 {
                hit(a);
            }
            if sb == 0.0 {
                hit(b);
            }
            if sa * sb < 0.0 {
                hit(a.lerp(b, sa / (sa - sb)));
            }
        }
        if t_min > t_max {
            return None;
        }
        let base = self.axis.origin + normal * cur_y;
        Some((
            base + self.axis.direction * t_min,
            base + self.axis.direction * t_max,
        ))
    }
}

/// All in-bounds cells whose interior the segment crosses, in order from
/// `start` to `end` (supercover traversal; corner crossings step diagonally).
pub fn bresenham_cells(start: Point2, end: Point2, grid: &BeliefGrid) -> Vec<CellIndex> {
    let cs = grid.cell_size();
    let o = grid.origin();
    let (nc, nr) = (grid.n_cols() as f64, grid.n_rows() as f64);
    let u0 = Point2::new((start.x - o.x) / cs, (start.y - o.y) / cs);
    let u1 = Point2::new((end.x - o.x) / cs, (end.y - o.y) / cs);
    let d = u1 - u0;

    if d.x == 0.0 && d.y == 0.0 {
        return grid.cell_at(start).into_iter().collect();
    }

    // Liang-Barsky clip of the parameter interval to the grid rectangle.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (p, q) in [(-d.x, u0.x), (d.x, nc - u0.x), (-d.y, u0.y), (d.y, nr - u0.y)] {
        if p == 0.0 {
            if q < 0.0 {
                return Vec::new();
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return Vec::new();
    }

    let s = u0 + d * t0;
    let start_index = |v: f64, dv: f64, n: f64| -> i64 {
        let f = v.floor();
        let i = if f == v && dv < 0.0 { f - 1.0 } else { f };
        i.clamp(0.0, n - 1.0) as i64
    };
    let mut col = start_index(s.x, d.x, nc);
    let mut row = start_index(s.y, d.y, nr);
    let step_x: i64 = if d.x > 0.0 { 1 } else { -1 };
    let step_y: i64 = if d.y > 0.0 { 1 } else { -1 };
    let t_cross = |idx: i64, step: i64, u: f64, dv: f64| -> f64 {
        if dv == 0.0 {
            f64::INFINITY
        } else {
            let boundary = if step > 0 { idx + 1 } else { idx } as f64;
            (boundary - u) / dv
        }
    };

    let mut out = Vec::new();
    let (ncol, nrow) = (grid.n_cols() as i64, grid.n_rows() as i64);
    loop {
        if col < 0 || row < 0 || col >= ncol || row >= nrow {
            break;
        }
        out.push(CellIndex::new(col as usize, row as usize));
        let tx = t_cross(col, step_x, u0.x, d.x);
        let ty = t_cross(row, step_y, u0.y, d.y);
        if tx.min(ty) >= t1 {
            break;
        }
        if tx < ty {
            col += step_x;
        } else if ty < tx {
            row += step_y;
        } else {
            col += step_x;
            row += step_y;
        }
    }
    out
}

/// Cells whose centres lie inside a counter-clockwise convex polygon.
pub fn cells_with_center_in(grid: &BeliefGrid, poly: &[Point2], slack: f64) -> Vec<CellIndex> {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for v in poly {
        lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    let cs = grid.cell_size();
    let o = grid.origin();
    // centre of column c is o.x + (c + 0.5) cs
    let range = |lo: f64, hi: f64, origin: f64, n: usize| -> Option<(usize, usize)> {
        let a = ((lo - slack - origin) / cs - 0.5).ceil().max(0.0);
        let b = ((hi + slack - origin) / cs - 0.5).floor().min(n as f64 - 1.0);
        (a <= b).then_some((a as usize, b as usize))
    };
    let (Some((c0, c1)), Some((r0, r1))) = (
        range(lo.x, hi.x, o.x, grid.n_cols()),
        range(lo.y, hi.y, o.y, grid.n_rows()),
    ) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for row in r0..=r1 {
        for col in c0..=c1 {
            let c = CellIndex::new(col, row);
            if convex_contains(poly, grid.cell_center(c), slack) {
                out.push(c);
            }
        }
    }
    out
}
