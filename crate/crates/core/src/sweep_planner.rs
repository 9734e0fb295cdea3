//! Gimbal sweep-bound planning over a look-ahead horizon.
//!
//! The planner predicts where the UAV will be once a full sweep plus a fixed
//! look-ahead time has elapsed, builds the region both swept footprints cover,
//! and scans that region layer by layer from each outer edge toward the path.
//! The first cell on each side whose expected entropy reduction clears the
//! threshold pins that side's yaw bound. With nothing worth looking at, or with
//! a turn coming up, the gimbal keeps its full range.

use serde::{Deserialize, Serialize};

use crate::belief_map::{expected_reduction_unchecked, BeliefGrid, CellIndex};
use crate::error::{Error, Result};
use crate::geometry::{bresenham_cells, build_horizon_polygon, layer_y, wrap_angle, HorizonPolygon, PathAxis, Point2};
use crate::global_planner::Trajectory;
use crate::sensor_model::{slant_range, FootprintTrapezoid, SensorModel};

/// Vehicle pose: ground position, altitude, heading (rad, CCW from +x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
}

impl UavState {
    pub fn new(x: f64, y: f64, z: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            z,
            psi: wrap_angle(psi),
        }
    }

    pub fn position(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

/// Mechanical yaw range of the gimbal relative to the UAV heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GimbalLimits {
    pub psi_min: f64,
    pub psi_max: f64,
}

impl GimbalLimits {
    pub fn symmetric(half: f64) -> Self {
        Self {
            psi_min: -half,
            psi_max: half,
        }
    }

    pub fn span(&self) -> f64 {
        self.psi_max - self.psi_min
    }

    pub fn clamp(&self, yaw: f64) -> f64 {
        yaw.clamp(self.psi_min, self.psi_max)
    }

    pub fn full(&self) -> SweepBounds {
        SweepBounds {
            psi1: self.psi_min,
            psi2: self.psi_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepBounds {
    pub psi1: f64,
    pub psi2: f64,
}

impl SweepBounds {
    pub fn within(&self, limits: &GimbalLimits) -> bool {
        limits.psi_min <= self.psi1 && self.psi1 <= self.psi2 && self.psi2 <= limits.psi_max
    }
}

/// How to set the bound on a side of the path that holds no high-information cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OneSidedPolicy {
    /// Leave that side at its mechanical limit.
    MaxBound,
    /// Pull that side in to the innermost high-information cell found on the
    /// other side, so the sweep brackets only the cells that need it.
    #[default]
    Bracket,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepPlannerConfig {
    /// Look-ahead beyond one full sweep (s).
    pub t_future: f64,
    pub n_layers: usize,
    /// Minimum expected entropy reduction (bits) for a cell to count.
    pub threshold_entropy: f64,
    pub confidence_threshold: f64,
    pub replan_period: f64,
    pub heading_tol: f64,
    pub one_sided: OneSidedPolicy,
}

impl Default for SweepPlannerConfig {
    fn default() -> Self {
        Self {
            t_future: 5.0,
            n_layers: 8,
            threshold_entropy: 0.1,
            confidence_threshold: 0.5,
            replan_period: 1.0,
            heading_tol: 5f64.to_radians(),
            one_sided: OneSidedPolicy::default(),
        }
    }
}

impl SweepPlannerConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |f: &str, m: &str| Err(Error::config(format!("sweep_planner.{f}"), m));
        if !(self.t_future >= 0.0) {
            return fail("t_future", "must be non-negative");
        }
        if self.n_layers == 0 {
            return fail("n_layers", "must be at least 1");
        }
        if !(self.threshold_entropy > 0.0) {
            return fail("threshold_entropy", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            return fail("confidence_threshold", "must be a probability");
        }
        if !(self.replan_period > 0.0) {
            return fail("replan_period", "must be positive");
        }
        if !(self.heading_tol > 0.0) {
            return fail("heading_tol", "must be positive");
        }
        Ok(())
    }
}

pub fn max_sweep_time(limits: &GimbalLimits, gimbal_rate: f64) -> f64 {
    limits.span() / gimbal_rate
}

/// The pose `distance` metres of arc length ahead of `current` along the
/// plan, where `wp` is the index of the next waypoint to reach. Past the end
/// of the plan the final waypoint is returned.
pub fn position_ahead(plan: &Trajectory, wp: usize, current: &UavState, distance: f64) -> Result<UavState> {
    let pts = plan.waypoints();
    if pts.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if wp >= pts.len() {
        return Err(Error::WaypointOutOfRange {
            index: wp,
            len: pts.len(),
        });
    }
    let mut covered = 0.0;
    let mut prev = *current;
    for next in &pts[wp..] {
        let seg = prev.position().distance(next.position());
        if covered + seg >= distance {
            let ratio = if seg > 0.0 {
                ((distance - covered) / seg).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let p = prev.position().lerp(next.position(), ratio);
            let psi = if seg > 0.0 {
                prev.position().bearing_to(next.position())
            } else {
                prev.psi
            };
            return Ok(UavState::new(p.x, p.y, prev.z + (next.z - prev.z) * ratio, psi));
        }
        covered += seg;
        prev = *next;
    }
    Ok(*pts.last().expect("non-empty"))
}

pub fn future_position(
    plan: &Trajectory,
    wp: usize,
    current: &UavState,
    speed: f64,
    t_max_sweep: f64,
    t_future: f64,
) -> Result<UavState> {
    position_ahead(plan, wp, current, speed * (t_max_sweep + t_future))
}

/// Whether any heading change larger than `heading_tol` occurs at a waypoint
/// within `horizon_dist` metres ahead.
pub fn is_turning(plan: &Trajectory, wp: usize, current: &UavState, horizon_dist: f64, heading_tol: f64) -> bool {
    let pts = plan.waypoints();
    if wp >= pts.len() {
        return false;
    }
    let mut prev_pos = current.position();
    let mut heading_in = if wp > 0 && pts[wp - 1].position() != pts[wp].position() {
        pts[wp - 1].position().bearing_to(pts[wp].position())
    } else if prev_pos != pts[wp].position() {
        prev_pos.bearing_to(pts[wp].position())
    } else {
        current.psi
    };
    let mut dist = 0.0;
    for j in wp..pts.len() {
        let vertex = pts[j].position();
        dist += prev_pos.distance(vertex);
        if dist > horizon_dist {
            return false;
        }
        let Some(next) = pts[j + 1..].iter().map(|w| w.position()).find(|p| *p != vertex) else {
            return false;
        };
        let heading_out = vertex.bearing_to(next);
        if wrap_angle(heading_out - heading_in).abs() > heading_tol {
            return true;
        }
        heading_in = heading_out;
        prev_pos = vertex;
    }
    false
}

/// Expected entropy reduction of observing `cell` from `uav`.
pub fn cell_reward(grid: &BeliefGrid, cell: CellIndex, model: &SensorModel, uav: &UavState, confidence_threshold: f64) -> Option<f64> {
    let p = grid.get(cell).ok()?;
    let rates = model.rates_at_range(slant_range(uav, grid.cell_center(cell)));
    if rates.is_uninformative() {
        return Some(0.0);
    }
    Some(expected_reduction_unchecked(p, &rates, confidence_threshold).0)
}

/// First cell in `cells` whose expected entropy reduction reaches the
/// threshold. Out-of-grid cells are skipped.
pub fn find_high_info_cell(
    cells: &[CellIndex],
    grid: &BeliefGrid,
    model: &SensorModel,
    uav: &UavState,
    cfg: &SweepPlannerConfig,
) -> Option<CellIndex> {
    cells.iter().copied().find(|&c| {
        cell_reward(grid, c, model, uav, cfg.confidence_threshold)
            .is_some_and(|dh| dh >= cfg.threshold_entropy)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryHit {
    pub cell: CellIndex,
    /// Layer the cell was found on; 0 is the outermost.
    pub layer: usize,
}

/// Cells crossed by layer `layer` on one side of the polygon, in path order.
pub fn layer_cells(poly: &HorizonPolygon, grid: &BeliefGrid, layer: usize, n_layers: usize, is_upper: bool) -> Vec<CellIndex> {
    let half = poly.half_height(is_upper);
    if half <= 0.0 {
        return Vec::new();
    }
    let cur_y = layer_y(layer, poly.layer_height(n_layers, is_upper), half, is_upper);
    match poly.layer_endpoints(cur_y) {
        Some((a, b)) => bresenham_cells(a, b, grid),
        None => Vec::new(),
    }
}

fn scan_layers(
    poly: &HorizonPolygon,
    layers: impl Iterator<Item = usize>,
    grid: &BeliefGrid,
    model: &SensorModel,
    uav: &UavState,
    is_upper: bool,
    cfg: &SweepPlannerConfig,
) -> Option<BoundaryHit> {
    layers.into_iter().find_map(|layer| {
        let cells = layer_cells(poly, grid, layer, cfg.n_layers, is_upper);
        find_high_info_cell(&cells, grid, model, uav, cfg).map(|cell| BoundaryHit { cell, layer })
    })
}

/// Outermost high-information cell on one side of an already built horizon polygon.
pub fn boundary_cell_in(
    poly: &HorizonPolygon,
    grid: &BeliefGrid,
    model: &SensorModel,
    uav: &UavState,
    is_upper: bool,
    cfg: &SweepPlannerConfig,
) -> Option<BoundaryHit> {
    scan_layers(poly, 0..cfg.n_layers, grid, model, uav, is_upper, cfg)
}

/// Builds the horizon polygon from the two swept footprints and returns the
/// outermost high-information cell on the requested side, if any.
#[allow(clippy::too_many_arguments)]
pub fn find_boundary_high_info_cell(
    f_current: &FootprintTrapezoid,
    f_future: &FootprintTrapezoid,
    axis: PathAxis,
    grid: &BeliefGrid,
    model: &SensorModel,
    uav: &UavState,
    is_upper: bool,
    cfg: &SweepPlannerConfig,
) -> Option<BoundaryHit> {
    let poly = build_horizon_polygon(f_current, f_future, axis).ok()?;
    boundary_cell_in(&poly, grid, model, uav, is_upper, cfg)
}

/// Gimbal yaw that points the footprint centre line at the cell, clamped to the limits.
pub fn bounds_from_cell(uav: &UavState, cell: CellIndex, grid: &BeliefGrid, limits: &GimbalLimits) -> f64 {
    let bearing = uav.position().bearing_to(grid.cell_center(cell));
    limits.clamp(wrap_angle(bearing - uav.psi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Bounds derived from boundary cells.
    Focused,
    /// No high-information cell in the horizon.
    NothingFound,
    Turning,
    /// A geometry step failed; full range is the safe answer.
    Fallback,
}

impl SweepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Focused => "focused",
            Self::NothingFound => "nothing_found",
            Self::Turning => "turning",
            Self::Fallback => "fallback",
        }
    }
}

/// Planner output with the diagnostics behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepDecision {
    pub bounds: SweepBounds,
    pub mode: SweepMode,
    pub upper: Option<BoundaryHit>,
    pub lower: Option<BoundaryHit>,
}

impl SweepDecision {
    fn full(limits: &GimbalLimits, mode: SweepMode) -> Self {
        Self {
            bounds: limits.full(),
            mode,
            upper: None,
            lower: None,
        }
    }
}

/// Gimbal and vehicle rates the planner needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics {
    pub limits: GimbalLimits,
    pub gimbal_rate: f64,
    pub speed: f64,
}

pub fn horizon_for(
    plan: &Trajectory,
    wp: usize,
    uav: &UavState,
    model: &SensorModel,
    cfg: &SweepPlannerConfig,
    kin: &Kinematics,
) -> Result<HorizonPolygon> {
    let lim = &kin.limits;
    let t_sweep = max_sweep_time(lim, kin.gimbal_rate);
    let f_current = model.swept_trapezoid(uav, lim.psi_min, lim.psi_max)?;
    let future = future_position(plan, wp, uav, kin.speed, t_sweep, cfg.t_future)?;
    let f_future = model.swept_trapezoid(&future, lim.psi_min, lim.psi_max)?;
    let axis = PathAxis::between(uav.position(), future.position(), uav.psi);
    build_horizon_polygon(&f_current, &f_future, axis)
}

/// Sweep bounds for the next replanning interval.
pub fn plan_sweep(
    plan: &Trajectory,
    wp: usize,
    uav: &UavState,
    grid: &BeliefGrid,
    model: &SensorModel,
    cfg: &SweepPlannerConfig,
    kin: &Kinematics,
) -> SweepDecision {
    let lim = &kin.limits;
    let d_future = kin.speed * (max_sweep_time(lim, kin.gimbal_rate) + cfg.t_future);
    if is_turning(plan, wp, uav, d_future, cfg.heading_tol) {
        return SweepDecision::full(lim, SweepMode::Turning);
    }
    let Ok(poly) = horizon_for(plan, wp, uav, model, cfg, kin) else {
        return SweepDecision::full(lim, SweepMode::Fallback);
    };

    let upper = boundary_cell_in(&poly, grid, model, uav, true, cfg);
    let lower = boundary_cell_in(&poly, grid, model, uav, false, cfg);
    let yaw = |hit: Option<BoundaryHit>| hit.map(|h| bounds_from_cell(uav, h.cell, grid, lim));

    let (psi1, psi2) = match (lower, upper) {
        (None, None) => return SweepDecision::full(lim, SweepMode::NothingFound),
        (Some(_), Some(_)) => (yaw(lower).unwrap(), yaw(upper).unwrap()),
        (None, Some(_)) => {
            let inner = match cfg.one_sided {
                OneSidedPolicy::MaxBound => lim.psi_min,
                OneSidedPolicy::Bracket => {
                    let innermost = scan_layers(&poly, (0..cfg.n_layers).rev(), grid, model, uav, true, cfg);
                    yaw(innermost).unwrap_or(lim.psi_min)
                }
            };
            (inner, yaw(upper).unwrap())
        }
        (Some(_), None) => {
            let inner = match cfg.one_sided {
                OneSidedPolicy::MaxBound => lim.psi_max,
                OneSidedPolicy::Bracket => {
                    let innermost = scan_layers(&poly, (0..cfg.n_layers).rev(), grid, model, uav, false, cfg);
                    yaw(innermost).unwrap_or(lim.psi_max)
                }
            };
            (yaw(lower).unwrap(), inner)
        }
    };
    let (psi1, psi2) = if psi1 <= psi2 { (psi1, psi2) } else { (psi2, psi1) };
    SweepDecision {
        bounds: SweepBounds { psi1, psi2 },
        mode: SweepMode::Focused,
        upper,
        lower,
    }
}
