//! Budget-constrained informative path planner.
//!
//! A sampling-based tree search: nodes are reached by straight legs with a
//! minimum length and a bounded heading change, targets are drawn with a bias
//! toward cells that still have entropy to give, and every node carries the
//! belief its branch would leave behind so rewards are not double counted.
//! The returned trajectory is the branch with the most information whose
//! length fits the budget.

use std::fmt::Write as _;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief_map::{expected_reduction_unchecked, BeliefGrid};
use crate::error::{Error, Result};
use crate::geometry::{cells_with_center_in, wrap_angle, Point2};
use crate::sensor_model::{slant_range, DetectionRates, SensorModel};
use crate::sweep_planner::{GimbalLimits, UavState};

/// Ordered waypoints; `cost` is the polyline length in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    waypoints: Vec<UavState>,
    cost: f64,
}

impl Trajectory {
    /// Waypoint headings point along the outgoing leg (the last one keeps the incoming leg).
    pub fn from_points(points: impl IntoIterator<Item = Point2>, z: f64) -> Self {
        let pts: Vec<Point2> = points.into_iter().collect();
        let n = pts.len();
        let mut waypoints = Vec::with_capacity(n);
        let mut heading = 0.0;
        for i in 0..n {
            if let Some(next) = pts[i + 1..].iter().find(|p| **p != pts[i]) {
                heading = pts[i].bearing_to(*next);
            }
            waypoints.push(UavState::new(pts[i].x, pts[i].y, z, heading));
        }
        Self::from_waypoints(waypoints)
    }

    pub fn from_waypoints(waypoints: Vec<UavState>) -> Self {
        let cost = arc_length(&waypoints);
        Self { waypoints, cost }
    }

    /// A trajectory that never leaves `start`.
    pub fn stationary(start: UavState) -> Self {
        Self {
            waypoints: vec![start],
            cost: 0.0,
        }
    }

    pub fn waypoints(&self) -> &[UavState] {
        &self.waypoints
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    /// First `n` waypoints.
    pub fn prefix(&self, n: usize) -> Self {
        Self::from_waypoints(self.waypoints[..n.min(self.len())].to_vec())
    }

    /// Text form: a `cost` header line then one `x y z psi` row per waypoint.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# x y z psi\n");
        let _ = writeln!(out, "cost {}", self.cost);
        for w in &self.waypoints {
            let _ = writeln!(out, "{} {} {} {}", w.x, w.y, w.z, w.psi);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        const WHAT: &str = "trajectory";
        let bad = |line, message: String| Error::Parse {
            what: WHAT,
            line,
            message,
        };
        let mut cost = None;
        let mut waypoints = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("cost") {
                let c: f64 = rest.trim().parse().map_err(|e| bad(i + 1, format!("cost: {e}")))?;
                cost = Some(c);
                continue;
            }
            let v: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| bad(i + 1, format!("{e}")))?;
            if v.len() != 4 {
                return Err(bad(i + 1, format!("expected 4 values, found {}", v.len())));
            }
            waypoints.push(UavState::new(v[0], v[1], v[2], v[3]));
        }
        let traj = Self::from_waypoints(waypoints);
        let declared = cost.ok_or_else(|| bad(0, "missing cost header".into()))?;
        if (declared - traj.cost).abs() > 1e-6 {
            return Err(bad(
                0,
                format!("declared cost {declared} differs from arc length {}", traj.cost),
            ));
        }
        Ok(traj)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

fn arc_length(w: &[UavState]) -> f64 {
    w.windows(2)
        .map(|p| p[0].position().distance(p[1].position()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerParams {
    /// Maximum path length (m).
    pub budget: f64,
    pub sample_count: usize,
    /// Nodes within this distance of a cheaper, better-informed node are dropped.
    pub rewire_radius: f64,
    /// Minimum leg length (m).
    pub min_turn_spacing: f64,
    /// Largest heading change at a vertex (rad).
    pub max_turn: f64,
    /// Score coverage with the full gimbal sweep instead of a fixed forward camera.
    pub widened_fov: bool,
    /// Probability of steering toward an information-weighted cell instead of a uniform point.
    pub info_bias: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            budget: 5000.0,
            sample_count: 600,
            rewire_radius: 100.0,
            min_turn_spacing: 200.0,
            max_turn: 60f64.to_radians(),
            widened_fov: true,
            info_bias: 0.5,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |f: &str, m: &str| Err(Error::config(format!("global_planner.{f}"), m));
        if !(self.budget > 0.0) {
            return fail("budget", "must be positive");
        }
        if !(self.min_turn_spacing > 0.0) {
            return fail("min_turn_spacing", "must be positive");
        }
        if !(self.max_turn > 0.0) {
            return fail("max_turn", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.info_bias) {
            return fail("info_bias", "must be in [0, 1]");
        }
        if !(self.rewire_radius >= 0.0) {
            return fail("rewire_radius", "must be non-negative");
        }
        Ok(())
    }
}

/// How coverage along a trajectory is scored.
#[derive(Debug, Clone, Copy)]
pub struct CoverageModel<'a> {
    pub model: &'a SensorModel,
    pub limits: GimbalLimits,
    pub confidence_threshold: f64,
    /// Arc-length spacing between simulated observations (m).
    pub spacing: f64,
}

impl CoverageModel<'_> {
    /// Applies the expected observation at `pose` to `scratch`; returns bits removed.
    fn observe(&self, scratch: &mut BeliefGrid, pose: &UavState, widened: bool) -> f64 {
        let fp0 = match self.model.instantaneous_footprint(pose, 0.0) {
            Ok(fp) => fp,
            Err(_) => return 0.0,
        };
        let mut cells = cells_with_center_in(scratch, fp0.vertices(), 0.0);
        if widened {
            if let Ok(swept) = self.model.swept_trapezoid(pose, self.limits.psi_min, self.limits.psi_max) {
                cells.extend(cells_with_center_in(scratch, swept.vertices(), 1e-9));
                cells.sort_unstable();
                cells.dedup();
            }
        }
        let mut gained = 0.0;
        for c in cells {
            let rates = self.model.rates_at_range(slant_range(pose, scratch.cell_center(c)));
            let i = scratch.linear_index(c);
            gained += scratch.apply_expected_at(i, &rates, self.confidence_threshold, true);
        }
        gained
    }

    /// Observations on the leg `a -> b`, which starts `cost_before` metres
    /// into the trajectory; samples sit at whole multiples of `spacing`.
    fn observe_leg(&self, scratch: &mut BeliefGrid, a: &UavState, b: &UavState, cost_before: f64, widened: bool) -> f64 {
        let len = a.position().distance(b.position());
        if len <= 0.0 || !(self.spacing > 0.0) {
            return 0.0;
        }
        let heading = a.position().bearing_to(b.position());
        let mut k = (cost_before / self.spacing).floor() as u64 + 1;
        let mut gained = 0.0;
        loop {
            let s = k as f64 * self.spacing - cost_before;
            if s > len + 1e-9 {
                break;
            }
            if s > 0.0 {
                let p = a.position().lerp(b.position(), (s / len).min(1.0));
                let pose = UavState::new(p.x, p.y, a.z + (b.z - a.z) * (s / len).min(1.0), heading);
                gained += self.observe(scratch, &pose, widened);
            }
            k += 1;
        }
        gained
    }
}

/// Bits of entropy an expected-update pass along `traj` removes from `grid`.
/// Works on a scratch copy; per-cell rewards never go negative.
pub fn trajectory_information(traj: &Trajectory, grid: &BeliefGrid, cov: &CoverageModel, widened: bool) -> f64 {
    let mut scratch = grid.clone();
    let h0 = scratch.total_entropy();
    let mut cost = 0.0;
    for w in traj.waypoints.windows(2) {
        cov.observe_leg(&mut scratch, &w[0], &w[1], cost, widened);
        cost += w[0].position().distance(w[1].position());
    }
    (h0 - scratch.total_entropy()).max(0.0)
}

struct Node {
    pose: UavState,
    cost: f64,
    info: f64,
    parent: Option<usize>,
    belief: BeliefGrid,
}

fn peak_reward_weights(grid: &BeliefGrid, model: &SensorModel, confidence_threshold: f64) -> Vec<f64> {
    let peak = DetectionRates::symmetric(model.p_peak);
    grid.cells()
        .iter()
        .map(|&p| expected_reduction_unchecked(p, &peak, confidence_threshold).0.max(0.0))
        .collect()
}

/// Plans a trajectory from `start` within `params.budget`. Deterministic for a given seed.
pub fn plan_global(start: UavState, grid: &BeliefGrid, cov: &CoverageModel, params: &PlannerParams, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_leg = 2.0 * params.min_turn_spacing;
    let weights = peak_reward_weights(grid, cov.model, cov.confidence_threshold);
    let weighted = WeightedIndex::new(&weights).ok();

    let mut nodes = vec![Node {
        pose: start,
        cost: 0.0,
        info: 0.0,
        parent: None,
        belief: grid.clone(),
    }];
    if params.budget < params.min_turn_spacing {
        return Trajectory::stationary(start);
    }

    for _ in 0..params.sample_count {
        let target = match &weighted {
            Some(w) if rng.random::<f64>() < params.info_bias => {
                let i = w.sample(&mut rng);
                let c = grid.indices().nth(i).expect("weight index within grid");
                let jitter = Point2::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
                grid.cell_center(c) + jitter * grid.cell_size()
            }
            _ => {
                let o = grid.origin();
                Point2::new(
                    o.x + rng.random::<f64>() * grid.width(),
                    o.y + rng.random::<f64>() * grid.height(),
                )
            }
        };

        let Some(from) = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| params.budget - n.cost >= params.min_turn_spacing)
            .min_by(|(_, a), (_, b)| {
                let da = a.pose.position().distance(target);
                let db = b.pose.position().distance(target);
                da.total_cmp(&db)
            })
            .map(|(i, _)| i)
        else {
            break;
        };

        let parent = &nodes[from];
        let here = parent.pose.position();
        let turn = wrap_angle(here.bearing_to(target) - parent.pose.psi).clamp(-params.max_turn, params.max_turn);
        let heading = wrap_angle(parent.pose.psi + turn);
        let remaining = params.budget - parent.cost;
        let leg = here
            .distance(target)
            .clamp(params.min_turn_spacing, max_leg)
            .min(remaining);
        let end = here + Point2::from_angle(heading) * leg;
        if !grid.contains_point(end) {
            continue;
        }
        let pose = UavState::new(end.x, end.y, parent.pose.z, heading);
        let cost = parent.cost + leg;

        let mut belief = parent.belief.clone();
        let gained = cov.observe_leg(&mut belief, &parent.pose, &pose, parent.cost, params.widened_fov);
        let info = parent.info + gained;

        let dominated = nodes.iter().any(|n| {
            n.pose.position().distance(end) <= params.rewire_radius
                && n.cost <= cost
                && n.info >= info
        });
        if dominated {
            continue;
        }
        nodes.push(Node {
            pose,
            cost,
            info,
            parent: Some(from),
            belief,
        });
    }

    let best = nodes
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.info
                .total_cmp(&b.info)
                .then(b.cost.total_cmp(&a.cost))
                .then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .unwrap_or(0);

    let mut chain = Vec::new();
    let mut cur = Some(best);
    while let Some(i) = cur {
        chain.push(nodes[i].pose);
        cur = nodes[i].parent;
    }
    chain.reverse();
    // Vertex headings follow the outgoing leg so the plan reads like any other trajectory.
    let pts: Vec<Point2> = chain.iter().map(|p| p.position()).collect();
    if pts.len() == 1 {
        return Trajectory::stationary(start);
    }
    Trajectory::from_points(pts, start.z)
}
