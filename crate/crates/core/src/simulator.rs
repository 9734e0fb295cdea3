//! Kinematic closed-loop simulation: the UAV follows a fixed plan at constant
//! speed, the gimbal bounces between its active bounds, and every measurement
//! tick updates the belief grid from the cells inside the camera footprint.

use std::fmt::Write as _;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief_map::{percent_entropy_reduction, BeliefGrid, Measurement};
use crate::geometry::cells_with_center_in;
use crate::global_planner::Trajectory;
use crate::sensor_model::{slant_range, SensorModel};
use crate::sweep_planner::{plan_sweep, BoundaryHit, GimbalLimits, Kinematics, SweepBounds, SweepDecision, SweepPlannerConfig, UavState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Adaptive,
    PredefinedSweep,
    NoSweep,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Adaptive, Strategy::PredefinedSweep, Strategy::NoSweep];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Adaptive => "adaptive",
            Strategy::PredefinedSweep => "predefined_sweep",
            Strategy::NoSweep => "no_sweep",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "adaptive" => Ok(Strategy::Adaptive),
            "predefined_sweep" | "predefined" => Ok(Strategy::PredefinedSweep),
            "no_sweep" | "none" => Ok(Strategy::NoSweep),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GimbalState {
    pub yaw: f64,
    pub rate: f64,
    pub direction: f64,
    pub bounds: SweepBounds,
}

impl GimbalState {
    /// Moves the yaw by `rate * dt`, reflecting at the active bounds. A yaw
    /// left outside freshly shrunk bounds slews toward the nearest one.
    pub fn advance(&mut self, dt: f64) {
        let SweepBounds { psi1: lo, psi2: hi } = self.bounds;
        let step = self.rate * dt;
        if self.yaw > hi {
            self.yaw = (self.yaw - step).max(hi);
            self.direction = -1.0;
            return;
        }
        if self.yaw < lo {
            self.yaw = (self.yaw + step).min(lo);
            self.direction = 1.0;
            return;
        }
        if hi <= lo {
            self.yaw = lo;
            return;
        }
        let mut remaining = step;
        // bounded: at most one reflection per full span
        for _ in 0..64 {
            if remaining <= 0.0 {
                break;
            }
            let target = if self.direction > 0.0 { hi } else { lo };
            let gap = (target - self.yaw).abs();
            if remaining <= gap {
                self.yaw += self.direction * remaining;
                remaining = 0.0;
            } else {
                self.yaw = target;
                remaining -= gap;
                self.direction = -self.direction;
            }
        }
        self.yaw = self.yaw.clamp(lo, hi);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub meas_period: f64,
    pub speed: f64,
    pub gimbal_rate: f64,
    pub limits: GimbalLimits,
    /// Draw Bernoulli measurements against ground truth instead of expected updates.
    pub sampled_measurements: bool,
    /// Skip expected updates that would raise a cell's entropy.
    pub clamp_rewards: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 0.1,
            meas_period: 0.5,
            speed: 20.0,
            gimbal_rate: 30f64.to_radians(),
            limits: GimbalLimits::symmetric(30f64.to_radians()),
            sampled_measurements: false,
            clamp_rewards: true,
        }
    }
}

/// Everything a run needs besides the map and the plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSetup {
    pub model: SensorModel,
    pub sweep: SweepPlannerConfig,
    pub sim: SimConfig,
}

impl RunSetup {
    fn kinematics(&self) -> Kinematics {
        Kinematics {
            limits: self.sim.limits,
            gimbal_rate: self.sim.gimbal_rate,
            speed: self.sim.speed,
        }
    }

    fn ticks(period: f64, dt: f64) -> u64 {
        ((period / dt).round() as u64).max(1)
    }
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub time: f64,
    pub uav: UavState,
    pub gimbal: GimbalState,
    /// Index of the next waypoint to reach.
    pub wp: usize,
    pub grid: BeliefGrid,
    /// Per-cell target presence, used only in sampled-measurement mode.
    pub ground_truth: Option<Vec<bool>>,
    pub steps: u64,
    pub done: bool,
    pub last_decision: Option<SweepDecision>,
    rng: ChaCha8Rng,
}

impl SimState {
    pub fn new(grid: BeliefGrid, plan: &Trajectory, strategy: Strategy, setup: &RunSetup, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ground_truth = setup.sim.sampled_measurements.then(|| {
            grid.cells().iter().map(|&p| rng.random::<f64>() < p).collect()
        });
        let uav = plan
            .waypoints()
            .first()
            .copied()
            .unwrap_or(UavState::new(0.0, 0.0, 100.0, 0.0));
        let bounds = match strategy {
            Strategy::NoSweep => SweepBounds { psi1: 0.0, psi2: 0.0 },
            _ => setup.sim.limits.full(),
        };
        Self {
            time: 0.0,
            uav,
            gimbal: GimbalState {
                yaw: 0.0,
                rate: setup.sim.gimbal_rate,
                direction: 1.0,
                bounds,
            },
            wp: 1,
            grid,
            ground_truth,
            steps: 0,
            done: plan.len() < 2,
            last_decision: None,
            rng,
        }
    }

    fn advance_uav(&mut self, plan: &Trajectory, distance: f64) {
        let pts = plan.waypoints();
        let mut remaining = distance;
        while self.wp < pts.len() && remaining > 0.0 {
            let here = self.uav.position();
            let next = pts[self.wp];
            let gap = here.distance(next.position());
            if gap <= remaining {
                remaining -= gap;
                self.uav = UavState::new(next.x, next.y, next.z, self.uav.psi);
                self.wp += 1;
                if let Some(after) = pts.get(self.wp) {
                    if after.position() != next.position() {
                        self.uav.psi = next.position().bearing_to(after.position());
                    }
                }
            } else {
                let p = here.lerp(next.position(), remaining / gap);
                self.uav = UavState::new(p.x, p.y, self.uav.z, here.bearing_to(next.position()));
                remaining = 0.0;
            }
        }
        if self.wp >= pts.len() {
            self.done = true;
        }
    }

    fn measure(&mut self, model: &SensorModel, setup: &RunSetup) {
        let Ok(fp) = model.instantaneous_footprint(&self.uav, self.gimbal.yaw) else {
            return;
        };
        for c in cells_with_center_in(&self.grid, fp.vertices(), 0.0) {
            let range = slant_range(&self.uav, self.grid.cell_center(c));
            match &self.ground_truth {
                Some(truth) => {
                    let rates = model.rates_at_range(range);
                    let present = truth[self.grid.linear_index(c)];
                    let p_pos = if present { rates.tpr } else { rates.fpr };
                    let z = if self.rng.random::<f64>() < p_pos {
                        Measurement::Positive
                    } else {
                        Measurement::Negative
                    };
                    let _ = self.grid.apply_measurement(c, range, model, z);
                }
                None => {
                    let rates = model.rates_at_range(range);
                    let i = self.grid.linear_index(c);
                    self.grid
                        .apply_expected_at(i, &rates, setup.sweep.confidence_threshold, setup.sim.clamp_rewards);
                }
            }
        }
    }

    /// Advances by one `setup.sim.dt`.
    pub fn step(&mut self, plan: &Trajectory, strategy: Strategy, setup: &RunSetup) -> StepEvent {
        let mut event = StepEvent::default();
        if self.done {
            return event;
        }
        let dt = setup.sim.dt;
        let replan_every = RunSetup::ticks(setup.sweep.replan_period, dt);
        let meas_every = RunSetup::ticks(setup.sim.meas_period, dt);

        match strategy {
            Strategy::Adaptive if self.steps % replan_every == 0 => {
                let d = plan_sweep(plan, self.wp.min(plan.len().saturating_sub(1)), &self.uav, &self.grid, &setup.model, &setup.sweep, &setup.kinematics());
                self.gimbal.bounds = d.bounds;
                self.last_decision = Some(d);
                event.decision = Some(d);
            }
            Strategy::NoSweep => {
                self.gimbal.bounds = SweepBounds { psi1: 0.0, psi2: 0.0 };
                self.gimbal.yaw = 0.0;
            }
            _ => {}
        }
        self.gimbal.advance(dt);
        self.advance_uav(plan, setup.sim.speed * dt);
        self.steps += 1;
        self.time = self.steps as f64 * dt;
        if self.steps % meas_every == 0 {
            self.measure(&setup.model, setup);
            event.measured = true;
        }
        event
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepEvent {
    pub measured: bool,
    /// Set on steps where the adaptive planner ran.
    pub decision: Option<SweepDecision>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub entropy_bits: f64,
    pub pct_reduction: f64,
    pub psi_c: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub x: f64,
    pub y: f64,
}

pub const DECISIONS_HEADER: &str =
    "t,mode,psi1_deg,psi2_deg,upper_col,upper_row,upper_layer,lower_col,lower_row,lower_layer";

pub const SERIES_HEADER: &str = "t,entropy_bits,pct_reduction,psi_c_deg,psi1_deg,psi2_deg,x,y";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub initial_entropy: f64,
    pub final_entropy: f64,
    pub final_pct: f64,
    pub duration: f64,
    /// Final percent reduction divided by run duration.
    pub pct_per_second: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub strategy: Strategy,
    pub series: Vec<SeriesRow>,
    pub decisions: Vec<(f64, SweepDecision)>,
    pub summary: RunSummary,
}

impl RunResult {
    pub fn series_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.series.len() + 1));
        out.push_str(SERIES_HEADER);
        out.push('\n');
        for r in &self.series {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.t,
                r.entropy_bits,
                r.pct_reduction,
                r.psi_c.to_degrees(),
                r.psi1.to_degrees(),
                r.psi2.to_degrees(),
                r.x,
                r.y
            );
        }
        out
    }
}

impl RunResult {
    /// One row per adaptive replan; empty cells where a side had no hit.
    pub fn decisions_csv(&self) -> String {
        let mut out = format!("{DECISIONS_HEADER}\n");
        let hit = |h: Option<BoundaryHit>| match h {
            Some(h) => format!("{},{},{}", h.cell.col, h.cell.row, h.layer),
            None => ",,".to_string(),
        };
        for (t, d) in &self.decisions {
            let _ = writeln!(
                out,
                "{t},{},{},{},{},{}",
                d.mode.as_str(),
                d.bounds.psi1.to_degrees(),
                d.bounds.psi2.to_degrees(),
                hit(d.upper),
                hit(d.lower)
            );
        }
        out
    }
}

fn pct(h0: f64, h: f64) -> f64 {
    percent_entropy_reduction(h0, h).unwrap_or(0.0)
}

fn row(state: &SimState, h0: f64) -> SeriesRow {
    let h = state.grid.total_entropy();
    SeriesRow {
        t: state.time,
        entropy_bits: h,
        pct_reduction: pct(h0, h),
        psi_c: state.gimbal.yaw,
        psi1: state.gimbal.bounds.psi1,
        psi2: state.gimbal.bounds.psi2,
        x: state.uav.x,
        y: state.uav.y,
    }
}

/// Flies `plan` to its end under `strategy`, sampling the series at every
/// measurement tick.
pub fn run_scenario(grid: &BeliefGrid, plan: &Trajectory, strategy: Strategy, setup: &RunSetup, seed: u64) -> RunResult {
    let mut state = SimState::new(grid.clone(), plan, strategy, setup, seed);
    let h0 = state.grid.total_entropy();
    let mut series = vec![row(&state, h0)];
    let mut decisions = Vec::new();
    let max_steps = ((plan.cost() / setup.sim.speed.max(1e-9)) / setup.sim.dt).ceil() as u64 + 10;
    while !state.done && state.steps < max_steps {
        let t_before = state.time;
        let event = state.step(plan, strategy, setup);
        if let Some(d) = event.decision {
            decisions.push((t_before, d));
        }
        if event.measured || state.done {
            series.push(row(&state, h0));
        }
    }
    let last = *series.last().expect("series starts with t = 0");
    let duration = last.t;
    RunResult {
        strategy,
        decisions,
        summary: RunSummary {
            initial_entropy: h0,
            final_entropy: last.entropy_bits,
            final_pct: last.pct_reduction,
            duration,
            pct_per_second: if duration > 0.0 { last.pct_reduction / duration } else { 0.0 },
        },
        series,
    }
}
