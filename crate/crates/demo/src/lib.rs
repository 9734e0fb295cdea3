//! Browser bindings for the static demo page in `www/`.
//!
//! Geometry and grids cross the boundary as flat `f64` arrays:
//! polygons as `[x0, y0, x1, y1, ...]`, grids row-major from the bottom row.

use wasm_bindgen::prelude::*;

use sweepplan::geometry::{build_horizon_polygon, PathAxis};
use sweepplan::harness::{prepare, ScenarioConfig};
use sweepplan::simulator::{RunSetup, SimState};
use sweepplan::sweep_planner::future_position;
use sweepplan::{Point2, SensorModel, Strategy, Trajectory, UavState};

const SCENARIO: &str = include_str!("../../../configs/acceptance.toml");

fn flat(points: &[Point2]) -> Vec<f64> {
    points.iter().flat_map(|p| [p.x, p.y]).collect()
}

fn js(e: String) -> JsError {
    JsError::new(&e)
}

fn model(pitch_deg: f64, fov_h_deg: f64, fov_v_deg: f64) -> Result<SensorModel, String> {
    let m = SensorModel {
        pitch: pitch_deg.to_radians(),
        fov_h: fov_h_deg.to_radians(),
        fov_v: fov_v_deg.to_radians(),
        ..SensorModel::default()
    };
    m.validate().map_err(|e| e.to_string())?;
    Ok(m)
}

fn curve(alpha: f64, beta: f64, max_range: f64, step: f64) -> Result<Vec<f64>, String> {
    let m = SensorModel { alpha, beta, ..SensorModel::default() };
    m.validate().map_err(|e| e.to_string())?;
    if !(step > 0.0) {
        return Err("step must be positive".into());
    }
    let n = (max_range / step).floor() as usize;
    Ok((0..=n).map(|k| m.tpr_at_range(k as f64 * step)).collect())
}

#[allow(clippy::too_many_arguments)]
fn quads(
    altitude: f64,
    pitch_deg: f64,
    fov_h_deg: f64,
    fov_v_deg: f64,
    yaw_deg: f64,
    psi1_deg: f64,
    psi2_deg: f64,
) -> Result<Vec<f64>, String> {
    let m = model(pitch_deg, fov_h_deg, fov_v_deg)?;
    let uav = UavState::new(0.0, 0.0, altitude, 0.0);
    let inst = m
        .instantaneous_footprint(&uav, yaw_deg.to_radians())
        .map_err(|e| e.to_string())?;
    let swept = m
        .swept_trapezoid(&uav, psi1_deg.to_radians(), psi2_deg.to_radians())
        .map_err(|e| e.to_string())?;
    let mut out = flat(inst.vertices());
    out.extend(flat(swept.vertices()));
    Ok(out)
}

/// True-positive rate sampled every `step` metres on `[0, max_range]`.
#[wasm_bindgen]
pub fn sensor_curve(alpha: f64, beta: f64, max_range: f64, step: f64) -> Result<Vec<f64>, JsError> {
    curve(alpha, beta, max_range, step).map_err(js)
}

/// Instantaneous footprint at `yaw_deg` and the swept trapezoid over
/// `[psi1_deg, psi2_deg]` for a UAV at the origin heading +x, concatenated
/// as 8 vertices.
#[wasm_bindgen]
pub fn footprints(
    altitude: f64,
    pitch_deg: f64,
    fov_h_deg: f64,
    fov_v_deg: f64,
    yaw_deg: f64,
    psi1_deg: f64,
    psi2_deg: f64,
) -> Result<Vec<f64>, JsError> {
    quads(altitude, pitch_deg, fov_h_deg, fov_v_deg, yaw_deg, psi1_deg, psi2_deg).map_err(js)
}

/// Closed-loop simulation on a generated scenario.
#[wasm_bindgen]
pub struct SimDemo {
    state: SimState,
    plan: Trajectory,
    setup: RunSetup,
    strategy: Strategy,
    h0: f64,
}

impl SimDemo {
    fn create(seed: u64, strategy: &str) -> Result<SimDemo, String> {
        let strategy: Strategy = strategy.parse()?;
        let mut cfg = ScenarioConfig::parse(SCENARIO).map_err(|e| e.to_string())?;
        cfg.map.seed = seed;
        cfg.experiment.seed = seed;
        let prepared = prepare(&cfg, None).map_err(|e| e.to_string())?;
        let setup = cfg.run_setup().map_err(|e| e.to_string())?;
        let state = SimState::new(prepared.grid, &prepared.plan, strategy, &setup, seed);
        let h0 = state.grid.total_entropy();
        Ok(SimDemo { state, plan: prepared.plan, setup, strategy, h0 })
    }
}

#[wasm_bindgen]
impl SimDemo {
    /// `strategy` is `adaptive`, `predefined_sweep` or `no_sweep`.
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64, strategy: &str) -> Result<SimDemo, JsError> {
        Self::create(seed, strategy).map_err(js)
    }

    /// Advances up to `n` simulation ticks; returns whether the plan is finished.
    pub fn step(&mut self, n: u32) -> bool {
        for _ in 0..n {
            if self.state.done {
                break;
            }
            self.state.step(&self.plan, self.strategy, &self.setup);
        }
        self.state.done
    }

    pub fn n_cols(&self) -> usize {
        self.state.grid.n_cols()
    }

    pub fn n_rows(&self) -> usize {
        self.state.grid.n_rows()
    }

    pub fn cell_size(&self) -> f64 {
        self.state.grid.cell_size()
    }

    pub fn cells(&self) -> Vec<f64> {
        self.state.grid.cells().to_vec()
    }

    pub fn plan(&self) -> Vec<f64> {
        let pts: Vec<Point2> = self.plan.waypoints().iter().map(|w| w.position()).collect();
        flat(&pts)
    }

    /// `[t, x, y, heading, yaw, psi1, psi2, pct_reduction]`, angles in degrees.
    pub fn status(&self) -> Vec<f64> {
        let s = &self.state;
        let h = s.grid.total_entropy();
        let pct = if self.h0 > 0.0 { 100.0 * (self.h0 - h) / self.h0 } else { 0.0 };
        vec![
            s.time,
            s.uav.x,
            s.uav.y,
            s.uav.psi.to_degrees(),
            s.gimbal.yaw.to_degrees(),
            s.gimbal.bounds.psi1.to_degrees(),
            s.gimbal.bounds.psi2.to_degrees(),
            pct,
        ]
    }

    /// Current instantaneous footprint.
    pub fn footprint(&self) -> Vec<f64> {
        self.setup
            .model
            .instantaneous_footprint(&self.state.uav, self.state.gimbal.yaw)
            .map(|f| flat(f.vertices()))
            .unwrap_or_default()
    }

    /// Planning-horizon polygon at the current pose; empty when undefined.
    pub fn horizon(&self) -> Vec<f64> {
        let s = &self.state;
        let lim = &self.setup.sim.limits;
        let m = &self.setup.model;
        let t_sweep = lim.span() / self.setup.sim.gimbal_rate;
        let poly = (|| {
            let wp = s.wp.min(self.plan.len().saturating_sub(1));
            let fut = future_position(&self.plan, wp, &s.uav, self.setup.sim.speed, t_sweep, self.setup.sweep.t_future).ok()?;
            let fc = m.swept_trapezoid(&s.uav, lim.psi_min, lim.psi_max).ok()?;
            let ff = m.swept_trapezoid(&fut, lim.psi_min, lim.psi_max).ok()?;
            let axis = PathAxis::between(s.uav.position(), fut.position(), s.uav.psi);
            build_horizon_polygon(&fc, &ff, axis).ok()
        })();
        poly.map(|p| flat(&p.vertices)).unwrap_or_default()
    }
}
