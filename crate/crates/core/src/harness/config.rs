//! Scenario configuration (TOML). Angles are written in degrees here and
//! converted to radians when the runtime types are built.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::belief_map::{BeliefGrid, PatchLayout};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::global_planner::{CoverageModel, PlannerParams};
use crate::sensor_model::SensorModel;
use crate::simulator::{RunSetup, SimConfig, Strategy};
use crate::sweep_planner::{GimbalLimits, OneSidedPolicy, SweepPlannerConfig, UavState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapConfig {
    pub width_m: f64,
    pub height_m: f64,
    pub cell_size: f64,
    pub origin_x: f64,
    pub origin_y: f64,
    /// Prior-map file; when set, size and random patches are ignored.
    pub prior_file: Option<PathBuf>,
    /// Seed for random patch placement.
    pub seed: u64,
    pub random: PatchLayout,
    /// Explicit patches painted after the random ones.
    pub patch: Vec<RectPatch>,
}

impl Default for MapConfig {
    fn default() -> Self {
        Self {
            width_m: 5000.0,
            height_m: 5000.0,
            cell_size: 100.0,
            origin_x: 0.0,
            origin_y: 0.0,
            prior_file: None,
            seed: 0,
            random: PatchLayout::default(),
            patch: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectPatch {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorSection {
    pub alpha: f64,
    pub beta: f64,
    pub p_peak: f64,
    pub fov_h_deg: f64,
    pub fov_v_deg: f64,
    pub pitch_deg: f64,
    pub altitude: f64,
}

impl Default for SensorSection {
    fn default() -> Self {
        let m = SensorModel::default();
        Self {
            alpha: m.alpha,
            beta: m.beta,
            p_peak: m.p_peak,
            fov_h_deg: m.fov_h.to_degrees(),
            fov_v_deg: m.fov_v.to_degrees(),
            pitch_deg: m.pitch.to_degrees(),
            altitude: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GimbalSection {
    pub psi_min_deg: f64,
    pub psi_max_deg: f64,
    pub rate_deg_s: f64,
}

impl Default for GimbalSection {
    fn default() -> Self {
        Self {
            psi_min_deg: -30.0,
            psi_max_deg: 30.0,
            rate_deg_s: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GlobalPlannerSection {
    pub budget: f64,
    pub sample_count: usize,
    pub rewire_radius: f64,
    pub min_turn_spacing: f64,
    pub max_turn_deg: f64,
    pub widened_fov: bool,
    pub info_bias: f64,
    /// Arc-length spacing of scored observations (m); 0 means one cell.
    pub info_spacing: f64,
}

impl Default for GlobalPlannerSection {
    fn default() -> Self {
        let p = PlannerParams::default();
        Self {
            budget: p.budget,
            sample_count: p.sample_count,
            rewire_radius: p.rewire_radius,
            min_turn_spacing: p.min_turn_spacing,
            max_turn_deg: p.max_turn.to_degrees(),
            widened_fov: p.widened_fov,
            info_bias: p.info_bias,
            info_spacing: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepPlannerSection {
    pub t_future: f64,
    pub n_layers: usize,
    pub threshold_entropy: f64,
    pub confidence_threshold: f64,
    pub replan_period: f64,
    pub heading_tol_deg: f64,
    pub one_sided: OneSidedPolicy,
}

impl Default for SweepPlannerSection {
    fn default() -> Self {
        let c = SweepPlannerConfig::default();
        Self {
            t_future: c.t_future,
            n_layers: c.n_layers,
            threshold_entropy: c.threshold_entropy,
            confidence_threshold: c.confidence_threshold,
            replan_period: c.replan_period,
            heading_tol_deg: c.heading_tol.to_degrees(),
            one_sided: c.one_sided,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub dt: f64,
    pub meas_period: f64,
    pub speed: f64,
    pub sampled_measurements: bool,
    pub clamp_rewards: bool,
}

impl Default for SimSection {
    fn default() -> Self {
        let s = SimConfig::default();
        Self {
            dt: s.dt,
            meas_period: s.meas_period,
            speed: s.speed,
            sampled_measurements: s.sampled_measurements,
            clamp_rewards: s.clamp_rewards,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSection {
    pub x: f64,
    pub y: f64,
    pub heading_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub runs: usize,
    pub strategies: Vec<Strategy>,
    /// Master seed; per-run seeds are derived from it.
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Random starts keep this fraction of the map size away from the edges.
    pub start_margin: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            runs: 100,
            strategies: Strategy::ALL.to_vec(),
            seed: 0,
            out_dir: PathBuf::from("results"),
            start_margin: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub map: MapConfig,
    pub sensor: SensorSection,
    pub gimbal: GimbalSection,
    pub global_planner: GlobalPlannerSection,
    pub sweep_planner: SweepPlannerSection,
    pub sim: SimSection,
    pub experiment: ExperimentSection,
    /// Fixed start pose; drawn at random by scenario generation when absent.
    pub start: Option<StartSection>,
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive and finite, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let path = e
                .span()
                .map(|s| format!("byte {}..{}", s.start, s.end))
                .unwrap_or_else(|| "<root>".into());
            Error::config(path, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config; a relative `map.prior_file` is resolved against the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::parse(&text)?;
        if let (Some(prior), Some(dir)) = (cfg.map.prior_file.as_mut(), path.parent()) {
            if prior.is_relative() {
                *prior = dir.join(&*prior);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.map;
        if m.prior_file.is_none() {
            positive("map.width_m", m.width_m)?;
            positive("map.height_m", m.height_m)?;
            positive("map.cell_size", m.cell_size)?;
            let r = &m.random;
            for (f, p) in [("background", r.background), ("p_min", r.p_min), ("p_max", r.p_max)] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(format!("map.random.{f}"), "must be a probability"));
                }
            }
            if r.p_min > r.p_max {
                return Err(Error::config("map.random.p_min", "exceeds p_max"));
            }
        }
        for (i, p) in m.patch.iter().enumerate() {
            if !(0.0..=1.0).contains(&p.p) {
                return Err(Error::config(format!("map.patch[{i}].p"), "must be a probability"));
            }
        }
        positive("sensor.altitude", self.sensor.altitude)?;
        self.sensor_model().map_err(|e| Error::config("sensor", e.to_string()))?;
        let g = &self.gimbal;
        if !(g.psi_min_deg <= g.psi_max_deg) {
            return Err(Error::config("gimbal.psi_min_deg", "exceeds psi_max_deg"));
        }
        positive("gimbal.rate_deg_s", g.rate_deg_s)?;
        self.planner_params().validate()?;
        self.sweep_config().validate()?;
        positive("sim.dt", self.sim.dt)?;
        positive("sim.meas_period", self.sim.meas_period)?;
        positive("sim.speed", self.sim.speed)?;
        if self.experiment.runs == 0 {
            return Err(Error::config("experiment.runs", "must be at least 1"));
        }
        if self.experiment.strategies.is_empty() {
            return Err(Error::config("experiment.strategies", "must name at least one strategy"));
        }
        if !(0.0..0.5).contains(&self.experiment.start_margin) {
            return Err(Error::config("experiment.start_margin", "must be in [0, 0.5)"));
        }
        Ok(())
    }

    pub fn sensor_model(&self) -> Result<SensorModel> {
        let s = &self.sensor;
        let m = SensorModel {
            alpha: s.alpha,
            beta: s.beta,
            p_peak: s.p_peak,
            p_floor: 0.5,
            fov_h: s.fov_h_deg.to_radians(),
            fov_v: s.fov_v_deg.to_radians(),
            pitch: s.pitch_deg.to_radians(),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn limits(&self) -> GimbalLimits {
        GimbalLimits {
            psi_min: self.gimbal.psi_min_deg.to_radians(),
            psi_max: self.gimbal.psi_max_deg.to_radians(),
        }
    }

    pub fn planner_params(&self) -> PlannerParams {
        let g = &self.global_planner;
        PlannerParams {
            budget: g.budget,
            sample_count: g.sample_count,
            rewire_radius: g.rewire_radius,
            min_turn_spacing: g.min_turn_spacing,
            max_turn: g.max_turn_deg.to_radians(),
            widened_fov: g.widened_fov,
            info_bias: g.info_bias,
        }
    }

    pub fn sweep_config(&self) -> SweepPlannerConfig {
        let s = &self.sweep_planner;
        SweepPlannerConfig {
            t_future: s.t_future,
            n_layers: s.n_layers,
            threshold_entropy: s.threshold_entropy,
            confidence_threshold: s.confidence_threshold,
            replan_period: s.replan_period,
            heading_tol: s.heading_tol_deg.to_radians(),
            one_sided: s.one_sided,
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            dt: self.sim.dt,
            meas_period: self.sim.meas_period,
            speed: self.sim.speed,
            gimbal_rate: self.gimbal.rate_deg_s.to_radians(),
            limits: self.limits(),
            sampled_measurements: self.sim.sampled_measurements,
            clamp_rewards: self.sim.clamp_rewards,
        }
    }

    pub fn run_setup(&self) -> Result<RunSetup> {
        Ok(RunSetup {
            model: self.sensor_model()?,
            sweep: self.sweep_config(),
            sim: self.sim_config(),
        })
    }

    pub fn coverage<'a>(&self, model: &'a SensorModel, grid: &BeliefGrid) -> CoverageModel<'a> {
        let spacing = if self.global_planner.info_spacing > 0.0 {
            self.global_planner.info_spacing
        } else {
            grid.cell_size()
        };
        CoverageModel {
            model,
            limits: self.limits(),
            confidence_threshold: self.sweep_planner.confidence_threshold,
            spacing,
        }
    }

    /// The prior map this scenario describes.
    pub fn build_grid(&self) -> Result<BeliefGrid> {
        let m = &self.map;
        let mut grid = match &m.prior_file {
            Some(path) => BeliefGrid::load_prior(path)?,
            None => {
                let n_cols = (m.width_m / m.cell_size).round().max(1.0) as usize;
                let n_rows = (m.height_m / m.cell_size).round().max(1.0) as usize;
                let mut rng = ChaCha8Rng::seed_from_u64(m.seed);
                BeliefGrid::random_patchy(
                    Point2::new(m.origin_x, m.origin_y),
                    m.cell_size,
                    n_cols,
                    n_rows,
                    &m.random,
                    &mut rng,
                )?
            }
        };
        for patch in &m.patch {
            let (lo, hi) = (
                Point2::new(patch.x0.min(patch.x1), patch.y0.min(patch.y1)),
                Point2::new(patch.x0.max(patch.x1), patch.y0.max(patch.y1)),
            );
            let cells: Vec<_> = grid
                .indices()
                .filter(|&c| {
                    let p = grid.cell_center(c);
                    p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y
                })
                .collect();
            for c in cells {
                grid.set(c, patch.p)?;
            }
        }
        Ok(grid)
    }

    /// Configured start pose, or the map centre heading +x.
    pub fn start_state(&self, grid: &BeliefGrid) -> UavState {
        let z = self.sensor.altitude;
        match self.start {
            Some(s) => UavState::new(s.x, s.y, z, s.heading_deg.to_radians()),
            None => {
                let o = grid.origin();
                UavState::new(o.x + grid.width() / 2.0, o.y + grid.height() / 2.0, z, 0.0)
            }
        }
    }
}

/// `n` scenario variants of `base` with their own map seed and a random
/// in-bounds start pose, all derived from `seed`.
pub fn generate_scenarios(base: &ScenarioConfig, n: usize, seed: u64) -> Result<Vec<ScenarioConfig>> {
    if n == 0 {
        return Err(Error::config("experiment.runs", "must be at least 1"));
    }
    base.validate()?;
    let grid = base.build_grid()?;
    let o = grid.origin();
    let (w, h) = (grid.width(), grid.height());
    let margin = base.experiment.start_margin;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out = (0..n)
        .map(|_| {
            let mut cfg = base.clone();
            cfg.map.seed = rng.random();
            cfg.experiment.seed = rng.random();
            cfg.experiment.runs = 1;
            let fx = margin + rng.random::<f64>() * (1.0 - 2.0 * margin);
            let fy = margin + rng.random::<f64>() * (1.0 - 2.0 * margin);
            cfg.start = Some(StartSection {
                x: o.x + fx * w,
                y: o.y + fy * h,
                heading_deg: rng.random_range(-180.0..180.0),
            });
            cfg
        })
        .collect();
    Ok(out)
}
