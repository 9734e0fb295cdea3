//! Adaptive gimbal sweep planning for a fixed-wing search UAV.
//!
//! A Bayesian occupancy grid holds the target belief, a range-dependent
//! detection model scores cells, a sampling-based global planner lays out the
//! flight path and a local sweep planner picks the yaw interval swept by the
//! camera at each step. [`simulator`] ties them together and [`harness`] runs
//! Monte-Carlo batches from TOML configs.

pub mod belief_map;
pub mod error;
pub mod geometry;
pub mod global_planner;
pub mod harness;
pub mod sensor_model;
pub mod simulator;
pub mod sweep_planner;

pub use belief_map::{BeliefGrid, CellIndex, Measurement};
pub use error::{Error, Result};
pub use geometry::{HorizonPolygon, PathAxis, Point2};
pub use global_planner::{plan_global, PlannerParams, Trajectory};
pub use sensor_model::{DetectionRates, FootprintTrapezoid, SensorModel};
pub use simulator::{run_scenario, RunResult, RunSetup, SimConfig, Strategy};
pub use sweep_planner::{plan_sweep, GimbalLimits, SweepBounds, SweepPlannerConfig, UavState};
