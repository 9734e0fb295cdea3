//! Monte-Carlo batches: one shared global plan per scenario, every strategy
//! flown over it, then per-strategy aggregates and paired differences.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::Serialize;

use super::config::ScenarioConfig;
use crate::belief_map::BeliefGrid;
use crate::error::Result;
use crate::global_planner::{plan_global, Trajectory};
use crate::simulator::{run_scenario, RunResult, Strategy};
use crate::sweep_planner::UavState;

/// z-score of a two-sided 95 % normal interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Sample mean with a normal-approximation 95 % interval. The interval is
/// NaN when fewer than two samples are available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl MeanCi {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self { n, mean: f64::NAN, ci_lo: f64::NAN, ci_hi: f64::NAN };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self { n, mean, ci_lo: f64::NAN, ci_hi: f64::NAN };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let half = Z_95 * (var / n as f64).sqrt();
        Self { n, mean, ci_lo: mean - half, ci_hi: mean + half }
    }

    /// True when the interval lies strictly on one side of zero.
    pub fn excludes_zero(&self) -> bool {
        self.ci_lo > 0.0 || self.ci_hi < 0.0
    }
}

/// Everything needed to fly one scenario: prior, start pose and global plan.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub grid: BeliefGrid,
    pub start: UavState,
    pub plan: Trajectory,
}

/// Builds the prior and start pose, then plans (or adopts `plan`).
pub fn prepare(cfg: &ScenarioConfig, plan: Option<Trajectory>) -> Result<Prepared> {
    cfg.validate()?;
    let grid = cfg.build_grid()?;
    let start = cfg.start_state(&grid);
    let plan = match plan {
        Some(p) => p,
        None => {
            let model = cfg.sensor_model()?;
            let cov = cfg.coverage(&model, &grid);
            plan_global(start, &grid, &cov, &cfg.planner_params(), cfg.experiment.seed)
        }
    };
    Ok(Prepared { grid, start, plan })
}

/// Flies one strategy over a prepared scenario.
pub fn fly(cfg: &ScenarioConfig, prepared: &Prepared, strategy: Strategy) -> Result<RunResult> {
    let setup = cfg.run_setup()?;
    Ok(run_scenario(&prepared.grid, &prepared.plan, strategy, &setup, cfg.experiment.seed))
}

#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub index: usize,
    pub seed: u64,
    pub config: ScenarioConfig,
    pub plan: Trajectory,
    pub runs: Vec<RunResult>,
}

impl ScenarioOutcome {
    pub fn run(&self, strategy: Strategy) -> Option<&RunResult> {
        self.runs.iter().find(|r| r.strategy == strategy)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub index: usize,
    pub strategy: Option<Strategy>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrategyAggregate {
    pub strategy: Strategy,
    pub final_pct: MeanCi,
    pub rate_per_s: MeanCi,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedDifference {
    pub reference: Strategy,
    pub other: Strategy,
    /// reference minus other, in percentage points of final reduction.
    pub final_pct: MeanCi,
}

/// Mean percent reduction over time; runs that ended early hold their last value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanSeries {
    pub t: Vec<f64>,
    pub pct: Vec<(Strategy, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct BatchSummary {
    pub strategies: Vec<Strategy>,
    /// Successful scenarios, sorted by index.
    pub outcomes: Vec<ScenarioOutcome>,
    pub failures: Vec<RunFailure>,
    pub aggregates: Vec<StrategyAggregate>,
    pub differences: Vec<PairedDifference>,
    pub mean_series: MeanSeries,
}

impl BatchSummary {
    pub fn empty(strategies: &[Strategy]) -> Self {
        summarize(Vec::new(), Vec::new(), strategies, 1.0)
    }

    pub fn aggregate(&self, s: Strategy) -> Option<&StrategyAggregate> {
        self.aggregates.iter().find(|a| a.strategy == s)
    }

    pub fn difference(&self, reference: Strategy, other: Strategy) -> Option<&PairedDifference> {
        self.differences
            .iter()
            .find(|d| d.reference == reference && d.other == other)
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

fn run_one_config(index: usize, cfg: &ScenarioConfig, strategies: &[Strategy]) -> (Option<ScenarioOutcome>, Vec<RunFailure>) {
    let fail = |strategy, message: String| RunFailure { index, strategy, message };
    let prepared = match catch_unwind(AssertUnwindSafe(|| prepare(cfg, None))) {
        Ok(Ok(p)) => p,
        Ok(Err(e)) => return (None, vec![fail(None, e.to_string())]),
        Err(p) => return (None, vec![fail(None, panic_message(p))]),
    };
    let mut runs = Vec::with_capacity(strategies.len());
    let mut failures = Vec::new();
    for &s in strategies {
        match catch_unwind(AssertUnwindSafe(|| fly(cfg, &prepared, s))) {
            Ok(Ok(r)) => runs.push(r),
            Ok(Err(e)) => failures.push(fail(Some(s), e.to_string())),
            Err(p) => failures.push(fail(Some(s), panic_message(p))),
        }
    }
    let outcome = ScenarioOutcome {
        index,
        seed: cfg.experiment.seed,
        config: cfg.clone(),
        plan: prepared.plan,
        runs,
    };
    (Some(outcome), failures)
}

/// Runs every strategy on every config in parallel. Failed runs are recorded
/// in `failures` and left out of the statistics.
pub fn run_batch(configs: &[ScenarioConfig], strategies: &[Strategy]) -> BatchSummary {
    let results: Vec<_> = configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| run_one_config(i, cfg, strategies))
        .collect();
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (o, f) in results {
        outcomes.extend(o);
        failures.extend(f);
    }
    for f in &failures {
        eprintln!(
            "warning: scenario {} ({}) failed: {}",
            f.index,
            f.strategy.map_or("setup", |s| s.as_str()),
            f.message
        );
    }
    let step = configs.first().map_or(1.0, |c| c.sim.meas_period);
    summarize(outcomes, failures, strategies, step)
}

fn summarize(outcomes: Vec<ScenarioOutcome>, failures: Vec<RunFailure>, strategies: &[Strategy], step: f64) -> BatchSummary {
    let finals = |s: Strategy| -> Vec<f64> {
        outcomes
            .iter()
            .filter_map(|o| o.run(s))
            .map(|r| r.summary.final_pct)
            .collect()
    };
    let aggregates = strategies
        .iter()
        .map(|&s| {
            let rates: Vec<f64> = outcomes
                .iter()
                .filter_map(|o| o.run(s))
                .map(|r| r.summary.pct_per_second)
                .collect();
            StrategyAggregate {
                strategy: s,
                final_pct: MeanCi::from_samples(&finals(s)),
                rate_per_s: MeanCi::from_samples(&rates),
            }
        })
        .collect();

    let reference = if strategies.contains(&Strategy::Adaptive) {
        Some(Strategy::Adaptive)
    } else {
        strategies.first().copied()
    };
    let differences = reference
        .map(|r| {
            strategies
                .iter()
                .filter(|&&o| o != r)
                .map(|&o| paired_difference(&outcomes, r, o))
                .collect()
        })
        .unwrap_or_default();

    let mean_series = mean_series(&outcomes, strategies, step);
    BatchSummary {
        strategies: strategies.to_vec(),
        outcomes,
        failures,
        aggregates,
        differences,
        mean_series,
    }
}

/// Paired difference of final percent reduction over scenarios where both strategies succeeded.
pub fn paired_difference(outcomes: &[ScenarioOutcome], reference: Strategy, other: Strategy) -> PairedDifference {
    let diffs: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| Some(o.run(reference)?.summary.final_pct - o.run(other)?.summary.final_pct))
        .collect();
    PairedDifference {
        reference,
        other,
        final_pct: MeanCi::from_samples(&diffs),
    }
}

fn value_at(r: &RunResult, t: f64) -> f64 {
    let i = r.series.partition_point(|row| row.t <= t + 1e-9);
    r.series[i.saturating_sub(1)].pct_reduction
}

fn mean_series(outcomes: &[ScenarioOutcome], strategies: &[Strategy], step: f64) -> MeanSeries {
    let t_end = outcomes
        .iter()
        .flat_map(|o| &o.runs)
        .filter_map(|r| r.series.last())
        .map(|row| row.t)
        .fold(0.0f64, f64::max);
    if outcomes.is_empty() {
        return MeanSeries {
            t: Vec::new(),
            pct: strategies.iter().map(|&s| (s, Vec::new())).collect(),
        };
    }
    let n_t = (t_end / step).ceil() as usize + 1;
    let t: Vec<f64> = (0..n_t).map(|k| k as f64 * step).collect();
    let pct = strategies
        .iter()
        .map(|&s| {
            let runs: Vec<&RunResult> = outcomes.iter().filter_map(|o| o.run(s)).collect();
            let col = t
                .iter()
                .map(|&tk| {
                    if runs.is_empty() {
                        f64::NAN
                    } else {
                        runs.iter().map(|r| value_at(r, tk)).sum::<f64>() / runs.len() as f64
                    }
                })
                .collect();
            (s, col)
        })
        .collect();
    MeanSeries { t, pct }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_ci_matches_hand_values() {
        let m = MeanCi::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((m.ci_hi - 2.5 - Z_95 * sd / 2.0).abs() < 1e-12);
        assert!(m.excludes_zero());
        assert!(MeanCi::from_samples(&[1.0]).ci_lo.is_nan());
        assert!(!MeanCi::from_samples(&[-1.0, 1.0]).excludes_zero());
    }

    fn small() -> ScenarioConfig {
        ScenarioConfig::parse(
            r#"
            [map]
            width_m = 400.0
            height_m = 400.0
            cell_size = 20.0
            [sensor]
            alpha = 100.0
            beta = 250.0
            pitch_deg = 40.0
            fov_v_deg = 20.0
            fov_h_deg = 20.0
            [global_planner]
            budget = 400.0
            sample_count = 60
            min_turn_spacing = 100.0
            [sweep_planner]
            t_future = 1.0
            "#,
        )
        .unwrap()
    }

    #[test]
    fn self_difference_is_zero() {
        let cfgs = super::super::config::generate_scenarios(&small(), 3, 1).unwrap();
        let s = run_batch(&cfgs, &[Strategy::Adaptive, Strategy::NoSweep]);
        assert!(s.failures.is_empty());
        let d = paired_difference(&s.outcomes, Strategy::Adaptive, Strategy::Adaptive);
        assert_eq!(d.final_pct.mean, 0.0);
        assert!(d.final_pct.ci_lo <= 0.0 && d.final_pct.ci_hi >= 0.0);
        for o in &s.outcomes {
            for r in &o.runs {
                assert!(r.series.windows(2).all(|w| w[1].pct_reduction >= w[0].pct_reduction - 1e-9));
            }
        }
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut bad = small();
        bad.map.prior_file = Some("/nonexistent/prior.txt".into());
        let s = run_batch(&[small(), bad], &[Strategy::NoSweep]);
        assert_eq!(s.outcomes.len(), 1);
        assert_eq!(s.failures.len(), 1);
        assert_eq!(s.failures[0].index, 1);
        assert_eq!(s.aggregate(Strategy::NoSweep).unwrap().final_pct.n, 1);
    }
}
