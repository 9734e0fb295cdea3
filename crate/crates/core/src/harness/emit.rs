//! Output tree written by a batch:
//!
//! ```text
//! <dir>/aggregate.csv        strategy,n,mean_final_pct,ci_lo,ci_hi,mean_rate_per_s
//! <dir>/differences.csv      reference,other,n,mean_diff_pct,ci_lo,ci_hi
//! <dir>/runs.csv             index,seed,strategy,final_pct,pct_per_second,duration_s
//! <dir>/mean_series.csv      t,<strategy>...
//! <dir>/summary.json
//! <dir>/runs/run_<index>_seed_<seed>_<strategy>.csv
//! <dir>/runs/decisions_<index>_seed_<seed>_adaptive.csv
//! <dir>/plans/plan_<index>_seed_<seed>.txt
//! <dir>/scenarios/scenario_<index>_seed_<seed>.toml
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::batch::{BatchSummary, MeanCi, PairedDifference, RunFailure, StrategyAggregate};
use crate::error::{Error, Result};
use crate::simulator::{RunSummary, Strategy};

pub const AGGREGATE_HEADER: &str = "strategy,n,mean_final_pct,ci_lo,ci_hi,mean_rate_per_s";
pub const DIFFERENCES_HEADER: &str = "reference,other,n,mean_diff_pct,ci_lo,ci_hi";
pub const RUNS_HEADER: &str = "index,seed,strategy,final_pct,pct_per_second,duration_s";

pub fn run_file_name(index: usize, seed: u64, strategy: Strategy) -> String {
    format!("run_{index:04}_seed_{seed}_{strategy}.csv")
}

pub fn decisions_file_name(index: usize, seed: u64, strategy: Strategy) -> String {
    format!("decisions_{index:04}_seed_{seed}_{strategy}.csv")
}

pub fn plan_file_name(index: usize, seed: u64) -> String {
    format!("plan_{index:04}_seed_{seed}.txt")
}

pub fn scenario_file_name(index: usize, seed: u64) -> String {
    format!("scenario_{index:04}_seed_{seed}.toml")
}

#[derive(Serialize)]
struct RunEntry {
    index: usize,
    seed: u64,
    strategy: Strategy,
    series_file: String,
    summary: RunSummary,
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    strategies: &'a [Strategy],
    scenarios: usize,
    aggregates: &'a [StrategyAggregate],
    differences: &'a [PairedDifference],
    failures: &'a [RunFailure],
    runs: Vec<RunEntry>,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn ci_cells(m: &MeanCi) -> String {
    format!("{},{},{},{}", m.n, m.mean, m.ci_lo, m.ci_hi)
}

pub fn aggregate_csv(summary: &BatchSummary) -> String {
    let mut out = format!("{AGGREGATE_HEADER}\n");
    for a in &summary.aggregates {
        if a.final_pct.n == 0 {
            continue;
        }
        let _ = writeln!(out, "{},{},{}", a.strategy, ci_cells(&a.final_pct), a.rate_per_s.mean);
    }
    out
}

pub fn differences_csv(summary: &BatchSummary) -> String {
    let mut out = format!("{DIFFERENCES_HEADER}\n");
    for d in &summary.differences {
        if d.final_pct.n == 0 {
            continue;
        }
        let _ = writeln!(out, "{},{},{}", d.reference, d.other, ci_cells(&d.final_pct));
    }
    out
}

pub fn runs_csv(summary: &BatchSummary) -> String {
    let mut out = format!("{RUNS_HEADER}\n");
    for o in &summary.outcomes {
        for r in &o.runs {
            let s = &r.summary;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                o.index, o.seed, r.strategy, s.final_pct, s.pct_per_second, s.duration
            );
        }
    }
    out
}

pub fn mean_series_csv(summary: &BatchSummary) -> String {
    let ms = &summary.mean_series;
    let mut out = String::from("t");
    for (s, _) in &ms.pct {
        let _ = write!(out, ",{s}");
    }
    out.push('\n');
    for (k, t) in ms.t.iter().enumerate() {
        let _ = write!(out, "{t}");
        for (_, col) in &ms.pct {
            let _ = write!(out, ",{}", col[k]);
        }
        out.push('\n');
    }
    out
}

/// Writes the full output tree under `dir` and returns the files written.
pub fn emit_results(summary: &BatchSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    let runs_dir = dir.join("runs");
    let plans_dir = dir.join("plans");
    let scen_dir = dir.join("scenarios");
    for d in [dir, &runs_dir, &plans_dir, &scen_dir] {
        mkdir(d)?;
    }
    let mut written = Vec::new();
    let mut put = |path: PathBuf, contents: &str| -> Result<()> {
        write(&path, contents)?;
        written.push(path);
        Ok(())
    };

    let mut entries = Vec::new();
    for o in &summary.outcomes {
        put(plans_dir.join(plan_file_name(o.index, o.seed)), &o.plan.to_text())?;
        put(scen_dir.join(scenario_file_name(o.index, o.seed)), &o.config.to_toml())?;
        for r in &o.runs {
            let name = run_file_name(o.index, o.seed, r.strategy);
            put(runs_dir.join(&name), &r.series_csv())?;
            if r.strategy == Strategy::Adaptive {
                put(runs_dir.join(decisions_file_name(o.index, o.seed, r.strategy)), &r.decisions_csv())?;
            }
            entries.push(RunEntry {
                index: o.index,
                seed: o.seed,
                strategy: r.strategy,
                series_file: format!("runs/{name}"),
                summary: r.summary,
            });
        }
    }

    put(dir.join("aggregate.csv"), &aggregate_csv(summary))?;
    put(dir.join("differences.csv"), &differences_csv(summary))?;
    put(dir.join("runs.csv"), &runs_csv(summary))?;
    put(dir.join("mean_series.csv"), &mean_series_csv(summary))?;
    let json = SummaryJson {
        strategies: &summary.strategies,
        scenarios: summary.outcomes.len(),
        aggregates: &summary.aggregates,
        differences: &summary.differences,
        failures: &summary.failures,
        runs: entries,
    };
    let text = serde_json::to_string_pretty(&json).expect("summary serializes");
    put(dir.join("summary.json"), &text)?;
    Ok(written)
}
