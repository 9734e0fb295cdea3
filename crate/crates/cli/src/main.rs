use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sweepplan::harness::{self, emit_results, generate_scenarios, run_batch, scenario_file_name, ScenarioConfig};
use sweepplan::{Strategy, Trajectory};

#[derive(Parser)]
#[command(name = "sweepplan", version, about = "Adaptive gimbal sweep planning simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Global plan only; writes the trajectory file.
    Plan {
        #[command(flatten)]
        common: Common,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One scenario flown with each listed strategy over one shared plan.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "adaptive")]
        strategies: Vec<Strategy>,
        /// Replay a saved trajectory instead of planning.
        #[arg(long)]
        plan: Option<PathBuf>,
        /// Output directory for series CSVs; summary only when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized Monte-Carlo comparison of strategies.
    Batch {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<Strategy>>,
        /// Overrides `experiment.out_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the randomized per-run scenario configs a batch would use.
    Gen {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(p) => ScenarioConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => ScenarioConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.experiment.seed = s;
    }
    Ok(cfg)
}

fn with_runs(mut cfg: ScenarioConfig, runs: Option<usize>) -> Result<ScenarioConfig> {
    if let Some(n) = runs {
        if n == 0 {
            bail!("--runs must be at least 1");
        }
        cfg.experiment.runs = n;
    }
    Ok(cfg)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Plan { common, out } => {
            let cfg = load(&common)?;
            let prepared = harness::prepare(&cfg, None)?;
            let text = prepared.plan.to_text();
            match out {
                Some(p) => {
                    write_out(&p, &text)?;
                    eprintln!(
                        "plan: {} waypoints, cost {:.1} m -> {}",
                        prepared.plan.len(),
                        prepared.plan.cost(),
                        p.display()
                    );
                }
                None => print!("{text}"),
            }
        }
        Command::Run { common, strategies, plan, out } => {
            let cfg = load(&common)?;
            let plan = plan
                .map(|p| Trajectory::load(&p).with_context(|| format!("loading {}", p.display())))
                .transpose()?;
            let prepared = harness::prepare(&cfg, plan)?;
            println!("strategy,final_pct,pct_per_second,duration_s");
            for s in strategies {
                let r = harness::fly(&cfg, &prepared, s)?;
                if let Some(dir) = &out {
                    let name = harness::run_file_name(0, cfg.experiment.seed, s);
                    write_out(&dir.join(name), &r.series_csv())?;
                    if s == Strategy::Adaptive {
                        let name = harness::decisions_file_name(0, cfg.experiment.seed, s);
                        write_out(&dir.join(name), &r.decisions_csv())?;
                    }
                }
                let m = &r.summary;
                println!("{s},{},{},{}", m.final_pct, m.pct_per_second, m.duration);
            }
            if let Some(dir) = &out {
                let name = harness::plan_file_name(0, cfg.experiment.seed);
                write_out(&dir.join(name), &prepared.plan.to_text())?;
            }
        }
        Command::Batch { common, runs, strategies, out } => {
            let cfg = with_runs(load(&common)?, runs)?;
            let strategies = strategies.unwrap_or_else(|| cfg.experiment.strategies.clone());
            if strategies.is_empty() {
                bail!("--strategies must name at least one strategy");
            }
            let out = out.unwrap_or_else(|| cfg.experiment.out_dir.clone());
            let configs = generate_scenarios(&cfg, cfg.experiment.runs, cfg.experiment.seed)?;
            let summary = run_batch(&configs, &strategies);
            emit_results(&summary, &out)?;
            print!("{}", harness::aggregate_csv(&summary));
            print!("{}", harness::differences_csv(&summary));
            if !summary.failures.is_empty() {
                eprintln!("{} run(s) failed; see summary.json", summary.failures.len());
            }
            eprintln!("results -> {}", out.display());
        }
        Command::Gen { common, runs, out } => {
            let cfg = with_runs(load(&common)?, runs)?;
            let configs = generate_scenarios(&cfg, cfg.experiment.runs, cfg.experiment.seed)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for (i, c) in configs.iter().enumerate() {
                write_out(&out.join(scenario_file_name(i, c.experiment.seed)), &c.to_toml())?;
            }
            eprintln!("{} scenario(s) -> {}", configs.len(), out.display());
        }
    }
    Ok(())
}
