//! Command-line front end: run configured experiments, compare summary
//! regrets against a baseline, and render trace plots.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use restartlab::config::{load_experiment, CliOverrides, LearnerCombo};
use restartlab::mdp::RegretMode;
use restartlab::plot::write_reward_plot;
use restartlab::run::{
    compare_regret, load_traces, run_experiment, summary_from_csv, write_outputs, SummaryRow,
};

#[derive(Parser)]
#[command(name = "restartlab", about = "Benchmark lab for learning under drifting MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegretArg {
    Exact,
    Empirical,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured learner over the trial seeds and write CSVs
    Run {
        /// Experiment config file
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides run.OUT)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Number of trials (overrides run.TRIALS, rebuilds trial seeds)
        #[arg(long)]
        trials: Option<usize>,
        /// Base seed for trial seeds (overrides run.SEED)
        #[arg(long)]
        seed: Option<u64>,
        /// Regret accounting mode (overrides run.REGRET)
        #[arg(long, value_enum)]
        regret: Option<RegretArg>,
    },
    /// Print regret ratios from a summary.csv against a baseline learner
    Compare {
        /// Baseline learner id (e.g. restartq)
        #[arg(long)]
        baseline: String,
        /// Directory holding summary.csv
        #[arg(long, default_value = "out")]
        dir: PathBuf,
    },
    /// Render cumulative-reward curves from trace CSVs in a directory
    Plot {
        /// Directory holding trace_*.csv files
        #[arg(long)]
        traces: PathBuf,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            trials,
            seed,
            regret,
        } => cmd_run(&config, out, trials, seed, regret),
        Command::Compare { baseline, dir } => cmd_compare(&baseline, &dir),
        Command::Plot { traces } => cmd_plot(&traces),
    }
}

fn cmd_run(
    config_path: &Path,
    out: Option<PathBuf>,
    trials: Option<usize>,
    seed: Option<u64>,
    regret: Option<RegretArg>,
) -> Result<()> {
    let mut config = load_experiment(config_path)
        .with_context(|| format!("config {}", config_path.display()))?;
    config.apply_overrides(&CliOverrides {
        out_dir: out,
        trials,
        seed,
        regret_mode: regret.map(|r| match r {
            RegretArg::Exact => RegretMode::Exact,
            RegretArg::Empirical => RegretMode::Empirical,
        }),
    })?;
    if config.learners.contains(&LearnerCombo::SelectiveRestartQ) {
        eprintln!(
            "warning: selectiverestartq pairs the selective wrapper with the stage-gated base; \
             it runs, but the reference lineup pairs the wrapper with randomizedq"
        );
    }

    let (traces, summary) = run_experiment(&config)?;
    let written = write_outputs(&config.out_dir, &traces, &summary)?;
    print_summary(&summary);
    println!(
        "wrote {} files to {}",
        written.len(),
        config.out_dir.display()
    );
    Ok(())
}

fn print_summary(summary: &[SummaryRow]) {
    println!("learner,mean_reward,mean_regret,regret_ratio");
    for row in summary {
        let ratio = row
            .regret_ratio
            .map(|r| format!("{r:.4}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{},{:.3},{:.3},{}",
            row.learner_id, row.mean_reward, row.mean_regret, ratio
        );
    }
}

fn cmd_compare(baseline: &str, dir: &Path) -> Result<()> {
    let path = dir.join("summary.csv");
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let summary = summary_from_csv(&text)?;
    let ratios = compare_regret(&summary, baseline)?;
    for (id, ratio) in ratios {
        match ratio {
            Some(r) => println!(
                "{id}: ratio {r:.4} (regret reduction {:.1}%)",
                (1.0 - r) * 100.0
            ),
            None => println!("{id}: ratio undefined (baseline regret is zero)"),
        }
    }
    Ok(())
}

fn cmd_plot(dir: &Path) -> Result<()> {
    let traces = load_traces(dir)?;
    if traces.is_empty() {
        bail!("no trace_*.csv files in {}", dir.display());
    }
    let path = write_reward_plot(dir, &traces)?;
    println!("wrote {}", path.display());
    Ok(())
}
