use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mtdsim::{run_experiment, run_suite, ExperimentConfig, ExperimentOutcome, Family};

/// Evolve attacker strategies against platform-migration defenders.
#[derive(Debug, Parser)]
#[command(name = "mtdsim", version)]
struct Cli {
    /// Flat `key = value` configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Defender policy, e.g. SingleFlip-FixedOrder.
    #[arg(long, conflicts_with = "suite")]
    defender: Option<String>,

    /// Master seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long)]
    runs: Option<u32>,

    #[arg(long)]
    generations: Option<u32>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write the fittest member's game of every generation under traces/.
    #[arg(long)]
    dump_traces: bool,

    /// Run a whole defender family: 1to1 or 2to1.
    #[arg(long)]
    suite: Option<String>,
}

fn resolve(cli: &Cli) -> mtdsim::Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = &cli.defender {
        config.defender = d.parse()?;
    }
    if let Some(s) = cli.seed {
        config.master_seed = s;
    }
    if let Some(r) = cli.runs {
        config.runs = r;
    }
    if let Some(g) = cli.generations {
        config.generations = g;
    }
    if let Some(o) = &cli.out {
        config.out_dir = o.clone();
    }
    if cli.dump_traces {
        config.dump_traces = true;
    }
    config.validate()?;
    Ok(config)
}

fn report(outcome: &ExperimentOutcome) {
    if let Some(last) = outcome.final_generation() {
        println!(
            "{:<36} gen {:>3}  fitness {:>8.2}  best {:>8.2}  transitions {:>6.2}  payoff {:>7.2}  bias {:>+6.3}",
            outcome.config.defender.name(),
            last.generation,
            last.mean_fitness.mean,
            last.best_fitness.mean,
            last.mean_transitions.mean,
            last.mean_payoff.mean,
            last.investment_bias.mean,
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(&cli).and_then(|config| match &cli.suite {
        Some(family) => {
            let family: Family = family.parse()?;
            let suite = run_suite(family, &config)?;
            suite.experiments.iter().for_each(report);
            println!("comparison written to {}", suite.comparison_path.display());
            Ok(())
        }
        None => {
            let outcome = run_experiment(&config)?;
            report(&outcome);
            println!("results written to {}", config.out_dir.display());
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
