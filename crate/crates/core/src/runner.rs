//! Batch execution of independent runs and result persistence.
//!
//! An experiment directory holds:
//!
//! * `runs.csv`: one row per (run, generation) with the population means of
//!   that generation;
//! * `aggregate.csv`: one row per generation with the cross-run mean and
//!   sample standard deviation of every statistic;
//! * `manifest.toml`: schema version, generator version and the fully
//!   resolved configuration;
//! * `traces/run_NNNN.txt` when trace dumps are enabled: the game of each
//!   generation's fittest member, one line per match.
//!
//! A suite writes one experiment directory per defender plus
//! `comparison-<family>.csv`, with one row per (defender, generation).

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::evolution::{evolve_with, ScoredPopulation};
use crate::game::{write_trace, DefenderKind};
use crate::metrics::{
    aggregate_generation, aggregate_runs, investment_bias, AggregateStats, GenerationStats,
};

pub const SCHEMA_VERSION: u32 = 1;

pub const RUNS_FILE: &str = "runs.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";
pub const TRACE_DIR: &str = "traces";

pub const RUNS_HEADER: [&str; 9] = [
    "run",
    "generation",
    "mean_fitness",
    "best_fitness",
    "mean_transitions",
    "mean_payoff",
    "mean_izda",
    "mean_izdb",
    "investment_bias",
];

const AGGREGATE_STATS: [&str; 7] = [
    "mean_fitness",
    "best_fitness",
    "mean_transitions",
    "mean_payoff",
    "mean_izda",
    "mean_izdb",
    "investment_bias",
];

/// Columns of `aggregate.csv`; the comparison file prepends `defender`.
pub fn aggregate_header() -> Vec<String> {
    let mut h = vec!["generation".to_string(), "runs".to_string()];
    for s in AGGREGATE_STATS {
        h.push(s.to_string());
        h.push(format!("{s}_sd"));
    }
    h
}

/// Defender family run together as a suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    OneToOne,
    TwoToOne,
}

impl Family {
    pub fn defenders(self) -> &'static [DefenderKind] {
        match self {
            Family::OneToOne => &DefenderKind::ONE_TO_ONE,
            Family::TwoToOne => &DefenderKind::TWO_TO_ONE,
        }
    }

    pub fn comparison_file(self) -> String {
        format!("comparison-{self}.csv")
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::OneToOne => "1to1",
            Family::TwoToOne => "2to1",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1to1" | "1-to-1" => Ok(Family::OneToOne),
            "2to1" | "2-to-1" => Ok(Family::TwoToOne),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// Results of one run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub run: u32,
    pub stats: Vec<GenerationStats>,
    pub games: u64,
    /// Games whose investments did not sum to the match count, or whose
    /// own investment bias fell outside [-1, 1].
    pub conservation_violations: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub runs: Vec<RunResult>,
    pub aggregate: Vec<AggregateStats>,
}

impl ExperimentOutcome {
    pub fn per_run_stats(&self) -> Vec<Vec<GenerationStats>> {
        self.runs.iter().map(|r| r.stats.clone()).collect()
    }

    pub fn games(&self) -> u64 {
        self.runs.iter().map(|r| r.games).sum()
    }

    pub fn conservation_violations(&self) -> u64 {
        self.runs.iter().map(|r| r.conservation_violations).sum()
    }

    pub fn final_generation(&self) -> Option<&AggregateStats> {
        self.aggregate.last()
    }
}

fn check_conservation(config: &ExperimentConfig, scored: &ScoredPopulation) -> u64 {
    scored
        .members
        .iter()
        .filter(|m| {
            let t = &m.trace;
            let conserved = t.is_conserved() && t.matches() == config.matches;
            let bias_ok = investment_bias(f64::from(t.izda()), f64::from(t.izdb()))
                .map(|g| (-1.0..=1.0).contains(&g))
                .unwrap_or(false);
            !(conserved && bias_ok)
        })
        .count() as u64
}

fn dump_best(out: &mut impl Write, scored: &ScoredPopulation) -> std::io::Result<()> {
    let Some((index, best)) = scored
        .members
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.fitness.total.total_cmp(&b.1.fitness.total))
    else {
        return Ok(());
    };
    writeln!(
        out,
        "# generation {} member {} fitness {} costs {} {} chromosome {}",
        scored.generation,
        index,
        best.fitness.total,
        best.costs.zd_a,
        best.costs.zd_b,
        best.chromosome
    )?;
    write_trace(out, &best.chromosome.decode(), &best.defender, &best.trace)
}

/// Execute one run, optionally dumping its traces into `trace_dir`.
pub fn simulate_run(
    config: &ExperimentConfig,
    run: u32,
    trace_dir: Option<&Path>,
) -> Result<RunResult> {
    let mut trace_out = match trace_dir {
        Some(dir) => {
            let path = dir.join(format!("run_{run:04}.txt"));
            let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
            Some((path, BufWriter::new(file)))
        }
        None => None,
    };

    let mut result = RunResult {
        run,
        stats: Vec::with_capacity(config.generations as usize),
        games: 0,
        conservation_violations: 0,
    };
    evolve_with(config, run, |scored| {
        result.games += scored.len() as u64;
        result.conservation_violations += check_conservation(config, scored);
        result.stats.push(aggregate_generation(scored)?);
        if let Some((path, out)) = trace_out.as_mut() {
            dump_best(out, scored).map_err(|e| Error::io(path.as_path(), e))?;
        }
        Ok(())
    })?;
    if let Some((path, mut out)) = trace_out {
        out.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(result)
}

/// Execute every run of `config` in memory. Runs execute in parallel; the
/// output does not depend on scheduling.
pub fn simulate(config: &ExperimentConfig, trace_dir: Option<&Path>) -> Result<ExperimentOutcome> {
    config.validate()?;
    let runs: Vec<RunResult> = (0..config.runs)
        .into_par_iter()
        .map(|r| simulate_run(config, r, trace_dir))
        .collect::<Result<_>>()?;
    let per_run: Vec<Vec<GenerationStats>> = runs.iter().map(|r| r.stats.clone()).collect();
    let aggregate = aggregate_runs(&per_run)?;
    Ok(ExperimentOutcome {
        config: config.clone(),
        runs,
        aggregate,
    })
}

fn num(x: f64) -> String {
    x.to_string()
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_rows<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn run_rows(runs: &[RunResult]) -> impl Iterator<Item = Vec<String>> + '_ {
    runs.iter().flat_map(|r| {
        r.stats.iter().map(move |s| {
            vec![
                r.run.to_string(),
                s.generation.to_string(),
                num(s.mean_fitness),
                num(s.best_fitness),
                num(s.mean_transitions),
                num(s.mean_payoff),
                num(s.mean_izda),
                num(s.mean_izdb),
                num(s.investment_bias),
            ]
        })
    })
}

fn aggregate_row(a: &AggregateStats) -> Vec<String> {
    let mut row = vec![a.generation.to_string(), a.runs.to_string()];
    for s in [
        a.mean_fitness,
        a.best_fitness,
        a.mean_transitions,
        a.mean_payoff,
        a.mean_izda,
        a.mean_izdb,
        a.investment_bias,
    ] {
        row.push(num(s.mean));
        row.push(num(s.sd));
    }
    row
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    generator: String,
    stream_scheme: &'static str,
    runs_csv_columns: Vec<&'static str>,
    aggregate_csv_columns: Vec<String>,
    config: &'a ExperimentConfig,
}

pub fn write_manifest(path: &Path, config: &ExperimentConfig) -> Result<()> {
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        generator: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        stream_scheme: "mtdsim-stream-v1: SHA-256 of the stream label seeds ChaCha8",
        runs_csv_columns: RUNS_HEADER.to_vec(),
        aggregate_csv_columns: aggregate_header(),
        config,
    };
    let text = toml::to_string(&manifest).expect("manifest always serializes");
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Run `config` and write its result set into `config.out_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let dir = config.out_dir.as_path();
    prepare_dir(dir)?;
    let trace_dir = config.dump_traces.then(|| dir.join(TRACE_DIR));
    if let Some(t) = &trace_dir {
        prepare_dir(t)?;
    }

    let outcome = simulate(config, trace_dir.as_deref())?;

    let runs_header: Vec<String> = RUNS_HEADER.iter().map(|s| s.to_string()).collect();
    write_rows(&dir.join(RUNS_FILE), &runs_header, run_rows(&outcome.runs))?;
    write_rows(
        &dir.join(AGGREGATE_FILE),
        &aggregate_header(),
        outcome.aggregate.iter().map(aggregate_row),
    )?;
    write_manifest(&dir.join(MANIFEST_FILE), config)?;
    Ok(outcome)
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub family: Family,
    pub experiments: Vec<ExperimentOutcome>,
    pub comparison_path: PathBuf,
}

impl SuiteOutcome {
    pub fn experiment(&self, kind: DefenderKind) -> Option<&ExperimentOutcome> {
        self.experiments.iter().find(|e| e.config.defender == kind)
    }
}

/// Run every defender of `family` with the settings of `base`, each into
/// `base.out_dir/<defender name>`, and write the comparison file.
pub fn run_suite(family: Family, base: &ExperimentConfig) -> Result<SuiteOutcome> {
    base.validate()?;
    prepare_dir(&base.out_dir)?;
    let experiments = family
        .defenders()
        .iter()
        .map(|&kind| {
            let config = ExperimentConfig {
                defender: kind,
                out_dir: base.out_dir.join(kind.name()),
                ..base.clone()
            };
            run_experiment(&config)
        })
        .collect::<Result<Vec<_>>>()?;

    let comparison_path = base.out_dir.join(family.comparison_file());
    let mut header = vec!["defender".to_string()];
    header.extend(aggregate_header());
    let rows = experiments.iter().flat_map(|e| {
        e.aggregate.iter().map(move |a| {
            let mut row = vec![e.config.defender.name().to_string()];
            row.extend(aggregate_row(a));
            row
        })
    });
    write_rows(&comparison_path, &header, rows)?;

    Ok(SuiteOutcome {
        family,
        experiments,
        comparison_path,
    })
}
