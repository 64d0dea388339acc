//! Population and cross-run statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::ScoredPopulation;

/// Population means for one generation of one run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub mean_fitness: f64,
    pub best_fitness: f64,
    pub mean_transitions: f64,
    pub mean_payoff: f64,
    pub mean_izda: f64,
    pub mean_izdb: f64,
    pub investment_bias: f64,
}

/// Normalized difference between mean ZD-B and mean ZD-A investment:
/// -1 when only ZD-A is funded, +1 when only ZD-B is.
pub fn investment_bias(mean_izda: f64, mean_izdb: f64) -> Result<f64> {
    let total = mean_izda + mean_izdb;
    if total <= 0.0 {
        return Err(Error::BiasUndefined);
    }
    Ok((mean_izdb - mean_izda) / total)
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

pub fn aggregate_generation(scored: &ScoredPopulation) -> Result<GenerationStats> {
    if scored.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let m = &scored.members;
    let mean_izda = mean(m.iter().map(|x| f64::from(x.trace.izda())));
    let mean_izdb = mean(m.iter().map(|x| f64::from(x.trace.izdb())));
    Ok(GenerationStats {
        generation: scored.generation,
        mean_fitness: mean(m.iter().map(|x| x.fitness.total)),
        best_fitness: m
            .iter()
            .map(|x| x.fitness.total)
            .fold(f64::NEG_INFINITY, f64::max),
        mean_transitions: mean(m.iter().map(|x| f64::from(x.trace.transitions))),
        mean_payoff: mean(m.iter().map(|x| f64::from(x.fitness.payoff))),
        mean_izda,
        mean_izdb,
        investment_bias: investment_bias(mean_izda, mean_izdb)?,
    })
}

/// Mean and sample standard deviation of one statistic across runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Zero for a single run.
    pub sd: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, sd }
    }

    /// Standard error of the mean over `n` runs.
    pub fn standard_error(&self, n: usize) -> f64 {
        self.sd / (n as f64).sqrt()
    }
}

/// Cross-run statistics for one generation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateStats {
    pub generation: u32,
    pub runs: usize,
    pub mean_fitness: Summary,
    pub best_fitness: Summary,
    pub mean_transitions: Summary,
    pub mean_payoff: Summary,
    pub mean_izda: Summary,
    pub mean_izdb: Summary,
    /// `mean` is the bias of the cross-run mean investments; `sd` is the
    /// spread of the per-run biases.
    pub investment_bias: Summary,
}

/// Element-wise cross-run statistics; `per_run[r][g]` is run `r`,
/// generation `g`.
pub fn aggregate_runs(per_run: &[Vec<GenerationStats>]) -> Result<Vec<AggregateStats>> {
    let Some(first) = per_run.first() else {
        return Ok(Vec::new());
    };
    let generations = first.len();
    if let Some(bad) = per_run.iter().find(|r| r.len() != generations) {
        return Err(Error::RaggedRuns {
            expected: generations,
            actual: bad.len(),
        });
    }

    (0..generations)
        .map(|g| {
            let column = |f: fn(&GenerationStats) -> f64| -> Vec<f64> {
                per_run.iter().map(|r| f(&r[g])).collect()
            };
            let mean_izda = Summary::of(&column(|s| s.mean_izda));
            let mean_izdb = Summary::of(&column(|s| s.mean_izdb));
            let bias_spread = Summary::of(&column(|s| s.investment_bias));
            Ok(AggregateStats {
                generation: first[g].generation,
                runs: per_run.len(),
                mean_fitness: Summary::of(&column(|s| s.mean_fitness)),
                best_fitness: Summary::of(&column(|s| s.best_fitness)),
                mean_transitions: Summary::of(&column(|s| s.mean_transitions)),
                mean_payoff: Summary::of(&column(|s| s.mean_payoff)),
                mean_izda,
                mean_izdb,
                investment_bias: Summary {
                    mean: investment_bias(mean_izda.mean, mean_izdb.mean)?,
                    sd: bias_spread.sd,
                },
            })
        })
        .collect()
}
