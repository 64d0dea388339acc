//! Experiment configuration.
//!
//! A configuration file is a flat list of `key = value` lines (TOML syntax);
//! any key may be omitted and falls back to the default below.
//!
//! | key              | default                 |
//! |------------------|-------------------------|
//! | `defender`       | `SingleFlip-FixedOrder` |
//! | `matches`        | 365                     |
//! | `population_size`| 30                      |
//! | `generations`    | 100                     |
//! | `runs`           | 100                     |
//! | `master_seed`    | 0                       |
//! | `cost_mu`        | 100                     |
//! | `cost_sigma2`    | 30                      |
//! | `cost_sampling`  | `per_generation`        |
//! | `delta`          | 1                       |
//! | `beta`           | 0.1                     |
//! | `gamma_mode`     | `constant_one`          |
//! | `gamma_penalty`  | 1                       |
//! | `mutation_rate`  | 0.5 / 148               |
//! | `tournament_size`| 2                       |
//! | `out_dir`        | `results`               |
//! | `dump_traces`    | false                   |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codec::CHROMOSOME_BITS;
use crate::error::{Error, Result};
use crate::evolution::GaParams;
use crate::fitness::{FitnessParams, GammaMode};
use crate::game::{DefenderKind, DefenderPolicy, DEFAULT_MATCHES};
use crate::stochastics::CostModel;

/// Whether exploit costs are drawn once per generation (shared by the whole
/// population) or separately for every game.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CostSampling {
    #[default]
    PerGeneration,
    PerGame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub defender: DefenderKind,
    pub matches: usize,
    pub population_size: usize,
    pub generations: u32,
    pub runs: u32,
    #[serde(with = "seed_repr")]
    pub master_seed: u64,
    pub cost_mu: f64,
    pub cost_sigma2: f64,
    pub cost_sampling: CostSampling,
    pub delta: f64,
    pub beta: f64,
    pub gamma_mode: GammaMode,
    pub gamma_penalty: f64,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub out_dir: PathBuf,
    pub dump_traces: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let cost = CostModel::default();
        let fit = FitnessParams::default();
        let ga = GaParams::default();
        ExperimentConfig {
            defender: DefenderKind::SingleFlipFixedOrder,
            matches: DEFAULT_MATCHES,
            population_size: ga.population_size,
            generations: ga.generations,
            runs: 100,
            master_seed: 0,
            cost_mu: cost.mu,
            cost_sigma2: cost.sigma2,
            cost_sampling: CostSampling::PerGeneration,
            delta: fit.delta,
            beta: fit.beta,
            gamma_mode: fit.gamma_mode,
            gamma_penalty: fit.gamma_penalty,
            mutation_rate: ga.mutation_rate,
            tournament_size: ga.tournament_size,
            out_dir: PathBuf::from("results"),
            dump_traces: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .unwrap_or("<config>")
                .to_string();
            Error::config(field, e.message().trim().to_string())
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn cost_model(&self) -> CostModel {
        CostModel {
            mu: self.cost_mu,
            sigma2: self.cost_sigma2,
        }
    }

    pub fn fitness_params(&self) -> FitnessParams {
        FitnessParams {
            delta: self.delta,
            beta: self.beta,
            gamma_penalty: self.gamma_penalty,
            gamma_mode: self.gamma_mode,
        }
    }

    pub fn ga_params(&self) -> GaParams {
        GaParams {
            population_size: self.population_size,
            mutation_rate: self.mutation_rate,
            tournament_size: self.tournament_size,
            generations: self.generations,
        }
    }

    pub fn defender_policy(&self) -> DefenderPolicy {
        DefenderPolicy::new(self.defender, self.matches)
    }

    pub fn validate(&self) -> Result<()> {
        if self.matches == 0 {
            return Err(Error::config("matches", "must be at least 1"));
        }
        if self.matches > u32::MAX as usize {
            return Err(Error::config("matches", "too large"));
        }
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        self.cost_model().gamma_params().map_err(|e| {
            let field = if self.cost_mu > 0.0 {
                "cost_sigma2"
            } else {
                "cost_mu"
            };
            Error::config(field, e.to_string())
        })?;
        self.fitness_params().validate()?;
        self.ga_params().validate()?;
        Ok(())
    }
}

/// Seeds above `i64::MAX` do not fit a TOML integer; they round-trip as
/// decimal strings instead.
mod seed_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(seed: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*seed) {
            Ok(v) => s.serialize_i64(v),
            Err(_) => s.serialize_str(&seed.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(v) => u64::try_from(v).map_err(serde::de::Error::custom),
            Repr::Text(s) => s.trim().parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Default per-bit mutation rate: half a flip per chromosome on average.
pub const DEFAULT_MUTATION_RATE: f64 = 0.5 / CHROMOSOME_BITS as f64;
