//! Attacker fitness: game payoff plus exploit-creation reward minus
//! strategic-complexity cost.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::GameTrace;

/// How the transition penalty multiplier is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaMode {
    /// Use `FitnessParams::gamma_penalty` (1 by default).
    #[default]
    ConstantOne,
    /// Use the largest per-match payoff the attacker realized: 1 if it
    /// compromised the defender at least once, otherwise 0.
    MaxRealizedPhi,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessParams {
    /// Reward per created exploit.
    pub delta: f64,
    /// Unit strategic complexity.
    pub beta: f64,
    pub gamma_penalty: f64,
    pub gamma_mode: GammaMode,
}

impl Default for FitnessParams {
    fn default() -> Self {
        FitnessParams {
            delta: 1.0,
            beta: 0.1,
            gamma_penalty: 1.0,
            gamma_mode: GammaMode::ConstantOne,
        }
    }
}

impl FitnessParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::config(
                "delta",
                format!("must be >= 0, got {}", self.delta),
            ));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::config(
                "beta",
                format!("must lie in [0, 1], got {}", self.beta),
            ));
        }
        if !(self.gamma_penalty >= 0.0 && self.gamma_penalty.is_finite()) {
            return Err(Error::config(
                "gamma_penalty",
                format!("must be >= 0, got {}", self.gamma_penalty),
            ));
        }
        Ok(())
    }

    /// Transition penalty applied to `trace`.
    pub fn gamma(&self, trace: &GameTrace) -> f64 {
        match self.gamma_mode {
            GammaMode::ConstantOne => self.gamma_penalty,
            GammaMode::MaxRealizedPhi => {
                if trace.compromised.iter().any(|&c| c) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// The three fitness terms and their total.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessBreakdown {
    /// Compromised matches.
    pub payoff: u32,
    pub creation: f64,
    pub complexity: f64,
    /// `payoff + creation - complexity`
    pub total: f64,
    /// Matches played in the game.
    pub matches: u32,
}

pub fn game_payoff(trace: &GameTrace) -> u32 {
    trace.payoff()
}

pub fn creation_reward(trace: &GameTrace, params: &FitnessParams) -> f64 {
    f64::from(trace.exploits_created) * params.delta
}

pub fn complexity_cost(trace: &GameTrace, params: &FitnessParams) -> f64 {
    params.beta * params.gamma(trace) * f64::from(trace.transitions)
}

pub fn fitness(trace: &GameTrace, params: &FitnessParams) -> FitnessBreakdown {
    let payoff = game_payoff(trace);
    let creation = creation_reward(trace, params);
    let complexity = complexity_cost(trace, params);
    FitnessBreakdown {
        payoff,
        creation,
        complexity,
        total: f64::from(payoff) + creation - complexity,
        matches: trace.matches() as u32,
    }
}
