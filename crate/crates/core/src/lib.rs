//! Evolving attacker investment strategies against temporal platform-migration
//! defenses.
//!
//! An attacker strategy is a 16-state Moore machine encoded in a 148-bit
//! chromosome. In every match of a game the attacker invests one resource
//! unit in a zero-day exploit for one of the defender's two platforms, then
//! observes which platform the defender activated and changes state. A
//! genetic algorithm breeds a population of such strategies against one of
//! nine fixed defender schedules.
//!
//! The `book/` directory of the repository walks through each piece; its code
//! listings are compiled and run as doctests of this crate.
//!
//! ```
//! use mtdsim::{play_game, DefenderKind, DefenderPolicy, Exploit, ExploitCosts, MooreMachine, RandomStream};
//!
//! let defender = DefenderPolicy::new(DefenderKind::SingleFlipFixedOrder, 365)
//!     .sequence(&mut RandomStream::from_seed(0));
//! let trace = play_game(
//!     &MooreMachine::single_state(Exploit::ZdB),
//!     &defender,
//!     &ExploitCosts::uniform(100.0),
//! );
//! assert_eq!(trace.payoff(), 183);
//! ```

pub mod codec;
pub mod config;
pub mod error;
pub mod evolution;
pub mod fitness;
pub mod game;
pub mod metrics;
pub mod platform;
pub mod runner;
pub mod stochastics;

pub use codec::{decode_bits, Chromosome, MooreMachine, CHROMOSOME_BITS, STATE_COUNT};
pub use config::{CostSampling, ExperimentConfig, DEFAULT_MUTATION_RATE};
pub use error::{Error, Result};
pub use evolution::{
    crossover, crossover_at, evaluate_generation, evolve, evolve_with, initial_population, mutate,
    next_generation, tournament_index, GaParams, ScoredMember, ScoredPopulation,
};
pub use fitness::{
    complexity_cost, creation_reward, fitness, game_payoff, FitnessBreakdown, FitnessParams,
    GammaMode,
};
pub use game::{
    defender_sequence, play_game, write_trace, DefenderKind, DefenderPolicy, ExploitCosts,
    ExploitEconomy, GameTrace, Realization, DEFAULT_MATCHES,
};
pub use metrics::{
    aggregate_generation, aggregate_runs, investment_bias, AggregateStats, GenerationStats, Summary,
};
pub use platform::{Exploit, Platform};
pub use runner::{run_experiment, run_suite, simulate, ExperimentOutcome, Family, SuiteOutcome};
pub use stochastics::{sample_cost, CostModel, RandomStream, StreamLabel, StreamRole};

/// Book chapters, compiled as doctests so the guide cannot drift from the
/// code.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/strategies.md")]
    pub struct Strategies;
    #[doc = include_str!("../../../book/src/games.md")]
    pub struct Games;
    #[doc = include_str!("../../../book/src/costs.md")]
    pub struct Costs;
    #[doc = include_str!("../../../book/src/fitness.md")]
    pub struct Fitness;
    #[doc = include_str!("../../../book/src/evolution.md")]
    pub struct Evolution;
    #[doc = include_str!("../../../book/src/metrics.md")]
    pub struct Metrics;
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub struct Experiments;
}
