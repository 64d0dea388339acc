//! Generational genetic algorithm over attacker chromosomes.
//!
//! Each generation every member plays one game against the defender and is
//! scored. The next population holds `0.6 N` children, bred in pairs from
//! tournament-selected parents by single-point crossover, plus `0.4 N`
//! tournament-selected copies of old members. All `N` new chromosomes are
//! then mutated, copies included.

use std::sync::Arc;

use rand::Rng;

use crate::codec::{Chromosome, CHROMOSOME_BITS};
use crate::config::{CostSampling, ExperimentConfig, DEFAULT_MUTATION_RATE};
use crate::error::{Error, Result};
use crate::fitness::{fitness, FitnessBreakdown};
use crate::game::{play_game, ExploitCosts, GameTrace, Realization};
use crate::platform::Platform;
use crate::stochastics::{CostSampler, RandomStream, StreamLabel, StreamRole};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaParams {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub tournament_size: usize,
    pub generations: u32,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 30,
            mutation_rate: DEFAULT_MUTATION_RATE,
            tournament_size: 2,
            generations: 100,
        }
    }
}

impl GaParams {
    /// Children produced by crossover (`0.6 N`).
    pub fn crossover_count(&self) -> usize {
        self.population_size * 3 / 5
    }

    /// Members copied from the old population (`0.4 N`).
    pub fn copy_count(&self) -> usize {
        self.population_size * 2 / 5
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.population_size;
        if n == 0 || !n.is_multiple_of(10) {
            return Err(Error::config(
                "population_size",
                format!("0.6 N must be an even integer and 0.4 N an integer, got N = {n}"),
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::config(
                "mutation_rate",
                format!("must lie in [0, 1], got {}", self.mutation_rate),
            ));
        }
        if self.tournament_size == 0 {
            return Err(Error::config("tournament_size", "must be at least 1"));
        }
        if self.generations == 0 {
            return Err(Error::config("generations", "must be at least 1"));
        }
        Ok(())
    }
}

/// One evaluated population member.
#[derive(Clone, Debug)]
pub struct ScoredMember {
    pub chromosome: Chromosome,
    pub costs: ExploitCosts,
    /// Platform sequence this member played against.
    pub defender: Arc<[Platform]>,
    pub trace: GameTrace,
    pub fitness: FitnessBreakdown,
}

#[derive(Clone, Debug)]
pub struct ScoredPopulation {
    /// 1-based generation index.
    pub generation: u32,
    pub members: Vec<ScoredMember>,
}

impl ScoredPopulation {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn fitnesses(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.fitness.total).collect()
    }

    pub fn best(&self) -> Option<&ScoredMember> {
        self.members
            .iter()
            .max_by(|a, b| a.fitness.total.total_cmp(&b.fitness.total))
    }

    pub fn tournament_select<R: Rng + ?Sized>(
        &self,
        size: usize,
        rng: &mut R,
    ) -> Result<&ScoredMember> {
        let i = tournament_index(&self.fitnesses(), size, rng)?;
        Ok(&self.members[i])
    }
}

/// Draw `size` contestants uniformly with replacement and return the index
/// of the fittest; ties go to a uniformly chosen tied contestant.
pub fn tournament_index<R: Rng + ?Sized>(
    fitness: &[f64],
    size: usize,
    rng: &mut R,
) -> Result<usize> {
    if fitness.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let mut best = f64::NEG_INFINITY;
    let mut tied: Vec<usize> = Vec::with_capacity(size);
    for _ in 0..size.max(1) {
        let i = rng.random_range(0..fitness.len());
        let f = fitness[i];
        if f > best {
            best = f;
            tied.clear();
            tied.push(i);
        } else if f == best {
            tied.push(i);
        }
    }
    Ok(match tied.len() {
        1 => tied[0],
        n => tied[rng.random_range(0..n)],
    })
}

/// Splice after the first `cut` bits (`1 <= cut <= 148`). A cut at 148
/// reproduces the parents.
pub fn crossover_at(p1: &Chromosome, p2: &Chromosome, cut: usize) -> (Chromosome, Chromosome) {
    assert!(
        (1..=CHROMOSOME_BITS).contains(&cut),
        "crossover point {cut}"
    );
    let (mut c1, mut c2) = (*p1, *p2);
    for i in cut..CHROMOSOME_BITS {
        if p1.bit(i) != p2.bit(i) {
            c1.flip(i);
            c2.flip(i);
        }
    }
    (c1, c2)
}

/// Single-point crossover at a uniformly drawn point in `1..=148`.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    rng: &mut R,
) -> (Chromosome, Chromosome) {
    let cut = rng.random_range(1..=CHROMOSOME_BITS);
    crossover_at(p1, p2, cut)
}

/// Flip each bit independently with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    let mut out = *c;
    for i in 0..CHROMOSOME_BITS {
        if rng.random_bool(rate) {
            out.flip(i);
        }
    }
    out
}

pub fn next_generation<R: Rng + ?Sized>(
    pop: &ScoredPopulation,
    params: &GaParams,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    params.validate()?;
    if pop.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let fit = pop.fitnesses();
    let k = params.tournament_size;
    let mut next = Vec::with_capacity(params.population_size);

    for _ in 0..params.crossover_count() / 2 {
        let a = &pop.members[tournament_index(&fit, k, rng)?].chromosome;
        let b = &pop.members[tournament_index(&fit, k, rng)?].chromosome;
        let (c1, c2) = crossover(a, b, rng);
        next.push(c1);
        next.push(c2);
    }
    for _ in 0..params.copy_count() {
        next.push(pop.members[tournament_index(&fit, k, rng)?].chromosome);
    }
    for c in next.iter_mut() {
        *c = mutate(c, params.mutation_rate, rng);
    }
    Ok(next)
}

/// Derives every random stream of one run.
#[derive(Clone, Copy, Debug)]
pub struct RunStreams<'a> {
    pub master_seed: u64,
    pub scope: &'a str,
    pub run: u32,
}

impl<'a> RunStreams<'a> {
    pub fn new(config: &'a ExperimentConfig, run: u32) -> Self {
        RunStreams {
            master_seed: config.master_seed,
            scope: config.defender.name(),
            run,
        }
    }

    pub fn stream(&self, generation: u32, role: StreamRole, member: Option<u32>) -> RandomStream {
        let label = StreamLabel {
            scope: self.scope,
            run: self.run,
            generation,
            role,
            member,
        };
        RandomStream::derive(self.master_seed, &label)
    }
}

fn draw_costs(sampler: &CostSampler, rng: &mut RandomStream) -> ExploitCosts {
    let zd_a = sampler.sample(rng);
    let zd_b = sampler.sample(rng);
    ExploitCosts::new(zd_a, zd_b)
}

/// Random initial population for a run.
pub fn initial_population(config: &ExperimentConfig, run: u32) -> Vec<Chromosome> {
    let mut rng = RunStreams::new(config, run).stream(1, StreamRole::Init, None);
    (0..config.population_size)
        .map(|_| Chromosome::random(&mut rng))
        .collect()
}

/// Play and score every member of one generation.
///
/// Shared inputs (per-generation costs, fixed or per-generation defender
/// sequences) are drawn once before any game is played; per-game draws come
/// from streams owned by each member, so the result does not depend on
/// evaluation order.
pub fn evaluate_generation(
    config: &ExperimentConfig,
    run: u32,
    generation: u32,
    population: &[Chromosome],
) -> Result<ScoredPopulation> {
    let streams = RunStreams::new(config, run);
    let sampler = config.cost_model().sampler()?;
    let policy = config.defender_policy();
    let params = config.fitness_params();

    let shared_costs = match config.cost_sampling {
        CostSampling::PerGeneration => Some(draw_costs(
            &sampler,
            &mut streams.stream(generation, StreamRole::Costs, None),
        )),
        CostSampling::PerGame => None,
    };
    let shared_seq: Option<Arc<[Platform]>> = match policy.kind.realization() {
        Realization::Fixed | Realization::PerGeneration => Some(
            policy
                .sequence(&mut streams.stream(generation, StreamRole::Defender, None))
                .into(),
        ),
        Realization::PerGame => None,
    };

    let members = population
        .iter()
        .enumerate()
        .map(|(i, chromosome)| {
            let member = Some(i as u32);
            let costs = shared_costs.unwrap_or_else(|| {
                draw_costs(
                    &sampler,
                    &mut streams.stream(generation, StreamRole::Costs, member),
                )
            });
            let defender = shared_seq.clone().unwrap_or_else(|| {
                policy
                    .sequence(&mut streams.stream(generation, StreamRole::Defender, member))
                    .into()
            });
            let trace = play_game(&chromosome.decode(), &defender, &costs);
            let fitness = fitness(&trace, &params);
            ScoredMember {
                chromosome: *chromosome,
                costs,
                defender,
                trace,
                fitness,
            }
        })
        .collect();

    Ok(ScoredPopulation {
        generation,
        members,
    })
}

/// Run the full generation loop, handing each scored generation to `visit`
/// before it is bred.
pub fn evolve_with<F>(config: &ExperimentConfig, run: u32, mut visit: F) -> Result<()>
where
    F: FnMut(&ScoredPopulation) -> Result<()>,
{
    config.validate()?;
    let ga = config.ga_params();
    let streams = RunStreams::new(config, run);
    let mut population = initial_population(config, run);
    for generation in 1..=config.generations {
        let scored = evaluate_generation(config, run, generation, &population)?;
        visit(&scored)?;
        if generation < config.generations {
            let mut rng = streams.stream(generation, StreamRole::Ga, None);
            population = next_generation(&scored, &ga, &mut rng)?;
        }
    }
    Ok(())
}

/// Every scored generation of one run.
pub fn evolve(config: &ExperimentConfig, run: u32) -> Result<Vec<ScoredPopulation>> {
    let mut history = Vec::with_capacity(config.generations as usize);
    evolve_with(config, run, |scored| {
        history.push(scored.clone());
        Ok(())
    })?;
    Ok(history)
}
