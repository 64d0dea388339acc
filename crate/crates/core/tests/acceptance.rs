//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Experiments use R = 20 runs of 100 generations at the default setup
//! unless a criterion says otherwise.

use std::process::ExitCode;
use std::sync::OnceLock;

use mtdsim::{
    aggregate_generation, evolve_with, fitness, investment_bias, next_generation, play_game,
    run_experiment, sample_cost, simulate, tournament_index, Chromosome, CostModel, DefenderKind,
    ExperimentConfig, ExperimentOutcome, Exploit, FitnessParams, GaParams, GameTrace, MooreMachine,
    RandomStream, ScoredMember, ScoredPopulation, CHROMOSOME_BITS,
};

const RUNS: u32 = 20;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn base_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        runs: RUNS,
        master_seed: seed,
        ..ExperimentConfig::default()
    }
}

fn outcome(kind: DefenderKind, seed: u64) -> ExperimentOutcome {
    let config = ExperimentConfig {
        defender: kind,
        ..base_config(seed)
    };
    simulate(&config, None).expect("simulation")
}

/// Every defender of both families at R = 20, seed 2024.
fn suite() -> &'static Vec<ExperimentOutcome> {
    static SUITE: OnceLock<Vec<ExperimentOutcome>> = OnceLock::new();
    SUITE.get_or_init(|| {
        DefenderKind::ALL
            .iter()
            .map(|&k| outcome(k, 2024))
            .collect()
    })
}

fn suite_member(kind: DefenderKind) -> &'static ExperimentOutcome {
    suite()
        .iter()
        .find(|o| o.config.defender == kind)
        .expect("suite covers every defender")
}

fn generation_100_bias(kind: DefenderKind) -> f64 {
    let last = suite_member(kind).final_generation().expect("generations");
    assert_eq!(last.generation, 100);
    last.investment_bias.mean
}

fn c1_codec_round_trip() -> Verdict {
    let mut rng = RandomStream::from_seed(1);
    let failures = (0..100_000)
        .filter(|_| {
            let c = Chromosome::random(&mut rng);
            c.decode().encode() != c
        })
        .count();
    verdict(
        failures == 0,
        format!("{failures} failures in 100000 chromosomes"),
    )
}

fn c2_gamma_moments() -> Verdict {
    let model = CostModel::new(100.0, 30.0).unwrap();
    let mut rng = RandomStream::from_seed(2);
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n)
        .map(|_| sample_cost(&model, &mut rng).unwrap())
        .collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let positive = draws.iter().all(|&x| x > 0.0);
    verdict(
        (99.5..=100.5).contains(&mean) && (28.5..=31.5).contains(&var) && positive,
        format!("mean {mean:.4} in [99.5, 100.5], variance {var:.4} in [28.5, 31.5]"),
    )
}

fn c3_fitness_arithmetic() -> Verdict {
    let trace = GameTrace {
        compromised: (0..365).map(|i| i < 50).collect(),
        states: vec![0; 365],
        investments: [365, 0],
        exploits_created: 2,
        transitions: 30,
    };
    let f = fitness(&trace, &FitnessParams::default());
    // S = 0.1 * 30 is not exactly representable in binary floating point
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    verdict(
        f.payoff == 50 && f.creation == 2.0 && close(f.complexity, 3.0) && close(f.total, 49.0),
        format!(
            "G = {}, C = {}, S = {}, F = {}",
            f.payoff, f.creation, f.complexity, f.total
        ),
    )
}

/// Fitness of the better hand-built single-state machine on one member's
/// game inputs.
fn oracle_fitness(member: &ScoredMember, params: &FitnessParams) -> (f64, GameTrace) {
    [Exploit::ZdA, Exploit::ZdB]
        .into_iter()
        .map(|e| {
            let t = play_game(
                &MooreMachine::single_state(e),
                &member.defender,
                &member.costs,
            );
            (fitness(&t, params).total, t)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .unwrap()
}

fn c4_oracle_dominance() -> Verdict {
    let config = base_config(404);
    let params = config.fitness_params();
    let mut dominated_runs = 0;
    let mut oracle_violations = 0;
    let mut worst_ratio = f64::INFINITY;
    for run in 0..RUNS {
        let mut ok = true;
        evolve_with(&config, run, |scored: &ScoredPopulation| {
            let first = &scored.members[0];
            let always_b = play_game(
                &MooreMachine::single_state(Exploit::ZdB),
                &first.defender,
                &first.costs,
            );
            let fb = fitness(&always_b, &params).total;
            if first.costs.zd_b <= 182.0 && !(always_b.payoff() == 183 && fb == 184.0) {
                oracle_violations += 1;
            }
            if scored.generation > config.generations - 10 {
                let (oracle, _) = oracle_fitness(first, &params);
                let best = aggregate_generation(scored)?.best_fitness;
                worst_ratio = worst_ratio.min(best / oracle);
                ok &= best >= 0.9 * oracle;
            }
            Ok(())
        })
        .expect("evolution");
        dominated_runs += u32::from(ok);
    }
    verdict(
        dominated_runs >= 16 && oracle_violations == 0,
        format!(
            "{dominated_runs}/{RUNS} runs keep best F >= 0.9 x oracle in each of the final 10 generations (need 16); \
             worst ratio {worst_ratio:.3}; oracle identity violations {oracle_violations}"
        ),
    )
}

fn c5_defender_ordering() -> Verdict {
    let batches = 10;
    let mut passed = 0;
    let mut gaps = Vec::new();
    for b in 0..batches {
        let seed = 5_000 + b;
        let fixed = outcome(DefenderKind::SingleFlipFixedOrder, seed);
        let random = outcome(DefenderKind::EachMatchFlipRandomOrder, seed);
        let a = fixed.final_generation().unwrap().mean_fitness;
        let r = random.final_generation().unwrap().mean_fitness;
        let n = RUNS as usize;
        let se = (a.standard_error(n).powi(2) + r.standard_error(n).powi(2)).sqrt();
        let gap = a.mean - r.mean;
        gaps.push(format!("{gap:.1}/{se:.2}"));
        if gap > se {
            passed += 1;
        }
    }
    verdict(
        passed * 10 >= batches * 8,
        format!(
            "{passed}/{batches} batches with gap > 1 standard error (need 80%); gap/se: {}",
            gaps.join(" ")
        ),
    )
}

fn c6_bias_one_to_one() -> Verdict {
    let alt = generation_100_bias(DefenderKind::EachMatchFlipFixedAlternating);
    let rnd = generation_100_bias(DefenderKind::EachMatchFlipRandomOrder);
    let fixed = generation_100_bias(DefenderKind::SingleFlipFixedOrder);
    verdict(
        alt.abs() <= 0.25 && rnd.abs() <= 0.25 && fixed < 0.0,
        format!(
            "EachMatchFlip-FixedAlternating {alt:+.4} (|.| <= 0.25), EachMatchFlip-RandomOrder {rnd:+.4} (|.| <= 0.25), \
             SingleFlip-FixedOrder {fixed:+.4} (< 0)"
        ),
    )
}

fn c7_bias_two_to_one() -> Verdict {
    let alt = generation_100_bias(DefenderKind::EachMatchFlipFixedAlternating2to1);
    let uni = generation_100_bias(DefenderKind::EachMatchFlipUniformRandom2to1);
    verdict(
        alt <= -0.6 && uni <= -0.6,
        format!("EachMatchFlip-FixedAlternating-2to1 {alt:+.4}, EachMatchFlip-UniformRandom-2to1 {uni:+.4} (both <= -0.6)"),
    )
}

fn scored(members: Vec<(Chromosome, f64)>) -> ScoredPopulation {
    let config = ExperimentConfig::default();
    let chromosomes: Vec<Chromosome> = members.iter().map(|m| m.0).collect();
    let mut pop = mtdsim::evaluate_generation(&config, 0, 1, &chromosomes).unwrap();
    for (m, (_, f)) in pop.members.iter_mut().zip(members) {
        m.fitness.total = f;
    }
    pop
}

fn c8_ga_structure() -> Verdict {
    let mut rng = RandomStream::from_seed(8);
    let params = GaParams::default();

    let mut shape_ok = true;
    for _ in 0..200 {
        let pop = scored(
            (0..30)
                .map(|i| (Chromosome::random(&mut rng), f64::from(i % 7) * 13.0 - 20.0))
                .collect(),
        );
        let next = next_generation(&pop, &params, &mut rng).unwrap();
        shape_ok &= next.len() == 30 && next.iter().all(|c| c.bits().len() == CHROMOSOME_BITS);
    }

    let c = Chromosome::random(&mut rng);
    let homogeneous = scored((0..30).map(|i| (c, f64::from(i))).collect());
    let frozen = GaParams {
        mutation_rate: 0.0,
        ..params
    };
    let fixed_point = next_generation(&homogeneous, &frozen, &mut rng)
        .unwrap()
        .iter()
        .all(|x| *x == c);

    let trials = 100_000;
    let wins = (0..trials)
        .filter(|_| tournament_index(&[10.0, 0.0], 2, &mut rng).unwrap() == 0)
        .count();
    let p = wins as f64 / trials as f64;

    verdict(
        shape_ok && fixed_point && (p - 0.75).abs() <= 0.02,
        format!("30 x 148 shape {shape_ok}, fixed point {fixed_point}, binary tournament win rate {p:.4} (0.75 +/- 0.02)"),
    )
}

fn c9_determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: u64, name: &str| -> (Vec<u8>, Vec<u8>) {
        let out = dir.path().join(name);
        let config = ExperimentConfig {
            runs: 4,
            master_seed: seed,
            defender: DefenderKind::EachMatchFlipRandomOrder,
            out_dir: out.clone(),
            ..ExperimentConfig::default()
        };
        run_experiment(&config).unwrap();
        (
            std::fs::read(out.join("runs.csv")).unwrap(),
            std::fs::read(out.join("aggregate.csv")).unwrap(),
        )
    };
    let a = run(9, "a");
    let b = run(9, "b");
    let c = run(10, "c");
    verdict(
        a == b && a.0 != c.0 && a.1 != c.1,
        format!(
            "same seed identical: {}; different seed differs: {}",
            a == b,
            a.0 != c.0 && a.1 != c.1
        ),
    )
}

fn c10_conservation() -> Verdict {
    let mut games = 0;
    let mut violations = 0;
    let mut row_violations = 0;
    for o in suite() {
        games += o.games();
        violations += o.conservation_violations();
        for run in &o.runs {
            for s in &run.stats {
                let sum_ok = (s.mean_izda + s.mean_izdb - 365.0).abs() < 1e-9;
                let bias_ok = (-1.0..=1.0).contains(&s.investment_bias)
                    && investment_bias(s.mean_izda, s.mean_izdb).is_ok();
                row_violations += u64::from(!(sum_ok && bias_ok));
            }
        }
    }
    verdict(
        violations == 0 && row_violations == 0 && games == 9 * 20 * 100 * 30,
        format!("{games} games, {violations} trace violations, {row_violations} generation-row violations"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1  codec round trip", c1_codec_round_trip),
        ("2  gamma sampler moments", c2_gamma_moments),
        ("3  fitness arithmetic", c3_fitness_arithmetic),
        (
            "4  oracle dominance (SingleFlip-FixedOrder)",
            c4_oracle_dominance,
        ),
        ("5  defender ordering", c5_defender_ordering),
        ("6  investment bias, 1-to-1", c6_bias_one_to_one),
        ("7  investment bias, 2-to-1", c7_bias_two_to_one),
        ("8  GA structure", c8_ga_structure),
        ("9  determinism", c9_determinism),
        ("10 conservation", c10_conservation),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        println!(
            "acceptance criterion {name}: {} ({})",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
