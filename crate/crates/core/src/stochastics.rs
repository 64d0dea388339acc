//! Random streams and the exploit-cost distribution.
//!
//! Every stream used by an experiment is derived from the master seed and a
//! label naming what the stream is for. The label is rendered as
//!
//! ```text
//! mtdsim-stream-v1|<master seed>|<scope>|<run>|<generation>|<role>|<member or ->
//! ```
//!
//! and its SHA-256 digest seeds a ChaCha8 generator. Streams with different
//! labels share no state, so adding or removing draws on one stream never
//! shifts another, and results do not depend on the order in which runs or
//! attackers are evaluated.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Deterministic pseudo-random stream.
#[derive(Clone, Debug)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn from_seed(seed: u64) -> Self {
        RandomStream(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Stream for `label` under `master_seed`.
    pub fn derive(master_seed: u64, label: &StreamLabel<'_>) -> Self {
        let text = label.render(master_seed);
        let digest = Sha256::digest(text.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        RandomStream(ChaCha8Rng::from_seed(seed))
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// What a derived stream is used for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StreamRole {
    /// Initial random population.
    Init,
    /// Exploit-cost draws.
    Costs,
    /// Defender sequence realizations.
    Defender,
    /// Selection, crossover and mutation.
    Ga,
}

impl fmt::Display for StreamRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StreamRole::Init => "init",
            StreamRole::Costs => "costs",
            StreamRole::Defender => "defender",
            StreamRole::Ga => "ga",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamLabel<'a> {
    /// Experiment scope, normally the defender policy name.
    pub scope: &'a str,
    pub run: u32,
    pub generation: u32,
    pub role: StreamRole,
    /// Population member, for streams owned by a single game.
    pub member: Option<u32>,
}

impl<'a> StreamLabel<'a> {
    pub fn new(scope: &'a str, run: u32, generation: u32, role: StreamRole) -> Self {
        StreamLabel {
            scope,
            run,
            generation,
            role,
            member: None,
        }
    }

    pub fn member(mut self, member: u32) -> Self {
        self.member = Some(member);
        self
    }

    fn render(&self, master_seed: u64) -> String {
        let member = match self.member {
            Some(m) => m.to_string(),
            None => "-".to_string(),
        };
        format!(
            "mtdsim-stream-v1|{master_seed}|{}|{}|{}|{}|{member}",
            self.scope, self.run, self.generation, self.role
        )
    }
}

/// Gamma-distributed exploit-creation cost, parameterized by mean and
/// variance in resource units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub mu: f64,
    pub sigma2: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            mu: 100.0,
            sigma2: 30.0,
        }
    }
}

impl CostModel {
    pub fn new(mu: f64, sigma2: f64) -> Result<Self> {
        let model = CostModel { mu, sigma2 };
        model.gamma_params()?;
        Ok(model)
    }

    /// `(shape, rate)` with shape = mu^2 / sigma2 and rate = mu / sigma2.
    pub fn gamma_params(&self) -> Result<(f64, f64)> {
        let CostModel { mu, sigma2 } = *self;
        if !(mu > 0.0 && sigma2 > 0.0 && mu.is_finite() && sigma2.is_finite()) {
            return Err(Error::CostDomain { mu, sigma2 });
        }
        Ok((mu * mu / sigma2, mu / sigma2))
    }

    pub fn sampler(&self) -> Result<CostSampler> {
        let (shape, rate) = self.gamma_params()?;
        let gamma = Gamma::new(shape, 1.0 / rate).map_err(|_| Error::CostDomain {
            mu: self.mu,
            sigma2: self.sigma2,
        })?;
        Ok(CostSampler { gamma })
    }
}

/// Draw one exploit cost.
pub fn sample_cost<R: Rng + ?Sized>(model: &CostModel, rng: &mut R) -> Result<f64> {
    Ok(model.sampler()?.sample(rng))
}

/// Prepared Gamma sampler for repeated draws from one cost model.
#[derive(Clone, Copy, Debug)]
pub struct CostSampler {
    gamma: Gamma<f64>,
}

impl CostSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = self.gamma.sample(rng);
            // Underflow to zero is only reachable for tiny shapes.
            if x > 0.0 {
                return x;
            }
        }
    }
}
