//! Mapping between 148-bit chromosomes and 16-state Moore machines.
//!
//! Layout, using 0-based bit positions:
//!
//! ```text
//! state k (k = 0..15) occupies bits 9k .. 9k+8
//!   9k + 0        action: 0 = ZD-A, 1 = ZD-B
//!   9k + 1 ..= 4  next state after observing OS-A (big-endian)
//!   9k + 5 ..= 8  next state after observing OS-B (big-endian)
//! bits 144 ..= 147  start state (big-endian)
//! ```
//!
//! Every one of the 2^148 bit strings is a legal genome; all 16 states are
//! decoded whether or not they are reachable from the start state.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::platform::{Exploit, Platform};

pub const STATE_COUNT: usize = 16;
pub const BITS_PER_STATE: usize = 9;
pub const STATE_FIELD_BITS: usize = 4;
pub const CHROMOSOME_BITS: usize = STATE_COUNT * BITS_PER_STATE + STATE_FIELD_BITS;

const START_OFFSET: usize = STATE_COUNT * BITS_PER_STATE;

/// Genome of one attacker strategy: exactly 148 bits.
///
/// The textual form is a 148-character string of `'0'` and `'1'`, first bit
/// first.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Chromosome {
    bits: [bool; CHROMOSOME_BITS],
}

impl Chromosome {
    pub fn zeros() -> Self {
        Chromosome {
            bits: [false; CHROMOSOME_BITS],
        }
    }

    pub fn ones() -> Self {
        Chromosome {
            bits: [true; CHROMOSOME_BITS],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let bits: [bool; CHROMOSOME_BITS] =
            bits.try_into().map_err(|_| Error::ChromosomeLength {
                expected: CHROMOSOME_BITS,
                actual: bits.len(),
            })?;
        Ok(Chromosome { bits })
    }

    /// Each bit independently 0 or 1 with probability one half.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut bits = [false; CHROMOSOME_BITS];
        for bit in bits.iter_mut() {
            *bit = rng.random::<bool>();
        }
        Chromosome { bits }
    }

    pub fn bits(&self) -> &[bool; CHROMOSOME_BITS] {
        &self.bits
    }

    /// Bit at 0-based `position`.
    pub fn bit(&self, position: usize) -> bool {
        self.bits[position]
    }

    pub fn flip(&mut self, position: usize) {
        self.bits[position] = !self.bits[position];
    }

    pub fn hamming(&self, other: &Chromosome) -> usize {
        self.bits
            .iter()
            .zip(other.bits.iter())
            .filter(|(a, b)| a != b)
            .count()
    }

    fn field(&self, offset: usize) -> u8 {
        self.bits[offset..offset + STATE_FIELD_BITS]
            .iter()
            .fold(0u8, |acc, &b| (acc << 1) | u8::from(b))
    }

    fn set_field(&mut self, offset: usize, value: u8) {
        debug_assert!((value as usize) < STATE_COUNT);
        for i in 0..STATE_FIELD_BITS {
            self.bits[offset + i] = (value >> (STATE_FIELD_BITS - 1 - i)) & 1 == 1;
        }
    }

    pub fn decode(&self) -> MooreMachine {
        let mut actions = [Exploit::ZdA; STATE_COUNT];
        let mut transitions = [[0u8; 2]; STATE_COUNT];
        for k in 0..STATE_COUNT {
            let base = k * BITS_PER_STATE;
            actions[k] = if self.bits[base] {
                Exploit::ZdB
            } else {
                Exploit::ZdA
            };
            transitions[k] = [self.field(base + 1), self.field(base + 5)];
        }
        MooreMachine {
            start: self.field(START_OFFSET),
            actions,
            transitions,
        }
    }
}

/// Decode a raw bit slice, rejecting anything that is not exactly 148 bits.
pub fn decode_bits(bits: &[bool]) -> Result<MooreMachine> {
    Chromosome::from_bits(bits).map(|c| c.decode())
}

impl Default for Chromosome {
    fn default() -> Self {
        Chromosome::zeros()
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chromosome({self})")
    }
}

impl FromStr for Chromosome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = Vec::with_capacity(CHROMOSOME_BITS);
        for (position, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                found => return Err(Error::ChromosomeChar { position, found }),
            }
        }
        Chromosome::from_bits(&bits)
    }
}

/// A decoded attacker strategy.
///
/// The machine's output (the exploit to invest in) depends only on the
/// current state; the next state depends on the current state and the
/// platform the defender activated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MooreMachine {
    start: u8,
    actions: [Exploit; STATE_COUNT],
    /// `transitions[state][platform.index()]`
    transitions: [[u8; 2]; STATE_COUNT],
}

impl MooreMachine {
    pub fn new(
        start: usize,
        actions: [Exploit; STATE_COUNT],
        transitions: [[usize; 2]; STATE_COUNT],
    ) -> Result<Self> {
        let check = |s: usize| {
            if s < STATE_COUNT {
                Ok(s as u8)
            } else {
                Err(Error::StateIndex(s))
            }
        };
        let mut packed = [[0u8; 2]; STATE_COUNT];
        for (dst, src) in packed.iter_mut().zip(transitions.iter()) {
            *dst = [check(src[0])?, check(src[1])?];
        }
        Ok(MooreMachine {
            start: check(start)?,
            actions,
            transitions: packed,
        })
    }

    /// Machine that sits in state 0 forever, investing in `exploit`.
    ///
    /// All other states keep the zero encoding (ZD-A, transitions to 0).
    pub fn single_state(exploit: Exploit) -> Self {
        let mut actions = [Exploit::ZdA; STATE_COUNT];
        actions[0] = exploit;
        MooreMachine {
            start: 0,
            actions,
            transitions: [[0; 2]; STATE_COUNT],
        }
    }

    pub fn start_state(&self) -> usize {
        self.start as usize
    }

    pub fn action(&self, state: usize) -> Exploit {
        self.actions[state]
    }

    pub fn next_state(&self, state: usize, observed: Platform) -> usize {
        self.transitions[state][observed.index()] as usize
    }

    pub fn with_start(mut self, start: usize) -> Result<Self> {
        if start >= STATE_COUNT {
            return Err(Error::StateIndex(start));
        }
        self.start = start as u8;
        Ok(self)
    }

    pub fn encode(&self) -> Chromosome {
        let mut c = Chromosome::zeros();
        for k in 0..STATE_COUNT {
            let base = k * BITS_PER_STATE;
            c.bits[base] = self.actions[k] == Exploit::ZdB;
            c.set_field(base + 1, self.transitions[k][0]);
            c.set_field(base + 5, self.transitions[k][1]);
        }
        c.set_field(START_OFFSET, self.start);
        c
    }
}
