//! Run configuration shared by the library and the CLI.
//!
//! Every trace produced by the pipeline embeds the exact `Config` it ran
//! under, so identical inputs plus an identical config reproduce identical
//! outputs byte for byte.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Branch choice policy when both refinements of a filter core are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// Prefer word bit 0, i.e. the unnegated generator.
    #[default]
    Bit0,
    /// Prefer word bit 1, i.e. the complement of the generator.
    ComplementFirst,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub tiebreak: TieBreak,
    /// Maximal dyadic precision accepted by the ultralimit machinery.
    pub k_max: u32,
    /// Step budget for term evaluation.
    pub fuel: u64,
    /// Maximal number of algebra generators.
    pub generator_cap: usize,
    /// Seed for sampled verification (axiom checks over large algebras).
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            tiebreak: TieBreak::Bit0,
            k_max: 24,
            fuel: 10_000_000,
            generator_cap: 16,
            seed: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::InvalidSequence("k_max must be positive".into()));
        }
        if self.fuel == 0 {
            return Err(Error::FuelExhausted { budget: 0 });
        }
        if self.generator_cap == 0 {
            return Err(Error::GeneratorCap {
                requested: 0,
                cap: 0,
            });
        }
        Ok(())
    }
}
