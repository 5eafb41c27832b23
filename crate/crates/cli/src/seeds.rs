//! Seed handling. `DPISAT_SEED` replaces every scenario seed `s` with a value
//! derived from both, so one variable re-randomizes a whole batch reproducibly.

use dpisat_core::random::seeded;
use rand::RngCore;

pub const SEED_ENV: &str = "DPISAT_SEED";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SeedMap {
    override_seed: Option<u64>,
}

impl SeedMap {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with_override(seed: u64) -> Self {
        Self {
            override_seed: Some(seed),
        }
    }

    /// Reads `DPISAT_SEED`; unset or empty means no override.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var(SEED_ENV) {
            Ok(v) if !v.trim().is_empty() => v
                .trim()
                .parse::<u64>()
                .map(Self::with_override)
                .map_err(|e| format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer: {e}")),
            _ => Ok(Self::identity()),
        }
    }

    pub fn override_seed(&self) -> Option<u64> {
        self.override_seed
    }

    pub fn map(&self, seed: u64) -> u64 {
        match self.override_seed {
            None => seed,
            Some(o) => {
                let mut a = seeded(o);
                let mut b = seeded(seed ^ a.next_u64());
                b.next_u64()
            }
        }
    }
}
