//! Experiment runner: TOML-configured, seeded, reproducible CSV outputs.
//!
//! Identical config file and seed produce byte-identical outputs. When no
//! seed is given on the command line, one is derived from the config file's
//! bytes and printed to stderr for replay.

pub mod commands;
pub mod config;
pub mod generators;
pub mod locality;
pub mod output;

use std::fmt;

/// Errors split by exit code: configuration problems exit with 2, numerical
/// failures with 3.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Classifies a core error by phase: anything raised while interpreting
    /// inputs is a config error; runtime math failures are numerical.
    pub fn from_setup(e: rbas::Error) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn from_run(e: rbas::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// FNV-1a over the config bytes: the derived default seed.
pub fn config_hash_seed(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
