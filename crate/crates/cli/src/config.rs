//! The experiment config file schema (TOML).
//!
//! Sections: `[system]` (file source or named generator), `[sampler]`,
//! `[solve]`, `[meany]`, `[gamma]`, `[locality]`, `[jl]`, `[output]`.
//! Each command reads the sections it needs; unknown keys are rejected.
//!
//! Index lists in config files (explicit partitions) are 1-based, matching
//! the usual file conventions; the library API is 0-based.

use std::path::Path;

use serde::Deserialize;

use rbas::linalg::derive_seed;
use rbas::samplers::{SamplerKind, SamplerSpec, SketchProjectParams};
use rbas::sketch::{jl_min_embedding_dim, SketchDistribution};
use rbas::system::{make_partition, LinearSystem, Partition, PartitionScheme, Side};
use rbas::Vector;

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub sampler: Option<SamplerConfig>,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub meany: MeanyConfig,
    #[serde(default)]
    pub gamma: GammaConfig,
    #[serde(default)]
    pub locality: LocalityConfig,
    #[serde(default)]
    pub jl: Option<JlConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Sub-seed roles so one experiment seed decorrelates all stages.
pub mod seed_role {
    pub const SYSTEM: u64 = 1;
    pub const SAMPLER: u64 = 2;
    pub const X0: u64 = 3;
    pub const MEANY: u64 = 4;
    pub const GAMMA: u64 = 5;
    pub const LOCALITY: u64 = 6;
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// `csv`, `matrix-market`, or a named generator: `identity`,
    /// `block_demo`, `near_parallel`, `anova`, `random`.
    pub source: String,
    pub matrix: Option<String>,
    pub rhs: Option<String>,
    pub size: Option<usize>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub rank: Option<usize>,
    pub consistent: Option<bool>,
    pub treatments: Option<usize>,
    pub replicates: Option<usize>,
    pub extra_gaussian_cols: Option<usize>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub name: String,
    pub seed: Option<u64>,
    /// `"equal:K"` or explicit 1-based blocks `"1,2;3,4"`.
    pub partition: Option<String>,
    pub p_exponent: Option<f64>,
    pub sample_size: Option<usize>,
    pub block_width: Option<usize>,
    pub max_draws: Option<u64>,
    pub sketch: Option<SketchConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SketchConfig {
    /// `gaussian` or `achlioptas`.
    pub distribution: String,
    pub epsilon: usize,
    /// Either given directly or derived from `(c, w, rho)` via the embedding
    /// bound.
    pub embedding_dim: Option<usize>,
    pub c: Option<f64>,
    pub w: Option<f64>,
    pub rho: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    /// `zero`, `random`, or `explicit`.
    #[serde(default = "default_x0")]
    pub x0: String,
    pub x0_seed: Option<u64>,
    pub x0_values: Option<Vec<f64>>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub error_tol: f64,
    pub max_seconds: Option<f64>,
    #[serde(default)]
    pub record_bases: bool,
    pub nu_horizon: Option<usize>,
}

fn default_x0() -> String {
    "zero".into()
}

fn default_max_iter() -> usize {
    10_000
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            x0: default_x0(),
            x0_seed: None,
            x0_values: None,
            max_iter: default_max_iter(),
            error_tol: 0.0,
            max_seconds: None,
            record_bases: false,
            nu_horizon: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanyConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: Option<u64>,
    /// Row blocks whose row spaces define the subspaces; same grammar as
    /// sampler partitions. Default: two equal blocks.
    pub blocks: Option<String>,
}

fn default_samples() -> usize {
    10_000
}

impl Default for MeanyConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: None,
            blocks: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaConfig {
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: Option<u64>,
    /// Partitions to evaluate; default: the three pairings of four rows.
    pub partitions: Option<Vec<String>>,
}

impl Default for GammaConfig {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: None,
            partitions: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalityConfig {
    #[serde(default = "default_loc_rows")]
    pub rows: usize,
    #[serde(default = "default_loc_cols")]
    pub cols: usize,
    #[serde(default = "default_chunk_rows")]
    pub chunk_rows: usize,
    pub seed: Option<u64>,
    #[serde(default = "default_loc_tol")]
    pub error_tol: f64,
}

fn default_loc_rows() -> usize {
    100_000
}

fn default_loc_cols() -> usize {
    50
}

fn default_chunk_rows() -> usize {
    10_000
}

fn default_loc_tol() -> f64 {
    1e-10
}

impl Default for LocalityConfig {
    fn default() -> Self {
        Self {
            rows: default_loc_rows(),
            cols: default_loc_cols(),
            chunk_rows: default_chunk_rows(),
            seed: None,
            error_tol: default_loc_tol(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JlConfig {
    pub c: f64,
    pub w: f64,
    pub rho: f64,
    pub epsilon: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub prefix: Option<String>,
}


/// Parses `"equal:K"` or 1-based `"1,2;3,4"` into a partition over the
/// system.
pub fn parse_partition(
    text: &str,
    sys: &LinearSystem,
    side: Side,
) -> Result<Partition, CliError> {
    let scheme = if let Some(k) = text.strip_prefix("equal:") {
        let k: usize = k
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("bad block count in '{text}'")))?;
        PartitionScheme::EqualBlocks(k)
    } else {
        let mut blocks = Vec::new();
        for piece in text.split(';') {
            let mut block = Vec::new();
            for field in piece.split(',') {
                let idx: usize = field
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad index '{field}' in '{text}'")))?;
                if idx == 0 {
                    return Err(CliError::Config(
                        "partition indices are 1-based; found 0".into(),
                    ));
                }
                block.push(idx - 1);
            }
            blocks.push(block);
        }
        PartitionScheme::Explicit(blocks)
    };
    make_partition(sys, side, scheme).map_err(CliError::from_setup)
}

/// Builds the sampler spec from config, filling seeds from the experiment
/// seed.
pub fn build_sampler_spec(
    cfg: &SamplerConfig,
    sys: &LinearSystem,
    experiment_seed: u64,
) -> Result<SamplerSpec, CliError> {
    let kind: SamplerKind = cfg.name.parse().map_err(CliError::from_setup)?;
    let seed = cfg
        .seed
        .unwrap_or_else(|| derive_seed(experiment_seed, seed_role::SAMPLER));
    let mut spec = SamplerSpec::new(kind, seed);
    if let Some(p) = &cfg.partition {
        spec = spec.with_partition(parse_partition(p, sys, kind.mode().side())?);
    }
    if let Some(p) = cfg.p_exponent {
        spec = spec.with_p_exponent(p);
    }
    if let Some(s) = cfg.sample_size {
        spec = spec.with_sample_size(s);
    }
    if let Some(w) = cfg.block_width {
        spec = spec.with_block_width(w);
    }
    if let Some(m) = cfg.max_draws {
        spec = spec.with_max_draws(m);
    }
    if let Some(sk) = &cfg.sketch {
        let distribution: SketchDistribution =
            sk.distribution.parse().map_err(CliError::from_setup)?;
        let embedding_dim = match sk.embedding_dim {
            Some(p) => p,
            None => {
                let (c, w, rho) = match (sk.c, sk.w, sk.rho) {
                    (Some(c), Some(w), Some(rho)) => (c, w, rho),
                    _ => {
                        return Err(CliError::Config(
                            "sketch needs embedding_dim or all of c, w, rho".into(),
                        ))
                    }
                };
                jl_min_embedding_dim(c, w, rho).map_err(CliError::from_setup)?
            }
        };
        spec = spec.with_sketch(SketchProjectParams {
            distribution,
            epsilon: sk.epsilon,
            embedding_dim,
            sketch_seed: sk.seed,
        });
    }
    Ok(spec)
}

/// Builds the initial iterate per `[solve].x0`.
pub fn build_x0(cfg: &SolveConfig, d: usize, experiment_seed: u64) -> Result<Vector, CliError> {
    match cfg.x0.as_str() {
        "zero" => Ok(Vector::zeros(d)),
        "random" => {
            let seed = cfg
                .x0_seed
                .unwrap_or_else(|| derive_seed(experiment_seed, seed_role::X0));
            let mut rng = rbas::linalg::rng_from_seed(seed);
            Ok(rbas::linalg::gaussian_vector(d, &mut rng))
        }
        "explicit" => {
            let values = cfg
                .x0_values
                .as_ref()
                .ok_or_else(|| CliError::Config("x0 = \"explicit\" needs x0_values".into()))?;
            if values.len() != d {
                return Err(CliError::Config(format!(
                    "x0_values has {} entries, system has {d} columns",
                    values.len()
                )));
            }
            Ok(Vector::from_column_slice(values))
        }
        other => Err(CliError::Config(format!("unknown x0 mode '{other}'"))),
    }
}

pub fn read_config_file(path: &Path) -> Result<(ExperimentConfig, Vec<u8>), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Config(format!("{} is not UTF-8", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    Ok((cfg, bytes))
}
