//! The selection procedures: given the system, the current iterate, and the
//! sampler's bounded state, produce the next selector (rows, columns, a block,
//! or a dense sketch) that the engine projects with.
//!
//! Every method sits behind the [`Sampler`] trait and is constructed through
//! [`make_sampler`] from a validated [`SamplerSpec`]. Custom selection rules
//! (for example user streaming distributions) plug in by implementing
//! [`Sampler`] directly.
//!
//! Determinism contract: a sampler's output sequence is a pure function of
//! `(spec, seed, system, iterate sequence)`. All argmax ties break toward the
//! smallest index, and zero-weight outcomes are excluded from weighted draws
//! exactly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::sketch::SketchDistribution;
use crate::system::{LinearSystem, Partition, Side, SolveMode};

mod col;
mod row;
mod sketch_project;
mod stream;

pub use sketch_project::{pretransform_system, sketch_project_score};
pub use stream::{streaming_source, GaussianMixStream};

/// What a sampler hands the engine: row/column index lists or dense mixing
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum SelectorKind {
    RowIndices(Vec<usize>),
    ColIndices(Vec<usize>),
    /// `n x p` mixing matrix applied to equations.
    DenseRows(Matrix),
    /// `d x p` mixing matrix applied to coordinates.
    DenseCols(Matrix),
}

/// A selector plus an optional discrete tag identifying the choice (block id,
/// sketch index) for history summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Selector {
    pub kind: SelectorKind,
    pub tag: Option<u32>,
}

fn check_indices(indices: &[usize]) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::Invalid("selector index list is empty".into()));
    }
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invalid("selector index list has duplicates".into()));
    }
    Ok(())
}

impl Selector {
    pub fn rows(indices: Vec<usize>) -> Result<Self> {
        check_indices(&indices)?;
        Ok(Self {
            kind: SelectorKind::RowIndices(indices),
            tag: None,
        })
    }

    pub fn cols(indices: Vec<usize>) -> Result<Self> {
        check_indices(&indices)?;
        Ok(Self {
            kind: SelectorKind::ColIndices(indices),
            tag: None,
        })
    }

    pub fn dense_rows(w: Matrix) -> Result<Self> {
        if w.ncols() == 0 || w.iter().all(|&v| v == 0.0) {
            return Err(Error::Invalid("dense selector must be nonzero with p >= 1".into()));
        }
        Ok(Self {
            kind: SelectorKind::DenseRows(w),
            tag: None,
        })
    }

    pub fn dense_cols(w: Matrix) -> Result<Self> {
        if w.ncols() == 0 || w.iter().all(|&v| v == 0.0) {
            return Err(Error::Invalid("dense selector must be nonzero with p >= 1".into()));
        }
        Ok(Self {
            kind: SelectorKind::DenseCols(w),
            tag: None,
        })
    }

    pub fn with_tag(mut self, tag: u32) -> Self {
        self.tag = Some(tag);
        self
    }

    /// True when the selector addresses equations (row side).
    pub fn is_row_side(&self) -> bool {
        matches!(
            self.kind,
            SelectorKind::RowIndices(_) | SelectorKind::DenseRows(_)
        )
    }

    /// Compact identity used in histories; equal summaries mean "same choice"
    /// for selector-change counting.
    pub fn summary(&self) -> String {
        let side = if self.is_row_side() { "R" } else { "C" };
        if let Some(t) = self.tag {
            return format!("{side}#{t}");
        }
        match &self.kind {
            SelectorKind::RowIndices(ix) | SelectorKind::ColIndices(ix) => {
                if ix.len() == 1 {
                    format!("{side}[{}]", ix[0])
                } else {
                    let lo = ix.iter().min().unwrap();
                    let hi = ix.iter().max().unwrap();
                    format!("{side}[{lo}..{hi}]({})", ix.len())
                }
            }
            SelectorKind::DenseRows(w) | SelectorKind::DenseCols(w) => {
                format!("D{side}(p={})", w.ncols())
            }
        }
    }
}

/// Bounded per-method memory. Its encoded size stays constant over any run,
/// which the property suite checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SamplerState {
    Empty,
    Cycle { counter: u64 },
    Permutation { order: Vec<u32>, position: u64 },
    SketchEnsemble { size: u32 },
    StreamCursor { position: u64 },
}

impl SamplerState {
    /// Size of a flat encoding of the state, in bytes.
    pub fn encoded_len(&self) -> usize {
        match self {
            SamplerState::Empty => 1,
            SamplerState::Cycle { .. } => 9,
            SamplerState::Permutation { order, .. } => 9 + 4 * order.len(),
            SamplerState::SketchEnsemble { .. } => 5,
            SamplerState::StreamCursor { .. } => 9,
        }
    }
}

/// The method registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    CyclicVectorKaczmarz,
    GaussianVectorKaczmarz,
    StrohmerVershynin,
    SteinerbergerVector,
    Motzkin,
    Agmon,
    GreedyRandomizedVector,
    SamplingKaczmarzMotzkin,
    StreamingVector,
    CyclicVectorCd,
    GaussianVectorCs,
    ZouziasFrerisVectorCd,
    MaxResidualVectorCd,
    MaxDistanceVectorCd,
    RandomPermutationBlockKaczmarz,
    SteinerbergerBlock,
    MotzkinBlock,
    AgmonBlock,
    AdaptiveSketchProject,
    GreedyRandomizedBlock,
    StreamingBlock,
    RandomPermutationBlockCd,
    GaussianBlockCs,
    ZouziasFrerisBlockCd,
    MaxResidualBlockCd,
    MaxDistanceBlockCd,
    GreedyBlockSelection,
}

pub const ALL_SAMPLER_KINDS: [SamplerKind; 27] = [
    SamplerKind::CyclicVectorKaczmarz,
    SamplerKind::GaussianVectorKaczmarz,
    SamplerKind::StrohmerVershynin,
    SamplerKind::SteinerbergerVector,
    SamplerKind::Motzkin,
    SamplerKind::Agmon,
    SamplerKind::GreedyRandomizedVector,
    SamplerKind::SamplingKaczmarzMotzkin,
    SamplerKind::StreamingVector,
    SamplerKind::CyclicVectorCd,
    SamplerKind::GaussianVectorCs,
    SamplerKind::ZouziasFrerisVectorCd,
    SamplerKind::MaxResidualVectorCd,
    SamplerKind::MaxDistanceVectorCd,
    SamplerKind::RandomPermutationBlockKaczmarz,
    SamplerKind::SteinerbergerBlock,
    SamplerKind::MotzkinBlock,
    SamplerKind::AgmonBlock,
    SamplerKind::AdaptiveSketchProject,
    SamplerKind::GreedyRandomizedBlock,
    SamplerKind::StreamingBlock,
    SamplerKind::RandomPermutationBlockCd,
    SamplerKind::GaussianBlockCs,
    SamplerKind::ZouziasFrerisBlockCd,
    SamplerKind::MaxResidualBlockCd,
    SamplerKind::MaxDistanceBlockCd,
    SamplerKind::GreedyBlockSelection,
];

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::CyclicVectorKaczmarz => "cyclic_vector_kaczmarz",
            SamplerKind::GaussianVectorKaczmarz => "gaussian_vector_kaczmarz",
            SamplerKind::StrohmerVershynin => "strohmer_vershynin",
            SamplerKind::SteinerbergerVector => "steinerberger_vector",
            SamplerKind::Motzkin => "motzkin",
            SamplerKind::Agmon => "agmon",
            SamplerKind::GreedyRandomizedVector => "greedy_randomized_vector",
            SamplerKind::SamplingKaczmarzMotzkin => "sampling_kaczmarz_motzkin",
            SamplerKind::StreamingVector => "streaming_vector",
            SamplerKind::CyclicVectorCd => "cyclic_vector_cd",
            SamplerKind::GaussianVectorCs => "gaussian_vector_cs",
            SamplerKind::ZouziasFrerisVectorCd => "zouzias_freris_vector_cd",
            SamplerKind::MaxResidualVectorCd => "max_residual_vector_cd",
            SamplerKind::MaxDistanceVectorCd => "max_distance_vector_cd",
            SamplerKind::RandomPermutationBlockKaczmarz => "random_permutation_block_kaczmarz",
            SamplerKind::SteinerbergerBlock => "steinerberger_block",
            SamplerKind::MotzkinBlock => "motzkin_block",
            SamplerKind::AgmonBlock => "agmon_block",
            SamplerKind::AdaptiveSketchProject => "adaptive_sketch_project",
            SamplerKind::GreedyRandomizedBlock => "greedy_randomized_block",
            SamplerKind::StreamingBlock => "streaming_block",
            SamplerKind::RandomPermutationBlockCd => "random_permutation_block_cd",
            SamplerKind::GaussianBlockCs => "gaussian_block_cs",
            SamplerKind::ZouziasFrerisBlockCd => "zouzias_freris_block_cd",
            SamplerKind::MaxResidualBlockCd => "max_residual_block_cd",
            SamplerKind::MaxDistanceBlockCd => "max_distance_block_cd",
            SamplerKind::GreedyBlockSelection => "greedy_block_selection",
        }
    }

    /// Which error functional the method drives (and which selectors it emits).
    pub fn mode(&self) -> SolveMode {
        use SamplerKind::*;
        match self {
            CyclicVectorKaczmarz | GaussianVectorKaczmarz | StrohmerVershynin
            | SteinerbergerVector | Motzkin | Agmon | GreedyRandomizedVector
            | SamplingKaczmarzMotzkin | StreamingVector | RandomPermutationBlockKaczmarz
            | SteinerbergerBlock | MotzkinBlock | AgmonBlock | AdaptiveSketchProject
            | GreedyRandomizedBlock | StreamingBlock | GreedyBlockSelection => {
                SolveMode::RowAction
            }
            CyclicVectorCd | GaussianVectorCs | ZouziasFrerisVectorCd | MaxResidualVectorCd
            | MaxDistanceVectorCd | RandomPermutationBlockCd | GaussianBlockCs
            | ZouziasFrerisBlockCd | MaxResidualBlockCd | MaxDistanceBlockCd => {
                SolveMode::ColAction
            }
        }
    }

    pub fn needs_partition(&self) -> bool {
        use SamplerKind::*;
        matches!(
            self,
            RandomPermutationBlockKaczmarz
                | SteinerbergerBlock
                | MotzkinBlock
                | AgmonBlock
                | GreedyRandomizedBlock
                | RandomPermutationBlockCd
                | ZouziasFrerisBlockCd
                | MaxResidualBlockCd
                | MaxDistanceBlockCd
                | GreedyBlockSelection
        )
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ALL_SAMPLER_KINDS
            .iter()
            .find(|k| k.as_str() == s)
            .copied()
            .ok_or_else(|| Error::UnknownSampler(s.to_string()))
    }
}

/// Sketch ensemble parameters for adaptive sketch-and-project.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchProjectParams {
    pub distribution: SketchDistribution,
    pub epsilon: usize,
    pub embedding_dim: usize,
    /// Seed for the fixed ensemble; defaults to the sampler seed.
    pub sketch_seed: Option<u64>,
}

/// Validated description of a sampling method plus its parameters and seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition>,
    /// Residual-weight exponent for the Steinerberger methods (default 2).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_exponent: Option<f64>,
    /// Subset size for sampling Kaczmarz-Motzkin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_size: Option<usize>,
    /// Sketch width for Gaussian/streaming block methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sketch: Option<SketchProjectParams>,
    /// Optional draw budget for streaming sources; exceeding it errors.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_draws: Option<u64>,
}

impl SamplerSpec {
    pub fn new(kind: SamplerKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            partition: None,
            p_exponent: None,
            sample_size: None,
            block_width: None,
            sketch: None,
            max_draws: None,
        }
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn with_p_exponent(mut self, p: f64) -> Self {
        self.p_exponent = Some(p);
        self
    }

    pub fn with_sample_size(mut self, size: usize) -> Self {
        self.sample_size = Some(size);
        self
    }

    pub fn with_block_width(mut self, width: usize) -> Self {
        self.block_width = Some(width);
        self
    }

    pub fn with_sketch(mut self, sketch: SketchProjectParams) -> Self {
        self.sketch = Some(sketch);
        self
    }

    pub fn with_max_draws(mut self, draws: u64) -> Self {
        self.max_draws = Some(draws);
        self
    }

    pub fn mode(&self) -> SolveMode {
        self.kind.mode()
    }

    fn partition_for(&self, sys: &LinearSystem) -> Result<Partition> {
        let p = self
            .partition
            .clone()
            .ok_or_else(|| Error::InvalidSpec(format!("{} requires a partition", self.kind)))?;
        let expected_side = self.kind.mode().side();
        if p.side() != expected_side {
            return Err(Error::InvalidSpec(format!(
                "{} needs a {:?}-side partition",
                self.kind, expected_side
            )));
        }
        let expected_total = match expected_side {
            Side::Row => sys.nrows(),
            Side::Col => sys.ncols(),
        };
        if p.total() != expected_total {
            return Err(Error::InvalidSpec(format!(
                "partition covers {} indices but the system has {}",
                p.total(),
                expected_total
            )));
        }
        Ok(p)
    }

    fn p_exponent_checked(&self) -> Result<f64> {
        let p = self.p_exponent.unwrap_or(2.0);
        if p < 1.0 {
            return Err(Error::InvalidSpec(format!("p exponent must be >= 1, got {p}")));
        }
        Ok(p)
    }
}

/// A stateful selection procedure.
pub trait Sampler {
    fn mode(&self) -> SolveMode;

    /// Produces the next selector. `residual` must equal `A x - b` (the
    /// caller's responsibility; the engine maintains it).
    fn next(&mut self, sys: &LinearSystem, x: &Vector, residual: &Vector) -> Result<Selector>;

    /// Snapshot of the bounded memory.
    fn state(&self) -> SamplerState;
}

/// Constructs the named method over `sys`, validating required parameters.
pub fn make_sampler(spec: &SamplerSpec, sys: &LinearSystem) -> Result<Box<dyn Sampler>> {
    use SamplerKind::*;
    match spec.kind {
        CyclicVectorKaczmarz => Ok(Box::new(row::CyclicRows::new(sys.nrows()))),
        GaussianVectorKaczmarz => Ok(Box::new(row::GaussianRows::new(sys.nrows(), 1, spec.seed))),
        StrohmerVershynin => Ok(Box::new(row::StrohmerVershynin::new(sys, spec.seed)?)),
        SteinerbergerVector => Ok(Box::new(row::SteinerbergerVector::new(
            spec.p_exponent_checked()?,
            spec.seed,
        ))),
        Motzkin => Ok(Box::new(row::Motzkin::new(sys))),
        Agmon => Ok(Box::new(row::Agmon::new())),
        GreedyRandomizedVector => Ok(Box::new(row::GreedyRandomizedVector::new(spec.seed))),
        SamplingKaczmarzMotzkin => {
            let size = spec.sample_size.ok_or_else(|| {
                Error::InvalidSpec("sampling_kaczmarz_motzkin requires sample_size".into())
            })?;
            if size == 0 || size > sys.nrows() {
                return Err(Error::InvalidSpec(format!(
                    "sample_size {size} out of range 1..={}",
                    sys.nrows()
                )));
            }
            Ok(Box::new(row::SamplingKaczmarzMotzkin::new(size, spec.seed)))
        }
        StreamingVector => Ok(Box::new(stream::StreamingSampler::new(
            sys,
            1,
            spec.seed,
            spec.max_draws,
        )?)),
        StreamingBlock => {
            let width = spec.block_width.unwrap_or(2);
            if width == 0 {
                return Err(Error::InvalidSpec("block_width must be >= 1".into()));
            }
            Ok(Box::new(stream::StreamingSampler::new(
                sys,
                width,
                spec.seed,
                spec.max_draws,
            )?))
        }
        CyclicVectorCd => Ok(Box::new(col::CyclicCols::new(sys.ncols()))),
        GaussianVectorCs => Ok(Box::new(col::GaussianCols::new(sys.ncols(), 1, spec.seed))),
        GaussianBlockCs => {
            let width = spec.block_width.unwrap_or(2);
            if width == 0 {
                return Err(Error::InvalidSpec("block_width must be >= 1".into()));
            }
            Ok(Box::new(col::GaussianCols::new(sys.ncols(), width, spec.seed)))
        }
        ZouziasFrerisVectorCd => Ok(Box::new(col::ZouziasFrerisVector::new(sys, spec.seed)?)),
        MaxResidualVectorCd => Ok(Box::new(col::MaxResidualVector::new())),
        MaxDistanceVectorCd => Ok(Box::new(col::MaxDistanceVector::new(sys))),
        RandomPermutationBlockKaczmarz => Ok(Box::new(row::RandomPermutationBlocks::new(
            spec.partition_for(sys)?,
            spec.seed,
        ))),
        SteinerbergerBlock => Ok(Box::new(row::SteinerbergerBlock::new(
            spec.partition_for(sys)?,
            spec.p_exponent_checked()?,
            spec.seed,
        ))),
        MotzkinBlock => Ok(Box::new(row::MotzkinBlock::new(spec.partition_for(sys)?))),
        AgmonBlock | GreedyBlockSelection => {
            Ok(Box::new(row::AgmonBlock::new(spec.partition_for(sys)?)))
        }
        GreedyRandomizedBlock => Ok(Box::new(row::GreedyRandomizedBlock::new(
            spec.partition_for(sys)?,
            spec.seed,
        ))),
        AdaptiveSketchProject => {
            let params = spec.sketch.clone().ok_or_else(|| {
                Error::InvalidSpec("adaptive_sketch_project requires sketch parameters".into())
            })?;
            Ok(Box::new(sketch_project::AdaptiveSketchProject::new(
                sys,
                &params,
                params.sketch_seed.unwrap_or(spec.seed),
            )?))
        }
        RandomPermutationBlockCd => Ok(Box::new(col::RandomPermutationBlocksCd::new(
            spec.partition_for(sys)?,
            spec.seed,
        ))),
        ZouziasFrerisBlockCd => Ok(Box::new(col::ZouziasFrerisBlock::new(
            spec.partition_for(sys)?,
            sys,
            spec.seed,
        )?)),
        MaxResidualBlockCd => Ok(Box::new(col::MaxResidualBlock::new(spec.partition_for(sys)?))),
        MaxDistanceBlockCd => Ok(Box::new(col::MaxDistanceBlock::new(spec.partition_for(sys)?))),
    }
}

/// Weighted draw over indices with strictly positive weights; zero-weight
/// indices are excluded from the support exactly.
pub(crate) fn weighted_choice<R: Rng>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let total: f64 = weights.iter().filter(|w| **w > 0.0).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(Error::ZeroResidual);
    }
    let u: f64 = rng.random::<f64>() * total;
    let mut cum = 0.0;
    let mut last_positive = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            cum += w;
            last_positive = Some(i);
            if u < cum {
                return Ok(i);
            }
        }
    }
    Ok(last_positive.expect("total was positive"))
}

/// First index of the strict maximum (ties break to the smallest index).
/// Entries with score `-inf` are excluded.
pub(crate) fn argmax(scores: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if s == f64::NEG_INFINITY {
            continue;
        }
        match best {
            None => best = Some((i, s)),
            Some((_, bs)) if s > bs => best = Some((i, s)),
            _ => {}
        }
    }
    best.map(|(i, _)| i)
}

/// The threshold-set construction used by the greedy randomized methods.
///
/// Row side scores equations by `|r_j|^2 / (||a_j||^2 ||r||^2)` (blocks by the
/// analogous block quantities); the threshold is half the best score plus
/// `1/(2 ||A||_F^2)`, which guarantees a nonempty set whenever the residual
/// (row side) or the normal residual `A^T r` (column side) is nonzero.
pub fn greedy_threshold_set(
    r: &Vector,
    sys: &LinearSystem,
    partition: Option<&Partition>,
    side: Side,
) -> Result<Vec<usize>> {
    let fro_sq = sys.frobenius_norm_sq();
    let (scores, norm_sq): (Vec<f64>, f64) = match side {
        Side::Row => {
            let r_norm_sq = r.norm_squared();
            if r_norm_sq <= 0.0 {
                return Err(Error::ZeroResidual);
            }
            let scores = match partition {
                None => (0..sys.nrows())
                    .map(|j| {
                        let a_sq = sys.row_norm_sq(j);
                        if a_sq > 0.0 {
                            r[j] * r[j] / a_sq
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect(),
                Some(p) => p
                    .blocks()
                    .iter()
                    .map(|block| {
                        let a_sq: f64 = block.iter().map(|&i| sys.row_norm_sq(i)).sum();
                        if a_sq > 0.0 {
                            block.iter().map(|&i| r[i] * r[i]).sum::<f64>() / a_sq
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect(),
            };
            (scores, r_norm_sq)
        }
        Side::Col => {
            let g = sys.matrix().transpose() * r;
            let g_norm_sq = g.norm_squared();
            if g_norm_sq <= 0.0 {
                return Err(Error::ZeroResidual);
            }
            let scores = match partition {
                None => (0..sys.ncols())
                    .map(|j| {
                        let a_sq = sys.col_norm_sq(j);
                        if a_sq > 0.0 {
                            g[j] * g[j] / a_sq
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect(),
                Some(p) => p
                    .blocks()
                    .iter()
                    .map(|block| {
                        let a_sq: f64 = block.iter().map(|&j| sys.col_norm_sq(j)).sum();
                        if a_sq > 0.0 {
                            block.iter().map(|&j| g[j] * g[j]).sum::<f64>() / a_sq
                        } else {
                            f64::NEG_INFINITY
                        }
                    })
                    .collect(),
            };
            (scores, g_norm_sq)
        }
    };
    let max_score = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max_score <= 0.0 {
        return Err(Error::ZeroResidual);
    }
    let threshold = 0.5 * max_score / norm_sq + 0.5 / fro_sq;
    let set: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s.is_finite() && s / norm_sq >= threshold)
        .map(|(i, _)| i)
        .collect();
    debug_assert!(!set.is_empty(), "greedy threshold set must be nonempty");
    Ok(set)
}

/// Uniform sample of `sample_size` equations without replacement, then the
/// largest absolute residual within the sample (ties to the smallest index).
pub fn skm_select(r: &Vector, sample_size: usize, seed: u64) -> Result<Selector> {
    let mut rng = crate::linalg::rng_from_seed(seed);
    skm_select_with_rng(r, sample_size, &mut rng)
}

pub(crate) fn skm_select_with_rng<R: Rng>(
    r: &Vector,
    sample_size: usize,
    rng: &mut R,
) -> Result<Selector> {
    let n = r.len();
    if sample_size == 0 || sample_size > n {
        return Err(Error::InvalidSpec(format!(
            "sample_size {sample_size} out of range 1..={n}"
        )));
    }
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, n, sample_size).into_vec();
    picked.sort_unstable();
    let best = picked
        .iter()
        .copied()
        .max_by(|&a, &b| {
            r[a].abs()
                .partial_cmp(&r[b].abs())
                .expect("finite residuals")
                .then(b.cmp(&a)) // prefer the smaller index on ties
        })
        .expect("sample is nonempty");
    Selector::rows(vec![best])
}
