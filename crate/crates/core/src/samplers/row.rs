//! Row-action selection rules (Kaczmarz family).

use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{self, rng_from_seed, Vector};
use crate::system::{LinearSystem, Partition, Side, SolveMode};

use super::{
    argmax, greedy_threshold_set, skm_select_with_rng, weighted_choice, Sampler, SamplerState,
    Selector,
};

/// Cycles through the equations in order.
pub struct CyclicRows {
    n: usize,
    counter: u64,
}

impl CyclicRows {
    pub fn new(n: usize) -> Self {
        Self { n, counter: 0 }
    }
}

impl Sampler for CyclicRows {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let i = (self.counter % self.n as u64) as usize;
        self.counter += 1;
        Selector::rows(vec![i])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Cycle { counter: self.counter }
    }
}

/// Fresh Gaussian mixing vector (or matrix) over the equations each step.
pub struct GaussianRows {
    n: usize,
    width: usize,
    rng: ChaCha8Rng,
}

impl GaussianRows {
    pub fn new(n: usize, width: usize, seed: u64) -> Self {
        Self {
            n,
            width,
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for GaussianRows {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        Selector::dense_rows(linalg::gaussian_matrix(self.n, self.width, &mut self.rng))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Samples equation `j` with probability proportional to `||a_j||^2`.
pub struct StrohmerVershynin {
    weights: Vec<f64>,
    rng: ChaCha8Rng,
}

impl StrohmerVershynin {
    pub fn new(sys: &LinearSystem, seed: u64) -> Result<Self> {
        let weights: Vec<f64> = (0..sys.nrows()).map(|i| sys.row_norm_sq(i)).collect();
        if weights.iter().all(|&w| w <= 0.0) {
            return Err(crate::error::Error::InvalidSpec(
                "all rows have zero norm".into(),
            ));
        }
        Ok(Self {
            weights,
            rng: rng_from_seed(seed),
        })
    }
}

impl Sampler for StrohmerVershynin {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let i = weighted_choice(&self.weights, &mut self.rng)?;
        Selector::rows(vec![i])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Samples equation `j` with probability proportional to `|r_j|^p`.
pub struct SteinerbergerVector {
    p: f64,
    rng: ChaCha8Rng,
}

impl SteinerbergerVector {
    pub fn new(p: f64, seed: u64) -> Self {
        Self {
            p,
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for SteinerbergerVector {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let weights: Vec<f64> = r.iter().map(|v| v.abs().powf(self.p)).collect();
        let i = weighted_choice(&weights, &mut self.rng)?;
        Selector::rows(vec![i])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the equation whose solution hyperplane scores highest by
/// `|r_j| / ||a_j||^2`; rows of zero norm are excluded.
pub struct Motzkin {
    row_norms_sq: Vec<f64>,
}

impl Motzkin {
    pub fn new(sys: &LinearSystem) -> Self {
        Self {
            row_norms_sq: (0..sys.nrows()).map(|i| sys.row_norm_sq(i)).collect(),
        }
    }
}

impl Sampler for Motzkin {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let i = argmax(self.row_norms_sq.iter().enumerate().map(|(j, &a_sq)| {
            if a_sq > 0.0 {
                r[j].abs() / a_sq
            } else {
                f64::NEG_INFINITY
            }
        }))
        .ok_or(crate::error::Error::ZeroResidual)?;
        Selector::rows(vec![i])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the equation with the largest absolute residual.
pub struct Agmon;

impl Agmon {
    pub fn new() -> Self {
        Self
    }
}

impl Default for Agmon {
    fn default() -> Self {
        Self::new()
    }
}

impl Sampler for Agmon {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let i = argmax(r.iter().map(|v| v.abs())).expect("residual is nonempty");
        Selector::rows(vec![i])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Threshold set of well-scoring equations, then a draw weighted by `|r_j|^2`.
pub struct GreedyRandomizedVector {
    rng: ChaCha8Rng,
}

impl GreedyRandomizedVector {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for GreedyRandomizedVector {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let set = greedy_threshold_set(r, sys, None, Side::Row)?;
        let weights: Vec<f64> = set.iter().map(|&j| r[j] * r[j]).collect();
        let pick = weighted_choice(&weights, &mut self.rng)?;
        Selector::rows(vec![set[pick]])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Uniform subset of fixed size, then the largest absolute residual within it.
pub struct SamplingKaczmarzMotzkin {
    sample_size: usize,
    rng: ChaCha8Rng,
}

impl SamplingKaczmarzMotzkin {
    pub fn new(sample_size: usize, seed: u64) -> Self {
        Self {
            sample_size,
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for SamplingKaczmarzMotzkin {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        skm_select_with_rng(r, self.sample_size, &mut self.rng)
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Cycles through a random permutation of the blocks, redrawing the
/// permutation whenever it is exhausted.
pub struct RandomPermutationBlocks {
    partition: Partition,
    order: Vec<u32>,
    position: u64,
    rng: ChaCha8Rng,
}

impl RandomPermutationBlocks {
    pub fn new(partition: Partition, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let order = draw_permutation(partition.len(), &mut rng);
        Self {
            partition,
            order,
            position: 0,
            rng,
        }
    }
}

pub(super) fn draw_permutation(len: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    use rand::seq::SliceRandom;
    let mut order: Vec<u32> = (0..len as u32).collect();
    order.shuffle(rng);
    order
}

impl Sampler for RandomPermutationBlocks {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let eps = self.partition.len() as u64;
        if self.position == eps {
            self.order = draw_permutation(self.partition.len(), &mut self.rng);
            self.position = 0;
        }
        let block_id = self.order[self.position as usize];
        self.position += 1;
        Ok(Selector::rows(self.partition.block(block_id as usize).to_vec())?.with_tag(block_id))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Permutation {
            order: self.order.clone(),
            position: self.position,
        }
    }
}

/// Samples block `j` with probability proportional to `||E_j^T r||_p^p`.
pub struct SteinerbergerBlock {
    partition: Partition,
    p: f64,
    rng: ChaCha8Rng,
}

impl SteinerbergerBlock {
    pub fn new(partition: Partition, p: f64, seed: u64) -> Self {
        Self {
            partition,
            p,
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for SteinerbergerBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let weights: Vec<f64> = self
            .partition
            .blocks()
            .iter()
            .map(|block| block.iter().map(|&i| r[i].abs().powf(self.p)).sum())
            .collect();
        let j = weighted_choice(&weights, &mut self.rng)?;
        Ok(Selector::rows(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the block whose projection moves the iterate furthest:
/// `argmax_j || (E_j^T A A^T E_j)^+ E_j^T (b - A x) ||`.
pub struct MotzkinBlock {
    partition: Partition,
}

impl MotzkinBlock {
    pub fn new(partition: Partition) -> Self {
        Self { partition }
    }
}

impl Sampler for MotzkinBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let mut scores = Vec::with_capacity(self.partition.len());
        for block in self.partition.blocks() {
            let a_block = sys.row_block(block);
            let gram = &a_block * a_block.transpose();
            let r_block = Vector::from_iterator(block.len(), block.iter().map(|&i| r[i]));
            let z = linalg::pinv_apply(&gram, &r_block)?;
            scores.push(z.norm());
        }
        let j = argmax(scores.into_iter()).expect("partition is nonempty");
        Ok(Selector::rows(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the block with the largest residual norm.
pub struct AgmonBlock {
    partition: Partition,
}

impl AgmonBlock {
    pub fn new(partition: Partition) -> Self {
        Self { partition }
    }
}

impl Sampler for AgmonBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let j = argmax(
            self.partition
                .blocks()
                .iter()
                .map(|block| block.iter().map(|&i| r[i] * r[i]).sum::<f64>()),
        )
        .expect("partition is nonempty");
        Ok(Selector::rows(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Block threshold set, then a draw weighted by `||E_j^T r||^2`.
pub struct GreedyRandomizedBlock {
    partition: Partition,
    rng: ChaCha8Rng,
}

impl GreedyRandomizedBlock {
    pub fn new(partition: Partition, seed: u64) -> Self {
        Self {
            partition,
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for GreedyRandomizedBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let set = greedy_threshold_set(r, sys, Some(&self.partition), Side::Row)?;
        let weights: Vec<f64> = set
            .iter()
            .map(|&j| {
                self.partition
                    .block(j)
                    .iter()
                    .map(|&i| r[i] * r[i])
                    .sum::<f64>()
            })
            .collect();
        let pick = weighted_choice(&weights, &mut self.rng)?;
        let j = set[pick];
        Ok(Selector::rows(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}
