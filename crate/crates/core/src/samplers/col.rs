//! Column-action selection rules (coordinate-descent family).

use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{self, rng_from_seed, Vector};
use crate::system::{LinearSystem, Partition, SolveMode};

use super::{argmax, weighted_choice, Sampler, SamplerState, Selector};

/// Cycles through the coordinates in order.
pub struct CyclicCols {
    d: usize,
    counter: u64,
}

impl CyclicCols {
    pub fn new(d: usize) -> Self {
        Self { d, counter: 0 }
    }
}

impl Sampler for CyclicCols {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let j = (self.counter % self.d as u64) as usize;
        self.counter += 1;
        Selector::cols(vec![j])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Cycle { counter: self.counter }
    }
}

/// Fresh Gaussian direction(s) in coordinate space each step.
pub struct GaussianCols {
    d: usize,
    width: usize,
    rng: ChaCha8Rng,
}

impl GaussianCols {
    pub fn new(d: usize, width: usize, seed: u64) -> Self {
        Self {
            d,
            width,
            rng: rng_from_seed(seed),
        }
    }
}

impl Sampler for GaussianCols {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        Selector::dense_cols(linalg::gaussian_matrix(self.d, self.width, &mut self.rng))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Samples coordinate `j` with probability proportional to `||A e_j||^2`.
pub struct ZouziasFrerisVector {
    weights: Vec<f64>,
    rng: ChaCha8Rng,
}

impl ZouziasFrerisVector {
    pub fn new(sys: &LinearSystem, seed: u64) -> Result<Self> {
        let weights: Vec<f64> = (0..sys.ncols()).map(|j| sys.col_norm_sq(j)).collect();
        if weights.iter().all(|&w| w <= 0.0) {
            return Err(crate::error::Error::InvalidSpec(
                "all columns have zero norm".into(),
            ));
        }
        Ok(Self {
            weights,
            rng: rng_from_seed(seed),
        })
    }
}

impl Sampler for ZouziasFrerisVector {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let j = weighted_choice(&self.weights, &mut self.rng)?;
        Selector::cols(vec![j])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the coordinate with the largest normal-residual component
/// `|e_j^T A^T r|`; ties break to the smallest index.
pub struct MaxResidualVector;

impl MaxResidualVector {
    pub fn new() -> Self {
        Self
    }
}

impl Default for MaxResidualVector {
    fn default() -> Self {
        Self::new()
    }
}

impl Sampler for MaxResidualVector {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let g = sys.matrix().transpose() * r;
        let j = argmax(g.iter().map(|v| v.abs())).expect("columns are nonempty");
        Selector::cols(vec![j])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Scores coordinates by `|e_j^T A^T r| / ||A^T A e_j||^2` (the normal-system
/// hyperplane distance); zero columns are excluded.
pub struct MaxDistanceVector {
    denom: Vec<f64>,
}

impl MaxDistanceVector {
    pub fn new(sys: &LinearSystem) -> Self {
        let a = sys.matrix();
        let denom = (0..sys.ncols())
            .map(|j| {
                let col = a.column(j).into_owned();
                (a.transpose() * col).norm_squared()
            })
            .collect();
        Self { denom }
    }
}

impl Sampler for MaxDistanceVector {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let g = sys.matrix().transpose() * r;
        let j = argmax(self.denom.iter().enumerate().map(|(j, &den)| {
            if den > 0.0 {
                g[j].abs() / den
            } else {
                f64::NEG_INFINITY
            }
        }))
        .ok_or(crate::error::Error::ZeroResidual)?;
        Selector::cols(vec![j])
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Random-permutation cycling over coordinate blocks.
pub struct RandomPermutationBlocksCd {
    partition: Partition,
    order: Vec<u32>,
    position: u64,
    rng: ChaCha8Rng,
}

impl RandomPermutationBlocksCd {
    pub fn new(partition: Partition, seed: u64) -> Self {
        let mut rng = rng_from_seed(seed);
        let order = super::row::draw_permutation(partition.len(), &mut rng);
        Self {
            partition,
            order,
            position: 0,
            rng,
        }
    }
}

impl Sampler for RandomPermutationBlocksCd {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let eps = self.partition.len() as u64;
        if self.position == eps {
            self.order = super::row::draw_permutation(self.partition.len(), &mut self.rng);
            self.position = 0;
        }
        let block_id = self.order[self.position as usize];
        self.position += 1;
        Ok(Selector::cols(self.partition.block(block_id as usize).to_vec())?.with_tag(block_id))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Permutation {
            order: self.order.clone(),
            position: self.position,
        }
    }
}

/// Samples block `j` with probability proportional to `||A E_j||_F^2`.
pub struct ZouziasFrerisBlock {
    partition: Partition,
    weights: Vec<f64>,
    rng: ChaCha8Rng,
}

impl ZouziasFrerisBlock {
    pub fn new(partition: Partition, sys: &LinearSystem, seed: u64) -> Result<Self> {
        let weights: Vec<f64> = partition
            .blocks()
            .iter()
            .map(|block| block.iter().map(|&j| sys.col_norm_sq(j)).sum())
            .collect();
        if weights.iter().all(|&w| w <= 0.0) {
            return Err(crate::error::Error::InvalidSpec(
                "all column blocks have zero norm".into(),
            ));
        }
        Ok(Self {
            partition,
            weights,
            rng: rng_from_seed(seed),
        })
    }
}

impl Sampler for ZouziasFrerisBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        let j = weighted_choice(&self.weights, &mut self.rng)?;
        Ok(Selector::cols(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the coordinate block with the largest normal-residual norm
/// `||E_j^T A^T r||`.
pub struct MaxResidualBlock {
    partition: Partition,
}

impl MaxResidualBlock {
    pub fn new(partition: Partition) -> Self {
        Self { partition }
    }
}

impl Sampler for MaxResidualBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let g = sys.matrix().transpose() * r;
        let j = argmax(
            self.partition
                .blocks()
                .iter()
                .map(|block| block.iter().map(|&c| g[c] * g[c]).sum::<f64>()),
        )
        .expect("partition is nonempty");
        Ok(Selector::cols(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}

/// Picks the block whose least-squares correction is largest:
/// `argmax_j || (E_j^T A^T A E_j)^+ E_j^T A^T r ||`.
pub struct MaxDistanceBlock {
    partition: Partition,
}

impl MaxDistanceBlock {
    pub fn new(partition: Partition) -> Self {
        Self { partition }
    }
}

impl Sampler for MaxDistanceBlock {
    fn mode(&self) -> SolveMode {
        SolveMode::ColAction
    }

    fn next(&mut self, sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let g = sys.matrix().transpose() * r;
        let mut scores = Vec::with_capacity(self.partition.len());
        for block in self.partition.blocks() {
            let a_block = sys.col_block(block);
            let gram = a_block.transpose() * &a_block;
            let g_block = Vector::from_iterator(block.len(), block.iter().map(|&c| g[c]));
            let z = linalg::pinv_apply(&gram, &g_block)?;
            scores.push(z.norm());
        }
        let j = argmax(scores.into_iter()).expect("partition is nonempty");
        Ok(Selector::cols(self.partition.block(j).to_vec())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::Empty
    }
}
