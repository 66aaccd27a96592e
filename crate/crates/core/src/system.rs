//! Problem container: the pair `(A, b)`, consistency classification, the
//! reference targets used for error reporting, partitions, and file I/O.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector, DEFAULT_RANK_TOL};

pub mod io;

/// Relative gate deciding whether the least-squares residual counts as zero.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Thin SVD trimmed to the numerical rank, kept for pseudo-inverse solves.
#[derive(Debug, Clone)]
struct CachedSvd {
    u: Matrix,   // n x r
    s: Vector,   // r
    v_t: Matrix, // r x d
}

impl CachedSvd {
    fn compute(a: &Matrix) -> (Self, usize) {
        let f = linalg::svd_factor(a);
        let rank = f.rank(DEFAULT_RANK_TOL);
        let tu = f.u.columns(0, rank).into_owned();
        let ts = Vector::from_iterator(rank, f.s.iter().take(rank).copied());
        let tv_t = f.v_t.rows(0, rank).into_owned();
        (Self { u: tu, s: ts, v_t: tv_t }, rank)
    }

    /// `A^dagger v` from the cached factors.
    fn pinv_apply(&self, v: &Vector) -> Vector {
        let mut t = self.u.transpose() * v;
        for i in 0..t.len() {
            t[i] /= self.s[i];
        }
        self.v_t.transpose() * t
    }
}

/// A linear system `A x = b` with rank and consistency computed at
/// construction (via one thin SVD, cached for later projections).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: Matrix,
    b: Vector,
    rank: usize,
    consistent: bool,
    svd: CachedSvd,
    least_squares: Vector,
    r_star: Vector,
    fro_norm_sq: f64,
}

impl LinearSystem {
    pub fn new(a: Matrix, b: Vector) -> Result<Self> {
        if b.len() != a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "matrix has {} rows but rhs has length {}",
                a.nrows(),
                b.len()
            )));
        }
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::Invalid("empty matrix".into()));
        }
        linalg::check_finite(&a)?;
        linalg::check_finite_vector(&b)?;
        let (svd, rank) = CachedSvd::compute(&a);
        let least_squares = svd.pinv_apply(&b);
        let r_star = &a * &least_squares - &b;
        let consistent = r_star.norm() <= CONSISTENCY_TOL * 1.0_f64.max(b.norm());
        let fro_norm_sq = a.iter().map(|x| x * x).sum();
        Ok(Self {
            a,
            b,
            rank,
            consistent,
            svd,
            least_squares,
            r_star,
            fro_norm_sq,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn rhs(&self) -> &Vector {
        &self.b
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.a.ncols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// The minimum-norm least-squares solution `A^dagger b`.
    pub fn least_squares_solution(&self) -> &Vector {
        &self.least_squares
    }

    pub fn frobenius_norm_sq(&self) -> f64 {
        self.fro_norm_sq
    }

    pub fn residual(&self, x: &Vector) -> Vector {
        &self.a * x - &self.b
    }

    /// `A^dagger v` using the cached factorization.
    pub fn pinv_apply(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "pinv_apply: expected length {}, got {}",
                self.nrows(),
                v.len()
            )));
        }
        Ok(self.svd.pinv_apply(v))
    }

    /// The point of the solution set nearest to `x` in the 2-norm, computed
    /// as `x - A^dagger (A x - b)`. Errors on inconsistent systems.
    pub fn solution_projection(&self, x: &Vector) -> Result<Vector> {
        if !self.consistent {
            return Err(Error::InconsistentSystem);
        }
        if x.len() != self.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "solution_projection: expected length {}, got {}",
                self.ncols(),
                x.len()
            )));
        }
        let r = self.residual(x);
        Ok(x - self.svd.pinv_apply(&r))
    }

    /// `r* = A x_ls - b`, the residual of any least-squares solution;
    /// satisfies `A^T r* = 0`. Zero for consistent systems.
    pub fn residual_star(&self) -> &Vector {
        &self.r_star
    }

    /// Squared 2-norm of row `i`.
    pub fn row_norm_sq(&self, i: usize) -> f64 {
        self.a.row(i).iter().map(|x| x * x).sum()
    }

    /// Squared 2-norm of column `j`.
    pub fn col_norm_sq(&self, j: usize) -> f64 {
        self.a.column(j).norm_squared()
    }

    /// Rows `indices` of `A` as a dense block.
    pub fn row_block(&self, indices: &[usize]) -> Matrix {
        let mut block = Matrix::zeros(indices.len(), self.ncols());
        for (k, &i) in indices.iter().enumerate() {
            block.row_mut(k).copy_from(&self.a.row(i));
        }
        block
    }

    /// Columns `indices` of `A` as a dense block.
    pub fn col_block(&self, indices: &[usize]) -> Matrix {
        let mut block = Matrix::zeros(self.nrows(), indices.len());
        for (k, &j) in indices.iter().enumerate() {
            block.column_mut(k).copy_from(&self.a.column(j));
        }
        block
    }
}

/// Which index set a partition or sampler addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Row,
    Col,
}

/// An ordered list of disjoint, covering, nonempty index blocks over the rows
/// or columns of a system. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    side: Side,
    blocks: Vec<Vec<usize>>,
    total: usize,
}

impl Partition {
    pub fn new(side: Side, blocks: Vec<Vec<usize>>, total: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        let mut seen = vec![false; total];
        for (bi, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {bi} is empty")));
            }
            for &i in block {
                if i >= total {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} out of bounds for size {total}"
                    )));
                }
                if seen[i] {
                    return Err(Error::InvalidPartition(format!("index {i} appears twice")));
                }
                seen[i] = true;
            }
        }
        if let Some(gap) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {gap} is not covered")));
        }
        Ok(Self { side, blocks, total })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn total(&self) -> usize {
        self.total
    }
}

/// How to build a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionScheme {
    /// `EqualBlocks(k)`: k contiguous blocks of equal size (size must divide).
    EqualBlocks(usize),
    Explicit(Vec<Vec<usize>>),
}

pub fn make_partition(
    sys: &LinearSystem,
    side: Side,
    scheme: PartitionScheme,
) -> Result<Partition> {
    let total = match side {
        Side::Row => sys.nrows(),
        Side::Col => sys.ncols(),
    };
    match scheme {
        PartitionScheme::EqualBlocks(k) => {
            if k == 0 || total % k != 0 {
                return Err(Error::InvalidPartition(format!(
                    "{k} equal blocks do not divide {total} indices"
                )));
            }
            let size = total / k;
            let blocks = (0..k)
                .map(|b| (b * size..(b + 1) * size).collect())
                .collect();
            Partition::new(side, blocks, total)
        }
        PartitionScheme::Explicit(blocks) => Partition::new(side, blocks, total),
    }
}

/// Which error the solver drives to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveMode {
    /// Iterate error `x_k - P x_0` onto the solution set (consistent systems).
    RowAction,
    /// Residual error `A x_k - b - r*`.
    ColAction,
}

impl SolveMode {
    pub fn side(self) -> Side {
        match self {
            SolveMode::RowAction => Side::Row,
            SolveMode::ColAction => Side::Col,
        }
    }
}

/// Reference targets for error reporting. Computed once via the cached SVD.
///
/// These are measurement oracles only: samplers never consult them.
#[derive(Debug, Clone)]
pub struct SolveTargets {
    mode: SolveMode,
    x0: Vector,
    projected_x0: Option<Vector>,
    r_star: Vector,
}

impl SolveTargets {
    pub fn new(sys: &LinearSystem, mode: SolveMode, x0: Vector) -> Result<Self> {
        if x0.len() != sys.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "x0 has length {}, expected {}",
                x0.len(),
                sys.ncols()
            )));
        }
        let projected_x0 = match mode {
            SolveMode::RowAction => Some(sys.solution_projection(&x0)?),
            SolveMode::ColAction => None,
        };
        Ok(Self {
            mode,
            x0,
            projected_x0,
            r_star: sys.residual_star().clone(),
        })
    }

    pub fn mode(&self) -> SolveMode {
        self.mode
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    /// `P x0`, available in row-action mode.
    pub fn projected_x0(&self) -> Option<&Vector> {
        self.projected_x0.as_ref()
    }

    pub fn r_star(&self) -> &Vector {
        &self.r_star
    }
}
