//! Dense numerical kernels the rest of the crate builds on.
//!
//! Matrices are nalgebra [`DMatrix`]/[`DVector`] values (column-major
//! storage). Factorization-backed operations (pseudo-inverse application,
//! rank detection, orthonormal bases) treat singular values below
//! `1e-12 * sigma_max` as zero unless a tolerance is passed explicitly.
//!
//! All randomness in the crate flows through [`rng_from_seed`] (ChaCha8
//! seeded from a `u64`), so identical seeds replay bit-exactly.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative threshold below which singular values count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Tolerance for orthonormality checks and span membership.
pub const ORTHO_TOL: f64 = 1e-10;

/// The crate-wide seedable generator: ChaCha8, seeded from a `u64`.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a per-task seed from a base seed and an index. Decorrelated via
/// splitmix64 so per-sample work is schedule-independent.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// Rejects NaN/Inf entries.
pub fn check_finite(m: &Matrix) -> Result<()> {
    for col in 0..m.ncols() {
        for row in 0..m.nrows() {
            if !m[(row, col)].is_finite() {
                return Err(Error::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

pub fn check_finite_vector(v: &Vector) -> Result<()> {
    for (row, x) in v.iter().enumerate() {
        if !x.is_finite() {
            return Err(Error::NonFinite { row, col: 0 });
        }
    }
    Ok(())
}

/// Fills an `nr x nc` matrix with independent standard normal entries.
pub fn gaussian_matrix<R: Rng>(nr: usize, nc: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(nr, nc, |_, _| rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng>(n: usize, rng: &mut R) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Thin singular value decomposition, `A = U diag(S) V^T` with `U: n x k`,
/// `S: k`, `V_t: k x d`, `k = min(n, d)`, singular values sorted descending.
/// Columns of `U` paired with zero singular values are zero vectors.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Matrix,
    pub s: Vector,
    pub v_t: Matrix,
}

impl SvdFactors {
    pub fn sigma_max(&self) -> f64 {
        if self.s.is_empty() {
            0.0
        } else {
            self.s[0]
        }
    }

    /// Count of singular values above `tol * sigma_max`.
    pub fn rank(&self, tol: f64) -> usize {
        let sm = self.sigma_max();
        if sm <= 0.0 {
            return 0;
        }
        self.s.iter().filter(|&&v| v > tol * sm).count()
    }

    /// Minimum-norm least-squares solution of `A z ~ b`, zeroing singular
    /// values at or below `tol * sigma_max`.
    pub fn pinv_apply(&self, b: &Vector, tol: f64) -> Vector {
        let sm = self.sigma_max();
        let mut t = self.u.transpose() * b;
        for i in 0..t.len() {
            if sm > 0.0 && self.s[i] > tol * sm {
                t[i] /= self.s[i];
            } else {
                t[i] = 0.0;
            }
        }
        self.v_t.transpose() * t
    }
}

/// Computes the thin SVD via Householder QR followed by a one-sided Jacobi
/// sweep on the small triangular factor. Jacobi handles exactly singular
/// matrices cleanly, which matters here: rank-deficient systems are routine
/// inputs.
pub fn svd_factor(a: &Matrix) -> SvdFactors {
    let (n, d) = a.shape();
    if n == 0 || d == 0 {
        return SvdFactors {
            u: Matrix::zeros(n, 0),
            s: Vector::zeros(0),
            v_t: Matrix::zeros(0, d),
        };
    }
    if n < d {
        let f = svd_factor(&a.transpose());
        return SvdFactors {
            u: f.v_t.transpose(),
            s: f.s,
            v_t: f.u.transpose(),
        };
    }
    let qr = a.clone().qr();
    let q = qr.q();
    let r = qr.r();
    let (u_small, s, v) = jacobi_svd_square(&r);
    SvdFactors {
        u: q * u_small,
        s,
        v_t: v.transpose(),
    }
}

/// One-sided Jacobi SVD of a square matrix: returns `(U, S, V)` with
/// `M = U diag(S) V^T`, values sorted descending, zero-singular-value
/// columns of `U` set to zero.
fn jacobi_svd_square(m: &Matrix) -> (Matrix, Vector, Matrix) {
    let d = m.ncols();
    let mut w = m.clone();
    let mut v = Matrix::identity(d, d);
    let conv_tol = 1e-15;
    let max_sweeps = 60;
    for _ in 0..max_sweeps {
        let mut rotated = false;
        for p in 0..d.saturating_sub(1) {
            for q in p + 1..d {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if alpha <= 0.0 || beta <= 0.0 {
                    continue;
                }
                if gamma.abs() <= conv_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..d {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    let mut norms: Vec<f64> = (0..d).map(|j| w.column(j).norm()).collect();
    // values so small their squares underflow are numerically zero; keeping
    // them would produce badly normalized u columns
    let floor = norms.iter().cloned().fold(0.0, f64::max) * 1e-140;
    for n in norms.iter_mut() {
        if *n <= floor {
            *n = 0.0;
        }
    }
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    let mut u = Matrix::zeros(d, d);
    let mut s = Vector::zeros(d);
    let mut v_sorted = Matrix::zeros(d, d);
    for (slot, &j) in order.iter().enumerate() {
        s[slot] = norms[j];
        if norms[j] > 0.0 {
            let col = w.column(j) / norms[j];
            u.column_mut(slot).copy_from(&col);
        }
        v_sorted.column_mut(slot).copy_from(&v.column(j));
    }
    (u, s, v_sorted)
}

/// Applies the pseudo-inverse: the minimum-norm least-squares solution of
/// `M z ~ r`, with singular values below `DEFAULT_RANK_TOL * sigma_max`
/// treated as zero. An all-zero `M` yields the zero vector.
pub fn pinv_apply(m: &Matrix, r: &Vector) -> Result<Vector> {
    if r.len() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "pinv_apply: matrix is {}x{} but rhs has length {}",
            m.nrows(),
            m.ncols(),
            r.len()
        )));
    }
    Ok(svd_factor(m).pinv_apply(r, DEFAULT_RANK_TOL))
}

/// Numerical rank of `M` at relative tolerance `tol`.
pub fn numerical_rank(m: &Matrix, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    svd_factor(m).rank(tol)
}

/// A set of pairwise-orthonormal vectors in a common ambient space, stored as
/// the columns of a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    q: Matrix,
}

impl OrthonormalBasis {
    /// Validates orthonormality: every column has unit norm within `1e-10`
    /// and pairwise dot products are within `1e-10` of zero.
    pub fn new(q: Matrix) -> Result<Self> {
        for j in 0..q.ncols() {
            let nj = q.column(j).norm();
            if (nj - 1.0).abs() > ORTHO_TOL {
                return Err(Error::Invalid(format!(
                    "basis column {j} has norm {nj}, expected 1"
                )));
            }
            for i in 0..j {
                let dot = q.column(i).dot(&q.column(j));
                if dot.abs() > ORTHO_TOL {
                    return Err(Error::Invalid(format!(
                        "basis columns {i} and {j} have dot product {dot}"
                    )));
                }
            }
        }
        Ok(Self { q })
    }

    /// For outputs whose orthonormality is guaranteed by construction.
    pub(crate) fn from_matrix_unchecked(q: Matrix) -> Self {
        Self { q }
    }

    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            q: Matrix::zeros(ambient_dim, 0),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.q.nrows()
    }

    /// Number of basis vectors.
    pub fn len(&self) -> usize {
        self.q.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.q.ncols() == 0
    }

    pub fn matrix(&self) -> &Matrix {
        &self.q
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_column_slice(self.q.column(j).as_slice())
    }

    pub fn columns(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.len()).map(move |j| self.column(j))
    }

    /// Orthogonal projection of `v` onto the span: `Q (Q^T v)`.
    pub fn project(&self, v: &Vector) -> Vector {
        if self.is_empty() {
            return Vector::zeros(self.ambient_dim());
        }
        &self.q * (self.q.transpose() * v)
    }
}

/// Orthonormal basis of the column space of `M`; the number of vectors equals
/// the numerical rank of `M` at relative tolerance `tol`.
pub fn orthonormal_basis(m: &Matrix, tol: f64) -> Result<OrthonormalBasis> {
    if tol <= 0.0 {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    if m.ncols() == 0 {
        return Ok(OrthonormalBasis::empty(m.nrows()));
    }
    let f = svd_factor(m);
    let rank = f.rank(tol);
    Ok(OrthonormalBasis::from_matrix_unchecked(
        f.u.columns(0, rank).into_owned(),
    ))
}

/// A Haar-distributed orthogonal `k x k` matrix: QR of a Gaussian matrix with
/// the R-diagonal sign correction.
pub fn haar_orthogonal<R: Rng>(k: usize, rng: &mut R) -> Matrix {
    let qr = gaussian_matrix(k, k, rng).qr();
    let r_diag: Vec<f64> = (0..k).map(|i| qr.r()[(i, i)]).collect();
    let mut q = qr.q();
    for (j, d) in r_diag.iter().enumerate() {
        if *d < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// A Haar-uniform rotation of `basis` within its own span: draw a Gaussian
/// square matrix of the basis dimension, QR it, apply the Q factor to the
/// basis coordinates. Deterministic under `seed`.
pub fn random_orthonormal_basis(basis: &OrthonormalBasis, seed: u64) -> OrthonormalBasis {
    if basis.is_empty() {
        return basis.clone();
    }
    let mut rng = rng_from_seed(seed);
    let rot = haar_orthogonal(basis.len(), &mut rng);
    OrthonormalBasis::from_matrix_unchecked(basis.matrix() * rot)
}

/// `det(G^T G) >= 0` via the squared product of the R diagonal from a QR
/// factorization of `G`.
pub fn gram_det(g: &Matrix) -> f64 {
    let (nr, nc) = g.shape();
    if nc == 0 {
        return 1.0;
    }
    if nc > nr {
        // more columns than the ambient dimension: always singular
        return 0.0;
    }
    let qr = g.clone().qr();
    let mut det = 1.0;
    for i in 0..nc {
        let d = qr.r()[(i, i)];
        det *= d * d;
    }
    det
}

/// Incrementally grown orthonormal basis with span-membership queries.
///
/// `contains` is true iff `||v - Q Q^T v|| <= tol * ||v||` (a zero vector is
/// always contained); `insert` is a no-op for already-contained vectors.
#[derive(Debug, Clone)]
pub struct SpanTracker {
    ambient_dim: usize,
    basis: Matrix,
    tol: f64,
}

impl SpanTracker {
    pub fn new(ambient_dim: usize, tol: f64) -> Self {
        Self {
            ambient_dim,
            basis: Matrix::zeros(ambient_dim, 0),
            tol,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> OrthonormalBasis {
        OrthonormalBasis::from_matrix_unchecked(self.basis.clone())
    }

    fn residual(&self, v: &Vector) -> Vector {
        if self.basis.ncols() == 0 {
            return v.clone();
        }
        // two Gram-Schmidt passes keep the stored basis orthonormal
        let mut w = v - &self.basis * (self.basis.transpose() * v);
        w -= &self.basis * (self.basis.transpose() * &w);
        w
    }

    pub fn contains(&self, v: &Vector) -> bool {
        assert_eq!(v.len(), self.ambient_dim, "span query dimension mismatch");
        let nv = v.norm();
        if nv == 0.0 {
            return true;
        }
        self.residual(v).norm() <= self.tol * nv
    }

    /// Inserts `v` unless already contained. Returns true when the basis grew.
    pub fn insert(&mut self, v: &Vector) -> bool {
        assert_eq!(v.len(), self.ambient_dim, "span insert dimension mismatch");
        let nv = v.norm();
        if nv == 0.0 {
            return false;
        }
        let w = self.residual(v);
        if w.norm() <= self.tol * nv {
            return false;
        }
        debug_assert!(self.basis.ncols() < self.ambient_dim);
        let w = &w / w.norm();
        let mut grown = Matrix::zeros(self.ambient_dim, self.basis.ncols() + 1);
        grown.columns_mut(0, self.basis.ncols()).copy_from(&self.basis);
        grown.column_mut(self.basis.ncols()).copy_from(&w);
        self.basis = grown;
        true
    }
}
