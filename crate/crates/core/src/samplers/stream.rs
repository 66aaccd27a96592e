//! Streamed equations: i.i.d. mixtures of a base consistent system.
//!
//! The built-in source draws a fresh Gaussian `n x p` mixing matrix `W` per
//! step and exposes the pair `alpha = A^T W`, `beta = W^T b`. Every member of
//! the solution set satisfies `alpha^T x = beta` exactly by linearity, so the
//! stream preserves consistency. User-defined distributions implement
//! [`super::Sampler`] directly.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, rng_from_seed, Matrix, Vector};
use crate::system::{LinearSystem, SolveMode};

use super::{Sampler, SamplerState, Selector};

/// Infinite i.i.d. stream of `(alpha, beta)` pairs from Gaussian mixing of a
/// base consistent system.
pub struct GaussianMixStream {
    a: Matrix,
    b: Vector,
    width: usize,
    rng: ChaCha8Rng,
}

impl GaussianMixStream {
    pub fn new(base: &LinearSystem, width: usize, seed: u64) -> Result<Self> {
        if !base.is_consistent() {
            return Err(Error::InconsistentSystem);
        }
        if width == 0 {
            return Err(Error::Invalid("stream width must be >= 1".into()));
        }
        Ok(Self {
            a: base.matrix().clone(),
            b: base.rhs().clone(),
            width,
            rng: rng_from_seed(seed),
        })
    }

    /// The next mixing matrix and its induced `(alpha, beta)` pair.
    pub fn next_draw(&mut self) -> (Matrix, Matrix, Vector) {
        let w = linalg::gaussian_matrix(self.a.nrows(), self.width, &mut self.rng);
        let alpha = self.a.transpose() * &w;
        let beta = w.transpose() * &self.b;
        (w, alpha, beta)
    }
}

impl Iterator for GaussianMixStream {
    type Item = (Matrix, Vector);

    fn next(&mut self) -> Option<Self::Item> {
        let (_, alpha, beta) = self.next_draw();
        Some((alpha, beta))
    }
}

/// Iterator of i.i.d. `(alpha, beta) = (A^T W, W^T b)` pairs with `W` an
/// `n x p` standard Gaussian, seeded and reproducible.
pub fn streaming_source(
    base: &LinearSystem,
    block_width: usize,
    seed: u64,
) -> Result<GaussianMixStream> {
    GaussianMixStream::new(base, block_width, seed)
}

/// Row-action sampler backed by the built-in Gaussian stream. The selector is
/// the mixing matrix itself, so the engine's update coincides with the
/// streamed update `x' = x - alpha (alpha^T alpha)^+ (alpha^T x - beta)`.
pub struct StreamingSampler {
    width: usize,
    cursor: u64,
    max_draws: Option<u64>,
    rng: ChaCha8Rng,
    n: usize,
}

impl StreamingSampler {
    pub fn new(
        base: &LinearSystem,
        width: usize,
        seed: u64,
        max_draws: Option<u64>,
    ) -> Result<Self> {
        if !base.is_consistent() {
            return Err(Error::InconsistentSystem);
        }
        Ok(Self {
            width,
            cursor: 0,
            max_draws,
            rng: rng_from_seed(seed),
            n: base.nrows(),
        })
    }
}

impl Sampler for StreamingSampler {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, _r: &Vector) -> Result<Selector> {
        if let Some(budget) = self.max_draws {
            if self.cursor >= budget {
                return Err(Error::StreamExhausted(budget));
            }
        }
        self.cursor += 1;
        Selector::dense_rows(linalg::gaussian_matrix(self.n, self.width, &mut self.rng))
    }

    fn state(&self) -> SamplerState {
        SamplerState::StreamCursor { position: self.cursor }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_matrix, gaussian_vector, rng_from_seed};

    fn consistent_system(seed: u64, n: usize, d: usize) -> (LinearSystem, Vector) {
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(n, d, &mut rng);
        let x_true = gaussian_vector(d, &mut rng);
        let b = &a * &x_true;
        (LinearSystem::new(a, b).unwrap(), x_true)
    }

    #[test]
    fn stream_preserves_consistency() {
        let (sys, x_true) = consistent_system(5, 6, 3);
        let stream = streaming_source(&sys, 2, 9).unwrap();
        for (alpha, beta) in stream.take(100) {
            let lhs = alpha.transpose() * &x_true;
            let err = (&lhs - &beta).norm();
            assert!(
                err <= 1e-9 * (alpha.norm() * x_true.norm() + beta.norm()),
                "stream violated consistency: {err}"
            );
        }
    }

    #[test]
    fn width_one_matches_vector_stream_shape() {
        let (sys, _) = consistent_system(6, 4, 3);
        let mut stream = streaming_source(&sys, 1, 3).unwrap();
        let (alpha, beta) = stream.next().unwrap();
        assert_eq!(alpha.shape(), (3, 1));
        assert_eq!(beta.len(), 1);
    }

    #[test]
    fn fixed_seed_replays_identically() {
        let (sys, _) = consistent_system(7, 4, 2);
        let s1: Vec<_> = streaming_source(&sys, 2, 42).unwrap().take(5).collect();
        let s2: Vec<_> = streaming_source(&sys, 2, 42).unwrap().take(5).collect();
        assert_eq!(s1, s2);
    }

    #[test]
    fn inconsistent_base_is_rejected() {
        let a = Matrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = Vector::from_column_slice(&[0.0, 1.0]);
        let sys = LinearSystem::new(a, b).unwrap();
        assert!(streaming_source(&sys, 1, 0).is_err());
    }

    #[test]
    fn exhausted_budget_errors() {
        let (sys, _) = consistent_system(8, 3, 2);
        let mut s = StreamingSampler::new(&sys, 1, 0, Some(2)).unwrap();
        let x = Vector::zeros(2);
        let r = sys.residual(&x);
        assert!(s.next(&sys, &x, &r).is_ok());
        assert!(s.next(&sys, &x, &r).is_ok());
        assert!(matches!(
            s.next(&sys, &x, &r),
            Err(Error::StreamExhausted(2))
        ));
    }
}
