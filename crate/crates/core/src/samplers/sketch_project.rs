//! Adaptive sketch-and-project over a fixed JL sketch ensemble.
//!
//! A fixed family `S_1..S_epsilon` of `n x p` sketches is drawn once; each
//! step scores every sketch by the squared norm of the sketched residual in
//! the projection metric,
//! `f_j(x) = r^T S_j (S_j^T A A^T S_j)^+ S_j^T r`,
//! and projects with the maximizer. Non-identity inner products are handled
//! by pre-transforming the system (see [`pretransform_system`]).

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::sketch::{draw_ensemble, SketchEnsemble};
use crate::system::{LinearSystem, SolveMode};

use super::{argmax, Sampler, SamplerState, Selector, SketchProjectParams};

/// Per-sketch cached factors of `M_j = S_j^T A`: with the thin SVD
/// `M = U S V^T`, the score is `||S^{-1} U^T t||^2` for `t = S_j^T r`.
struct SketchCache {
    u: Matrix,       // p x k
    inv_sigma: Vector, // k
}

pub struct AdaptiveSketchProject {
    ensemble: SketchEnsemble,
    caches: Vec<SketchCache>,
}

impl AdaptiveSketchProject {
    pub fn new(sys: &LinearSystem, params: &SketchProjectParams, seed: u64) -> Result<Self> {
        if params.epsilon == 0 || params.embedding_dim == 0 {
            return Err(Error::InvalidSpec(
                "sketch ensemble needs epsilon >= 1 and embedding_dim >= 1".into(),
            ));
        }
        let ensemble = draw_ensemble(
            sys.nrows(),
            params.embedding_dim,
            params.epsilon,
            params.distribution,
            seed,
        )?;
        let caches = ensemble
            .matrices()
            .iter()
            .map(|s| {
                let m = s.transpose() * sys.matrix();
                let f = crate::linalg::svd_factor(&m);
                let rank = f.rank(crate::linalg::DEFAULT_RANK_TOL);
                let u = f.u.columns(0, rank).into_owned();
                let inv_sigma = Vector::from_iterator(rank, f.s.iter().take(rank).map(|v| 1.0 / v));
                SketchCache { u, inv_sigma }
            })
            .collect();
        Ok(Self { ensemble, caches })
    }

    fn score(&self, j: usize, r: &Vector) -> f64 {
        let t = self.ensemble.sketch(j).transpose() * r;
        let mut z = self.caches[j].u.transpose() * t;
        for i in 0..z.len() {
            z[i] *= self.caches[j].inv_sigma[i];
        }
        z.norm_squared()
    }
}

impl Sampler for AdaptiveSketchProject {
    fn mode(&self) -> SolveMode {
        SolveMode::RowAction
    }

    fn next(&mut self, _sys: &LinearSystem, _x: &Vector, r: &Vector) -> Result<Selector> {
        let j = argmax((0..self.ensemble.len()).map(|j| self.score(j, r)))
            .expect("ensemble is nonempty");
        Ok(Selector::dense_rows(self.ensemble.sketch(j).clone())?.with_tag(j as u32))
    }

    fn state(&self) -> SamplerState {
        SamplerState::SketchEnsemble {
            size: self.ensemble.len() as u32,
        }
    }
}

/// The sketch-and-project selection score
/// `f_j(x) = (Ax - b)^T S_j (S_j^T A A^T S_j)^+ S_j^T (Ax - b) >= 0`.
pub fn sketch_project_score(x: &Vector, s_j: &Matrix, sys: &LinearSystem) -> Result<f64> {
    if s_j.nrows() != sys.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "sketch has {} rows, system has {}",
            s_j.nrows(),
            sys.nrows()
        )));
    }
    let r = sys.residual(x);
    let t = s_j.transpose() * &r;
    let m = s_j.transpose() * sys.matrix();
    let gram = &m * m.transpose();
    let z = crate::linalg::pinv_apply(&gram, &t)?;
    Ok(t.dot(&z).max(0.0))
}

/// Validates that `b_matrix` is symmetric positive definite (via Cholesky)
/// and returns the transformed system `A B^{-1/2}` together with
/// `(B^{-1/2}, B^{1/2})` for mapping iterates: `x = B^{1/2} z`.
pub fn pretransform_system(
    sys: &LinearSystem,
    b_matrix: &Matrix,
) -> Result<(LinearSystem, Matrix, Matrix)> {
    let d = sys.ncols();
    if b_matrix.shape() != (d, d) {
        return Err(Error::NotSpd(format!(
            "expected a {d}x{d} matrix, got {}x{}",
            b_matrix.nrows(),
            b_matrix.ncols()
        )));
    }
    let sym_err = (b_matrix - b_matrix.transpose()).norm();
    if sym_err > 1e-10 * b_matrix.norm().max(1.0) {
        return Err(Error::NotSpd(format!("asymmetry {sym_err}")));
    }
    if nalgebra::linalg::Cholesky::new(b_matrix.clone()).is_none() {
        return Err(Error::NotSpd("Cholesky factorization failed".into()));
    }
    let eig = SymmetricEigen::new(b_matrix.clone());
    let mut inv_sqrt = Matrix::zeros(d, d);
    let mut sqrt = Matrix::zeros(d, d);
    for i in 0..d {
        let lam = eig.eigenvalues[i];
        if lam <= 0.0 {
            return Err(Error::NotSpd(format!("eigenvalue {lam} is not positive")));
        }
        let v = eig.eigenvectors.column(i);
        let vvt = v * v.transpose();
        inv_sqrt += vvt.clone() / lam.sqrt();
        sqrt += vvt * lam.sqrt();
    }
    let transformed = LinearSystem::new(sys.matrix() * &inv_sqrt, sys.rhs().clone())?;
    Ok((transformed, inv_sqrt, sqrt))
}
