//! Johnson-Lindenstrauss sketch ensembles for adaptive sketch-and-project.
//!
//! A distribution has the JL property with constants `(C, w)` when sketched
//! squared norms concentrate multiplicatively around true squared norms. For
//! an ensemble of `epsilon` independent sketches with embedding dimension `p`
//! above [`jl_min_embedding_dim`], the probability that every sketch
//! annihilates a fixed nonzero vector is at most `2^(-epsilon * rho)`.
//!
//! Sketches are scaled so that `E ||S^T r||^2 = ||r||^2`.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rng_from_seed, Matrix};

/// Achlioptas sketch constants `(C, w)`.
pub const ACHLIOPTAS_C: f64 = 0.23467;
pub const ACHLIOPTAS_W: f64 = 0.1127;

/// Smallest embedding dimension `p` strictly greater than
/// `(rho + 1) ln(2) / (0.999 C) * max(1/0.999, w)`.
pub fn jl_min_embedding_dim(c: f64, w: f64, rho: f64) -> Result<usize> {
    if c <= 0.0 || w <= 0.0 || rho <= 0.0 {
        return Err(Error::Invalid(format!(
            "JL constants must be positive: C={c}, w={w}, rho={rho}"
        )));
    }
    let rhs = (rho + 1.0) * std::f64::consts::LN_2 / (0.999 * c) * (1.0 / 0.999_f64).max(w);
    Ok(rhs.floor() as usize + 1)
}

/// `2^(-epsilon * rho)`: bound on the probability that all `epsilon` sketches
/// annihilate a fixed nonzero vector.
pub fn jl_failure_bound(rho: f64, epsilon: usize) -> f64 {
    2.0_f64.powf(-(epsilon as f64) * rho)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SketchDistribution {
    /// Entries `N(0, 1/p)`.
    Gaussian,
    /// Entries `{+1, 0, -1}` with probabilities `{1/6, 2/3, 1/6}`, scaled by
    /// `sqrt(3/p)`.
    Achlioptas,
}

impl std::fmt::Display for SketchDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SketchDistribution::Gaussian => write!(f, "gaussian"),
            SketchDistribution::Achlioptas => write!(f, "achlioptas"),
        }
    }
}

impl std::str::FromStr for SketchDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(SketchDistribution::Gaussian),
            "achlioptas" => Ok(SketchDistribution::Achlioptas),
            other => Err(Error::Invalid(format!("unknown sketch distribution '{other}'"))),
        }
    }
}

/// JL parameters: constants `(C, w)`, exponent `rho`, embedding dimension
/// `p`, ensemble size `epsilon`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JlParams {
    pub c: f64,
    pub w: f64,
    pub rho: f64,
    pub p: usize,
    pub epsilon: usize,
}

impl JlParams {
    /// Derives `p` via [`jl_min_embedding_dim`], so the strict inequality of
    /// the embedding bound holds (and fails for `p - 1`).
    pub fn from_constants(c: f64, w: f64, rho: f64, epsilon: usize) -> Result<Self> {
        let p = jl_min_embedding_dim(c, w, rho)?;
        Ok(Self { c, w, rho, p, epsilon })
    }

    /// The Achlioptas preset with `C = 0.23467`, `w = 0.1127`.
    pub fn achlioptas(rho: f64, epsilon: usize) -> Result<Self> {
        Self::from_constants(ACHLIOPTAS_C, ACHLIOPTAS_W, rho, epsilon)
    }

    pub fn failure_bound(&self) -> f64 {
        jl_failure_bound(self.rho, self.epsilon)
    }
}

/// A fixed family of `epsilon` independent `n x p` sketching matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchEnsemble {
    matrices: Vec<Matrix>,
    distribution: SketchDistribution,
    seed: u64,
}

impl SketchEnsemble {
    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn sketch(&self, j: usize) -> &Matrix {
        &self.matrices[j]
    }

    pub fn distribution(&self) -> SketchDistribution {
        self.distribution
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn embedding_dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.ncols())
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrices.first().map_or(0, |m| m.nrows())
    }
}

/// Draws `epsilon` independent `n x p` sketches from `distribution`,
/// reproducibly from `seed`.
pub fn draw_ensemble(
    n: usize,
    p: usize,
    epsilon: usize,
    distribution: SketchDistribution,
    seed: u64,
) -> Result<SketchEnsemble> {
    if n == 0 || p == 0 {
        return Err(Error::Invalid(format!("sketch dimensions must be positive: n={n}, p={p}")));
    }
    if epsilon == 0 {
        return Err(Error::Invalid("ensemble size must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let matrices = (0..epsilon)
        .map(|_| draw_sketch(n, p, distribution, &mut rng))
        .collect();
    Ok(SketchEnsemble {
        matrices,
        distribution,
        seed,
    })
}

fn draw_sketch<R: Rng>(n: usize, p: usize, distribution: SketchDistribution, rng: &mut R) -> Matrix {
    match distribution {
        SketchDistribution::Gaussian => {
            let scale = (1.0 / p as f64).sqrt();
            Matrix::from_fn(n, p, |_, _| {
                scale * rng.sample::<f64, _>(rand_distr::StandardNormal)
            })
        }
        SketchDistribution::Achlioptas => {
            let scale = (3.0 / p as f64).sqrt();
            Matrix::from_fn(n, p, |_, _| {
                let u: f64 = rng.random();
                if u < 1.0 / 6.0 {
                    scale
                } else if u < 1.0 / 3.0 {
                    -scale
                } else {
                    0.0
                }
            })
        }
    }
}

/// Dumps the ensemble as CSV: a metadata line, then one line per matrix with
/// column-major entries.
pub fn write_ensemble_csv(path: &Path, ensemble: &SketchEnsemble) -> Result<()> {
    let io_err = |e| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut f = File::create(path).map_err(io_err)?;
    let mut out = String::new();
    out.push_str("# rbas-sketch-ensemble v1\n");
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        ensemble.ambient_dim(),
        ensemble.embedding_dim(),
        ensemble.len(),
        ensemble.distribution,
        ensemble.seed
    ));
    for m in &ensemble.matrices {
        let fields: Vec<String> = m.as_slice().iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    f.write_all(out.as_bytes()).map_err(io_err)
}

pub fn read_ensemble_csv(path: &Path) -> Result<SketchEnsemble> {
    let io_err = |e| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut lines = BufReader::new(file).lines();
    let _comment = lines.next().transpose().map_err(io_err)?;
    let meta = lines
        .next()
        .transpose()
        .map_err(io_err)?
        .ok_or_else(|| parse_err(2, "missing metadata line".into()))?;
    let fields: Vec<&str> = meta.trim().split(',').collect();
    if fields.len() != 5 {
        return Err(parse_err(2, "metadata needs 'n,p,epsilon,distribution,seed'".into()));
    }
    let n: usize = fields[0].parse().map_err(|_| parse_err(2, "bad n".into()))?;
    let p: usize = fields[1].parse().map_err(|_| parse_err(2, "bad p".into()))?;
    let epsilon: usize = fields[2].parse().map_err(|_| parse_err(2, "bad epsilon".into()))?;
    let distribution: SketchDistribution = fields[3].parse()?;
    let seed: u64 = fields[4].parse().map_err(|_| parse_err(2, "bad seed".into()))?;
    let mut matrices = Vec::with_capacity(epsilon);
    for (k, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let values: Vec<f64> = line
            .trim()
            .split(',')
            .map(|v| v.parse().map_err(|_| parse_err(k + 3, format!("bad value '{v}'"))))
            .collect::<Result<_>>()?;
        if values.len() != n * p {
            return Err(parse_err(k + 3, format!("expected {} values, found {}", n * p, values.len())));
        }
        matrices.push(Matrix::from_column_slice(n, p, &values));
    }
    if matrices.len() != epsilon {
        return Err(parse_err(3, format!("expected {epsilon} matrices, found {}", matrices.len())));
    }
    Ok(SketchEnsemble {
        matrices,
        distribution,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gaussian_vector, rng_from_seed, Vector};

    #[test]
    fn achlioptas_preset_gives_paper_dimension() {
        assert_eq!(jl_min_embedding_dim(ACHLIOPTAS_C, ACHLIOPTAS_W, 4.0).unwrap(), 15);
    }

    #[test]
    fn embedding_dim_satisfies_strict_inequality() {
        let p = jl_min_embedding_dim(10.0, 0.1, 1.0).unwrap();
        let rhs = 2.0 * std::f64::consts::LN_2 / (0.999 * 10.0) * (1.0 / 0.999_f64).max(0.1);
        assert!((p as f64) > rhs);
        assert!(((p - 1) as f64) <= rhs);
    }

    #[test]
    fn embedding_dim_monotone_in_rho() {
        let p1 = jl_min_embedding_dim(ACHLIOPTAS_C, ACHLIOPTAS_W, 4.0).unwrap();
        let p2 = jl_min_embedding_dim(ACHLIOPTAS_C, ACHLIOPTAS_W, 8.0).unwrap();
        assert!(p2 > p1);
    }

    #[test]
    fn failure_bound_values() {
        assert!((jl_failure_bound(4.0, 20) - 2.0_f64.powi(-80)).abs() < 1e-40);
        assert_eq!(jl_failure_bound(4.0, 0), 1.0);
        let b1 = jl_failure_bound(3.0, 7);
        let b2 = jl_failure_bound(3.0, 14);
        assert!((b2 - b1 * b1).abs() <= 1e-12 * b2.abs().max(1e-300));
    }

    #[test]
    fn gaussian_ensemble_reproducible() {
        let e1 = draw_ensemble(6, 3, 4, SketchDistribution::Gaussian, 7).unwrap();
        let e2 = draw_ensemble(6, 3, 4, SketchDistribution::Gaussian, 7).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(e1.len(), 4);
        assert_eq!(e1.embedding_dim(), 3);
    }

    #[test]
    fn achlioptas_support() {
        let e = draw_ensemble(20, 5, 2, SketchDistribution::Achlioptas, 3).unwrap();
        let scale = (3.0 / 5.0_f64).sqrt();
        for m in e.matrices() {
            for &v in m.as_slice() {
                assert!(
                    v == 0.0 || (v.abs() - scale).abs() < 1e-15,
                    "unexpected entry {v}"
                );
            }
        }
    }

    #[test]
    fn isometry_in_expectation() {
        // empirical E||S^T r||^2 / ||r||^2 within [0.9, 1.1] over 1000 draws
        let mut rng = rng_from_seed(42);
        let r = {
            let v = gaussian_vector(8, &mut rng);
            &v / v.norm()
        };
        for dist in [SketchDistribution::Gaussian, SketchDistribution::Achlioptas] {
            let e = draw_ensemble(8, 15, 1000, dist, 99).unwrap();
            let mean: f64 = e
                .matrices()
                .iter()
                .map(|s| (s.transpose() * &r).norm_squared())
                .sum::<f64>()
                / 1000.0;
            assert!((0.9..=1.1).contains(&mean), "{dist}: mean {mean}");
        }
    }

    #[test]
    fn sketched_norms_never_vanish() {
        let mut rng = rng_from_seed(4);
        let r = {
            let v = gaussian_vector(10, &mut rng);
            let v: Vector = &v / v.norm();
            v
        };
        let e = draw_ensemble(10, 15, 10_000, SketchDistribution::Gaussian, 12).unwrap();
        for s in e.matrices() {
            assert!((s.transpose() * &r).norm_squared() > 1e-12);
        }
    }

    #[test]
    fn ensemble_csv_roundtrip() {
        let e = draw_ensemble(4, 3, 2, SketchDistribution::Achlioptas, 11).unwrap();
        let dir = std::env::temp_dir().join("rbas-sketch-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ens.csv");
        write_ensemble_csv(&path, &e).unwrap();
        let back = read_ensemble_csv(&path).unwrap();
        assert_eq!(e, back);
    }
}
