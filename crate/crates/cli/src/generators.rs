//! Named system generators plus file loading.

use rbas::linalg::{derive_seed, gaussian_matrix, gaussian_vector, rng_from_seed, Matrix};
use rbas::system::io::{load_system, FileFormat};
use rbas::system::LinearSystem;
use rbas::Vector;

use crate::config::{seed_role, SystemConfig};
use crate::CliError;

/// The 4x3 two-block demo matrix used by the certificate commands.
pub fn block_demo_matrix() -> Matrix {
    Matrix::from_row_slice(
        4,
        3,
        &[
            2.0, 1.0, 0.0, //
            -1.0, 2.0, 3.0, //
            1.0, -3.0, 6.0, //
            0.0, 1.0, -5.0,
        ],
    )
}

/// A 4x3 matrix with two nearly parallel rows; partition choice changes its
/// block-cycling rate dramatically.
pub fn near_parallel_matrix() -> Matrix {
    Matrix::from_row_slice(
        4,
        3,
        &[
            1.0, -1.0, 1.0, //
            1.0, -1.0, 1.0 + 1e-5, //
            3.0, -1.0, 3.0, //
            0.0, 1.0, 6.0,
        ],
    )
}

/// Balanced one-way design: `treatments * replicates` indicator rows, plus
/// optional Gaussian columns; `noise = 0` keeps the system consistent.
pub fn anova_system(
    treatments: usize,
    replicates: usize,
    extra_gaussian_cols: usize,
    noise: f64,
    seed: u64,
) -> Result<LinearSystem, rbas::Error> {
    let n = treatments * replicates;
    let d = treatments + extra_gaussian_cols;
    let mut rng = rng_from_seed(seed);
    let mut a = Matrix::zeros(n, d);
    for t in 0..treatments {
        for r in 0..replicates {
            a[(t * replicates + r, t)] = 1.0;
        }
    }
    if extra_gaussian_cols > 0 {
        let extra = gaussian_matrix(n, extra_gaussian_cols, &mut rng);
        a.columns_mut(treatments, extra_gaussian_cols).copy_from(&extra);
    }
    let effects = gaussian_vector(d, &mut rng);
    let mut b = &a * effects;
    if noise > 0.0 {
        b += noise * gaussian_vector(n, &mut rng);
    }
    LinearSystem::new(a, b)
}

/// Seeded Gaussian system; `rank` caps the factor width, `consistent`
/// controls whether `b` lies in the column space.
pub fn random_system(
    rows: usize,
    cols: usize,
    rank: Option<usize>,
    consistent: bool,
    seed: u64,
) -> Result<LinearSystem, rbas::Error> {
    let mut rng = rng_from_seed(seed);
    let a = match rank {
        Some(r) if r < rows.min(cols) => {
            let left = gaussian_matrix(rows, r, &mut rng);
            let right = gaussian_matrix(r, cols, &mut rng);
            left * right
        }
        _ => gaussian_matrix(rows, cols, &mut rng),
    };
    let b = if consistent {
        &a * gaussian_vector(cols, &mut rng)
    } else {
        gaussian_vector(rows, &mut rng)
    };
    LinearSystem::new(a, b)
}

fn demo_system(a: Matrix, seed: u64) -> Result<LinearSystem, rbas::Error> {
    let mut rng = rng_from_seed(seed);
    let x_star = gaussian_vector(a.ncols(), &mut rng);
    let b = &a * x_star;
    LinearSystem::new(a, b)
}

/// Builds the system named by `[system]`, or the given default when the
/// section is missing.
pub fn build_system(
    cfg: Option<&SystemConfig>,
    default: Option<&str>,
    experiment_seed: u64,
) -> Result<LinearSystem, CliError> {
    let owned;
    let cfg = match (cfg, default) {
        (Some(c), _) => c,
        (None, Some(name)) => {
            owned = SystemConfig {
                source: name.to_string(),
                matrix: None,
                rhs: None,
                size: None,
                rows: None,
                cols: None,
                rank: None,
                consistent: None,
                treatments: None,
                replicates: None,
                extra_gaussian_cols: None,
                noise: None,
                seed: None,
            };
            &owned
        }
        (None, None) => {
            return Err(CliError::Config("missing [system] section".into()));
        }
    };
    let seed = cfg
        .seed
        .unwrap_or_else(|| derive_seed(experiment_seed, seed_role::SYSTEM));
    let sys = match cfg.source.as_str() {
        "csv" | "matrix-market" => {
            let format = if cfg.source == "csv" {
                FileFormat::Csv
            } else {
                FileFormat::MatrixMarket
            };
            let matrix = cfg
                .matrix
                .as_ref()
                .ok_or_else(|| CliError::Config("file source needs 'matrix'".into()))?;
            let rhs = cfg
                .rhs
                .as_ref()
                .ok_or_else(|| CliError::Config("file source needs 'rhs'".into()))?;
            load_system(matrix, rhs, format).map_err(CliError::from_setup)?
        }
        "identity" => {
            let size = cfg.size.unwrap_or(2);
            LinearSystem::new(Matrix::identity(size, size), Vector::repeat(size, 1.0))
                .map_err(CliError::from_setup)?
        }
        "block_demo" => demo_system(block_demo_matrix(), seed).map_err(CliError::from_setup)?,
        "near_parallel" => {
            demo_system(near_parallel_matrix(), seed).map_err(CliError::from_setup)?
        }
        "anova" => anova_system(
            cfg.treatments.unwrap_or(50),
            cfg.replicates.unwrap_or(20),
            cfg.extra_gaussian_cols.unwrap_or(0),
            cfg.noise.unwrap_or(0.0),
            seed,
        )
        .map_err(CliError::from_setup)?,
        "random" => random_system(
            cfg.rows.unwrap_or(20),
            cfg.cols.unwrap_or(10),
            cfg.rank,
            cfg.consistent.unwrap_or(true),
            seed,
        )
        .map_err(CliError::from_setup)?,
        other => return Err(CliError::Config(format!("unknown system source '{other}'"))),
    };
    Ok(sys)
}
