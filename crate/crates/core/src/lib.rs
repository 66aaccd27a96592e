//! Randomized block adaptive solvers (RBAS) for linear systems.
//!
//! This crate implements the two archetype iteration families for solving
//! `Ax = b` (row-action, Kaczmarz-style) and `min ||Ax - b||` (column-action,
//! coordinate-descent-style), a registry of sampling strategies that decide
//! which rows, columns, blocks, or sketches the next projection uses, and the
//! diagnostic machinery that certifies worst-case contraction rates for such
//! solvers:
//!
//! - [`linalg`]: dense kernels (pseudo-inverse application, orthonormal bases,
//!   Haar basis sampling, Gram determinants, incremental span tracking).
//! - [`system`]: the problem container `(A, b)` with rank/consistency
//!   metadata, reference targets for error reporting, partitions, and
//!   MatrixMarket/CSV ingestion.
//! - [`samplers`]: the selection procedures behind one `Sampler` interface,
//!   from cyclic sweeps to greedy scores, weighted draws, random block
//!   permutations, Gaussian sketches, and streamed equations.
//! - [`engine`]: the projection iteration itself, progress flags, stopping
//!   -time diagnostics, and solve histories.
//! - [`meany`]: block Meany constants, sup-over-bases estimation, and
//!   worst-case rates for partition-cycling methods.
//! - [`sketch`]: Johnson-Lindenstrauss sketch ensembles (Gaussian and
//!   Achlioptas) with embedding-dimension and failure-probability bounds.
//!
//! All randomness flows through seeded ChaCha8 generators so every experiment
//! replays bit-exactly from its seed.

pub mod engine;
pub mod error;
pub mod linalg;
pub mod meany;
pub mod samplers;
pub mod sketch;
pub mod system;

pub use error::{Error, Result};
pub use linalg::{Matrix, OrthonormalBasis, SpanTracker, Vector};
pub use system::{LinearSystem, Partition, Side, SolveMode, SolveTargets};
