//! The projection iteration: row-action and column-action updates, progress
//! flags, stopping-time diagnostics, and history recording.
//!
//! Both update families contract a common error vector `y` by orthogonal
//! projections: `y' = (I - P) y`. Row-action methods track
//! `y = x - P x0` (distance to the nearest solution); column-action methods
//! track `y = (A x - b) - r*` (excess residual). Each step therefore
//! satisfies the Pythagorean split `||y||^2 - ||y'||^2 = ||y - y'||^2`.
//!
//! The stopping time `nu(j)` is the first window length after `j` at which
//! the error vector lies in the sum of the realized projection column spaces
//! (the iterates differ from `y_j` only by members of that sum, so testing
//! the current iterate is equivalent). Once it fires, the window's certified
//! contraction applies. Checkpoints `tau_{j+1} = tau_j + nu(tau_j) + 1`
//! chain these windows; the observed per-window contraction accompanies
//! each.

use std::io::Write;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::linalg::{self, OrthonormalBasis, SpanTracker, Vector};
use crate::samplers::{Sampler, Selector, SelectorKind};
use crate::system::{LinearSystem, SolveMode, SolveTargets};

/// Default tolerance for the progress flag: a step counts as productive when
/// it moves the iterate (row) or the residual (col) by more than
/// `1e-12 * max(1, ||current||)`.
pub const CHI_TOL: f64 = 1e-12;

/// Correction computed by a row-action step; `x' = x - delta`.
fn row_delta(sys: &LinearSystem, r: &Vector, sel: &Selector) -> Result<Vector> {
    match &sel.kind {
        SelectorKind::RowIndices(ix) => {
            if ix.iter().any(|&i| i >= sys.nrows()) {
                return Err(Error::DimensionMismatch("row index out of bounds".into()));
            }
            let block = sys.row_block(ix);
            let r_block = Vector::from_iterator(ix.len(), ix.iter().map(|&i| r[i]));
            linalg::pinv_apply(&block, &r_block)
        }
        SelectorKind::DenseRows(w) => {
            if w.nrows() != sys.nrows() {
                return Err(Error::DimensionMismatch(format!(
                    "dense row selector has {} rows, system has {}",
                    w.nrows(),
                    sys.nrows()
                )));
            }
            let mixed = w.transpose() * sys.matrix();
            let r_mixed = w.transpose() * r;
            linalg::pinv_apply(&mixed, &r_mixed)
        }
        _ => Err(Error::Invalid("row step needs a row-side selector".into())),
    }
}

/// `x' = x - A^T W (W^T A A^T W)^+ W^T (A x - b)`. Index selectors use the
/// extracted row block directly; `W` is never materialized.
pub fn row_step(sys: &LinearSystem, x: &Vector, sel: &Selector) -> Result<Vector> {
    let r = sys.residual(x);
    let delta = row_delta(sys, &r, sel)?;
    Ok(x - delta)
}

/// Correction for a column-action step; `x' = x - delta`.
fn col_delta(sys: &LinearSystem, r: &Vector, sel: &Selector) -> Result<Vector> {
    match &sel.kind {
        SelectorKind::ColIndices(ix) => {
            if ix.iter().any(|&j| j >= sys.ncols()) {
                return Err(Error::DimensionMismatch("column index out of bounds".into()));
            }
            let block = sys.col_block(ix);
            let v = linalg::pinv_apply(&block, r)?;
            let mut delta = Vector::zeros(sys.ncols());
            for (k, &j) in ix.iter().enumerate() {
                delta[j] = v[k];
            }
            Ok(delta)
        }
        SelectorKind::DenseCols(w) => {
            if w.nrows() != sys.ncols() {
                return Err(Error::DimensionMismatch(format!(
                    "dense column selector has {} rows, system has {} columns",
                    w.nrows(),
                    sys.ncols()
                )));
            }
            let mixed = sys.matrix() * w;
            let v = linalg::pinv_apply(&mixed, r)?;
            Ok(w * v)
        }
        _ => Err(Error::Invalid("column step needs a column-side selector".into())),
    }
}

/// `x' = x - W (W^T A^T A W)^+ W^T A^T (A x - b)`: the least-squares optimum
/// over the selected coordinate directions.
pub fn col_step(sys: &LinearSystem, x: &Vector, sel: &Selector) -> Result<Vector> {
    let r = sys.residual(x);
    let delta = col_delta(sys, &r, sel)?;
    Ok(x - delta)
}

/// The common-formulation error: `x - P x0` in row mode, `A x - b - r*` in
/// column mode.
pub fn error_vector(targets: &SolveTargets, x: &Vector, sys: &LinearSystem) -> Result<Vector> {
    match targets.mode() {
        SolveMode::RowAction => {
            let px0 = targets
                .projected_x0()
                .ok_or(Error::InconsistentSystem)?;
            Ok(x - px0)
        }
        SolveMode::ColAction => Ok(sys.residual(x) - targets.r_star()),
    }
}

/// Termination criteria; the run stops at the first one satisfied.
#[derive(Debug, Clone)]
pub struct StopCriteria {
    pub max_iter: usize,
    /// Threshold on the squared error `||y_k||^2`.
    pub error_tol: f64,
    pub max_seconds: Option<f64>,
}

impl StopCriteria {
    pub fn max_iter(max_iter: usize) -> Self {
        Self {
            max_iter,
            error_tol: 0.0,
            max_seconds: None,
        }
    }

    pub fn with_error_tol(mut self, tol: f64) -> Self {
        self.error_tol = tol;
        self
    }

    pub fn with_max_seconds(mut self, secs: f64) -> Self {
        self.max_seconds = Some(secs);
        self
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Record an orthonormal basis of each productive step's projection space
    /// (needed by the contraction-certificate checks; costs an SVD per step).
    pub record_bases: bool,
    /// Keep the full sequence of error vectors `y_k`.
    pub record_iterates: bool,
    /// Track nu/tau stopping times (on by default).
    pub track_nu: bool,
    /// Window cap before the nu tracker reports "not yet detected".
    /// Defaults to `50 * rank`.
    pub nu_horizon: Option<usize>,
    /// Recompute the residual from scratch every this many steps.
    pub revalidate_every: usize,
    /// Progress-flag gate.
    pub chi_tol: f64,
    /// Span-membership tolerance for nu detection.
    pub span_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            record_bases: false,
            record_iterates: false,
            track_nu: true,
            nu_horizon: None,
            revalidate_every: 1000,
            chi_tol: CHI_TOL,
            span_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    ErrorTol,
    MaxIter,
    MaxSeconds,
}

#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub k: usize,
    /// `||y_k||^2` before the step.
    pub error_sq: f64,
    pub chi: bool,
    pub selector: String,
    /// Number of k' <= k whose selector differs from its predecessor.
    pub selector_changes: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct NuRecord {
    pub j: usize,
    /// `None` when the horizon was exceeded before detection.
    pub nu: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct TauPoint {
    pub j: usize,
    pub tau: usize,
    /// Observed ratio `||y_{tau_{j+1}}||^2 / ||y_{tau_j}||^2`; `None` for the
    /// final checkpoint.
    pub gamma_observed: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolveHistory {
    pub records: Vec<IterationRecord>,
    pub final_error_sq: f64,
    pub final_x: Vector,
    pub stop: StopReason,
    pub tau_points: Vec<TauPoint>,
    pub nu_records: Vec<NuRecord>,
    /// Per step: basis of the realized projection space (productive steps
    /// only), when `record_bases` was set.
    pub realized_bases: Vec<Option<OrthonormalBasis>>,
    /// The error vectors `y_0..y_K`, when `record_iterates` was set.
    pub iterates: Vec<Vector>,
}

impl SolveHistory {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Squared errors `||y_0||^2, ..., ||y_K||^2` (length iterations + 1).
    pub fn error_sq_trace(&self) -> Vec<f64> {
        let mut t: Vec<f64> = self.records.iter().map(|r| r.error_sq).collect();
        t.push(self.final_error_sq);
        t
    }

    /// CSV dump: schema comment, header, one row per iteration.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "# rbas-history v1")?;
        writeln!(out, "k,error_sq,chi,selector,selector_changes")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:?},{},{},{}",
                r.k, r.error_sq, r.chi as u8, r.selector, r.selector_changes
            )?;
        }
        Ok(())
    }
}

/// The checkpoint schedule with observed contractions.
pub fn tau_schedule(history: &SolveHistory) -> &[TauPoint] {
    &history.tau_points
}

/// Stopping time `nu(j)` from a recorded trajectory: the first `k >= 0` such
/// that `y_j` lies in the sum of the realized projection column spaces of
/// steps `j..=j+k`. `realized[i]` is the basis of step `i`'s projection
/// space (`None` for unproductive steps, which contribute nothing).
/// Membership is tested on `y_{j+k+1}`, which is equivalent because the
/// iterates differ from `y_j` by members of the pooled space. Returns `None`
/// past the horizon.
pub fn track_nu(
    ys: &[Vector],
    realized: &[Option<OrthonormalBasis>],
    j: usize,
    span_tol: f64,
    horizon: usize,
) -> Option<usize> {
    assert!(j < ys.len());
    assert_eq!(realized.len() + 1, ys.len());
    let ambient = ys[0].len();
    let mut pooled = SpanTracker::new(ambient, span_tol);
    for k in j..ys.len() - 1 {
        if k - j > horizon {
            return None;
        }
        if let Some(basis) = &realized[k] {
            for col in basis.columns() {
                pooled.insert(&col);
            }
        }
        if pooled.contains(&ys[k + 1]) {
            return Some(k - j);
        }
    }
    None
}

/// Basis of the projection space a selector realizes: `col(A^T W)` for row
/// selectors, `col(A W)` for column selectors.
pub fn realized_projection_basis(sys: &LinearSystem, sel: &Selector) -> Result<OrthonormalBasis> {
    let m = match &sel.kind {
        SelectorKind::RowIndices(ix) => sys.row_block(ix).transpose(),
        SelectorKind::DenseRows(w) => sys.matrix().transpose() * w,
        SelectorKind::ColIndices(ix) => sys.col_block(ix),
        SelectorKind::DenseCols(w) => sys.matrix() * w,
    };
    linalg::orthonormal_basis(&m, 1e-10)
}

/// Runs the iteration until a stopping criterion fires, recording history,
/// progress flags, and the nu/tau diagnostics.
pub fn run(
    sys: &LinearSystem,
    sampler: &mut dyn Sampler,
    x0: &Vector,
    stop: &StopCriteria,
    opts: &RunOptions,
) -> Result<SolveHistory> {
    let mode = sampler.mode();
    let targets = SolveTargets::new(sys, mode, x0.clone())?;
    let start = Instant::now();

    let mut x = x0.clone();
    let mut r = sys.residual(&x);
    let y_of = |x: &Vector, r: &Vector| -> Vector {
        match mode {
            SolveMode::RowAction => x - targets.projected_x0().expect("row mode has a target"),
            SolveMode::ColAction => r - targets.r_star(),
        }
    };
    let y0 = y_of(&x, &r);
    let mut err_sq = y0.norm_squared();

    let horizon = opts
        .nu_horizon
        .unwrap_or_else(|| 50 * sys.rank().max(1));
    // pooled span of the realized projection spaces since the last checkpoint
    let mut pooled = SpanTracker::new(y0.len(), opts.span_tol);
    let mut tau_current = 0usize;
    let mut tau_trace: Vec<(usize, f64)> = vec![(0, err_sq)];
    let mut nu_records = Vec::new();
    let mut schedule_active = opts.track_nu;

    let mut records = Vec::new();
    let mut realized_bases = Vec::new();
    let mut iterates = Vec::new();
    if opts.record_iterates {
        iterates.push(y0);
    }
    let mut prev_summary: Option<String> = None;
    let mut changes = 0usize;

    let stop_reason;
    let mut k = 0usize;
    loop {
        if err_sq <= stop.error_tol {
            stop_reason = StopReason::ErrorTol;
            break;
        }
        if k >= stop.max_iter {
            stop_reason = StopReason::MaxIter;
            break;
        }
        if let Some(budget) = stop.max_seconds {
            if start.elapsed().as_secs_f64() > budget {
                stop_reason = StopReason::MaxSeconds;
                break;
            }
        }

        let sel = sampler.next(sys, &x, &r)?;
        if sel.is_row_side() != matches!(mode, SolveMode::RowAction) {
            return Err(Error::Invalid(
                "sampler produced a selector for the wrong side".into(),
            ));
        }
        let delta = match mode {
            SolveMode::RowAction => row_delta(sys, &r, &sel)?,
            SolveMode::ColAction => col_delta(sys, &r, &sel)?,
        };
        let x_new = &x - &delta;

        // incremental residual update, with periodic full recomputation
        let mut r_new = if let SelectorKind::ColIndices(ix) = &sel.kind {
            let block = sys.col_block(ix);
            let d_block = Vector::from_iterator(ix.len(), ix.iter().map(|&j| delta[j]));
            &r - block * d_block
        } else {
            &r - sys.matrix() * &delta
        };
        if (k + 1).is_multiple_of(opts.revalidate_every) {
            let fresh = sys.residual(&x_new);
            debug_assert!(
                (&fresh - &r_new).norm()
                    <= 1e-8 * (sys.matrix().norm() * x_new.norm() + sys.rhs().norm() + 1.0),
                "maintained residual drifted beyond tolerance at step {k}"
            );
            r_new = fresh;
        }

        let chi = match mode {
            SolveMode::RowAction => delta.norm() > opts.chi_tol * 1.0_f64.max(x.norm()),
            SolveMode::ColAction => (&r_new - &r).norm() > opts.chi_tol * 1.0_f64.max(r.norm()),
        };

        let summary = sel.summary();
        if prev_summary.as_deref().is_some_and(|p| p != summary) {
            changes += 1;
        }
        prev_summary = Some(summary.clone());
        records.push(IterationRecord {
            k,
            error_sq: err_sq,
            chi,
            selector: summary,
            selector_changes: changes,
        });

        let basis = if chi && (opts.record_bases || schedule_active) {
            Some(realized_projection_basis(sys, &sel)?)
        } else {
            None
        };
        if opts.record_bases {
            realized_bases.push(basis.clone());
        }

        let y_new = y_of(&x_new, &r_new);
        let err_new = y_new.norm_squared();
        if opts.record_iterates {
            iterates.push(y_new.clone());
        }

        if schedule_active {
            if let Some(basis) = &basis {
                for col in basis.columns() {
                    pooled.insert(&col);
                }
            }
            if pooled.contains(&y_new) {
                let nu = k - tau_current;
                nu_records.push(NuRecord {
                    j: tau_current,
                    nu: Some(nu),
                });
                tau_current = k + 1;
                tau_trace.push((tau_current, err_new));
                pooled = SpanTracker::new(y_new.len(), opts.span_tol);
            } else if k - tau_current >= horizon {
                nu_records.push(NuRecord {
                    j: tau_current,
                    nu: None,
                });
                schedule_active = false;
            }
        }

        x = x_new;
        r = r_new;
        err_sq = err_new;
        k += 1;
    }

    let tau_points = tau_trace
        .iter()
        .enumerate()
        .map(|(j, &(tau, y_sq))| TauPoint {
            j,
            tau,
            gamma_observed: tau_trace.get(j + 1).and_then(|&(_, next_sq)| {
                (y_sq > 0.0).then_some(next_sq / y_sq)
            }),
        })
        .collect();

    Ok(SolveHistory {
        records,
        final_error_sq: err_sq,
        final_x: x,
        stop: stop_reason,
        tau_points,
        nu_records,
        realized_bases,
        iterates,
    })
}
