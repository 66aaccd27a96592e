//! The subcommand implementations. Each takes the parsed config plus the
//! resolved experiment seed and writes CSV outputs under the output
//! directory.

use std::path::Path;

use rbas::engine::{run, RunOptions, StopCriteria, StopReason};
use rbas::linalg::derive_seed;
use rbas::meany::{
    gamma_for_partition_labeled, meany_sup_estimate, write_gamma_csv, write_meany_csv,
    GammaOptions, GammaReport,
};
use rbas::samplers::make_sampler;
use rbas::sketch::{jl_failure_bound, jl_min_embedding_dim};
use rbas::system::{LinearSystem, Side};

use crate::config::{parse_partition, seed_role, ExperimentConfig};
use crate::generators::build_system;
use crate::locality::simulate;
use crate::output::{out_path, write_atomic};
use crate::CliError;

pub struct CommandContext<'a> {
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    pub out_dir: &'a Path,
}

fn prefix<'a>(ctx: &'a CommandContext, default: &'a str) -> &'a str {
    ctx.config
        .output
        .prefix
        .as_deref()
        .unwrap_or(default)
}

pub fn cmd_solve(ctx: &CommandContext) -> Result<(), CliError> {
    let cfg = ctx.config;
    let sys = build_system(cfg.system.as_ref(), None, ctx.seed)?;
    let sampler_cfg = cfg
        .sampler
        .as_ref()
        .ok_or_else(|| CliError::Config("solve needs a [sampler] section".into()))?;
    let spec = crate::config::build_sampler_spec(sampler_cfg, &sys, ctx.seed)?;
    let mut sampler = make_sampler(&spec, &sys).map_err(CliError::from_setup)?;
    let x0 = crate::config::build_x0(&cfg.solve, sys.ncols(), ctx.seed)?;

    let mut stop = StopCriteria::max_iter(cfg.solve.max_iter).with_error_tol(cfg.solve.error_tol);
    if let Some(secs) = cfg.solve.max_seconds {
        stop = stop.with_max_seconds(secs);
    }
    let opts = RunOptions {
        record_bases: cfg.solve.record_bases,
        nu_horizon: cfg.solve.nu_horizon,
        ..RunOptions::default()
    };
    let history = run(&sys, sampler.as_mut(), &x0, &stop, &opts).map_err(CliError::from_run)?;

    let p = prefix(ctx, "solve");
    let mut hist_csv = Vec::new();
    history
        .write_csv(&mut hist_csv)
        .map_err(|e| CliError::Config(e.to_string()))?;
    write_atomic(&out_path(ctx.out_dir, p, "history.csv"), &hist_csv)?;

    let stop_label = match history.stop {
        StopReason::ErrorTol => "error_tol",
        StopReason::MaxIter => "max_iter",
        StopReason::MaxSeconds => "max_seconds",
    };
    let mut summary = String::from("# rbas-summary v1\n");
    summary.push_str(
        "sampler,rows,cols,rank,consistent,iterations,final_error_sq,stop,tau_points,nu_detected\n",
    );
    let nu_detected = history.nu_records.iter().filter(|r| r.nu.is_some()).count();
    summary.push_str(&format!(
        "{},{},{},{},{},{},{:?},{},{},{}\n",
        spec.kind,
        sys.nrows(),
        sys.ncols(),
        sys.rank(),
        sys.is_consistent(),
        history.iterations(),
        history.final_error_sq,
        stop_label,
        history.tau_points.len(),
        nu_detected,
    ));
    write_atomic(&out_path(ctx.out_dir, p, "summary.csv"), summary.as_bytes())?;

    let mut tau = String::from("# rbas-tau v1\nj,tau,nu,gamma_observed\n");
    for (i, tp) in history.tau_points.iter().enumerate() {
        let nu = history
            .nu_records
            .get(i)
            .map(|r| r.nu.map_or(String::from("undetected"), |v| v.to_string()))
            .unwrap_or_default();
        let gamma = tp
            .gamma_observed
            .map(|g| format!("{g:?}"))
            .unwrap_or_default();
        tau.push_str(&format!("{},{},{},{}\n", tp.j, tp.tau, nu, gamma));
    }
    write_atomic(&out_path(ctx.out_dir, p, "tau.csv"), tau.as_bytes())?;
    Ok(())
}

/// Row blocks of the configured system (default: the two-block demo) whose
/// row spaces feed the sup estimator.
pub fn cmd_meany_table(ctx: &CommandContext) -> Result<(), CliError> {
    let cfg = ctx.config;
    let sys = build_system(cfg.system.as_ref(), Some("block_demo"), ctx.seed)?;
    let blocks_text = cfg.meany.blocks.as_deref().unwrap_or("equal:2");
    let partition = parse_partition(blocks_text, &sys, Side::Row)?;
    let generators: Vec<_> = partition
        .blocks()
        .iter()
        .map(|b| sys.row_block(b).transpose())
        .collect();
    let seed = cfg
        .meany
        .seed
        .unwrap_or_else(|| derive_seed(ctx.seed, seed_role::MEANY));
    let estimate =
        meany_sup_estimate(&generators, cfg.meany.samples, seed).map_err(CliError::from_run)?;
    let mut csv = Vec::new();
    write_meany_csv(&mut csv, &estimate).map_err(|e| CliError::Config(e.to_string()))?;
    write_atomic(
        &out_path(ctx.out_dir, prefix(ctx, "meany"), "meany.csv"),
        &csv,
    )?;
    Ok(())
}

fn default_pairings() -> Vec<String> {
    vec!["1,2;3,4".into(), "1,3;2,4".into(), "1,4;2,3".into()]
}

pub fn cmd_gamma_table(ctx: &CommandContext) -> Result<(), CliError> {
    let cfg = ctx.config;
    let sys = build_system(cfg.system.as_ref(), Some("near_parallel"), ctx.seed)?;
    let partition_texts = cfg
        .gamma
        .partitions
        .clone()
        .unwrap_or_else(default_pairings);
    let seed = cfg
        .gamma
        .seed
        .unwrap_or_else(|| derive_seed(ctx.seed, seed_role::GAMMA));
    let mut reports: Vec<GammaReport> = Vec::new();
    for text in &partition_texts {
        let partition = parse_partition(text, &sys, Side::Row)?;
        let report = gamma_for_partition_labeled(
            &sys,
            &partition,
            GammaOptions {
                n_samples: cfg.gamma.samples,
                seed,
            },
            text,
        )
        .map_err(CliError::from_run)?;
        reports.push(report);
    }
    let mut csv = Vec::new();
    write_gamma_csv(&mut csv, &reports).map_err(|e| CliError::Config(e.to_string()))?;
    write_atomic(
        &out_path(ctx.out_dir, prefix(ctx, "gamma"), "gamma.csv"),
        &csv,
    )?;
    Ok(())
}

pub fn cmd_locality(ctx: &CommandContext) -> Result<(), CliError> {
    let cfg = ctx.config;
    let seed = cfg
        .locality
        .seed
        .unwrap_or_else(|| derive_seed(ctx.seed, seed_role::LOCALITY));
    let report = simulate(&cfg.locality, seed)?;
    let mut csv = String::from("# rbas-locality v1\n");
    csv.push_str("solver,iterations,chunk_loads,arithmetic_ops,final_abs_error\n");
    for cost in [&report.oracle, &report.block] {
        csv.push_str(&format!(
            "{},{},{},{},{:?}\n",
            cost.solver,
            cost.iterations,
            cost.chunk_loads,
            cost.arithmetic_ops,
            cost.final_abs_error
        ));
    }
    write_atomic(
        &out_path(ctx.out_dir, prefix(ctx, "locality"), "locality.csv"),
        csv.as_bytes(),
    )?;
    Ok(())
}

pub fn cmd_jl_dim(ctx: &CommandContext) -> Result<(), CliError> {
    let jl = ctx
        .config
        .jl
        .as_ref()
        .ok_or_else(|| CliError::Config("jl-dim needs a [jl] section".into()))?;
    let p = jl_min_embedding_dim(jl.c, jl.w, jl.rho).map_err(CliError::from_setup)?;
    let bound = jl_failure_bound(jl.rho, jl.epsilon);
    let mut csv = String::from("# rbas-jl v1\nc,w,rho,epsilon,embedding_dim,failure_bound\n");
    csv.push_str(&format!(
        "{:?},{:?},{:?},{},{},{:?}\n",
        jl.c, jl.w, jl.rho, jl.epsilon, p, bound
    ));
    write_atomic(&out_path(ctx.out_dir, prefix(ctx, "jl"), "jl.csv"), csv.as_bytes())?;
    println!("embedding_dim {p}  failure_bound {bound:?}");
    Ok(())
}

/// Convenience used by tests: build the system a command would use.
pub fn system_for_tests(
    config: &ExperimentConfig,
    default: Option<&str>,
    seed: u64,
) -> Result<LinearSystem, CliError> {
    build_system(config.system.as_ref(), default, seed)
}
