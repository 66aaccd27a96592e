//! Cross-module checks: stopping-time certificates against the contraction
//! bound, membership oracles, bounded sampler memory, and schedule behavior.

use rbas::engine::{run, tau_schedule, RunOptions, StopCriteria};
use rbas::linalg::{gaussian_matrix, gaussian_vector, rng_from_seed, SpanTracker};
use rbas::meany::{meany_constant, verify_meany_bound};
use rbas::samplers::{
    make_sampler, SamplerKind, SamplerSpec, SketchProjectParams, ALL_SAMPLER_KINDS,
};
use rbas::sketch::SketchDistribution;
use rbas::system::{make_partition, LinearSystem, PartitionScheme};

fn consistent_system(seed: u64, n: usize, d: usize) -> LinearSystem {
    let mut rng = rng_from_seed(seed);
    let a = gaussian_matrix(n, d, &mut rng);
    let b = &a * gaussian_vector(d, &mut rng);
    LinearSystem::new(a, b).unwrap()
}

fn spec_for(kind: SamplerKind, sys: &LinearSystem, seed: u64) -> SamplerSpec {
    let mut spec = SamplerSpec::new(kind, seed);
    if kind.needs_partition() {
        let side = kind.mode().side();
        let total = match side {
            rbas::Side::Row => sys.nrows(),
            rbas::Side::Col => sys.ncols(),
        };
        let k = if total % 2 == 0 { 2 } else { total };
        spec = spec.with_partition(make_partition(sys, side, PartitionScheme::EqualBlocks(k)).unwrap());
    }
    if kind == SamplerKind::SamplingKaczmarzMotzkin {
        spec = spec.with_sample_size(2.min(sys.nrows()));
    }
    if kind == SamplerKind::AdaptiveSketchProject {
        spec = spec.with_sketch(SketchProjectParams {
            distribution: SketchDistribution::Gaussian,
            epsilon: 4,
            embedding_dim: 3,
            sketch_seed: None,
        });
    }
    spec
}

#[test]
fn certified_windows_satisfy_the_contraction_bound() {
    // 100 random small systems; whenever a window is certified, the realized
    // bases' constant bounds the observed squared-error drop
    let mut checked = 0;
    for trial in 0..100 {
        let n = 3 + (trial % 4);
        let d = 2 + (trial % 4);
        let sys = consistent_system(1000 + trial as u64, n, d);
        let spec = SamplerSpec::new(SamplerKind::CyclicVectorKaczmarz, trial as u64);
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let x0 = gaussian_vector(d, &mut rng_from_seed(2000 + trial as u64));
        let opts = RunOptions {
            record_bases: true,
            record_iterates: true,
            ..RunOptions::default()
        };
        let h = run(
            &sys,
            sampler.as_mut(),
            &x0,
            &StopCriteria::max_iter(4 * n).with_error_tol(1e-24),
            &opts,
        )
        .unwrap();
        let errors = h.error_sq_trace();
        for w in h.tau_points.windows(2) {
            let (start, end) = (w[0].tau, w[1].tau);
            let bases: Vec<_> = (start..end)
                .filter_map(|k| h.realized_bases[k].clone())
                .collect();
            if bases.is_empty() {
                continue;
            }
            assert!(
                verify_meany_bound(errors[start], errors[end], &bases).unwrap(),
                "window [{start},{end}) violated the certified contraction"
            );
            checked += 1;
        }
    }
    assert!(checked > 100, "expected many certified windows, got {checked}");
}

#[test]
fn certified_start_lies_in_the_pooled_projection_space() {
    // direct membership oracle: y_tau must lie in the sum of the realized
    // projection spaces over the certified window
    for trial in 0..40 {
        let sys = consistent_system(3000 + trial, 6, 4);
        let spec = SamplerSpec::new(SamplerKind::CyclicVectorKaczmarz, trial);
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let x0 = gaussian_vector(4, &mut rng_from_seed(4000 + trial));
        let opts = RunOptions {
            record_bases: true,
            record_iterates: true,
            ..RunOptions::default()
        };
        let h = run(
            &sys,
            sampler.as_mut(),
            &x0,
            &StopCriteria::max_iter(40).with_error_tol(1e-24),
            &opts,
        )
        .unwrap();
        for w in h.tau_points.windows(2) {
            let (start, end) = (w[0].tau, w[1].tau);
            let mut pooled = SpanTracker::new(4, 1e-8);
            for k in start..end {
                if let Some(basis) = &h.realized_bases[k] {
                    for col in basis.columns() {
                        pooled.insert(&col);
                    }
                }
            }
            let y_start = &h.iterates[start];
            if y_start.norm() > 1e-10 {
                assert!(
                    pooled.contains(y_start),
                    "certified y_tau not in the pooled projection space"
                );
            }
        }
    }
}

#[test]
fn rank_one_systems_certify_immediately() {
    // 1-dimensional iterate space: nu(j) = 0 at every checkpoint
    let mut rng = rng_from_seed(77);
    let row = gaussian_vector(3, &mut rng);
    let a = rbas::Matrix::from_fn(4, 3, |i, j| (i as f64 + 1.0) * row[j]);
    let b = &a * gaussian_vector(3, &mut rng);
    let sys = LinearSystem::new(a, b).unwrap();
    let spec = SamplerSpec::new(SamplerKind::StrohmerVershynin, 5);
    let mut sampler = make_sampler(&spec, &sys).unwrap();
    let x0 = gaussian_vector(3, &mut rng);
    let h = run(
        &sys,
        sampler.as_mut(),
        &x0,
        &StopCriteria::max_iter(10).with_error_tol(1e-26),
        &RunOptions::default(),
    )
    .unwrap();
    for rec in &h.nu_records {
        assert_eq!(rec.nu, Some(0), "rank-1 window was not immediate");
    }
}

#[test]
fn sampler_state_size_is_bounded_over_ten_thousand_steps() {
    let sys = consistent_system(50, 6, 4);
    let x = gaussian_vector(4, &mut rng_from_seed(51));
    let r = sys.residual(&x);
    for kind in ALL_SAMPLER_KINDS {
        let spec = spec_for(kind, &sys, 7);
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let initial = sampler.state().encoded_len();
        for step in 0..10_000 {
            sampler.next(&sys, &x, &r).unwrap();
            let len = sampler.state().encoded_len();
            assert_eq!(
                len, initial,
                "{kind}: state size changed at step {step} ({initial} -> {len})"
            );
        }
    }
}

#[test]
fn tau_expectation_bound_small_monte_carlo() {
    // permutation block Kaczmarz: mean of tau_j / j within the Markovian
    // exploratory bound (rank - 1) * eps + 1
    let mut ratios = Vec::new();
    let mut bound: f64 = 0.0;
    for trial in 0..30 {
        let sys = consistent_system(6000 + trial, 6, 4);
        bound = bound.max((sys.rank() - 1) as f64 * 3.0 + 1.0);
        let part = make_partition(&sys, rbas::Side::Row, PartitionScheme::EqualBlocks(3)).unwrap();
        let spec = SamplerSpec::new(SamplerKind::RandomPermutationBlockKaczmarz, 800 + trial)
            .with_partition(part);
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let x0 = gaussian_vector(4, &mut rng_from_seed(7000 + trial));
        let h = run(
            &sys,
            sampler.as_mut(),
            &x0,
            &StopCriteria::max_iter(60).with_error_tol(1e-24),
            &RunOptions::default(),
        )
        .unwrap();
        let points = tau_schedule(&h);
        if let Some(last) = points.iter().rfind(|p| p.j > 0) {
            ratios.push(last.tau as f64 / last.j as f64);
        }
    }
    assert!(!ratios.is_empty());
    let mean: f64 = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!(mean <= bound, "mean tau_j/j = {mean} exceeds {bound}");
}

#[test]
fn column_action_residual_error_stays_in_column_space() {
    for trial in 0..30 {
        let mut rng = rng_from_seed(8000 + trial);
        let a = gaussian_matrix(5, 3, &mut rng);
        let b = gaussian_vector(5, &mut rng); // generally inconsistent
        let sys = LinearSystem::new(a.clone(), b).unwrap();
        let spec = SamplerSpec::new(SamplerKind::CyclicVectorCd, trial);
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let x0 = gaussian_vector(3, &mut rng);
        let opts = RunOptions {
            record_iterates: true,
            ..RunOptions::default()
        };
        let h = run(
            &sys,
            sampler.as_mut(),
            &x0,
            &StopCriteria::max_iter(20).with_error_tol(1e-22),
            &opts,
        )
        .unwrap();
        // y = A x - b - r* lies in col(A): projecting onto col(A) is identity
        let q = rbas::linalg::orthonormal_basis(&a, 1e-10).unwrap();
        for y in &h.iterates {
            let diff = (y - q.project(y)).norm();
            assert!(diff <= 1e-9 * (1.0 + y.norm()), "col-space invariance broke");
        }
    }
}

#[test]
fn meany_constant_bounds_full_cycle_drop_for_two_block_partitions() {
    // per-cycle squared-error ratio is at most 1 - meany_constant of the
    // realized cycle bases
    for trial in 0..20 {
        let sys = consistent_system(9000 + trial, 4, 3);
        let part = make_partition(&sys, rbas::Side::Row, PartitionScheme::EqualBlocks(2)).unwrap();
        let spec = SamplerSpec::new(SamplerKind::RandomPermutationBlockKaczmarz, 100 + trial)
            .with_partition(part);
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let x0 = gaussian_vector(3, &mut rng_from_seed(9100 + trial));
        let opts = RunOptions {
            record_bases: true,
            record_iterates: true,
            ..RunOptions::default()
        };
        let h = run(
            &sys,
            sampler.as_mut(),
            &x0,
            &StopCriteria::max_iter(12).with_error_tol(1e-26),
            &opts,
        )
        .unwrap();
        let errors = h.error_sq_trace();
        for start in (0..h.iterations().saturating_sub(2)).step_by(2) {
            let bases: Vec<_> = (start..start + 2)
                .filter_map(|k| h.realized_bases[k].clone())
                .collect();
            // both blocks productive: the pooled span is all of row(A), which
            // contains y, so the certified contraction applies to the cycle
            if bases.len() < 2 || errors[start] <= 1e-26 {
                continue;
            }
            let c = meany_constant(&bases).unwrap();
            let ratio = errors[start + 2] / errors[start];
            assert!(
                ratio <= 1.0 - c + 1e-8,
                "cycle ratio {ratio} exceeded bound {}",
                1.0 - c
            );
        }
    }
}
