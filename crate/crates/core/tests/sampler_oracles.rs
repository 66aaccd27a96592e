//! Hand-computed and statistical oracles for the selection rules whose
//! formulas are easy to get subtly wrong.

use rbas::engine::{run, RunOptions, StopCriteria};
use rbas::linalg::{gaussian_matrix, gaussian_vector, rng_from_seed, Matrix, Vector};
use rbas::samplers::{
    greedy_threshold_set, make_sampler, pretransform_system, SamplerKind, SamplerSpec,
    SelectorKind, SketchProjectParams,
};
use rbas::sketch::SketchDistribution;
use rbas::system::{make_partition, LinearSystem, PartitionScheme, Side};

fn selector_single_index(kind: &SelectorKind) -> usize {
    match kind {
        SelectorKind::RowIndices(ix) | SelectorKind::ColIndices(ix) => {
            assert_eq!(ix.len(), 1);
            ix[0]
        }
        _ => panic!("expected an index selector"),
    }
}

#[test]
fn max_distance_cd_divides_by_the_normal_matrix_column_norm() {
    // the score is |e_j^T A^T r| / ||A^T A e_j||^2, not / ||A e_j||^2:
    // build a case where the two rules disagree
    let a = Matrix::from_row_slice(
        3,
        2,
        &[
            1.0, 0.0, //
            0.0, 4.0, //
            0.0, 3.0,
        ],
    );
    let b = Vector::zeros(3);
    let sys = LinearSystem::new(a.clone(), b).unwrap();
    let r = Vector::from_column_slice(&[2.0, 1.0, 1.0]);
    let g = a.transpose() * &r; // (2, 7)
    let denom: Vec<f64> = (0..2)
        .map(|j| {
            let col = a.column(j).into_owned();
            (a.transpose() * col).norm_squared()
        })
        .collect();
    // scores: 2/1 = 2 vs 7/625 -> coordinate 0 wins under the correct rule;
    // under / ||A e_j||^2 it would be 2 vs 7/25, still 0... sharpen with g
    assert!((g[0] - 2.0).abs() < 1e-12 && (g[1] - 7.0).abs() < 1e-12);
    assert!((denom[0] - 1.0).abs() < 1e-12 && (denom[1] - 625.0).abs() < 1e-12);
    let spec = SamplerSpec::new(SamplerKind::MaxDistanceVectorCd, 0);
    let mut s = make_sampler(&spec, &sys).unwrap();
    let x = Vector::zeros(2);
    let sel = s.next(&sys, &x, &r).unwrap();
    assert_eq!(selector_single_index(&sel.kind), 0);

    // a case where the two denominators disagree on the winner:
    // g = (0.1, 10): correct scores (0.1/1, 10/625) pick 0, while the
    // column-norm rule would score (0.1/1, 10/25) and pick 1
    let r2 = Vector::from_column_slice(&[0.1, 2.5, 0.0]);
    let g2 = a.transpose() * &r2;
    let correct: Vec<f64> = (0..2).map(|j| g2[j].abs() / denom[j]).collect();
    let naive: Vec<f64> = (0..2)
        .map(|j| g2[j].abs() / a.column(j).norm_squared())
        .collect();
    assert!(correct[0] > correct[1], "correct rule picks 0: {correct:?}");
    assert!(naive[1] > naive[0], "naive rule would pick 1: {naive:?}");
    let sel2 = s.next(&sys, &x, &r2).unwrap();
    assert_eq!(selector_single_index(&sel2.kind), 0);
}

#[test]
fn motzkin_block_scores_by_projection_step_length() {
    // block scores || (E^T A A^T E)^+ E^T (b - A x) ||: with orthogonal
    // block rows the score reduces to the scaled residual, hand-computable
    let a = Matrix::from_row_slice(
        4,
        2,
        &[
            2.0, 0.0, //
            0.0, 2.0, //
            1.0, 0.0, //
            0.0, 1.0,
        ],
    );
    let sys = LinearSystem::new(a, Vector::zeros(4)).unwrap();
    let part = make_partition(&sys, Side::Row, PartitionScheme::EqualBlocks(2)).unwrap();
    let spec = SamplerSpec::new(SamplerKind::MotzkinBlock, 0).with_partition(part);
    let mut s = make_sampler(&spec, &sys).unwrap();
    // block 1 rows scale 2, block 2 rows scale 1: equal residuals score
    // 4x higher on the small block ((1/r^2) vs (1/r^2)/4 per coordinate)
    let r = Vector::from_column_slice(&[1.0, 1.0, 1.0, 1.0]);
    let sel = s.next(&sys, &Vector::zeros(2), &r).unwrap();
    assert_eq!(sel.tag, Some(1), "the weakly scaled block moves further");
    // residual dominated by the first block: it wins
    let r2 = Vector::from_column_slice(&[10.0, 10.0, 1.0, 1.0]);
    let sel2 = s.next(&sys, &Vector::zeros(2), &r2).unwrap();
    assert_eq!(sel2.tag, Some(0));
}

#[test]
fn greedy_block_threshold_matches_hand_computation() {
    // two blocks of an orthogonal design: block scores
    // ||E_j^T r||^2 / (||r||^2 ||A^T E_j||_F^2), threshold = max/2 + 1/(2 F)
    let a = Matrix::from_row_slice(
        4,
        2,
        &[
            1.0, 0.0, //
            0.0, 1.0, //
            3.0, 0.0, //
            0.0, 3.0,
        ],
    );
    let sys = LinearSystem::new(a, Vector::zeros(4)).unwrap();
    let part = make_partition(&sys, Side::Row, PartitionScheme::EqualBlocks(2)).unwrap();
    let r = Vector::from_column_slice(&[1.0, 1.0, 0.1, 0.1]);
    // block norms: F1 = 2, F2 = 18, F = 20; ||r||^2 = 2.02
    // q1 = 2 / (2.02 * 2) = 0.4950..; q2 = 0.02 / (2.02 * 18) = 0.00055
    // threshold = q1/2 + 1/40 = 0.2725: only block 0 passes
    let set = greedy_threshold_set(&r, &sys, Some(&part), Side::Row).unwrap();
    assert_eq!(set, vec![0]);
}

#[test]
fn zouzias_freris_cd_frequencies_match_column_norms() {
    let a = Matrix::from_row_slice(2, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
    let sys = LinearSystem::new(a, Vector::zeros(2)).unwrap();
    let spec = SamplerSpec::new(SamplerKind::ZouziasFrerisVectorCd, 55);
    let mut s = make_sampler(&spec, &sys).unwrap();
    let x = Vector::zeros(3);
    let r = Vector::from_column_slice(&[1.0, 1.0]);
    let trials = 60_000;
    let mut counts = [0usize; 3];
    for _ in 0..trials {
        counts[selector_single_index(&s.next(&sys, &x, &r).unwrap().kind)] += 1;
    }
    let fro = 14.0;
    for (j, &c) in counts.iter().enumerate() {
        let p = sys.col_norm_sq(j) / fro;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let freq = c as f64 / trials as f64;
        assert!((freq - p).abs() <= 4.0 * sigma, "col {j}: freq {freq} vs {p}");
    }
}

#[test]
fn steinerberger_exponent_changes_the_draw_distribution() {
    let sys = LinearSystem::new(Matrix::identity(2, 2), Vector::zeros(2)).unwrap();
    let r = Vector::from_column_slice(&[1.0, 2.0]);
    let x = Vector::zeros(2);
    let trials = 40_000;
    for (p, expected) in [(1.0, 2.0 / 3.0), (2.0, 0.8), (4.0, 16.0 / 17.0)] {
        let spec = SamplerSpec::new(SamplerKind::SteinerbergerVector, 77).with_p_exponent(p);
        let mut s = make_sampler(&spec, &sys).unwrap();
        let mut hits = 0usize;
        for _ in 0..trials {
            if selector_single_index(&s.next(&sys, &x, &r).unwrap().kind) == 1 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (freq - expected).abs() <= 4.0 * sigma,
            "p={p}: freq {freq} vs {expected}"
        );
    }
}

#[test]
fn adaptive_sketch_project_solves_consistent_systems() {
    for trial in 0..10u64 {
        let mut rng = rng_from_seed(400 + trial);
        let a = gaussian_matrix(8, 4, &mut rng);
        let b = &a * gaussian_vector(4, &mut rng);
        let sys = LinearSystem::new(a, b).unwrap();
        let spec = SamplerSpec::new(SamplerKind::AdaptiveSketchProject, 500 + trial).with_sketch(
            SketchProjectParams {
                distribution: SketchDistribution::Achlioptas,
                epsilon: 8,
                embedding_dim: 5,
                sketch_seed: None,
            },
        );
        let mut sampler = make_sampler(&spec, &sys).unwrap();
        let h = run(
            &sys,
            sampler.as_mut(),
            &gaussian_vector(4, &mut rng),
            &StopCriteria::max_iter(400).with_error_tol(1e-16),
            &RunOptions::default(),
        )
        .unwrap();
        assert!(
            h.final_error_sq <= 1e-16,
            "trial {trial}: stalled at {}",
            h.final_error_sq
        );
    }
}

#[test]
fn sketch_project_with_metric_pretransform_solves_the_original_system() {
    // non-identity SPD metrics enter via the pre-transform: solve the
    // transformed system, map back, and check the original
    let mut rng = rng_from_seed(900);
    let a = gaussian_matrix(6, 3, &mut rng);
    let x_true = gaussian_vector(3, &mut rng);
    let b = &a * &x_true;
    let sys = LinearSystem::new(a.clone(), b.clone()).unwrap();
    let g = gaussian_matrix(3, 3, &mut rng);
    let metric = &g * g.transpose() + Matrix::identity(3, 3);
    let (transformed, inv_sqrt, _sqrt) = pretransform_system(&sys, &metric).unwrap();

    let spec = SamplerSpec::new(SamplerKind::AdaptiveSketchProject, 901).with_sketch(
        SketchProjectParams {
            distribution: SketchDistribution::Gaussian,
            epsilon: 6,
            embedding_dim: 4,
            sketch_seed: None,
        },
    );
    let mut sampler = make_sampler(&spec, &transformed).unwrap();
    let h = run(
        &transformed,
        sampler.as_mut(),
        &Vector::zeros(3),
        &StopCriteria::max_iter(500).with_error_tol(1e-18),
        &RunOptions::default(),
    )
    .unwrap();
    assert!(h.final_error_sq <= 1e-18);
    // z solves A B^{-1/2} z = b, so x = B^{-1/2} z solves A x = b
    let x = &inv_sqrt * &h.final_x;
    assert!((&a * x - &b).norm() <= 1e-7 * (1.0 + b.norm()));
}
