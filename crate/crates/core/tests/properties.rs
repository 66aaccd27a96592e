//! Property-based invariants across the numerical kernels and the iteration.

use proptest::prelude::*;
use rbas::engine::{error_vector, row_step};
use rbas::linalg::{
    gaussian_matrix, gaussian_vector, gram_det, orthonormal_basis, pinv_apply, rng_from_seed,
    Matrix, SpanTracker,
};
use rbas::samplers::Selector;
use rbas::system::{LinearSystem, SolveMode, SolveTargets};

fn finite_matrix(nr: usize, nc: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-10.0f64..10.0, nr * nc)
        .prop_map(move |v| Matrix::from_row_slice(nr, nc, &v))
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    (1usize..7, 1usize..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pinv_satisfies_projector_identity((nr, nc) in shape(), seed in 0u64..1000) {
        // A (A^+ (A x)) = A x for any x
        let mut rng = rng_from_seed(seed);
        let m = gaussian_matrix(nr, nc, &mut rng);
        let x = gaussian_vector(nc, &mut rng);
        let ax = &m * &x;
        let z = pinv_apply(&m, &ax).unwrap();
        let diff = (&m * z - &ax).norm();
        prop_assert!(diff <= 1e-9 * ax.norm().max(1e-12));
    }

    #[test]
    fn orthonormal_basis_is_orthonormal(m in shape().prop_flat_map(|(nr, nc)| finite_matrix(nr, nc))) {
        let q = orthonormal_basis(&m, 1e-10).unwrap();
        if !q.is_empty() {
            let gram = q.matrix().transpose() * q.matrix();
            let id = Matrix::identity(q.len(), q.len());
            prop_assert!((gram - id).abs().max() <= 1e-10);
        }
    }

    #[test]
    fn gram_det_of_unit_columns_obeys_hadamard(seed in 0u64..2000, n in 2usize..6, k in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let mut g = gaussian_matrix(n, k.min(n), &mut rng);
        for mut col in g.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        let det = gram_det(&g);
        prop_assert!(det >= 0.0);
        prop_assert!(det <= 1.0 + 1e-10);
    }

    #[test]
    fn span_tracker_never_exceeds_ambient(seed in 0u64..500, dim in 1usize..6) {
        let mut rng = rng_from_seed(seed);
        let mut tracker = SpanTracker::new(dim, 1e-10);
        for _ in 0..3 * dim {
            let v = gaussian_vector(dim, &mut rng);
            let before = tracker.dim();
            let grew = tracker.insert(&v);
            prop_assert!(tracker.dim() <= dim);
            prop_assert_eq!(tracker.dim(), before + grew as usize);
            prop_assert!(tracker.contains(&v));
        }
    }

    #[test]
    fn row_steps_decrease_error_orthogonally(seed in 0u64..500) {
        let mut rng = rng_from_seed(seed);
        let n = 2 + (seed % 5) as usize;
        let d = 2 + (seed % 3) as usize;
        let a = gaussian_matrix(n, d, &mut rng);
        let b = &a * gaussian_vector(d, &mut rng);
        let sys = LinearSystem::new(a, b).unwrap();
        let x0 = gaussian_vector(d, &mut rng);
        let targets = SolveTargets::new(&sys, SolveMode::RowAction, x0.clone()).unwrap();
        let mut x = x0;
        for i in 0..2 * n {
            let sel = Selector::rows(vec![i % n]).unwrap();
            let x1 = row_step(&sys, &x, &sel).unwrap();
            let y0 = error_vector(&targets, &x, &sys).unwrap();
            let y1 = error_vector(&targets, &x1, &sys).unwrap();
            prop_assert!(y1.norm_squared() <= y0.norm_squared() + 1e-10);
            let drop = y0.norm_squared() - y1.norm_squared();
            let step = (&y0 - &y1).norm_squared();
            prop_assert!((drop - step).abs() <= 1e-8 * y0.norm_squared().max(1e-20));
            x = x1;
        }
    }

    #[test]
    fn row_iterates_stay_in_shifted_row_space(seed in 0u64..300) {
        // x_k - x_0 in row(A): the projection of the increment onto ker(A)
        // stays zero, so the solution projection of x_k equals that of x_0
        let mut rng = rng_from_seed(seed);
        let a = gaussian_matrix(4, 5, &mut rng); // underdetermined: nontrivial kernel
        let b = &a * gaussian_vector(5, &mut rng);
        let sys = LinearSystem::new(a, b).unwrap();
        let x0 = gaussian_vector(5, &mut rng);
        let px0 = sys.solution_projection(&x0).unwrap();
        let mut x = x0;
        for i in 0..8 {
            let sel = Selector::rows(vec![i % 4]).unwrap();
            x = row_step(&sys, &x, &sel).unwrap();
        }
        let px = sys.solution_projection(&x).unwrap();
        prop_assert!((px - px0).norm() <= 1e-8 * (1.0 + x.norm()));
    }
}
