use proptest::prelude::*;
use zono_core::linalg::{self, Matrix};
use zono_core::sparsify::{
    self, bss_cap, lewis_weights, sparsify_bss, sparsify_delta_modular, sparsify_lewis, SparsificationResult,
};

fn matrix(d_max: usize, n_max: usize) -> impl Strategy<Value = Matrix> {
    (1..=d_max)
        .prop_flat_map(move |d| (Just(d), d + 1..=n_max))
        .prop_flat_map(|(d, n)| prop::collection::vec(-3.0..3.0f64, d * n).prop_map(move |v| Matrix::from_vec(d, n, v)))
        .prop_filter("rank deficient", |w| {
            linalg::rank(w, 1e-8) == w.nrows() && w.column_iter().all(|c| c.norm() > 1e-3)
        })
}

fn spectrum(w: &Matrix, r: &SparsificationResult) -> Vec<f64> {
    let mut wdw = Matrix::zeros(w.nrows(), w.nrows());
    for (&i, &c) in r.indices.iter().zip(&r.weights) {
        wdw += w.column(i) * w.column(i).transpose() * c;
    }
    linalg::generalized_eigenvalues(&wdw, &(w * w.transpose())).unwrap().iter().copied().collect()
}

fn assert_common(w: &Matrix, r: &SparsificationResult) -> Result<(), TestCaseError> {
    prop_assert_eq!(r.indices.len(), r.weights.len());
    prop_assert!(r.weights.iter().all(|&c| c > 0.0));
    prop_assert!(r.lower_factor() <= 1.0 && 1.0 <= r.upper_factor());
    prop_assert_eq!(linalg::rank(&r.generators(w), 1e-9), w.nrows());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lewis_fixed_point(w in matrix(5, 30)) {
        let st = lewis_weights(&w, sparsify::LEWIS_TOL, sparsify::LEWIS_MAX_ITER).unwrap();
        let sum: f64 = st.weights.iter().sum();
        prop_assert!((sum - w.nrows() as f64).abs() <= 1e-6, "sum {sum}");
        prop_assert!(st.weights.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-9));
    }

    #[test]
    fn lewis_global_scale_invariance(w in matrix(4, 20), lambda in 0.01..100.0f64) {
        let a = lewis_weights(&w, sparsify::LEWIS_TOL, sparsify::LEWIS_MAX_ITER).unwrap();
        let b = lewis_weights(&(&w * lambda), sparsify::LEWIS_TOL, sparsify::LEWIS_MAX_ITER).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn lewis_orthogonal_column_scale_invariance(w in matrix(3, 12), lambda in 0.1..10.0f64) {
        // Append e_{d+1} to a lifted copy of W; its scale must not move any weight.
        let (d, n) = w.shape();
        let mut lifted = Matrix::zeros(d + 1, n + 1);
        lifted.view_mut((0, 0), (d, n)).copy_from(&w);
        lifted[(d, n)] = 1.0;
        let a = lewis_weights(&lifted, sparsify::LEWIS_TOL, sparsify::LEWIS_MAX_ITER).unwrap();
        lifted[(d, n)] = lambda;
        let b = lewis_weights(&lifted, sparsify::LEWIS_TOL, sparsify::LEWIS_MAX_ITER).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn bss_sandwich_and_size(w in matrix(5, 48), eps in 0.2..0.7f64) {
        let r = sparsify_bss(&w, eps).unwrap();
        assert_common(&w, &r)?;
        prop_assert!(r.nnz() <= bss_cap(w.nrows(), eps));
        for l in spectrum(&w, &r) {
            prop_assert!(l >= (1.0 - eps).powi(2) - 1e-8 && l <= (1.0 + eps).powi(2) + 1e-8, "λ = {l}");
        }
    }

    #[test]
    fn lewis_sampling_keeps_rank(w in matrix(3, 40), eps in 0.2..0.5f64, seed in any::<u64>()) {
        let r = sparsify_lewis(&w, eps, seed).unwrap();
        assert_common(&w, &r)?;
        let again = sparsify_lewis(&w, eps, seed).unwrap();
        prop_assert_eq!(r.indices, again.indices);
    }

    #[test]
    fn delta_pipeline_is_rank_preserving(w in matrix(3, 20)) {
        let r = sparsify_delta_modular(&w, 0.4, Some(1.0)).unwrap();
        assert_common(&w, &r)?;
        let pre = r.pre_rescale_generators(&w).unwrap();
        let post = r.generators(&w);
        prop_assert!((pre - post).norm() <= 1e-12, "Δ = 1 must not rescale");
    }
}
