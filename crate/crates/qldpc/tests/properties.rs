//! Property tests for the structural invariants of the toolkit.

use proptest::prelude::*;
use qldpc::decoder::{decode, Algorithm, DecoderConfig, Schedule};
use qldpc::gf2::SparseBinaryMatrix;
use qldpc::layering::{greedy_decompose, validate_cover, LayerCover};
use qldpc::sim::{Classifier, Outcome};
use qldpc::{css, hypergraph_product};

fn sparse_matrix(max_m: usize, max_n: usize) -> impl Strategy<Value = SparseBinaryMatrix> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(prop::bool::weighted(0.3), n), m).prop_map(
            move |cells| {
                let rows = cells
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(_, &b)| b)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect();
                SparseBinaryMatrix::from_rows(n, rows).expect("generated rows are in range")
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circulant_is_support_regular(
        exponents in prop::collection::btree_set(0usize..12, 1..=4),
        extra in 0usize..20,
    ) {
        let l = 12 + extra;
        let support: Vec<usize> = exponents.iter().copied().collect();
        let m = SparseBinaryMatrix::circulant(&support, l).unwrap();
        let w = support.len();
        for r in 0..l {
            prop_assert_eq!(m.row_weight(r), w);
        }
        for c in 0..l {
            prop_assert_eq!(m.col_weight(c), w);
        }
    }

    #[test]
    fn rank_is_transpose_invariant(m in sparse_matrix(12, 12)) {
        prop_assert_eq!(m.rank(), m.transposed().rank());
    }

    #[test]
    fn row_combinations_stay_in_rowspace(m in sparse_matrix(10, 10), seed in any::<u32>()) {
        let mut rng = qldpc::Lcg::new(seed);
        let x: Vec<u8> = (0..m.n_rows()).map(|_| (rng.next_u32() & 1) as u8).collect();
        let combo = m.transposed().mat_vec(&x).unwrap();
        prop_assert!(m.in_rowspace(&combo).unwrap());
    }

    #[test]
    fn kernel_basis_spans_the_kernel(m in sparse_matrix(12, 16)) {
        let basis = m.kernel_basis();
        prop_assert_eq!(basis.len(), m.n_cols() - m.rank());
        for x in &basis {
            prop_assert!(m.mat_vec(x).unwrap().iter().all(|&b| b == 0));
        }
        if !basis.is_empty() {
            let stacked = SparseBinaryMatrix::from_rows(
                m.n_cols(),
                basis
                    .iter()
                    .map(|x| {
                        x.iter()
                            .enumerate()
                            .filter(|(_, &b)| b == 1)
                            .map(|(i, _)| i)
                            .collect()
                    })
                    .collect(),
            )
            .unwrap();
            prop_assert_eq!(stacked.rank(), basis.len());
        }
    }

    #[test]
    fn hypergraph_products_always_validate(
        a in sparse_matrix(6, 6),
        b in sparse_matrix(6, 6),
    ) {
        let code = hypergraph_product(&a, &b);
        prop_assert!(css::css_validate(&code));
    }

    #[test]
    fn greedy_decomposition_is_always_valid(m in sparse_matrix(15, 15)) {
        let decomp = greedy_decompose(&m);
        let report = validate_cover(&m, &decomp);
        prop_assert!(report.valid, "{:?}", report.violations);
        prop_assert!(report.fractional >= report.lower_bound as f64);
    }

    #[test]
    fn converged_decodes_satisfy_the_syndrome(
        m in sparse_matrix(10, 14),
        seed in any::<u32>(),
    ) {
        let mut rng = qldpc::Lcg::new(seed);
        let error: Vec<u8> = (0..m.n_cols()).map(|_| u8::from(rng.next_index(5) == 0)).collect();
        let syndrome = m.mat_vec(&error).unwrap();
        let cover = greedy_decompose(&m);
        for (schedule, algorithm) in [
            (Schedule::Flooded, Algorithm::SumProduct),
            (Schedule::Serial, Algorithm::NormalizedMinSum),
            (Schedule::Layered, Algorithm::PerturbedMinSum),
        ] {
            let config = DecoderConfig {
                schedule,
                algorithm,
                random_order: schedule != Schedule::Flooded,
                rng_seed: seed,
                ..DecoderConfig::default()
            };
            let result = decode(&m, &syndrome, Some(&cover), 0.05, &config).unwrap();
            if result.converged {
                prop_assert_eq!(m.mat_vec(&result.estimate).unwrap(), syndrome.clone());
            }
        }
    }

    #[test]
    fn serial_equals_singleton_layered(
        m in sparse_matrix(8, 12),
        seed in any::<u32>(),
        random_order in any::<bool>(),
    ) {
        let mut rng = qldpc::Lcg::new(seed);
        let error: Vec<u8> = (0..m.n_cols()).map(|_| u8::from(rng.next_index(4) == 0)).collect();
        let syndrome = m.mat_vec(&error).unwrap();
        let singles = LayerCover::singletons(m.n_rows());
        let serial = DecoderConfig {
            schedule: Schedule::Serial,
            random_order,
            rng_seed: seed,
            ..DecoderConfig::default()
        };
        let layered = DecoderConfig {
            schedule: Schedule::Layered,
            ..serial.clone()
        };
        let a = decode(&m, &syndrome, None, 0.05, &serial).unwrap();
        let b = decode(&m, &syndrome, Some(&singles), 0.05, &layered).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn flooded_is_check_permutation_invariant(
        m in sparse_matrix(8, 12),
        seed in any::<u32>(),
    ) {
        let mut rng = qldpc::Lcg::new(seed);
        let error: Vec<u8> = (0..m.n_cols()).map(|_| u8::from(rng.next_index(4) == 0)).collect();
        let syndrome = m.mat_vec(&error).unwrap();
        // Reverse the check order along with the syndrome.
        let reversed_rows: Vec<Vec<usize>> =
            (0..m.n_rows()).rev().map(|r| m.row(r).to_vec()).collect();
        let reversed = SparseBinaryMatrix::from_rows(m.n_cols(), reversed_rows).unwrap();
        let reversed_syndrome: Vec<u8> = syndrome.iter().rev().copied().collect();
        let config = DecoderConfig {
            schedule: Schedule::Flooded,
            algorithm: Algorithm::NormalizedMinSum,
            ..DecoderConfig::default()
        };
        let a = decode(&m, &syndrome, None, 0.05, &config).unwrap();
        let b = decode(&reversed, &reversed_syndrome, None, 0.05, &config).unwrap();
        prop_assert_eq!(a.estimate, b.estimate);
        prop_assert_eq!(a.converged, b.converged);
        prop_assert_eq!(a.iterations_used, b.iterations_used);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn classification_ignores_stabilizers(
        a in sparse_matrix(5, 5),
        seed in any::<u32>(),
    ) {
        let code = hypergraph_product(&a, &a);
        let classifier = Classifier::new(&code);
        let mut rng = qldpc::Lcg::new(seed);
        let e: Vec<u8> = (0..code.n()).map(|_| u8::from(rng.next_index(6) == 0)).collect();
        let mut estimate = e.clone();
        for _ in 0..3 {
            let row = rng.next_index(code.h_z().n_rows());
            for &c in code.h_z().row(row) {
                estimate[c] ^= 1;
            }
        }
        prop_assert_eq!(classifier.classify(&e, &estimate), Outcome::Success);
        // Applying the same stabilizers to any estimate never changes
        // its class.
        let mut other = vec![0u8; code.n()];
        if !other.is_empty() {
            other[rng.next_index(code.n())] = 1;
        }
        let before = classifier.classify(&e, &other);
        for &c in code.h_z().row(rng.next_index(code.h_z().n_rows())) {
            other[c] ^= 1;
        }
        prop_assert_eq!(classifier.classify(&e, &other), before);
    }
}
