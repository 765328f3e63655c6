//! Property-based checks of the algebraic invariants.

use bfmeta::bf::{bf_to_t2, gprior_bf10_from_t, jzs_bf10, lambda_to_t2, p_to_t2, t2_to_lambda, GPrior, LogBf};
use bfmeta::distributions::{nct_pdf, t_pdf, t_sf2, DegreesOfFreedom, Noncentrality};
use bfmeta::evidence::{classify, weighted_kappa, AgreementTable, EvidenceLevel};
use bfmeta::simulation::{partition_sizes, replicate_rng, Partition, MIN_PART_SIZE};
use bfmeta::synthesis::{meta_bf, sample_fraction_weights, variance_weights, MetaMethod, MetaOptions, StudyRecord};
use proptest::prelude::*;

fn study() -> impl Strategy<Value = (f64, usize, usize)> {
    (-6.0..6.0f64, 4usize..200, 4usize..200)
}

fn studies(max: usize) -> impl Strategy<Value = Vec<(f64, usize, usize)>> {
    prop::collection::vec(study(), 1..max)
}

fn records(s: &[(f64, usize, usize)]) -> Vec<StudyRecord> {
    s.iter()
        .enumerate()
        .map(|(i, &(t, a, b))| StudyRecord::two_sample_t(format!("s{i}"), t, a, b))
        .collect()
}

proptest! {
    #[test]
    fn flipping_negates_and_is_an_involution(x in -1e6..1e6f64) {
        let b = LogBf::bf10(x);
        prop_assert_eq!(b.flip().two_log_bf, -x);
        prop_assert_eq!(b.flip().flip(), b);
        prop_assert!(b.bf() >= 0.0);
    }

    #[test]
    fn g_prior_factor_increases_with_t2(a in 0.0..400.0f64, d in 1e-6..50.0f64, n in 3usize..5000, g in 0.01..1e4f64) {
        let g = GPrior::new(g).unwrap();
        let lo = gprior_bf10_from_t(a, n, g).unwrap().two_log_bf;
        let hi = gprior_bf10_from_t(a + d, n, g).unwrap().two_log_bf;
        prop_assert!(hi > lo);
    }

    #[test]
    fn g_prior_inversion_round_trips(t2 in 0.0..200.0f64, n in 3usize..3000, g in 0.5..5e3f64) {
        let g = GPrior::new(g).unwrap();
        let bf = gprior_bf10_from_t(t2, n, g).unwrap();
        let back = bf_to_t2(bf, n, g).unwrap();
        prop_assert!((back - t2).abs() <= 1e-8 * (1.0 + t2), "{} vs {}", back, t2);
    }

    #[test]
    fn lambda_round_trips(t2 in 0.0..1e3f64, n in 3usize..10_000) {
        let back = lambda_to_t2(t2_to_lambda(t2, n).unwrap(), n).unwrap();
        prop_assert!((back - t2).abs() <= 1e-12 * (1.0 + t2));
    }

    #[test]
    fn p_value_round_trips(p in 1e-12..1.0f64, nu in 1.0..500.0f64) {
        let nu = DegreesOfFreedom::new(nu).unwrap();
        let t2 = p_to_t2(p, nu).unwrap();
        let back = t_sf2(t2, nu).unwrap();
        prop_assert!((back - p).abs() <= 1e-9 * p.max(1e-3), "{} vs {}", back, p);
    }

    #[test]
    fn central_t_is_the_zero_noncentrality_case(t in -10.0..10.0f64, nu in 0.5..300.0f64) {
        let nu = DegreesOfFreedom::new(nu).unwrap();
        let a = nct_pdf(t, nu, Noncentrality::new(0.0).unwrap());
        prop_assert!((a - t_pdf(t, nu)).abs() <= 1e-12);
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn sample_fraction_weights_are_normalized(n in prop::collection::vec(1usize..10_000, 1..60)) {
        let w = sample_fraction_weights(&n).unwrap();
        prop_assert!((w.squared().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn variance_weights_are_normalized(s in prop::collection::vec((-8.0..8.0f64, 2.5..500.0f64, 0.5..200.0f64), 1..40)) {
        let w = variance_weights(&s).unwrap();
        prop_assert!((w.squared().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(w.w.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn g_methods_ignore_study_order(s in studies(15), rot in 0usize..15) {
        let recs = records(&s);
        let mut shuffled = recs.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        shuffled.reverse();
        let opts = MetaOptions::default();
        for m in [MetaMethod::GDetailed, MetaMethod::GPartial, MetaMethod::GLimited] {
            let a = meta_bf(m, &recs, &opts).unwrap().meta_bf.two_log_bf;
            let b = meta_bf(m, &shuffled, &opts).unwrap().meta_bf.two_log_bf;
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{:?}: {} vs {}", m, a, b);
        }
    }

    #[test]
    fn limited_equals_partial_for_positive_statistics(s in prop::collection::vec((0.0..6.0f64, 4usize..200, 4usize..200), 1..15)) {
        let recs = records(&s);
        let opts = MetaOptions::default();
        let p = meta_bf(MetaMethod::GPartial, &recs, &opts).unwrap().meta_bf.two_log_bf;
        let l = meta_bf(MetaMethod::GLimited, &recs, &opts).unwrap().meta_bf.two_log_bf;
        prop_assert_eq!(p, l);
    }

    #[test]
    fn kappa_is_invariant_to_count_scaling(cells in prop::collection::vec(0u64..40, 16), c in 2u64..9) {
        let table: Vec<Vec<u64>> = cells.chunks(4).map(|r| r.to_vec()).collect();
        let scaled: Vec<Vec<u64>> = table.iter().map(|r| r.iter().map(|v| v * c).collect()).collect();
        let a = weighted_kappa(&AgreementTable::from_counts(table).unwrap());
        let b = weighted_kappa(&AgreementTable::from_counts(scaled).unwrap());
        match (a, b) {
            (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "scaling changed definedness: {:?}", other),
        }
    }

    #[test]
    fn classification_is_monotone(a in -50.0..50.0f64, d in 0.0..50.0f64) {
        prop_assert!(classify(LogBf::bf10(a)) <= classify(LogBf::bf10(a + d)));
        prop_assert!(EvidenceLevel::from_two_log_bf(a).index() < 4);
    }

    #[test]
    fn random_partitions_cover_every_observation(n in 8usize..12_000, k in 2usize..60, seed in any::<u64>()) {
        prop_assume!(n >= MIN_PART_SIZE * k);
        let sizes = partition_sizes(n, &Partition::Random, k, &mut replicate_rng(seed, 0)).unwrap();
        prop_assert_eq!(sizes.len(), k);
        prop_assert_eq!(sizes.iter().sum::<usize>(), n);
        prop_assert!(sizes.iter().all(|&s| s >= MIN_PART_SIZE));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jzs_is_even_and_increasing_in_t(t in 0.0..6.0f64, d in 0.05..2.0f64, nu in 3.0..300.0f64, ss in 1.0..100.0f64) {
        let nu = DegreesOfFreedom::new(nu).unwrap();
        let at = jzs_bf10(t, nu, ss).unwrap().two_log_bf;
        prop_assert_eq!(at, jzs_bf10(-t, nu, ss).unwrap().two_log_bf);
        prop_assert!(jzs_bf10(t + d, nu, ss).unwrap().two_log_bf > at);
    }

    #[test]
    fn jzs_synthesis_ignores_study_order(s in studies(6)) {
        let recs = records(&s);
        let mut reversed = recs.clone();
        reversed.reverse();
        let opts = MetaOptions::default();
        let a = meta_bf(MetaMethod::Jzs, &recs, &opts).unwrap().meta_bf.two_log_bf;
        let b = meta_bf(MetaMethod::Jzs, &reversed, &opts).unwrap().meta_bf.two_log_bf;
        prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a.abs()), "{} vs {}", a, b);
    }
}
