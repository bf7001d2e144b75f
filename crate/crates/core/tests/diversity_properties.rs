use ffs::algebra::{besicovitch_exponents, golden_exponent, AlgebraicRotation, Constellation, C64};
use ffs::codes::{
    beamforming_scheme, golden_thread_scheme, no_feedback_scheme, spatial_multiplexing_code, t1_scheme,
    threaded_scheme,
};
use ffs::diversity::{certify_full_diversity, stack_differences, CertifyMode, DEFAULT_BUDGET};

#[test]
fn t1_schemes_certify_at_bpsk() {
    let bpsk = Constellation::bpsk();
    for nt in 2..=4 {
        let u = AlgebraicRotation::builtin(nt).unwrap();
        let scheme = t1_scheme(nt, &u, golden_exponent(), &bpsk).unwrap();
        let cert = certify_full_diversity(&scheme, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(cert.min_rank, nt, "nt = {nt}");
        assert!(cert.lambda_star > 0.0);
        assert!(cert.full_diversity_certified && cert.ft_optimal);
        // N = N_t codes, each with 3^N_t - 1 nonzero BPSK differences.
        assert_eq!(cert.stacks_checked, (3u64.pow(nt as u32) - 1).pow(nt as u32));
    }
}

#[test]
fn sampling_never_undercuts_exhaustive_lambda() {
    let qam4 = Constellation::square_qam(2);
    let golden = golden_thread_scheme(&qam4).unwrap();
    let t1 = t1_scheme(3, &AlgebraicRotation::builtin(3).unwrap(), golden_exponent(), &Constellation::bpsk()).unwrap();
    for scheme in [golden, t1] {
        let exact = certify_full_diversity(&scheme, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
        for seed in 0..3 {
            let sampled = certify_full_diversity(&scheme, CertifyMode::Sampled(20_000), DEFAULT_BUDGET, seed).unwrap();
            assert!(sampled.min_rank >= exact.min_rank);
            assert!(sampled.lambda_star >= exact.lambda_star * (1.0 - 1e-12));
            assert!(!sampled.full_diversity_certified);
        }
    }
}

#[test]
fn sampled_refutation_matches_exhaustive() {
    let e1 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let scheme = beamforming_scheme(&[e1.clone(), e1], &Constellation::square_qam(2)).unwrap();
    let exact = certify_full_diversity(&scheme, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
    let sampled = certify_full_diversity(&scheme, CertifyMode::Sampled(1000), DEFAULT_BUDGET, 9).unwrap();
    assert_eq!(exact.min_rank, 1);
    assert_eq!(sampled.min_rank, 1);
    for cert in [&exact, &sampled] {
        let ce = cert.counterexample.as_ref().expect("counterexample");
        let diffs: Vec<Vec<C64>> = ce
            .iter()
            .map(|d| d.iter().map(|&(r, i)| C64::new(r as f64, i as f64)).collect())
            .collect();
        assert_eq!(stack_differences(&scheme, &diffs).unwrap().rank(1e-9), 1);
    }
    assert_eq!(exact.upper_bound(2), 2);
}

#[test]
fn too_few_rows_cannot_reach_full_rank() {
    let code = spatial_multiplexing_code(1, 2, &Constellation::bpsk()).unwrap();
    let scheme = no_feedback_scheme(code).unwrap();
    let cert = certify_full_diversity(&scheme, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
    assert_eq!((scheme.n() * scheme.t(), scheme.nt()), (1, 2));
    assert!(cert.min_rank < 2);
    assert!(!cert.full_diversity_certified && !cert.ft_optimal);
}

#[test]
fn threaded_qam4_not_refuted_by_sampling() {
    let scheme = threaded_scheme(
        2,
        2,
        &AlgebraicRotation::builtin(4).unwrap(),
        &besicovitch_exponents(2),
        &Constellation::square_qam(2),
    )
    .unwrap();
    let cert = certify_full_diversity(&scheme, CertifyMode::Sampled(100_000), DEFAULT_BUDGET, 3).unwrap();
    assert_eq!(cert.min_rank, 4);
    assert!(cert.counterexample.is_none());
    assert!(cert.lambda_star > 0.0);
}
