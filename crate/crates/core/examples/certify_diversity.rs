//! Full-diversity certification by the stacked-difference rank test.
//!
//! A scheme achieves full diversity when, for every choice of one nonzero
//! codeword difference per component code, the stacked differences have
//! rank `N_t`. Small schemes are checked exhaustively; large ones can only
//! be refuted by sampling.

use ffs::algebra::{golden_exponent, AlgebraicRotation, Constellation, C64};
use ffs::codes::{beamforming_scheme, golden_thread_scheme, t1_scheme};
use ffs::diversity::{certify_full_diversity, CertifyMode, DiversityCertificate, DEFAULT_BUDGET};

fn report(label: &str, cert: &DiversityCertificate, nr: usize) {
    println!(
        "{label:<28} stacks={:<8} min_rank={} lambda*={:.3e} certified={} ft_optimal={} diversity<={}",
        cert.stacks_checked,
        cert.min_rank,
        cert.lambda_star,
        cert.full_diversity_certified,
        cert.ft_optimal,
        cert.upper_bound(nr)
    );
    if let Some(ce) = &cert.counterexample {
        println!("{:<28} counterexample {ce:?}", "");
    }
}

fn main() -> ffs::Result<()> {
    let qam4 = Constellation::square_qam(2);

    let golden = golden_thread_scheme(&qam4)?;
    let cert = certify_full_diversity(&golden, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0)?;
    report("golden_thread QAM4", &cert, 2);

    let t1 = t1_scheme(3, &AlgebraicRotation::builtin(3)?, golden_exponent(), &Constellation::bpsk())?;
    let cert = certify_full_diversity(&t1, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0)?;
    report("t1 Nt=3 BPSK", &cert, 2);

    let t1_qam = t1_scheme(3, &AlgebraicRotation::builtin(3)?, golden_exponent(), &qam4)?;
    let cert = certify_full_diversity(&t1_qam, CertifyMode::Sampled(100_000), DEFAULT_BUDGET, 42)?;
    report("t1 Nt=3 QAM4 (sampled)", &cert, 2);

    // Both beamformers point at antenna 1, so antenna 2 is never used.
    let e1 = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let broken = beamforming_scheme(&[e1.clone(), e1], &qam4)?;
    let cert = certify_full_diversity(&broken, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0)?;
    report("duplicated beamformers", &cert, 2);
    Ok(())
}
