//! Builds one scheme from every family and prints its parameters.
//!
//! Run with `cargo run --example construct_schemes`.

use ffs::algebra::{besicovitch_exponents, golden_exponent, AlgebraicRotation, Constellation};
use ffs::codes::{
    alamouti_code, antenna_selection_scheme, beamforming_scheme, dft_beamformers,
    golden_thread_scheme, no_feedback_scheme, switching_scheme, t1_scheme, threaded_scheme,
    FiniteFeedbackScheme, SchemeSpec,
};

fn describe(s: &FiniteFeedbackScheme) {
    let rate = s.rate().map_or("NA".to_string(), |r| format!("{r}"));
    println!(
        "{:<20} Nt={} N={} T={} R={:<3} {:>4} bpcu  full_rate={:<5} rule={}",
        s.name(),
        s.nt(),
        s.n(),
        s.t(),
        rate,
        s.bpcu(),
        s.is_full_rate(),
        s.rule().label()
    );
}

fn main() -> ffs::Result<()> {
    let qam4 = Constellation::square_qam(2);
    let qam16 = Constellation::square_qam(4);

    let golden = golden_thread_scheme(&qam4)?;
    describe(&golden);

    // Rate-3 scheme on three antennas from the built-in 3x3 rotation.
    let rot3 = AlgebraicRotation::builtin(3)?;
    describe(&t1_scheme(3, &rot3, golden_exponent(), &qam4)?);

    // Two blocks of two channel uses on four antennas.
    let rot4 = AlgebraicRotation::builtin(4)?;
    describe(&threaded_scheme(2, 2, &rot4, &besicovitch_exponents(2), &qam4)?);

    describe(&antenna_selection_scheme(2, &qam16)?);
    describe(&beamforming_scheme(&dft_beamformers(2), &qam16)?);
    describe(&switching_scheme(&qam4, &qam16)?);
    describe(&no_feedback_scheme(alamouti_code(&qam16)?)?);

    // The same schemes can be described in a small text format.
    let spec = SchemeSpec::parse("family = golden_thread\nconstellation = QAM16\n", ".")?;
    describe(&spec.build()?);

    // Codewords of the golden thread scheme: one row, two antennas.
    for n in 0..golden.n() {
        let x = golden.code(n).codeword(&[0, 3])?;
        let entries: Vec<String> = x.row(0).iter().map(|z| format!("{z:.3}")).collect();
        println!("code {} codeword for labels [0, 3]: [{}]", n + 1, entries.join(", "));
    }
    Ok(())
}
