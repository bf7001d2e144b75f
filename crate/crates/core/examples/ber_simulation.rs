//! Seeded BER sweep of the golden thread scheme with a diversity slope fit.
//! The results are written as CSV to standard output.

use ffs::algebra::Constellation;
use ffs::codes::golden_thread_scheme;
use ffs::simulator::{estimate_diversity_slope, run_ber, write_results_csv, SimConfig, SlopeWindow};

fn main() -> ffs::Result<()> {
    let scheme = golden_thread_scheme(&Constellation::square_qam(2))?;
    let mut config = SimConfig::new(vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0], 7);
    config.max_trials = 40_000;
    config.target_bit_errors = 200;

    let result = run_ber(&scheme, 2, &config)?;
    let manifest = vec![format!("example ber_simulation, seed {}", config.seed)];
    write_results_csv(&mut std::io::stdout().lock(), &manifest, std::slice::from_ref(&result))?;

    match estimate_diversity_slope(&result, SlopeWindow::SnrDb(8.0, 20.0)) {
        Ok(slope) => eprintln!("slope over 8..20 dB: {slope:.2}"),
        Err(e) => eprintln!("slope: {e}"),
    }
    Ok(())
}
