//! Equal bit rate comparison through the command-line front end, run in
//! process: golden thread with QAM4 against DFT beamforming with QAM16,
//! both at 4 bits per channel use.

use std::path::Path;

fn main() {
    let specs = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs");
    let golden = specs.join("golden_thread.spec");
    let beam = specs.join("beamforming_dft_qam16.spec");
    let args = [
        "ffs".as_ref(),
        "compare".as_ref(),
        golden.as_os_str(),
        beam.as_os_str(),
        "--snr".as_ref(),
        "4:16:4".as_ref(),
        "--nr".as_ref(),
        "2".as_ref(),
        "--seed".as_ref(),
        "3".as_ref(),
        "--trials".as_ref(),
        "20000".as_ref(),
    ];
    let code = ffs::cli::run(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    std::process::exit(code);
}
