//! One transmission through a random channel: the receiver picks a code,
//! the transmitter encodes with it and the receiver decodes.

use ffs::algebra::Constellation;
use ffs::codes::{golden_thread_scheme, labels_to_bits};
use ffs::decoder::{ml_decode_exhaustive, sphere_decode};
use ffs::feedback::{min_distance_exhaustive, select};
use ffs::simulator::{power_normalized, ChannelModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> ffs::Result<()> {
    let scheme = power_normalized(&golden_thread_scheme(&Constellation::square_qam(2))?)?;
    let channel = ChannelModel::at_snr_db(scheme.nt(), 2, 12.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    for trial in 0..5 {
        let h = channel.draw_channel(&mut rng);
        let decision = select(&scheme, &h)?;
        let code = scheme.code(decision.index);

        // The lattice search and a plain scan agree on the minimum distance.
        let scan = min_distance_exhaustive(code, &h)?;
        assert_eq!(scan, decision.per_code_metric[decision.index]);

        let labels: Vec<usize> = (0..code.k()).map(|_| rng.random_range(0..4)).collect();
        let y = &code.codeword(&labels)?.matmul(&h)? + &channel.draw_noise(code.t(), &mut rng);
        let sphere = sphere_decode(code, &y, &h, 1.0)?;
        let exhaustive = ml_decode_exhaustive(code, &y, &h, 1.0)?;
        assert_eq!(sphere, exhaustive);

        let sent = labels_to_bits(&labels, code.constellation());
        let got = labels_to_bits(&sphere, code.constellation());
        let errors = sent.iter().zip(&got).filter(|(a, b)| a != b).count();
        println!(
            "trial {trial}: metrics {:.3?} -> code {}{}, sent {sent:?}, decoded {got:?}, {errors} bit errors",
            decision.per_code_metric,
            decision.index + 1,
            if decision.tie { " (tie)" } else { "" },
        );
    }
    Ok(())
}
