//! Seeded Monte Carlo bit error rate simulation.
//!
//! Each trial draws a fresh channel (one codeword per fading block), lets
//! the receiver pick a code, sends uniformly random bits with that code and
//! decodes with the same code. The SNR is `E/N0` with `E ||X||_F^2 = T`
//! after power normalization and unit energy per channel use.
//!
//! Trials are grouped in fixed-size batches. Batch `b` at SNR index `s` uses
//! its own ChaCha8 stream, so any batch can be computed independently of the
//! others and results do not depend on the number of worker threads.

mod channel;
mod csv;
mod power;
mod slope;

pub use channel::{complex_gaussian, ChannelModel};
pub use csv::{read_results_csv, write_gplot, write_results_csv, CSV_HEADER};
pub use power::{code_energy, power_normalize, power_normalized};
pub use slope::{estimate_diversity_slope, fit_slope, SlopeWindow};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::FiniteFeedbackScheme;
use crate::decoder::decode;
use crate::error::{Error, Result};
use crate::feedback::select;

/// Trials per RNG stream.
pub const BATCH_TRIALS: u64 = 512;

/// Batches evaluated between early-stopping checks.
const BATCHES_PER_ROUND: u64 = 8;

/// Environment variable read when `workers` is zero.
pub const WORKERS_ENV: &str = "FFS_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub snr_db: Vec<f64>,
    pub max_trials: u64,
    /// Stop an SNR point once this many bit errors are counted; 0 disables.
    pub target_bit_errors: u64,
    pub seed: u64,
    /// Worker threads; 0 means `FFS_WORKERS` or the available parallelism.
    pub workers: usize,
}

impl SimConfig {
    pub fn new(snr_db: Vec<f64>, seed: u64) -> Self {
        Self {
            snr_db,
            max_trials: 100_000,
            target_bit_errors: 200,
            seed,
            workers: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::Parse("empty SNR list".into()));
        }
        if self.max_trials == 0 {
            return Err(Error::Parse("max_trials must be at least 1".into()));
        }
        if let Some(s) = self.snr_db.iter().find(|s| !s.is_finite()) {
            return Err(Error::Parse(format!("SNR {s} is not finite")));
        }
        Ok(())
    }
}

/// Resolves a worker count: explicit, then `FFS_WORKERS`, then the number of
/// available cores.
pub fn resolve_workers(workers: usize) -> usize {
    if workers > 0 {
        return workers;
    }
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnrPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl SnrPoint {
    /// BER with a normal-approximation 95% interval clamped to `[0, 1]`.
    pub fn new(snr_db: f64, trials: u64, bits: u64, bit_errors: u64) -> Self {
        let ber = if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 };
        let half = if bits == 0 {
            0.0
        } else {
            1.96 * (ber * (1.0 - ber) / bits as f64).sqrt()
        };
        Self {
            snr_db,
            trials,
            bits,
            bit_errors,
            ber,
            ci95_low: (ber - half).max(0.0),
            ci95_high: (ber + half).min(1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub scheme: String,
    pub seed: u64,
    pub bpcu: f64,
    pub nr: usize,
    pub points: Vec<SnrPoint>,
}

#[derive(Debug, Clone, Copy, Default)]
struct BatchCount {
    trials: u64,
    bits: u64,
    errors: u64,
}

fn batch_rng(seed: u64, snr_index: usize, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 40) | batch);
    rng
}

/// Runs `trials` trials of one batch.
fn run_batch(
    scheme: &FiniteFeedbackScheme,
    channel: &ChannelModel,
    mut rng: ChaCha8Rng,
    trials: u64,
) -> Result<BatchCount> {
    let mut count = BatchCount::default();
    let mut labels = Vec::new();
    for _ in 0..trials {
        let h = channel.draw_channel(&mut rng);
        let choice = select(scheme, &h)?.index;
        let code = scheme.code(choice);
        let m = code.constellation().len();
        labels.clear();
        labels.extend((0..code.k()).map(|_| rng.random_range(0..m)));
        let noise = channel.draw_noise(code.t(), &mut rng);
        let y = &code.codeword(&labels)?.matmul(&h)? + &noise;
        let decoded = decode(code, &y, &h, 1.0)?;
        count.errors += labels
            .iter()
            .zip(&decoded)
            .map(|(a, b)| (a ^ b).count_ones() as u64)
            .sum::<u64>();
        count.bits += code.bits_per_codeword() as u64;
        count.trials += 1;
    }
    Ok(count)
}

fn run_point(
    scheme: &FiniteFeedbackScheme,
    nr: usize,
    config: &SimConfig,
    snr_index: usize,
) -> Result<SnrPoint> {
    let snr_db = config.snr_db[snr_index];
    let channel = ChannelModel::at_snr_db(scheme.nt(), nr, snr_db);
    let batches = config.max_trials.div_ceil(BATCH_TRIALS);
    let mut total = BatchCount::default();
    let mut next = 0;
    while next < batches {
        let end = (next + BATCHES_PER_ROUND).min(batches);
        let counts = (next..end)
            .into_par_iter()
            .map(|b| {
                let trials = BATCH_TRIALS.min(config.max_trials - b * BATCH_TRIALS);
                run_batch(scheme, &channel, batch_rng(config.seed, snr_index, b), trials)
            })
            .collect::<Result<Vec<_>>>()?;
        for c in counts {
            total.trials += c.trials;
            total.bits += c.bits;
            total.errors += c.errors;
            if config.target_bit_errors > 0 && total.errors >= config.target_bit_errors {
                return Ok(SnrPoint::new(snr_db, total.trials, total.bits, total.errors));
            }
        }
        next = end;
    }
    Ok(SnrPoint::new(snr_db, total.trials, total.bits, total.errors))
}

/// BER of `scheme` with `nr` receive antennas at every SNR of `config`. The
/// scheme is power normalized first.
pub fn run_ber(scheme: &FiniteFeedbackScheme, nr: usize, config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    if nr == 0 {
        return Err(Error::Dimension("need at least one receive antenna".into()));
    }
    let scheme = power_normalized(scheme)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_workers(config.workers))
        .build()
        .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    let points = pool.install(|| {
        (0..config.snr_db.len())
            .map(|i| run_point(&scheme, nr, config, i))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SimResult {
        scheme: scheme.name().to_string(),
        seed: config.seed,
        bpcu: scheme.bpcu(),
        nr,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Constellation;
    use crate::codes::{alamouti_code, golden_thread_scheme, no_feedback_scheme};

    #[test]
    fn interval_brackets_estimate() {
        let p = SnrPoint::new(0.0, 10, 40, 3);
        assert_eq!(p.ber, 0.075);
        assert!(p.ci95_low < p.ber && p.ber < p.ci95_high);
        let z = SnrPoint::new(0.0, 10, 40, 0);
        assert_eq!((z.ci95_low, z.ci95_high), (0.0, 0.0));
    }

    #[test]
    fn same_seed_same_result() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let mut cfg = SimConfig::new(vec![0.0, 6.0], 11);
        cfg.max_trials = 1500;
        cfg.workers = 1;
        let a = run_ber(&s, 1, &cfg).unwrap();
        cfg.workers = 3;
        let b = run_ber(&s, 1, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points[0].bits, 4 * a.points[0].trials);
        cfg.seed = 12;
        assert_ne!(run_ber(&s, 1, &cfg).unwrap(), a);
    }

    #[test]
    fn early_stop_respects_target() {
        let s = no_feedback_scheme(alamouti_code(&Constellation::square_qam(2)).unwrap()).unwrap();
        let mut cfg = SimConfig::new(vec![0.0], 1);
        cfg.max_trials = 1_000_000;
        cfg.target_bit_errors = 50;
        let r = run_ber(&s, 1, &cfg).unwrap();
        assert!(r.points[0].bit_errors >= 50);
        assert!(r.points[0].trials < 1_000_000);
        assert_eq!(r.points[0].trials % BATCH_TRIALS, 0);
    }

    #[test]
    fn config_validation() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        assert!(run_ber(&s, 1, &SimConfig::new(vec![], 1)).is_err());
        let mut cfg = SimConfig::new(vec![1.0], 1);
        cfg.max_trials = 0;
        assert!(run_ber(&s, 1, &cfg).is_err());
        assert!(run_ber(&s, 0, &SimConfig::new(vec![1.0], 1)).is_err());
    }
}
