use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{ComplexMatrix, C64};

/// Quasi-static Rayleigh fading: `H` has i.i.d. `CN(0, 1)` entries, the
/// noise has i.i.d. `CN(0, N0)` entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub nt: usize,
    pub nr: usize,
    pub noise_variance: f64,
}

/// One `CN(0, variance)` sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, variance: f64) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng, variance)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite samples")
}

impl ChannelModel {
    /// `N0 = 10^(-snr_db / 10)` for unit transmit energy per channel use.
    pub fn at_snr_db(nt: usize, nr: usize, snr_db: f64) -> Self {
        Self {
            nt,
            nr,
            noise_variance: 10f64.powf(-snr_db / 10.0),
        }
    }

    /// `N_t x N_r` fading matrix.
    pub fn draw_channel<R: Rng + ?Sized>(&self, rng: &mut R) -> ComplexMatrix {
        gaussian_matrix(rng, self.nt, self.nr, 1.0)
    }

    /// `T x N_r` noise matrix.
    pub fn draw_noise<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> ComplexMatrix {
        gaussian_matrix(rng, t, self.nr, self.noise_variance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn second_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = ChannelModel::at_snr_db(2, 2, 3.0);
        let draws = 250_000;
        let (mut h2, mut w2, mut h_mean) = (0.0, 0.0, C64::new(0.0, 0.0));
        for _ in 0..draws {
            let h = model.draw_channel(&mut rng);
            let w = model.draw_noise(1, &mut rng);
            h2 += h.frobenius_norm_sqr();
            h_mean += h.as_slice().iter().sum::<C64>();
            w2 += w.frobenius_norm_sqr();
        }
        let h2 = h2 / (4 * draws) as f64;
        let w2 = w2 / (2 * draws) as f64;
        assert!((h2 - 1.0).abs() < 0.01, "{h2}");
        assert!((w2 / model.noise_variance - 1.0).abs() < 0.01, "{w2}");
        assert!((h_mean / (4 * draws) as f64).norm() < 0.01);
    }
}
