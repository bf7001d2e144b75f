use crate::algebra::{ComplexMatrix, C64};
use crate::codes::{FiniteFeedbackScheme, LinearDispersionCode};
use crate::error::{Error, Result};

/// Average codeword energy `E ||X||_F^2` without the power scale, for
/// independent uniform symbols.
///
/// With `Z_k = a A_k + conj(a) B_k` the terms are independent, so
/// `E ||sum Z_k||^2 = sum_k (E ||Z_k||^2 - ||E Z_k||^2) + ||sum_k E Z_k||^2`.
pub fn code_energy(code: &LinearDispersionCode) -> f64 {
    let points = code.constellation().points();
    let m = points.len() as f64;
    let (t, nt) = (code.t(), code.nt());
    let mut total_mean = ComplexMatrix::zeros(t, nt);
    let mut energy = 0.0;
    for k in 0..code.k() {
        let a = &code.weights()[k];
        let b = code.conj_weights().map(|b| &b[k]);
        let mut mean = ComplexMatrix::zeros(t, nt);
        let mut second = 0.0;
        for &p in points {
            let mut z = a.scale(p);
            if let Some(b) = b {
                z.add_scaled(b, p.conj());
            }
            second += z.frobenius_norm_sqr();
            mean.add_scaled(&z, C64::new(1.0 / m, 0.0));
        }
        energy += second / m - mean.frobenius_norm_sqr();
        total_mean.add_scaled(&mean, C64::new(1.0, 0.0));
    }
    energy + total_mean.frobenius_norm_sqr()
}

/// Sets each code's power scale so that `E ||X||_F^2 = T`.
pub fn power_normalize(scheme: &mut FiniteFeedbackScheme) -> Result<()> {
    for (n, code) in scheme.codes_mut().iter_mut().enumerate() {
        let energy = code_energy(code);
        if !(energy > 0.0 && energy.is_finite()) {
            return Err(Error::PowerNormalization(format!(
                "code {} has average energy {energy}",
                n + 1
            )));
        }
        code.set_power_scale((code.t() as f64 / energy).sqrt());
    }
    Ok(())
}

/// Copy of `scheme` with power scales set.
pub fn power_normalized(scheme: &FiniteFeedbackScheme) -> Result<FiniteFeedbackScheme> {
    let mut s = scheme.clone();
    power_normalize(&mut s)?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Constellation;
    use crate::codes::{alamouti_code, antenna_selection_scheme, golden_thread_scheme};

    fn enumerated_energy(code: &LinearDispersionCode) -> f64 {
        let book = code.codebook(1 << 20).unwrap();
        book.iter().map(|x| x.frobenius_norm_sqr()).sum::<f64>() / book.len() as f64
    }

    #[test]
    fn antenna_selection_scale() {
        let mut s = antenna_selection_scheme(2, &Constellation::square_qam(2)).unwrap();
        power_normalize(&mut s).unwrap();
        for code in s.codes() {
            assert!((code.power_scale() - 0.5f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn alamouti_unit_symbols() {
        let code = alamouti_code(&Constellation::bpsk()).unwrap();
        assert!((enumerated_energy(&code) - 4.0).abs() < 1e-12);
        assert!((code_energy(&code) - 4.0).abs() < 1e-12);
        let s = FiniteFeedbackScheme::new("a", vec![code], crate::codes::FeedbackRule::Constant).unwrap();
        let s = power_normalized(&s).unwrap();
        assert!((s.code(0).power_scale() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let s = golden_thread_scheme(&Constellation::square_qam(4)).unwrap();
        for code in s.codes() {
            assert!((code_energy(code) - enumerated_energy(code)).abs() < 1e-9);
        }
        // A non-zero-mean constellation exercises the mean correction.
        let c = Constellation::custom("skew", vec![(1, 0), (3, 1)]).unwrap();
        let code = alamouti_code(&c).unwrap();
        assert!((code_energy(&code) - enumerated_energy(&code)).abs() < 1e-9);
    }

    #[test]
    fn zero_energy_refused() {
        let c = Constellation::custom("origin", vec![(0, 0)]).unwrap();
        let code = alamouti_code(&c).unwrap();
        let mut s =
            FiniteFeedbackScheme::new("z", vec![code], crate::codes::FeedbackRule::Constant).unwrap();
        assert!(matches!(power_normalize(&mut s), Err(Error::PowerNormalization(_))));
    }
}
