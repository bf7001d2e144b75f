//! Feedback functions: the receiver's choice of component code.
//!
//! The minimum-distance rule picks the code whose smallest received
//! difference `min_d ||X(d) H||_F^2` is largest. The inner minimum runs over
//! all nonzero symbol differences `d` in the closed difference alphabet; for
//! box constellations it is a shortest-vector search in the real lattice
//! model, otherwise a plain scan.

use crate::algebra::constellation::axis_differences;
use crate::algebra::{ComplexMatrix, C64};
use crate::codes::{FeedbackRule, FiniteFeedbackScheme, LinearDispersionCode};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_box, real_to_symbols, RealLatticeModel};

/// Default cap on the number of difference vectors scanned exhaustively.
pub const DIFFERENCE_ENUMERATION_CAP: u64 = 1 << 18;

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackDecision {
    /// Selected code, 0-based.
    pub index: usize,
    pub per_code_metric: Vec<f64>,
    /// Another code attains the same metric.
    pub tie: bool,
}

/// `power_scale^2 ||X(d) H||_F^2`, the quantity both search paths minimize.
pub fn difference_metric(code: &LinearDispersionCode, d: &[C64], h: &ComplexMatrix) -> Result<f64> {
    let xh = code.encode(d)?.matmul(h)?;
    Ok(code.power_scale().powi(2) * xh.frobenius_norm_sqr())
}

fn check_channel(code: &LinearDispersionCode, h: &ComplexMatrix) -> Result<()> {
    if h.rows() != code.nt() {
        return Err(Error::Dimension(format!(
            "channel has {} rows, code has N_t = {}",
            h.rows(),
            code.nt()
        )));
    }
    Ok(())
}

/// Scan over every nonzero `d` in the closed difference alphabet.
pub fn min_distance_exhaustive(code: &LinearDispersionCode, h: &ComplexMatrix) -> Result<f64> {
    min_distance_exhaustive_capped(code, h, DIFFERENCE_ENUMERATION_CAP)
}

pub fn min_distance_exhaustive_capped(
    code: &LinearDispersionCode,
    h: &ComplexMatrix,
    cap: u64,
) -> Result<f64> {
    check_channel(code, h)?;
    let alphabet: Vec<C64> = code
        .constellation()
        .difference_alphabet()
        .into_iter()
        .map(|(r, i)| C64::new(r as f64, i as f64))
        .collect();
    let k = code.k();
    let size = (alphabet.len() as f64).powi(k as i32) - 1.0;
    if size > cap as f64 {
        return Err(Error::EnumerationTooLarge { size, cap });
    }
    let mut idx = vec![0usize; k];
    let mut d = vec![C64::new(0.0, 0.0); k];
    let mut best = f64::INFINITY;
    loop {
        for (s, &i) in d.iter_mut().zip(&idx) {
            *s = alphabet[i];
        }
        if d.iter().any(|z| z.re != 0.0 || z.im != 0.0) {
            best = best.min(difference_metric(code, &d, h)?);
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(best);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < alphabet.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Shortest nonzero vector of the received difference lattice restricted to
/// the difference box. Requires a box constellation.
pub fn min_distance_lattice(code: &LinearDispersionCode, h: &ComplexMatrix) -> Result<f64> {
    check_channel(code, h)?;
    let axes = code.constellation().box_axes().ok_or_else(|| {
        Error::UnsupportedConstellation(format!(
            "{} is not a product of per-axis levels",
            code.constellation().name()
        ))
    })?;
    let re: Vec<f64> = axis_differences(&axes.re_levels).iter().map(|&v| v as f64).collect();
    let im: Vec<f64> = axis_differences(&axes.im_levels).iter().map(|&v| v as f64).collect();
    let levels: Vec<Vec<f64>> = (0..code.k()).flat_map(|_| [re.clone(), im.clone()]).collect();
    let model = RealLatticeModel::new(code, h, code.power_scale())?;
    let tri = model.triangularize(&vec![0.0; model.rows()]);
    let mut best = f64::INFINITY;
    let mut failure = None;
    enumerate_box(&tri, &levels, true, |_, x| {
        match difference_metric(code, &real_to_symbols(x), h) {
            Ok(m) => {
                best = best.min(m);
                m
            }
            Err(e) => {
                failure = Some(e);
                f64::NEG_INFINITY
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None if best.is_finite() => Ok(best),
        // Only the zero vector exists (single-point constellation).
        None => Err(Error::UnsupportedConstellation(
            "difference alphabet has no nonzero element".into(),
        )),
    }
}

/// Lattice search for box constellations, exhaustive scan otherwise.
pub fn min_distance(code: &LinearDispersionCode, h: &ComplexMatrix) -> Result<f64> {
    if code.constellation().box_axes().is_some() {
        min_distance_lattice(code, h)
    } else {
        min_distance_exhaustive(code, h)
    }
}

/// `||u^T H||_F^2`.
pub fn beam_gain(u: &[C64], h: &ComplexMatrix) -> f64 {
    (0..h.cols())
        .map(|j| u.iter().enumerate().map(|(i, &ui)| ui * h[(i, j)]).sum::<C64>().norm_sqr())
        .sum()
}

/// Applies the scheme's feedback rule to `h` (`N_t x N_r`). Ties go to the
/// smallest index.
pub fn select(scheme: &FiniteFeedbackScheme, h: &ComplexMatrix) -> Result<FeedbackDecision> {
    check_channel(scheme.code(0), h)?;
    let metrics: Vec<f64> = match scheme.rule() {
        FeedbackRule::Constant => {
            return Ok(FeedbackDecision {
                index: 0,
                per_code_metric: vec![0.0],
                tie: false,
            })
        }
        FeedbackRule::MinDistance => scheme
            .codes()
            .iter()
            .map(|c| min_distance(c, h))
            .collect::<Result<_>>()?,
        FeedbackRule::NormSelect(vectors) => vectors.iter().map(|u| beam_gain(u, h)).collect(),
    };
    Ok(decide(metrics))
}

fn decide(metrics: Vec<f64>) -> FeedbackDecision {
    let mut index = 0;
    for (n, &m) in metrics.iter().enumerate() {
        if m > metrics[index] {
            index = n;
        }
    }
    let tie = metrics
        .iter()
        .enumerate()
        .any(|(n, &m)| n != index && m == metrics[index]);
    FeedbackDecision {
        index,
        per_code_metric: metrics,
        tie,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Constellation;
    use crate::codes::{antenna_selection_scheme, golden_thread_scheme, no_feedback_scheme};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_channel_gives_zero() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let h = ComplexMatrix::zeros(2, 2);
        assert_eq!(min_distance_exhaustive(s.code(0), &h).unwrap(), 0.0);
        assert_eq!(min_distance_lattice(s.code(0), &h).unwrap(), 0.0);
        let d = select(&s, &h).unwrap();
        assert_eq!(d.index, 0);
        assert!(d.tie);
    }

    #[test]
    fn antenna_selection_min_distance() {
        let s = antenna_selection_scheme(2, &Constellation::square_qam(2)).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![c(0.3, -0.2), c(1.0, 0.5)], vec![c(2.0, 0.0), c(0.0, -1.0)]])
            .unwrap();
        for n in 0..2 {
            let row_norm: f64 = h.row(n).iter().map(|z| z.norm_sqr()).sum();
            let expected = 4.0 * row_norm;
            assert!((min_distance_exhaustive(s.code(n), &h).unwrap() - expected).abs() < 1e-12);
            assert!((min_distance_lattice(s.code(n), &h).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn antenna_selection_picks_stronger_antenna() {
        let s = antenna_selection_scheme(2, &Constellation::square_qam(2)).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        let d = select(&s, &h).unwrap();
        assert_eq!(d.index, 0);
        assert_eq!(d.per_code_metric, vec![4.0, 1.0]);
        assert!(!d.tie);
    }

    #[test]
    fn single_code_always_first() {
        let s = antenna_selection_scheme(2, &Constellation::bpsk()).unwrap();
        let nf = no_feedback_scheme(s.code(1).clone()).unwrap();
        let h = ComplexMatrix::from_rows(&[vec![c(5.0, 0.0)], vec![c(0.0, 0.0)]]).unwrap();
        assert_eq!(select(&nf, &h).unwrap().index, 0);
    }

    #[test]
    fn cap_is_enforced() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let h = ComplexMatrix::identity(2);
        assert!(matches!(
            min_distance_exhaustive_capped(s.code(0), &h, 79),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(min_distance_exhaustive_capped(s.code(0), &h, 80).is_ok());
    }

    #[test]
    fn channel_shape_checked() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        assert!(matches!(
            select(&s, &ComplexMatrix::identity(3)),
            Err(Error::Dimension(_))
        ));
    }
}
