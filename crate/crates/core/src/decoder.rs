//! Maximum-likelihood decoding of `Y = sqrt(E) X H + W`.
//!
//! Both decoders minimize the same metric, computed by
//! [`received_metric`], and break exact ties toward the lexicographically
//! smallest label vector, so their outputs are identical.

use std::cmp::Ordering;

use crate::algebra::ComplexMatrix;
use crate::codes::{LinearDispersionCode, CODEBOOK_ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::lattice::{enumerate_box, stack_real, RealLatticeModel};

/// `||Y - sqrt(E) power_scale X(labels) H||_F^2`.
pub fn received_metric(
    code: &LinearDispersionCode,
    labels: &[usize],
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    e: f64,
) -> Result<f64> {
    let xh = code.encode_labels(labels)?.matmul(h)?;
    let gain = e.sqrt() * code.power_scale();
    Ok(y
        .as_slice()
        .iter()
        .zip(xh.as_slice())
        .map(|(a, b)| (a - b * gain).norm_sqr())
        .sum())
}

fn check_shapes(code: &LinearDispersionCode, y: &ComplexMatrix, h: &ComplexMatrix) -> Result<()> {
    if h.rows() != code.nt() || y.shape() != (code.t(), h.cols()) {
        return Err(Error::Dimension(format!(
            "Y is {}x{} and H is {}x{} for a {}x{} code",
            y.rows(),
            y.cols(),
            h.rows(),
            h.cols(),
            code.t(),
            code.nt()
        )));
    }
    Ok(())
}

/// Keeps the smallest `(metric, labels)` pair.
struct Best {
    metric: f64,
    labels: Vec<usize>,
}

impl Best {
    fn new(k: usize) -> Self {
        Self {
            metric: f64::INFINITY,
            labels: vec![usize::MAX; k],
        }
    }

    fn offer(&mut self, metric: f64, labels: &[usize]) {
        let better = match metric.partial_cmp(&self.metric) {
            Some(Ordering::Less) => true,
            Some(Ordering::Equal) => labels < self.labels.as_slice(),
            _ => false,
        };
        if better {
            self.metric = metric;
            self.labels.copy_from_slice(labels);
        }
    }
}

/// Scans the whole codebook in label order.
pub fn ml_decode_exhaustive(
    code: &LinearDispersionCode,
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    e: f64,
) -> Result<Vec<usize>> {
    check_shapes(code, y, h)?;
    let size = code.codebook_size();
    if size > CODEBOOK_ENUMERATION_CAP as f64 {
        return Err(Error::EnumerationTooLarge {
            size,
            cap: CODEBOOK_ENUMERATION_CAP,
        });
    }
    let m = code.constellation().len();
    let k = code.k();
    let mut labels = vec![0usize; k];
    let mut best = Best::new(k);
    for _ in 0..size as u64 {
        best.offer(received_metric(code, &labels, y, h, e)?, &labels);
        for l in labels.iter_mut().rev() {
            *l += 1;
            if *l < m {
                break;
            }
            *l = 0;
        }
    }
    Ok(best.labels)
}

/// Depth-first sphere decoder with Schnorr-Euchner ordering over the
/// constellation box. Requires a box constellation.
pub fn sphere_decode(
    code: &LinearDispersionCode,
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    e: f64,
) -> Result<Vec<usize>> {
    check_shapes(code, y, h)?;
    let axes = code.constellation().box_axes().ok_or_else(|| {
        Error::UnsupportedConstellation(format!(
            "{} is not a product of per-axis levels",
            code.constellation().name()
        ))
    })?;
    let re: Vec<f64> = axes.re_levels.iter().map(|&v| v as f64).collect();
    let im: Vec<f64> = axes.im_levels.iter().map(|&v| v as f64).collect();
    let levels: Vec<Vec<f64>> = (0..code.k()).flat_map(|_| [re.clone(), im.clone()]).collect();
    let model = RealLatticeModel::new(code, h, e.sqrt() * code.power_scale())?;
    let tri = model.triangularize(&stack_real(y));
    let mut best = Best::new(code.k());
    let mut labels = vec![0usize; code.k()];
    let mut failure = None;
    enumerate_box(&tri, &levels, false, |idx, _| {
        for (k, l) in labels.iter_mut().enumerate() {
            *l = axes.label(idx[2 * k], idx[2 * k + 1]);
        }
        match received_metric(code, &labels, y, h, e) {
            Ok(m) => {
                best.offer(m, &labels);
                m
            }
            Err(err) => {
                failure = Some(err);
                f64::NEG_INFINITY
            }
        }
    });
    match failure {
        Some(err) => Err(err),
        None => Ok(best.labels),
    }
}

/// Sphere decoding for box constellations, exhaustive search otherwise.
pub fn decode(
    code: &LinearDispersionCode,
    y: &ComplexMatrix,
    h: &ComplexMatrix,
    e: f64,
) -> Result<Vec<usize>> {
    if code.constellation().box_axes().is_some() {
        sphere_decode(code, y, h, e)
    } else {
        ml_decode_exhaustive(code, y, h, e)
    }
}
