//! Constructions of the component codes.
//!
//! The full-rate schemes (golden thread, single-phasor `T = 1`, threaded
//! `T > 1`) use minimum-distance feedback; the classical baselines use norm
//! selection or, for a single code, no feedback at all.

use std::f64::consts::PI;

use super::thread::ThreadLayout;
use super::{FeedbackRule, FiniteFeedbackScheme, LinearDispersionCode};
use crate::algebra::{AlgebraicRotation, ComplexMatrix, Constellation, PhasorSet, C64};
use crate::error::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Constants of `Q(i, sqrt5)` used by the golden constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenConstants {
    /// `(1 + sqrt5) / 2`
    pub theta: f64,
    /// `(1 - sqrt5) / 2`, the conjugate of `theta`.
    pub theta_conj: f64,
    /// `1 + i - i theta`
    pub alpha: C64,
    /// `1 + i - i theta_conj`
    pub alpha_conj: C64,
}

pub fn golden_constants() -> GoldenConstants {
    let sqrt5 = 5f64.sqrt();
    let theta = (1.0 + sqrt5) / 2.0;
    let theta_conj = (1.0 - sqrt5) / 2.0;
    GoldenConstants {
        theta,
        theta_conj,
        alpha: C64::new(1.0, 1.0 - theta),
        alpha_conj: C64::new(1.0, 1.0 - theta_conj),
    }
}

/// The two threads of the Golden code as a `N = 2`, `T = 1` scheme on two
/// antennas:
/// `C1 = {[a(x1 + x2 t), s(a(x1 + x2 t))]}`,
/// `C2 = {[a(x1 + x2 t), i s(a(x1 + x2 t))]}`, where `s` swaps `sqrt5 -> -sqrt5`.
pub fn golden_thread_scheme(c: &Constellation) -> Result<FiniteFeedbackScheme> {
    let g = golden_constants();
    let code = |twist: C64| -> Result<LinearDispersionCode> {
        let x1 = ComplexMatrix::row_vector(&[g.alpha, twist * g.alpha_conj]);
        let x2 = ComplexMatrix::row_vector(&[
            g.alpha * g.theta,
            twist * g.alpha_conj * g.theta_conj,
        ]);
        LinearDispersionCode::new(vec![x1, x2], c.clone())
    };
    FiniteFeedbackScheme::new(
        "golden_thread",
        vec![code(real(1.0))?, code(I)?],
        FeedbackRule::MinDistance,
    )
}

/// The full Golden code as a single `2 x 2` code (four symbols).
pub fn golden_code(c: &Constellation) -> Result<LinearDispersionCode> {
    let g = golden_constants();
    let at = |i: usize, j: usize, v: C64| {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(i, j)] = v;
        m
    };
    let weights = vec![
        &at(0, 0, g.alpha) + &at(1, 1, g.alpha_conj),
        &at(0, 0, g.alpha * g.theta) + &at(1, 1, g.alpha_conj * g.theta_conj),
        &at(1, 0, g.alpha) + &at(0, 1, I * g.alpha_conj),
        &at(1, 0, g.alpha * g.theta) + &at(0, 1, I * g.alpha_conj * g.theta_conj),
    ];
    LinearDispersionCode::new(weights, c.clone())
}

/// `T = 1` scheme with `N = N_t` codes: the codeword of code `n` is
/// `s^T = (U a)^T` with component `n` multiplied by `exp(i beta)`.
/// `beta` is the imaginary part of the exponent.
pub fn t1_scheme(
    nt: usize,
    u: &AlgebraicRotation,
    beta: f64,
    c: &Constellation,
) -> Result<FiniteFeedbackScheme> {
    if u.dim() != nt {
        return Err(Error::Dimension(format!(
            "rotation is {0}x{0} but N_t = {nt}",
            u.dim()
        )));
    }
    let gamma = C64::new(0.0, beta).exp();
    let m = u.matrix();
    let codes = (0..nt)
        .map(|n| {
            let weights = (0..nt)
                .map(|j| {
                    let row: Vec<C64> = (0..nt)
                        .map(|l| if l == n { gamma * m[(l, j)] } else { m[(l, j)] })
                        .collect();
                    ComplexMatrix::row_vector(&row)
                })
                .collect();
            LinearDispersionCode::new(weights, c.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteFeedbackScheme::new("t1", codes, FeedbackRule::MinDistance)
}

/// Threaded scheme for `N_t = N T`, `T > 1`.
///
/// `T` symbol vectors `a_l` are rotated, `s_l = U a_l`, and each `s_l` is cut
/// into `N` pieces of length `T`. Block `b` of the first code is the threaded
/// matrix of the `b`-th pieces, with thread `l` of block 0 scaled by
/// `gamma_l`. Code `m` is the first code with its blocks cyclically shifted
/// `m` places to the right. Symbol `k = l * N_t + j` is `a_l(j)`.
pub fn threaded_scheme(
    n: usize,
    t: usize,
    u: &AlgebraicRotation,
    phasors: &PhasorSet,
    c: &Constellation,
) -> Result<FiniteFeedbackScheme> {
    if t < 2 {
        return Err(Error::Dimension("threaded schemes need T > 1".into()));
    }
    let nt = n * t;
    if u.dim() != nt {
        return Err(Error::Dimension(format!(
            "rotation is {0}x{0} but N T = {nt}",
            u.dim()
        )));
    }
    if phasors.len() != t {
        return Err(Error::Dimension(format!(
            "{} phasors for T = {t}",
            phasors.len()
        )));
    }
    let layout = ThreadLayout::new(t);
    let rot = u.matrix();
    let gammas = phasors.gammas();
    let codes = (0..n)
        .map(|shift| {
            let mut weights = Vec::with_capacity(nt * t);
            for (l, &gamma) in gammas.iter().enumerate() {
                for j in 0..nt {
                    let mut w = ComplexMatrix::zeros(t, nt);
                    for b in 0..n {
                        let position = (b + shift) % n;
                        let scale = if b == 0 { gamma } else { real(1.0) };
                        for i in 0..t {
                            let col = position * t + layout.column(l, i);
                            w[(i, col)] = scale * rot[(b * t + i, j)];
                        }
                    }
                    weights.push(w);
                }
            }
            LinearDispersionCode::new(weights, c.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    FiniteFeedbackScheme::new("threaded", codes, FeedbackRule::MinDistance)
}

/// `N = N_t` single-antenna codes `{s e_n^T}` with norm-based selection.
pub fn antenna_selection_scheme(nt: usize, c: &Constellation) -> Result<FiniteFeedbackScheme> {
    if nt < 2 {
        return Err(Error::Dimension("antenna selection needs N_t > 1".into()));
    }
    let vectors: Vec<Vec<C64>> = (0..nt)
        .map(|n| (0..nt).map(|l| real(if l == n { 1.0 } else { 0.0 })).collect())
        .collect();
    Ok(beamforming_scheme(&vectors, c)?.with_name("antenna_selection"))
}

/// `C_n = {a u_n^T}` with feedback `argmax_n ||u_n^T H||_F^2`.
pub fn beamforming_scheme(vectors: &[Vec<C64>], c: &Constellation) -> Result<FiniteFeedbackScheme> {
    for (index, v) in vectors.iter().enumerate() {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidBeamformer { index, norm });
        }
    }
    let codes = vectors
        .iter()
        .map(|v| LinearDispersionCode::new(vec![ComplexMatrix::row_vector(v)], c.clone()))
        .collect::<Result<Vec<_>>>()?;
    FiniteFeedbackScheme::new("beamforming", codes, FeedbackRule::NormSelect(vectors.to_vec()))
}

/// Columns of the unitary `N_t`-point DFT matrix.
pub fn dft_beamformers(nt: usize) -> Vec<Vec<C64>> {
    let scale = 1.0 / (nt as f64).sqrt();
    (0..nt)
        .map(|n| {
            (0..nt)
                .map(|k| C64::from_polar(scale, -2.0 * PI * (n * k) as f64 / nt as f64))
                .collect()
        })
        .collect()
}

/// Two-antenna co-phasing vectors `(1, exp(i 2 pi n / N)) / sqrt2`, `n = 1..N`.
pub fn phase_feedback_vectors(n: usize) -> Vec<Vec<C64>> {
    let s = 1.0 / 2f64.sqrt();
    (1..=n)
        .map(|k| vec![real(s), C64::from_polar(s, 2.0 * PI * k as f64 / n as f64)])
        .collect()
}

/// Alamouti code, rows are channel uses: `[[s1, s2], [-conj(s2), conj(s1)]]`.
pub fn alamouti_code(c: &Constellation) -> Result<LinearDispersionCode> {
    let at = |i: usize, j: usize, v: f64| {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(i, j)] = real(v);
        m
    };
    LinearDispersionCode::with_conjugates(
        vec![at(0, 0, 1.0), at(0, 1, 1.0)],
        vec![at(1, 1, 1.0), at(1, 0, -1.0)],
        c.clone(),
    )
}

/// Uncoded spatial multiplexing: one independent symbol per matrix entry,
/// row-major.
pub fn spatial_multiplexing_code(t: usize, nt: usize, c: &Constellation) -> Result<LinearDispersionCode> {
    let weights = (0..t * nt)
        .map(|k| {
            let mut m = ComplexMatrix::zeros(t, nt);
            m[(k / nt, k % nt)] = real(1.0);
            m
        })
        .collect();
    LinearDispersionCode::new(weights, c.clone())
}

/// Alamouti over `c_large` switched against 2x2 spatial multiplexing over
/// `c_small` by minimum-distance feedback. Requires `|c_large| = |c_small|^2`
/// so both codebooks carry the same bits.
pub fn switching_scheme(c_small: &Constellation, c_large: &Constellation) -> Result<FiniteFeedbackScheme> {
    if c_large.bits_per_symbol() != 2 * c_small.bits_per_symbol() {
        return Err(Error::BitrateMismatch(format!(
            "{} has {} points but {} squared is {}",
            c_large.name(),
            c_large.len(),
            c_small.name(),
            c_small.len() * c_small.len()
        )));
    }
    FiniteFeedbackScheme::new(
        "switching",
        vec![alamouti_code(c_large)?, spatial_multiplexing_code(2, 2, c_small)?],
        FeedbackRule::MinDistance,
    )
}

/// A single code used without feedback.
pub fn no_feedback_scheme(code: LinearDispersionCode) -> Result<FiniteFeedbackScheme> {
    FiniteFeedbackScheme::new("no_feedback", vec![code], FeedbackRule::Constant)
}
