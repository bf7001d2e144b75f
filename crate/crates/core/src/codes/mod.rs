//! Linear dispersion codes and finite feedback schemes.
//!
//! Every component code is stored in dispersion form
//! `X = sum_k (s_k A_k + conj(s_k) B_k)`. The conjugate weights `B_k` are zero
//! for all of the algebraic constructions; they exist so that the Alamouti
//! code can be expressed in the same form.

mod bits;
mod construct;
mod spec_file;
mod thread;

pub use bits::{bits_to_labels, bits_to_symbols, labels_to_bits, symbols_to_bits};
pub use construct::{
    alamouti_code, antenna_selection_scheme, beamforming_scheme, dft_beamformers,
    golden_code, golden_constants, golden_thread_scheme, no_feedback_scheme, phase_feedback_vectors,
    spatial_multiplexing_code, switching_scheme, t1_scheme, threaded_scheme, GoldenConstants,
};
pub use spec_file::{parse_beamformer_file, Family, SchemeSpec};
pub use thread::{pi_shift, pi_shift_codeword, thread_matrix, ThreadLayout};

use crate::algebra::{ComplexMatrix, Constellation, C64, RANK_TOL};
use crate::error::{Error, Result};

/// Default cap on explicit codebook enumeration.
pub const CODEBOOK_ENUMERATION_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearDispersionCode {
    t: usize,
    nt: usize,
    weights: Vec<ComplexMatrix>,
    conj_weights: Option<Vec<ComplexMatrix>>,
    constellation: Constellation,
    power_scale: f64,
}

impl LinearDispersionCode {
    /// Complex-linear code `X = sum_k s_k A_k`.
    pub fn new(weights: Vec<ComplexMatrix>, constellation: Constellation) -> Result<Self> {
        Self::build(weights, None, constellation)
    }

    /// Widely-linear code `X = sum_k (s_k A_k + conj(s_k) B_k)`.
    pub fn with_conjugates(
        weights: Vec<ComplexMatrix>,
        conj_weights: Vec<ComplexMatrix>,
        constellation: Constellation,
    ) -> Result<Self> {
        if conj_weights.len() != weights.len() {
            return Err(Error::Dimension(format!(
                "{} weights but {} conjugate weights",
                weights.len(),
                conj_weights.len()
            )));
        }
        Self::build(weights, Some(conj_weights), constellation)
    }

    fn build(
        weights: Vec<ComplexMatrix>,
        conj_weights: Option<Vec<ComplexMatrix>>,
        constellation: Constellation,
    ) -> Result<Self> {
        let first = weights
            .first()
            .ok_or_else(|| Error::Dimension("a code needs at least one symbol".into()))?;
        let (t, nt) = first.shape();
        let all = weights.iter().chain(conj_weights.iter().flatten());
        if let Some(bad) = all.clone().find(|w| w.shape() != (t, nt)) {
            return Err(Error::Dimension(format!(
                "weight of shape {:?} in a {t}x{nt} code",
                bad.shape()
            )));
        }
        let code = Self {
            t,
            nt,
            weights,
            conj_weights,
            constellation,
            power_scale: 1.0,
        };
        code.check_independent()?;
        Ok(code)
    }

    /// Rejects codes whose symbols are not independently recoverable.
    fn check_independent(&self) -> Result<()> {
        let k = self.k();
        let dim = self.t * self.nt;
        let (rows, cols, data) = if self.conj_weights.is_none() {
            let mut m = ComplexMatrix::zeros(dim, k);
            for (j, w) in self.weights.iter().enumerate() {
                for (i, &z) in w.as_slice().iter().enumerate() {
                    m[(i, j)] = z;
                }
            }
            (dim, k, m)
        } else {
            let mut m = ComplexMatrix::zeros(2 * dim, 2 * k);
            for j in 0..k {
                let (re, im) = self.real_generators(j);
                for (i, &z) in re.as_slice().iter().enumerate() {
                    m[(2 * i, 2 * j)] = C64::new(z.re, 0.0);
                    m[(2 * i + 1, 2 * j)] = C64::new(z.im, 0.0);
                }
                for (i, &z) in im.as_slice().iter().enumerate() {
                    m[(2 * i, 2 * j + 1)] = C64::new(z.re, 0.0);
                    m[(2 * i + 1, 2 * j + 1)] = C64::new(z.im, 0.0);
                }
            }
            (2 * dim, 2 * k, m)
        };
        if data.rank(RANK_TOL) < cols.min(rows) || rows < cols {
            return Err(Error::Dimension(
                "dispersion weights are linearly dependent".into(),
            ));
        }
        Ok(())
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    /// Number of complex symbols per codeword.
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[ComplexMatrix] {
        &self.weights
    }

    pub fn conj_weights(&self) -> Option<&[ComplexMatrix]> {
        self.conj_weights.as_deref()
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn power_scale(&self) -> f64 {
        self.power_scale
    }

    pub fn set_power_scale(&mut self, scale: f64) {
        assert!(scale > 0.0 && scale.is_finite(), "power scale must be positive");
        self.power_scale = scale;
    }

    /// Rate in complex symbols per channel use.
    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.t as f64
    }

    pub fn is_full_rate(&self) -> bool {
        self.k() == self.nt * self.t
    }

    /// `log2 |codebook|`.
    pub fn bits_per_codeword(&self) -> usize {
        self.k() * self.constellation.bits_per_symbol()
    }

    pub fn codebook_size(&self) -> f64 {
        (self.constellation.len() as f64).powi(self.k() as i32)
    }

    /// Matrices multiplying `Re(s_k)` and `Im(s_k)`: `A + B` and `i (A - B)`.
    pub fn real_generators(&self, k: usize) -> (ComplexMatrix, ComplexMatrix) {
        let a = &self.weights[k];
        match &self.conj_weights {
            None => (a.clone(), a.scale(C64::new(0.0, 1.0))),
            Some(b) => {
                let b = &b[k];
                ((a + b), (a - b).scale(C64::new(0.0, 1.0)))
            }
        }
    }

    /// `X = sum_k s_k A_k + conj(s_k) B_k`, without the power scale.
    pub fn encode(&self, symbols: &[C64]) -> Result<ComplexMatrix> {
        if symbols.len() != self.k() {
            return Err(Error::Dimension(format!(
                "{} symbols for a code with K = {}",
                symbols.len(),
                self.k()
            )));
        }
        let mut x = ComplexMatrix::zeros(self.t, self.nt);
        for (k, &s) in symbols.iter().enumerate() {
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            x.add_scaled(&self.weights[k], s);
            if let Some(b) = &self.conj_weights {
                x.add_scaled(&b[k], s.conj());
            }
        }
        Ok(x)
    }

    /// Encodes constellation labels.
    pub fn encode_labels(&self, labels: &[usize]) -> Result<ComplexMatrix> {
        let symbols: Vec<C64> = labels.iter().map(|&l| self.constellation.point(l)).collect();
        self.encode(&symbols)
    }

    /// The transmitted matrix: `power_scale * encode(labels)`.
    pub fn codeword(&self, labels: &[usize]) -> Result<ComplexMatrix> {
        Ok(self.encode_labels(labels)?.scale_real(self.power_scale))
    }

    /// All codewords in lexicographic label order, if at most `cap` exist.
    pub fn codebook(&self, cap: u64) -> Result<Vec<ComplexMatrix>> {
        let size = self.codebook_size();
        if size > cap as f64 {
            return Err(Error::EnumerationTooLarge { size, cap });
        }
        let m = self.constellation.len();
        let mut labels = vec![0usize; self.k()];
        let mut out = Vec::with_capacity(size as usize);
        for _ in 0..size as u64 {
            out.push(self.encode_labels(&labels)?);
            for l in labels.iter_mut().rev() {
                *l += 1;
                if *l < m {
                    break;
                }
                *l = 0;
            }
        }
        Ok(out)
    }
}

/// How the receiver picks a component code from the channel.
#[derive(Debug, Clone, PartialEq)]
pub enum FeedbackRule {
    /// Largest minimum received distance over codeword differences.
    MinDistance,
    /// `argmax_n ||u_n^T H||_F^2` over the given vectors.
    NormSelect(Vec<Vec<C64>>),
    /// Always the first code (no feedback).
    Constant,
}

impl FeedbackRule {
    pub fn label(&self) -> &'static str {
        match self {
            FeedbackRule::MinDistance => "FD",
            FeedbackRule::NormSelect(_) => "NORM_SELECT",
            FeedbackRule::Constant => "CONSTANT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteFeedbackScheme {
    name: String,
    codes: Vec<LinearDispersionCode>,
    rule: FeedbackRule,
}

impl FiniteFeedbackScheme {
    /// Checks that all codes share `T`, `N_t` and codebook size.
    pub fn new(
        name: impl Into<String>,
        codes: Vec<LinearDispersionCode>,
        rule: FeedbackRule,
    ) -> Result<Self> {
        let first = codes
            .first()
            .ok_or_else(|| Error::Dimension("a scheme needs at least one code".into()))?;
        let (t, nt, bits) = (first.t(), first.nt(), first.bits_per_codeword());
        for (n, c) in codes.iter().enumerate() {
            if c.t() != t || c.nt() != nt {
                return Err(Error::Dimension(format!(
                    "code {} is {}x{}, expected {t}x{nt}",
                    n + 1,
                    c.t(),
                    c.nt()
                )));
            }
            if c.bits_per_codeword() != bits {
                return Err(Error::BitrateMismatch(format!(
                    "code {} carries {} bits per codeword, code 1 carries {bits}",
                    n + 1,
                    c.bits_per_codeword()
                )));
            }
        }
        if let FeedbackRule::NormSelect(vectors) = &rule {
            if vectors.len() != codes.len() || vectors.iter().any(|v| v.len() != nt) {
                return Err(Error::Dimension(
                    "norm-select needs one N_t-vector per code".into(),
                ));
            }
        }
        if matches!(rule, FeedbackRule::Constant) && codes.len() != 1 {
            return Err(Error::Dimension("constant feedback needs exactly one code".into()));
        }
        Ok(Self {
            name: name.into(),
            codes,
            rule,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Feedback cardinality `N`.
    pub fn n(&self) -> usize {
        self.codes.len()
    }

    pub fn t(&self) -> usize {
        self.codes[0].t()
    }

    pub fn nt(&self) -> usize {
        self.codes[0].nt()
    }

    pub fn codes(&self) -> &[LinearDispersionCode] {
        &self.codes
    }

    pub fn codes_mut(&mut self) -> &mut [LinearDispersionCode] {
        &mut self.codes
    }

    pub fn code(&self, index: usize) -> &LinearDispersionCode {
        &self.codes[index]
    }

    pub fn rule(&self) -> &FeedbackRule {
        &self.rule
    }

    pub fn bits_per_codeword(&self) -> usize {
        self.codes[0].bits_per_codeword()
    }

    /// Bits per channel use.
    pub fn bpcu(&self) -> f64 {
        self.bits_per_codeword() as f64 / self.t() as f64
    }

    /// Common rate `K/T`, or `None` when the component codes differ.
    pub fn rate(&self) -> Option<f64> {
        let r = self.codes[0].rate();
        self.codes.iter().all(|c| c.rate() == r).then_some(r)
    }

    pub fn is_full_rate(&self) -> bool {
        self.rate() == Some(self.nt() as f64)
    }

    /// `N * T == N_t`, the minimal feedback/duration trade-off.
    pub fn has_minimal_feedback_duration(&self) -> bool {
        self.n() * self.t() == self.nt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn dependent_weights_rejected() {
        let w = ComplexMatrix::row_vector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let err = LinearDispersionCode::new(vec![w.clone(), w.scale_real(2.0)], Constellation::bpsk());
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn encode_checks_length() {
        let w = ComplexMatrix::row_vector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let code = LinearDispersionCode::new(vec![w], Constellation::bpsk()).unwrap();
        assert!(code.encode(&[c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(code.encode(&[c(0.0, 0.0)]).unwrap().is_zero());
    }

    #[test]
    fn codebook_enumeration_cap() {
        let w = ComplexMatrix::row_vector(&[c(1.0, 0.0)]);
        let code = LinearDispersionCode::new(vec![w], Constellation::square_qam(4)).unwrap();
        assert_eq!(code.codebook(16).unwrap().len(), 16);
        assert!(matches!(code.codebook(15), Err(Error::EnumerationTooLarge { .. })));
    }

    #[test]
    fn scheme_rejects_unequal_codebooks() {
        let w = ComplexMatrix::row_vector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let a = LinearDispersionCode::new(vec![w.clone()], Constellation::bpsk()).unwrap();
        let b = LinearDispersionCode::new(vec![w], Constellation::square_qam(2)).unwrap();
        let err = FiniteFeedbackScheme::new("x", vec![a, b], FeedbackRule::MinDistance);
        assert!(matches!(err, Err(Error::BitrateMismatch(_))));
    }
}
