//! Diversity certification from stacked difference matrices.
//!
//! A scheme with codes `C_1..C_N` achieves full diversity when every stack
//! `[D_1; ...; D_N]` of nonzero differences `D_n in dC_n` has rank `N_t`.
//! Differences are generated from symbol differences `d in dA^K` (the closed
//! difference alphabet), so the enumeration runs over `prod_n (|dA|^K_n - 1)`
//! stacks. `lambda*` is the smallest eigenvalue of `S^H S` over all stacks
//! `S`, i.e. the smallest squared singular value.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::matrix::{jacobi_singular_values, rank_from_singular_values};
use crate::algebra::{ComplexMatrix, GaussianInt, C64, RANK_TOL};
use crate::codes::{FiniteFeedbackScheme, LinearDispersionCode};
use crate::error::{Error, Result};

/// Default stack budget for exhaustive certification.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Difference matrices are cached per code up to this many entries.
const CACHE_LIMIT: u64 = 1 << 22;

const SAMPLE_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifyMode {
    Exhaustive,
    Sampled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityCertificate {
    pub nt: usize,
    pub n: usize,
    pub t: usize,
    pub min_rank: usize,
    pub lambda_star: f64,
    pub mode: EnumerationMode,
    pub stacks_checked: u64,
    pub full_diversity_certified: bool,
    pub ft_optimal: bool,
    /// One symbol difference per code whose stack is rank deficient.
    pub counterexample: Option<Vec<Vec<GaussianInt>>>,
}

impl DiversityCertificate {
    /// `min_rank * nr`.
    pub fn upper_bound(&self, nr: usize) -> usize {
        diversity_upper_bound(self, nr)
    }
}

/// Largest diversity order the scheme can reach with `nr` receive antennas.
pub fn diversity_upper_bound(cert: &DiversityCertificate, nr: usize) -> usize {
    cert.min_rank * nr
}

/// Vertical stack of `encode(C_n, d_n)`.
pub fn stack_differences(scheme: &FiniteFeedbackScheme, diffs: &[Vec<C64>]) -> Result<ComplexMatrix> {
    if diffs.len() != scheme.n() {
        return Err(Error::Dimension(format!(
            "{} difference vectors for {} codes",
            diffs.len(),
            scheme.n()
        )));
    }
    let blocks = scheme
        .codes()
        .iter()
        .zip(diffs)
        .enumerate()
        .map(|(n, (code, d))| {
            if d.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                return Err(Error::InvalidDifference(n));
            }
            code.encode(d)
        })
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::vstack(&blocks)
}

/// Nonzero difference vectors of one code, addressed by position in
/// lexicographic order of alphabet indices (first symbol most significant).
struct DifferenceSet<'a> {
    code: &'a LinearDispersionCode,
    alphabet: Vec<GaussianInt>,
    /// Number of nonzero vectors.
    count: u64,
    /// Index of the zero vector in the full mixed-radix range.
    zero: u64,
    /// Row-major `T x N_t` matrices, when cached.
    cache: Option<Vec<C64>>,
}

impl<'a> DifferenceSet<'a> {
    fn new(code: &'a LinearDispersionCode) -> Self {
        let alphabet = code.constellation().difference_alphabet();
        let a = alphabet.len() as u64;
        let zero_digit = alphabet.iter().position(|&p| p == (0, 0)).expect("0 in alphabet") as u64;
        let total = a.checked_pow(code.k() as u32);
        let (count, zero) = match total {
            Some(total) => (
                total - 1,
                (0..code.k()).fold(0u64, |acc, _| acc * a + zero_digit),
            ),
            None => (u64::MAX, u64::MAX),
        };
        let mut set = Self {
            code,
            alphabet,
            count,
            zero,
            cache: None,
        };
        let entries = code.t() as u64 * code.nt() as u64;
        if count.saturating_mul(entries) <= CACHE_LIMIT {
            let mut cache = Vec::with_capacity((count * entries) as usize);
            for p in 0..count {
                cache.extend_from_slice(set.encode(p).as_slice());
            }
            set.cache = Some(cache);
        }
        set
    }

    fn size_f64(&self) -> f64 {
        (self.alphabet.len() as f64).powi(self.code.k() as i32) - 1.0
    }

    fn vector(&self, position: u64) -> Vec<GaussianInt> {
        let mut index = if position >= self.zero { position + 1 } else { position };
        let a = self.alphabet.len() as u64;
        let mut out = vec![(0, 0); self.code.k()];
        for slot in out.iter_mut().rev() {
            *slot = self.alphabet[(index % a) as usize];
            index /= a;
        }
        out
    }

    fn encode(&self, position: u64) -> ComplexMatrix {
        let d: Vec<C64> = self
            .vector(position)
            .iter()
            .map(|&(r, i)| C64::new(r as f64, i as f64))
            .collect();
        self.code.encode(&d).expect("length matches K")
    }

    /// Writes the matrix at `position` into `out` (row-major).
    fn write(&self, position: u64, out: &mut [C64]) {
        match &self.cache {
            Some(cache) => {
                let len = out.len();
                let start = position as usize * len;
                out.copy_from_slice(&cache[start..start + len]);
            }
            None => out.copy_from_slice(self.encode(position).as_slice()),
        }
    }
}

/// Minimum rank and `lambda*` accumulator for one worker.
#[derive(Debug, Clone, Copy)]
struct Tally {
    min_rank: usize,
    lambda: f64,
    /// Smallest global position of a rank-deficient stack.
    counterexample: Option<u64>,
}

impl Tally {
    fn new(nt: usize) -> Self {
        Self {
            min_rank: nt,
            lambda: f64::INFINITY,
            counterexample: None,
        }
    }

    fn merge(self, other: Self) -> Self {
        Self {
            min_rank: self.min_rank.min(other.min_rank),
            lambda: self.lambda.min(other.lambda),
            counterexample: match (self.counterexample, other.counterexample) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            },
        }
    }
}

/// Stack assembly and singular values with reusable buffers.
struct StackEvaluator<'s> {
    sets: &'s [DifferenceSet<'s>],
    t: usize,
    nt: usize,
    block: Vec<C64>,
    buf: Vec<C64>,
    sv: Vec<f64>,
}

impl<'s> StackEvaluator<'s> {
    fn new(sets: &'s [DifferenceSet<'s>], t: usize, nt: usize) -> Self {
        let rows = sets.len() * t;
        Self {
            sets,
            t,
            nt,
            block: vec![C64::new(0.0, 0.0); t * nt],
            buf: vec![C64::new(0.0, 0.0); rows * nt],
            sv: vec![0.0; rows.min(nt)],
        }
    }

    /// Rank and `sigma_min^2` (zero when rank deficient).
    fn evaluate(&mut self, positions: &[u64]) -> (usize, f64) {
        let (t, nt) = (self.t, self.nt);
        let rows = self.sets.len() * t;
        let tall = rows >= nt;
        for (n, (&p, set)) in positions.iter().zip(self.sets).enumerate() {
            set.write(p, &mut self.block);
            for i in 0..t {
                let r = n * t + i;
                for j in 0..nt {
                    let z = self.block[i * nt + j];
                    if tall {
                        // Column-major copy of S.
                        self.buf[j * rows + r] = z;
                    } else {
                        // Column-major copy of S^H.
                        self.buf[r * nt + j] = z.conj();
                    }
                }
            }
        }
        let (m, k) = if tall { (rows, nt) } else { (nt, rows) };
        jacobi_singular_values(&mut self.buf, m, k, &mut self.sv);
        let rank = rank_from_singular_values(&self.sv, RANK_TOL);
        let lambda = if rank < nt {
            0.0
        } else {
            self.sv[nt - 1].powi(2)
        };
        (rank, lambda)
    }
}

/// Certifies full diversity by exhaustive enumeration (`budget` caps the
/// number of stacks) or refutes it by sampling `count` random stacks.
///
/// Exhaustive mode visits only stacks whose first difference lies in the
/// first half of its index range: negating that difference flips the sign of
/// the first block, which leaves rank and singular values unchanged.
pub fn certify_full_diversity(
    scheme: &FiniteFeedbackScheme,
    mode: CertifyMode,
    budget: u64,
    seed: u64,
) -> Result<DiversityCertificate> {
    let sets: Vec<DifferenceSet> = scheme.codes().iter().map(DifferenceSet::new).collect();
    let (t, nt) = (scheme.t(), scheme.nt());
    let (tally, stacks_checked, enumeration) = match mode {
        CertifyMode::Exhaustive => {
            let size: f64 = sets.iter().map(|s| s.size_f64()).product();
            if size > budget as f64 {
                return Err(Error::EnumerationTooLarge { size, cap: budget });
            }
            (exhaustive(&sets, t, nt), size as u64, EnumerationMode::Exhaustive)
        }
        CertifyMode::Sampled(count) => (
            sampled(&sets, t, nt, count, seed),
            count,
            EnumerationMode::Sampled { count, seed },
        ),
    };
    let counterexample = tally.counterexample.map(|packed| {
        positions_of(&sets, packed, matches!(mode, CertifyMode::Sampled(_)), seed)
            .iter()
            .zip(&sets)
            .map(|(&p, s)| s.vector(p))
            .collect()
    });
    let full = matches!(mode, CertifyMode::Exhaustive) && tally.min_rank == nt;
    Ok(DiversityCertificate {
        nt,
        n: scheme.n(),
        t,
        min_rank: tally.min_rank,
        lambda_star: if tally.lambda.is_finite() { tally.lambda } else { 0.0 },
        mode: enumeration,
        stacks_checked,
        full_diversity_certified: full,
        ft_optimal: full && scheme.n() * t == nt,
        counterexample,
    })
}

/// Positions of every code for the stack with mixed-radix index `index`
/// (exhaustive) or sample number `index` (sampled).
fn positions_of(sets: &[DifferenceSet], index: u64, sampled_mode: bool, seed: u64) -> Vec<u64> {
    if sampled_mode {
        let mut rng = sample_rng(seed, index / SAMPLE_CHUNK);
        let mut positions = vec![0; sets.len()];
        for _ in 0..=index % SAMPLE_CHUNK {
            draw(&mut rng, sets, &mut positions);
        }
        positions
    } else {
        let mut rest = index;
        let mut positions = vec![0; sets.len()];
        for (p, s) in positions.iter_mut().zip(sets).rev() {
            *p = rest % s.count;
            rest /= s.count;
        }
        positions
    }
}

fn exhaustive(sets: &[DifferenceSet], t: usize, nt: usize) -> Tally {
    let inner: u64 = sets[1..].iter().map(|s| s.count).product();
    // First-code positions below the zero vector's index are the
    // lexicographically smaller member of each sign pair.
    let half = sets[0].zero.min(sets[0].count);
    (0..half)
        .into_par_iter()
        .fold(
            || (Tally::new(nt), None::<StackEvaluator>),
            |(mut tally, evaluator), p0| {
                let mut ev = evaluator.unwrap_or_else(|| StackEvaluator::new(sets, t, nt));
                let mut positions = vec![0u64; sets.len()];
                positions[0] = p0;
                for r in 0..inner {
                    let mut rest = r;
                    for (p, s) in positions[1..].iter_mut().zip(&sets[1..]).rev() {
                        *p = rest % s.count;
                        rest /= s.count;
                    }
                    let (rank, lambda) = ev.evaluate(&positions);
                    tally.min_rank = tally.min_rank.min(rank);
                    tally.lambda = tally.lambda.min(lambda);
                    if rank < nt && tally.counterexample.is_none() {
                        let global = p0 * inner + r;
                        tally.counterexample = Some(global);
                    }
                }
                (tally, Some(ev))
            },
        )
        .map(|(tally, _)| tally)
        .reduce(|| Tally::new(nt), Tally::merge)
}

fn sample_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn draw(rng: &mut ChaCha8Rng, sets: &[DifferenceSet], positions: &mut [u64]) {
    for (p, s) in positions.iter_mut().zip(sets) {
        *p = rng.random_range(0..s.count);
    }
}

fn sampled(sets: &[DifferenceSet], t: usize, nt: usize, count: u64, seed: u64) -> Tally {
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut ev = StackEvaluator::new(sets, t, nt);
            let mut rng = sample_rng(seed, chunk);
            let mut positions = vec![0u64; sets.len()];
            let mut tally = Tally::new(nt);
            let start = chunk * SAMPLE_CHUNK;
            for sample in start..(start + SAMPLE_CHUNK).min(count) {
                draw(&mut rng, sets, &mut positions);
                let (rank, lambda) = ev.evaluate(&positions);
                tally.min_rank = tally.min_rank.min(rank);
                tally.lambda = tally.lambda.min(lambda);
                if rank < nt && tally.counterexample.is_none() {
                    tally.counterexample = Some(sample);
                }
            }
            tally
        })
        .reduce(|| Tally::new(nt), Tally::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Constellation;
    use crate::codes::{
        antenna_selection_scheme, beamforming_scheme, golden_constants, golden_thread_scheme,
        no_feedback_scheme, FeedbackRule,
    };

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn golden_stack_example() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let d = vec![c(2.0, 0.0), c(0.0, 0.0)];
        let stack = stack_differences(&s, &[d.clone(), d]).unwrap();
        let g = golden_constants();
        let expected = [
            [g.alpha * 2.0, g.alpha_conj * 2.0],
            [g.alpha * 2.0, c(0.0, 1.0) * g.alpha_conj * 2.0],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!((stack[(i, j)] - expected[i][j]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn zero_difference_rejected() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let zero = vec![c(0.0, 0.0); 2];
        let d = vec![c(2.0, 0.0), c(0.0, 0.0)];
        assert_eq!(
            stack_differences(&s, &[d, zero]),
            Err(Error::InvalidDifference(1))
        );
    }

    #[test]
    fn single_code_stack_is_the_difference() {
        let s = antenna_selection_scheme(2, &Constellation::bpsk()).unwrap();
        let nf = no_feedback_scheme(s.code(0).clone()).unwrap();
        let stack = stack_differences(&nf, &[vec![c(2.0, 0.0)]]).unwrap();
        assert_eq!(stack, s.code(0).encode(&[c(2.0, 0.0)]).unwrap());
    }

    #[test]
    fn golden_thread_certifies() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let cert = certify_full_diversity(&s, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(cert.stacks_checked, 6400);
        assert_eq!(cert.min_rank, 2);
        assert!(cert.lambda_star > 0.0);
        assert!(cert.full_diversity_certified);
        assert!(cert.ft_optimal);
        assert!(cert.counterexample.is_none());
    }

    #[test]
    fn identical_beamformers_refuted() {
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let s = beamforming_scheme(&[e1.clone(), e1], &Constellation::square_qam(2)).unwrap();
        let cert = certify_full_diversity(&s, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
        assert_eq!(cert.min_rank, 1);
        assert_eq!(cert.lambda_star, 0.0);
        assert!(!cert.full_diversity_certified);
        // The very first stack is already deficient.
        assert_eq!(cert.upper_bound(2), 2);
        let ce = cert.counterexample.unwrap();
        assert_eq!(ce, vec![vec![(-2, -2)], vec![(-2, -2)]]);
    }

    #[test]
    fn too_few_rows_never_full_rank() {
        let s = antenna_selection_scheme(2, &Constellation::bpsk()).unwrap();
        let nf = no_feedback_scheme(s.code(0).clone()).unwrap();
        let cert = certify_full_diversity(&nf, CertifyMode::Exhaustive, 100, 0).unwrap();
        assert!(cert.min_rank < 2);
        assert!(!cert.ft_optimal);
        assert!(cert.counterexample.is_some());
    }

    #[test]
    fn budget_enforced() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        assert!(matches!(
            certify_full_diversity(&s, CertifyMode::Exhaustive, 6399, 0),
            Err(Error::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn sampled_never_certifies_and_is_reproducible() {
        let s = golden_thread_scheme(&Constellation::square_qam(2)).unwrap();
        let a = certify_full_diversity(&s, CertifyMode::Sampled(5000), 0, 9).unwrap();
        let b = certify_full_diversity(&s, CertifyMode::Sampled(5000), 0, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.min_rank, 2);
        assert!(!a.full_diversity_certified);
        assert!(!a.ft_optimal);
        let full = certify_full_diversity(&s, CertifyMode::Exhaustive, DEFAULT_BUDGET, 0).unwrap();
        assert!(a.lambda_star >= full.lambda_star);
    }

    #[test]
    fn sampled_counterexample_reconstructs() {
        let e1 = vec![c(1.0, 0.0), c(0.0, 0.0)];
        let s = beamforming_scheme(&[e1.clone(), e1], &Constellation::square_qam(2)).unwrap();
        let cert = certify_full_diversity(&s, CertifyMode::Sampled(10_000), 0, 3).unwrap();
        let ce = cert.counterexample.expect("refuted");
        let diffs: Vec<Vec<C64>> = ce
            .iter()
            .map(|v| v.iter().map(|&(r, i)| c(r as f64, i as f64)).collect())
            .collect();
        assert_eq!(stack_differences(&s, &diffs).unwrap().rank(RANK_TOL), 1);
    }

    #[test]
    fn counterexample_is_smallest_index() {
        // Rows [d1, d2] and [e1, i e2] are dependent iff d1 e2 = d2 e1 = 0.
        let w = |a: C64, b: C64| ComplexMatrix::row_vector(&[a, b]);
        let (one, zero, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
        let bpsk = Constellation::bpsk();
        let c1 = LinearDispersionCode::new(vec![w(one, zero), w(zero, one)], bpsk.clone()).unwrap();
        let c2 = LinearDispersionCode::new(vec![w(one, zero), w(zero, i)], bpsk).unwrap();
        let s = FiniteFeedbackScheme::new("x", vec![c1, c2], FeedbackRule::MinDistance).unwrap();
        let cert = certify_full_diversity(&s, CertifyMode::Exhaustive, 100, 0).unwrap();
        assert_eq!(cert.min_rank, 1);

        let vals = [-2.0, 0.0, 2.0];
        let nonzero: Vec<Vec<C64>> = (0..9)
            .map(|k| vec![c(vals[k / 3], 0.0), c(vals[k % 3], 0.0)])
            .filter(|d| d.iter().any(|z| z.re != 0.0))
            .collect();
        let first = nonzero
            .iter()
            .flat_map(|d| nonzero.iter().map(move |e| vec![d.clone(), e.clone()]))
            .find(|pair| stack_differences(&s, pair).unwrap().rank(RANK_TOL) < 2)
            .unwrap();
        let expected: Vec<Vec<GaussianInt>> = first
            .iter()
            .map(|v| v.iter().map(|z| (z.re as i64, z.im as i64)).collect())
            .collect();
        assert_eq!(cert.counterexample.unwrap(), expected);
    }
}
