//! Unit-modulus thread phasors `gamma_l = exp(beta_l)` built from purely
//! imaginary exponents whose imaginary parts are linearly independent over
//! the rationals.
//!
//! Independence comes from products of prime radicals: for distinct primes
//! `p_k` and degrees `n_k`, the monomials `prod_k p_k^(l_k / n_k)` with
//! `0 <= l_k < n_k` are linearly independent over `Q`. With every `n_k = 2`
//! the monomials are square roots of square-free integers, which is the only
//! case the integer-relation probe below handles exactly.

use crate::algebra::matrix::C64;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

#[derive(Debug, Clone, PartialEq)]
pub struct PhasorSet {
    /// Imaginary parts of the exponents `beta_l`.
    betas: Vec<f64>,
    gammas: Vec<C64>,
    /// `betas[l] = sqrt(radicands[l])` when the set comes from square roots.
    radicands: Option<Vec<u64>>,
}

impl PhasorSet {
    /// Builds `gamma_l = exp(i * beta_l)` from the imaginary parts.
    ///
    /// Panics if two exponents coincide.
    pub fn from_imaginary_parts(betas: Vec<f64>) -> Self {
        for (i, a) in betas.iter().enumerate() {
            for b in &betas[i + 1..] {
                assert!(a != b, "phasor exponents must be distinct");
            }
        }
        let gammas = betas.iter().map(|&b| C64::new(0.0, b).exp()).collect();
        Self {
            betas,
            gammas,
            radicands: None,
        }
    }

    fn from_radicands(radicands: Vec<u64>) -> Self {
        let betas = radicands.iter().map(|&r| (r as f64).sqrt()).collect();
        let mut set = Self::from_imaginary_parts(betas);
        set.radicands = Some(radicands);
        set
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// Imaginary parts of the exponents.
    pub fn betas(&self) -> &[f64] {
        &self.betas
    }

    pub fn gammas(&self) -> &[C64] {
        &self.gammas
    }

    pub fn radicands(&self) -> Option<&[u64]> {
        self.radicands.as_deref()
    }
}

/// Radicands of the monomials `prod_k p_k^(l_k)` for the first `m` primes
/// under square roots (every degree 2), enumerated with the first prime's
/// exponent varying fastest. For `m = 2` this is `[1, 2, 3, 6]`.
pub fn square_root_monomials(m: usize) -> Vec<u64> {
    assert!(m <= PRIMES.len(), "at most {} primes supported", PRIMES.len());
    (0..1u64 << m)
        .map(|mask| {
            PRIMES[..m]
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &p)| p)
                .product()
        })
        .collect()
}

/// Real monomials `prod_k (p_k)^(l_k / n_k)`, `0 <= l_k < n_k`, for the given
/// primes and degrees, first factor varying fastest.
pub fn besicovitch_products(primes: &[u64], degrees: &[u32]) -> Vec<f64> {
    assert_eq!(primes.len(), degrees.len());
    let total: usize = degrees.iter().map(|&n| n as usize).product();
    (0..total)
        .map(|mut idx| {
            let mut value = 1.0;
            for (&p, &n) in primes.iter().zip(degrees) {
                let l = idx % n as usize;
                idx /= n as usize;
                value *= (p as f64).powf(l as f64 / n as f64);
            }
            value
        })
        .collect()
}

/// `t` purely imaginary exponents `i*sqrt(p)` over the first `t` primes.
/// Distinct prime square roots are a subset of the Besicovitch monomials, so
/// they are `Q`-linearly independent. `t = 2` gives `{i sqrt2, i sqrt3}`.
pub fn besicovitch_exponents(t: usize) -> PhasorSet {
    assert!(t >= 1, "need at least one exponent");
    PhasorSet::from_radicands(PRIMES[..t].to_vec())
}

/// `i (1 + sqrt5) / 2`, the exponent used for the single-phasor schemes.
pub fn golden_exponent() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// The monomial set over the first `m` primes as a phasor set.
pub fn monomial_exponents(m: usize) -> PhasorSet {
    PhasorSet::from_radicands(square_root_monomials(m))
}

/// Outcome of a bounded-height integer relation search.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationProbe {
    pub height: i64,
    /// A nonzero integer vector `q` with `sum q_i x_i = 0`, if one exists.
    pub relation: Option<Vec<i64>>,
    /// Smallest `|sum q_i x_i|` over nonzero `q` with `|q_i| <= height`.
    pub min_residual: f64,
}

const FIXED_BITS: u32 = 56;

fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    // Newton refinement from the float estimate.
    loop {
        let y = (x + n / x) / 2;
        if y >= x {
            break;
        }
        x = y;
    }
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `sqrt(r) * 2^56` rounded down; exact to one unit in the last place.
fn fixed_sqrt(r: u64) -> i128 {
    assert!(r < 1 << 16, "radicand too large for the fixed-point probe");
    isqrt((r as u128) << (2 * FIXED_BITS)) as i128
}

/// Searches for an integer relation `sum q_i sqrt(r_i) = 0` with
/// `0 < max |q_i| <= height`, using 56-bit fixed point and a
/// meet-in-the-middle split. Supports up to four radicands at height 1000.
pub fn probe_sqrt_relations(radicands: &[u64], height: i64) -> RelationProbe {
    assert!(!radicands.is_empty() && radicands.len() <= 4);
    let values: Vec<i128> = radicands.iter().map(|&r| fixed_sqrt(r)).collect();
    let split = radicands.len().div_ceil(2);
    let (left_vals, right_vals) = values.split_at(split);

    let radix = 2 * height as u64 + 1;
    // (sum, mixed-radix code of the coefficients, shifted by `height`).
    let combos = |vals: &[i128]| -> Vec<(i128, u64)> {
        let mut out = vec![(0i128, 0u64)];
        for &v in vals {
            let mut next = Vec::with_capacity(out.len() * radix as usize);
            for &(sum, code) in &out {
                for q in -height..=height {
                    next.push((sum + q as i128 * v, code * radix + (q + height) as u64));
                }
            }
            out = next;
        }
        out
    };
    let decode = |mut code: u64, len: usize| -> Vec<i64> {
        let mut qs = vec![0; len];
        for q in qs.iter_mut().rev() {
            *q = (code % radix) as i64 - height;
            code /= radix;
        }
        qs
    };

    let mut left = combos(left_vals);
    left.sort_unstable_by_key(|&(s, _)| s);
    let right = combos(right_vals);
    let zero_code = |len: usize| (0..len).fold(0u64, |acc, _| acc * radix + height as u64);
    let (left_zero, right_zero) = (zero_code(left_vals.len()), zero_code(right_vals.len()));

    // Each fixed-point term carries at most one unit of truncation error.
    let slack = (height as i128) * radicands.len() as i128 + 1;
    let mut best = i128::MAX;
    let mut relation = None;
    for &(r_sum, r_code) in &right {
        let target = -r_sum;
        let pos = left.partition_point(|&(s, _)| s < target);
        for &(l_sum, l_code) in &left[pos.saturating_sub(2)..(pos + 2).min(left.len())] {
            if l_code == left_zero && r_code == right_zero {
                continue;
            }
            let diff = (l_sum - target).abs();
            if diff < best {
                best = diff;
                if diff <= slack {
                    let mut qs = decode(l_code, left_vals.len());
                    qs.extend(decode(r_code, right_vals.len()));
                    relation = Some(qs);
                }
            }
        }
    }
    RelationProbe {
        height,
        relation,
        min_residual: best as f64 / (1u128 << FIXED_BITS) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_monomials() {
        assert_eq!(square_root_monomials(2), vec![1, 2, 3, 6]);
        let values = besicovitch_products(&[2, 3], &[2, 2]);
        let expected = [1.0, 2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt()];
        for (v, e) in values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-15);
        }
    }

    #[test]
    fn two_exponents_are_sqrt2_sqrt3() {
        let set = besicovitch_exponents(2);
        assert_eq!(set.betas(), &[2f64.sqrt(), 3f64.sqrt()]);
    }

    #[test]
    fn golden_exponent_value() {
        assert!((golden_exponent() - 1.618_033_988_749_895).abs() < 1e-15);
    }

    #[test]
    fn phasors_have_unit_modulus() {
        for t in 1..=8 {
            let set = besicovitch_exponents(t);
            assert_eq!(set.len(), t);
            for g in set.gammas() {
                assert!((g.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cube_roots_supported_in_products() {
        let values = besicovitch_products(&[2], &[3]);
        assert_eq!(values.len(), 3);
        assert!((values[2] - 4f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn probe_finds_planted_relation() {
        // sqrt(8) = 2 sqrt(2).
        let probe = probe_sqrt_relations(&[2, 8], 10);
        let q = probe.relation.expect("relation");
        assert_eq!(q[0], -2 * q[1]);
        assert!(probe.min_residual < 1e-15);
        // 1, 4: 2*1 - sqrt(4) = 0.
        assert!(probe_sqrt_relations(&[1, 4], 5).relation.is_some());
    }

    #[test]
    fn pairwise_ratios_irrational() {
        let set = besicovitch_exponents(5);
        let r = set.radicands().unwrap();
        for i in 0..r.len() {
            for j in i + 1..r.len() {
                let probe = probe_sqrt_relations(&[r[i], r[j]], 1000);
                assert!(probe.relation.is_none(), "{} vs {}", r[i], r[j]);
                assert!(probe.min_residual > 1e-6);
            }
        }
    }

    #[test]
    #[should_panic]
    fn repeated_exponents_rejected() {
        PhasorSet::from_imaginary_parts(vec![1.0, 1.0]);
    }
}
