use crate::algebra::{Constellation, C64};
use crate::error::{Error, Result};

/// Splits `bits` (each 0 or 1) into `k` chunks of `bits_per_symbol` bits,
/// most significant bit first, and returns the constellation labels.
pub fn bits_to_labels(bits: &[u8], c: &Constellation, k: usize) -> Result<Vec<usize>> {
    let b = c.bits_per_symbol();
    if bits.len() != k * b {
        return Err(Error::BitLength {
            expected: k * b,
            got: bits.len(),
        });
    }
    Ok(bits
        .chunks(b.max(1))
        .take(k)
        .map(|chunk| chunk.iter().fold(0usize, |acc, &bit| (acc << 1) | (bit & 1) as usize))
        .collect())
}

pub fn bits_to_symbols(bits: &[u8], c: &Constellation, k: usize) -> Result<Vec<C64>> {
    Ok(bits_to_labels(bits, c, k)?
        .into_iter()
        .map(|l| c.point(l))
        .collect())
}

pub fn labels_to_bits(labels: &[usize], c: &Constellation) -> Vec<u8> {
    let b = c.bits_per_symbol();
    labels
        .iter()
        .flat_map(|&l| (0..b).rev().map(move |j| ((l >> j) & 1) as u8))
        .collect()
}

/// Inverse of [`bits_to_symbols`]; every symbol must be a constellation point.
pub fn symbols_to_bits(symbols: &[C64], c: &Constellation) -> Result<Vec<u8>> {
    let labels = symbols
        .iter()
        .map(|z| {
            c.points()
                .iter()
                .position(|p| p == z)
                .ok_or_else(|| Error::Parse(format!("{z} is not a {} point", c.name())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(labels_to_bits(&labels, c))
}
