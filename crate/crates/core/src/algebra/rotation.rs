//! Full-diversity algebraic rotations.
//!
//! The 3x3 and 4x4 built-ins are the tabulated real rotations printed to three
//! and four decimals, so they are orthonormal only to about `5e-3`. Any other
//! size comes from a rotation file:
//!
//! ```text
//! 3
//! -0.328 -0.591 -0.737
//! -0.737 -0.328  0.591
//! -0.591  0.737 -0.328
//! ```

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::constellation::Constellation;
use crate::algebra::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Orthonormality tolerance for the truncated built-in tables.
pub const BUILTIN_ROTATION_TOL: f64 = 5e-3;
/// Orthonormality tolerance for full-precision rotations read from files.
pub const FILE_ROTATION_TOL: f64 = 1e-9;

const ROTATION_3: [[f64; 3]; 3] = [
    [-0.328, -0.591, -0.737],
    [-0.737, -0.328, 0.591],
    [-0.591, 0.737, -0.328],
];

const ROTATION_4: [[f64; 4]; 4] = [
    [-0.3664, -0.7677, 0.4231, 0.3121],
    [-0.2264, -0.4745, -0.6846, -0.5050],
    [-0.4745, 0.2264, -0.5050, 0.6846],
    [-0.7677, 0.3664, 0.3121, -0.4231],
];

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicRotation {
    matrix: ComplexMatrix,
    source: String,
}

impl AlgebraicRotation {
    /// Wraps a square matrix, checking `||U^H U - I||_F <= tol`.
    pub fn new(matrix: ComplexMatrix, source: impl Into<String>, tol: f64) -> Result<Self> {
        if matrix.rows() != matrix.cols() || matrix.rows() == 0 {
            return Err(Error::Dimension(format!(
                "rotation must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let residual = orthonormality_residual(&matrix);
        if residual > tol {
            return Err(Error::Dimension(format!(
                "rotation is not orthonormal: residual {residual:.3e} > {tol:.1e}"
            )));
        }
        Ok(Self {
            matrix,
            source: source.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Built-in rotation: the golden-ratio 2x2 rotation, the tabulated 3x3
    /// and the tabulated 4x4.
    pub fn builtin(dim: usize) -> Result<Self> {
        match dim {
            2 => Self::new(golden_rotation_2(), "builtin:2", FILE_ROTATION_TOL),
            3 => Self::new(real_matrix(&ROTATION_3), "builtin:3", BUILTIN_ROTATION_TOL),
            4 => Self::new(real_matrix(&ROTATION_4), "builtin:4", BUILTIN_ROTATION_TOL),
            _ => Err(Error::RotationUnavailable(dim)),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &format!("file:{}", path.display()))
    }

    /// Parses the rotation file format: `dim` then `dim` rows of reals.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let dim: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty rotation file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("rotation dimension: {e}")))?;
        let mut rows = Vec::with_capacity(dim);
        for (i, line) in lines.enumerate() {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("rotation row {}: {e}", i + 1)))
                })
                .collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(Error::Parse(format!(
                    "rotation row {} has {} entries, expected {dim}",
                    i + 1,
                    row.len()
                )));
            }
            rows.push(row);
        }
        if rows.len() != dim {
            return Err(Error::Parse(format!(
                "rotation file has {} rows, expected {dim}",
                rows.len()
            )));
        }
        Self::new(ComplexMatrix::from_real_rows(&rows)?, source, FILE_ROTATION_TOL)
    }
}

fn real_matrix<const N: usize>(rows: &[[f64; N]; N]) -> ComplexMatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    ComplexMatrix::from_real_rows(&rows).expect("static table is square")
}

/// Rows `(1, t) / |(1, t)|` for `t` the golden ratio and its conjugate. The
/// rows are orthogonal because the two conjugates multiply to `-1`.
fn golden_rotation_2() -> ComplexMatrix {
    let sqrt5 = 5f64.sqrt();
    let rows: Vec<Vec<f64>> = [(1.0 + sqrt5) / 2.0, (1.0 - sqrt5) / 2.0]
        .iter()
        .map(|&t| {
            let norm = (1.0 + t * t).sqrt();
            vec![1.0 / norm, t / norm]
        })
        .collect();
    ComplexMatrix::from_real_rows(&rows).expect("2x2")
}

/// Built-in rotation by dimension.
pub fn load_rotation(dim: usize) -> Result<AlgebraicRotation> {
    AlgebraicRotation::builtin(dim)
}

/// `||U^H U - I||_F`.
pub fn orthonormality_residual(u: &ComplexMatrix) -> f64 {
    let gram = u.hermitian_transpose().matmul(u).expect("square");
    (&gram - &ComplexMatrix::identity(u.cols())).frobenius_norm()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationReport {
    pub orth_residual: f64,
    pub min_prod_dist: f64,
    pub vectors_checked: u64,
    pub exhaustive: bool,
}

/// Seed used when the difference space is too large to scan and vectors are
/// sampled instead.
pub const VERIFY_SAMPLING_SEED: u64 = 0x005e_ed0f_u64;

/// Orthonormality residual and minimum product distance `prod_l |(Ua)(l)|`
/// over nonzero `a` drawn from the difference alphabet. Scans exhaustively
/// when the space has at most `budget` vectors, otherwise samples `budget`
/// nonzero vectors uniformly.
pub fn verify_rotation(u: &AlgebraicRotation, c: &Constellation, budget: u64) -> RotationReport {
    let budget = budget.max(1);
    let alphabet: Vec<C64> = c
        .difference_alphabet()
        .into_iter()
        .map(|(re, im)| C64::new(re as f64, im as f64))
        .collect();
    let dim = u.dim();
    let q = alphabet.len() as f64;
    let space = q.powi(dim as i32);
    let m = u.matrix();
    let product_distance = |a: &[C64]| -> f64 {
        (0..dim)
            .map(|l| {
                m.row(l)
                    .iter()
                    .zip(a)
                    .map(|(x, y)| x * y)
                    .sum::<C64>()
                    .norm()
            })
            .product()
    };

    let mut min = f64::INFINITY;
    let mut checked = 0u64;
    let exhaustive = space <= budget as f64;
    let mut a = vec![C64::new(0.0, 0.0); dim];
    if exhaustive {
        let total = space as u64;
        let mut digits = vec![0usize; dim];
        for idx in 0..total {
            let mut rem = idx;
            for d in digits.iter_mut() {
                *d = (rem % alphabet.len() as u64) as usize;
                rem /= alphabet.len() as u64;
            }
            for (slot, &d) in a.iter_mut().zip(&digits) {
                *slot = alphabet[d];
            }
            if a.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            checked += 1;
            min = min.min(product_distance(&a));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SAMPLING_SEED);
        while checked < budget {
            for slot in a.iter_mut() {
                *slot = alphabet[rng.random_range(0..alphabet.len())];
            }
            if a.iter().all(|z| z.norm_sqr() == 0.0) {
                continue;
            }
            checked += 1;
            min = min.min(product_distance(&a));
        }
    }
    RotationReport {
        orth_residual: orthonormality_residual(m),
        min_prod_dist: if checked == 0 { 0.0 } else { min },
        vectors_checked: checked,
        exhaustive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_rows_verbatim() {
        let u4 = load_rotation(4).unwrap();
        let row: Vec<f64> = u4.matrix().row(0).iter().map(|z| z.re).collect();
        assert_eq!(row, vec![-0.3664, -0.7677, 0.4231, 0.3121]);
        let u3 = load_rotation(3).unwrap();
        let row: Vec<f64> = u3.matrix().row(0).iter().map(|z| z.re).collect();
        assert_eq!(row, vec![-0.328, -0.591, -0.737]);
    }

    #[test]
    fn unavailable_dimensions() {
        assert_eq!(load_rotation(6), Err(Error::RotationUnavailable(6)));
        assert_eq!(load_rotation(5), Err(Error::RotationUnavailable(5)));
    }

    #[test]
    fn identity_has_zero_product_distance() {
        let id = AlgebraicRotation::new(ComplexMatrix::identity(3), "id", 1e-12).unwrap();
        let report = verify_rotation(&id, &Constellation::bpsk(), 1_000);
        assert!(report.exhaustive);
        assert_eq!(report.vectors_checked, 26);
        assert_eq!(report.min_prod_dist, 0.0);
        assert_eq!(report.orth_residual, 0.0);
    }

    #[test]
    fn golden_rotation_is_orthonormal_and_full_diversity() {
        let u = load_rotation(2).unwrap();
        let report = verify_rotation(&u, &Constellation::square_qam(2), 1 << 20);
        assert!(report.orth_residual < 1e-12);
        assert!(report.min_prod_dist > 0.1);
    }

    #[test]
    fn parse_round_trip_and_errors() {
        let text = "2\n0.6 0.8\n-0.8 0.6\n";
        let u = AlgebraicRotation::parse(text, "inline").unwrap();
        assert_eq!(u.dim(), 2);
        assert!(AlgebraicRotation::parse("2\n0.6 0.8\n", "x").is_err());
        assert!(AlgebraicRotation::parse("2\n0.6 0.8 1\n-0.8 0.6\n", "x").is_err());
        // Not orthonormal at file precision.
        assert!(AlgebraicRotation::parse("2\n0.6 0.8\n-0.8 0.61\n", "x").is_err());
        assert!(AlgebraicRotation::parse("", "x").is_err());
    }

    #[test]
    fn sampled_mode_respects_budget() {
        let u = load_rotation(4).unwrap();
        let report = verify_rotation(&u, &Constellation::square_qam(4), 500);
        assert!(!report.exhaustive);
        assert_eq!(report.vectors_checked, 500);
        assert!(report.min_prod_dist > 0.0);
    }
}
