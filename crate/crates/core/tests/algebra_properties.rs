use ffs::algebra::{
    besicovitch_exponents, monomial_exponents, probe_sqrt_relations, AlgebraicRotation,
    ComplexMatrix, Constellation, C64,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::from_vec(rows, cols, data).unwrap()
}

/// Rank as the number of eigenvalues of `M^H M` above `tol^2 * lambda_max`.
fn eigen_rank(m: &ComplexMatrix, tol: f64) -> usize {
    let a = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]);
    let gram = a.adjoint() * &a;
    let eig = gram.symmetric_eigen().eigenvalues;
    let max = eig.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    eig.iter().filter(|&&l| l > tol * tol * max).count()
}

#[test]
fn rank_agrees_with_gram_eigen_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let tol = 1e-6;
    for case in 0..1000 {
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let r = rng.random_range(0..=rows.min(cols));
        // A product of random factors has rank r with probability one.
        let m = if r == 0 {
            ComplexMatrix::zeros(rows, cols)
        } else {
            gaussian(&mut rng, rows, r).matmul(&gaussian(&mut rng, r, cols)).unwrap()
        };
        assert_eq!(m.rank(tol), eigen_rank(&m, tol), "case {case}: {rows}x{cols} rank {r}");
        assert_eq!(m.rank(tol), r, "case {case}");
    }
}

#[test]
fn singular_values_match_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let (rows, cols) = (rng.random_range(1..=6), rng.random_range(1..=6));
        let m = gaussian(&mut rng, rows, cols);
        let a = DMatrix::from_fn(rows, cols, |i, j| m[(i, j)]);
        let mut expected: Vec<f64> = a.singular_values().iter().copied().collect();
        expected.sort_by(|x, y| y.total_cmp(x));
        let got = m.singular_values();
        assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-10 * (1.0 + e), "{got:?} vs {expected:?}");
        }
    }
}

#[test]
fn phasors_have_unit_modulus() {
    for t in 1..=16 {
        for g in besicovitch_exponents(t).gammas() {
            assert!((g.norm() - 1.0).abs() < 1e-12);
        }
    }
    for m in 1..=4 {
        for g in monomial_exponents(m).gammas() {
            assert!((g.norm() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn exponent_pairs_have_no_small_integer_relation() {
    let set = besicovitch_exponents(8);
    let radicands = set.radicands().unwrap();
    for (i, &a) in radicands.iter().enumerate() {
        for &b in &radicands[i + 1..] {
            let probe = probe_sqrt_relations(&[a, b], 1000);
            assert_eq!(probe.relation, None, "sqrt({a}) / sqrt({b})");
            assert!(probe.min_residual > 0.0);
        }
    }
}

#[test]
fn t2_exponents_are_sqrt2_and_sqrt3() {
    let set = besicovitch_exponents(2);
    assert_eq!(set.betas(), &[2f64.sqrt(), 3f64.sqrt()]);
}

#[test]
fn probe_finds_planted_relation() {
    // sqrt(8) = 2 sqrt(2), so (1, -2) or a multiple is a relation.
    let probe = probe_sqrt_relations(&[2, 8], 10);
    let q = probe.relation.expect("relation exists");
    assert_eq!(q[0] * 2 + q[1] * 4, 0, "{q:?}");
    assert_eq!(q[0], -2 * q[1]);
}

#[test]
fn qam_energies_by_enumeration() {
    for (bits, energy) in [(2, 2.0), (4, 10.0), (6, 42.0), (8, 170.0), (10, 682.0)] {
        let c = Constellation::square_qam(bits);
        let sum: f64 = c.points().iter().map(|z| z.norm_sqr()).sum();
        assert_eq!(sum / c.len() as f64, energy, "{bits} bits");
        assert_eq!(energy, 2.0 * ((c.len() as f64) - 1.0) / 3.0);
    }
}

#[test]
fn rotation_file_round_trip_is_strict() {
    let u = AlgebraicRotation::builtin(3).unwrap();
    let mut text = String::from("3\n");
    for i in 0..3 {
        let row: Vec<String> = (0..3).map(|j| format!("{}", u.matrix()[(i, j)].re)).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    // Four-digit built-in entries are only orthonormal to about 1e-4, which the
    // strict file tolerance rejects.
    assert!(AlgebraicRotation::parse(&text, "test").is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.rot");
    std::fs::write(&path, "2\n1 0\n0 1\n").unwrap();
    assert_eq!(AlgebraicRotation::from_file(&path).unwrap().dim(), 2);
}
