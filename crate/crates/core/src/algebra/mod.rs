//! Linear-algebra kernel and the algebraic ingredients of the code
//! constructions: Gaussian-integer constellations, algebraic rotations and
//! rationally independent phasor exponents.

pub mod constellation;
pub mod matrix;
pub mod phasor;
pub mod rotation;

pub use constellation::{difference_alphabet, make_constellation, Constellation, GaussianInt};
pub use matrix::{ComplexMatrix, C64, RANK_TOL};
pub use phasor::{
    besicovitch_exponents, besicovitch_products, golden_exponent, monomial_exponents,
    probe_sqrt_relations,
    square_root_monomials, PhasorSet, RelationProbe,
};
pub use rotation::{load_rotation, verify_rotation, AlgebraicRotation, RotationReport};
