use crate::algebra::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Placement of `T` threads in a `T x T` block. Thread `l` (0-based) starts
/// at column `l` of row 0 and moves one column to the right, cyclically, on
/// each following row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThreadLayout {
    t: usize,
}

impl ThreadLayout {
    pub fn new(t: usize) -> Self {
        assert!(t >= 1);
        Self { t }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Column holding component `row` of thread `thread` (all 0-based).
    pub fn column(&self, thread: usize, row: usize) -> usize {
        (row + thread) % self.t
    }
}

/// The threaded matrix `T(s_1, ..., s_T)`: entry `(i, (i + l) mod T)` is
/// `s_l(i)`.
pub fn thread_matrix(vectors: &[Vec<C64>]) -> Result<ComplexMatrix> {
    let t = vectors.len();
    if t == 0 {
        return Err(Error::Dimension("thread_matrix needs at least one vector".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != t) {
        return Err(Error::Dimension(format!(
            "thread vector of length {} in a {t}x{t} block",
            v.len()
        )));
    }
    let layout = ThreadLayout::new(t);
    let mut m = ComplexMatrix::zeros(t, t);
    for (l, v) in vectors.iter().enumerate() {
        for (i, &x) in v.iter().enumerate() {
            m[(i, layout.column(l, i))] = x;
        }
    }
    Ok(m)
}

/// Cyclic shift of blocks one place to the right: `[B1 .. BN] -> [BN B1 .. BN-1]`.
pub fn pi_shift(blocks: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    let n = blocks.len();
    (0..n).map(|j| blocks[(j + n - 1) % n].clone()).collect()
}

/// [`pi_shift`] applied to a `T x NT` codeword split into `T x T` blocks.
pub fn pi_shift_codeword(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let t = x.rows();
    if t == 0 || !x.cols().is_multiple_of(t) {
        return Err(Error::Dimension(format!(
            "{}x{} is not a row of square blocks",
            x.rows(),
            x.cols()
        )));
    }
    let blocks: Vec<ComplexMatrix> = (0..x.cols() / t)
        .map(|b| {
            let mut m = ComplexMatrix::zeros(t, t);
            for i in 0..t {
                for j in 0..t {
                    m[(i, j)] = x[(i, b * t + j)];
                }
            }
            m
        })
        .collect();
    ComplexMatrix::hstack(&pi_shift(&blocks))
}
