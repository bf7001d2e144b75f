//! Real-valued lattice model of a linear dispersion code seen through a
//! channel, and bounded depth-first enumeration over integer boxes.
//!
//! The complex symbol vector `s` is stacked as
//! `x = [Re s_1, Im s_1, Re s_2, Im s_2, ...]`, and a `T x N_r` complex
//! matrix is stacked row-major with real and imaginary parts interleaved.
//! With that convention `stack(scale * X(s) H) = G x`.

use crate::algebra::{ComplexMatrix, C64};
use crate::codes::LinearDispersionCode;
use crate::error::{Error, Result};

/// `stack(m)`: row-major entries, real and imaginary parts interleaved.
pub fn stack_real(m: &ComplexMatrix) -> Vec<f64> {
    m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealLatticeModel {
    rows: usize,
    cols: usize,
    /// Row-major `rows x cols` generator.
    generator: Vec<f64>,
}

impl RealLatticeModel {
    /// Generator of `x -> stack(scale * X(x) H)`; `h` is `N_t x N_r`.
    pub fn new(code: &LinearDispersionCode, h: &ComplexMatrix, scale: f64) -> Result<Self> {
        if h.rows() != code.nt() {
            return Err(Error::Dimension(format!(
                "channel has {} rows, code has N_t = {}",
                h.rows(),
                code.nt()
            )));
        }
        let rows = 2 * code.t() * h.cols();
        let cols = 2 * code.k();
        let mut generator = vec![0.0; rows * cols];
        for k in 0..code.k() {
            let (re, im) = code.real_generators(k);
            for (offset, w) in [re, im].iter().enumerate() {
                let col = stack_real(&w.matmul(h)?);
                for (r, v) in col.into_iter().enumerate() {
                    generator[r * cols + 2 * k + offset] = scale * v;
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            generator,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn generator(&self) -> &[f64] {
        &self.generator
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.generator
            .chunks(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Householder triangularization of the generator, with `y` rotated
    /// alongside.
    pub fn triangularize(&self, y: &[f64]) -> Triangular {
        let (m, n) = (self.rows, self.cols);
        assert_eq!(y.len(), m);
        let mut a = self.generator.clone();
        let mut z = y.to_vec();
        let r = m.min(n);
        let mut v = vec![0.0; m];
        for j in 0..r {
            let norm = (j..m).map(|i| a[i * n + j].powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let alpha = if a[j * n + j] > 0.0 { -norm } else { norm };
            for i in j..m {
                v[i] = a[i * n + j];
            }
            v[j] -= alpha;
            let vnorm2: f64 = (j..m).map(|i| v[i] * v[i]).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            for c in j..n {
                let dot: f64 = (j..m).map(|i| v[i] * a[i * n + c]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in j..m {
                    a[i * n + c] -= f * v[i];
                }
            }
            let dot: f64 = (j..m).map(|i| v[i] * z[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..m {
                z[i] -= f * v[i];
            }
        }
        let mut upper = vec![0.0; r * n];
        for i in 0..r {
            for c in i..n {
                upper[i * n + c] = a[i * n + c];
            }
        }
        z.truncate(r);
        Triangular {
            n,
            r,
            upper,
            z,
            y_norm_sqr: y.iter().map(|v| v * v).sum(),
            g_norm_sqr: self.generator.iter().map(|v| v * v).sum(),
        }
    }
}

/// `G = Q R` with `R` upper trapezoidal (`r = min(rows, cols)` rows) and
/// `z` the first `r` entries of `Q^T y`.
#[derive(Debug, Clone)]
pub struct Triangular {
    n: usize,
    r: usize,
    upper: Vec<f64>,
    z: Vec<f64>,
    y_norm_sqr: f64,
    g_norm_sqr: f64,
}

impl Triangular {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.upper[i * self.n + j]
    }
}

/// Depth-first enumeration of `x` with `x[i] in levels[i]`, pruned by the
/// triangular partial metric.
///
/// `leaf` receives level indices and values of a complete candidate and
/// returns its exact metric; the pruning radius is the smallest exact metric
/// seen so far, widened by a small slack so that candidates tying with the
/// best one are never skipped. Within a level, children are visited in
/// order of increasing distance from the level's center.
pub fn enumerate_box<F>(tri: &Triangular, levels: &[Vec<f64>], exclude_zero: bool, mut leaf: F)
where
    F: FnMut(&[usize], &[f64]) -> f64,
{
    let n = tri.n;
    assert_eq!(levels.len(), n);
    if n == 0 {
        return;
    }
    let max_level = levels
        .iter()
        .flat_map(|l| l.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let abs_slack = 1e-10 * (1.0 + tri.y_norm_sqr + tri.g_norm_sqr * max_level * max_level * n as f64);
    let mut state = Search {
        tri,
        levels,
        exclude_zero,
        radius: f64::INFINITY,
        abs_slack,
        idx: vec![0; n],
        x: vec![0.0; n],
    };
    state.descend(n - 1, 0.0, &mut leaf);
}

struct Search<'a> {
    tri: &'a Triangular,
    levels: &'a [Vec<f64>],
    exclude_zero: bool,
    radius: f64,
    abs_slack: f64,
    idx: Vec<usize>,
    x: Vec<f64>,
}

impl Search<'_> {
    fn bound(&self) -> f64 {
        self.radius * (1.0 + 1e-9) + self.abs_slack
    }

    fn visit<F>(&mut self, i: usize, j: usize, partial: f64, leaf: &mut F)
    where
        F: FnMut(&[usize], &[f64]) -> f64,
    {
        self.idx[i] = j;
        self.x[i] = self.levels[i][j];
        if i == 0 {
            if self.exclude_zero && self.x.iter().all(|&v| v == 0.0) {
                return;
            }
            let metric = leaf(&self.idx, &self.x);
            if metric < self.radius {
                self.radius = metric;
            }
        } else {
            self.descend(i - 1, partial, leaf);
        }
    }

    fn descend<F>(&mut self, i: usize, partial: f64, leaf: &mut F)
    where
        F: FnMut(&[usize], &[f64]) -> f64,
    {
        let tri = self.tri;
        let levels = &self.levels[i];
        let pivot = if i < tri.r { tri.at(i, i) } else { 0.0 };
        if pivot == 0.0 {
            // No pivot: the row (if any) does not depend on x[i].
            let extra = if i < tri.r {
                let s: f64 = (i + 1..tri.n).map(|j| tri.at(i, j) * self.x[j]).sum();
                (tri.z[i] - s).powi(2)
            } else {
                0.0
            };
            if partial + extra > self.bound() {
                return;
            }
            for j in 0..levels.len() {
                self.visit(i, j, partial + extra, leaf);
            }
            return;
        }
        let s: f64 = (i + 1..tri.n).map(|j| tri.at(i, j) * self.x[j]).sum();
        let center = (tri.z[i] - s) / pivot;
        let p2 = pivot * pivot;
        // Two pointers walking outward from the center.
        let split = levels.partition_point(|&v| v < center);
        let (mut lo, mut hi) = (split as isize - 1, split);
        loop {
            let lo_d = (lo >= 0).then(|| p2 * (levels[lo as usize] - center).powi(2));
            let hi_d = (hi < levels.len()).then(|| p2 * (levels[hi] - center).powi(2));
            let (j, d) = match (lo_d, hi_d) {
                (None, None) => return,
                (Some(a), Some(b)) if a <= b => (lo as usize, a),
                (Some(a), None) => (lo as usize, a),
                (_, Some(b)) => (hi, b),
            };
            if partial + d > self.bound() {
                // Farther children on both sides are worse still.
                return;
            }
            if j == hi {
                hi += 1;
            } else {
                lo -= 1;
            }
            self.visit(i, j, partial + d, leaf);
        }
    }
}

/// Real stacking of a symbol vector.
pub fn symbols_to_real(s: &[C64]) -> Vec<f64> {
    s.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Inverse of [`symbols_to_real`].
pub fn real_to_symbols(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}
