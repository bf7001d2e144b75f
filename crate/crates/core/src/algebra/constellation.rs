//! Gaussian-integer signal sets with Gray labeling.
//!
//! Points are kept unnormalized on the odd-integer grid. The bit label of a
//! square QAM point splits into two halves: the first (most significant) half
//! is the reflected Gray code of the real-axis level, the second half that of
//! the imaginary-axis level. Level `j` on an axis with `L` levels has
//! amplitude `(L - 1) - 2j`, so label bit `0` maps to the positive side; for
//! BPSK this gives `0 -> +1`, `1 -> -1`.

use std::collections::BTreeSet;

use crate::algebra::matrix::C64;
use crate::error::{Error, Result};

/// A point of the integer lattice `Z[i]`.
pub type GaussianInt = (i64, i64);

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    bits_per_symbol: usize,
    /// `points[label]` is the point carrying bit label `label`.
    points: Vec<GaussianInt>,
    complex: Vec<C64>,
    axes: Option<BoxAxes>,
}

/// Per-axis structure of a constellation that is a Cartesian product
/// `re_levels x im_levels` of integer levels.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxAxes {
    pub re_levels: Vec<i64>,
    pub im_levels: Vec<i64>,
    /// `labels[i_re * im_levels.len() + i_im]` is the label of that point.
    labels: Vec<usize>,
}

impl BoxAxes {
    pub fn label(&self, re_index: usize, im_index: usize) -> usize {
        self.labels[re_index * self.im_levels.len() + im_index]
    }
}

fn gray(j: usize) -> usize {
    j ^ (j >> 1)
}

impl Constellation {
    /// Built-in constellation by name: `BPSK` or `QAM<M>` with `M = 4^k`,
    /// `1 <= k <= 8`.
    pub fn by_name(name: &str) -> Result<Self> {
        let upper = name.trim().to_ascii_uppercase();
        if upper == "BPSK" {
            return Ok(Self::bpsk());
        }
        let order = upper
            .strip_prefix("QAM")
            .and_then(|m| m.parse::<usize>().ok())
            .ok_or_else(|| Error::UnsupportedConstellation(name.to_string()))?;
        let bits = order.trailing_zeros() as usize;
        if !order.is_power_of_two() || !bits.is_multiple_of(2) || bits == 0 || bits > 16 {
            return Err(Error::UnsupportedConstellation(name.to_string()));
        }
        Ok(Self::square_qam(bits))
    }

    pub fn bpsk() -> Self {
        let points = vec![(1, 0), (-1, 0)];
        let axes = BoxAxes {
            re_levels: vec![-1, 1],
            im_levels: vec![0],
            labels: vec![1, 0],
        };
        Self::assemble("BPSK".into(), 1, points, Some(axes))
    }

    /// Square `2^bits`-QAM on the odd-integer grid.
    pub fn square_qam(bits: usize) -> Self {
        assert!(bits >= 2 && bits.is_multiple_of(2), "square QAM needs an even bit count");
        let half = bits / 2;
        let levels = 1usize << half;
        let amp = |j: usize| (levels as i64 - 1) - 2 * j as i64;
        let mut points = vec![(0, 0); 1 << bits];
        for j_re in 0..levels {
            for j_im in 0..levels {
                let label = (gray(j_re) << half) | gray(j_im);
                points[label] = (amp(j_re), amp(j_im));
            }
        }
        let sorted: Vec<i64> = (0..levels).rev().map(amp).collect();
        let mut labels = vec![0; levels * levels];
        for (i_re, &re) in sorted.iter().enumerate() {
            for (i_im, &im) in sorted.iter().enumerate() {
                let j_re = ((levels as i64 - 1 - re) / 2) as usize;
                let j_im = ((levels as i64 - 1 - im) / 2) as usize;
                labels[i_re * levels + i_im] = (gray(j_re) << half) | gray(j_im);
            }
        }
        let axes = BoxAxes {
            re_levels: sorted.clone(),
            im_levels: sorted,
            labels,
        };
        Self::assemble(format!("QAM{}", 1usize << bits), bits, points, Some(axes))
    }

    /// Arbitrary Gaussian-integer signal set; point `i` carries label `i`.
    /// The size must be a power of two and the points distinct.
    pub fn custom(name: &str, points: Vec<GaussianInt>) -> Result<Self> {
        if points.is_empty() || !points.len().is_power_of_two() {
            return Err(Error::UnsupportedConstellation(format!(
                "{name}: size {} is not a power of two",
                points.len()
            )));
        }
        let distinct: BTreeSet<_> = points.iter().copied().collect();
        if distinct.len() != points.len() {
            return Err(Error::UnsupportedConstellation(format!("{name}: repeated points")));
        }
        let re: BTreeSet<i64> = points.iter().map(|p| p.0).collect();
        let im: BTreeSet<i64> = points.iter().map(|p| p.1).collect();
        let axes = (re.len() * im.len() == points.len()).then(|| {
            let re_levels: Vec<i64> = re.into_iter().collect();
            let im_levels: Vec<i64> = im.into_iter().collect();
            let mut labels = vec![0; points.len()];
            for (label, p) in points.iter().enumerate() {
                let i_re = re_levels.binary_search(&p.0).unwrap();
                let i_im = im_levels.binary_search(&p.1).unwrap();
                labels[i_re * im_levels.len() + i_im] = label;
            }
            BoxAxes {
                re_levels,
                im_levels,
                labels,
            }
        });
        let bits = points.len().trailing_zeros() as usize;
        Ok(Self::assemble(name.to_string(), bits, points, axes))
    }

    fn assemble(
        name: String,
        bits_per_symbol: usize,
        points: Vec<GaussianInt>,
        axes: Option<BoxAxes>,
    ) -> Self {
        let complex = points
            .iter()
            .map(|&(re, im)| C64::new(re as f64, im as f64))
            .collect();
        Self {
            name,
            bits_per_symbol,
            points,
            complex,
            axes,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points indexed by label.
    pub fn gaussian_points(&self) -> &[GaussianInt] {
        &self.points
    }

    pub fn points(&self) -> &[C64] {
        &self.complex
    }

    pub fn point(&self, label: usize) -> C64 {
        self.complex[label]
    }

    pub fn label_of(&self, p: GaussianInt) -> Option<usize> {
        self.points.iter().position(|&q| q == p)
    }

    /// Per-axis structure, present when the set is a rectangular grid.
    pub fn box_axes(&self) -> Option<&BoxAxes> {
        self.axes.as_ref()
    }

    /// Average energy `E|a|^2` under uniform labels.
    pub fn mean_energy(&self) -> f64 {
        self.complex.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    pub fn mean(&self) -> C64 {
        self.complex.iter().sum::<C64>() / self.len() as f64
    }

    /// Closed difference set `{a1 - a2}` including zero, sorted.
    pub fn difference_alphabet(&self) -> Vec<GaussianInt> {
        if let Some(axes) = &self.axes {
            // A grid's differences are the grid of per-axis differences.
            let re = axis_differences(&axes.re_levels);
            let im = axis_differences(&axes.im_levels);
            return re
                .iter()
                .flat_map(|&r| im.iter().map(move |&i| (r, i)))
                .collect();
        }
        let set: BTreeSet<GaussianInt> = self
            .points
            .iter()
            .flat_map(|&(r1, i1)| self.points.iter().map(move |&(r2, i2)| (r1 - r2, i1 - i2)))
            .collect();
        set.into_iter().collect()
    }
}

/// Per-axis differences of a grid constellation, sorted.
pub fn axis_differences(levels: &[i64]) -> Vec<i64> {
    let set: BTreeSet<i64> = levels
        .iter()
        .flat_map(|&a| levels.iter().map(move |&b| a - b))
        .collect();
    set.into_iter().collect()
}

/// Function form of [`Constellation::by_name`].
pub fn make_constellation(name: &str) -> Result<Constellation> {
    Constellation::by_name(name)
}

/// Function form of [`Constellation::difference_alphabet`].
pub fn difference_alphabet(c: &Constellation) -> Vec<GaussianInt> {
    c.difference_alphabet()
}
