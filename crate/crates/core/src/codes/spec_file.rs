//! Line-oriented scheme description files.
//!
//! ```text
//! # 2x2 golden thread scheme at 4 bpcu
//! family = golden_thread
//! constellation = QAM4
//! ```
//!
//! Recognised keys: `family`, `nt`, `n`, `t`, `constellation`, `rotation`
//! (`builtin:D` or `file:path`), `beamformers` (`dft`, `phase` or
//! `file:path`), `constellation_large` (switching only), `beta` (imaginary
//! exponent for `t1`), `code` (`golden`, `alamouti` or `spatial_multiplexing`
//! for `no_feedback`) and `name`. Relative paths resolve against the
//! directory of the spec file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::construct::{
    alamouti_code, antenna_selection_scheme, beamforming_scheme, dft_beamformers, golden_code,
    golden_thread_scheme, no_feedback_scheme, phase_feedback_vectors, spatial_multiplexing_code,
    switching_scheme, t1_scheme, threaded_scheme,
};
use super::FiniteFeedbackScheme;
use crate::algebra::{
    besicovitch_exponents, golden_exponent, AlgebraicRotation, Constellation, C64,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    GoldenThread,
    T1,
    Threaded,
    AntennaSelection,
    Beamforming,
    Switching,
    NoFeedback,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::GoldenThread,
        Family::T1,
        Family::Threaded,
        Family::AntennaSelection,
        Family::Beamforming,
        Family::Switching,
        Family::NoFeedback,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Family::GoldenThread => "golden_thread",
            Family::T1 => "t1",
            Family::Threaded => "threaded",
            Family::AntennaSelection => "antenna_selection",
            Family::Beamforming => "beamforming",
            Family::Switching => "switching",
            Family::NoFeedback => "no_feedback",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown family `{s}`")))
    }
}

/// A parsed scheme description. Paths are already resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    pub family: Family,
    pub name: Option<String>,
    pub nt: Option<usize>,
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub constellation: String,
    pub constellation_large: Option<String>,
    pub rotation: Option<String>,
    pub beamformers: Option<String>,
    pub beta: Option<f64>,
    pub code: Option<String>,
    base_dir: PathBuf,
}

const KEYS: [&str; 11] = [
    "family",
    "name",
    "nt",
    "n",
    "t",
    "constellation",
    "constellation_large",
    "rotation",
    "beamformers",
    "beta",
    "code",
];

fn parse_count(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| Error::Parse(format!("`{key}` must be a non-negative integer, got `{v}`")))
}

impl SchemeSpec {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str, base_dir: impl AsRef<Path>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Parse(format!("line {}: unknown key `{key}`", lineno + 1)));
            }
            if map.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let get = |k: &str| map.get(k).cloned();
        let family: Family = get("family")
            .ok_or_else(|| Error::Parse("missing `family`".into()))?
            .parse()?;
        let count = |k: &str| get(k).map(|v| parse_count(k, &v)).transpose();
        let beta = get("beta")
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("`beta` must be a real number, got `{v}`")))
            })
            .transpose()?;
        Ok(Self {
            family,
            name: get("name"),
            nt: count("nt")?,
            n: count("n")?,
            t: count("t")?,
            constellation: get("constellation").unwrap_or_else(|| "QAM4".into()),
            constellation_large: get("constellation_large"),
            rotation: get("rotation"),
            beamformers: get("beamformers"),
            beta,
            code: get("code"),
            base_dir: base_dir.as_ref().to_path_buf(),
        })
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn load_rotation(&self, dim: usize) -> Result<AlgebraicRotation> {
        let u = match self.rotation.as_deref() {
            None => AlgebraicRotation::builtin(dim)?,
            Some(r) => {
                if let Some(d) = r.strip_prefix("builtin:") {
                    AlgebraicRotation::builtin(parse_count("rotation", d)?)?
                } else if let Some(p) = r.strip_prefix("file:") {
                    AlgebraicRotation::from_file(self.resolve(p))?
                } else {
                    return Err(Error::Parse(format!(
                        "rotation must be `builtin:D` or `file:path`, got `{r}`"
                    )));
                }
            }
        };
        if u.dim() != dim {
            return Err(Error::Dimension(format!(
                "rotation {} is {}x{}, scheme needs {dim}x{dim}",
                u.source(),
                u.dim(),
                u.dim()
            )));
        }
        Ok(u)
    }

    fn expect(&self, key: &str, got: Option<usize>, want: usize) -> Result<()> {
        match got {
            Some(v) if v != want => Err(Error::Dimension(format!(
                "{} requires {key} = {want}, got {v}",
                self.family
            ))),
            _ => Ok(()),
        }
    }

    fn require(&self, key: &str, v: Option<usize>) -> Result<usize> {
        v.ok_or_else(|| Error::Parse(format!("{} requires `{key}`", self.family)))
    }

    pub fn build(&self) -> Result<FiniteFeedbackScheme> {
        let c = Constellation::by_name(&self.constellation)?;
        let scheme = match self.family {
            Family::GoldenThread => {
                self.expect("nt", self.nt, 2)?;
                self.expect("n", self.n, 2)?;
                self.expect("t", self.t, 1)?;
                golden_thread_scheme(&c)?
            }
            Family::T1 => {
                let nt = self.require("nt", self.nt)?;
                self.expect("n", self.n, nt)?;
                self.expect("t", self.t, 1)?;
                let u = self.load_rotation(nt)?;
                t1_scheme(nt, &u, self.beta.unwrap_or_else(golden_exponent), &c)?
            }
            Family::Threaded => {
                let n = self.require("n", self.n)?;
                let t = self.require("t", self.t)?;
                self.expect("nt", self.nt, n * t)?;
                let u = self.load_rotation(n * t)?;
                threaded_scheme(n, t, &u, &besicovitch_exponents(t), &c)?
            }
            Family::AntennaSelection => {
                let nt = self.require("nt", self.nt)?;
                self.expect("n", self.n, nt)?;
                self.expect("t", self.t, 1)?;
                antenna_selection_scheme(nt, &c)?
            }
            Family::Beamforming => {
                self.expect("t", self.t, 1)?;
                let vectors = match self.beamformers.as_deref().unwrap_or("dft") {
                    "dft" => {
                        let nt = self.require("nt", self.nt)?;
                        self.expect("n", self.n, nt)?;
                        dft_beamformers(nt)
                    }
                    "phase" => {
                        self.expect("nt", self.nt, 2)?;
                        phase_feedback_vectors(self.n.unwrap_or(2))
                    }
                    other => {
                        let p = other.strip_prefix("file:").ok_or_else(|| {
                            Error::Parse(format!(
                                "beamformers must be `dft`, `phase` or `file:path`, got `{other}`"
                            ))
                        })?;
                        let text = std::fs::read_to_string(self.resolve(p))
                            .map_err(|e| Error::Io(format!("{p}: {e}")))?;
                        let v = parse_beamformer_file(&text)?;
                        self.expect("nt", self.nt, v[0].len())?;
                        self.expect("n", self.n, v.len())?;
                        v
                    }
                };
                beamforming_scheme(&vectors, &c)?
            }
            Family::Switching => {
                self.expect("nt", self.nt, 2)?;
                self.expect("n", self.n, 2)?;
                self.expect("t", self.t, 2)?;
                let large = match &self.constellation_large {
                    Some(name) => Constellation::by_name(name)?,
                    None => Constellation::square_qam(2 * c.bits_per_symbol()),
                };
                switching_scheme(&c, &large)?
            }
            Family::NoFeedback => {
                self.expect("n", self.n, 1)?;
                let code = match self.code.as_deref().unwrap_or("golden") {
                    "golden" => golden_code(&c)?,
                    "alamouti" => alamouti_code(&c)?,
                    "spatial_multiplexing" => {
                        let nt = self.nt.unwrap_or(2);
                        spatial_multiplexing_code(self.t.unwrap_or(nt), nt, &c)?
                    }
                    other => return Err(Error::Parse(format!("unknown code `{other}`"))),
                };
                self.expect("nt", self.nt, code.nt())?;
                self.expect("t", self.t, code.t())?;
                no_feedback_scheme(code)?
            }
        };
        Ok(match &self.name {
            Some(name) => scheme.with_name(name.clone()),
            None => scheme,
        })
    }
}

/// Beamformer file: the two counts `nt N` on the first line (an optional
/// leading `nt` keyword is accepted), then `N` lines of `2 nt`
/// reals with real and imaginary parts interleaved.
pub fn parse_beamformer_file(text: &str) -> Result<Vec<Vec<C64>>> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty beamformer file".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (nt, n) = match fields.as_slice() {
        [nt, n] | ["nt", nt, n] => (parse_count("nt", nt)?, parse_count("N", n)?),
        _ => return Err(Error::Parse(format!("beamformer header `{header}` is not `nt N`"))),
    };
    if nt == 0 || n == 0 {
        return Err(Error::Parse("beamformer header needs nt > 0 and N > 0".into()));
    }
    let mut vectors = Vec::with_capacity(n);
    for (i, line) in lines.enumerate() {
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("beamformer {}: bad number `{tok}`", i + 1)))
            })
            .collect::<Result<_>>()?;
        if values.len() != 2 * nt {
            return Err(Error::Parse(format!(
                "beamformer {} has {} values, expected {}",
                i + 1,
                values.len(),
                2 * nt
            )));
        }
        vectors.push(values.chunks(2).map(|p| C64::new(p[0], p[1])).collect());
    }
    if vectors.len() != n {
        return Err(Error::Parse(format!(
            "beamformer file lists {} vectors, header says {n}",
            vectors.len()
        )));
    }
    Ok(vectors)
}
