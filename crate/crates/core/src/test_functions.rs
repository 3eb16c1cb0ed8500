//! Monotone stochastic test functions.
//!
//! A test function maps the number of defectives `x` in a pool to the
//! probability `f(x)` that the pool tests positive. Values are stored as an
//! explicit table over `0..=d`; a [`Family`] re-instantiates the table at a
//! different `d`, which the estimator of `d` relies on.

use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Values this far outside `[0, 1]` are clamped on ingestion.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// A tabulated monotone test function `f: {0..d} -> [0, 1]` with `f(0) < f(d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    values: Vec<f64>,
}

impl TestFunction {
    /// Validates a table of `d + 1` values.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::ParameterOutOfRange(format!(
                "a test function needs at least 2 values (d >= 1), got {}",
                values.len()
            )));
        }
        for (x, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::ParameterOutOfRange(format!("f({x}) is not finite")));
            }
            if *v < 0.0 {
                if *v < -CLAMP_TOLERANCE {
                    return Err(Error::ParameterOutOfRange(format!("f({x}) = {v} < 0")));
                }
                *v = 0.0;
            } else if *v > 1.0 {
                if *v > 1.0 + CLAMP_TOLERANCE {
                    return Err(Error::ParameterOutOfRange(format!("f({x}) = {v} > 1")));
                }
                *v = 1.0;
            }
        }
        for (i, w) in values.windows(2).enumerate() {
            if w[0] > w[1] {
                return Err(Error::NonMonotone {
                    index: i,
                    prev: w[0],
                    next_index: i + 1,
                    next: w[1],
                });
            }
        }
        let d = values.len() - 1;
        if values[0] >= values[d] {
            return Err(Error::Degenerate(format!(
                "f(0) = f(d) = {} so no test can separate defectives",
                values[0]
            )));
        }
        Ok(TestFunction { values })
    }

    /// Number of defectives the table is defined for.
    pub fn d(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(x)`; panics if `x > d`.
    pub fn at(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn f0(&self) -> f64 {
        self.values[0]
    }

    pub fn fd(&self) -> f64 {
        self.values[self.d()]
    }

    /// `f(x+1) - f(x)` for `x in 0..d`.
    pub fn increments(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn classify(&self) -> NoiseClass {
        classify(self)
    }

    /// Reads a table file: one probability per line, `d + 1` lines.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::new(parse_table(&text)?)
    }
}

pub(crate) fn parse_table(text: &str) -> Result<Vec<f64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .enumerate()
        .map(|(i, l)| {
            l.parse::<f64>()
                .map_err(|e| Error::Parse(format!("table line {}: {l:?}: {e}", i + 1)))
        })
        .collect()
}

/// Exact finite-`d` noise classes.
///
/// The asymptotic near-noiseless classes depend on how `f` behaves as `d`
/// grows, so they cannot be decided from a single table; callers that need
/// them can inspect `f0()` and `fd()` directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseClass {
    /// `0 < f(0)` and `f(d) < 1`.
    Noisy,
    /// Exactly one of `f(0) = 0`, `f(d) = 1`.
    OneSidedNoiseless,
    /// `f(0) = 0` and `f(d) = 1`.
    Noiseless,
}

pub fn classify(f: &TestFunction) -> NoiseClass {
    match (f.f0() == 0.0, f.fd() == 1.0) {
        (true, true) => NoiseClass::Noiseless,
        (false, false) => NoiseClass::Noisy,
        _ => NoiseClass::OneSidedNoiseless,
    }
}

impl fmt::Display for NoiseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NoiseClass::Noisy => "noisy",
            NoiseClass::OneSidedNoiseless => "one_sided_noiseless",
            NoiseClass::Noiseless => "noiseless",
        };
        f.write_str(s)
    }
}

/// A family of test functions indexed by `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Family {
    /// `f(0) = 0`, `f(x) = 1` for `x >= 1`.
    Classical,
    /// `f(x) = 0` for `x <= l`, `1` above.
    Threshold { l: usize },
    /// `f(x) = x / d`.
    Linear,
    /// `0` up to `l`, linear ramp on `(l, u)`, `1` from `u`.
    LinearGap { l: usize, u: usize },
    /// `f(0) = a`, `f(x) = b` for `x >= 1`.
    Noisy { a: f64, b: f64 },
    /// `f(x) = x / d^w` on `[0, d^w]`, `1` beyond.
    PartialLinear { w: f64 },
    /// Logistic curve centred at `d / 2` with slope `1/2`.
    Sigmoid,
    /// A fixed user table, valid only at its own `d`.
    Table { values: Vec<f64> },
}

impl Family {
    /// Builds the table for `d` defectives.
    pub fn instantiate(&self, d: usize) -> Result<TestFunction> {
        build(self, d)
    }

    /// Parses the command-line family syntax, e.g. `threshold:5`,
    /// `linear-gap:2,6`, `noisy:0.1,0.9`, `partial-linear:2/3`, `table:f.txt`.
    pub fn parse(spec: &str) -> Result<Family> {
        let (name, args) = match spec.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let need =
            |what: &str| args.ok_or_else(|| Error::Parse(format!("family {name} needs {what}")));
        let family = match name {
            "classical" => Family::Classical,
            "linear" => Family::Linear,
            "sigmoid" => Family::Sigmoid,
            "threshold" => Family::Threshold {
                l: parse_usize(need("<l>")?)?,
            },
            "linear-gap" => {
                let (l, u) = split_pair(need("<l>,<u>")?)?;
                Family::LinearGap {
                    l: parse_usize(l)?,
                    u: parse_usize(u)?,
                }
            }
            "noisy" => {
                let (a, b) = split_pair(need("<a>,<b>")?)?;
                Family::Noisy {
                    a: parse_real(a)?,
                    b: parse_real(b)?,
                }
            }
            "partial-linear" => Family::PartialLinear {
                w: parse_real(need("<w>")?)?,
            },
            "table" => {
                let path = need("<path>")?;
                let text =
                    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
                Family::Table {
                    values: parse_table(&text)?,
                }
            }
            other => {
                return Err(Error::Parse(format!(
                    "unknown test function family {other:?}"
                )))
            }
        };
        Ok(family)
    }

    /// The fixed `d` of a table family.
    pub fn table_d(&self) -> Option<usize> {
        match self {
            Family::Table { values } => values.len().checked_sub(1),
            _ => None,
        }
    }

    /// Conventional participation probability for simulations:
    /// `l/d` for threshold functions and `1/2` for linear ones.
    pub fn heuristic_q(&self, d: usize) -> Option<f64> {
        match self {
            Family::Threshold { l } if *l >= 1 && *l < d => Some(*l as f64 / d as f64),
            Family::Linear => Some(0.5),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Classical => write!(f, "classical"),
            Family::Threshold { l } => write!(f, "threshold:{l}"),
            Family::Linear => write!(f, "linear"),
            Family::LinearGap { l, u } => write!(f, "linear-gap:{l},{u}"),
            Family::Noisy { a, b } => write!(f, "noisy:{a},{b}"),
            Family::PartialLinear { w } => write!(f, "partial-linear:{w}"),
            Family::Sigmoid => write!(f, "sigmoid"),
            Family::Table { values } => write!(f, "table[{}]", values.len()),
        }
    }
}

fn split_pair(s: &str) -> Result<(&str, &str)> {
    s.split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Error::Parse(format!("expected two comma-separated values, got {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

/// Accepts decimals and simple fractions such as `2/3`.
fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
    };
    match s.split_once('/') {
        Some((num, den)) => Ok(parse(num)? / parse(den)?),
        None => parse(s),
    }
}

/// Builds the table of `family` at `d` defectives.
pub fn build(family: &Family, d: usize) -> Result<TestFunction> {
    if d == 0 {
        return Err(Error::ParameterOutOfRange("d must be at least 1".into()));
    }
    let xs = 0..=d;
    let values: Vec<f64> = match family {
        Family::Classical => xs.map(|x| if x == 0 { 0.0 } else { 1.0 }).collect(),
        Family::Threshold { l } => {
            if *l >= d {
                return Err(Error::ParameterOutOfRange(format!(
                    "threshold l = {l} must satisfy l < d = {d}"
                )));
            }
            xs.map(|x| if x <= *l { 0.0 } else { 1.0 }).collect()
        }
        Family::Linear => xs.map(|x| x as f64 / d as f64).collect(),
        Family::LinearGap { l, u } => {
            if !(0 < *l && l < u && *u < d) {
                return Err(Error::ParameterOutOfRange(format!(
                    "linear-gap needs 0 < l < u < d, got l = {l}, u = {u}, d = {d}"
                )));
            }
            let span = (*u - *l) as f64;
            xs.map(|x| {
                if x <= *l {
                    0.0
                } else if x >= *u {
                    1.0
                } else {
                    (x - *l) as f64 / span
                }
            })
            .collect()
        }
        Family::Noisy { a, b } => {
            if !(0.0 < *a && a < b && *b < 1.0) {
                return Err(Error::ParameterOutOfRange(format!(
                    "noisy needs 0 < a < b < 1, got a = {a}, b = {b}"
                )));
            }
            xs.map(|x| if x == 0 { *a } else { *b }).collect()
        }
        Family::PartialLinear { w } => {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::ParameterOutOfRange(format!(
                    "partial-linear needs w in [0, 1], got {w}"
                )));
            }
            let mut knee = (d as f64).powf(*w);
            // d^w lands on an integer for many inputs (125^(2/3) = 25); powf may miss by an ulp.
            if (knee - knee.round()).abs() <= 1e-9 * knee {
                knee = knee.round();
            }
            xs.map(|x| {
                let x = x as f64;
                if x <= knee {
                    (x / knee).min(1.0)
                } else {
                    1.0
                }
            })
            .collect()
        }
        Family::Sigmoid => {
            let centre = d as f64 / 4.0;
            xs.map(|x| logistic(x as f64 / 2.0 - centre)).collect()
        }
        Family::Table { values } => {
            if values.len() != d + 1 {
                return Err(Error::ParameterOutOfRange(format!(
                    "table has {} values, which fixes d = {}, not {d}",
                    values.len(),
                    values.len().saturating_sub(1)
                )));
            }
            values.clone()
        }
    };
    TestFunction::new(values)
}

/// `e^z / (e^z + 1)` without overflow.
fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (e + 1.0)
    }
}
