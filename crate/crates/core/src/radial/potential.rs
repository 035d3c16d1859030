//! Radial potentials `V(r)` and their admissibility checks.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{decades_to_infinity, integrate};

/// Sign metadata used by the first-zero search and the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "sign")]
pub enum SignInfo {
    NonNegative,
    /// `V = V₊ - V₋` with `V₋(r) ≲ (1 + r)^{-b}`.
    Signed {
        negative_decay: f64,
    },
}

/// Samples `(r_i, V_i)`, interpolated linearly in `ln r`; constant below the
/// first sample and zero past the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedPotential {
    r: Vec<f64>,
    v: Vec<f64>,
}

impl TabulatedPotential {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.len() != v.len() || r.len() < 2 {
            return Err(Error::Input(
                "tabulated potential needs at least two (r, V) samples".into(),
            ));
        }
        if !(r[0] > 0.0) {
            return Err(Error::Input("tabulated radii must be positive".into()));
        }
        if r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Input("tabulated radii must be strictly increasing".into()));
        }
        if r.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::Input("tabulated samples must be finite".into()));
        }
        Ok(Self { r, v })
    }

    /// Two whitespace-separated columns `r value`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut v = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 2 {
                return Err(Error::Input(format!(
                    "line {}: expected two columns 'r value', got '{line}'",
                    lineno + 1
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Input(format!("line {}: bad number '{s}'", lineno + 1)))
            };
            r.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
        }
        Self::new(r, v)
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.r.len();
        if x <= self.r[0] {
            return self.v[0];
        }
        if x > self.r[n - 1] {
            return 0.0;
        }
        let j = self.r.partition_point(|&ri| ri < x).clamp(1, n - 1);
        let (a, b) = (self.r[j - 1], self.r[j]);
        let t = (x.ln() - a.ln()) / (b.ln() - a.ln());
        self.v[j - 1] + t * (self.v[j] - self.v[j - 1])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RadialPotential {
    /// `e^{-r}/r`
    Yukawa,
    /// `e^{-r}`
    Exponential,
    /// `r^{-2}`
    Hardy,
    /// `r^{-2}` on `[ε, 1/ε]`, zero elsewhere
    TruncatedHardy {
        eps: f64,
    },
    Scaled {
        c: f64,
        base: Box<RadialPotential>,
    },
    Min {
        a: Box<RadialPotential>,
        b: Box<RadialPotential>,
    },
    Max {
        a: Box<RadialPotential>,
        b: Box<RadialPotential>,
    },
    /// `base(r)` for `r ≥ r0`, zero below
    Cutoff {
        r0: f64,
        base: Box<RadialPotential>,
    },
    Tabulated(TabulatedPotential),
}

impl RadialPotential {
    pub fn truncated_hardy(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::Input(format!("truncated_hardy needs 0 < eps < 1, got {eps}")));
        }
        Ok(Self::TruncatedHardy { eps })
    }

    pub fn scaled(c: f64, base: RadialPotential) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Input(format!("scale factor must be positive, got {c}")));
        }
        Ok(Self::Scaled {
            c,
            base: Box::new(base),
        })
    }

    pub fn min(a: RadialPotential, b: RadialPotential) -> Self {
        Self::Min {
            a: Box::new(a),
            b: Box::new(b),
        }
    }

    pub fn max(a: RadialPotential, b: RadialPotential) -> Self {
        Self::Max {
            a: Box::new(a),
            b: Box::new(b),
        }
    }

    pub fn cutoff(r0: f64, base: RadialPotential) -> Self {
        Self::Cutoff {
            r0,
            base: Box::new(base),
        }
    }

    pub fn tabulated(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        Ok(Self::Tabulated(TabulatedPotential::new(r, v)?))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(Self::Tabulated(TabulatedPotential::parse(&text)?))
    }

    /// `yukawa`, `exponential`, `hardy` or `truncated_hardy[:eps]` (default
    /// `eps = 0.01`).
    pub fn preset(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        match (head, arg) {
            ("yukawa", None) => Ok(Self::Yukawa),
            ("exponential", None) => Ok(Self::Exponential),
            ("hardy", None) => Ok(Self::Hardy),
            ("truncated_hardy", None) => Self::truncated_hardy(0.01),
            ("truncated_hardy", Some(a)) => {
                let eps = a.parse().map_err(|_| Error::Input(format!("bad eps in '{name}'")))?;
                Self::truncated_hardy(eps)
            }
            _ => Err(Error::Input(format!("unknown potential preset '{name}'"))),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Self::Yukawa => (-r).exp() / r,
            Self::Exponential => (-r).exp(),
            Self::Hardy => 1.0 / (r * r),
            Self::TruncatedHardy { eps } => {
                if r >= *eps && r <= 1.0 / eps {
                    1.0 / (r * r)
                } else {
                    0.0
                }
            }
            Self::Scaled { c, base } => c * base.eval(r),
            Self::Min { a, b } => a.eval(r).min(b.eval(r)),
            Self::Max { a, b } => a.eval(r).max(b.eval(r)),
            Self::Cutoff { r0, base } => {
                if r >= *r0 {
                    base.eval(r)
                } else {
                    0.0
                }
            }
            Self::Tabulated(t) => t.eval(r),
        }
    }

    pub fn sign_info(&self) -> SignInfo {
        match self {
            Self::Yukawa | Self::Exponential | Self::Hardy | Self::TruncatedHardy { .. } => SignInfo::NonNegative,
            Self::Scaled { base, .. } | Self::Cutoff { base, .. } => base.sign_info(),
            Self::Min { a, b } | Self::Max { a, b } => match (a.sign_info(), b.sign_info()) {
                (SignInfo::NonNegative, SignInfo::NonNegative) => SignInfo::NonNegative,
                (SignInfo::Signed { negative_decay: x }, SignInfo::Signed { negative_decay: y }) => SignInfo::Signed {
                    negative_decay: x.min(y),
                },
                (SignInfo::Signed { negative_decay }, _) | (_, SignInfo::Signed { negative_decay }) => {
                    SignInfo::Signed { negative_decay }
                }
            },
            // zero extension: the negative part has compact support
            Self::Tabulated(t) => {
                if t.v.iter().any(|&x| x < 0.0) {
                    SignInfo::Signed {
                        negative_decay: f64::INFINITY,
                    }
                } else {
                    SignInfo::NonNegative
                }
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.sign_info() == SignInfo::NonNegative
    }
}

impl fmt::Display for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Yukawa => f.write_str("yukawa"),
            Self::Exponential => f.write_str("exponential"),
            Self::Hardy => f.write_str("hardy"),
            Self::TruncatedHardy { eps } => write!(f, "truncated_hardy({eps})"),
            Self::Scaled { c, base } => write!(f, "scaled({c}, {base})"),
            Self::Min { a, b } => write!(f, "min({a}, {b})"),
            Self::Max { a, b } => write!(f, "max({a}, {b})"),
            Self::Cutoff { r0, base } => write!(f, "cutoff({r0}, {base})"),
            Self::Tabulated(t) => write!(f, "tabulated({} samples)", t.r.len()),
        }
    }
}

/// Outcome of [`check_admissible`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub passed: bool,
    /// `(r, r² V(r))` at `r = 10^{-1}, …, 10^{-12}`
    pub near_zero: Vec<(f64, f64)>,
    /// `(r, r² V(r))` at `r = 10^{1}, …, 10^{12}`
    pub near_infinity: Vec<(f64, f64)>,
    /// `∫_0^∞ r |V(r)| dr` over the decades examined
    pub weighted_integral: f64,
    pub integral_converged: bool,
    pub failures: Vec<String>,
}

const SAMPLE_DECADES: i32 = 12;
/// `|r² V|` at the three outermost samples of each end must stay below this.
pub const LIMIT_TOL: f64 = 1e-3;
const INTEGRAL_DECADES: usize = 40;
const QUIET_REL: f64 = 1e-12;

/// Numerical check of `r² V(r) → 0` at both ends and `∫_0^∞ r |V(r)| dr < ∞`.
pub fn check_admissible(v: &RadialPotential) -> Result<AdmissibilityReport> {
    let sample = |r: f64| -> Result<(f64, f64)> {
        let x = v.eval(r);
        if !x.is_finite() {
            return Err(Error::Input(format!("potential {v} is not finite at r = {r}")));
        }
        Ok((r, r * r * x))
    };
    let near_zero = (1..=SAMPLE_DECADES)
        .map(|j| sample(10f64.powi(-j)))
        .collect::<Result<Vec<_>>>()?;
    let near_infinity = (1..=SAMPLE_DECADES)
        .map(|j| sample(10f64.powi(j)))
        .collect::<Result<Vec<_>>>()?;
    let mut failures = Vec::new();
    let tail_max = |s: &[(f64, f64)]| s[s.len() - 3..].iter().map(|p| p.1.abs()).fold(0.0, f64::max);
    let z = tail_max(&near_zero);
    if z > LIMIT_TOL {
        failures.push(format!(
            "r^2 V(r) does not tend to 0 as r -> 0 (|r^2 V| = {z:e} at r = 1e-10..1e-12)"
        ));
    }
    let i = tail_max(&near_infinity);
    if i > LIMIT_TOL {
        failures.push(format!(
            "r^2 V(r) does not tend to 0 as r -> infinity (|r^2 V| = {i:e} at r = 1e10..1e12)"
        ));
    }
    let f = |r: f64| r * v.eval(r).abs();
    let (inner, inner_ok) = decades_to_zero(&f, 1.0)?;
    let outer = decades_to_infinity(f, 1.0, INTEGRAL_DECADES, QUIET_REL)?;
    let outer_ok = outer.len() < INTEGRAL_DECADES;
    let weighted_integral = inner + outer.iter().sum::<f64>();
    if !inner_ok {
        failures.push("integral of r|V| diverges at r -> 0".into());
    }
    if !outer_ok {
        failures.push("integral of r|V| diverges at r -> infinity".into());
    }
    Ok(AdmissibilityReport {
        passed: failures.is_empty(),
        near_zero,
        near_infinity,
        weighted_integral,
        integral_converged: inner_ok && outer_ok,
        failures,
    })
}

/// `∫_0^a f` summed over decades `[a 10^{-j-1}, a 10^{-j}]` until three
/// consecutive decades are negligible; the flag reports whether that happened.
pub(crate) fn decades_to_zero<F: Fn(f64) -> f64>(f: &F, a: f64) -> Result<(f64, bool)> {
    let mut total = 0.0;
    let mut quiet = 0;
    let mut hi = a;
    for _ in 0..INTEGRAL_DECADES {
        let lo = hi / 10.0;
        let q = integrate(f, lo, hi, 1e-300, 1e-12)?;
        total += q.value;
        if q.value.abs() <= QUIET_REL * total.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok((total, true));
            }
        } else {
            quiet = 0;
        }
        hi = lo;
    }
    Ok((total, false))
}
