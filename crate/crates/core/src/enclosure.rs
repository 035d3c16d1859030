//! Closed intervals `[lo, hi]` of extended reals with outward-rounded arithmetic.
//!
//! Every binary operation rounds the lower endpoint down and the upper endpoint
//! up by one ulp after a round-to-nearest evaluation, which over-covers the
//! at-most-half-ulp error of the IEEE operation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Certified sign of an enclosed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
    Indeterminate,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Sign::Positive => "+",
            Sign::Negative => "-",
            Sign::Indeterminate => "?",
        };
        f.write_str(s)
    }
}

/// An ordered pair `lo <= hi` certifying `lo <= x <= hi` for some true value `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    lo: f64,
    hi: f64,
}

#[inline]
fn down(x: f64) -> f64 {
    if x.is_finite() {
        x.next_down()
    } else {
        x
    }
}

#[inline]
fn up(x: f64) -> f64 {
    if x.is_finite() {
        x.next_up()
    } else {
        x
    }
}

impl Enclosure {
    /// Panics if `lo > hi` or either endpoint is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        Self::try_new(lo, hi).unwrap_or_else(|| panic!("invalid enclosure [{lo}, {hi}]"))
    }

    pub fn try_new(lo: f64, hi: f64) -> Option<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            None
        } else {
            Some(Self { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Self::new(x, x)
    }

    /// `[mid - rad, mid + rad]`, rounded outward.
    pub fn around(mid: f64, rad: f64) -> Self {
        let rad = rad.abs();
        Self::new(down(mid - rad), up(mid + rad))
    }

    /// Smallest enclosure containing both `a` and `b`.
    pub fn spanning(a: f64, b: f64) -> Self {
        Self::new(a.min(b), a.max(b))
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_finite() && self.hi.is_finite() {
            0.5 * self.lo + 0.5 * self.hi
        } else {
            0.5 * (self.lo + self.hi)
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Enclosure) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn is_subset_of(&self, other: &Enclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Subset with at least one endpoint strictly inside `other`.
    pub fn is_strictly_nested_in(&self, other: &Enclosure) -> bool {
        self.is_subset_of(other) && self.width() < other.width()
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn sign(&self) -> Sign {
        if self.lo > 0.0 {
            Sign::Positive
        } else if self.hi < 0.0 {
            Sign::Negative
        } else {
            Sign::Indeterminate
        }
    }

    /// Widen by an absolute error bound.
    pub fn inflate(&self, err: f64) -> Enclosure {
        let err = err.abs();
        Enclosure::new(down(self.lo - err), up(self.hi + err))
    }

    pub fn scale(&self, c: f64) -> Enclosure {
        *self * Enclosure::point(c)
    }

    pub fn powi(&self, k: u32) -> Enclosure {
        let mut acc = Enclosure::point(1.0);
        for _ in 0..k {
            acc = acc * *self;
        }
        acc
    }

    /// Enclosure of `exp(x)`; libm `exp` is assumed accurate to a few ulps.
    pub fn exp_of(x: f64) -> Enclosure {
        let v = x.exp();
        let slack = 4.0 * f64::EPSILON * v;
        Enclosure::new((v - slack).max(0.0), v + slack)
    }

    pub fn exp(&self) -> Enclosure {
        Enclosure::new(Enclosure::exp_of(self.lo).lo, Enclosure::exp_of(self.hi).hi)
    }

    /// Reciprocal; panics if the enclosure contains zero.
    pub fn recip(&self) -> Enclosure {
        assert!(self.lo > 0.0 || self.hi < 0.0, "reciprocal of enclosure containing 0");
        Enclosure::new(down(1.0 / self.hi), up(1.0 / self.lo))
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo, self.hi)
    }
}

impl Add for Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: Enclosure) -> Enclosure {
        Enclosure::new(down(self.lo + rhs.lo), up(self.hi + rhs.hi))
    }
}

impl Sub for Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: Enclosure) -> Enclosure {
        Enclosure::new(down(self.lo - rhs.hi), up(self.hi - rhs.lo))
    }
}

impl Neg for Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure::new(-self.hi, -self.lo)
    }
}

impl Mul for Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: Enclosure) -> Enclosure {
        let p = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        // 0 * inf products only arise from degenerate inputs; treat as 0.
        let p = p.map(|v| if v.is_nan() { 0.0 } else { v });
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if self == Enclosure::point(0.0) || rhs == Enclosure::point(0.0) {
            return Enclosure::point(0.0);
        }
        Enclosure::new(down(lo), up(hi))
    }
}
