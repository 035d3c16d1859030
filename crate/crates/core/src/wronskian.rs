//! Certified Wronskian `W(κ) = u_ext(1) u_int'(1) - u_int(1) u_ext'(1)` for
//! the Yukawa potential in three dimensions, and bisection of its first
//! positive zero on certified signs.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::{Enclosure, Sign};
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::poly::rational_enclosure;
use crate::yukawa_exterior::u_ext_trace;
use crate::yukawa_interior::{build_alpha_table, u_int_trace, AlphaTable, DEFAULT_DEPTH};

/// Series truncation: the interior uses partial sums through `2K-1` and `2K`,
/// the exterior through orders `K` and `K+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Truncation {
    pub interior: usize,
    pub exterior: usize,
}

impl Truncation {
    /// Interior sums to `k = 7, 8`; exterior orders 1 and 2.
    pub const BASE: Truncation = Truncation {
        interior: 4,
        exterior: 1,
    };
    pub const MAX_INTERIOR: usize = 32;

    /// Doubles the interior order (capped) and adds one exterior order.
    pub fn escalate(self) -> Self {
        Self {
            interior: (2 * self.interior).min(Self::MAX_INTERIOR),
            exterior: self.exterior + 1,
        }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "interior k<={}/{}, exterior orders {}/{}",
            2 * self.interior - 1,
            2 * self.interior,
            self.exterior,
            self.exterior + 1
        )
    }
}

/// Retries allowed on an indeterminate sign.
pub const MAX_ESCALATIONS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct WronskianSample {
    pub kappa: BigRational,
    pub enclosure: Enclosure,
    pub sign: Sign,
    pub truncation: Truncation,
}

/// Evaluator holding a coefficient table that grows on demand.
pub struct YukawaWronskian {
    table: RwLock<AlphaTable>,
}

impl Default for YukawaWronskian {
    fn default() -> Self {
        Self::new()
    }
}

impl YukawaWronskian {
    pub fn new() -> Self {
        Self {
            table: RwLock::new(build_alpha_table(DEFAULT_DEPTH).expect("depth >= 1")),
        }
    }

    /// Process-wide shared evaluator.
    pub fn shared() -> &'static YukawaWronskian {
        static SHARED: OnceLock<YukawaWronskian> = OnceLock::new();
        SHARED.get_or_init(YukawaWronskian::new)
    }

    fn ensure_depth(&self, depth: usize) -> Result<()> {
        if self.table.read().expect("alpha table poisoned").depth() >= depth {
            return Ok(());
        }
        let mut guard = self.table.write().expect("alpha table poisoned");
        let mut d = guard.depth();
        while d < depth {
            d *= 2;
        }
        if guard.depth() < d {
            *guard = build_alpha_table(d)?;
        }
        Ok(())
    }

    /// `W(κ)` at a fixed truncation.
    pub fn sample(&self, kappa: &BigRational, truncation: Truncation) -> Result<WronskianSample> {
        if *kappa < BigRational::zero() {
            return Err(Error::domain(format!("kappa must be >= 0, got {kappa}")));
        }
        self.ensure_depth(2 * truncation.interior)?;
        let alphas = self.table.read().expect("alpha table poisoned").evaluate(kappa);
        let inner = u_int_trace(&alphas, truncation.interior)?;
        let kappa_enc = rational_enclosure(kappa);
        let outer = u_ext_trace(kappa_enc, truncation.exterior)?;
        let w = outer.value * inner.derivative - inner.value * outer.derivative;
        Ok(WronskianSample {
            kappa: kappa.clone(),
            enclosure: w,
            sign: w.sign(),
            truncation,
        })
    }

    /// Samples at `start`, escalating on an indeterminate sign or a
    /// truncation too shallow to certify, up to [`MAX_ESCALATIONS`] times.
    /// The last sample is returned even if its sign is still indeterminate.
    pub fn certify_sign(&self, kappa: &BigRational, start: Truncation) -> Result<WronskianSample> {
        let mut trunc = start;
        let mut last = None;
        for attempt in 0..=MAX_ESCALATIONS {
            match self.sample(kappa, trunc) {
                Ok(s) if s.sign != Sign::Indeterminate => return Ok(s),
                Ok(s) => last = Some(s),
                Err(Error::Certification(_)) if attempt < MAX_ESCALATIONS => {}
                Err(e) => return Err(e),
            }
            trunc = trunc.escalate();
        }
        last.ok_or_else(|| Error::certification(format!("no certified sample at kappa = {kappa}")))
    }
}

/// `W(κ)` with automatic escalation from the base truncation.
pub fn wronskian_enclosure(kappa: &BigRational) -> Result<WronskianSample> {
    YukawaWronskian::shared().certify_sign(kappa, Truncation::BASE)
}

/// Outcome of the certified bisection.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub lo: BigRational,
    pub hi: BigRational,
    /// `[lo, hi]` rounded outward.
    pub enclosure: Enclosure,
    /// `false` when escalation was exhausted before reaching `tol`.
    pub converged: bool,
    /// Deepest truncation used.
    pub truncation: Truncation,
    /// Successive brackets, outermost first.
    pub history: Vec<Enclosure>,
    pub evaluations: usize,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        (&self.hi - &self.lo).to_f64().unwrap_or(f64::INFINITY)
    }
}

fn outward(lo: &BigRational, hi: &BigRational) -> Enclosure {
    Enclosure::new(rational_enclosure(lo).lo(), rational_enclosure(hi).hi())
}

fn two() -> BigRational {
    BigRational::from_integer(BigInt::from(2))
}

/// Bisects `[lo, hi]` on certified signs until `hi - lo ≤ tol`.
pub fn bracket_first_zero(lo: &BigRational, hi: &BigRational, tol: f64) -> Result<Bracket> {
    bracket_first_zero_with(YukawaWronskian::shared(), lo, hi, tol, Truncation::BASE)
}

pub fn bracket_first_zero_with(
    eval: &YukawaWronskian,
    lo: &BigRational,
    hi: &BigRational,
    tol: f64,
    start: Truncation,
) -> Result<Bracket> {
    if lo >= hi {
        return Err(Error::domain(format!("empty bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let at_lo = eval.certify_sign(lo, start)?;
    let at_hi = eval.certify_sign(hi, start)?;
    if at_lo.sign != Sign::Positive || at_hi.sign != Sign::Negative {
        return Err(Error::certification(format!(
            "endpoint signs ({}, {}) do not certify a sign change from + to -",
            at_lo.sign, at_hi.sign
        )));
    }
    let mut trunc = if at_lo.truncation.exterior >= at_hi.truncation.exterior {
        at_lo.truncation
    } else {
        at_hi.truncation
    };
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let mut history = vec![outward(&a, &b)];
    let mut evaluations = 2;
    let mut converged = true;
    let tol_q = crate::poly::rational_from_f64(tol)?;
    while &b - &a > tol_q {
        let mid = (&a + &b) / two();
        let s = eval.certify_sign(&mid, trunc)?;
        evaluations += 1;
        trunc = s.truncation;
        match s.sign {
            Sign::Positive => a = mid,
            Sign::Negative => b = mid,
            Sign::Indeterminate => {
                converged = false;
                break;
            }
        }
        history.push(outward(&a, &b));
    }
    Ok(Bracket {
        enclosure: outward(&a, &b),
        lo: a,
        hi: b,
        converged,
        truncation: trunc,
        history,
        evaluations,
    })
}

/// Largest `κ` certified positive and smallest certified negative inside
/// `[lo, hi]` at one fixed truncation, each located to within `tol`.
pub fn fixed_truncation_bracket(
    eval: &YukawaWronskian,
    lo: &BigRational,
    hi: &BigRational,
    truncation: Truncation,
    tol: f64,
) -> Result<(BigRational, BigRational)> {
    let tol_q = crate::poly::rational_from_f64(tol)?;
    let sign_at = |k: &BigRational| -> Result<Sign> { Ok(eval.sample(k, truncation)?.sign) };
    if sign_at(lo)? != Sign::Positive || sign_at(hi)? != Sign::Negative {
        return Err(Error::certification(format!(
            "truncation ({truncation}) does not certify the endpoints"
        )));
    }
    // last certified + : predicate true at lo, false at hi
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while &b - &a > tol_q {
        let mid = (&a + &b) / two();
        if sign_at(&mid)? == Sign::Positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    let last_positive = a;
    let (mut a, mut b) = (lo.clone(), hi.clone());
    while &b - &a > tol_q {
        let mid = (&a + &b) / two();
        if sign_at(&mid)? == Sign::Negative {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok((last_positive, b))
}

/// Certified signs at `hi·j/m`, `j = 1 … m`.
pub fn minimality_sweep(hi: &BigRational, m: usize, exec: Execution) -> Result<Vec<WronskianSample>> {
    let eval = YukawaWronskian::shared();
    let m_q = BigRational::from_integer(BigInt::from(m));
    exec.map_range(m, |j| {
        let k = hi * BigRational::from_integer(BigInt::from(j + 1)) / &m_q;
        eval.certify_sign(&k, Truncation::BASE)
    })
    .into_iter()
    .collect()
}
