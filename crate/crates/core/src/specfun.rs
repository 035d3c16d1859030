//! Exponential integrals `E_ν(r) = ∫₁^∞ e^{-rs} s^{-ν} ds` for integer `ν ≥ 1`.
//!
//! `E_1` uses the alternating power series for `r <= 1` and the Stieltjes
//! continued fraction of `e^r E_1(r)` for `r > 1`; consecutive convergents of
//! that fraction bracket the true value, so the truncation error is bounded by
//! their gap. Higher orders follow from `ν E_{ν+1}(r) = e^{-r} - r E_ν(r)`.

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};

/// Euler–Mascheroni constant to 30 significant digits.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

const EPS: f64 = f64::EPSILON;

/// Integer order `ν ≥ 1` of an exponential integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpIntOrder(u32);

impl ExpIntOrder {
    pub fn new(nu: u32) -> Result<Self> {
        if nu == 0 {
            return Err(Error::domain("exponential integral order must be >= 1"));
        }
        Ok(Self(nu))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ExpIntConfig {
    /// Largest admissible enclosure width.
    pub tol: f64,
    /// Cap on series terms / continued-fraction depth.
    pub max_terms: usize,
}

impl Default for ExpIntConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: 5000,
        }
    }
}

/// `E_ν(r)` with the default tolerance of `1e-12`.
pub fn exp_integral(nu: ExpIntOrder, r: f64) -> Result<Enclosure> {
    exp_integral_with(nu, r, &ExpIntConfig::default())
}

pub fn exp_integral_with(nu: ExpIntOrder, r: f64, cfg: &ExpIntConfig) -> Result<Enclosure> {
    let e = en_enclosure(nu.get(), r, cfg.max_terms)?;
    if !(e.width() <= cfg.tol) {
        return Err(Error::precision(format!(
            "E_{}({r}) enclosure width {:e} exceeds tolerance {:e}",
            nu.get(),
            e.width(),
            cfg.tol
        )));
    }
    Ok(e)
}

/// `E_1(r)` to near working precision.
pub fn e1(r: f64) -> Result<Enclosure> {
    e1_enclosure(r, ExpIntConfig::default().max_terms)
}

/// `E_ν(r)` to near working precision (no width check).
pub fn en(nu: u32, r: f64) -> Result<Enclosure> {
    en_enclosure(nu, r, ExpIntConfig::default().max_terms)
}

fn en_enclosure(nu: u32, r: f64, max_terms: usize) -> Result<Enclosure> {
    if nu == 0 {
        return Err(Error::domain("exponential integral order must be >= 1"));
    }
    let mut e = e1_enclosure(r, max_terms)?;
    if nu == 1 {
        return Ok(e);
    }
    let emr = Enclosure::exp_of(-r);
    let rr = Enclosure::point(r);
    for k in 1..nu {
        let next = (emr - rr * e) * Enclosure::point(1.0 / k as f64).inflate(EPS / k as f64);
        // E_ν is positive; clip the lower end if cancellation widened past zero
        e = Enclosure::new(next.lo().max(0.0), next.hi().max(0.0));
    }
    Ok(e)
}

fn e1_enclosure(r: f64, max_terms: usize) -> Result<Enclosure> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("E_1 requires finite r > 0, got {r}")));
    }
    if r <= 1.0 {
        e1_series(r, max_terms)
    } else {
        e1_continued_fraction(r, max_terms)
    }
}

/// `E_1(r) = -γ - ln r + Σ_{k≥1} (-1)^{k+1} r^k / (k k!)`; terms alternate and
/// decrease in magnitude for `r <= 1`, so the first omitted term bounds the tail.
fn e1_series(r: f64, max_terms: usize) -> Result<Enclosure> {
    let ln_r = r.ln();
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut pow_fact = 1.0; // r^k / k!
    for k in 1..=max_terms {
        pow_fact *= r / k as f64;
        let term = pow_fact / k as f64;
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        abs_sum += term;
        let next = pow_fact * r / ((k + 1) as f64 * (k + 1) as f64);
        if next < 0.25 * EPS * EPS {
            let value = -EULER_GAMMA - ln_r + sum;
            let scale = EULER_GAMMA + ln_r.abs() + abs_sum;
            let round = (k as f64 + 6.0) * EPS * scale;
            return Ok(Enclosure::around(value, next + round));
        }
    }
    Err(Error::precision(format!("E_1 series did not converge at r = {r}")))
}

/// S-fraction `e^r E_1(r) = 1/(r + 1/(1 + 1/(r + 2/(1 + 2/(r + …)))))`.
fn e1_continued_fraction(r: f64, max_terms: usize) -> Result<Enclosure> {
    // A_j = b_j A_{j-1} + a_j A_{j-2}, same for B_j; all coefficients positive.
    let (mut a_prev, mut a_cur) = (1.0_f64, 0.0_f64);
    let (mut b_prev, mut b_cur) = (0.0_f64, 1.0_f64);
    let mut last = f64::NAN;
    for j in 1..=2 * max_terms {
        let aj = if j == 1 { 1.0 } else { (j / 2) as f64 };
        let bj = if j % 2 == 1 { r } else { 1.0 };
        let a_next = bj * a_cur + aj * a_prev;
        let b_next = bj * b_cur + aj * b_prev;
        a_prev = a_cur;
        b_prev = b_cur;
        a_cur = a_next;
        b_cur = b_next;
        if b_cur > 1e150 {
            let s = 1.0 / b_cur;
            a_prev *= s;
            b_prev *= s;
            a_cur *= s;
            b_cur = 1.0;
        }
        let conv = a_cur / b_cur;
        if j >= 2 {
            let gap = (conv - last).abs();
            if gap <= 8.0 * EPS * conv {
                let lo = conv.min(last);
                let hi = conv.max(last);
                let round = 4.0 * (j as f64 + 4.0) * EPS * hi;
                let scaled = Enclosure::new(lo - round, hi + round);
                return Ok(scaled * Enclosure::exp_of(-r));
            }
        }
        last = conv;
    }
    Err(Error::precision(format!(
        "E_1 continued fraction did not converge at r = {r}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(n: u32) -> ExpIntOrder {
        ExpIntOrder::new(n).unwrap()
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(ExpIntOrder::new(0).is_err());
        assert!(matches!(exp_integral(order(1), 0.0), Err(Error::Domain(_))));
        assert!(matches!(exp_integral(order(1), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn reference_values() {
        // E1(1) = 0.219383934395520273677..., E2(1) = 0.148495506775922047918...
        let e1 = exp_integral(order(1), 1.0).unwrap();
        assert!(e1.contains(0.219_383_934_395_520_27));
        let e2 = exp_integral(order(2), 1.0).unwrap();
        assert!(e2.contains(0.148_495_506_775_922_05));
        // E1(0.5) = 0.559773594776160811746795939315...
        assert!(exp_integral(order(1), 0.5).unwrap().contains(0.559_773_594_776_160_8));
        // E1(2) = 0.048900510708061119567239835228...
        assert!(exp_integral(order(1), 2.0).unwrap().contains(0.048_900_510_708_061_12));
        // E1(10) = 4.15696892968532427740e-6
        let e = exp_integral(order(1), 10.0).unwrap();
        assert!((e.mid() - 4.156_968_929_685_324e-6).abs() < 1e-20);
    }

    #[test]
    fn recurrence_at_one() {
        let e1 = exp_integral(order(1), 1.0).unwrap();
        let e2 = exp_integral(order(2), 1.0).unwrap();
        let via = Enclosure::exp_of(-1.0) - e1;
        assert!(via.overlaps(&e2));
    }

    #[test]
    fn large_argument_bound() {
        let e = exp_integral(order(1), 50.0).unwrap();
        assert!(e.lo() > 0.0 && e.hi() < (-50.0f64).exp());
    }

    #[test]
    fn small_argument() {
        // E1(1e-6) = -γ - ln(1e-6) + 1e-6 - ...
        let e = exp_integral(order(1), 1e-6).unwrap();
        let approx = -EULER_GAMMA + 6.0 * std::f64::consts::LN_10 + 1e-6;
        assert!((e.mid() - approx).abs() < 1e-12);
    }

    #[test]
    fn tolerance_is_enforced() {
        let cfg = ExpIntConfig {
            tol: 1e-30,
            max_terms: 5000,
        };
        assert!(matches!(
            exp_integral_with(order(1), 1.0, &cfg),
            Err(Error::Precision(_))
        ));
        let cfg = ExpIntConfig {
            tol: 1e-12,
            max_terms: 3,
        };
        assert!(matches!(
            exp_integral_with(order(1), 0.9, &cfg),
            Err(Error::Precision(_))
        ));
    }
}
