//! Interior power series `u_int(r; κ) = 1 + Σ_{k≥1} (-1)^k α_k(κ) r^k` of the
//! radial zero-energy equation with `r V(r) = e^{-r}` in three dimensions.
//!
//! The coefficients obey
//!
//! ```text
//! α_0 = 1,   α_{k+1}(κ) = κ / ((k+1)(k+2)) · Σ_{ℓ=0}^{k} α_{k-ℓ}(κ) / ℓ!
//! ```
//!
//! and are polynomials in `κ` with positive rational coefficients. Once the
//! sequences `α_k(κ)` and `k α_k(κ)` are certified decreasing, consecutive
//! partial sums of the alternating series at `r = 1` bracket `u_int(1)` and
//! `u_int'(1)`. All sums are formed in exact rational arithmetic and rounded
//! outward once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::poly::{factorial, rational_enclosure, RationalPolynomial};

/// Default table depth (number of coefficients beyond `α_0`).
pub const DEFAULT_DEPTH: usize = 16;

/// Which matching solution a trace belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

/// Enclosures of `u(1)` and `u'(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub value: Enclosure,
    pub derivative: Enclosure,
    pub side: Side,
}

/// Exact coefficient polynomials `α_0 … α_K`.
#[derive(Debug, Clone)]
pub struct AlphaTable {
    alphas: Vec<RationalPolynomial>,
}

/// Builds `α_0 … α_depth` from the recursion.
pub fn build_alpha_table(depth: usize) -> Result<AlphaTable> {
    if depth == 0 {
        return Err(Error::domain("alpha table depth must be >= 1"));
    }
    let inv_fact: Vec<BigRational> = (0..=depth as u64)
        .map(|l| BigRational::new(BigInt::one(), factorial(l)))
        .collect();
    let mut alphas = vec![RationalPolynomial::one()];
    for k in 0..depth {
        let mut sum = RationalPolynomial::zero();
        for (l, w) in inv_fact.iter().enumerate().take(k + 1) {
            sum = &sum + &alphas[k - l].scale(w);
        }
        let denom = BigInt::from((k + 1) * (k + 2));
        let next = sum.mul_x().scale(&BigRational::new(BigInt::one(), denom));
        alphas.push(next);
    }
    Ok(AlphaTable { alphas })
}

impl AlphaTable {
    /// Largest index `K` held (`α_0 … α_K`).
    pub fn depth(&self) -> usize {
        self.alphas.len() - 1
    }

    pub fn alpha(&self, k: usize) -> Option<&RationalPolynomial> {
        self.alphas.get(k)
    }

    pub fn alphas(&self) -> &[RationalPolynomial] {
        &self.alphas
    }

    pub fn evaluate(&self, kappa: &BigRational) -> AlphaValues {
        AlphaValues {
            kappa: kappa.clone(),
            values: self.alphas.iter().map(|p| p.eval(kappa)).collect(),
        }
    }

    pub fn verify_monotone_from(&self, kappa: &BigRational) -> Result<usize> {
        verify_monotone_from(&self.evaluate(kappa))
    }

    pub fn u_int_trace(&self, kappa: &BigRational, terms: usize) -> Result<BoundaryTrace> {
        u_int_trace(&self.evaluate(kappa), terms)
    }
}

/// `α_0(κ) … α_K(κ)` at one exact `κ`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaValues {
    kappa: BigRational,
    values: Vec<BigRational>,
}

impl AlphaValues {
    /// Same recursion applied directly to numbers instead of polynomials.
    pub fn by_recurrence(kappa: &BigRational, depth: usize) -> Self {
        let mut values = vec![BigRational::one()];
        let mut inv_fact = vec![BigRational::one()];
        for l in 1..=depth {
            let prev = inv_fact[l - 1].clone();
            inv_fact.push(prev / BigRational::from_integer(BigInt::from(l)));
        }
        for k in 0..depth {
            let sum = (0..=k).fold(BigRational::zero(), |acc, l| acc + &values[k - l] * &inv_fact[l]);
            let denom = BigRational::from_integer(BigInt::from((k + 1) * (k + 2)));
            values.push(kappa * sum / denom);
        }
        Self {
            kappa: kappa.clone(),
            values,
        }
    }

    pub fn kappa(&self) -> &BigRational {
        &self.kappa
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }

    /// `Σ_{k=0}^{n} (-1)^k α_k`.
    pub fn value_partial_sum(&self, n: usize) -> BigRational {
        self.values[..=n].iter().enumerate().fold(
            BigRational::zero(),
            |acc, (k, a)| if k % 2 == 0 { acc + a } else { acc - a },
        )
    }

    /// `Σ_{k=1}^{n} (-1)^k k α_k`.
    pub fn derivative_partial_sum(&self, n: usize) -> BigRational {
        self.values[..=n]
            .iter()
            .enumerate()
            .skip(1)
            .fold(BigRational::zero(), |acc, (k, a)| {
                let t = a * BigRational::from_integer(BigInt::from(k));
                if k % 2 == 0 {
                    acc + t
                } else {
                    acc - t
                }
            })
    }
}

/// Smallest `k_0 ≥ 1` with `α_{k_0+1}(κ) < min_{k ≤ k_0} α_k(κ)` (exact comparison).
///
/// Such a `k_0` certifies `α_{k+1} < α_k` for all `k ≥ k_0` and
/// `(k+1) α_{k+1} < k α_k` for all `k ≥ max(k_0, 3)`.
pub fn verify_monotone_from(alphas: &AlphaValues) -> Result<usize> {
    if alphas.kappa <= BigRational::zero() {
        return Err(Error::domain("monotonicity certificate needs kappa > 0"));
    }
    let v = &alphas.values;
    if v.len() < 3 {
        return Err(Error::certification("alpha table too shallow (need depth >= 2)"));
    }
    let mut running_min = if v[0] < v[1] { v[0].clone() } else { v[1].clone() };
    for k0 in 1..v.len() - 1 {
        if v[k0] < running_min {
            running_min = v[k0].clone();
        }
        if v[k0 + 1] < running_min {
            return Ok(k0);
        }
    }
    Err(Error::certification(format!(
        "no monotone start within depth {} at kappa = {}",
        alphas.depth(),
        alphas.kappa
    )))
}

/// Leibniz enclosures of `u_int(1)` and `u_int'(1)` from the partial sums
/// through indices `2K-1` and `2K`.
pub fn u_int_trace(alphas: &AlphaValues, terms: usize) -> Result<BoundaryTrace> {
    if alphas.kappa.is_zero() {
        return Ok(BoundaryTrace {
            value: Enclosure::point(1.0),
            derivative: Enclosure::point(0.0),
            side: Side::Interior,
        });
    }
    if terms == 0 {
        return Err(Error::domain("interior truncation K must be >= 1"));
    }
    let last = 2 * terms;
    if alphas.depth() < last {
        return Err(Error::certification(format!(
            "alpha values hold depth {} but K = {terms} needs {last}",
            alphas.depth()
        )));
    }
    let k0 = verify_monotone_from(alphas)?;
    let odd = last - 1;
    if odd < k0.max(3) {
        return Err(Error::certification(format!(
            "K = {terms} too small: need 2K-1 >= max(k0, 3) = {}",
            k0.max(3)
        )));
    }
    let lower_v = rational_enclosure(&alphas.value_partial_sum(odd));
    let upper_v = rational_enclosure(&alphas.value_partial_sum(last));
    let lower_d = rational_enclosure(&alphas.derivative_partial_sum(odd));
    let upper_d = rational_enclosure(&alphas.derivative_partial_sum(last));
    Ok(BoundaryTrace {
        value: Enclosure::new(lower_v.lo(), upper_v.hi()),
        derivative: Enclosure::new(lower_d.lo(), upper_d.hi()),
        side: Side::Interior,
    })
}

/// Leibniz enclosure of `u_int(r)` for `0 ≤ r ≤ 1` from the partial sums
/// through indices `2K-1` and `2K`.
pub fn u_int_value(alphas: &AlphaValues, r: &BigRational, terms: usize) -> Result<Enclosure> {
    if r < &BigRational::zero() || r > &BigRational::one() {
        return Err(Error::domain(format!("u_int_value needs 0 <= r <= 1, got {r}")));
    }
    if alphas.kappa.is_zero() || r.is_zero() {
        return Ok(Enclosure::point(1.0));
    }
    if terms == 0 || alphas.depth() < 2 * terms {
        return Err(Error::certification(format!("cannot form K = {terms} partial sums")));
    }
    let k0 = verify_monotone_from(alphas)?;
    if 2 * terms - 1 < k0 {
        return Err(Error::certification(format!(
            "K = {terms} too small: need 2K-1 >= {k0}"
        )));
    }
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut sums = Vec::with_capacity(2 * terms + 1);
    for (k, a) in alphas.values[..=2 * terms].iter().enumerate() {
        let t = a * &power;
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        sums.push(sum.clone());
        power *= r;
    }
    let lower = rational_enclosure(&sums[2 * terms - 1]);
    let upper = rational_enclosure(&sums[2 * terms]);
    Ok(Enclosure::new(lower.lo(), upper.hi()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_rational, ratio};

    fn poly_times_kappa_over(d: i64, inner: &[i64]) -> RationalPolynomial {
        let mut c = vec![ratio(0, 1)];
        c.extend(inner.iter().map(|&n| ratio(n, d)));
        RationalPolynomial::from_coeffs(c)
    }

    #[test]
    fn value_profile_matches_trace() {
        let kappa = ratio(168, 100);
        let a = AlphaValues::by_recurrence(&kappa, 16);
        let at_one = u_int_value(&a, &BigRational::one(), 4).unwrap();
        let trace = u_int_trace(&a, 4).unwrap();
        assert_eq!(at_one, trace.value);
        assert_eq!(u_int_value(&a, &BigRational::zero(), 4).unwrap(), Enclosure::point(1.0));
        let half = u_int_value(&a, &ratio(1, 2), 4).unwrap();
        assert!(half.lo() > at_one.hi() && half.hi() < 1.0);
        assert!(u_int_value(&a, &ratio(3, 2), 4).is_err());
    }

    #[test]
    fn closed_forms_up_to_six() {
        let t = build_alpha_table(6).unwrap();
        let expected = [
            RationalPolynomial::one(),
            poly_times_kappa_over(2, &[1]),
            poly_times_kappa_over(12, &[2, 1]),
            poly_times_kappa_over(144, &[6, 8, 1]),
            poly_times_kappa_over(2880, &[24, 66, 20, 1]),
            poly_times_kappa_over(86400, &[120, 624, 346, 40, 1]),
            poly_times_kappa_over(3_628_800, &[720, 6840, 6204, 1246, 70, 1]),
        ];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(t.alpha(k).unwrap(), e, "alpha_{k}");
        }
    }

    #[test]
    fn zero_depth_rejected() {
        assert!(build_alpha_table(0).is_err());
    }

    #[test]
    fn alpha_one_vanishes_at_zero() {
        let t = build_alpha_table(1).unwrap();
        assert!(t.alpha(1).unwrap().eval(&ratio(0, 1)).is_zero());
    }

    #[test]
    fn alpha_three_at_one() {
        let t = build_alpha_table(3).unwrap();
        assert_eq!(t.alpha(3).unwrap().eval(&ratio(1, 1)), ratio(5, 48));
    }

    #[test]
    fn recurrence_matches_polynomials() {
        let t = build_alpha_table(20).unwrap();
        for k in ["0.3", "1.68", "5/2", "7"] {
            let kappa = parse_rational(k).unwrap();
            assert_eq!(t.evaluate(&kappa), AlphaValues::by_recurrence(&kappa, 20));
        }
    }

    #[test]
    fn monotone_start_examples() {
        let t = build_alpha_table(DEFAULT_DEPTH).unwrap();
        assert!(t.verify_monotone_from(&ratio(1, 1)).unwrap() <= 3);
        assert!(t.verify_monotone_from(&ratio(2, 1)).unwrap() <= 3);
        assert_eq!(t.verify_monotone_from(&parse_rational("0.0001").unwrap()).unwrap(), 1);
        assert!(t.verify_monotone_from(&ratio(0, 1)).is_err());
    }

    #[test]
    fn monotone_start_needs_depth_for_large_kappa() {
        let shallow = build_alpha_table(3).unwrap();
        assert!(matches!(
            shallow.verify_monotone_from(&ratio(40, 1)),
            Err(Error::Certification(_))
        ));
        let deep = build_alpha_table(64).unwrap();
        assert!(deep.verify_monotone_from(&ratio(40, 1)).is_ok());
    }

    #[test]
    fn zero_kappa_trace_is_exact() {
        let t = build_alpha_table(8).unwrap();
        let tr = t.u_int_trace(&ratio(0, 1), 4).unwrap();
        assert_eq!(tr.value, Enclosure::point(1.0));
        assert_eq!(tr.derivative, Enclosure::point(0.0));
    }

    #[test]
    fn trace_refuses_shallow_truncation() {
        let t = build_alpha_table(8).unwrap();
        // 2K-1 = 1 < 3
        assert!(matches!(t.u_int_trace(&ratio(1, 1), 1), Err(Error::Certification(_))));
        // depth too small for K = 5
        assert!(matches!(t.u_int_trace(&ratio(1, 1), 5), Err(Error::Certification(_))));
    }

    #[test]
    fn width_shrinks_with_more_terms() {
        let t = build_alpha_table(DEFAULT_DEPTH).unwrap();
        let kappa = ratio(1, 1);
        let a = t.u_int_trace(&kappa, 3).unwrap();
        let b = t.u_int_trace(&kappa, 4).unwrap();
        assert!(b.value.width() < a.value.width());
        assert!(b.value.is_strictly_nested_in(&a.value));
        assert!(b.derivative.is_strictly_nested_in(&a.derivative));
    }

    #[test]
    fn positivity_of_coefficients() {
        let t = build_alpha_table(24).unwrap();
        for k in ["0.01", "1", "1.68", "3", "12"] {
            let v = t.evaluate(&parse_rational(k).unwrap());
            assert!(v.values()[1..].iter().all(|a| *a > BigRational::zero()));
        }
    }

    /// `r u'' + 2u' + κ e^{-r} u` for the truncated series has vanishing
    /// coefficients of `r^j` for `j < K - 1`.
    #[test]
    fn truncated_series_satisfies_ode_to_order() {
        let depth = 10;
        let kappa = ratio(3, 2);
        let v = AlphaValues::by_recurrence(&kappa, depth);
        let c: Vec<BigRational> = v
            .values()
            .iter()
            .enumerate()
            .map(|(k, a)| if k % 2 == 0 { a.clone() } else { -a.clone() })
            .collect();
        let n = depth + 1;
        let mut resid = vec![BigRational::zero(); n];
        for j in 0..n {
            // r u'' -> (j+1) j c_{j+1} r^j ; 2u' -> 2 (j+1) c_{j+1} r^j
            if j < depth {
                let jj = BigRational::from_integer(BigInt::from(j as i64 + 1));
                resid[j] += &c[j + 1] * &jj * (BigRational::from_integer(BigInt::from(j as i64)) + ratio(2, 1));
            }
            // κ e^{-r} u -> κ Σ_{l} (-1)^l / l! c_{j-l}
            for l in 0..=j {
                let sign = if l % 2 == 0 { ratio(1, 1) } else { ratio(-1, 1) };
                let w = sign / BigRational::from_integer(factorial(l as u64));
                resid[j] += &kappa * w * &c[j - l];
            }
        }
        for (j, r) in resid.iter().enumerate().take(depth) {
            assert!(r.is_zero(), "coefficient of r^{j} = {r}");
        }
    }
}
