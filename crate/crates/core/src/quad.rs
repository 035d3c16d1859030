//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals, plus a
//! decade-splitting driver for half-infinite ranges.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    (value, err)
}

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_SUBDIVISIONS: usize = 20_000;

/// Integrate `f` over `[a, b]` until the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`, always bisecting the worst piece.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0 });
    }
    let (value, error) = gk15(&f, a, b);
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(Piece {
        lo: a,
        hi: b,
        value,
        error,
    });
    let mut total = value;
    let mut total_err = error;
    for _ in 0..MAX_SUBDIVISIONS {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Numeric(format!("non-finite integrand on [{a}, {b}]")));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(Quadrature {
                value: total,
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // interval can no longer be split in floating point
            heap.push(Piece { error: 0.0, ..worst });
            total_err -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&f, worst.lo, mid);
        let (v2, e2) = gk15(&f, mid, worst.hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    if error <= abs_tol.max(rel_tol * value.abs()) {
        return Ok(Quadrature { value, error });
    }
    Err(Error::Numeric(format!(
        "quadrature on [{a}, {b}] stalled at error {error:e}"
    )))
}

/// Per-decade contributions of `∫_a^∞ f` over `[a·10^j, a·10^{j+1}]`, stopping
/// when a decade contributes less than `rel_tol` of the running total for three
/// consecutive decades, or after `max_decades`.
pub fn decades_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, max_decades: usize, rel_tol: f64) -> Result<Vec<f64>> {
    assert!(a > 0.0);
    let mut parts = Vec::new();
    let mut total = 0.0;
    let mut quiet = 0;
    let mut lo = a;
    for _ in 0..max_decades {
        let hi = lo * 10.0;
        let q = integrate(&f, lo, hi, 1e-300, 1e-12)?;
        total += q.value.abs();
        parts.push(q.value);
        if q.value.abs() <= rel_tol * total {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-14, 1e-14).unwrap();
        assert!((q.value - 0.0).abs() < 1e-13);
        let q = integrate(|x| x.powi(10), 0.0, 1.0, 1e-15, 1e-15).unwrap();
        assert!((q.value - 1.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn peaked_integrand() {
        let q = integrate(|x| (-x).exp(), 0.0, 50.0, 1e-14, 1e-13).unwrap();
        assert!((q.value - (1.0 - (-50.0f64).exp())).abs() < 1e-12);
        let q = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn discontinuous_integrand() {
        let q = integrate(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, 1e-10, 1e-10).unwrap();
        assert!((q.value - 0.3).abs() < 1e-9);
    }

    #[test]
    fn decade_driver() {
        let parts = decades_to_infinity(|x| 1.0 / (x * x), 1.0, 30, 1e-14).unwrap();
        let s: f64 = parts.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}
