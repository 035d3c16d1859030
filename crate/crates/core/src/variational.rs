//! Discrete Rayleigh quotient `J(V) = sup ∫ V u² / ∫ |∇u|²` over radial
//! trial functions, the Hardy-shifted quotient, comparison bounds and the
//! dimension rule for classifying the maximiser.
//!
//! Trial space: continuous functions that are piecewise linear in `r` on a
//! log grid `r_0 < … < r_N`, constant on `[0, r_0]` and equal to
//! `u_N (r_N / r)^{n-2}` beyond `r_N`. Every such function lies in the
//! energy space, so the largest generalized eigenvalue of `B u = λ A u` is a
//! lower bound on `J(V)` and grows under nested refinement.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::quad::{decades_to_infinity, integrate};
use crate::radial::potential::{check_admissible, decades_to_zero, RadialPotential, SignInfo};
use crate::report::{Classification, ClassifiedState, Method, ResonanceReport};

pub const DEFAULT_R_MIN: f64 = 1e-6;
pub const DEFAULT_R_MAX: f64 = 200.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialDiscretization {
    nodes: Vec<f64>,
    n: u32,
}

impl RadialDiscretization {
    pub fn log_uniform(r_min: f64, r_max: f64, cells: usize, n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::domain(format!("dimension must be >= 3, got {n}")));
        }
        if !(r_min > 0.0 && r_max > r_min) || cells < 2 {
            return Err(Error::domain(format!("bad grid [{r_min}, {r_max}] with {cells} cells")));
        }
        let (a, b) = (r_min.ln(), r_max.ln());
        let mut nodes: Vec<f64> = (0..=cells)
            .map(|i| (a + (b - a) * i as f64 / cells as f64).exp())
            .collect();
        nodes[0] = r_min;
        nodes[cells] = r_max;
        Ok(Self { nodes, n })
    }

    /// `[1e-6, 200]` with `cells` elements.
    pub fn standard(n: u32, cells: usize) -> Result<Self> {
        Self::log_uniform(DEFAULT_R_MIN, DEFAULT_R_MAX, cells, n)
    }

    /// Inserts the geometric midpoint of every element.
    pub fn refined(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push((w[0] * w[1]).sqrt());
        }
        nodes.push(*self.nodes.last().expect("nonempty"));
        Self { nodes, n: self.n }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.nodes.last().expect("nonempty")
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    fn zeros(len: usize) -> Self {
        Self {
            diag: vec![0.0; len],
            off: vec![0.0; len - 1],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn add_element(&mut self, e: usize, m: [f64; 3]) {
        self.diag[e] += m[0];
        self.off[e] += m[1];
        self.diag[e + 1] += m[2];
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// `a·self + b·other`
    fn combine(&self, a: f64, other: &Tridiagonal, b: f64) -> Tridiagonal {
        Tridiagonal {
            diag: self.diag.iter().zip(&other.diag).map(|(x, y)| a * x + b * y).collect(),
            off: self.off.iter().zip(&other.off).map(|(x, y)| a * x + b * y).collect(),
        }
    }

    /// Number of negative pivots of `LDLᵀ` (Sylvester inertia).
    fn negative_pivots(&self) -> usize {
        let mut count = 0;
        let mut d = 0.0f64;
        for i in 0..self.len() {
            d = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.off[i - 1] * self.off[i - 1] / d
            };
            if d == 0.0 {
                d = -f64::EPSILON * (self.diag[i].abs() + f64::MIN_POSITIVE);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn is_positive_definite(&self) -> bool {
        self.negative_pivots() == 0 && self.diag.iter().all(|&d| d > 0.0)
    }

    /// Solves `self · x = rhs` by Gaussian elimination with partial pivoting.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        // rows hold (sub, diag, sup, sup2) after pivoting
        let mut dl: Vec<f64> = self.off.clone();
        let mut d: Vec<f64> = self.diag.clone();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut b = rhs.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let piv = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
                let f = dl[i] / piv;
                d[i + 1] -= f * du[i];
                b[i + 1] -= f * b[i];
                dl[i] = 0.0;
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                du[i] = tmp;
                b.swap(i, i + 1);
                b[i + 1] -= f * b[i];
            }
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = b[i];
            if i + 1 < n {
                s -= du[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= du2[i] * x[i + 2];
            }
            let piv = if d[i] == 0.0 { f64::MIN_POSITIVE } else { d[i] };
            x[i] = s / piv;
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Stiffness matrix of `∫ u'² r^{n-1} dr` including the exterior tail.
pub fn stiffness(disc: &RadialDiscretization) -> Tridiagonal {
    let n = disc.n as i32;
    let mut a = Tridiagonal::zeros(disc.nodes.len());
    for (e, w) in disc.nodes.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let h = hi - lo;
        // (hi^n - lo^n) / (n h²) without cancellation
        let s: f64 = (0..n).map(|j| lo.powi(j) * hi.powi(n - 1 - j)).sum();
        let k = s / (n as f64 * h);
        a.add_element(e, [k, -k, k]);
    }
    let last = a.len() - 1;
    a.diag[last] += (n - 2) as f64 * disc.r_max().powi(n - 2);
    a
}

fn element_mass<W: Fn(f64) -> f64 + Sync>(weight: &W, lo: f64, hi: f64) -> Result<[f64; 3]> {
    let h = hi - lo;
    let pa = |r: f64| (hi - r) / h;
    let pb = |r: f64| (r - lo) / h;
    let aa = integrate(|r| weight(r) * pa(r) * pa(r), lo, hi, 1e-300, 1e-11)?;
    let ab = integrate(|r| weight(r) * pa(r) * pb(r), lo, hi, 1e-300, 1e-11)?;
    let bb = integrate(|r| weight(r) * pb(r) * pb(r), lo, hi, 1e-300, 1e-11)?;
    Ok([aa.value, ab.value, bb.value])
}

/// Mass matrix of `∫ V u² r^{n-1} dr` including core and tail.
pub fn potential_mass(v: &RadialPotential, disc: &RadialDiscretization, exec: Execution) -> Result<Tridiagonal> {
    let n = disc.n as i32;
    let weight = |r: f64| v.eval(r) * r.powi(n - 1);
    let blocks: Vec<[f64; 3]> = exec
        .map_range(disc.cells(), |e| {
            element_mass(&weight, disc.nodes[e], disc.nodes[e + 1])
        })
        .into_iter()
        .collect::<Result<_>>()?;
    let mut b = Tridiagonal::zeros(disc.nodes.len());
    for (e, m) in blocks.into_iter().enumerate() {
        b.add_element(e, m);
    }
    let (core, _) = decades_to_zero(&weight, disc.r_min())?;
    b.diag[0] += core;
    let big_r = disc.r_max();
    let tail_w = |r: f64| v.eval(r) * (big_r / r).powi(2 * n - 4) * r.powi(n - 1);
    let tail: f64 = decades_to_infinity(tail_w, big_r, 40, 1e-14)?.iter().sum();
    let last = b.len() - 1;
    b.diag[last] += tail;
    Ok(b)
}

/// Mass matrix of `∫ r^{-2} u² r^{n-1} dr` including core and tail.
pub fn hardy_mass(disc: &RadialDiscretization) -> Result<Tridiagonal> {
    let n = disc.n as i32;
    let weight = |r: f64| r.powi(n - 3);
    let mut h = Tridiagonal::zeros(disc.nodes.len());
    for (e, w) in disc.nodes.windows(2).enumerate() {
        h.add_element(e, element_mass(&weight, w[0], w[1])?);
    }
    let nm2 = (n - 2) as f64;
    h.diag[0] += disc.r_min().powi(n - 2) / nm2;
    let last = h.len() - 1;
    h.diag[last] += disc.r_max().powi(n - 2) / nm2;
    Ok(h)
}

/// Largest `λ` with `B x = λ A x` (`A` positive definite), by inertia
/// bisection, and its eigenvector by inverse iteration (`xᵀ A x = 1`).
pub fn largest_generalized_eigenpair(b: &Tridiagonal, a: &Tridiagonal) -> Result<(f64, Vec<f64>)> {
    let above = |sigma: f64| a.combine(sigma, b, -1.0).negative_pivots();
    if above(0.0) == 0 {
        return Err(Error::Numeric(
            "V is not somewhere positive on the grid (no positive eigenvalue)".into(),
        ));
    }
    let mut hi = 1.0;
    let mut guard = 0;
    while above(hi) > 0 {
        hi *= 2.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::Numeric("eigenvalue bracket did not close".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    // inverse iteration on (B - σA) x = A y with σ just above λ
    let shift = hi * (1.0 + 1e-10);
    let m = b.combine(1.0, a, -shift);
    let mut x = vec![1.0; b.len()];
    for _ in 0..4 {
        let y = a.mul_vec(&x);
        x = m.solve(&y);
        let norm = dot(&x, &a.mul_vec(&x)).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Numeric("inverse iteration broke down".into()));
        }
        x.iter_mut().for_each(|v| *v /= norm);
    }
    if x[0] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((lambda, x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub j_estimate: f64,
    pub kappa_estimate: f64,
    /// `(cells, J)` per grid, coarsest first
    pub refinement_history: Vec<(usize, f64)>,
    /// Nodal values of the maximiser, normalised in the energy norm.
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
}

fn result_from(j: f64, cells: usize, x: Vec<f64>) -> VariationalResult {
    VariationalResult {
        j_estimate: j,
        kappa_estimate: 1.0 / j,
        refinement_history: vec![(cells, j)],
        eigenvector: x,
    }
}

/// Discrete `J(V)` on one grid.
#[allow(non_snake_case)]
pub fn variational_J(v: &RadialPotential, n: u32, disc: &RadialDiscretization) -> Result<VariationalResult> {
    if disc.n != n {
        return Err(Error::domain("discretization dimension does not match n"));
    }
    let a = stiffness(disc);
    let b = potential_mass(v, disc, Execution::Parallel)?;
    let (j, x) = largest_generalized_eigenpair(&b, &a)?;
    Ok(result_from(j, disc.cells(), x))
}

/// `J(V)` on `levels` nested grids starting from `disc`; the result carries
/// the finest estimate and the whole history.
pub fn variational_refinement(
    v: &RadialPotential,
    n: u32,
    disc: &RadialDiscretization,
    levels: usize,
) -> Result<VariationalResult> {
    if levels == 0 {
        return Err(Error::domain("need at least one refinement level"));
    }
    let mut d = disc.clone();
    let mut history = Vec::with_capacity(levels);
    let mut last = None;
    for level in 0..levels {
        if level > 0 {
            d = d.refined();
        }
        let r = variational_J(v, n, &d)?;
        history.push((d.cells(), r.j_estimate));
        last = Some(r);
    }
    let mut r = last.expect("levels >= 1");
    r.refinement_history = history;
    Ok(r)
}

/// Largest eigenvalue of `B₂ u = λ (A - κ₁ H) u`.
#[allow(non_snake_case)]
pub fn hardy_variational_J(
    kappa1: f64,
    v2: &RadialPotential,
    n: u32,
    disc: &RadialDiscretization,
) -> Result<VariationalResult> {
    if disc.n != n {
        return Err(Error::domain("discretization dimension does not match n"));
    }
    let ceiling = ((n - 2) as f64).powi(2) / 4.0;
    if !(kappa1 >= 0.0 && kappa1 < ceiling) {
        return Err(Error::domain(format!(
            "kappa1 must lie in [0, {ceiling}), got {kappa1}"
        )));
    }
    let a = stiffness(disc);
    let shifted = if kappa1 == 0.0 {
        a
    } else {
        a.combine(1.0, &hardy_mass(disc)?, -kappa1)
    };
    if !shifted.is_positive_definite() {
        return Err(Error::Numeric(format!(
            "A - {kappa1} H is not positive definite on this grid"
        )));
    }
    let b = potential_mass(v2, disc, Execution::Parallel)?;
    let (j, x) = largest_generalized_eigenpair(&b, &shifted)?;
    Ok(result_from(j, disc.cells(), x))
}

/// Largest discrete Hardy quotient `∫ u²/r² / ∫ u'²` (stays below `4/(n-2)²`).
pub fn hardy_quotient(disc: &RadialDiscretization) -> Result<f64> {
    let (j, _) = largest_generalized_eigenpair(&hardy_mass(disc)?, &stiffness(disc))?;
    Ok(j)
}

/// `κ*(V) ≥ lo(κ*(V₀)) / C₀` whenever `V ≤ C₀ V₀`, rounded down.
pub fn comparison_bound(kappa_star_ref: Enclosure, c0: f64) -> Result<f64> {
    if !(c0 > 0.0) || !c0.is_finite() {
        return Err(Error::domain(format!("C0 must be positive, got {c0}")));
    }
    let lo = kappa_star_ref.lo();
    let q = lo / c0;
    // exact residual of the division decides whether q overshoots
    if q.mul_add(c0, -lo) > 0.0 {
        Ok(q.next_down())
    } else {
        Ok(q)
    }
}

/// Spot-check `V(r) ≤ C₀ V₀(r)` at `samples` log-spaced radii in `[1e-6, 1e3]`.
pub fn dominated_by(v: &RadialPotential, v0: &RadialPotential, c0: f64, samples: usize) -> bool {
    let (a, b) = (1e-6f64.ln(), 1e3f64.ln());
    (0..samples.max(2)).all(|i| {
        let r = (a + (b - a) * i as f64 / (samples.max(2) - 1) as f64).exp();
        v.eval(r) <= c0 * v0.eval(r)
    })
}

/// Inputs of the dimension rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateHypotheses {
    pub sign: SignInfo,
    /// Coupling of an added Hardy term `κ₁ r^{-2}`, if any.
    pub hardy_coupling: Option<f64>,
}

impl StateHypotheses {
    pub fn nonnegative() -> Self {
        Self {
            sign: SignInfo::NonNegative,
            hardy_coupling: None,
        }
    }

    pub fn from_potential(v: &RadialPotential) -> Self {
        Self {
            sign: v.sign_info(),
            hardy_coupling: None,
        }
    }
}

pub fn classify_state(n: u32, hyp: &StateHypotheses) -> Result<ClassifiedState> {
    if n < 3 {
        return Err(Error::domain(format!("dimension must be >= 3, got {n}")));
    }
    let outside = |why: String| ClassifiedState {
        classification: Classification::OutsideHypotheses,
        rule: why,
    };
    let prefix = match hyp.hardy_coupling {
        Some(k1) => {
            let ceiling = ((n - 2) as f64).powi(2) / 4.0;
            if !(k1 > 0.0 && k1 < ceiling) {
                return Ok(outside(format!("hardy coupling {k1} outside (0, {ceiling})")));
            }
            "hardy_shifted"
        }
        None => match hyp.sign {
            SignInfo::NonNegative => "nonnegative",
            SignInfo::Signed { .. } => "signed",
        },
    };
    if let SignInfo::Signed { negative_decay } = hyp.sign {
        if !(negative_decay > 2.0) {
            return Ok(outside(format!(
                "negative part decays like (1+r)^-{negative_decay}, need exponent > 2"
            )));
        }
    }
    let (classification, tail) = if n <= 4 {
        (Classification::ResonanceNotL2, "n in {3,4}: not in L2")
    } else {
        (Classification::EigenstateL2, "n >= 5: in L2")
    };
    Ok(ClassifiedState {
        classification,
        rule: format!("{prefix} dimension rule, {tail}"),
    })
}

/// Variational estimate with refinement history and a sensitivity block
/// (last refinement step plus doubling `r_max`).
pub fn variational_report(v: &RadialPotential, n: u32, cells: usize, levels: usize) -> Result<ResonanceReport> {
    let adm = check_admissible(v)?;
    if !adm.passed {
        return Err(Error::Admissibility(adm.failures.join("; ")));
    }
    let disc = RadialDiscretization::standard(n, cells)?;
    let res = variational_refinement(v, n, &disc, levels)?;
    let finest = res.refinement_history.last().expect("nonempty").0;
    let refinement_change = match res.refinement_history.len() {
        0 | 1 => 0.0,
        k => (1.0 / res.refinement_history[k - 2].1 - res.kappa_estimate).abs(),
    };
    let wide = RadialDiscretization::log_uniform(DEFAULT_R_MIN, 2.0 * DEFAULT_R_MAX, finest, n)?;
    let wide_kappa = variational_J(v, n, &wide)?.kappa_estimate;
    let r_max_change = (wide_kappa - res.kappa_estimate).abs();
    let sensitivity = refinement_change + r_max_change;
    let classification = classify_state(n, &StateHypotheses::from_potential(v))?;
    let mut diagnostics = Map::new();
    diagnostics.insert("estimate".into(), json!(res.kappa_estimate));
    diagnostics.insert("j_estimate".into(), json!(res.j_estimate));
    diagnostics.insert("grid_sensitivity".into(), json!(sensitivity));
    diagnostics.insert("refinement_change".into(), json!(refinement_change));
    diagnostics.insert("r_max_change".into(), json!(r_max_change));
    diagnostics.insert(
        "refinement_history".into(),
        json!(res
            .refinement_history
            .iter()
            .map(|(c, j)| json!({"cells": c, "j": j, "kappa": 1.0 / j}))
            .collect::<Vec<_>>()),
    );
    diagnostics.insert(
        "one_sided".into(),
        json!("upper bound on kappa* up to quadrature error"),
    );
    Ok(ResonanceReport {
        n,
        potential: v.to_string(),
        kappa_star: Enclosure::new(res.kappa_estimate - sensitivity, res.kappa_estimate),
        method: Method::Variational,
        classification,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const KAPPA_STAR: f64 = 1.679_807_773_396_453;

    #[test]
    fn stiffness_is_positive_definite() {
        let d = RadialDiscretization::standard(3, 64).unwrap();
        assert!(stiffness(&d).is_positive_definite());
    }

    #[test]
    fn tridiagonal_solve() {
        let t = Tridiagonal {
            diag: vec![1e-20, 2.0, 3.0, 1.0],
            off: vec![1.0, -1.0, 0.5],
        };
        let x = vec![1.0, -2.0, 0.5, 3.0];
        let b = t.mul_vec(&x);
        let y = t.solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn yukawa_upper_bound_and_monotone() {
        let d = RadialDiscretization::standard(3, 128).unwrap();
        let r = variational_refinement(&RadialPotential::Yukawa, 3, &d, 4).unwrap();
        for w in r.refinement_history.windows(2) {
            assert!(w[1].1 >= w[0].1);
        }
        assert!(r.kappa_estimate >= KAPPA_STAR);
        assert!(r.kappa_estimate < 1.70);
    }

    #[test]
    fn coarse_below_fine() {
        let coarse = RadialDiscretization::standard(3, 16).unwrap();
        let fine = RadialDiscretization::standard(3, 512).unwrap();
        let jc = variational_J(&RadialPotential::Yukawa, 3, &coarse).unwrap().j_estimate;
        let jf = variational_J(&RadialPotential::Yukawa, 3, &fine).unwrap().j_estimate;
        assert!(jc <= jf);
    }

    #[test]
    fn scaling_is_linear() {
        let d = RadialDiscretization::standard(3, 256).unwrap();
        let j = variational_J(&RadialPotential::Yukawa, 3, &d).unwrap();
        let v2 = RadialPotential::scaled(2.0, RadialPotential::Yukawa).unwrap();
        let j2 = variational_J(&v2, 3, &d).unwrap();
        assert!((j2.j_estimate / j.j_estimate - 2.0).abs() < 1e-12);
        for (a, b) in j.eigenvector.iter().zip(&j2.eigenvector) {
            assert!((a - b).abs() < 1e-8 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn nonpositive_potential_rejected() {
        let d = RadialDiscretization::standard(3, 32).unwrap();
        let v = RadialPotential::tabulated(vec![0.5, 2.0], vec![-1.0, -1.0]).unwrap();
        assert!(matches!(variational_J(&v, 3, &d), Err(Error::Numeric(_))));
    }

    #[test]
    fn hardy_shift_reduces_and_grows() {
        let d = RadialDiscretization::standard(3, 128).unwrap();
        let base = variational_J(&RadialPotential::Yukawa, 3, &d).unwrap();
        let zero = hardy_variational_J(0.0, &RadialPotential::Yukawa, 3, &d).unwrap();
        assert_eq!(base.j_estimate, zero.j_estimate);
        let j1 = hardy_variational_J(0.1, &RadialPotential::Yukawa, 3, &d).unwrap();
        let j2 = hardy_variational_J(0.2, &RadialPotential::Yukawa, 3, &d).unwrap();
        assert!(zero.j_estimate < j1.j_estimate && j1.j_estimate < j2.j_estimate);
        assert!(hardy_variational_J(0.25, &RadialPotential::Yukawa, 3, &d).is_err());
    }

    #[test]
    fn hardy_ceiling() {
        let mut d = RadialDiscretization::standard(3, 32).unwrap();
        let mut prev = 0.0;
        for _ in 0..4 {
            let q = hardy_quotient(&d).unwrap();
            assert!(q < 4.0 && q >= prev);
            prev = q;
            d = d.refined();
        }
        let d5 = RadialDiscretization::standard(5, 64).unwrap();
        assert!(hardy_quotient(&d5).unwrap() < 4.0 / 9.0);
    }

    #[test]
    fn comparison_examples() {
        let r = Enclosure::new(1.67626, 1.68742);
        assert_eq!(comparison_bound(r, 1.0).unwrap(), 1.67626);
        assert_eq!(comparison_bound(r, 2.0).unwrap(), 0.83813);
        let b = comparison_bound(r, 3.0).unwrap();
        assert!(b * 3.0 <= 1.67626);
        assert!(comparison_bound(r, 0.0).is_err());
        assert!(comparison_bound(r, -1.0).is_err());
    }

    #[test]
    fn classifier_table() {
        let nonneg = StateHypotheses::nonnegative();
        let signed = |b| StateHypotheses {
            sign: SignInfo::Signed { negative_decay: b },
            hardy_coupling: None,
        };
        let hardy = |k| StateHypotheses {
            sign: SignInfo::NonNegative,
            hardy_coupling: Some(k),
        };
        let c = |n, h: &StateHypotheses| classify_state(n, h).unwrap().classification;
        assert_eq!(c(3, &nonneg), Classification::ResonanceNotL2);
        assert_eq!(c(4, &nonneg), Classification::ResonanceNotL2);
        assert_eq!(c(5, &nonneg), Classification::EigenstateL2);
        assert_eq!(c(7, &nonneg), Classification::EigenstateL2);
        assert_eq!(c(4, &signed(1.5)), Classification::OutsideHypotheses);
        assert_eq!(c(4, &signed(3.0)), Classification::ResonanceNotL2);
        assert_eq!(c(6, &signed(2.5)), Classification::EigenstateL2);
        assert_eq!(c(3, &hardy(0.1)), Classification::ResonanceNotL2);
        assert_eq!(c(3, &hardy(0.3)), Classification::OutsideHypotheses);
        assert_eq!(c(5, &hardy(1.0)), Classification::EigenstateL2);
        assert!(classify_state(2, &nonneg).is_err());
    }
}
