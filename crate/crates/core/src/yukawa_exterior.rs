//! Exterior expansion `u_ext(r; κ) = r^{-1} (1 + Σ_{k≥1} (-1)^k κ^k ω_k(r))`
//! with `ω_0 = 1` and `ω_{k+1}(r) = ∫_r^∞ ∫_s^∞ e^{-t}/t · ω_k(t) dt ds`.
//!
//! `ω_1` and `ω_2` have closed forms in exponential integrals. Higher orders
//! come from nested cumulative quadrature on a uniform grid. Every integrand
//! in the nesting (`e^{-t}/t · ω_k` and `B_k = -ω_k'`) is completely monotone,
//! hence positive, decreasing and convex, so on each panel the trapezoid rule
//! is an upper bound and the trapezoid minus `h²/8 (f'(b) - f'(a))` a lower
//! bound. The tail past the grid is closed with the a-priori bounds
//! `ω_k(R) ≤ e^{-kR}/(k!)²` and `B_k(R) ≤ e^{-kR}/(k!(k-1)!)`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::specfun::{e1, en};
use crate::yukawa_interior::{BoundaryTrace, Side};

/// Quadrature step of the cumulative tables.
pub const QUAD_STEP: f64 = 1.0 / 2048.0;
/// Length of the tabulated range `[r, r + QUAD_SPAN]`.
pub const QUAD_SPAN: f64 = 36.0;
/// Orders computed eagerly whenever a table is built.
const MIN_ORDERS: usize = 8;
/// Below this coupling the alternation `κ ω_{k+1} < ω_k` holds for all `k` at `r ≥ 1`.
pub const CERTIFIED_KAPPA: f64 = 6.7;

/// `ω_k(r)` and `ω_k'(r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaValue {
    pub k: u32,
    pub r: f64,
    pub value: Enclosure,
    pub derivative: Enclosure,
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// A-priori bound `e^{-kr}/(k!)²` on `ω_k(r)`.
pub fn omega_bound(k: u32, r: f64) -> f64 {
    let f = factorial_f64(k);
    (-(k as f64) * r).exp() / (f * f)
}

/// A-priori bound `e^{-kr}/(k!(k-1)!)` on `|ω_k'(r)|`.
pub fn omega_derivative_bound(k: u32, r: f64) -> f64 {
    (-(k as f64) * r).exp() / (factorial_f64(k) * factorial_f64(k.saturating_sub(1)))
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 1.0) || !r.is_finite() {
        return Err(Error::domain(format!("omega_k(r) needs finite r >= 1, got {r}")));
    }
    Ok(())
}

/// `ω_k(r)` for `r ≥ 1`: closed forms for `k ≤ 2`, cached quadrature beyond.
pub fn omega(k: u32, r: f64) -> Result<OmegaValue> {
    check_radius(r)?;
    match k {
        0 => Err(Error::domain("omega order must be >= 1")),
        1 | 2 => omega_closed_form(k, r),
        _ => {
            let table = cached_table(r, Seed::ClosedForm, k as usize)?;
            Ok(table.value(k as usize, 0))
        }
    }
}

/// Closed forms of `ω_1` and `ω_2`, valid for any `r > 0`.
pub fn omega_closed_form(k: u32, r: f64) -> Result<OmegaValue> {
    let emr = Enclosure::exp_of(-r);
    let (value, derivative) = match k {
        1 => (en(2, r)?, -e1(r)?),
        2 => {
            let e1r = e1(r)?;
            let e12r = e1(2.0 * r)?;
            let v = emr * emr - emr * e1r + Enclosure::point(1.0 - 2.0 * r) * e12r;
            let d = emr * e1r - Enclosure::point(2.0) * e12r;
            (v, d)
        }
        _ => return Err(Error::domain(format!("no closed form for omega_{k}"))),
    };
    Ok(OmegaValue {
        k,
        r,
        value: clip_nonneg(value),
        derivative: clip_nonpos(derivative),
    })
}

/// `ω_k(r)` by quadrature alone, seeded from `ω_0 = 1` (used to cross-check
/// the closed forms).
pub fn omega_quadrature(k: u32, r: f64) -> Result<OmegaValue> {
    check_radius(r)?;
    if k == 0 {
        return Err(Error::domain("omega order must be >= 1"));
    }
    let table = cached_table(r, Seed::Unit, k as usize)?;
    Ok(table.value(k as usize, 0))
}

/// `ω_k` at the table nodes `r, r + h·stride, …` on `[r, r + span]`.
pub fn omega_profile(k: u32, r: f64, span: f64, stride: usize) -> Result<Vec<OmegaValue>> {
    check_radius(r)?;
    if k == 0 {
        return Err(Error::domain("omega order must be >= 1"));
    }
    let table = cached_table(r, Seed::ClosedForm, (k as usize).max(1))?;
    let last = ((span / QUAD_STEP).floor() as usize).min(table.nodes.len() - 1);
    Ok((0..=last)
        .step_by(stride.max(1))
        .map(|i| table.value(k as usize, i))
        .collect())
}

fn clip_nonneg(e: Enclosure) -> Enclosure {
    Enclosure::new(e.lo().max(0.0), e.hi().max(0.0))
}

fn clip_nonpos(e: Enclosure) -> Enclosure {
    Enclosure::new(e.lo().min(0.0), e.hi().min(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Seed {
    /// level 0 is `ω_0 = 1`
    Unit,
    /// level 1 is the closed form of `ω_1`
    ClosedForm,
}

impl Seed {
    fn first_order(self) -> usize {
        match self {
            Seed::Unit => 0,
            Seed::ClosedForm => 1,
        }
    }
}

struct Level {
    omega: Vec<Enclosure>,
    /// `B_k = -ω_k'`
    slope: Vec<Enclosure>,
}

struct OmegaTable {
    r: f64,
    seed: Seed,
    nodes: Vec<f64>,
    /// `e^{-t}/t` at the nodes
    weight: Vec<Enclosure>,
    /// `d/dt (e^{-t}/t) = -e^{-t}(1+t)/t²` at the nodes
    weight_slope: Vec<Enclosure>,
    levels: Vec<Level>,
}

impl OmegaTable {
    fn new(r: f64, seed: Seed) -> Result<Self> {
        let n = (QUAD_SPAN / QUAD_STEP).round() as usize;
        let nodes: Vec<f64> = (0..=n).map(|i| r + i as f64 * QUAD_STEP).collect();
        let weight: Vec<Enclosure> = nodes
            .iter()
            .map(|&t| Enclosure::exp_of(-t) * Enclosure::point(t).recip())
            .collect();
        let weight_slope: Vec<Enclosure> = nodes
            .iter()
            .zip(&weight)
            .map(|(&t, &w)| -(w * (Enclosure::point(1.0) + Enclosure::point(t)) * Enclosure::point(t).recip()))
            .collect();
        let first = match seed {
            Seed::Unit => Level {
                omega: vec![Enclosure::point(1.0); n + 1],
                slope: vec![Enclosure::point(0.0); n + 1],
            },
            Seed::ClosedForm => {
                let mut omega = Vec::with_capacity(n + 1);
                let mut slope = Vec::with_capacity(n + 1);
                for &t in &nodes {
                    omega.push(clip_nonneg(en(2, t)?));
                    slope.push(clip_nonneg(e1(t)?));
                }
                Level { omega, slope }
            }
        };
        Ok(Self {
            r,
            seed,
            nodes,
            weight,
            weight_slope,
            levels: vec![first],
        })
    }

    fn max_order(&self) -> usize {
        self.seed.first_order() + self.levels.len() - 1
    }

    fn value(&self, k: usize, i: usize) -> OmegaValue {
        let lvl = &self.levels[k - self.seed.first_order()];
        OmegaValue {
            k: k as u32,
            r: self.nodes[i],
            value: lvl.omega[i],
            derivative: -lvl.slope[i],
        }
    }

    fn extend_to(&mut self, k_max: usize) {
        while self.max_order() < k_max {
            let k = self.max_order();
            let next = self.next_level(k);
            self.levels.push(next);
        }
    }

    /// Builds `ω_{k+1}` and `B_{k+1}` from `ω_k` and `B_k`.
    fn next_level(&self, k: usize) -> Level {
        let cur = self.levels.last().expect("at least one level");
        let n = self.nodes.len() - 1;
        let big_r = self.nodes[n];
        // g = e^{-t}/t ω_k, g' = (e^{-t}/t)' ω_k - (e^{-t}/t) B_k
        let g: Vec<Enclosure> = (0..=n).map(|i| self.weight[i] * cur.omega[i]).collect();
        let dg: Vec<Enclosure> = (0..=n)
            .map(|i| self.weight_slope[i] * cur.omega[i] - self.weight[i] * cur.slope[i])
            .collect();
        let kk = (k + 1) as u32;
        let slope_tail = Enclosure::new(0.0, omega_derivative_bound(kk, big_r).next_up() * (1.0 + 1e-12));
        let slope = self.cumulate(&g, |i| dg[i], slope_tail);
        let omega_tail = Enclosure::new(0.0, omega_bound(kk, big_r).next_up() * (1.0 + 1e-12));
        let omega = self.cumulate(&slope, |i| -g[i], omega_tail);
        Level { omega, slope }
    }

    /// `F(t_i) = tail + ∫_{t_i}^{R} f` for completely monotone `f` given by
    /// node enclosures `f` and derivative enclosures `df`.
    fn cumulate(&self, f: &[Enclosure], df: impl Fn(usize) -> Enclosure, tail: Enclosure) -> Vec<Enclosure> {
        let n = self.nodes.len() - 1;
        let mut out = vec![Enclosure::point(0.0); n + 1];
        out[n] = tail;
        for i in (0..n).rev() {
            let h = self.nodes[i + 1] - self.nodes[i];
            let (fa, fb) = (f[i], f[i + 1]);
            let half_h = Enclosure::point(0.5 * h);
            let upper = ((Enclosure::point(fa.hi()) + Enclosure::point(fb.hi())) * half_h).hi();
            let trap_lo = ((Enclosure::point(fa.lo()) + Enclosure::point(fb.lo())) * half_h).lo();
            let curvature = (Enclosure::point(df(i + 1).hi()) - Enclosure::point(df(i).lo()))
                .hi()
                .max(0.0);
            let correction = (Enclosure::point(h * h / 8.0) * Enclosure::point(curvature)).hi();
            let tangent_lo = (Enclosure::point(trap_lo) - Enclosure::point(correction)).lo();
            let rect_lo = (Enclosure::point(h) * Enclosure::point(fb.lo().max(0.0))).lo();
            let lower = tangent_lo.max(rect_lo).max(0.0);
            out[i] = out[i + 1] + Enclosure::new(lower, upper.max(lower));
        }
        out
    }
}

type TableKey = (u64, Seed);

fn cache() -> &'static RwLock<HashMap<TableKey, Arc<OmegaTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<TableKey, Arc<OmegaTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn cached_table(r: f64, seed: Seed, k: usize) -> Result<Arc<OmegaTable>> {
    let key = (r.to_bits(), seed);
    if let Some(t) = cache().read().expect("omega cache poisoned").get(&key) {
        if t.max_order() >= k {
            return Ok(Arc::clone(t));
        }
    }
    let mut table = OmegaTable::new(r, seed)?;
    table.extend_to(k.max(MIN_ORDERS));
    debug_assert_eq!(table.r, r);
    let table = Arc::new(table);
    let mut guard = cache().write().expect("omega cache poisoned");
    let entry = guard.entry(key).or_insert_with(|| Arc::clone(&table));
    if entry.max_order() < table.max_order() {
        *entry = Arc::clone(&table);
    }
    Ok(Arc::clone(entry))
}

fn certify_alternation(kappa: Enclosure) -> Result<()> {
    if kappa.hi() < CERTIFIED_KAPPA {
        return Ok(());
    }
    // ω_{k+1} ≤ ω_k ω_1 on r ≥ 1, so κ ω_1(1) < 1 suffices
    let w1 = omega_closed_form(1, 1.0)?.value;
    if (kappa * w1).hi() < 1.0 {
        return Ok(());
    }
    Err(Error::certification(format!(
        "exterior alternation not certified at kappa = {kappa}"
    )))
}

/// Leibniz enclosures of `u_ext(1; κ)` and `u_ext'(1; κ)` from the partial
/// sums through orders `K` and `K + 1`.
pub fn u_ext_trace(kappa: Enclosure, order: usize) -> Result<BoundaryTrace> {
    if kappa.lo() < 0.0 {
        return Err(Error::domain(format!("u_ext_trace needs kappa >= 0, got {kappa}")));
    }
    if kappa == Enclosure::point(0.0) {
        return Ok(BoundaryTrace {
            value: Enclosure::point(1.0),
            derivative: Enclosure::point(-1.0),
            side: Side::Exterior,
        });
    }
    certify_alternation(kappa)?;
    let mut value_sums = Vec::with_capacity(order + 2);
    let mut deriv_sums = Vec::with_capacity(order + 2);
    let mut s = Enclosure::point(1.0);
    let mut d = Enclosure::point(1.0);
    value_sums.push(s);
    deriv_sums.push(d);
    let mut kp = Enclosure::point(1.0);
    for j in 1..=order + 1 {
        let w = omega(j as u32, 1.0)?;
        kp = kp * kappa;
        let term = kp * w.value;
        // u_ext'(1) = -Σ (-1)^j κ^j (ω_j - ω_j')
        let dterm = kp * (w.value - w.derivative);
        if j % 2 == 1 {
            s = s - term;
            d = d - dterm;
        } else {
            s = s + term;
            d = d + dterm;
        }
        value_sums.push(s);
        deriv_sums.push(d);
    }
    let value = value_sums[order].hull(&value_sums[order + 1]);
    let derivative = -deriv_sums[order].hull(&deriv_sums[order + 1]);
    Ok(BoundaryTrace {
        value,
        derivative,
        side: Side::Exterior,
    })
}

/// Leibniz enclosure of `u_ext(r; κ)` for `r ≥ 1` from the partial sums
/// through orders `K` and `K + 1`.
pub fn u_ext_value(kappa: Enclosure, r: f64, order: usize) -> Result<Enclosure> {
    if kappa.lo() < 0.0 || !(r >= 1.0) || !r.is_finite() {
        return Err(Error::domain(format!(
            "u_ext_value needs kappa >= 0 and r >= 1, got ({kappa}, {r})"
        )));
    }
    let inv_r = Enclosure::point(r).recip();
    if kappa == Enclosure::point(0.0) {
        return Ok(Enclosure::point(1.0 / r).hull(&inv_r));
    }
    certify_alternation(kappa)?;
    let mut s = Enclosure::point(1.0);
    let mut sums = vec![s];
    let mut kp = Enclosure::point(1.0);
    for j in 1..=order + 1 {
        kp = kp * kappa;
        let term = kp * omega(j as u32, r)?.value;
        s = if j % 2 == 1 { s - term } else { s + term };
        sums.push(s);
    }
    Ok(sums[order].hull(&sums[order + 1]) * inv_r)
}
