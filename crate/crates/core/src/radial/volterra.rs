//! Volterra integral equations for the interior and exterior solutions of
//! `(r∂_r)² u + (n-2) r∂_r u + κ r² V u = 0`, solved by Picard iteration.
//!
//! Interior, `u = 1 + w`:
//! `w(r) = -κ/(n-2) [ ∫_0^r sV(1+w) ds - r^{2-n} ∫_0^r s^{n-2} sV(1+w) ds ]`.
//!
//! Exterior, `u = r^{2-n}(1 + w)`:
//! `w(r) = -κ/(n-2) [ ∫_r^∞ sV(1+w) ds - r^{n-2} ∫_r^∞ s^{2-n} sV(1+w) ds ]`.
//!
//! Both kernels separate, so each Picard sweep is two cumulative sums. `1+w`
//! is taken piecewise linear between nodes and integrated exactly against
//! `sV(s) s^m` with 8-point Gauss–Legendre per element (precomputed weights).

use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::quad::decades_to_infinity;
use crate::radial::potential::{decades_to_zero, RadialPotential};
use crate::yukawa_interior::{BoundaryTrace, Side};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraConfig {
    pub r_min: f64,
    /// Nodes per unit of `ln r`.
    pub density: usize,
    /// Bound on the neglected `∫_{r_max}^∞ r|V| dr`.
    pub tail_tol: f64,
    pub picard_tol: f64,
    pub max_iter: usize,
    pub r_max_cap: f64,
}

impl Default for VolterraConfig {
    fn default() -> Self {
        Self {
            r_min: 1e-8,
            density: 1024,
            tail_tol: 1e-12,
            picard_tol: 1e-12,
            max_iter: 5000,
            r_max_cap: 1e8,
        }
    }
}

impl VolterraConfig {
    pub fn refined(&self) -> Self {
        Self {
            density: 2 * self.density,
            ..*self
        }
    }
}

/// Log-uniform radii for one side of the matching point.
#[derive(Debug, Clone, PartialEq)]
pub struct VolterraGrid {
    nodes: Vec<f64>,
    n: u32,
}

impl VolterraGrid {
    /// `count + 1` log-uniform nodes on `[a, b]`, endpoints exact.
    pub fn log_uniform(a: f64, b: f64, count: usize, n: u32) -> Result<Self> {
        if !(a > 0.0 && b > a) || count == 0 {
            return Err(Error::domain(format!("bad log grid [{a}, {b}] with {count} cells")));
        }
        check_dim(n)?;
        let (la, lb) = (a.ln(), b.ln());
        let mut nodes: Vec<f64> = (0..=count)
            .map(|i| (la + (lb - la) * i as f64 / count as f64).exp())
            .collect();
        nodes[0] = a;
        nodes[count] = b;
        Ok(Self { nodes, n })
    }

    /// `[r_min, 1]`.
    pub fn interior(n: u32, cfg: &VolterraConfig) -> Result<Self> {
        let cells = cells_for(1.0 / cfg.r_min, cfg.density);
        Self::log_uniform(cfg.r_min, 1.0, cells, n)
    }

    /// `[1, r_max]` with `∫_{r_max}^∞ r|V| ≤ tail_tol`.
    pub fn exterior(v: &RadialPotential, n: u32, cfg: &VolterraConfig) -> Result<Self> {
        let r_max = tail_radius(v, cfg)?;
        let cells = cells_for(r_max, cfg.density);
        Self::log_uniform(1.0, r_max, cells, n)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
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

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn cells_for(ratio: f64, density: usize) -> usize {
    ((ratio.ln() * density as f64).ceil() as usize).max(8)
}

pub(crate) fn check_dim(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::domain(format!("dimension must be >= 3, got {n}")));
    }
    Ok(())
}

/// Smallest `R = 2^j ≥ 2` with `∫_R^∞ r|V| dr ≤ tail_tol`.
fn tail_radius(v: &RadialPotential, cfg: &VolterraConfig) -> Result<f64> {
    let f = |r: f64| r * v.eval(r).abs();
    let mut r = 2.0;
    while r <= cfg.r_max_cap {
        let parts = decades_to_infinity(f, r, 40, 1e-6)?;
        let tail: f64 = parts.iter().sum();
        if parts.len() < 40 && tail <= cfg.tail_tol {
            return Ok(r);
        }
        r *= 2.0;
    }
    Err(Error::Numeric(format!(
        "tail of {v} exceeds {:e} beyond r = {:e}",
        cfg.tail_tol, cfg.r_max_cap
    )))
}

const GL_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_W: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// `(∫ g φ_a, ∫ g φ_b)` over `[a, b]` with hat functions `φ_a, φ_b`.
fn hat_moments<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let (mut wa, mut wb) = (0.0, 0.0);
    for j in 0..4 {
        for s in [-1.0, 1.0] {
            let x = c + s * h * GL_X[j];
            let gx = g(x) * GL_W[j] * h;
            let t = (x - a) / (b - a);
            wa += gx * (1.0 - t);
            wb += gx * t;
        }
    }
    (wa, wb)
}

/// Non-certified trace with Picard diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolterraSolution {
    pub trace: BoundaryTrace,
    pub iterations: usize,
    /// sup-norm of `T(w) - w` after convergence
    pub residual: f64,
    /// residual above ten times the iteration tolerance
    pub flagged: bool,
}

/// Element weights for one side, reusable across couplings.
pub struct InteriorOperator {
    grid: VolterraGrid,
    /// `(∫ sV φ_a, ∫ sV φ_b)` per element
    m0: Vec<(f64, f64)>,
    /// same with the extra factor `s^{n-2}`
    m1: Vec<(f64, f64)>,
    /// `∫_0^{r_min} sV` and `∫_0^{r_min} s^{n-1} V`
    core: (f64, f64),
}

impl InteriorOperator {
    pub fn new(v: &RadialPotential, grid: VolterraGrid) -> Result<Self> {
        let nm2 = (grid.n - 2) as i32;
        let nodes = &grid.nodes;
        let mut m0 = Vec::with_capacity(nodes.len() - 1);
        let mut m1 = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            m0.push(hat_moments(&|s: f64| s * v.eval(s), w[0], w[1]));
            m1.push(hat_moments(&|s: f64| s.powi(nm2 + 1) * v.eval(s), w[0], w[1]));
        }
        let r0 = grid.r_min();
        let (c0, _) = decades_to_zero(&|s: f64| s * v.eval(s), r0)?;
        let (c1, _) = decades_to_zero(&|s: f64| s.powi(nm2 + 1) * v.eval(s), r0)?;
        Ok(Self {
            grid,
            m0,
            m1,
            core: (c0, c1),
        })
    }

    pub fn grid(&self) -> &VolterraGrid {
        &self.grid
    }

    /// One Picard sweep; returns the new `w` and `I_1(1) = ∫_0^1 s^{n-1}V(1+w)`.
    fn sweep(&self, kappa: f64, w: &[f64], out: &mut [f64]) -> f64 {
        let nm2 = (self.grid.n - 2) as f64;
        let nodes = &self.grid.nodes;
        let mut i0 = self.core.0 * (1.0 + w[0]);
        let mut i1 = self.core.1 * (1.0 + w[0]);
        out[0] = -kappa / nm2 * (i0 - nodes[0].powf(-nm2) * i1);
        for e in 0..self.m0.len() {
            let (ua, ub) = (1.0 + w[e], 1.0 + w[e + 1]);
            i0 += self.m0[e].0 * ua + self.m0[e].1 * ub;
            i1 += self.m1[e].0 * ua + self.m1[e].1 * ub;
            let r = nodes[e + 1];
            out[e + 1] = -kappa / nm2 * (i0 - r.powf(-nm2) * i1);
        }
        i1
    }

    pub fn solve(&self, kappa: f64, cfg: &VolterraConfig) -> Result<VolterraSolution> {
        let len = self.grid.len();
        let (w, i1, iterations, residual) = picard(len, cfg, |w, out| self.sweep(kappa, w, out))?;
        let value = 1.0 + w[len - 1];
        let derivative = -kappa * i1;
        Ok(finish(value, derivative, iterations, residual, cfg, Side::Interior))
    }
}

pub struct ExteriorOperator {
    grid: VolterraGrid,
    m0: Vec<(f64, f64)>,
    /// with the extra factor `s^{2-n}`
    m1: Vec<(f64, f64)>,
}

impl ExteriorOperator {
    pub fn new(v: &RadialPotential, grid: VolterraGrid) -> Result<Self> {
        let nm2 = (grid.n - 2) as i32;
        let nodes = &grid.nodes;
        let mut m0 = Vec::with_capacity(nodes.len() - 1);
        let mut m1 = Vec::with_capacity(nodes.len() - 1);
        for w in nodes.windows(2) {
            m0.push(hat_moments(&|s: f64| s * v.eval(s), w[0], w[1]));
            m1.push(hat_moments(&|s: f64| s.powi(1 - nm2) * v.eval(s), w[0], w[1]));
        }
        Ok(Self { grid, m0, m1 })
    }

    pub fn grid(&self) -> &VolterraGrid {
        &self.grid
    }

    /// Returns `J_0(1) = ∫_1^∞ sV(1+w)`.
    fn sweep(&self, kappa: f64, w: &[f64], out: &mut [f64]) -> f64 {
        let nm2 = (self.grid.n - 2) as f64;
        let nodes = &self.grid.nodes;
        let last = nodes.len() - 1;
        let (mut j0, mut j1) = (0.0, 0.0);
        out[last] = 0.0;
        for e in (0..self.m0.len()).rev() {
            let (ua, ub) = (1.0 + w[e], 1.0 + w[e + 1]);
            j0 += self.m0[e].0 * ua + self.m0[e].1 * ub;
            j1 += self.m1[e].0 * ua + self.m1[e].1 * ub;
            let r = nodes[e];
            out[e] = -kappa / nm2 * (j0 - r.powf(nm2) * j1);
        }
        j0
    }

    pub fn solve(&self, kappa: f64, cfg: &VolterraConfig) -> Result<VolterraSolution> {
        let nm2 = (self.grid.n - 2) as f64;
        let (w, j0, iterations, residual) = picard(self.grid.len(), cfg, |w, out| self.sweep(kappa, w, out))?;
        let value = 1.0 + w[0];
        let derivative = -nm2 + kappa * j0;
        Ok(finish(value, derivative, iterations, residual, cfg, Side::Exterior))
    }
}

fn finish(
    value: f64,
    derivative: f64,
    iterations: usize,
    residual: f64,
    cfg: &VolterraConfig,
    side: Side,
) -> VolterraSolution {
    let scale = 1.0 + value.abs();
    VolterraSolution {
        trace: BoundaryTrace {
            value: Enclosure::around(value, residual),
            derivative: Enclosure::around(derivative, residual * (1.0 + derivative.abs())),
            side,
        },
        iterations,
        residual,
        flagged: residual > 10.0 * cfg.picard_tol * scale,
    }
}

/// Sweeps without a halving of the step before a rounding-floor stall is declared.
const STALL_SWEEPS: usize = 200;

/// Iterates `w ← T(w)` from `w = 0`; returns `(w, functional, iterations, residual)`.
///
/// When the step stops shrinking (rounding floor at large couplings) the
/// iterate is returned with its actual residual, which `finish` flags.
fn picard<F>(len: usize, cfg: &VolterraConfig, mut sweep: F) -> Result<(Vec<f64>, f64, usize, f64)>
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut w = vec![0.0; len];
    let mut next = vec![0.0; len];
    let mut best = f64::INFINITY;
    let mut best_at = 0;
    let mut peak = 1.0f64;
    for it in 1..=cfg.max_iter {
        sweep(&w, &mut next);
        let diff = sup_diff(&w, &next);
        let scale = next.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if !diff.is_finite() {
            return Err(Error::Convergence(format!(
                "Picard iterate overflowed after {it} sweeps"
            )));
        }
        peak = peak.max(scale);
        std::mem::swap(&mut w, &mut next);
        let converged = diff <= cfg.picard_tol * scale;
        if diff < 0.5 * best {
            best = diff;
            best_at = it;
        }
        // stalled below the rounding noise of the largest transient
        let stalled = it - best_at >= STALL_SWEEPS && diff <= 1e3 * f64::EPSILON * peak * len as f64;
        if converged || stalled {
            let functional = sweep(&w, &mut next);
            let residual = sup_diff(&w, &next);
            return Ok((next, functional, it, residual));
        }
    }
    Err(Error::Convergence(format!(
        "Picard iteration did not converge in {} sweeps",
        cfg.max_iter
    )))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// `u_int(1)`, `u_int'(1)` on a fresh operator.
pub fn solve_interior(
    v: &RadialPotential,
    n: u32,
    kappa: f64,
    grid: &VolterraGrid,
    cfg: &VolterraConfig,
) -> Result<VolterraSolution> {
    if grid.n != n {
        return Err(Error::domain("grid dimension does not match n"));
    }
    InteriorOperator::new(v, grid.clone())?.solve(kappa, cfg)
}

/// `u_ext(1)`, `u_ext'(1)` on a fresh operator.
pub fn solve_exterior(
    v: &RadialPotential,
    n: u32,
    kappa: f64,
    grid: &VolterraGrid,
    cfg: &VolterraConfig,
) -> Result<VolterraSolution> {
    if grid.n != n {
        return Err(Error::domain("grid dimension does not match n"));
    }
    ExteriorOperator::new(v, grid.clone())?.solve(kappa, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rational_from_f64;
    use crate::yukawa_exterior::u_ext_trace;
    use crate::yukawa_interior::AlphaValues;

    fn setup(n: u32) -> (VolterraConfig, VolterraGrid, VolterraGrid) {
        let cfg = VolterraConfig::default();
        let gi = VolterraGrid::interior(n, &cfg).unwrap();
        let ge = VolterraGrid::exterior(&RadialPotential::Yukawa, n, &cfg).unwrap();
        (cfg, gi, ge)
    }

    #[test]
    fn zero_coupling_is_exact() {
        for n in [3, 4, 5, 6] {
            let (cfg, gi, ge) = setup(n);
            let i = solve_interior(&RadialPotential::Yukawa, n, 0.0, &gi, &cfg).unwrap();
            let e = solve_exterior(&RadialPotential::Yukawa, n, 0.0, &ge, &cfg).unwrap();
            assert_eq!(i.trace.value.mid(), 1.0);
            assert_eq!(i.trace.derivative.mid(), 0.0);
            assert_eq!(e.trace.value.mid(), 1.0);
            assert_eq!(e.trace.derivative.mid(), 2.0 - n as f64);
        }
    }

    #[test]
    fn matches_series_oracles() {
        let (cfg, gi, ge) = setup(3);
        for kappa in [1.0, 1.68] {
            let q = rational_from_f64(kappa).unwrap();
            let series_in = crate::yukawa_interior::u_int_trace(&AlphaValues::by_recurrence(&q, 32), 16).unwrap();
            let series_out = u_ext_trace(Enclosure::point(kappa), 6).unwrap();
            let i = solve_interior(&RadialPotential::Yukawa, 3, kappa, &gi, &cfg).unwrap();
            let e = solve_exterior(&RadialPotential::Yukawa, 3, kappa, &ge, &cfg).unwrap();
            assert!((i.trace.value.mid() - series_in.value.mid()).abs() < 1e-6);
            assert!((i.trace.derivative.mid() - series_in.derivative.mid()).abs() < 1e-6);
            assert!((e.trace.value.mid() - series_out.value.mid()).abs() < 1e-6);
            assert!((e.trace.derivative.mid() - series_out.derivative.mid()).abs() < 1e-6);
            assert!(!i.flagged && !e.flagged);
        }
    }

    #[test]
    fn residual_small_outside_series_range() {
        let (cfg, _, ge) = setup(3);
        let e = solve_exterior(&RadialPotential::Yukawa, 3, 3.0, &ge, &cfg).unwrap();
        assert!(e.residual <= 10.0 * cfg.picard_tol * (1.0 + e.trace.value.mid().abs()));
    }

    #[test]
    fn grid_refinement_converges() {
        let v = RadialPotential::Yukawa;
        let kappa = 1.68;
        let mut vals = Vec::new();
        for density in [32, 64, 128] {
            let cfg = VolterraConfig {
                density,
                ..Default::default()
            };
            let gi = VolterraGrid::interior(3, &cfg).unwrap();
            let ge = VolterraGrid::exterior(&v, 3, &cfg).unwrap();
            let i = solve_interior(&v, 3, kappa, &gi, &cfg).unwrap().trace.value.mid();
            let e = solve_exterior(&v, 3, kappa, &ge, &cfg).unwrap().trace.value.mid();
            vals.push((i, e));
        }
        let d1 = ((vals[1].0 - vals[0].0).abs(), (vals[1].1 - vals[0].1).abs());
        let d2 = ((vals[2].0 - vals[1].0).abs(), (vals[2].1 - vals[1].1).abs());
        assert!(d2.0 * 3.0 <= d1.0, "{d1:?} {d2:?}");
        assert!(d2.1 * 3.0 <= d1.1, "{d1:?} {d2:?}");
    }

    #[test]
    fn bad_dimension() {
        assert!(VolterraGrid::log_uniform(0.1, 1.0, 10, 2).is_err());
    }
}
