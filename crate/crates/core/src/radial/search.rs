//! Wronskian of the Volterra solutions and the first-zero search.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::par::Execution;
use crate::radial::potential::{check_admissible, RadialPotential};
use crate::radial::volterra::{
    check_dim, ExteriorOperator, InteriorOperator, VolterraConfig, VolterraGrid, VolterraSolution,
};
use crate::report::{Method, ResonanceReport};
use crate::variational::{classify_state, StateHypotheses};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralWronskian {
    pub value: f64,
    pub error_estimate: f64,
    pub interior: VolterraSolution,
    pub exterior: VolterraSolution,
}

/// Interior and exterior operators for one `(V, n)` and one grid density.
pub struct GeneralSolver {
    interior: InteriorOperator,
    exterior: ExteriorOperator,
    cfg: VolterraConfig,
}

impl GeneralSolver {
    pub fn new(v: &RadialPotential, n: u32, cfg: VolterraConfig) -> Result<Self> {
        check_dim(n)?;
        let gi = VolterraGrid::interior(n, &cfg)?;
        let ge = VolterraGrid::exterior(v, n, &cfg)?;
        Ok(Self {
            interior: InteriorOperator::new(v, gi)?,
            exterior: ExteriorOperator::new(v, ge)?,
            cfg,
        })
    }

    pub fn config(&self) -> &VolterraConfig {
        &self.cfg
    }

    pub fn grid_sizes(&self) -> (usize, usize) {
        (self.interior.grid().len(), self.exterior.grid().len())
    }

    pub fn r_max(&self) -> f64 {
        self.exterior.grid().r_max()
    }

    pub fn wronskian(&self, kappa: f64) -> Result<GeneralWronskian> {
        let interior = self.interior.solve(kappa, &self.cfg)?;
        let exterior = self.exterior.solve(kappa, &self.cfg)?;
        let (ui, dui) = (interior.trace.value.mid(), interior.trace.derivative.mid());
        let (ue, due) = (exterior.trace.value.mid(), exterior.trace.derivative.mid());
        let value = ue * dui - ui * due;
        let spread = ue.abs() + dui.abs() + ui.abs() + due.abs();
        let error_estimate = spread * interior.residual.max(exterior.residual);
        Ok(GeneralWronskian {
            value,
            error_estimate,
            interior,
            exterior,
        })
    }
}

/// `W_V(κ)` on the default grids.
pub fn general_wronskian(v: &RadialPotential, n: u32, kappa: f64) -> Result<GeneralWronskian> {
    GeneralSolver::new(v, n, VolterraConfig::default())?.wronskian(kappa)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub search_hi: f64,
    pub tol: f64,
    pub coarse_points: usize,
    pub fine_points: usize,
    pub volterra: VolterraConfig,
    pub exec: Execution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            search_hi: 20.0,
            tol: 1e-8,
            coarse_points: 64,
            fine_points: 512,
            volterra: VolterraConfig::default(),
            exec: Execution::Parallel,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found(ResonanceReport),
    /// `W_V` kept the sign of `W_V(0) = n - 2` on every sample below `search_hi`.
    NotFound {
        search_hi: f64,
        samples: usize,
    },
}

impl SearchOutcome {
    pub fn report(&self) -> Option<&ResonanceReport> {
        match self {
            SearchOutcome::Found(r) => Some(r),
            SearchOutcome::NotFound { .. } => None,
        }
    }
}

/// First sign change of `W_V` on `(0, search_hi]`, bisected to `tol`.
pub fn find_first_resonance_general(v: &RadialPotential, n: u32, search_hi: f64, tol: f64) -> Result<SearchOutcome> {
    let cfg = SearchConfig {
        search_hi,
        tol,
        ..Default::default()
    };
    find_first_resonance_with(v, n, &cfg)
}

/// Samples evaluated together before checking for a sign change.
const SCAN_CHUNK: usize = 16;

fn scan(solver: &GeneralSolver, hi: f64, m: usize, exec: Execution) -> Result<Option<(f64, f64)>> {
    let ks: Vec<f64> = (1..=m).map(|j| hi * j as f64 / m as f64).collect();
    let mut prev = 0.0;
    for chunk in ks.chunks(SCAN_CHUNK) {
        let ws: Vec<f64> = exec
            .map(chunk, |&k| solver.wronskian(k).map(|w| w.value))
            .into_iter()
            .collect::<Result<_>>()?;
        for (k, w) in chunk.iter().zip(&ws) {
            if *w <= 0.0 {
                return Ok(Some((prev, *k)));
            }
            prev = *k;
        }
    }
    Ok(None)
}

struct Bisection {
    a: f64,
    b: f64,
    steps: usize,
    /// secant root of the final bracket
    root: f64,
}

fn bisect(solver: &GeneralSolver, mut a: f64, mut b: f64, tol: f64) -> Result<Bisection> {
    let mut wa = solver.wronskian(a)?.value;
    let mut wb = solver.wronskian(b)?.value;
    let mut steps = 0;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let w = solver.wronskian(mid)?.value;
        if w > 0.0 {
            (a, wa) = (mid, w);
        } else {
            (b, wb) = (mid, w);
        }
        steps += 1;
    }
    let root = if wa > wb {
        (a - wa * (b - a) / (wb - wa)).clamp(a, b)
    } else {
        0.5 * (a + b)
    };
    Ok(Bisection { a, b, steps, root })
}

pub fn find_first_resonance_with(v: &RadialPotential, n: u32, cfg: &SearchConfig) -> Result<SearchOutcome> {
    check_dim(n)?;
    if !(cfg.tol > 0.0) || !(cfg.search_hi > 0.0) {
        return Err(Error::domain("search_hi and tol must be positive"));
    }
    let adm = check_admissible(v)?;
    if !adm.passed {
        return Err(Error::Admissibility(adm.failures.join("; ")));
    }
    if !v.is_nonnegative() {
        return Err(Error::domain(
            "first-zero search requires V >= 0; use general_wronskian for signed potentials",
        ));
    }
    let solver = GeneralSolver::new(v, n, cfg.volterra)?;
    let mut found = scan(&solver, cfg.search_hi, cfg.coarse_points, cfg.exec)?;
    let mut samples = cfg.coarse_points;
    if found.is_none() {
        found = scan(&solver, cfg.search_hi, cfg.fine_points, cfg.exec)?;
        samples += cfg.fine_points;
    }
    let Some((a0, b0)) = found else {
        return Ok(SearchOutcome::NotFound {
            search_hi: cfg.search_hi,
            samples,
        });
    };
    let coarse = bisect(&solver, a0, b0, cfg.tol)?;
    let fine_solver = GeneralSolver::new(v, n, cfg.volterra.refined())?;
    let fine = bisect(&fine_solver, a0, b0, cfg.tol)?;
    let estimate = coarse.root;
    let refined = fine.root;
    let sensitivity = (refined - estimate).abs();
    let kappa_star = Enclosure::new(coarse.a.min(fine.a), coarse.b.max(fine.b)).inflate(sensitivity);
    let steps = coarse.steps;
    let classification = classify_state(n, &StateHypotheses::from_potential(v))?;
    let (ni, ne) = solver.grid_sizes();
    let mut diagnostics = Map::new();
    diagnostics.insert("estimate".into(), json!(estimate));
    diagnostics.insert("refined_estimate".into(), json!(refined));
    diagnostics.insert("grid_sensitivity".into(), json!(sensitivity));
    diagnostics.insert("scan_bracket".into(), json!([a0, b0]));
    diagnostics.insert("bisection_steps".into(), json!(steps));
    diagnostics.insert("interior_nodes".into(), json!(ni));
    diagnostics.insert("exterior_nodes".into(), json!(ne));
    diagnostics.insert("r_max".into(), json!(solver.r_max()));
    diagnostics.insert("picard_tol".into(), json!(cfg.volterra.picard_tol));
    diagnostics.insert("weighted_integral".into(), json!(adm.weighted_integral));
    Ok(SearchOutcome::Found(ResonanceReport {
        n,
        potential: v.to_string(),
        kappa_star,
        method: Method::Volterra,
        classification,
        diagnostics,
    }))
}
