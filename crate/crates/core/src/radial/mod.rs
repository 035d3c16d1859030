//! General radial potentials: admissibility, Volterra solvers for the
//! interior and exterior solutions, their Wronskian at `r = 1`, and the
//! search for its first positive zero. Non-certified.

pub mod potential;
pub mod search;
pub mod volterra;

pub use potential::{check_admissible, AdmissibilityReport, RadialPotential, SignInfo, TabulatedPotential};
pub use search::{
    find_first_resonance_general, find_first_resonance_with, general_wronskian, GeneralSolver, GeneralWronskian,
    SearchConfig, SearchOutcome,
};
pub use volterra::{solve_exterior, solve_interior, VolterraConfig, VolterraGrid, VolterraSolution};
