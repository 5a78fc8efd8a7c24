//! Brute-force verification on systems small enough for exact
//! diagonalization: Jordan–Wigner operators, spectral norms, and checks of
//! the closed-form bounds and identities used elsewhere in the crate.

pub mod checks;
pub mod fermion;
pub mod norm;
pub mod operator;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::Execution;

pub use checks::{
    verify_chemical_shifts, verify_commutator_bounds, verify_commutator_rules, verify_tile_evolution,
    verify_trotter_step,
};
pub use fermion::{jw_hamiltonian, Piece};
pub use norm::{exact_spectral_norm, sector_spectral_norm};
pub use operator::QubitOperator;

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub instance: String,
    pub exact: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Report {
    pub fn new(check: &str, instance: String, exact: f64, bound: f64, pass: bool) -> Self {
        Self { check: check.to_string(), instance, exact, bound, pass }
    }
}

/// Times at which the hexagon Trotter step is checked.
pub const TROTTER_TIMES: [f64; 3] = [0.05, 0.1, 0.2];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    /// Tile evolutions, commutator rules, energy shifts, free-fermion norms.
    Fast,
    /// Adds the Trotter step and the commutator bound checks.
    Full,
}

/// Runs the suite. `bound_scale` multiplies every error bound (1 for a real
/// run; other values inject faults).
pub fn run_suite(level: Level, bound_scale: f64, exec: Execution) -> Result<Vec<Report>> {
    let mut out = checks::verify_all_tiles()?;
    out.extend(verify_commutator_rules(1.0)?);
    out.extend(checks::verify_all_chemical_shifts()?);
    out.extend(checks::verify_all_ff_norms()?);
    if level == Level::Full {
        out.extend(checks::verify_hexagon_trotter(&TROTTER_TIMES, bound_scale)?);
        out.extend(checks::verify_all_commutator_bounds(bound_scale, exec)?);
    }
    Ok(out)
}

pub fn reports_json(reports: &[Report]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}
