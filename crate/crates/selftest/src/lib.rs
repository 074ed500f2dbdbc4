//! Acceptance suite for `jacobi-kit`: fourteen numerical criteria, each
//! reported as one pass/fail outcome with its measured value and tolerance.

use std::fmt;
use std::time::Instant;

use serde::Serialize;

mod criteria;
mod fit;

pub use fit::{correlation, geomspace, linear_fit, linspace, LinearFit};

/// Reference parameter set shared by most criteria.
pub const REFERENCE_PARAMS: [(f64, f64); 3] = [(1.3, 0.2), (1.0, 0.0), (2.5, 0.5)];

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Worst value of the quantity compared against `tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {:<28} measured {:.3e} tol {:.1e} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

/// Result of one criterion body before timing and naming are attached.
pub(crate) struct Measured {
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

type Check = fn(bool) -> jacobi_kit::Result<Measured>;

const CRITERIA: [(u32, &str, Check); 14] = [
    (1, "normalization", criteria::normalization),
    (2, "closed-form oracle", criteria::closed_form),
    (3, "ODE residual", criteria::ode_residual),
    (4, "expansion error order", criteria::expansion_order),
    (5, "regime consistency", criteria::regime_consistency),
    (6, "c-function growth", criteria::c_function_growth),
    (7, "Gangolli estimate", criteria::gangolli),
    (8, "Plancherel and inversion", criteria::plancherel),
    (9, "hypergroup", criteria::hypergroup),
    (10, "heat semigroup", criteria::heat_semigroup),
    (11, "Riesz asymptotics", criteria::riesz_asymptotics),
    (12, "region truth table", criteria::region_table),
    (13, "geometry identities", criteria::geometry),
    (14, "lambda-derivative bounds", criteria::derivative_bounds),
];

pub fn criterion_ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs one criterion; numerical errors are reported as a failure.
pub fn run_one(id: u32, fast: bool) -> Option<CriterionOutcome> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let m = check(fast).unwrap_or_else(|e| Measured {
        passed: false,
        measured: f64::NAN,
        tolerance: f64::NAN,
        detail: format!("error: {e}"),
    });
    Some(CriterionOutcome {
        id,
        name,
        passed: m.passed,
        measured: m.measured,
        tolerance: m.tolerance,
        detail: m.detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// All criteria in order. `fast` trims parameter sweeps to a representative subset.
pub fn run_all(fast: bool) -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|c| run_one(c.0, fast)).collect()
}
