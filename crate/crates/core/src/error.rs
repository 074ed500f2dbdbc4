use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobiError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("pole of {what} at {at}")]
    Pole { what: &'static str, at: String },
    #[error("resonance: k + 1 - i*lambda vanishes at k = {k}")]
    Resonance { k: usize },
    #[error("series diverges: {0}")]
    Divergence(String),
    #[error("argument outside the convergence radius: {0}")]
    Radius(String),
    #[error("{method} is not valid here: {reason}")]
    Regime { method: &'static str, reason: String },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("truncation tail {estimate:.3e} exceeds budget {budget:.3e}")]
    TailBudget { estimate: f64, budget: f64 },
    #[error("symbol is not integrable against the spectral measure: {0}")]
    NonIntegrableSymbol(String),
    #[error("extrapolation did not converge: {0}")]
    Extrapolation(String),
    #[error("grid budget exceeded: {0}")]
    GridBudget(String),
    #[error("insufficient terms: {0}")]
    InsufficientTerms(String),
}

impl JacobiError {
    /// True for errors caused by the caller's input rather than by a numerical breakdown.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            JacobiError::Domain(_)
                | JacobiError::Parameter(_)
                | JacobiError::Pole { .. }
                | JacobiError::Resonance { .. }
                | JacobiError::Radius(_)
                | JacobiError::Regime { .. }
                | JacobiError::NonIntegrableSymbol(_)
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            JacobiError::Domain(_) => "domain",
            JacobiError::Parameter(_) => "parameter",
            JacobiError::Pole { .. } => "pole",
            JacobiError::Resonance { .. } => "resonance",
            JacobiError::Divergence(_) => "divergence",
            JacobiError::Radius(_) => "radius",
            JacobiError::Regime { .. } => "regime",
            JacobiError::Quadrature(_) => "quadrature",
            JacobiError::TailBudget { .. } => "tail_budget",
            JacobiError::NonIntegrableSymbol(_) => "non_integrable_symbol",
            JacobiError::Extrapolation(_) => "extrapolation",
            JacobiError::GridBudget(_) => "grid_budget",
            JacobiError::InsufficientTerms(_) => "insufficient_terms",
        }
    }
}

pub type Result<T> = std::result::Result<T, JacobiError>;
