//! Fitting algorithms: Lasso by ISTA, one-step thresholding, the first PLS
//! direction, PLS-Lasso-v1 (ISTA and Douglas-Rachford) and PLS-Lasso-v2
//! (ADMM inner solver alternated with an exact update of the scale `t`).
//!
//! Every solver is a pure function of `(X, y, options)`. Inputs are expected
//! to be centred by the caller (see [`crate::data::center_split`]); the
//! solvers themselves never look at column means.

mod lasso;
mod ost;
mod pls;
mod v1;
mod v2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, Cholesky, Matrix, NumericsError, PowerOptions};

pub use lasso::lasso_ista;
pub use ost::{ost, ost_with_ridge};
pub use pls::pls_first_direction;
pub use v1::{v1_dr, v1_ista, v1_quadratic};
pub use v2::{v2_admm_inner, v2_solve, v2_t_update, AdmmOutput};

pub const DEFAULT_RHO: f64 = 1.0;
pub const DEFAULT_MAX_ITER: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_INIT_RIDGE: f64 = 1e-6;

/// Safety factor applied to `1/L` when the step size is derived from the
/// power-iteration estimate of `L`, which can only undershoot.
const STEP_SHRINK: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// ℓ₁ weight.
    pub lambda: f64,
    /// Weight of the squared-covariance reward (v1 only).
    pub mu: f64,
    /// Augmented-Lagrangian penalty.
    pub rho: f64,
    /// Proximal-gradient step; `None` means `1/λ_max` of the quadratic.
    pub step_size: Option<f64>,
    pub max_iter: usize,
    /// Relative-change stopping threshold.
    pub tol: f64,
    /// Ridge added to the normal equations at initialisation, relative to
    /// `trace(XᵀX)/d`.
    pub init_ridge: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            mu: 0.0,
            rho: DEFAULT_RHO,
            step_size: None,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            init_ridge: DEFAULT_INIT_RIDGE,
        }
    }
}

impl SolverOptions {
    pub fn with_lambda(lambda: f64) -> Self {
        Self {
            lambda,
            ..Self::default()
        }
    }

    pub fn mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(SolverError::InvalidOption(format!(
                "lambda must be finite and >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(SolverError::InvalidOption(format!(
                "mu must be finite and >= 0, got {}",
                self.mu
            )));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(SolverError::InvalidOption(format!(
                "rho must be > 0, got {}",
                self.rho
            )));
        }
        if let Some(t) = self.step_size {
            if !(t > 0.0) || !t.is_finite() {
                return Err(SolverError::InvalidOption(format!(
                    "step size must be > 0, got {t}"
                )));
            }
        }
        if !(self.tol > 0.0) {
            return Err(SolverError::InvalidOption(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        if !(self.init_ridge >= 0.0) || !self.init_ridge.is_finite() {
            return Err(SolverError::InvalidOption(format!(
                "init_ridge must be >= 0, got {}",
                self.init_ridge
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    LassoIsta,
    Ost,
    PlsDirection,
    V1Ista,
    V1Dr,
    V2,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::LassoIsta,
        Method::Ost,
        Method::PlsDirection,
        Method::V1Ista,
        Method::V1Dr,
        Method::V2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::LassoIsta => "lasso_ista",
            Method::Ost => "ost",
            Method::PlsDirection => "pls_direction",
            Method::V1Ista => "v1_ista",
            Method::V1Dr => "v1_dr",
            Method::V2 => "v2",
        }
    }

    pub fn uses_mu(self) -> bool {
        matches!(self, Method::V1Ista | Method::V1Dr)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "lasso" | "lasso_ista" => Ok(Method::LassoIsta),
            "ost" => Ok(Method::Ost),
            "pls" | "pls_direction" => Ok(Method::PlsDirection),
            "v1" | "v1_ista" => Ok(Method::V1Ista),
            "v1_dr" => Ok(Method::V1Dr),
            "v2" => Ok(Method::V2),
            other => Err(format!(
                "unknown method '{other}' (expected one of lasso, ost, pls_direction, v1, v1_dr, v2)"
            )),
        }
    }
}

/// Method-specific scalars attached to a fit.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FitExtras {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub step_size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mu: Option<f64>,
    /// Final Charnes-Cooper scale `t` (v2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t: Option<f64>,
    /// Final transformed weights `γ = t·w` (v2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub gamma: Option<Vec<f64>>,
    /// `|yᵀXγ − 1|` at the returned point (v2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub constraint_residual: Option<f64>,
    /// Constraint residual after each outer iteration (v2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub constraint_trace: Option<Vec<f64>>,
    /// `t` after each outer iteration (v2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub t_trace: Option<Vec<f64>>,
    /// Total ADMM iterations across outer iterations (v2).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub inner_iterations: Option<usize>,
    /// OST fell back to a ridge-regularised restricted solve.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ridge_fallback: Option<bool>,
    /// Selected support (OST).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub support: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub method: Method,
    pub weights: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub objective_trace: Vec<f64>,
    pub extras: FitExtras,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error(
        "mu = {mu:e} exceeds 1/||y||^2 = {bound:e}; the quadratic X^T(I - mu y y^T)X is then \
         indefinite and the problem is not convex"
    )]
    ConvexityViolation { mu: f64, bound: f64 },
    #[error("objective unbounded below: reached {objective:e} at iteration {iteration}")]
    Unbounded { iteration: usize, objective: f64 },
    #[error("X^T y is zero; the PLS direction is undefined")]
    DegenerateDirection,
    #[error("y^T X w0 = 0 at initialisation")]
    DegenerateInitialization,
    #[error("K = {k} is outside 1..={d}")]
    KOutOfRange { k: usize, d: usize },
    #[error(
        "ADMM did not converge in {iterations} iterations (constraint residual {constraint_residual:e}, \
         coupling residual {coupling_residual:e})"
    )]
    InnerNoConvergence {
        iterations: usize,
        constraint_residual: f64,
        coupling_residual: f64,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SolverError>;

pub(crate) fn check_inputs(x: &Matrix, y: &[f64]) -> Result<()> {
    if x.rows() != y.len() {
        return Err(SolverError::Dimension(format!(
            "X has {} rows but y has {} entries",
            x.rows(),
            y.len()
        )));
    }
    if x.cols() == 0 {
        return Err(SolverError::Dimension("X has no columns".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite("y"));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite("X"));
    }
    Ok(())
}

/// Regularised normal-equations start: `(XᵀX + εI) w₀ = Xᵀy` with
/// `ε = init_ridge · trace(XᵀX)/d`.
pub(crate) fn ridge_start(gram: &Matrix, xty: &[f64], init_ridge: f64) -> Result<Vec<f64>> {
    let d = gram.rows();
    let mut shifted = gram.clone();
    let eps = init_ridge * gram.trace() / d as f64;
    shifted.add_diagonal(if eps > 0.0 { eps } else { 0.0 });
    match Cholesky::factor(&shifted) {
        Ok(chol) => Ok(chol.solve(xty)?),
        // zero ridge on a singular Gram matrix: retry with the smallest
        // positive shift that factorises
        Err(NumericsError::NotPositiveDefinite { .. }) if eps <= 0.0 => {
            let mut shifted = gram.clone();
            shifted
                .add_diagonal(DEFAULT_INIT_RIDGE * gram.trace().max(f64::MIN_POSITIVE) / d as f64);
            Ok(Cholesky::factor(&shifted)?.solve(xty)?)
        }
        Err(e) => Err(e.into()),
    }
}

/// Step size for proximal gradient on a quadratic with Hessian `q`.
pub(crate) fn default_step(q: &Matrix, requested: Option<f64>) -> Result<f64> {
    if let Some(t) = requested {
        return Ok(t);
    }
    let l = numerics::spectral_norm_sym(q, PowerOptions::default())?;
    if l == 0.0 {
        return Ok(1.0);
    }
    Ok(STEP_SHRINK / l)
}

/// `‖a − b‖₂ / (1 + ‖b‖₂)`
pub(crate) fn relative_change(next: &[f64], prev: &[f64]) -> f64 {
    numerics::dist2(next, prev) / (1.0 + numerics::norm2(prev))
}
