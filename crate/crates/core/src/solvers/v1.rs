//! PLS-Lasso-v1: `½‖Xw − y‖² − (μ/2)(yᵀXw)² + λ‖w‖₁`, solved in the
//! equivalent quadratic form `½wᵀQw − yᵀXw + λ‖w‖₁` with
//! `Q = Xᵀ(I − μyyᵀ)X = XᵀX − μ(Xᵀy)(Xᵀy)ᵀ`.

use super::{
    check_inputs, default_step, relative_change, ridge_start, FitExtras, FitResult, Method, Result,
    SolverError, SolverOptions,
};
use crate::numerics::{self, Cholesky, Matrix};

/// Relative slack on `μ‖y‖² ≤ 1` so that `μ = 1/‖y‖²` computed in floating
/// point is accepted.
const CONVEXITY_SLACK: f64 = 1e-12;

/// Objective drop, in units of `|F(w₀)| + ½‖y‖²`, treated as divergence.
const DIVERGENCE_FACTOR: f64 = 10.0;

/// `Xᵀ(I − μyyᵀ)X`
pub fn v1_quadratic(x: &Matrix, y: &[f64], mu: f64) -> Matrix {
    let xty = x.tr_matvec(y);
    let mut q = x.gram();
    q.add_outer(-mu, &xty, &xty);
    q
}

struct Problem {
    q: Matrix,
    xty: Vec<f64>,
    y_norm_sq: f64,
    lambda: f64,
}

impl Problem {
    fn new(x: &Matrix, y: &[f64], opts: &SolverOptions) -> Result<Self> {
        check_inputs(x, y)?;
        opts.validate()?;
        let y_norm_sq = numerics::dot(y, y);
        if y_norm_sq > 0.0 && opts.mu * y_norm_sq > 1.0 + CONVEXITY_SLACK {
            return Err(SolverError::ConvexityViolation {
                mu: opts.mu,
                bound: 1.0 / y_norm_sq,
            });
        }
        Ok(Self {
            q: v1_quadratic(x, y, opts.mu),
            xty: x.tr_matvec(y),
            y_norm_sq,
            lambda: opts.lambda,
        })
    }

    /// Objective in the `½‖Xw − y‖² − …` form, i.e. including `½‖y‖²`.
    fn objective(&self, w: &[f64]) -> f64 {
        let qw = self.q.matvec(w);
        0.5 * numerics::dot(w, &qw) - numerics::dot(&self.xty, w)
            + 0.5 * self.y_norm_sq
            + self.lambda * numerics::norm1(w)
    }

    fn null_solution_optimal(&self) -> bool {
        numerics::norm_inf(&self.xty) <= self.lambda
    }

    fn zero_fit(&self, method: Method, mu: f64) -> FitResult {
        FitResult {
            method,
            weights: vec![0.0; self.xty.len()],
            converged: true,
            iterations: 0,
            objective_trace: vec![0.5 * self.y_norm_sq],
            extras: FitExtras {
                mu: Some(mu),
                ..FitExtras::default()
            },
        }
    }

    fn divergence_floor(&self, initial: f64) -> f64 {
        initial - DIVERGENCE_FACTOR * (initial.abs() + 0.5 * self.y_norm_sq)
    }
}

fn check_divergence(value: f64, floor: f64, iteration: usize) -> Result<()> {
    if !value.is_finite() || value < floor {
        return Err(SolverError::Unbounded {
            iteration,
            objective: value,
        });
    }
    Ok(())
}

/// PLS-Lasso-v1 by proximal gradient:
/// `ξ = w − t(Qw − Xᵀy)`, `w ← S_{λt}(ξ)`.
pub fn v1_ista(x: &Matrix, y: &[f64], opts: &SolverOptions) -> Result<FitResult> {
    let p = Problem::new(x, y, opts)?;
    if p.null_solution_optimal() {
        return Ok(p.zero_fit(Method::V1Ista, opts.mu));
    }
    let step = default_step(&p.q, opts.step_size)?;
    let mut w = ridge_start(&x.gram(), &p.xty, opts.init_ridge)?;
    let initial = p.objective(&w);
    let floor = p.divergence_floor(initial);
    let mut trace = vec![initial];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let mut grad = p.q.matvec(&w);
        numerics::axpy(-1.0, &p.xty, &mut grad);
        let mut xi = w.clone();
        numerics::axpy(-step, &grad, &mut xi);
        let next = numerics::soft_threshold(&xi, p.lambda * step);
        let change = relative_change(&next, &w);
        w = next;
        let value = p.objective(&w);
        check_divergence(value, floor, iterations)?;
        trace.push(value);
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        method: Method::V1Ista,
        weights: w,
        converged,
        iterations,
        objective_trace: trace,
        extras: FitExtras {
            step_size: Some(step),
            mu: Some(opts.mu),
            ..FitExtras::default()
        },
    })
}

/// PLS-Lasso-v1 by Douglas-Rachford splitting:
///
/// ```text
/// w ← (Q + ρI)⁻¹(Xᵀy + ρξ + ρζ)
/// ξ ← S_{λ/ρ}(w − ζ)
/// ζ ← ζ + ρ(ξ − w)
/// ```
///
/// The `ζ` step scales the dual update by `ρ`, which coincides with the
/// textbook scaled-dual ADMM at the default `ρ = 1`. Returns the sparse `ξ`
/// iterate.
pub fn v1_dr(x: &Matrix, y: &[f64], opts: &SolverOptions) -> Result<FitResult> {
    let p = Problem::new(x, y, opts)?;
    if p.null_solution_optimal() {
        return Ok(p.zero_fit(Method::V1Dr, opts.mu));
    }
    let rho = opts.rho;
    let mut shifted = p.q.clone();
    shifted.add_diagonal(rho);
    let chol = Cholesky::factor(&shifted)?;

    let w0 = ridge_start(&x.gram(), &p.xty, opts.init_ridge)?;
    let initial = p.objective(&w0);
    let floor = p.divergence_floor(initial);
    let mut w = w0.clone();
    let mut xi = w0.clone();
    let mut zeta = w0;
    let mut trace = vec![initial];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let rhs: Vec<f64> = p
            .xty
            .iter()
            .zip(xi.iter().zip(&zeta))
            .map(|(b, (s, z))| b + rho * s + rho * z)
            .collect();
        let w_next = chol.solve(&rhs)?;
        xi = numerics::soft_threshold(&numerics::sub(&w_next, &zeta), p.lambda / rho);
        for ((z, s), wn) in zeta.iter_mut().zip(&xi).zip(&w_next) {
            *z += rho * (s - wn);
        }
        let change = relative_change(&w_next, &w);
        let coupling = numerics::dist2(&xi, &w_next) / (1.0 + numerics::norm2(&w_next));
        w = w_next;
        let value = p.objective(&xi);
        check_divergence(value, floor, iterations)?;
        trace.push(value);
        if change < opts.tol && coupling < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        method: Method::V1Dr,
        weights: xi,
        converged,
        iterations,
        objective_trace: trace,
        extras: FitExtras {
            mu: Some(opts.mu),
            ..FitExtras::default()
        },
    })
}
