//! PLS-Lasso-v2: minimise `f(w) + λ‖w‖₁` with
//! `f(w) = ½‖(Xw − y)/(yᵀXw)‖²`.
//!
//! Under the Charnes-Cooper substitution `γ = w/(yᵀXw)`, `t = 1/(yᵀXw)` the
//! problem becomes
//!
//! ```text
//! minimise ½‖Xγ − ty‖² + (λ/t)‖γ‖₁   s.t. yᵀXγ = 1, t > 0
//! ```
//!
//! which is solved by alternating an ADMM solve in `γ` (with `t` fixed) and
//! an exact univariate minimisation in `t` (with `γ` fixed).

use super::{
    check_inputs, ridge_start, FitExtras, FitResult, Method, Result, SolverError, SolverOptions,
};
use crate::numerics::{self, bisect_root, Cholesky, Matrix};

/// Result of one inner ADMM solve.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmOutput {
    /// Sparse solution, rescaled so that `yᵀXγ = 1` holds to rounding.
    pub gamma: Vec<f64>,
    pub iterations: usize,
    /// `|yᵀXγ − 1|` of the returned vector.
    pub constraint_residual: f64,
    /// `‖γ − β‖` between the smooth and sparse blocks at exit.
    pub coupling_residual: f64,
}

/// The `γ`-update matrix `Xᵀ(I + ρyyᵀ)X + ρI` does not depend on `t`, so one
/// factorisation serves every outer iteration.
struct InnerSystem {
    chol: Cholesky,
    xty: Vec<f64>,
    rho: f64,
}

impl InnerSystem {
    fn new(gram: &Matrix, xty: &[f64], rho: f64) -> Result<Self> {
        let mut m = gram.clone();
        m.add_outer(rho, xty, xty);
        m.add_diagonal(rho);
        Ok(Self {
            chol: Cholesky::factor(&m)?,
            xty: xty.to_vec(),
            rho,
        })
    }

    /// ADMM on
    ///
    /// ```text
    /// ½γᵀXᵀXγ + (λ/t)‖β‖₁ + (ρ/2)‖γ − β‖² + (ρ/2)(yᵀXγ − 1)²   s.t. yᵀXγ = 1, γ = β
    /// ```
    ///
    /// with multiplier `ν` on the affine constraint (started at 1) and scaled
    /// multiplier `u` on the splitting `γ = β` (started at 0):
    ///
    /// ```text
    /// γ ← (Xᵀ(I + ρyyᵀ)X + ρI)⁻¹ (ρ(β − u) + (ρ − ν)Xᵀy)
    /// β ← S_{λ/(ρt)}(γ + u)
    /// u ← u + γ − β
    /// ν ← ν + ρ(yᵀXγ − 1)
    /// ```
    ///
    /// Stops when `|yᵀXγ − 1| ≤ tol` and the coupling and block changes are
    /// below `tol·min(‖γ‖, 1)`. At the iteration cap the iterate is still
    /// accepted if constraint and coupling meet `tol` in absolute terms.
    fn solve(
        &self,
        lambda: f64,
        t: f64,
        gamma0: &[f64],
        tol: f64,
        max_iter: usize,
    ) -> Result<AdmmOutput> {
        let rho = self.rho;
        let threshold = lambda / (rho * t);
        let d = gamma0.len();
        let mut beta = gamma0.to_vec();
        let mut u = vec![0.0; d];
        let mut nu = 1.0;
        let mut gamma = gamma0.to_vec();
        let mut constraint = f64::INFINITY;
        let mut coupling = f64::INFINITY;

        for k in 1..=max_iter {
            let rhs: Vec<f64> = beta
                .iter()
                .zip(&u)
                .zip(&self.xty)
                .map(|((b, ui), xy)| rho * (b - ui) + (rho - nu) * xy)
                .collect();
            let next = self.chol.solve(&rhs)?;
            let shifted: Vec<f64> = next.iter().zip(&u).map(|(g, ui)| g + ui).collect();
            let beta_next = numerics::soft_threshold(&shifted, threshold);
            for ((ui, g), b) in u.iter_mut().zip(&next).zip(&beta_next) {
                *ui += g - b;
            }
            constraint = numerics::dot(&self.xty, &next) - 1.0;
            nu += rho * constraint;
            coupling = numerics::dist2(&next, &beta_next);
            // γ lives on the scale 1/‖Xᵀy‖; an absolute test alone is
            // meaningless once ‖γ‖ ≪ 1
            let scale = numerics::norm2(&next).clamp(f64::MIN_POSITIVE, 1.0);
            let change = numerics::dist2(&next, &gamma).max(numerics::dist2(&beta_next, &beta));
            gamma = next;
            beta = beta_next;
            if constraint.abs() <= tol && coupling <= tol * scale && change <= tol * scale {
                return Ok(self.finish(gamma, beta, k, coupling));
            }
        }
        // the relative test can be out of reach on badly scaled data; the
        // absolute contract is enough to hand back the iterate
        if constraint.abs() <= tol && coupling <= tol {
            return Ok(self.finish(gamma, beta, max_iter, coupling));
        }
        Err(SolverError::InnerNoConvergence {
            iterations: max_iter,
            constraint_residual: constraint.abs(),
            coupling_residual: coupling,
        })
    }

    /// Rescales the sparse block onto the affine constraint; the smooth block
    /// is the fallback when the sparse one carries no covariance.
    fn finish(
        &self,
        gamma: Vec<f64>,
        beta: Vec<f64>,
        iterations: usize,
        coupling: f64,
    ) -> AdmmOutput {
        let s = numerics::dot(&self.xty, &beta);
        let out = if s > 0.0 {
            numerics::scale(&beta, 1.0 / s)
        } else {
            gamma
        };
        let constraint_residual = (numerics::dot(&self.xty, &out) - 1.0).abs();
        AdmmOutput {
            gamma: out,
            iterations,
            constraint_residual,
            coupling_residual: coupling,
        }
    }
}

/// Solves `min ½γᵀXᵀXγ + (λ/t)‖γ‖₁ s.t. yᵀXγ = 1` by ADMM, starting from
/// `gamma0`. Uses `opts.rho`, `opts.tol` and `opts.max_iter`.
pub fn v2_admm_inner(
    x: &Matrix,
    y: &[f64],
    lambda: f64,
    t: f64,
    gamma0: &[f64],
    opts: &SolverOptions,
) -> Result<AdmmOutput> {
    check_inputs(x, y)?;
    opts.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(SolverError::InvalidOption(format!(
            "t must be > 0, got {t}"
        )));
    }
    if !(lambda >= 0.0) {
        return Err(SolverError::InvalidOption(format!(
            "lambda must be >= 0, got {lambda}"
        )));
    }
    if gamma0.len() != x.cols() {
        return Err(SolverError::Dimension(format!(
            "gamma0 has {} entries, X has {} columns",
            gamma0.len(),
            x.cols()
        )));
    }
    if gamma0.iter().any(|g| !g.is_finite()) {
        return Err(SolverError::NonFinite("gamma0"));
    }
    let xty = x.tr_matvec(y);
    let sys = InnerSystem::new(&x.gram(), &xty, opts.rho)?;
    sys.solve(lambda, t, gamma0, opts.tol, opts.max_iter)
}

/// Minimiser over `t > 0` of `(‖y‖²/2)t² − t + c/t` with `c = λ‖γ‖₁`, i.e.
/// the positive root of `‖y‖²t³ − t² − c`.
pub fn v2_t_update(lambda: f64, gamma_l1: f64, y_norm_sq: f64) -> f64 {
    debug_assert!(y_norm_sq > 0.0);
    let c = lambda * gamma_l1;
    if c <= 0.0 {
        return 1.0 / y_norm_sq;
    }
    let cubic = |t: f64| y_norm_sq * t * t * t - t * t - c;
    let candidate = (c / y_norm_sq).cbrt() + 1.0 / y_norm_sq;
    let lo = (0.5 / y_norm_sq).min(candidate);
    let mut hi = (2.0 / y_norm_sq).max(2.0 * candidate);
    while cubic(hi) <= 0.0 {
        hi *= 2.0;
    }
    // cubic(lo) < 0 always: at t = 1/(2‖y‖²) it equals -1/(8‖y‖⁴) - c.
    // A width tolerance would leave a residual of order cubic'(t)·tol for
    // large c, so bisect to floating-point exhaustion instead.
    bisect_root(cubic, lo, hi, 0.0).expect("bracket has a sign change by construction")
}

/// Charnes-Cooper objective `½‖Xγ − ty‖² + (λ/t)‖γ‖₁`.
fn transformed_objective(x: &Matrix, y: &[f64], gamma: &[f64], t: f64, lambda: f64) -> f64 {
    let mut r = x.matvec(gamma);
    numerics::axpy(-t, y, &mut r);
    0.5 * numerics::dot(&r, &r) + lambda / t * numerics::norm1(gamma)
}

/// PLS-Lasso-v2 by alternating ADMM in `γ` with the exact `t` update.
///
/// `objective_trace` holds the transformed objective after initialisation
/// and after every outer iteration; it never increases. An inner solve that
/// fails to improve on the current `γ` is discarded and only `t` moves.
pub fn v2_solve(x: &Matrix, y: &[f64], opts: &SolverOptions) -> Result<FitResult> {
    check_inputs(x, y)?;
    opts.validate()?;
    let lambda = opts.lambda;
    let xty = x.tr_matvec(y);
    let y_norm_sq = numerics::dot(y, y);
    let gram = x.gram();

    let mut w0 = ridge_start(&gram, &xty, opts.init_ridge)?;
    let s0 = numerics::dot(&xty, &w0);
    if s0 == 0.0 || !s0.is_finite() {
        return Err(SolverError::DegenerateInitialization);
    }
    if s0 < 0.0 {
        w0.iter_mut().for_each(|w| *w = -*w);
    }
    let mut t = 1.0 / s0.abs();
    let mut gamma = numerics::scale(&w0, t);

    let sys = InnerSystem::new(&gram, &xty, opts.rho)?;
    let mut value = transformed_objective(x, y, &gamma, t, lambda);
    let mut trace = vec![value];
    let mut constraint_trace = vec![(numerics::dot(&xty, &gamma) - 1.0).abs()];
    let mut t_trace = vec![t];
    let mut inner_total = 0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let inner = sys.solve(lambda, t, &gamma, opts.tol, opts.max_iter)?;
        inner_total += inner.iterations;
        let after_gamma = transformed_objective(x, y, &inner.gamma, t, lambda);
        // an inner solve that cannot improve on the current point means the
        // inner accuracy floor is reached; only t may still move
        let improved = after_gamma <= value;
        let (candidate, candidate_residual, after_gamma) = if improved {
            (inner.gamma, inner.constraint_residual, after_gamma)
        } else {
            let r = (numerics::dot(&xty, &gamma) - 1.0).abs();
            (gamma.clone(), r, value)
        };
        let mut t_next = v2_t_update(lambda, numerics::norm1(&candidate), y_norm_sq);
        let mut after_t = transformed_objective(x, y, &candidate, t_next, lambda);
        if after_t > after_gamma {
            t_next = t;
            after_t = after_gamma;
        }

        let mut prev = gamma.clone();
        prev.push(t);
        let mut next = candidate.clone();
        next.push(t_next);
        let change = numerics::dist2(&next, &prev) / numerics::norm2(&prev);

        gamma = candidate;
        t = t_next;
        value = after_t;
        trace.push(value);
        constraint_trace.push(candidate_residual);
        t_trace.push(t);
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    let constraint_residual = (numerics::dot(&xty, &gamma) - 1.0).abs();
    Ok(FitResult {
        method: Method::V2,
        weights: numerics::scale(&gamma, 1.0 / t),
        converged,
        iterations,
        objective_trace: trace,
        extras: FitExtras {
            t: Some(t),
            gamma: Some(gamma),
            constraint_residual: Some(constraint_residual),
            constraint_trace: Some(constraint_trace),
            t_trace: Some(t_trace),
            inner_iterations: Some(inner_total),
            ..FitExtras::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(lambda: f64) -> SolverOptions {
        SolverOptions {
            tol: 1e-10,
            max_iter: 100_000,
            ..SolverOptions::with_lambda(lambda)
        }
    }

    #[test]
    fn t_update_examples() {
        assert_eq!(v2_t_update(0.0, 3.0, 4.0), 0.25);
        assert_eq!(v2_t_update(1.0, 0.0, 4.0), 0.25);
        let t = v2_t_update(2.0, 1.0, 1.0);
        assert!((t - 1.695_620_769_559_862).abs() < 1e-9);
        assert!((t * t * t - t * t - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn inner_without_penalty_is_constrained_least_norm() {
        // X = I, y = [1,0]: min ½‖γ‖² s.t. γ1 = 1 -> γ = [1, 0]
        let out = v2_admm_inner(
            &Matrix::identity(2),
            &[1.0, 0.0],
            0.0,
            1.0,
            &[0.3, 0.3],
            &opts(0.0),
        )
        .unwrap();
        assert!((out.gamma[0] - 1.0).abs() < 1e-8);
        assert!(out.gamma[1].abs() < 1e-8);
        assert!(out.constraint_residual <= 1e-8);
        assert!(out.coupling_residual <= 1e-8);
    }

    #[test]
    fn inner_reports_exhaustion() {
        let o = SolverOptions {
            max_iter: 2,
            tol: 1e-14,
            ..opts(0.1)
        };
        let err = v2_admm_inner(&Matrix::identity(2), &[3.0, 1.0], 0.1, 1.0, &[0.0, 0.0], &o)
            .unwrap_err();
        assert!(matches!(
            err,
            SolverError::InnerNoConvergence { iterations: 2, .. }
        ));
    }

    #[test]
    fn exact_interpolation_without_penalty() {
        let fit = v2_solve(&Matrix::identity(2), &[3.0, 1.0], &opts(0.0)).unwrap();
        assert!(fit.converged);
        assert!((fit.weights[0] - 3.0).abs() < 1e-6, "{:?}", fit.weights);
        assert!((fit.weights[1] - 1.0).abs() < 1e-6);
        assert!(fit.objective_trace.last().unwrap().abs() < 1e-10);
    }

    #[test]
    fn outer_trace_is_monotone_and_constraint_holds() {
        let x = Matrix::from_rows(&[
            vec![0.9, -0.3, 0.4],
            vec![-0.2, 1.1, -0.6],
            vec![0.5, 0.2, 0.8],
            vec![-1.2, -1.0, -0.6],
        ])
        .unwrap();
        let y = [0.7, 0.4, 0.9, -2.0];
        let fit = v2_solve(&x, &y, &opts(0.05)).unwrap();
        for pair in fit.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-10);
        }
        for r in fit.extras.constraint_trace.as_ref().unwrap() {
            assert!(*r <= 1e-8);
        }
        let s = numerics::dot(&x.tr_matvec(&y), &fit.weights);
        assert!(s > 0.0);
    }
}
