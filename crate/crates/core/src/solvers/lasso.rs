use super::{
    check_inputs, default_step, relative_change, ridge_start, FitExtras, FitResult, Method, Result,
    SolverOptions,
};
use crate::numerics::{self, Matrix};

/// Lagrangian Lasso, `½‖Xw − y‖² + λ‖w‖₁`, by proximal gradient (ISTA).
///
/// The gradient is evaluated through `X` directly rather than through a
/// precomputed `XᵀX`, so this path shares no arithmetic with [`super::v1_ista`].
pub fn lasso_ista(x: &Matrix, y: &[f64], opts: &SolverOptions) -> Result<FitResult> {
    check_inputs(x, y)?;
    opts.validate()?;
    let d = x.cols();
    let lambda = opts.lambda;
    let xty = x.tr_matvec(y);

    // zero satisfies the subgradient condition exactly
    if numerics::norm_inf(&xty) <= lambda {
        return Ok(FitResult {
            method: Method::LassoIsta,
            weights: vec![0.0; d],
            converged: true,
            iterations: 0,
            objective_trace: vec![0.5 * numerics::dot(y, y)],
            extras: FitExtras::default(),
        });
    }

    let gram = x.gram();
    let step = default_step(&gram, opts.step_size)?;
    let mut w = ridge_start(&gram, &xty, opts.init_ridge)?;

    let objective =
        |w: &[f64], resid: &[f64]| 0.5 * numerics::dot(resid, resid) + lambda * numerics::norm1(w);
    let mut resid = numerics::sub(&x.matvec(&w), y);
    let mut trace = vec![objective(&w, &resid)];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let grad = x.tr_matvec(&resid);
        let mut xi = w.clone();
        numerics::axpy(-step, &grad, &mut xi);
        let next = numerics::soft_threshold(&xi, lambda * step);
        let change = relative_change(&next, &w);
        w = next;
        resid = numerics::sub(&x.matvec(&w), y);
        trace.push(objective(&w, &resid));
        if change < opts.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        method: Method::LassoIsta,
        weights: w,
        converged,
        iterations,
        objective_trace: trace,
        extras: FitExtras {
            step_size: Some(step),
            ..FitExtras::default()
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(lambda: f64) -> SolverOptions {
        SolverOptions {
            tol: 1e-12,
            max_iter: 100_000,
            ..SolverOptions::with_lambda(lambda)
        }
    }

    #[test]
    fn orthonormal_design_is_soft_thresholded_response() {
        let fit = lasso_ista(&Matrix::identity(2), &[3.0, 1.0], &opts(0.5)).unwrap();
        assert!(fit.converged);
        assert!((fit.weights[0] - 2.5).abs() < 1e-10);
        assert!((fit.weights[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn large_lambda_gives_exact_zero() {
        let fit = lasso_ista(&Matrix::identity(2), &[3.0, 1.0], &opts(5.0)).unwrap();
        assert_eq!(fit.weights, vec![0.0, 0.0]);
        assert!(fit.converged);
    }

    #[test]
    fn two_by_two_stationarity() {
        // X = [[1,1],[0,1]], y = [1,1], lambda = 0.1. A grid scan of the
        // objective over [-2,2]^2 (step 1e-3) bottoms out at (0, 0.95), value
        // 0.0975. There X^T(Xw - y) = (-0.05, -0.1): the inactive coordinate
        // sits strictly inside the bound, the active one meets -lambda.
        let x = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let y = [1.0, 1.0];
        let fit = lasso_ista(&x, &y, &opts(0.1)).unwrap();
        let grad = x.tr_matvec(&numerics::sub(&x.matvec(&fit.weights), &y));
        assert!(numerics::norm_inf(&grad) <= 0.1 + 1e-8);
        for (g, w) in grad.iter().zip(&fit.weights) {
            if *w != 0.0 {
                assert!((g + 0.1 * w.signum()).abs() < 1e-8);
            }
        }
        assert!(fit.weights[0].abs() < 1e-8);
        assert!((fit.weights[1] - 0.95).abs() < 1e-8);
    }

    #[test]
    fn objective_trace_is_monotone() {
        let x = Matrix::from_rows(&[
            vec![1.0, 0.3, -0.2],
            vec![-0.5, 1.2, 0.1],
            vec![0.2, -0.7, 0.9],
            vec![-0.7, -0.8, -0.8],
        ])
        .unwrap();
        let y = [1.0, -0.4, 0.6, -1.2];
        let fit = lasso_ista(&x, &y, &opts(0.05)).unwrap();
        for pair in fit.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_dimensions() {
        assert!(lasso_ista(&Matrix::identity(2), &[1.0], &opts(0.1)).is_err());
        assert!(lasso_ista(&Matrix::identity(2), &[1.0, f64::NAN], &opts(0.1)).is_err());
    }
}
