use super::{check_inputs, FitExtras, FitResult, Method, Result, SolverError, DEFAULT_INIT_RIDGE};
use crate::numerics::{self, Cholesky, Matrix, NumericsError};

/// One-step thresholding with the default ridge fallback.
pub fn ost(x: &Matrix, y: &[f64], k: usize) -> Result<FitResult> {
    ost_with_ridge(x, y, k, DEFAULT_INIT_RIDGE)
}

/// Keeps the `k` largest `|Xᵀy|` entries (ties go to the lower index) and
/// refits `y` by least squares on those columns.
///
/// A singular restricted Gram matrix is retried with a ridge of
/// `init_ridge · trace/k` and flagged in `extras.ridge_fallback`.
pub fn ost_with_ridge(x: &Matrix, y: &[f64], k: usize, init_ridge: f64) -> Result<FitResult> {
    check_inputs(x, y)?;
    let d = x.cols();
    if k == 0 || k > d {
        return Err(SolverError::KOutOfRange { k, d });
    }
    let z = x.tr_matvec(y);
    let support = top_k_by_magnitude(&z, k);

    let restricted = x.select_columns(&support);
    let gram = restricted.gram();
    let rhs: Vec<f64> = support.iter().map(|&j| z[j]).collect();

    let (coef, fallback) = match Cholesky::factor(&gram) {
        Ok(chol) if well_conditioned(&chol, &gram) => (chol.solve(&rhs)?, false),
        Ok(_) | Err(NumericsError::NotPositiveDefinite { .. }) => {
            let mut shifted = gram.clone();
            let scale = gram.trace() / k as f64;
            shifted.add_diagonal(init_ridge * if scale > 0.0 { scale } else { 1.0 });
            (Cholesky::factor(&shifted)?.solve(&rhs)?, true)
        }
        Err(e) => return Err(e.into()),
    };

    let mut weights = vec![0.0; d];
    for (&j, c) in support.iter().zip(coef) {
        weights[j] = c;
    }
    let resid = numerics::sub(&x.matvec(&weights), y);
    Ok(FitResult {
        method: Method::Ost,
        weights,
        converged: true,
        iterations: 1,
        objective_trace: vec![0.5 * numerics::dot(&resid, &resid)],
        extras: FitExtras {
            ridge_fallback: Some(fallback),
            support: Some(support),
            ..FitExtras::default()
        },
    })
}

/// Indices of the `k` largest magnitudes, ties broken by lower index, in
/// ascending index order.
pub(crate) fn top_k_by_magnitude(z: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    // stable sort keeps lower indices first among equal magnitudes
    order.sort_by(|&a, &b| z[b].abs().total_cmp(&z[a].abs()));
    let mut chosen = order[..k].to_vec();
    chosen.sort_unstable();
    chosen
}

/// Rejects factorisations whose pivots collapse relative to the diagonal:
/// exactly collinear columns can survive Cholesky with a round-off pivot.
fn well_conditioned(chol: &Cholesky, gram: &Matrix) -> bool {
    let n = chol.dim();
    let max_diag = (0..n).map(|i| gram.get(i, i)).fold(0.0, f64::max);
    // pivot_j^2 = Schur complement; compare it against the diagonal scale
    (0..n).all(|j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        // (L L^T)^{-1}_{jj} bounded means no collapsed pivot
        chol.solve(&e)
            .map(|col| col[j] * max_diag < 1e12)
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_design_keeps_two_largest() {
        let fit = ost(&Matrix::identity(3), &[0.5, -2.0, 1.0], 2).unwrap();
        assert_eq!(fit.extras.support.as_deref(), Some(&[1, 2][..]));
        assert_eq!(fit.weights, vec![0.0, -2.0, 1.0]);
        assert_eq!(fit.extras.ridge_fallback, Some(false));
    }

    #[test]
    fn full_support_is_ordinary_least_squares() {
        let x = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let y = [1.0, 2.0, 4.0];
        // normal equations [[2,1],[1,2]] w = [5,6] -> w = [4/3, 7/3]
        let fit = ost(&x, &y, 2).unwrap();
        assert!((fit.weights[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((fit.weights[1] - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_lower_index() {
        assert_eq!(top_k_by_magnitude(&[1.0, -3.0, 3.0, 0.5], 1), vec![1]);
        assert_eq!(top_k_by_magnitude(&[2.0, 2.0, 2.0], 2), vec![0, 1]);
    }

    #[test]
    fn duplicated_columns_fall_back_to_ridge() {
        let x = Matrix::from_rows(&[
            vec![1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.5],
            vec![0.5, 0.5, -0.5],
        ])
        .unwrap();
        let y = [1.0, -1.0, 0.2];
        let fit = ost(&x, &y, 2).unwrap();
        assert_eq!(fit.extras.support.as_deref(), Some(&[0, 1][..]));
        assert_eq!(fit.extras.ridge_fallback, Some(true));
        assert!(fit.weights.iter().all(|w| w.is_finite()));
    }

    #[test]
    fn k_out_of_range() {
        assert!(matches!(
            ost(&Matrix::identity(2), &[1.0, 2.0], 0),
            Err(SolverError::KOutOfRange { k: 0, d: 2 })
        ));
        assert!(ost(&Matrix::identity(2), &[1.0, 2.0], 3).is_err());
    }
}
