use super::{check_inputs, Result, SolverError};
use crate::numerics::{self, Matrix};

/// First PLS weight vector: the unit `w` maximising `(yᵀXw)²`, which is
/// `Xᵀy / ‖Xᵀy‖` with the sign chosen so that `yᵀXw > 0`.
pub fn pls_first_direction(x: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    check_inputs(x, y)?;
    let z = x.tr_matvec(y);
    let norm = numerics::norm2(&z);
    if norm == 0.0 {
        return Err(SolverError::DegenerateDirection);
    }
    // yᵀX(z/‖z‖) = ‖z‖ > 0 already
    Ok(numerics::scale(&z, 1.0 / norm))
}
