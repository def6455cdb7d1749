//! Objective evaluators, optimality checks and slow independent reference
//! solvers.
//!
//! Nothing here calls into [`crate::solvers`]; the reference solvers are
//! deliberately naive so that agreement with the production solvers means
//! something.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{self, Matrix};

/// Default relative threshold for [`cardinality`].
pub const DEFAULT_CARDINALITY_TOL: f64 = 1e-8;
/// On-support slack when checking that `-sign(w_j) g_j` reaches `λ`.
pub const SUPPORT_SIGN_TOL: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("yᵀXw = 0: the v2 objective has a pole here")]
    Pole,
    #[error("reference solver needs d <= {limit}, got {d}")]
    TooLarge { d: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub type Result<T> = std::result::Result<T, DiagnosticsError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub max_kkt_violation: f64,
    pub support_sign_ok: bool,
    /// `|yᵀXγ − 1|` for the constrained subproblem, zero otherwise.
    pub constraint_residual: f64,
    pub objective_value: f64,
}

fn residual(x: &Matrix, y: &[f64], w: &[f64]) -> Vec<f64> {
    numerics::sub(&x.matvec(w), y)
}

/// `½‖Xw − y‖² + λ‖w‖₁`
pub fn objective_lasso(x: &Matrix, y: &[f64], w: &[f64], lambda: f64) -> f64 {
    let r = residual(x, y, w);
    0.5 * numerics::dot(&r, &r) + lambda * numerics::norm1(w)
}

/// `½‖Xw − y‖² − (μ/2)(yᵀXw)² + λ‖w‖₁`
pub fn objective_v1(x: &Matrix, y: &[f64], w: &[f64], lambda: f64, mu: f64) -> f64 {
    let xw = x.matvec(w);
    let s = numerics::dot(y, &xw);
    let r = numerics::sub(&xw, y);
    0.5 * numerics::dot(&r, &r) - 0.5 * mu * s * s + lambda * numerics::norm1(w)
}

/// The ratio `f(w) = ½‖(Xw − y)/(yᵀXw)‖²` evaluated two ways: directly,
/// and expanded as `(‖Xw‖² + ‖y‖²)/(2(yᵀXw)²) − 1/(yᵀXw)`.
pub fn objective_v2_forms(x: &Matrix, y: &[f64], w: &[f64]) -> Result<(f64, f64)> {
    let xw = x.matvec(w);
    let s = numerics::dot(y, &xw);
    if s == 0.0 {
        return Err(DiagnosticsError::Pole);
    }
    let r = numerics::sub(&xw, y);
    let ratio = 0.5 * numerics::dot(&r, &r) / (s * s);
    let expanded = (numerics::dot(&xw, &xw) + numerics::dot(y, y)) / (2.0 * s * s) - 1.0 / s;
    Ok((ratio, expanded))
}

/// `f(w) + λ‖w‖₁` with `f` the ratio objective.
pub fn objective_v2(x: &Matrix, y: &[f64], w: &[f64], lambda: f64) -> Result<f64> {
    let (ratio, expanded) = objective_v2_forms(x, y, w)?;
    debug_assert!(
        (ratio - expanded).abs() <= 1e-8 * ratio.abs().max(expanded.abs()).max(1e-300),
        "v2 objective forms disagree: {ratio} vs {expanded}"
    );
    Ok(ratio + lambda * numerics::norm1(w))
}

/// Charnes-Cooper objective `½‖Xγ − ty‖² + (λ/t)‖γ‖₁`.
pub fn objective_v2_transformed(x: &Matrix, y: &[f64], gamma: &[f64], t: f64, lambda: f64) -> f64 {
    let mut r = x.matvec(gamma);
    numerics::axpy(-t, y, &mut r);
    0.5 * numerics::dot(&r, &r) + lambda / t * numerics::norm1(gamma)
}

fn violations(grad: &[f64], w: &[f64], weight: f64) -> (f64, bool) {
    let mut worst: f64 = 0.0;
    let mut sign_ok = true;
    for (&g, &wj) in grad.iter().zip(w) {
        if wj != 0.0 {
            let s = wj.signum();
            worst = worst.max((g + weight * s).abs());
            if -s * g < weight - SUPPORT_SIGN_TOL {
                sign_ok = false;
            }
        } else {
            worst = worst.max(g.abs() - weight);
        }
    }
    (worst.max(0.0), sign_ok)
}

/// Subgradient optimality of `w` for the Lasso (`mu = None`) or for
/// PLS-Lasso-v1 with the given `μ`.
pub fn kkt_report(
    x: &Matrix,
    y: &[f64],
    w: &[f64],
    lambda: f64,
    mu: Option<f64>,
) -> OptimalityReport {
    let xw = x.matvec(w);
    let r = numerics::sub(&xw, y);
    let mut grad = x.tr_matvec(&r);
    let mu = mu.unwrap_or(0.0);
    if mu != 0.0 {
        let s = numerics::dot(y, &xw);
        let xty = x.tr_matvec(y);
        numerics::axpy(-mu * s, &xty, &mut grad);
    }
    let (max_kkt_violation, support_sign_ok) = violations(&grad, w, lambda);
    OptimalityReport {
        max_kkt_violation,
        support_sign_ok,
        constraint_residual: 0.0,
        objective_value: objective_v1(x, y, w, lambda, mu),
    }
}

/// Optimality of `γ` for `min ½γᵀXᵀXγ + weight·‖γ‖₁ s.t. yᵀXγ = 1`.
///
/// The multiplier of the affine constraint is estimated by least squares on
/// the support, then the usual ℓ₁ conditions are checked on
/// `XᵀXγ + νXᵀy`.
pub fn kkt_report_constrained(
    x: &Matrix,
    y: &[f64],
    gamma: &[f64],
    weight: f64,
) -> OptimalityReport {
    let xty = x.tr_matvec(y);
    let xg = x.matvec(gamma);
    let mut grad = x.tr_matvec(&xg);
    let nu = multiplier_estimate(&grad, &xty, gamma, weight);
    numerics::axpy(nu, &xty, &mut grad);
    let (max_kkt_violation, support_sign_ok) = violations(&grad, gamma, weight);
    OptimalityReport {
        max_kkt_violation,
        support_sign_ok,
        constraint_residual: (numerics::dot(&xty, gamma) - 1.0).abs(),
        objective_value: 0.5 * numerics::dot(&xg, &xg) + weight * numerics::norm1(gamma),
    }
}

fn multiplier_estimate(grad: &[f64], b: &[f64], w: &[f64], weight: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for ((&g, &bj), &wj) in grad.iter().zip(b).zip(w) {
        if wj != 0.0 {
            num += bj * (g + weight * wj.signum());
            den += bj * bj;
        }
    }
    if den > 0.0 {
        -num / den
    } else {
        0.0
    }
}

/// Number of entries with `|w_i| > rel_tol · ‖w‖_∞`.
pub fn cardinality(w: &[f64], rel_tol: f64) -> usize {
    let cutoff = rel_tol * numerics::norm_inf(w);
    w.iter().filter(|v| v.abs() > cutoff).count()
}

/// Objective handled by [`reference_solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceProblem {
    /// `½‖Xw − y‖² + λ‖w‖₁`
    Lasso { lambda: f64 },
    /// `½‖Xw − y‖² − (μ/2)(yᵀXw)² + λ‖w‖₁`
    V1 { lambda: f64, mu: f64 },
    /// `½γᵀXᵀXγ + (λ/t)‖γ‖₁ s.t. yᵀXγ = 1`
    V2Inner { lambda: f64, t: f64 },
    /// `f(w) + λ‖w‖₁` with the ratio objective; grid scan only.
    V2 { lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            lo: -5.0,
            hi: 5.0,
            step: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceOptions {
    pub steps: usize,
    /// Step-decay horizon: step `k` is `1/(L(1 + k/decay))`.
    pub decay: f64,
    pub grid: GridSpec,
}

impl Default for ReferenceOptions {
    fn default() -> Self {
        Self {
            steps: 200_000,
            decay: 10_000.0,
            grid: GridSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub weights: Vec<f64>,
    pub objective: f64,
    /// False when the best objective was still improving (relative 1e-9)
    /// over the last tenth of the budget.
    pub stabilized: bool,
}

/// Largest `d` accepted by the subgradient reference.
pub const SUBGRADIENT_MAX_DIM: usize = 50;
/// Largest `d` accepted by the grid reference.
pub const GRID_MAX_DIM: usize = 2;

/// Slow reference minimiser used as a test oracle.
///
/// Lasso, v1 and the constrained v2 subproblem use a diminishing-step
/// subgradient method (minimum-norm subgradient, coordinates that cross
/// zero are clamped to zero). The constrained subproblem additionally
/// corrects the subgradient with a least-squares multiplier estimate and
/// rescales each iterate back onto `yᵀXγ = 1`. The full v2 objective is
/// handled by a dense grid scan.
pub fn reference_solve(
    problem: ReferenceProblem,
    x: &Matrix,
    y: &[f64],
    opts: &ReferenceOptions,
) -> Result<ReferenceSolution> {
    if x.rows() != y.len() {
        return Err(DiagnosticsError::Dimension(format!(
            "X has {} rows, y has {}",
            x.rows(),
            y.len()
        )));
    }
    match problem {
        ReferenceProblem::V2 { .. } => grid_scan(problem, x, y, opts.grid),
        _ => {
            let d = x.cols();
            if d > SUBGRADIENT_MAX_DIM {
                return Err(DiagnosticsError::TooLarge {
                    d,
                    limit: SUBGRADIENT_MAX_DIM,
                });
            }
            Ok(subgradient(problem, x, y, opts))
        }
    }
}

/// Smooth part in quadratic form `½wᵀHw − cᵀw + const`, built from `X`
/// with plain loops.
struct Quadratic {
    h: Vec<Vec<f64>>,
    c: Vec<f64>,
    constant: f64,
}

impl Quadratic {
    fn build(problem: ReferenceProblem, x: &Matrix, y: &[f64]) -> Self {
        let d = x.cols();
        let mut h = vec![vec![0.0; d]; d];
        let mut b = vec![0.0; d];
        for (i, yi) in y.iter().enumerate() {
            let row = x.row(i);
            for (a, xa) in row.iter().enumerate() {
                b[a] += xa * yi;
                for (hac, xc) in h[a].iter_mut().zip(row) {
                    *hac += xa * xc;
                }
            }
        }
        let yy: f64 = y.iter().map(|v| v * v).sum();
        match problem {
            ReferenceProblem::Lasso { .. } => Self {
                h,
                c: b,
                constant: 0.5 * yy,
            },
            ReferenceProblem::V1 { mu, .. } => {
                for a in 0..d {
                    for c in 0..d {
                        h[a][c] -= mu * b[a] * b[c];
                    }
                }
                Self {
                    h,
                    c: b,
                    constant: 0.5 * yy,
                }
            }
            ReferenceProblem::V2Inner { .. } | ReferenceProblem::V2 { .. } => Self {
                h,
                c: vec![0.0; d],
                constant: 0.0,
            },
        }
    }

    fn gradient(&self, w: &[f64]) -> Vec<f64> {
        self.h
            .iter()
            .zip(&self.c)
            .map(|(row, ci)| row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - ci)
            .collect()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let g = self.gradient(w);
        // ½wᵀHw − cᵀw = ½wᵀ(Hw − c) − ½cᵀw
        let half: f64 = w.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() * 0.5;
        let lin: f64 = w.iter().zip(&self.c).map(|(a, b)| a * b).sum::<f64>() * 0.5;
        half - lin + self.constant
    }

    fn frobenius(&self) -> f64 {
        self.h.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }
}

fn subgradient(
    problem: ReferenceProblem,
    x: &Matrix,
    y: &[f64],
    opts: &ReferenceOptions,
) -> ReferenceSolution {
    let quad = Quadratic::build(problem, x, y);
    let d = x.cols();
    let (weight, constraint) = match problem {
        ReferenceProblem::Lasso { lambda } | ReferenceProblem::V1 { lambda, .. } => (lambda, None),
        ReferenceProblem::V2Inner { lambda, t } => {
            let b: Vec<f64> = (0..d)
                .map(|j| (0..x.rows()).map(|i| x.get(i, j) * y[i]).sum())
                .collect();
            (lambda / t, Some(b))
        }
        ReferenceProblem::V2 { .. } => unreachable!("grid only"),
    };
    let l = quad.frobenius().max(1e-12);
    let objective = |w: &[f64]| quad.value(w) + weight * w.iter().map(|v| v.abs()).sum::<f64>();

    let mut w = match &constraint {
        Some(b) => {
            let bb: f64 = b.iter().map(|v| v * v).sum();
            b.iter().map(|v| v / bb).collect()
        }
        None => vec![0.0; d],
    };
    let mut best = w.clone();
    let mut best_value = objective(&w);
    let tail_start = opts.steps - opts.steps / 10;
    let mut value_at_tail = best_value;

    for k in 0..opts.steps {
        if k == tail_start {
            value_at_tail = best_value;
        }
        let mut g = quad.gradient(&w);
        if let Some(b) = &constraint {
            let nu = multiplier_estimate(&g, b, &w, weight);
            g.iter_mut().zip(b).for_each(|(gi, bi)| *gi += nu * bi);
        }
        let mut s: Vec<f64> = g
            .iter()
            .zip(&w)
            .map(|(&gi, &wi)| {
                if wi != 0.0 {
                    gi + weight * wi.signum()
                } else {
                    numerics::soft_threshold_scalar(gi, weight)
                }
            })
            .collect();
        if let Some(b) = &constraint {
            let bb: f64 = b.iter().map(|v| v * v).sum();
            let bs: f64 = b.iter().zip(&s).map(|(p, q)| p * q).sum();
            s.iter_mut().zip(b).for_each(|(si, bi)| *si -= bi * bs / bb);
        }
        let step = 1.0 / (l * (1.0 + k as f64 / opts.decay));
        let mut next: Vec<f64> = w.iter().zip(&s).map(|(wi, si)| wi - step * si).collect();
        for (nj, &wj) in next.iter_mut().zip(&w) {
            if wj != 0.0 && nj.signum() != wj.signum() {
                *nj = 0.0;
            }
        }
        if let Some(b) = &constraint {
            let sc: f64 = b.iter().zip(&next).map(|(p, q)| p * q).sum();
            if sc > 0.0 {
                next.iter_mut().for_each(|v| *v /= sc);
            }
        }
        w = next;
        let value = objective(&w);
        if value < best_value {
            best_value = value;
            best.clone_from(&w);
        }
    }
    let stabilized = value_at_tail - best_value <= 1e-9 * (1.0 + best_value.abs());
    ReferenceSolution {
        weights: best,
        objective: best_value,
        stabilized,
    }
}

/// Exhaustive scan of `[lo, hi]^d` for `d ≤ 2`.
pub fn grid_scan(
    problem: ReferenceProblem,
    x: &Matrix,
    y: &[f64],
    grid: GridSpec,
) -> Result<ReferenceSolution> {
    let d = x.cols();
    if d > GRID_MAX_DIM {
        return Err(DiagnosticsError::TooLarge {
            d,
            limit: GRID_MAX_DIM,
        });
    }
    let quad = Quadratic::build(ReferenceProblem::Lasso { lambda: 0.0 }, x, y);
    let b = quad.c.clone();
    let yy = 2.0 * quad.constant;
    let g = &quad.h;

    let value = |w: &[f64]| -> f64 {
        let quad_form: f64 = (0..d)
            .map(|a| (0..d).map(|c| w[a] * g[a][c] * w[c]).sum::<f64>())
            .sum();
        let s: f64 = b.iter().zip(w).map(|(p, q)| p * q).sum();
        let l1: f64 = w.iter().map(|v| v.abs()).sum();
        match problem {
            ReferenceProblem::Lasso { lambda } => 0.5 * quad_form - s + 0.5 * yy + lambda * l1,
            ReferenceProblem::V1 { lambda, mu } => {
                0.5 * quad_form - s + 0.5 * yy - 0.5 * mu * s * s + lambda * l1
            }
            ReferenceProblem::V2 { lambda } => {
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    (quad_form + yy) / (2.0 * s * s) - 1.0 / s + lambda * l1
                }
            }
            ReferenceProblem::V2Inner { lambda, t } => {
                if (s - 1.0).abs() > 0.5 * grid.step * b.iter().map(|v| v.abs()).sum::<f64>() {
                    f64::INFINITY
                } else {
                    0.5 * quad_form + lambda / t * l1
                }
            }
        }
    };

    let count = ((grid.hi - grid.lo) / grid.step).round() as usize + 1;
    let coord = |i: usize| grid.lo + i as f64 * grid.step;
    let mut best = vec![0.0; d];
    let mut best_value = f64::INFINITY;
    let mut w = vec![0.0; d];
    match d {
        1 => {
            for i in 0..count {
                w[0] = coord(i);
                let v = value(&w);
                if v < best_value {
                    best_value = v;
                    best.clone_from(&w);
                }
            }
        }
        2 => {
            for i in 0..count {
                w[0] = coord(i);
                for j in 0..count {
                    w[1] = coord(j);
                    let v = value(&w);
                    if v < best_value {
                        best_value = v;
                        best.clone_from(&w);
                    }
                }
            }
        }
        _ => {}
    }
    Ok(ReferenceSolution {
        weights: best,
        objective: best_value,
        stabilized: best_value.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id2() -> Matrix {
        Matrix::identity(2)
    }

    #[test]
    fn lasso_objective_examples() {
        let y = [3.0, 1.0];
        assert_eq!(objective_lasso(&id2(), &y, &[0.0, 0.0], 0.7), 5.0);
        assert!((objective_lasso(&id2(), &y, &[2.5, 0.5], 0.5) - 1.75).abs() < 1e-15);
        let x = Matrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        // OLS of [1,2,6] on a constant column is 3, RSS = 4 + 1 + 9
        assert!((objective_lasso(&x, &[1.0, 2.0, 6.0], &[3.0], 0.0) - 7.0).abs() < 1e-15);
    }

    #[test]
    fn v1_objective_examples() {
        let y = [3.0, 1.0];
        let w = [0.4, -1.0];
        assert_eq!(
            objective_v1(&id2(), &y, &w, 0.3, 0.0),
            objective_lasso(&id2(), &y, &w, 0.3)
        );
        assert_eq!(objective_v1(&id2(), &y, &[0.0, 0.0], 0.3, 0.1), 5.0);
        // 0.125 - 0.5625 + 0.375
        let v = objective_v1(&id2(), &[1.0, 0.0], &[1.5, 0.0], 0.25, 0.5);
        assert!((v + 0.0625).abs() < 1e-15);
    }

    #[test]
    fn v2_objective_examples() {
        assert_eq!(
            objective_v2(&id2(), &[3.0, 1.0], &[3.0, 1.0], 0.0).unwrap(),
            0.0
        );
        let (a, b) = objective_v2_forms(&id2(), &[3.0, 1.0], &[1.0, 2.0]).unwrap();
        assert!((a - b).abs() < 1e-15);
        // yᵀXw = 0
        assert_eq!(
            objective_v2(&id2(), &[1.0, 1.0], &[1.0, -1.0], 0.1),
            Err(DiagnosticsError::Pole)
        );
    }

    #[test]
    fn flipping_negative_covariance_lowers_v2_objective() {
        let y = [3.0, 1.0];
        let w = [-1.0, 0.5];
        let neg = objective_v2(&id2(), &y, &w, 0.2).unwrap();
        let pos = objective_v2(&id2(), &y, &[1.0, -0.5], 0.2).unwrap();
        assert!(pos < neg);
    }

    #[test]
    fn kkt_examples() {
        let y = [3.0, 1.0];
        let exact = kkt_report(&id2(), &y, &[2.5, 0.5], 0.5, None);
        assert!(exact.max_kkt_violation <= 1e-10);
        assert!(exact.support_sign_ok);
        let null = kkt_report(&id2(), &y, &[0.0, 0.0], 3.0, None);
        assert_eq!(null.max_kkt_violation, 0.0);
        let off = kkt_report(&id2(), &y, &[2.6, 0.6], 0.5, None);
        assert!(off.max_kkt_violation > 0.0);
    }

    #[test]
    fn constrained_kkt_at_closed_form() {
        // min ½‖γ‖² s.t. 3γ1 + γ2 = 1 with X = I, y = [3,1]: γ = y/10
        let r = kkt_report_constrained(&id2(), &[3.0, 1.0], &[0.3, 0.1], 0.0);
        assert!(r.max_kkt_violation < 1e-14);
        assert!(r.constraint_residual < 1e-15);
    }

    #[test]
    fn cardinality_examples() {
        assert_eq!(cardinality(&[0.0, 1e-12, 3.0], DEFAULT_CARDINALITY_TOL), 1);
        assert_eq!(cardinality(&[0.0; 4], DEFAULT_CARDINALITY_TOL), 0);
        assert_eq!(cardinality(&[1.0, 2.0, 3.0], 0.0), 3);
    }

    #[test]
    fn reference_lasso_orthonormal() {
        let sol = reference_solve(
            ReferenceProblem::Lasso { lambda: 0.5 },
            &id2(),
            &[3.0, 1.0],
            &ReferenceOptions::default(),
        )
        .unwrap();
        assert!((sol.objective - 1.75).abs() < 1e-4);
        assert!((sol.weights[0] - 2.5).abs() < 1e-3 && (sol.weights[1] - 0.5).abs() < 1e-3);
    }

    #[test]
    fn reference_constrained_without_penalty() {
        // closed form γ = G⁻¹b / (bᵀG⁻¹b); here G = diag(1, 4), b = (3, 2)
        let x = Matrix::from_diag(&[1.0, 2.0]);
        let y = [3.0, 1.0];
        let sol = reference_solve(
            ReferenceProblem::V2Inner {
                lambda: 0.0,
                t: 1.0,
            },
            &x,
            &y,
            &ReferenceOptions::default(),
        )
        .unwrap();
        // G⁻¹b = (3, 0.5), bᵀG⁻¹b = 10
        assert!((sol.weights[0] - 0.3).abs() < 1e-6);
        assert!((sol.weights[1] - 0.05).abs() < 1e-6);
    }

    #[test]
    fn reference_v1_diagonal() {
        let sol = reference_solve(
            ReferenceProblem::V1 {
                lambda: 0.25,
                mu: 0.5,
            },
            &id2(),
            &[1.0, 0.0],
            &ReferenceOptions::default(),
        )
        .unwrap();
        assert!((sol.weights[0] - 1.5).abs() < 1e-4 && sol.weights[1].abs() < 1e-4);
    }

    #[test]
    fn grid_finds_v2_interpolant() {
        let sol = grid_scan(
            ReferenceProblem::V2 { lambda: 0.0 },
            &id2(),
            &[3.0, 1.0],
            GridSpec {
                lo: -4.0,
                hi: 4.0,
                step: 0.01,
            },
        )
        .unwrap();
        assert!(sol.objective.abs() < 1e-12);
        assert!((sol.weights[0] - 3.0).abs() < 1e-9 && (sol.weights[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reference_rejects_oversized_problems() {
        let x = Matrix::zeros(3, 3);
        assert!(matches!(
            grid_scan(
                ReferenceProblem::V2 { lambda: 0.0 },
                &x,
                &[0.0; 3],
                GridSpec::default()
            ),
            Err(DiagnosticsError::TooLarge { .. })
        ));
    }
}
