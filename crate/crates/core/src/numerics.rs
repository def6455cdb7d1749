//! Dense linear algebra and scalar root finding used by the solvers.
//!
//! Vectors are plain `Vec<f64>` / `&[f64]`; the [`Matrix`] type stores
//! entries row-major. Sizes in this crate stay in the hundreds, so nothing
//! here is blocked or vectorised beyond what the compiler does on its own.

use thiserror::Error;

/// Default residual target for [`solve_spd`].
pub const DEFAULT_SOLVE_TOL: f64 = 1e-8;
/// Default tolerance for [`bisect_root`].
pub const DEFAULT_BISECT_TOL: f64 = 1e-10;
/// Default relative tolerance for [`spectral_norm_sym`].
pub const DEFAULT_POWER_TOL: f64 = 1e-8;
/// Default iteration cap for [`spectral_norm_sym`].
pub const DEFAULT_POWER_MAX_ITER: usize = 100_000;
/// Symmetry tolerance accepted by [`spectral_norm_sym`].
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symmetric: |a[{row}][{col}] - a[{col}][{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("matrix is not positive definite: pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error(
        "power iteration did not converge in {iterations} iterations (last estimate {estimate:e})"
    )]
    NoConvergence { iterations: usize, estimate: f64 },
    #[error("no sign change on [{lo}, {hi}]: g(lo) = {g_lo:e}, g(hi) = {g_hi:e}")]
    Bracket {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Dense row-major matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(NumericsError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFinite(pos));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(NumericsError::Dimension(format!(
                "row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    /// `A v`
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `A^T v`
    pub fn tr_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows, "tr_matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, self.row(i), &mut out);
            }
        }
        out
    }

    /// `A^T A`
    pub fn gram(&self) -> Matrix {
        let d = self.cols;
        let mut g = Matrix::zeros(d, d);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..d {
                let ra = r[a];
                if ra == 0.0 {
                    continue;
                }
                let grow = &mut g.data[a * d..(a + 1) * d];
                for b in a..d {
                    grow[b] += ra * r[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                g.data[a * d + b] = g.data[b * d + a];
            }
        }
        g
    }

    /// Adds `alpha * u v^T` in place.
    pub fn add_outer(&mut self, alpha: f64, u: &[f64], v: &[f64]) {
        assert_eq!(u.len(), self.rows);
        assert_eq!(v.len(), self.cols);
        for (i, &ui) in u.iter().enumerate() {
            let row = &mut self.data[i * self.cols..(i + 1) * self.cols];
            axpy(alpha * ui, v, row);
        }
    }

    /// Adds `alpha` to every diagonal entry.
    pub fn add_diagonal(&mut self, alpha: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self.data[i * self.cols + i] += alpha;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Copy of rows `start..end`.
    pub fn row_block(&self, start: usize, end: usize) -> Matrix {
        Matrix {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    /// Copy of the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            let r = self.row(i);
            data.extend(cols.iter().map(|&j| r[j]));
        }
        Matrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    /// Returns the first index pair whose asymmetry exceeds `tol`, if any.
    fn asymmetry(&self, tol: f64) -> Option<(usize, usize, f64)> {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let gap = (self.get(i, j) - self.get(j, i)).abs();
                if gap > tol {
                    return Some((i, j, gap));
                }
            }
        }
        None
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(v: &[f64], alpha: f64) -> Vec<f64> {
    v.iter().map(|x| alpha * x).collect()
}

/// `‖a - b‖₂`
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Entrywise `sign(v) * max(|v| - tau, 0)`.
pub fn soft_threshold(v: &[f64], tau: f64) -> Vec<f64> {
    v.iter().map(|&x| soft_threshold_scalar(x, tau)).collect()
}

pub fn soft_threshold_scalar(x: f64, tau: f64) -> f64 {
    debug_assert!(tau >= 0.0);
    let m = x.abs() - tau;
    if m > 0.0 {
        m.copysign(x)
    } else {
        0.0
    }
}

/// Stopping rule and iteration cap for [`spectral_norm_sym`].
#[derive(Debug, Clone, Copy)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_POWER_TOL,
            max_iter: DEFAULT_POWER_MAX_ITER,
        }
    }
}

/// Largest absolute eigenvalue of a symmetric matrix by power iteration.
///
/// Starts from the normalised all-ones vector. When that start turns out to
/// be orthogonal to the dominant eigenspace (the iterate collapses to zero,
/// or the converged value sits below the `‖A‖_F / √n` lower bound on the
/// spectral radius) the iteration restarts once from the all-ones vector with
/// index 0 doubled.
pub fn spectral_norm_sym(a: &Matrix, opts: PowerOptions) -> Result<f64> {
    if !a.is_square() {
        return Err(NumericsError::Dimension(format!(
            "spectral norm of a non-square {}x{} matrix",
            a.rows, a.cols
        )));
    }
    if let Some((row, col, gap)) = a.asymmetry(SYMMETRY_TOL) {
        return Err(NumericsError::NotSymmetric { row, col, gap });
    }
    let n = a.rows;
    if n == 0 {
        return Ok(0.0);
    }
    let fro = a.frobenius_norm();
    if fro == 0.0 {
        return Ok(0.0);
    }
    let lower_bound = fro / (n as f64).sqrt();

    let mut start = vec![1.0; n];
    let first = power_iterate(a, &start, opts)?;
    if let Some(est) = first {
        if est >= lower_bound * (1.0 - 1e-6) {
            return Ok(est);
        }
    }
    start[0] = 2.0;
    match power_iterate(a, &start, opts)? {
        Some(est) => Ok(est),
        None => Err(NumericsError::NoConvergence {
            iterations: opts.max_iter,
            estimate: 0.0,
        }),
    }
}

/// Returns `None` when the iterate collapses to the zero vector.
fn power_iterate(a: &Matrix, start: &[f64], opts: PowerOptions) -> Result<Option<f64>> {
    let mut v = start.to_vec();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let tiny = a.frobenius_norm() * f64::EPSILON;
    let mut estimate = 0.0;
    for _ in 0..opts.max_iter {
        let av = a.matvec(&v);
        let next = norm2(&av);
        if next <= tiny {
            return Ok(None);
        }
        let change = (next - estimate).abs();
        estimate = next;
        v = scale(&av, 1.0 / next);
        if change <= opts.tol * next {
            return Ok(Some(estimate));
        }
    }
    Err(NumericsError::NoConvergence {
        iterations: opts.max_iter,
        estimate,
    })
}

/// Cholesky factor `A = L L^T` of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(NumericsError::Dimension(format!(
                "Cholesky of a non-square {}x{} matrix",
                a.rows, a.cols
            )));
        }
        let n = a.rows;
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut diag = a.get(j, j);
            for k in 0..j {
                diag -= l[j * n + k] * l[j * n + k];
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(NumericsError::NotPositiveDefinite {
                    pivot: j,
                    value: diag,
                });
            }
            let ljj = diag.sqrt();
            l[j * n + j] = ljj;
            for i in (j + 1)..n {
                let s = a.get(i, j) - dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                l[i * n + j] = s / ljj;
            }
        }
        Ok(Self { n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(NumericsError::Dimension(format!(
                "right-hand side of length {} for a {n}x{n} system",
                b.len()
            )));
        }
        let l = &self.lower;
        let mut z = b.to_vec();
        for i in 0..n {
            let s = dot(&l[i * n..i * n + i], &z[..i]);
            z[i] = (z[i] - s) / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * z[k];
            }
            z[i] = s / l[i * n + i];
        }
        Ok(z)
    }
}

/// Solves `A x = b` for symmetric positive-definite `A` via Cholesky.
pub fn solve_spd(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.rows {
        return Err(NumericsError::Dimension(format!(
            "right-hand side of length {} for a {}x{} system",
            b.len(),
            a.rows,
            a.cols
        )));
    }
    Cholesky::factor(a)?.solve(b)
}

/// Bisection on a sign-changing bracket.
///
/// Returns the first midpoint `r` with `|g(r)| <= tol`, or the midpoint of
/// the final bracket once its width drops to `tol` (or stops shrinking in
/// floating point).
pub fn bisect_root<F>(g: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let g_lo = g(lo);
    let g_hi = g(hi);
    if !(lo < hi) || !(g_lo * g_hi < 0.0) {
        if g_lo == 0.0 {
            return Ok(lo);
        }
        if g_hi == 0.0 {
            return Ok(hi);
        }
        return Err(NumericsError::Bracket { lo, hi, g_lo, g_hi });
    }
    let lo_negative = g_lo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.abs() <= tol || hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if (gm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}
