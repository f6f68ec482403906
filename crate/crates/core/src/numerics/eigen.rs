use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::NumericsError;

/// Smallest eigenpair of the symmetric-definite pencil `A v = μ B v`.
///
/// Reduces to standard form with the Cholesky factor of `B` and solves the
/// dense symmetric problem (Householder tridiagonalization + implicit QR).
/// The eigenvector is scaled so that its last entry is one when that entry
/// is nonzero, and to unit `B`-norm otherwise.
pub fn smallest_generalized_eigenpair(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
) -> Result<(f64, DVector<f64>), NumericsError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n || n == 0 {
        return Err(NumericsError::DimensionMismatch(format!(
            "A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let chol = b
        .clone()
        .cholesky()
        .ok_or(NumericsError::NotPositiveDefinite)?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(a)
        .ok_or(NumericsError::NotPositiveDefinite)?;
    let mut c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(NumericsError::NotPositiveDefinite)?;
    c = (&c + c.transpose()) * 0.5;

    let eig = SymmetricEigen::new(c);
    let (imin, mu) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let y = eig.eigenvectors.column(imin).into_owned();
    let mut v = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(NumericsError::NotPositiveDefinite)?;
    normalize_surface(v.as_mut_slice(), |s| {
        let bv = b * DVector::from_column_slice(s);
        DVector::from_column_slice(s).dot(&bv)
    });
    Ok((mu, v))
}

fn normalize_surface<F: Fn(&[f64]) -> f64>(v: &mut [f64], b_norm_sq: F) {
    let last = *v.last().unwrap();
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if last.abs() > 1e-12 * max {
        1.0 / last
    } else {
        1.0 / b_norm_sq(v).sqrt()
    };
    v.iter_mut().for_each(|x| *x *= scale);
}

/// A symmetric tridiagonal pencil `(A, B)` with `B` positive definite, as
/// produced by piecewise-linear finite elements in one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagPencil {
    pub a_diag: Vec<f64>,
    pub a_off: Vec<f64>,
    pub b_diag: Vec<f64>,
    pub b_off: Vec<f64>,
}

impl SymTridiagPencil {
    pub fn new(
        a_diag: Vec<f64>,
        a_off: Vec<f64>,
        b_diag: Vec<f64>,
        b_off: Vec<f64>,
    ) -> Result<Self, NumericsError> {
        let n = a_diag.len();
        if n == 0 || b_diag.len() != n || a_off.len() + 1 != n || b_off.len() + 1 != n {
            return Err(NumericsError::DimensionMismatch(format!(
                "diagonals {n}/{}, off-diagonals {}/{}",
                b_diag.len(),
                a_off.len(),
                b_off.len()
            )));
        }
        let pencil = Self {
            a_diag,
            a_off,
            b_diag,
            b_off,
        };
        // B must factor with positive pivots.
        let mut pivot = pencil.b_diag[0];
        for i in 1..n {
            if !(pivot > 0.0) {
                return Err(NumericsError::NotPositiveDefinite);
            }
            pivot = pencil.b_diag[i] - pencil.b_off[i - 1].powi(2) / pivot;
        }
        if !(pivot > 0.0) {
            return Err(NumericsError::NotPositiveDefinite);
        }
        Ok(pencil)
    }

    pub fn dim(&self) -> usize {
        self.a_diag.len()
    }

    /// Number of eigenvalues strictly below `sigma` (Sylvester inertia of
    /// `A − σB`).
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.dim();
        let mut count = 0;
        let mut pivot = 0.0;
        for i in 0..n {
            let diag = self.a_diag[i] - sigma * self.b_diag[i];
            pivot = if i == 0 {
                diag
            } else {
                let off = self.a_off[i - 1] - sigma * self.b_off[i - 1];
                diag - off * off / pivot
            };
            if pivot == 0.0 {
                pivot = -f64::EPSILON * diag.abs().max(f64::MIN_POSITIVE);
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn apply_a(&self, v: &[f64]) -> Vec<f64> {
        tridiag_mul(&self.a_diag, &self.a_off, v)
    }

    pub fn apply_b(&self, v: &[f64]) -> Vec<f64> {
        tridiag_mul(&self.b_diag, &self.b_off, v)
    }

    pub fn quotient(&self, v: &[f64]) -> f64 {
        dot(v, &self.apply_a(v)) / dot(v, &self.apply_b(v))
    }

    /// Smallest eigenpair: Sturm-count bisection for the eigenvalue, then
    /// inverse iteration with a shift just below it. The returned eigenvalue
    /// is the Rayleigh quotient of the returned vector.
    pub fn smallest_eigenpair(&self) -> Result<(f64, Vec<f64>), NumericsError> {
        let scale = self
            .a_diag
            .iter()
            .zip(&self.b_diag)
            .map(|(a, b)| (a / b).abs())
            .fold(1.0f64, f64::max);
        let mut lo = -scale;
        let mut expansions = 0;
        while self.count_below(lo) > 0 {
            lo *= 2.0;
            expansions += 1;
            if expansions > 200 {
                return Err(NumericsError::InvalidInput("unbounded spectrum".into()));
            }
        }
        let mut hi = scale;
        while self.count_below(hi) == 0 {
            hi *= 2.0;
            expansions += 1;
            if expansions > 400 {
                return Err(NumericsError::InvalidInput("unbounded spectrum".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        // Stay just below the eigenvalue, beyond the resolution of the
        // inertia count, so that A − σB is positive definite.
        let mut gap = (hi - lo).max(1e-12 * lo.abs().max(1.0));
        let mut shift = lo - gap;
        while self.count_below(shift) > 0 {
            gap *= 2.0;
            shift = lo - gap;
        }

        let mut v = self.inverse_iteration(shift);
        while !(v.iter().all(|x| x.is_finite()) && self.quotient(&v).is_finite()) {
            // shift too close to the eigenvalue for the solve to stay finite
            gap *= 16.0;
            if gap > scale {
                return Err(NumericsError::InvalidInput("inverse iteration diverged".into()));
            }
            v = self.inverse_iteration(lo - gap);
        }
        normalize_surface(&mut v, |s| dot(s, &self.apply_b(s)));
        Ok((self.quotient(&v), v))
    }

    fn inverse_iteration(&self, shift: f64) -> Vec<f64> {
        let mut v = vec![1.0; self.dim()];
        let mut previous = f64::INFINITY;
        for _ in 0..20 {
            let rhs = self.apply_b(&v);
            v = self.solve_shifted(shift, &rhs);
            let norm = dot(&v, &self.apply_b(&v)).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            let q = self.quotient(&v);
            if !q.is_finite() || (q - previous).abs() <= 1e-15 * q.abs().max(1.0) {
                break;
            }
            previous = q;
        }
        v
    }

    fn solve_shifted(&self, sigma: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut diag: Vec<f64> = (0..n)
            .map(|i| self.a_diag[i] - sigma * self.b_diag[i])
            .collect();
        let off: Vec<f64> = (0..n - 1)
            .map(|i| self.a_off[i] - sigma * self.b_off[i])
            .collect();
        let mut y = rhs.to_vec();
        for i in 1..n {
            let w = off[i - 1] / diag[i - 1];
            diag[i] -= w * off[i - 1];
            y[i] -= w * y[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / diag[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - off[i] * x[i + 1]) / diag[i];
        }
        x
    }
}

fn tridiag_mul(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut s = diag[i] * v[i];
            if i > 0 {
                s += off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += off[i] * v[i + 1];
            }
            s
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
