//! Dense complex linear algebra on top of `faer`: parallel block filling,
//! LU factorization with a 1-norm condition estimate, residual checks.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Mat, MatMut, MatRef};
use rayon::prelude::*;

use crate::C64;

/// Fill `dst[(i, j)] = f(i, j)`, one column per task.
pub fn fill_columns<F>(dst: MatMut<'_, C64>, f: F)
where
    F: Fn(usize, usize) -> C64 + Sync,
{
    dst.par_col_iter_mut().enumerate().for_each(|(j, col)| {
        for (i, v) in col.iter_mut().enumerate() {
            *v = f(i, j);
        }
    });
}

/// Build an `nrows × ncols` matrix from an entry function.
pub fn build_matrix<F>(nrows: usize, ncols: usize, f: F) -> Mat<C64>
where
    F: Fn(usize, usize) -> C64 + Sync,
{
    let mut m = Mat::<C64>::zeros(nrows, ncols);
    fill_columns(m.as_mut(), f);
    m
}

/// `dst += alpha * src`.
pub fn add_scaled(mut dst: MatMut<'_, C64>, alpha: C64, src: MatRef<'_, C64>) {
    assert_eq!(dst.nrows(), src.nrows());
    assert_eq!(dst.ncols(), src.ncols());
    for j in 0..src.ncols() {
        for i in 0..src.nrows() {
            dst[(i, j)] += alpha * src[(i, j)];
        }
    }
}

pub fn matvec(a: MatRef<'_, C64>, x: &[C64]) -> Vec<C64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![C64::new(0.0, 0.0); a.nrows()];
    for (j, xj) in x.iter().enumerate() {
        if *xj == C64::new(0.0, 0.0) {
            continue;
        }
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += a[(i, j)] * xj;
        }
    }
    y
}

pub fn norm1(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).sum()
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn matrix_norm1(a: MatRef<'_, C64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// LU factorization with partial pivoting and a condition estimate.
pub struct LuFactors {
    lu: PartialPivLu<C64>,
    n: usize,
    norm1: f64,
    condition: f64,
}

impl LuFactors {
    pub fn new(a: MatRef<'_, C64>) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "LU needs a square matrix");
        let n = a.nrows();
        let norm1 = matrix_norm1(a);
        let lu = a.partial_piv_lu();
        let mut f = LuFactors {
            lu,
            n,
            norm1,
            condition: f64::NAN,
        };
        f.condition = f.norm1 * f.inverse_norm1_estimate();
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Estimate of `‖A‖₁ ‖A⁻¹‖₁`; infinite or NaN for a numerically singular matrix.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let mut b = Mat::<C64>::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_in_place(b.as_mut());
        (0..self.n).map(|i| b[(i, 0)]).collect()
    }

    fn solve_adjoint(&self, rhs: &[C64]) -> Vec<C64> {
        let mut b = Mat::<C64>::from_fn(self.n, 1, |i, _| rhs[i]);
        self.lu.solve_adjoint_in_place(b.as_mut());
        (0..self.n).map(|i| b[(i, 0)]).collect()
    }

    /// Solve for every column of `rhs`.
    pub fn solve_columns(&self, rhs: MatRef<'_, C64>) -> Mat<C64> {
        let mut b = rhs.to_owned();
        self.lu.solve_in_place(b.as_mut());
        b
    }

    /// Hager–Higham estimator for `‖A⁻¹‖₁`.
    fn inverse_norm1_estimate(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut estimate = 0.0;
        let mut last_j = usize::MAX;
        for iteration in 0..5 {
            let y = self.solve(&x);
            let ny = norm1(&y);
            if !ny.is_finite() {
                return f64::INFINITY;
            }
            if iteration > 0 && ny <= estimate {
                break;
            }
            estimate = ny;
            let xi: Vec<C64> = y
                .iter()
                .map(|v| {
                    let a = v.norm();
                    if a == 0.0 {
                        C64::new(1.0, 0.0)
                    } else {
                        v / a
                    }
                })
                .collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .map(|(i, v)| (i, v.norm()))
                .fold((0, -1.0), |acc, e| if e.1 > acc.1 { e } else { acc });
            let ztx: f64 = z.iter().zip(&x).map(|(zi, xi)| (zi.conj() * xi).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![C64::new(0.0, 0.0); n];
            x[j] = C64::new(1.0, 0.0);
        }
        // alternating test vector guards against the estimator's blind spots
        let alt: Vec<C64> = (0..n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
                C64::new(sign * (1.0 + i as f64 / denom), 0.0)
            })
            .collect();
        let alt_est = 2.0 * norm1(&self.solve(&alt)) / (3.0 * n as f64);
        estimate.max(alt_est)
    }
}

/// `‖A x - b‖₂ / ‖b‖₂` (or the absolute residual when `b = 0`).
pub fn relative_residual(a: MatRef<'_, C64>, x: &[C64], b: &[C64]) -> f64 {
    let ax = matvec(a, x);
    let r: Vec<C64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let nb = norm2(b);
    if nb == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / nb
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_estimates_condition_of_diagonal_matrix() {
        let a = build_matrix(4, 4, |i, j| {
            if i == j {
                C64::new(10f64.powi(i as i32), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let f = LuFactors::new(a.as_ref());
        assert!((f.condition_estimate() - 1e3).abs() < 1e-9);
        let b = vec![C64::new(1.0, 1.0); 4];
        let x = f.solve(&b);
        assert!(relative_residual(a.as_ref(), &x, &b) < 1e-15);
    }

    #[test]
    fn condition_estimate_is_close_to_exact_value() {
        // 2x2 with known inverse
        let a = build_matrix(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(1.0, 0.0),
            (0, 1) => C64::new(2.0, 0.0),
            (1, 0) => C64::new(3.0, 0.0),
            _ => C64::new(4.0, 1.0),
        });
        let f = LuFactors::new(a.as_ref());
        // inverse = 1/(-2+i) [[4+i, -2], [-3, 1]]
        let det = C64::new(-2.0, 1.0);
        let inv_norm1 = ((C64::new(4.0, 1.0) / det).norm() + (3.0 / det.norm()))
            .max(2.0 / det.norm() + 1.0 / det.norm());
        let a_norm1 = (1.0f64 + 3.0).max(2.0 + C64::new(4.0, 1.0).norm());
        let exact = a_norm1 * inv_norm1;
        let est = f.condition_estimate();
        assert!(
            est <= exact * (1.0 + 1e-12) && est >= exact / 3.0,
            "{est} {exact}"
        );
    }

    #[test]
    fn singular_matrix_has_huge_condition() {
        let a = build_matrix(3, 3, |i, j| C64::new((i + j) as f64, 0.0));
        let f = LuFactors::new(a.as_ref());
        let c = f.condition_estimate();
        assert!(!(c < 1e14), "{c}");
    }
}
