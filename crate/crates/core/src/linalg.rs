//! Small dense symmetric positive-definite solver used by the GP core.
//!
//! The factorization is written out explicitly (rather than delegated to an
//! external solver) so that a failure can report the exact pivot index, which
//! the conditioning-error contract of [`crate::gp::fit`] requires. The
//! routines are validated in the test suite against an independent dense
//! linear-algebra library.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor `L` of a symmetric positive-definite
/// matrix `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub(crate) struct Cholesky {
    n: usize,
    l: Array2<f64>,
}

impl Cholesky {
    /// Factor a symmetric matrix. Only the lower triangle of `a` is read.
    ///
    /// Fails with [`Error::NotPositiveDefinite`] carrying the index of the
    /// first non-positive pivot.
    pub fn factor(a: &Array2<f64>) -> Result<Self> {
        let n = a.nrows();
        debug_assert_eq!(n, a.ncols());
        let mut l = Array2::<f64>::zeros((n, n));
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { n, l })
    }

    /// Solve `A x = b` via the two triangular solves.
    pub fn solve(&self, b: &Array1<f64>) -> Array1<f64> {
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, x: &mut Array1<f64>) {
        let n = self.n;
        // L y = b (forward)
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= self.l[(i, k)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        // Lᵀ x = y (backward)
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
    }

    /// `log det A = 2 Σ log L_ii`.
    pub fn log_det(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            s += self.l[(i, i)].ln();
        }
        2.0 * s
    }

    /// Diagonal of `A⁻¹`, computed from the columns of `L⁻¹`
    /// (`(A⁻¹)_ii = Σ_k (L⁻¹)_ki²`).
    #[allow(clippy::needless_range_loop)] // index recurrence over L and y
    pub fn inverse_diag(&self) -> Array1<f64> {
        let n = self.n;
        let mut diag = Array1::<f64>::zeros(n);
        // Column j of L⁻¹ solves L y = e_j; only rows >= j are nonzero.
        let mut y = vec![0.0; n];
        for j in 0..n {
            for yi in y.iter_mut() {
                *yi = 0.0;
            }
            y[j] = 1.0 / self.l[(j, j)];
            for i in (j + 1)..n {
                let mut s = 0.0;
                for k in j..i {
                    s -= self.l[(i, k)] * y[k];
                }
                y[i] = s / self.l[(i, i)];
            }
            // (A⁻¹)_jj is the squared norm of column j.
            diag[j] = y[j..].iter().map(|v| v * v).sum();
        }
        diag
    }

    /// `L x` (used to draw correlated Gaussian vectors).
    pub fn mul_lower(&self, x: &Array1<f64>) -> Array1<f64> {
        let n = self.n;
        let mut y = Array1::<f64>::zeros(n);
        for i in 0..n {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.l[(i, k)] * x[k];
            }
            y[i] = s;
        }
        y
    }

    /// Reconstruct `A = L Lᵀ` (used by model invariants and tests).
    pub fn reconstruct(&self) -> Array2<f64> {
        let n = self.n;
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..=j {
                    s += self.l[(i, k)] * self.l[(j, k)];
                }
                a[(i, j)] = s;
                a[(j, i)] = s;
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;

    fn spd_3x3() -> Array2<f64> {
        // A = M Mᵀ + I for a fixed 3x3 M, symmetric positive definite.
        array![[6.0, 2.0, 1.0], [2.0, 5.0, 2.0], [1.0, 2.0, 4.0]]
    }

    #[test]
    fn solve_matches_nalgebra() {
        let a = spd_3x3();
        let b = Array1::from(vec![1.0, -2.0, 0.5]);
        let chol = Cholesky::factor(&a).unwrap();
        let x = chol.solve(&b);

        let na = nalgebra::DMatrix::from_fn(3, 3, |i, j| a[(i, j)]);
        let nb = nalgebra::DVector::from_vec(b.to_vec());
        let nx = na.clone().cholesky().unwrap().solve(&nb);
        for i in 0..3 {
            assert_relative_eq!(x[i], nx[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn log_det_matches_nalgebra() {
        let a = spd_3x3();
        let chol = Cholesky::factor(&a).unwrap();
        let na = nalgebra::DMatrix::from_fn(3, 3, |i, j| a[(i, j)]);
        let det = na.determinant();
        assert_relative_eq!(chol.log_det(), det.ln(), max_relative = 1e-12);
    }

    #[test]
    fn inverse_diag_matches_nalgebra() {
        let a = spd_3x3();
        let chol = Cholesky::factor(&a).unwrap();
        let diag = chol.inverse_diag();
        let na = nalgebra::DMatrix::from_fn(3, 3, |i, j| a[(i, j)]);
        let inv = na.try_inverse().unwrap();
        for i in 0..3 {
            assert_relative_eq!(diag[i], inv[(i, i)], max_relative = 1e-12);
        }
    }

    #[test]
    fn reports_failing_pivot() {
        // Indefinite matrix: fails at pivot 1 (second diagonal entry after
        // elimination is negative).
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        match Cholesky::factor(&a) {
            Err(Error::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    #[test]
    fn reconstructs_input() {
        let a = spd_3x3();
        let chol = Cholesky::factor(&a).unwrap();
        let r = chol.reconstruct();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(r[(i, j)], a[(i, j)], max_relative = 1e-14);
            }
        }
    }
}
