//! Anisotropic half-integer Matérn covariance.
//!
//! The regularity is parameterized by a positive integer `p` with
//! `ν = p + 1/2`, for which the Matérn correlation has the closed form
//!
//! ```text
//! κ_ν(h) = exp(−√(2ν)·h) · (p!/(2p)!) · Σ_{k=0}^{p} (p+k)!/(k!(p−k)!) · (2√(2ν)·h)^{p−k}
//! ```
//!
//! The anisotropic covariance applies the correlation to the scaled distance
//! `√(Σ_i (x_i−y_i)²/ρ_i²)` and multiplies by the variance σ².

use ndarray::Array2;

use crate::error::{Error, Result};

/// Relative jitter added to the Gram diagonal by default (`1e−10 · σ²`).
///
/// Noise-free interpolation kernels are numerically near-singular when design
/// points are close; a tiny relative nugget keeps the factorization stable
/// without visibly perturbing predictions.
pub const DEFAULT_NUGGET: f64 = 1e-10;

/// Matérn hyperparameters: variance σ², per-dimension lengthscales ρ, and
/// half-integer regularity ν = p + 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSpec {
    variance: f64,
    lengthscales: Vec<f64>,
    regularity_p: usize,
}

impl CovarianceSpec {
    /// Validates: `variance > 0`, every lengthscale `> 0` (all finite), and
    /// `regularity_p >= 1`.
    pub fn new(variance: f64, lengthscales: Vec<f64>, regularity_p: usize) -> Result<Self> {
        if variance <= 0.0 || !variance.is_finite() {
            return Err(Error::invalid(
                "variance",
                format!("must be positive and finite, got {variance}"),
            ));
        }
        if lengthscales.is_empty() {
            return Err(Error::EmptyInput("lengthscales"));
        }
        for (i, &rho) in lengthscales.iter().enumerate() {
            if rho <= 0.0 || !rho.is_finite() {
                return Err(Error::invalid(
                    "lengthscales",
                    format!("entry {i} must be positive and finite, got {rho}"),
                ));
            }
        }
        if regularity_p < 1 {
            return Err(Error::invalid("regularity_p", "must be >= 1"));
        }
        Ok(CovarianceSpec {
            variance,
            lengthscales,
            regularity_p,
        })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn regularity_p(&self) -> usize {
        self.regularity_p
    }

    /// Smoothness ν = p + 1/2.
    pub fn nu(&self) -> f64 {
        self.regularity_p as f64 + 0.5
    }

    /// Input dimension d.
    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }

    /// Scaled Euclidean distance `√(Σ (x_i−y_i)²/ρ_i²)`.
    ///
    /// Differences are divided by ρ_i before squaring so that tiny
    /// lengthscales do not overflow the intermediate squares.
    fn scaled_distance(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for ((xi, yi), rho) in x.iter().zip(y).zip(&self.lengthscales) {
            let t = (xi - yi) / rho;
            s += t * t;
        }
        s.sqrt()
    }
}

/// Matérn correlation κ_ν(h) for ν = p + 1/2, via the half-integer closed
/// form. Equals 1 at h = 0, strictly decreases in h and vanishes as h → ∞.
pub fn matern_correlation(h: f64, p: usize) -> Result<f64> {
    if h.is_nan() || h < 0.0 {
        return Err(Error::invalid(
            "h",
            format!("must be a nonnegative real, got {h}"),
        ));
    }
    if p < 1 {
        return Err(Error::invalid("p", "must be >= 1"));
    }
    // Integer coefficients a_k = (p+k)!/(k!(p−k)!), built by the exact
    // multiplicative recurrence; normalizing by a_p = (2p)!/p! folds the
    // (p!/(2p)!) prefactor in and makes κ(0) exactly 1.
    let mut coeffs = Vec::with_capacity(p + 1);
    let mut a = 1.0_f64; // a_0 = p!/(0!·p!) = 1
    coeffs.push(a);
    for k in 0..p {
        a = a * ((p + k + 1) as f64) * ((p - k) as f64) / ((k + 1) as f64);
        coeffs.push(a);
    }
    let a_p = coeffs[p];

    let scale = ((2 * p + 1) as f64).sqrt(); // √(2ν)
    let t = 2.0 * scale * h;
    // Horner evaluation of Σ_k a_k t^{p−k} (descending powers of t).
    let mut poly = coeffs[0];
    for &c in &coeffs[1..] {
        poly = poly * t + c;
    }
    Ok((-scale * h).exp() * poly / a_p)
}

/// Anisotropic Matérn covariance `σ²·κ_ν(√(Σ (x_i−y_i)²/ρ_i²))`.
pub fn covariance(spec: &CovarianceSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    let d = spec.dim();
    if x.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: x.len(),
        });
    }
    if y.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: y.len(),
        });
    }
    let h = spec.scaled_distance(x, y);
    Ok(spec.variance * matern_correlation(h, spec.regularity_p)?)
}

/// Kernel matrix of a point set, with `nugget·σ²` added on the diagonal.
///
/// `points` is n×d (one design site per row). The result is symmetric by
/// construction and positive definite for pairwise-distinct rows and
/// `nugget > 0`.
pub fn gram_matrix(
    spec: &CovarianceSpec,
    points: &Array2<f64>,
    nugget: f64,
) -> Result<Array2<f64>> {
    if nugget < 0.0 || !nugget.is_finite() {
        return Err(Error::invalid(
            "nugget",
            format!("must be nonnegative and finite, got {nugget}"),
        ));
    }
    let n = points.nrows();
    if n == 0 {
        return Err(Error::EmptyInput("points"));
    }
    if points.ncols() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: points.ncols(),
        });
    }
    let mut k = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        let xi = points.row(i);
        k[(i, i)] = spec.variance * (1.0 + nugget);
        for j in 0..i {
            let v = covariance(
                spec,
                xi.as_slice().expect("row is contiguous"),
                points.row(j).as_slice().expect("row is contiguous"),
            )?;
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}
