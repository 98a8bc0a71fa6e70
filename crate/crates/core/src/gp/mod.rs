//! Exact Gaussian-process interpolation with an unknown constant mean
//! (universal kriging), leave-one-out predictors and REML selection.
//!
//! The constant mean is estimated by generalized least squares,
//! `m̂ = (1ᵀK⁻¹Z)/(1ᵀK⁻¹1)`, and the posterior variance includes the
//! corresponding mean-estimation inflation term. Leave-one-out quantities are
//! computed by virtual-LOO algebra from a single factorization of the bordered
//! system `[K 1; 1ᵀ 0]`: with `B = K⁻¹ − K⁻¹1 1ᵀK⁻¹ / (1ᵀK⁻¹1)`,
//!
//! - the LOO residual at a training site is `Z_i − m_{n,−i}(x_i) = α_i/B_ii`
//!   where `α = K⁻¹(Z − m̂·1)`, and `σ²_{n,−i}(x_i) = 1/B_ii − nugget·σ²`
//!   (the refitted model predicts the latent value, so the regularization on
//!   the Gram diagonal is subtracted back out);
//! - at an arbitrary point `x` with full-model kriging weights `λ(x)`,
//!   `m_{n,−i}(x) = m_n(x) − λ_i(x)·(α_i/B_ii)` and
//!   `σ²_{n,−i}(x) = σ²_n(x) + λ_i(x)²/B_ii`.
//!
//! Both identities are exact linear algebra for the nugget-regularized kernel
//! matrix, and the test suite checks them against brute-force refits.

mod optim;
mod reml;

pub use reml::{reml_select, restricted_log_likelihood, SearchConfig};

use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::conformal::PredictionInterval;
use crate::error::{Error, Result};
use crate::kernel::{covariance, gram_matrix, CovarianceSpec};
use crate::linalg::Cholesky;
use crate::stats::{std_normal_cdf, std_normal_quantile};

/// Design points and noise-free observations `(x_i, Z_i)`.
#[derive(Debug, Clone)]
pub struct Dataset {
    points: Array2<f64>,
    values: Array1<f64>,
}

impl Dataset {
    /// Validates: at least two observations, matching shapes, finite entries,
    /// and pairwise-distinct design points (the noise-free kernel matrix is
    /// singular otherwise).
    pub fn new(points: Array2<f64>, values: Array1<f64>) -> Result<Self> {
        let n = points.nrows();
        if n < 2 {
            return Err(Error::invalid(
                "points",
                format!("need at least 2 design points, got {n}"),
            ));
        }
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: values.len(),
            });
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("points", "all coordinates must be finite"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "all observations must be finite"));
        }
        for i in 0..n {
            for j in 0..i {
                if points.row(i) == points.row(j) {
                    return Err(Error::DuplicatePoint { i: j, j: i });
                }
            }
        }
        Ok(Dataset { points, values })
    }

    pub fn n(&self) -> usize {
        self.points.nrows()
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &Array2<f64> {
        &self.points
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    /// Row `i` as a slice.
    pub fn point(&self, i: usize) -> &[f64] {
        self.points
            .row(i)
            .to_slice()
            .expect("design matrix rows are contiguous")
    }

    /// Copy of the dataset with observation `i` removed (jackknife folds).
    pub fn without(&self, i: usize) -> Result<Dataset> {
        let n = self.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        if n <= 2 {
            return Err(Error::invalid(
                "points",
                "cannot drop an observation from a 2-point dataset",
            ));
        }
        let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let points = self.points.select(ndarray::Axis(0), &keep);
        let values = self.values.select(ndarray::Axis(0), &keep);
        Ok(Dataset { points, values })
    }
}

/// Posterior mean and standard deviation of a leave-one-out predictor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LooPrediction {
    pub loo_mean: f64,
    pub loo_sd: f64,
}

/// Full posterior and all n leave-one-out posteriors evaluated at one point.
#[derive(Debug, Clone)]
pub struct PointPosterior {
    /// Posterior mean `m_n(x)` of the full model.
    pub mean: f64,
    /// Posterior standard deviation `σ_n(x)` of the full model.
    pub sd: f64,
    /// `(m_{n,−i}(x), σ_{n,−i}(x))` for each left-out index `i`.
    pub loo: Vec<LooPrediction>,
}

/// Immutable fitted GP interpolator: factorized kernel matrix, GLS mean and
/// cached leave-one-out quantities.
#[derive(Debug, Clone)]
pub struct FittedGP {
    spec: CovarianceSpec,
    data: Dataset,
    nugget: f64,
    chol: Cholesky,
    mean_hat: f64,
    /// α = K⁻¹(Z − m̂·1)
    alpha_weights: Array1<f64>,
    /// K⁻¹Z (cached for the full-conformal rank-one updates)
    pub(crate) z_weights: Array1<f64>,
    /// w = K⁻¹1
    pub(crate) ones_weights: Array1<f64>,
    /// s11 = 1ᵀK⁻¹1
    pub(crate) ones_quad: f64,
    /// diag(K⁻¹)
    pub(crate) kinv_diag: Array1<f64>,
    /// B_ii = (K⁻¹)_ii − w_i²/s11 (reciprocal LOO variances)
    pub(crate) bordered_diag: Array1<f64>,
    /// e_i = Z_i − m_{n,−i}(x_i) = α_i/B_ii
    loo_residuals: Vec<f64>,
    loo: Vec<LooPrediction>,
}

/// Condition a GP with the given covariance on a dataset.
///
/// `nugget` is relative to σ² (the Gram diagonal receives `nugget·σ²`); use
/// [`crate::DEFAULT_NUGGET`] unless there is a reason not to.
pub fn fit(spec: &CovarianceSpec, data: &Dataset, nugget: f64) -> Result<FittedGP> {
    if data.dim() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            actual: data.dim(),
        });
    }
    let n = data.n();
    let k = gram_matrix(spec, data.points(), nugget)?;
    let chol = Cholesky::factor(&k)?;

    let ones = Array1::<f64>::ones(n);
    let w = chol.solve(&ones);
    let s11 = w.sum();
    if s11 <= 0.0 || !s11.is_finite() {
        return Err(Error::Numerical(format!(
            "ill-conditioned kernel matrix: 1ᵀK⁻¹1 = {s11}"
        )));
    }
    let z_weights = chol.solve(data.values());
    let mean_hat = w.dot(data.values()) / s11;
    let alpha_weights = &z_weights - &(mean_hat * &w);

    let kinv_diag = chol.inverse_diag();
    let diag_shift = nugget * spec.variance();
    let mut bordered_diag = Array1::<f64>::zeros(n);
    let mut loo_residuals = Vec::with_capacity(n);
    let mut loo = Vec::with_capacity(n);
    for i in 0..n {
        let b = kinv_diag[i] - w[i] * w[i] / s11;
        if b <= 0.0 || !b.is_finite() {
            return Err(Error::Numerical(format!(
                "degenerate leave-one-out geometry at point {i}: B_ii = {b}"
            )));
        }
        bordered_diag[i] = b;
        let residual = alpha_weights[i] / b;
        loo_residuals.push(residual);
        loo.push(LooPrediction {
            loo_mean: data.values()[i] - residual,
            loo_sd: (1.0 / b - diag_shift).max(0.0).sqrt(),
        });
    }

    Ok(FittedGP {
        spec: spec.clone(),
        data: data.clone(),
        nugget,
        chol,
        mean_hat,
        alpha_weights,
        z_weights,
        ones_weights: w,
        ones_quad: s11,
        kinv_diag,
        bordered_diag,
        loo_residuals,
        loo,
    })
}

/// Intermediate quantities of one posterior evaluation, shared by the
/// prediction and leave-one-out paths.
pub(crate) struct CrossSolve {
    /// Cross-covariance vector k(x).
    pub cross: Array1<f64>,
    /// v = K⁻¹k(x).
    pub v: Array1<f64>,
    /// wᵀk(x).
    pub wc: f64,
    /// m_n(x).
    pub mean: f64,
    /// σ²_n(x), clamped at 0.
    pub var: f64,
}

impl FittedGP {
    pub fn spec(&self) -> &CovarianceSpec {
        &self.spec
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn nugget(&self) -> f64 {
        self.nugget
    }

    /// GLS estimate of the constant mean, `(1ᵀK⁻¹Z)/(1ᵀK⁻¹1)`.
    pub fn mean_hat(&self) -> f64 {
        self.mean_hat
    }

    /// Kriging weights α = K⁻¹(Z − m̂·1).
    pub fn alpha_weights(&self) -> &Array1<f64> {
        &self.alpha_weights
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.spec.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    pub(crate) fn cross_covariances(&self, x: &[f64]) -> Result<Array1<f64>> {
        let n = self.data.n();
        let mut c = Array1::<f64>::zeros(n);
        for i in 0..n {
            c[i] = covariance(&self.spec, x, self.data.point(i))?;
        }
        Ok(c)
    }

    pub(crate) fn cross_solve(&self, x: &[f64]) -> Result<CrossSolve> {
        self.check_dim(x)?;
        let cross = self.cross_covariances(x)?;
        let v = self.chol.solve(&cross);
        let wc = self.ones_weights.dot(&cross);
        let mean = self.mean_hat + self.alpha_weights.dot(&cross);
        let sigma2 = self.spec.variance();
        let var = (sigma2 - cross.dot(&v) + (1.0 - wc) * (1.0 - wc) / self.ones_quad).max(0.0);
        Ok(CrossSolve {
            cross,
            v,
            wc,
            mean,
            var,
        })
    }

    /// Posterior mean `m_n(x) = m̂ + k(x)ᵀα`.
    pub fn posterior_mean(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let cross = self.cross_covariances(x)?;
        Ok(self.mean_hat + self.alpha_weights.dot(&cross))
    }

    /// Posterior standard deviation, including the mean-estimation inflation:
    /// `σ²_n(x) = k(x,x) − k(x)ᵀK⁻¹k(x) + (1 − 1ᵀK⁻¹k(x))²/(1ᵀK⁻¹1)`,
    /// clamped at 0.
    pub fn posterior_sd(&self, x: &[f64]) -> Result<f64> {
        Ok(self.cross_solve(x)?.var.sqrt())
    }

    /// Posterior mean and standard deviation in one solve.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        let cs = self.cross_solve(x)?;
        Ok((cs.mean, cs.var.sqrt()))
    }

    /// Leave-one-out posteriors at the training sites (cached at fit time):
    /// entry `i` is the prediction at `x_i` of the model refit without
    /// `(x_i, Z_i)` (same covariance, re-estimated GLS mean).
    pub fn loo_at_training(&self) -> &[LooPrediction] {
        &self.loo
    }

    /// Leave-one-out residuals `Z_i − m_{n,−i}(x_i)`.
    pub fn loo_residuals(&self) -> &[f64] {
        &self.loo_residuals
    }

    /// Prediction at `x` from the model excluding observation `i`.
    pub fn loo_predict(&self, i: usize, x: &[f64]) -> Result<LooPrediction> {
        let n = self.data.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
        let cs = self.cross_solve(x)?;
        let mu_x = (cs.wc - 1.0) / self.ones_quad;
        Ok(self.loo_from_solve(&cs, mu_x, i))
    }

    /// Full posterior and all n leave-one-out posteriors at `x`, from a
    /// single O(n²) solve.
    pub fn loo_predict_all(&self, x: &[f64]) -> Result<PointPosterior> {
        let cs = self.cross_solve(x)?;
        let mu_x = (cs.wc - 1.0) / self.ones_quad;
        let loo = (0..self.data.n())
            .map(|i| self.loo_from_solve(&cs, mu_x, i))
            .collect();
        Ok(PointPosterior {
            mean: cs.mean,
            sd: cs.var.sqrt(),
            loo,
        })
    }

    fn loo_from_solve(&self, cs: &CrossSolve, mu_x: f64, i: usize) -> LooPrediction {
        // Kriging weight of observation i in the full-model prediction at x.
        let lambda_i = cs.v[i] - mu_x * self.ones_weights[i];
        let loo_mean = cs.mean - lambda_i * self.loo_residuals[i];
        let loo_var = cs.var + lambda_i * lambda_i / self.bordered_diag[i];
        LooPrediction {
            loo_mean,
            loo_sd: loo_var.sqrt(),
        }
    }

    /// Reconstruction of the factorized kernel matrix (model invariant and
    /// diagnostics).
    pub fn gram_reconstructed(&self) -> Array2<f64> {
        self.chol.reconstruct()
    }
}

/// Two-sided Gaussian posterior interval
/// `[m_n(x) + Φ⁻¹((1−α)/2)·σ_n(x), m_n(x) + Φ⁻¹((1+α)/2)·σ_n(x)]`.
pub fn gaussian_interval(model: &FittedGP, x: &[f64], alpha: f64) -> Result<PredictionInterval> {
    let (mean, sd) = model.predict(x)?;
    gaussian_interval_from(mean, sd, alpha)
}

/// [`gaussian_interval`] from an already-computed posterior `(mean, sd)`,
/// for callers that cache posteriors across many levels or points.
pub fn gaussian_interval_from(mean: f64, sd: f64, alpha: f64) -> Result<PredictionInterval> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must lie in (0,1), got {alpha}"),
        ));
    }
    let half = std_normal_quantile((1.0 + alpha) / 2.0) * sd;
    PredictionInterval::new(mean - half, mean + half, alpha, true)
}

/// Smallest level α at which the central Gaussian interval around
/// `(mean, sd)` covers `z`: `2Φ(|z − mean|/sd) − 1`. Returns 0 when `z`
/// equals the mean and 1 when `sd = 0` with `z` off-center, so coverage
/// sweeps can compare the result against any level grid.
pub fn gaussian_minimal_level(mean: f64, sd: f64, z: f64) -> f64 {
    let gap = (z - mean).abs();
    if gap == 0.0 {
        return 0.0;
    }
    if sd <= 0.0 {
        return 1.0;
    }
    (2.0 * std_normal_cdf(gap / sd) - 1.0).clamp(0.0, 1.0)
}

/// Draw one sample path of the prior `GP(mean, k_spec)` restricted to
/// `points` (jointly, one multivariate normal draw). Deterministic in `seed`.
pub fn sample_path(
    spec: &CovarianceSpec,
    points: &Array2<f64>,
    mean: f64,
    nugget: f64,
    seed: u64,
) -> Result<Array1<f64>> {
    let k = gram_matrix(spec, points, nugget)?;
    let chol = Cholesky::factor(&k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eta = Array1::from_iter((0..points.nrows()).map(|_| {
        let v: f64 = StandardNormal.sample(&mut rng);
        v
    }));
    Ok(chol.mul_lower(&eta) + mean)
}
