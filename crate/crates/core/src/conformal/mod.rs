//! Conformal prediction-interval constructors.
//!
//! Generic constructors (split conformal, jackknife conformal, jackknife+)
//! work with any point predictor through a fit-on-dataset / predict-at-point
//! contract. GP-specific constructors use variance-normalized leave-one-out
//! scores `R_i = (Z_i − m_{n,−i}(x_i)) / max(ε, σ^β_{n,−i}(x_i))`:
//!
//! - [`jplus_gp_interval`]: jackknife+ with normalized scores (J+GP);
//! - [`asym_jplus_gp_interval`]: one-sided ranks on signed scores (asymJ+GP);
//! - [`fcp::fcp_gp_interval`]: exact full-conformal set by the closed-form
//!   breakpoint construction (FCP-GP).
//!
//! All order-statistic ranks follow the `⌈α(m+1)⌉` conformal convention,
//! with indices clamped to `[1, n]`.

mod fcp;

pub use fcp::{fcp_gp_interval, FcpProfile};

use crate::error::{Error, Result};
use crate::gp::{Dataset, FittedGP, PointPosterior};

/// A two-sided prediction interval at level α.
///
/// `contiguous` is false only for full-conformal outputs whose exact
/// prediction set is a union of intervals; the bounds then give the convex
/// hull of the set.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionInterval {
    lower: f64,
    upper: f64,
    level: f64,
    contiguous: bool,
}

impl PredictionInterval {
    /// Validates `lower <= upper` (infinities allowed, NaN rejected) and
    /// `level` in (0,1).
    pub fn new(lower: f64, upper: f64, level: f64, contiguous: bool) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(Error::invalid("bounds", "interval bounds must not be NaN"));
        }
        if lower > upper {
            return Err(Error::invalid(
                "bounds",
                format!("lower {lower} exceeds upper {upper}"),
            ));
        }
        if !(level > 0.0 && level < 1.0) {
            return Err(Error::invalid(
                "level",
                format!("must lie in (0,1), got {level}"),
            ));
        }
        Ok(PredictionInterval {
            lower,
            upper,
            level,
            contiguous,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn contiguous(&self) -> bool {
        self.contiguous
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// Closed-interval membership.
    pub fn contains(&self, z: f64) -> bool {
        self.lower <= z && z <= self.upper
    }
}

/// Settings for the normalized non-conformity scores.
#[derive(Debug, Clone, Copy)]
pub struct ScoreConfig {
    /// Variance-sensitivity exponent β (> 0, default 1).
    pub beta: f64,
    /// Stabilizer ε; `None` resolves to `1e−8·√(σ²)` of the model at use
    /// time, keeping scores scale-free.
    pub epsilon: Option<f64>,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            beta: 1.0,
            epsilon: None,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta <= 0.0 || !self.beta.is_finite() {
            return Err(Error::invalid("beta", "must be positive and finite"));
        }
        if let Some(eps) = self.epsilon {
            if eps < 0.0 || !eps.is_finite() {
                return Err(Error::invalid("epsilon", "must be nonnegative and finite"));
            }
        }
        Ok(())
    }

    /// Effective stabilizer for a model with variance σ².
    pub fn effective_epsilon(&self, sigma2: f64) -> f64 {
        self.epsilon.unwrap_or(1e-8 * sigma2.sqrt())
    }

    pub(crate) fn denominator(&self, sd: f64, eps: f64) -> f64 {
        let powered = if self.beta == 1.0 {
            sd
        } else {
            sd.powf(self.beta)
        };
        powered.max(eps)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must lie in (0,1), got {alpha}"),
        ));
    }
    Ok(())
}

/// Tolerance for reading exact-arithmetic ranks off floating-point products.
/// Nominal levels are short decimals, so when `(n+1)·α` lands within 1e-9 of
/// an integer it is that integer mathematically; without the nudge,
/// `⌊20·(1−0.9)⌋` evaluates to 1 instead of 2 and rank symmetries break.
const RANK_EPS: f64 = 1e-9;

pub(crate) fn floor_rank(x: f64) -> usize {
    (x + RANK_EPS).floor().max(0.0) as usize
}

pub(crate) fn ceil_rank(x: f64) -> usize {
    (x - RANK_EPS).ceil().max(0.0) as usize
}

/// Conformal quantile rank `⌈α(m+1)⌉`, at least 1. A result above `m` means
/// the implied quantile is `+∞` (every score accepted); coverage sweeps over
/// a level grid rely on that reading instead of an error.
pub fn conformal_rank(m: usize, alpha: f64) -> usize {
    ceil_rank(alpha * (m as f64 + 1.0)).max(1)
}

/// `⌈α(m+1)⌉`-th order statistic (1-indexed) of `m` scores, the conformal
/// quantile convention. Errors when the rank exceeds `m` (the implied
/// interval would be unbounded).
fn conformal_quantile(sorted: &[f64], alpha: f64) -> Result<f64> {
    let m = sorted.len();
    let rank = conformal_rank(m, alpha);
    if rank > m {
        return Err(Error::CalibrationTooSmall { alpha, n: m });
    }
    Ok(sorted[rank - 1])
}

fn sorted_ascending(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

/// Split-conformal interval: `predictor` must be fitted on a training split
/// disjoint from `calibration`; the interval is `s(x) ± q_α` with `q_α` the
/// conformal quantile of the calibration residuals `|Z_i − s(X_i)|`.
pub fn scp_interval<P>(
    predictor: P,
    calibration: &Dataset,
    x: &[f64],
    alpha: f64,
) -> Result<PredictionInterval>
where
    P: Fn(&[f64]) -> f64,
{
    check_alpha(alpha)?;
    let m = calibration.n();
    let residuals: Vec<f64> = (0..m)
        .map(|i| (calibration.values()[i] - predictor(calibration.point(i))).abs())
        .collect();
    let q = conformal_quantile(&sorted_ascending(residuals), alpha)?;
    let center = predictor(x);
    PredictionInterval::new(center - q, center + q, alpha, true)
}

/// Jackknife-conformal interval: the quantile is taken over leave-one-out
/// residuals of `fit_fn` on `data`; the center is the full-data fit.
pub fn jcp_interval<F, P>(
    data: &Dataset,
    fit_fn: F,
    x: &[f64],
    alpha: f64,
) -> Result<PredictionInterval>
where
    F: Fn(&Dataset) -> Result<P>,
    P: Fn(&[f64]) -> f64,
{
    check_alpha(alpha)?;
    let n = data.n();
    let mut residuals = Vec::with_capacity(n);
    for i in 0..n {
        let fold = data.without(i)?;
        let predictor = fit_fn(&fold)?;
        residuals.push((data.values()[i] - predictor(data.point(i))).abs());
    }
    let q = conformal_quantile(&sorted_ascending(residuals), alpha)?;
    let full = fit_fn(data)?;
    let center = full(x);
    PredictionInterval::new(center - q, center + q, alpha, true)
}

/// Jackknife+ rank pair: `(⌊(n+1)(1−α)⌋, ⌈(n+1)α⌉)`, both clamped to
/// `[1, n]`. Requires `α ≤ n/(n+1)`.
pub fn jplus_ranks(n: usize, alpha: f64) -> Result<(usize, usize)> {
    check_alpha(alpha)?;
    if alpha > n as f64 / (n as f64 + 1.0) {
        return Err(Error::LevelUnachievable { alpha, n });
    }
    Ok(jplus_ranks_clamped(n, alpha))
}

/// [`jplus_ranks`] without the achievability check: past `α = n/(n+1)` the
/// ranks saturate at the extreme order statistics. Coverage sweeps over a
/// full level grid use this to evaluate the widest constructible interval
/// instead of failing.
pub fn jplus_ranks_clamped(n: usize, alpha: f64) -> (usize, usize) {
    let lo = floor_rank((n as f64 + 1.0) * (1.0 - alpha));
    let hi = ceil_rank((n as f64 + 1.0) * alpha);
    (lo.clamp(1, n), hi.clamp(1, n))
}

/// Asymmetric one-sided rank pair `(⌊(1−α)/2·(n+1)⌋, ⌊(1+α)/2·(n+1)⌋)`,
/// clamped to `[1, n]`.
pub fn asym_ranks(n: usize, alpha: f64) -> Result<(usize, usize)> {
    check_alpha(alpha)?;
    let lo = floor_rank((1.0 - alpha) / 2.0 * (n as f64 + 1.0));
    let hi = floor_rank((1.0 + alpha) / 2.0 * (n as f64 + 1.0));
    Ok((lo.clamp(1, n), hi.clamp(1, n)))
}

/// Jackknife+ interval for an arbitrary predictor:
/// `[ξ⁻_(⌊(n+1)(1−α)⌋), ξ⁺_(⌈(n+1)α⌉)]` with `ξ_i^± = s(x; D_{n,−i}) ± R_i`
/// and `R_i = |Z_i − s(X_i; D_{n,−i})|`.
pub fn jplus_interval<F, P>(
    data: &Dataset,
    fit_fn: F,
    x: &[f64],
    alpha: f64,
) -> Result<PredictionInterval>
where
    F: Fn(&Dataset) -> Result<P>,
    P: Fn(&[f64]) -> f64,
{
    let n = data.n();
    let (rank_lo, rank_hi) = jplus_ranks(n, alpha)?;
    let mut xi_lower = Vec::with_capacity(n);
    let mut xi_upper = Vec::with_capacity(n);
    for i in 0..n {
        let fold = data.without(i)?;
        let predictor = fit_fn(&fold)?;
        let residual = (data.values()[i] - predictor(data.point(i))).abs();
        let at_x = predictor(x);
        xi_lower.push(at_x - residual);
        xi_upper.push(at_x + residual);
    }
    let xi_lower = sorted_ascending(xi_lower);
    let xi_upper = sorted_ascending(xi_upper);
    PredictionInterval::new(xi_lower[rank_lo - 1], xi_upper[rank_hi - 1], alpha, true)
}

/// Normalized leave-one-out scores
/// `R_i = (Z_i − m_{n,−i}(x_i)) / max(ε, σ^β_{n,−i}(x_i))`; the absolute
/// value is applied iff `signed` is false.
pub fn gp_loo_scores(model: &FittedGP, cfg: &ScoreConfig, signed: bool) -> Result<Vec<f64>> {
    cfg.validate()?;
    let eps = cfg.effective_epsilon(model.spec().variance());
    Ok(model
        .loo_residuals()
        .iter()
        .zip(model.loo_at_training())
        .map(|(&residual, loo)| {
            let r = residual / cfg.denominator(loo.loo_sd, eps);
            if signed {
                r
            } else {
                r.abs()
            }
        })
        .collect())
}

/// The per-point state of the J+GP constructor: both ξ sequences, sorted
/// ascending. Building the profile once per prediction point lets callers
/// read intervals at many levels by rank lookup.
#[derive(Debug, Clone)]
pub struct JplusGpProfile {
    xi_lower: Vec<f64>,
    xi_upper: Vec<f64>,
}

impl JplusGpProfile {
    pub fn new(model: &FittedGP, cfg: &ScoreConfig, x: &[f64]) -> Result<Self> {
        let posterior = model.loo_predict_all(x)?;
        Self::from_posterior(model, cfg, &posterior)
    }

    /// Build from a precomputed [`PointPosterior`] (shared with other
    /// constructors at the same point).
    pub fn from_posterior(
        model: &FittedGP,
        cfg: &ScoreConfig,
        posterior: &PointPosterior,
    ) -> Result<Self> {
        let scores = gp_loo_scores(model, cfg, false)?;
        let eps = cfg.effective_epsilon(model.spec().variance());
        let n = scores.len();
        let mut xi_lower = Vec::with_capacity(n);
        let mut xi_upper = Vec::with_capacity(n);
        for (score, loo) in scores.iter().zip(&posterior.loo) {
            let spread = score * cfg.denominator(loo.loo_sd, eps);
            xi_lower.push(loo.loo_mean - spread);
            xi_upper.push(loo.loo_mean + spread);
        }
        Ok(JplusGpProfile {
            xi_lower: sorted_ascending(xi_lower),
            xi_upper: sorted_ascending(xi_upper),
        })
    }

    pub fn n(&self) -> usize {
        self.xi_lower.len()
    }

    /// Interval at level α by rank lookup into the sorted sequences.
    pub fn interval(&self, alpha: f64) -> Result<PredictionInterval> {
        let (rank_lo, rank_hi) = jplus_ranks(self.n(), alpha)?;
        PredictionInterval::new(
            self.xi_lower[rank_lo - 1],
            self.xi_upper[rank_hi - 1],
            alpha,
            true,
        )
    }

    /// `(#{ξ⁻_i ≤ z}, #{ξ⁺_i < z})`: with ranks `(r_lo, r_hi)` at some level,
    /// `z` is covered iff `r_lo ≤ counts.0` and `r_hi ≥ counts.1 + 1`.
    pub fn membership_counts(&self, z: f64) -> (usize, usize) {
        let le = self.xi_lower.partition_point(|v| *v <= z);
        let lt = self.xi_upper.partition_point(|v| *v < z);
        (le, lt)
    }
}

/// J+GP interval: jackknife+ built from the normalized GP scores, with
/// ξ sequences `ξ_i^±(x) = m_{n,−i}(x) ± R_i·max(ε, σ^β_{n,−i}(x))`.
pub fn jplus_gp_interval(
    model: &FittedGP,
    cfg: &ScoreConfig,
    x: &[f64],
    alpha: f64,
) -> Result<PredictionInterval> {
    JplusGpProfile::new(model, cfg, x)?.interval(alpha)
}

/// The per-point state of the asymJ+GP constructor: the single sorted
/// sequence `ξ_i(x) = m_{n,−i}(x) + R_i·max(ε, σ_{n,−i}(x))` with signed
/// scores.
#[derive(Debug, Clone)]
pub struct AsymJplusGpProfile {
    xi: Vec<f64>,
}

impl AsymJplusGpProfile {
    pub fn new(model: &FittedGP, cfg: &ScoreConfig, x: &[f64]) -> Result<Self> {
        let posterior = model.loo_predict_all(x)?;
        Self::from_posterior(model, cfg, &posterior)
    }

    pub fn from_posterior(
        model: &FittedGP,
        cfg: &ScoreConfig,
        posterior: &PointPosterior,
    ) -> Result<Self> {
        let scores = gp_loo_scores(model, cfg, true)?;
        let eps = cfg.effective_epsilon(model.spec().variance());
        let xi: Vec<f64> = scores
            .iter()
            .zip(&posterior.loo)
            // The ξ multiplier uses σ itself (β enters the score only).
            .map(|(score, loo)| loo.loo_mean + score * loo.loo_sd.max(eps))
            .collect();
        Ok(AsymJplusGpProfile {
            xi: sorted_ascending(xi),
        })
    }

    pub fn n(&self) -> usize {
        self.xi.len()
    }

    /// Interval `[ξ_(⌊(1−α)/2·(n+1)⌋), ξ_(⌊(1+α)/2·(n+1)⌋)]`.
    pub fn interval(&self, alpha: f64) -> Result<PredictionInterval> {
        let (rank_lo, rank_hi) = asym_ranks(self.n(), alpha)?;
        PredictionInterval::new(self.xi[rank_lo - 1], self.xi[rank_hi - 1], alpha, true)
    }

    /// `(#{ξ_i ≤ z}, #{ξ_i < z})` for rank-based coverage sweeps.
    pub fn membership_counts(&self, z: f64) -> (usize, usize) {
        let le = self.xi.partition_point(|v| *v <= z);
        let lt = self.xi.partition_point(|v| *v < z);
        (le, lt)
    }
}

/// asymJ+GP interval: one-sided ranks on the signed-score sequence, capturing
/// skewed residual distributions.
pub fn asym_jplus_gp_interval(
    model: &FittedGP,
    cfg: &ScoreConfig,
    x: &[f64],
    alpha: f64,
) -> Result<PredictionInterval> {
    AsymJplusGpProfile::new(model, cfg, x)?.interval(alpha)
}
