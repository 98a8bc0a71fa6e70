//! Exact full-conformal prediction sets for GP interpolators (FCP-GP).
//!
//! For a candidate value `z` at a prediction point `x`, full conformal
//! augments the data with `(x, z)`, computes the normalized leave-one-out
//! score of every observation of the augmented model, and accepts `z` when
//! the candidate's score rank `γ(z)` is at most `⌈α(n+1)⌉`. Refitting per
//! candidate is quadratic work per `z`; this module instead updates the
//! factorized full-data model to the augmented one in closed form.
//!
//! Writing `M⁺` for the augmented bordered system and
//! `B⁺ = K⁺⁻¹ − w⁺w⁺ᵀ/s11⁺` (the leave-one-out operator of the augmented
//! model), every score is an affine function of `z` over a fixed denominator:
//!
//! ```text
//! R_i(z)   = |a_i + b_i·z| / d_i,   a_i = [B⁺ Z⁰]_i / B⁺_ii,  b_i = B⁺_ic / B⁺_ii
//! R_cand(z) = |a_c + z| / d_c,      a_c = [B⁺ Z⁰]_c / B⁺_cc  (≈ −m_n(x))
//! ```
//!
//! with `Z⁰ = [Z; 0]`, `c` the candidate index and
//! `d_j = max(ε, (1/B⁺_jj)^{β/2})`. The rank function
//! `γ(z) = 1 + Σ_i 1{R_i(z) ≤ R_cand(z)}` is then piecewise constant with
//! breakpoints at the roots of `(a_i + b_i·z)d_c ∓ (a_c + z)d_i`, and the
//! acceptance region at any level is read off by evaluating γ once per piece.
//! All augmented quantities come from rank-one updates of the stored
//! factorization, so building a profile costs one `O(n²)` solve.

use crate::conformal::{PredictionInterval, ScoreConfig};
use crate::error::{Error, Result};
use crate::gp::FittedGP;

/// The exact full-conformal score profile at one prediction point: affine
/// score coefficients, sorted breakpoints of the rank function γ, and γ on
/// every piece.
#[derive(Debug, Clone)]
pub struct FcpProfile {
    /// Number of training observations n (the augmented model has n+1).
    n_train: usize,
    /// Posterior mean of the full model at x (diagnostic; γ(m_n(x)) = 1).
    center: f64,
    /// Training-score numerator intercepts a_i.
    num_a: Vec<f64>,
    /// Training-score numerator slopes b_i.
    num_b: Vec<f64>,
    /// Training-score denominators d_i.
    den: Vec<f64>,
    /// Candidate-score intercept a_c (the slope is 1).
    cand_a: f64,
    /// Candidate-score denominator d_c.
    cand_den: f64,
    /// Sorted, deduplicated breakpoints of γ.
    breaks: Vec<f64>,
    /// γ on each open segment between consecutive breakpoints
    /// (`breaks.len() + 1` entries, outermost segments unbounded).
    seg_gamma: Vec<usize>,
    /// γ at each breakpoint (ties hold with equality there, so
    /// `point_gamma[j] ≥ max` of the adjacent segment values).
    point_gamma: Vec<usize>,
}

impl FcpProfile {
    /// Build the profile of `model` at `x`.
    ///
    /// Errors if `x` coincides with a training site (the augmented kernel
    /// matrix is singular; `DuplicatePoint { i, j: n }` names the clashing
    /// training index) or if the augmented system degenerates numerically.
    pub fn new(model: &FittedGP, cfg: &ScoreConfig, x: &[f64]) -> Result<Self> {
        cfg.validate()?;
        let data = model.data();
        let n = data.n();
        for i in 0..n {
            if data.point(i) == x {
                return Err(Error::DuplicatePoint { i, j: n });
            }
        }

        let sigma2 = model.spec().variance();
        let eps = cfg.effective_epsilon(sigma2);
        let cs = model.cross_solve(x)?;
        let kxx = sigma2 * (1.0 + model.nugget());

        // Schur complement of K in the augmented kernel matrix.
        let schur = kxx - cs.cross.dot(&cs.v);
        if schur <= 0.0 || !schur.is_finite() {
            return Err(Error::Numerical(format!(
                "augmented kernel matrix is numerically singular at the \
                 prediction point (schur complement {schur})"
            )));
        }

        let t = cs.wc; // wᵀk(x)
        let q = cs.cross.dot(&model.z_weights); // k(x)ᵀK⁻¹Z
        let s11 = model.ones_quad;
        let wz = model.ones_weights.dot(data.values());
        // The refitted fold predicts the latent value, so its variance is
        // 1/B_ii minus the Gram-diagonal regularization.
        let diag_shift = model.nugget() * sigma2;

        // Augmented w⁺ = K⁺⁻¹1, its quadratic form, and K⁺⁻¹[Z; 0].
        let w_cand = (1.0 - t) / schur;
        let s11_plus = s11 + (1.0 - t) * (1.0 - t) / schur;
        let zcoef_cand = -q / schur;
        let wz_plus = wz + (t - 1.0) * q / schur;

        let mut num_a = Vec::with_capacity(n);
        let mut num_b = Vec::with_capacity(n);
        let mut den = Vec::with_capacity(n);
        for i in 0..n {
            let vi = cs.v[i];
            let w_plus = model.ones_weights[i] + vi * (t - 1.0) / schur;
            let kinv_plus = model.kinv_diag[i] + vi * vi / schur;
            let b_ii = kinv_plus - w_plus * w_plus / s11_plus;
            if b_ii <= 0.0 || !b_ii.is_finite() {
                return Err(Error::Numerical(format!(
                    "degenerate leave-one-out geometry in the augmented \
                     model at point {i}: B_ii = {b_ii}"
                )));
            }
            let zcoef = model.z_weights[i] + vi * q / schur;
            let bz0 = zcoef - w_plus * wz_plus / s11_plus;
            let b_ic = -vi / schur - w_plus * w_cand / s11_plus;
            num_a.push(bz0 / b_ii);
            num_b.push(b_ic / b_ii);
            den.push(cfg.denominator(((1.0 / b_ii - diag_shift).max(0.0)).sqrt(), eps));
        }

        let b_cc = 1.0 / schur - w_cand * w_cand / s11_plus;
        if b_cc <= 0.0 || !b_cc.is_finite() {
            return Err(Error::Numerical(format!(
                "degenerate candidate geometry in the augmented model: \
                 B_cc = {b_cc}"
            )));
        }
        let bz0_cand = zcoef_cand - w_cand * wz_plus / s11_plus;
        let cand_a = bz0_cand / b_cc;
        let cand_den = cfg.denominator(((1.0 / b_cc - diag_shift).max(0.0)).sqrt(), eps);

        let mut profile = FcpProfile {
            n_train: n,
            center: cs.mean,
            num_a,
            num_b,
            den,
            cand_a,
            cand_den,
            breaks: Vec::new(),
            seg_gamma: Vec::new(),
            point_gamma: Vec::new(),
        };
        profile.build_breakpoints();
        Ok(profile)
    }

    /// The condition `R_i(z) ≤ R_cand(z)` is `(F−G)(F+G) ≤ 0` for the affine
    /// functions `F = (a_i + b_i z)·d_c`, `G = (a_c + z)·d_i`; its indicator
    /// can only switch at their roots.
    fn build_breakpoints(&mut self) {
        let mut breaks = Vec::with_capacity(2 * self.n_train);
        for i in 0..self.n_train {
            let f0 = self.num_a[i] * self.cand_den;
            let f1 = self.num_b[i] * self.cand_den;
            let g0 = self.cand_a * self.den[i];
            let g1 = self.den[i];
            for (c0, c1) in [(f0 - g0, f1 - g1), (f0 + g0, f1 + g1)] {
                if c1 != 0.0 {
                    let root = -c0 / c1;
                    if root.is_finite() {
                        breaks.push(root);
                    }
                }
            }
        }
        breaks.sort_by(|a, b| a.total_cmp(b));
        breaks.dedup();
        self.breaks = breaks;

        let k = self.breaks.len();
        let mut seg_gamma = Vec::with_capacity(k + 1);
        let mut point_gamma = Vec::with_capacity(k);
        if k == 0 {
            seg_gamma.push(self.gamma_at(self.center));
        } else {
            let b0 = self.breaks[0];
            seg_gamma.push(self.gamma_at(b0 - 1.0 - 0.5 * b0.abs()));
            for j in 1..k {
                let (lo, hi) = (self.breaks[j - 1], self.breaks[j]);
                let mut mid = lo + 0.5 * (hi - lo);
                if !(lo < mid && mid < hi) {
                    // Segment narrower than fp resolution: treat as its
                    // left endpoint.
                    mid = lo;
                }
                seg_gamma.push(self.gamma_at(mid));
            }
            let bk = self.breaks[k - 1];
            seg_gamma.push(self.gamma_at(bk + 1.0 + 0.5 * bk.abs()));
            for (j, &b) in self.breaks.iter().enumerate() {
                // Exactly at a breakpoint the switching condition holds with
                // equality, so γ(b) ≥ γ on both adjacent segments; evaluating
                // the indicator at the computed root can lose that tie to
                // rounding, hence the explicit max.
                let exact = self.gamma_at(b);
                point_gamma.push(exact.max(seg_gamma[j]).max(seg_gamma[j + 1]));
            }
        }
        self.seg_gamma = seg_gamma;
        self.point_gamma = point_gamma;
    }

    /// Number of training observations.
    pub fn n(&self) -> usize {
        self.n_train
    }

    /// Posterior mean of the full model at the profiled point. Always an
    /// accepted candidate: `γ(m_n(x)) = 1` up to score ties.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Rank threshold `⌈α(n+1)⌉` for this profile's training size.
    pub fn rank_threshold(&self, alpha: f64) -> usize {
        crate::conformal::ceil_rank(alpha * (self.n_train as f64 + 1.0))
    }

    /// Rank `γ(z)` of the candidate score among all n+1 augmented scores
    /// (1 = strictly smallest).
    pub fn gamma_at(&self, z: f64) -> usize {
        let g_val = self.cand_a + z;
        let mut gamma = 1usize;
        for i in 0..self.n_train {
            let f = (self.num_a[i] + self.num_b[i] * z) * self.cand_den;
            let g = g_val * self.den[i];
            if (f - g) * (f + g) <= 0.0 {
                gamma += 1;
            }
        }
        gamma
    }

    /// Whether `z` belongs to the level-α acceptance set.
    pub fn covered(&self, z: f64, alpha: f64) -> bool {
        self.gamma_at(z) <= self.rank_threshold(alpha)
    }

    /// Maximal sub-intervals of the acceptance set `{z : γ(z) ≤ ⌈α(n+1)⌉}`,
    /// as closed `(lower, upper)` pairs with infinite outer endpoints when
    /// the set is unbounded. Breakpoints where only the boundary value of γ
    /// exceeds the threshold (score ties) are absorbed into the closure.
    pub fn pieces(&self, alpha: f64) -> Result<Vec<(f64, f64)>> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must lie in (0,1), got {alpha}"),
            ));
        }
        let rank = self.rank_threshold(alpha);
        let k = self.breaks.len();
        let mut pieces = Vec::new();
        let mut run_start: Option<usize> = None;
        for j in 0..=k {
            if self.seg_gamma[j] <= rank {
                if run_start.is_none() {
                    run_start = Some(j);
                }
            } else if let Some(start) = run_start.take() {
                pieces.push(self.run_to_piece(start, j - 1));
            }
        }
        if let Some(start) = run_start {
            pieces.push(self.run_to_piece(start, k));
        }
        if pieces.is_empty() {
            // γ(m_n(x)) = 1 ≤ rank for every α, so some segment always
            // qualifies; reaching this means the profile degenerated.
            return Err(Error::Numerical(
                "empty full-conformal acceptance set".to_string(),
            ));
        }
        Ok(pieces)
    }

    fn run_to_piece(&self, first_seg: usize, last_seg: usize) -> (f64, f64) {
        let lower = if first_seg == 0 {
            f64::NEG_INFINITY
        } else {
            self.breaks[first_seg - 1]
        };
        let upper = if last_seg == self.breaks.len() {
            f64::INFINITY
        } else {
            self.breaks[last_seg]
        };
        (lower, upper)
    }

    /// Convex hull of the acceptance set as a [`PredictionInterval`];
    /// `contiguous` is false when the set has more than one piece.
    pub fn interval(&self, alpha: f64) -> Result<PredictionInterval> {
        let pieces = self.pieces(alpha)?;
        let lower = pieces[0].0;
        let upper = pieces[pieces.len() - 1].1;
        PredictionInterval::new(lower, upper, alpha, pieces.len() == 1)
    }

    /// γ at each breakpoint, aligned with [`Self::breakpoints`].
    pub fn breakpoint_gammas(&self) -> &[usize] {
        &self.point_gamma
    }

    /// Sorted breakpoints of the rank function.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }
}

/// FCP-GP interval: convex hull of the exact full-conformal acceptance set
/// at level α, flagged non-contiguous when the set splits.
pub fn fcp_gp_interval(
    model: &FittedGP,
    cfg: &ScoreConfig,
    x: &[f64],
    alpha: f64,
) -> Result<PredictionInterval> {
    FcpProfile::new(model, cfg, x)?.interval(alpha)
}
