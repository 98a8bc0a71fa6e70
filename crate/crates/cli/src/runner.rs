//! Experiment orchestration: the calibration benchmark over repetitions and
//! the hyperparameter-robustness (Pareto) scatter.
//!
//! Determinism: repetition r derives everything from `base_seed + r`;
//! repetitions run as independent jobs whose results are collected in index
//! order and then sorted by `(function, method, p, repetition)`, so the
//! output is byte-identical across runs and thread counts.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use ndarray::{s, Array1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gpcp_core::conformal::{
    asym_ranks, conformal_rank, jplus_ranks, jplus_ranks_clamped, AsymJplusGpProfile, FcpProfile,
    JplusGpProfile, ScoreConfig,
};
use gpcp_core::gp::{
    fit, gaussian_interval_from, gaussian_minimal_level, reml_select, Dataset, FittedGP,
    PointPosterior, SearchConfig,
};
use gpcp_core::metrics::{default_alpha_grid, iae, rmse};
use gpcp_core::testbed::{get_function, TestFunction};
use gpcp_core::{exec, CovarianceSpec, DEFAULT_NUGGET};

use crate::config::{ExperimentConfig, MethodTag, ParetoConfig};
use crate::emit::{ParetoRow, RunRecord};

/// Outcome of [`run_benchmark`]: sorted records plus diagnostics.
#[derive(Debug)]
pub struct BenchReport {
    /// One record per (method, p, repetition), sorted by
    /// `(function, method, p, repetition)`.
    pub records: Vec<RunRecord>,
    /// Per-(method, p) means in a plain-text table.
    pub summary: String,
    /// One warning line per failed repetition (REML/conditioning failures).
    pub warnings: Vec<String>,
    pub failed_jobs: usize,
    pub total_jobs: usize,
}

/// Outcome of [`run_pareto`].
#[derive(Debug)]
pub struct ParetoReport {
    /// REML row, J+GP row, then one row per successful hyperparameter draw
    /// in draw order.
    pub rows: Vec<ParetoRow>,
    /// Number of draws dropped because conditioning failed.
    pub skipped: usize,
    pub summary: String,
}

/// Run the calibration benchmark. `timing` enables wall-clock measurement
/// per record; it is off by default so outputs stay byte-deterministic.
pub fn run_benchmark(config: &ExperimentConfig, timing: bool) -> Result<BenchReport> {
    config.validate()?;
    let grid = default_alpha_grid(config.iae_grid_size);

    let mut jobs = Vec::with_capacity(config.p_values.len() * config.repetitions);
    for &p in &config.p_values {
        for rep in 0..config.repetitions {
            jobs.push((p, rep));
        }
    }
    let total_jobs = jobs.len();

    let outcomes = exec::map_slice(&jobs, |&(p, rep)| run_job(config, &grid, p, rep, timing));

    let mut records = Vec::with_capacity(total_jobs * config.methods.len());
    let mut warnings = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(mut rs) => records.append(&mut rs),
            Err(warning) => warnings.push(warning),
        }
    }
    let failed_jobs = warnings.len();
    if 5 * failed_jobs > total_jobs {
        bail!(
            "{failed_jobs} of {total_jobs} repetitions failed (more than 20%):\n{}",
            warnings.join("\n")
        );
    }
    records.sort_by(|a, b| {
        a.function
            .cmp(&b.function)
            .then(a.method.cmp(&b.method))
            .then(a.p.cmp(&b.p))
            .then(a.repetition.cmp(&b.repetition))
    });
    let summary = summarize(config, &records);
    Ok(BenchReport {
        records,
        summary,
        warnings,
        failed_jobs,
        total_jobs,
    })
}

/// One repetition at one regularity index; failures become a warning line.
fn run_job(
    config: &ExperimentConfig,
    grid: &[f64],
    p: usize,
    rep: usize,
    timing: bool,
) -> std::result::Result<Vec<RunRecord>, String> {
    let seed = config.base_seed + rep as u64;
    compute_job(config, grid, p, rep, seed, timing).map_err(|e| {
        format!(
            "warning: skipping {} p={p} repetition={rep} (seed {seed}): {e:#}",
            config.function
        )
    })
}

/// Evaluation design shared by every method of one repetition.
struct JobData {
    data: Dataset,
    test_rows: Vec<Vec<f64>>,
    z_test: Vec<f64>,
}

fn sample_job_data(
    function: &TestFunction,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<JobData> {
    let total = n_train + n_test;
    let points = function.sample_uniform(total, seed)?;
    let values = function.eval_rows(&points)?;
    let data = Dataset::new(
        points.slice(s![..n_train, ..]).to_owned(),
        Array1::from_vec(values[..n_train].to_vec()),
    )?;
    let test_rows = points
        .slice(s![n_train.., ..])
        .outer_iter()
        .map(|row| row.to_vec())
        .collect();
    Ok(JobData {
        data,
        test_rows,
        z_test: values[n_train..].to_vec(),
    })
}

fn compute_job(
    config: &ExperimentConfig,
    grid: &[f64],
    p: usize,
    rep: usize,
    seed: u64,
    timing: bool,
) -> Result<Vec<RunRecord>> {
    let function = get_function(&config.function)?;
    let job = sample_job_data(&function, config.n_train, config.n_test, seed)?;

    let spec = reml_select(&job.data, p, &SearchConfig::default())
        .context("REML covariance selection failed")?;
    let model = fit(&spec, &job.data, DEFAULT_NUGGET).context("GP conditioning failed")?;
    let score_cfg = ScoreConfig {
        beta: config.beta,
        epsilon: None,
    };
    score_cfg.validate()?;

    // Full and leave-one-out posteriors at every test point, shared across
    // methods. All GP-centered methods read their point predictions from
    // `posts[j].mean`, which makes the RMSE column identical across them by
    // construction (conformal correction reshapes intervals, not centers).
    let posts = job
        .test_rows
        .iter()
        .map(|x| model.loo_predict_all(x))
        .collect::<gpcp_core::Result<Vec<PointPosterior>>>()?;
    let gp_means: Vec<f64> = posts.iter().map(|ps| ps.mean).collect();
    let rmse_gp = rmse(&gp_means, &job.z_test)?;

    let mut records = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let start = Instant::now();
        let (metrics, method_rmse) = match method {
            MethodTag::GaussianReml => (
                gaussian_sweep(&posts, &job.z_test, config.alpha, grid)?,
                rmse_gp,
            ),
            MethodTag::FcpGp => (
                fcp_sweep(
                    &model,
                    &score_cfg,
                    &job.test_rows,
                    &job.z_test,
                    config.alpha,
                    grid,
                )?,
                rmse_gp,
            ),
            MethodTag::JplusGp => (
                jplus_gp_sweep(&model, &score_cfg, &posts, &job.z_test, config.alpha, grid)?,
                rmse_gp,
            ),
            MethodTag::AsymJplusGp => (
                asym_jplus_gp_sweep(&model, &score_cfg, &posts, &job.z_test, config.alpha, grid)?,
                rmse_gp,
            ),
            MethodTag::Scp => scp_sweep(&model, &job, config.alpha, grid)?,
            MethodTag::Jcp => (
                jcp_sweep(&model, &gp_means, &job.z_test, config.alpha, grid)?,
                rmse_gp,
            ),
            MethodTag::Jplus => (
                jplus_sweep(&model, &posts, &job.z_test, config.alpha, grid)?,
                rmse_gp,
            ),
        };
        let wall_time_s = if timing {
            start.elapsed().as_secs_f64()
        } else {
            0.0
        };
        records.push(RunRecord {
            function: config.function.clone(),
            method,
            p,
            repetition: rep,
            seed,
            coverage: metrics.coverage,
            mean_width: metrics.mean_width,
            iae: metrics.iae,
            rmse: method_rmse,
            wall_time_s,
        });
    }
    Ok(records)
}

/// Coverage at the nominal level, mean width there, and IAE over the grid.
struct SweepMetrics {
    coverage: f64,
    mean_width: f64,
    iae: f64,
}

/// Empirical coverage curve from per-point minimal covering levels: point j
/// is covered at level α iff `mins[j] ≤ α`.
fn curve_from_minimal_levels(mut mins: Vec<f64>, grid: &[f64]) -> Vec<f64> {
    mins.sort_by(f64::total_cmp);
    let m = mins.len() as f64;
    grid.iter()
        .map(|&a| mins.partition_point(|t| *t <= a) as f64 / m)
        .collect()
}

fn gaussian_sweep(
    posts: &[PointPosterior],
    z_test: &[f64],
    alpha: f64,
    grid: &[f64],
) -> Result<SweepMetrics> {
    let m = z_test.len();
    let mut covered = 0usize;
    let mut width_sum = 0.0;
    let mut mins = Vec::with_capacity(m);
    for (ps, &z) in posts.iter().zip(z_test) {
        let interval = gaussian_interval_from(ps.mean, ps.sd, alpha)?;
        if interval.contains(z) {
            covered += 1;
        }
        width_sum += interval.width();
        mins.push(gaussian_minimal_level(ps.mean, ps.sd, z));
    }
    let curve = curve_from_minimal_levels(mins, grid);
    Ok(SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_sum / m as f64,
        iae: iae(grid, &curve)?,
    })
}

fn fcp_sweep(
    model: &FittedGP,
    score_cfg: &ScoreConfig,
    test_rows: &[Vec<f64>],
    z_test: &[f64],
    alpha: f64,
    grid: &[f64],
) -> Result<SweepMetrics> {
    let n = model.data().n();
    let m = z_test.len();
    let mut covered = 0usize;
    let mut width_sum = 0.0;
    let mut gammas = Vec::with_capacity(m);
    for (x, &z) in test_rows.iter().zip(z_test) {
        let profile = FcpProfile::new(model, score_cfg, x)?;
        // Coverage counts membership in the acceptance *set*; the reported
        // width is that of its interval hull.
        if profile.covered(z, alpha) {
            covered += 1;
        }
        width_sum += profile.interval(alpha)?.width();
        gammas.push(profile.gamma_at(z));
    }
    gammas.sort_unstable();
    let curve: Vec<f64> = grid
        .iter()
        .map(|&a| {
            let threshold = conformal_rank(n, a);
            gammas.partition_point(|&g| g <= threshold) as f64 / m as f64
        })
        .collect();
    Ok(SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_sum / m as f64,
        iae: iae(grid, &curve)?,
    })
}

/// Shared order-statistic sweep for the three jackknife+-style constructors.
/// `counts[j] = (c_le, c_lt)` and level-α ranks `(r_lo, r_hi)` cover point j
/// iff `r_lo ≤ c_le` and `r_hi ≥ c_lt + 1`.
fn jackknife_plus_curve(counts: &[(usize, usize)], n: usize, grid: &[f64], asym: bool) -> Vec<f64> {
    let m = counts.len() as f64;
    grid.iter()
        .map(|&a| {
            let (r_lo, r_hi) = if asym {
                asym_ranks(n, a).expect("grid level lies in (0,1)")
            } else {
                jplus_ranks_clamped(n, a)
            };
            let hits = counts
                .iter()
                .filter(|&&(c_le, c_lt)| r_lo <= c_le && r_hi > c_lt)
                .count();
            hits as f64 / m
        })
        .collect()
}

fn jplus_gp_sweep(
    model: &FittedGP,
    score_cfg: &ScoreConfig,
    posts: &[PointPosterior],
    z_test: &[f64],
    alpha: f64,
    grid: &[f64],
) -> Result<SweepMetrics> {
    let n = model.data().n();
    let (r_lo, r_hi) = jplus_ranks(n, alpha)?;
    let m = z_test.len();
    let mut covered = 0usize;
    let mut width_sum = 0.0;
    let mut counts = Vec::with_capacity(m);
    for (ps, &z) in posts.iter().zip(z_test) {
        let profile = JplusGpProfile::from_posterior(model, score_cfg, ps)?;
        let (c_le, c_lt) = profile.membership_counts(z);
        if r_lo <= c_le && r_hi > c_lt {
            covered += 1;
        }
        // Below α = 1/2 the jackknife+ band can be empty (the rank pair
        // crosses); an empty set has width 0.
        width_sum += profile.interval(alpha).map_or(0.0, |iv| iv.width());
        counts.push((c_le, c_lt));
    }
    let curve = jackknife_plus_curve(&counts, n, grid, false);
    Ok(SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_sum / m as f64,
        iae: iae(grid, &curve)?,
    })
}

fn asym_jplus_gp_sweep(
    model: &FittedGP,
    score_cfg: &ScoreConfig,
    posts: &[PointPosterior],
    z_test: &[f64],
    alpha: f64,
    grid: &[f64],
) -> Result<SweepMetrics> {
    let n = model.data().n();
    let (r_lo, r_hi) = asym_ranks(n, alpha)?;
    let m = z_test.len();
    let mut covered = 0usize;
    let mut width_sum = 0.0;
    let mut counts = Vec::with_capacity(m);
    for (ps, &z) in posts.iter().zip(z_test) {
        let profile = AsymJplusGpProfile::from_posterior(model, score_cfg, ps)?;
        let (c_le, c_lt) = profile.membership_counts(z);
        if r_lo <= c_le && r_hi > c_lt {
            covered += 1;
        }
        width_sum += profile.interval(alpha)?.width();
        counts.push((c_le, c_lt));
    }
    let curve = jackknife_plus_curve(&counts, n, grid, true);
    Ok(SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_sum / m as f64,
        iae: iae(grid, &curve)?,
    })
}

/// Split conformal: the GP is refit (same covariance) on the first half of
/// the training design; absolute residuals on the second half calibrate a
/// symmetric band around the half-model's posterior mean. Past the achievable
/// level the quantile is +∞ and every point counts as covered.
fn scp_sweep(
    model: &FittedGP,
    job: &JobData,
    alpha: f64,
    grid: &[f64],
) -> Result<(SweepMetrics, f64)> {
    let z_test = &job.z_test;
    let data = &job.data;
    let n = data.n();
    let n_cal = n / 2;
    let n_proper = n - n_cal;
    let proper = Dataset::new(
        data.points().slice(s![..n_proper, ..]).to_owned(),
        data.values().slice(s![..n_proper]).to_owned(),
    )?;
    let half =
        fit(model.spec(), &proper, DEFAULT_NUGGET).context("split-conformal half fit failed")?;

    let mut cal_scores = Vec::with_capacity(n_cal);
    for i in n_proper..n {
        let pred = half.posterior_mean(data.point(i))?;
        cal_scores.push((data.values()[i] - pred).abs());
    }
    cal_scores.sort_by(f64::total_cmp);

    let m = z_test.len();
    let rank_nominal = conformal_rank(n_cal, alpha);
    let width_nominal = if rank_nominal <= n_cal {
        2.0 * cal_scores[rank_nominal - 1]
    } else {
        f64::INFINITY
    };
    let mut covered = 0usize;
    let mut centers = Vec::with_capacity(m);
    let mut strict_below = Vec::with_capacity(m);
    for (x, &z) in job.test_rows.iter().zip(z_test) {
        let center = half.posterior_mean(x)?;
        let t = (z - center).abs();
        // Number of calibration scores strictly below t: covered at a rank r
        // iff t ≤ q_r, i.e. iff this count is < r.
        let c = cal_scores.partition_point(|s| *s < t);
        if c < rank_nominal {
            covered += 1;
        }
        centers.push(center);
        strict_below.push(c);
    }
    let curve: Vec<f64> = grid
        .iter()
        .map(|&a| {
            let rank = conformal_rank(n_cal, a);
            strict_below.iter().filter(|&&c| c < rank).count() as f64 / m as f64
        })
        .collect();
    let metrics = SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_nominal,
        iae: iae(grid, &curve)?,
    };
    Ok((metrics, rmse(&centers, z_test)?))
}

/// Jackknife conformal: symmetric band around the full posterior mean, with
/// the quantile taken over absolute LOO residuals.
fn jcp_sweep(
    model: &FittedGP,
    gp_means: &[f64],
    z_test: &[f64],
    alpha: f64,
    grid: &[f64],
) -> Result<SweepMetrics> {
    let n = model.data().n();
    let mut loo_scores: Vec<f64> = model.loo_residuals().iter().map(|e| e.abs()).collect();
    loo_scores.sort_by(f64::total_cmp);

    let m = z_test.len();
    let rank_nominal = conformal_rank(n, alpha);
    let width_nominal = if rank_nominal <= n {
        2.0 * loo_scores[rank_nominal - 1]
    } else {
        f64::INFINITY
    };
    let mut covered = 0usize;
    let mut strict_below = Vec::with_capacity(m);
    for (&center, &z) in gp_means.iter().zip(z_test) {
        let t = (z - center).abs();
        let c = loo_scores.partition_point(|s| *s < t);
        if c < rank_nominal {
            covered += 1;
        }
        strict_below.push(c);
    }
    let curve: Vec<f64> = grid
        .iter()
        .map(|&a| {
            let rank = conformal_rank(n, a);
            strict_below.iter().filter(|&&c| c < rank).count() as f64 / m as f64
        })
        .collect();
    Ok(SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_nominal,
        iae: iae(grid, &curve)?,
    })
}

/// Plain jackknife+ on unnormalized LOO residuals:
/// `ξ_i^∓(x) = m_{n,−i}(x) ∓ |e_i|`.
fn jplus_sweep(
    model: &FittedGP,
    posts: &[PointPosterior],
    z_test: &[f64],
    alpha: f64,
    grid: &[f64],
) -> Result<SweepMetrics> {
    let n = model.data().n();
    let (r_lo, r_hi) = jplus_ranks(n, alpha)?;
    let residuals: Vec<f64> = model.loo_residuals().iter().map(|e| e.abs()).collect();

    let m = z_test.len();
    let mut covered = 0usize;
    let mut width_sum = 0.0;
    let mut counts = Vec::with_capacity(m);
    for (ps, &z) in posts.iter().zip(z_test) {
        let mut xi_lower: Vec<f64> = ps
            .loo
            .iter()
            .zip(&residuals)
            .map(|(loo, r)| loo.loo_mean - r)
            .collect();
        let mut xi_upper: Vec<f64> = ps
            .loo
            .iter()
            .zip(&residuals)
            .map(|(loo, r)| loo.loo_mean + r)
            .collect();
        xi_lower.sort_by(f64::total_cmp);
        xi_upper.sort_by(f64::total_cmp);
        let c_le = xi_lower.partition_point(|v| *v <= z);
        let c_lt = xi_upper.partition_point(|v| *v < z);
        if r_lo <= c_le && r_hi > c_lt {
            covered += 1;
        }
        width_sum += (xi_upper[r_hi - 1] - xi_lower[r_lo - 1]).max(0.0);
        counts.push((c_le, c_lt));
    }
    let curve = jackknife_plus_curve(&counts, n, grid, false);
    Ok(SweepMetrics {
        coverage: covered as f64 / m as f64,
        mean_width: width_sum / m as f64,
        iae: iae(grid, &curve)?,
    })
}

/// Plain-text table of per-(method, p) means across repetitions.
fn summarize(config: &ExperimentConfig, records: &[RunRecord]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<16} {:<14} {:>2} {:>5} {:>9} {:>12} {:>9} {:>12}\n",
        "function", "method", "p", "reps", "coverage", "mean_width", "iae", "rmse"
    ));
    for &method in &config.methods {
        for &p in &config.p_values {
            let group: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.method == method && r.p == p)
                .collect();
            if group.is_empty() {
                continue;
            }
            let k = group.len() as f64;
            let mean = |f: fn(&RunRecord) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / k;
            out.push_str(&format!(
                "{:<16} {:<14} {:>2} {:>5} {:>9.4} {:>12.4} {:>9.4} {:>12.4}\n",
                config.function,
                method.as_str(),
                p,
                group.len(),
                mean(|r| r.coverage),
                mean(|r| r.mean_width),
                mean(|r| r.iae),
                mean(|r| r.rmse),
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Pareto scatter
// ---------------------------------------------------------------------------

/// Run the hyperparameter-robustness scatter: fit REML, then score
/// `n_samples` log-uniform hyperparameter draws around it by (RMSE, IAE) on
/// both the LOO and test sides, plus the REML point itself and its
/// J+GP-corrected counterpart.
pub fn run_pareto(config: &ParetoConfig) -> Result<ParetoReport> {
    config.validate()?;
    let function = get_function(&config.function)?;
    let grid = default_alpha_grid(config.iae_grid_size);
    let job = sample_job_data(&function, config.n_train, config.n_test, config.seed)?;

    let reml_spec = reml_select(&job.data, config.p, &SearchConfig::default())
        .context("REML covariance selection failed")?;
    let model = fit(&reml_spec, &job.data, DEFAULT_NUGGET).context("GP conditioning failed")?;
    let score_cfg = ScoreConfig::default();

    // REML row. The LOO side reuses the cached virtual-LOO predictors; the
    // test side needs full per-point posteriors (shared with the J+GP row).
    let (rmse_loo, iae_loo) = gaussian_loo_metrics(&model, &grid)?;
    let posts = job
        .test_rows
        .iter()
        .map(|x| model.loo_predict_all(x))
        .collect::<gpcp_core::Result<Vec<PointPosterior>>>()?;
    let gp_means: Vec<f64> = posts.iter().map(|ps| ps.mean).collect();
    let rmse_test = rmse(&gp_means, &job.z_test)?;
    let mins_test: Vec<f64> = posts
        .iter()
        .zip(&job.z_test)
        .map(|(ps, &z)| gaussian_minimal_level(ps.mean, ps.sd, z))
        .collect();
    let iae_test = iae(&grid, &curve_from_minimal_levels(mins_test, &grid))?;

    let mut rows = Vec::with_capacity(config.n_samples + 2);
    rows.push(ParetoRow {
        kind: "reml".into(),
        sigma2: reml_spec.variance(),
        lengthscales: reml_spec.lengthscales().to_vec(),
        rmse_loo,
        iae_loo,
        rmse_test,
        iae_test,
    });

    // J+GP row: conformal correction reshapes intervals only, so both RMSEs
    // are the REML row's. The IAEs come from jackknife+ coverage sweeps —
    // on the test side from the full model, on the LOO side from n fold
    // models (fit on D₋ᵢ, interval at Xᵢ), matching how the LOO calibration
    // curve is defined for the Gaussian rows.
    let jplus_iae_test = {
        let n = job.data.n();
        let counts = posts
            .iter()
            .zip(&job.z_test)
            .map(|(ps, &z)| {
                JplusGpProfile::from_posterior(&model, &score_cfg, ps)
                    .map(|profile| profile.membership_counts(z))
            })
            .collect::<gpcp_core::Result<Vec<_>>>()?;
        iae(&grid, &jackknife_plus_curve(&counts, n, &grid, false))?
    };
    let jplus_iae_loo = jplus_gp_loo_iae(&model, &score_cfg, &grid)?;
    rows.push(ParetoRow {
        kind: "jplus_gp".into(),
        sigma2: reml_spec.variance(),
        lengthscales: reml_spec.lengthscales().to_vec(),
        rmse_loo,
        iae_loo: jplus_iae_loo,
        rmse_test,
        iae_test: jplus_iae_test,
    });

    // Hyperparameter draws, pre-drawn sequentially so results do not depend
    // on how the fits are scheduled. The stream is decoupled from the design
    // seed to keep draw k stable if n_train/n_test change.
    let draws = draw_specs(config, &reml_spec)?;
    let outcomes = exec::map_slice(&draws, |spec| sample_row(spec, &job, &grid));
    let mut skipped = 0usize;
    for outcome in outcomes {
        match outcome {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }

    let summary = format!(
        "pareto {}: {} sampled rows ({} skipped), REML iae_test {:.4} -> J+GP iae_test {:.4}\n",
        config.function,
        rows.len() - 2,
        skipped,
        rows[0].iae_test,
        rows[1].iae_test,
    );
    Ok(ParetoReport {
        rows,
        skipped,
        summary,
    })
}

/// Log-uniform draw in `[lo, hi]` (both positive).
fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    // Strictly interior uniform in (0,1), same convention as the design
    // sampler: (u64 >> 11 + 0.5) / 2^53.
    let u = (((rng.next_u64() >> 11) as f64) + 0.5) * (1.0 / 9_007_199_254_740_992.0);
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

fn draw_specs(config: &ParetoConfig, center: &CovarianceSpec) -> Result<Vec<CovarianceSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut draws = Vec::with_capacity(config.n_samples);
    for _ in 0..config.n_samples {
        let sigma2 = log_uniform(
            &mut rng,
            config.sigma2_factors.0 * center.variance(),
            config.sigma2_factors.1 * center.variance(),
        );
        let lengthscales: Vec<f64> = center
            .lengthscales()
            .iter()
            .map(|&rho| {
                log_uniform(
                    &mut rng,
                    config.rho_factors.0 * rho,
                    config.rho_factors.1 * rho,
                )
            })
            .collect();
        draws.push(CovarianceSpec::new(sigma2, lengthscales, config.p)?);
    }
    Ok(draws)
}

/// Metrics of one hyperparameter draw; `None` when conditioning fails.
fn sample_row(spec: &CovarianceSpec, job: &JobData, grid: &[f64]) -> Option<ParetoRow> {
    let model = fit(spec, &job.data, DEFAULT_NUGGET).ok()?;
    let (rmse_loo, iae_loo) = gaussian_loo_metrics(&model, grid).ok()?;
    let mut means = Vec::with_capacity(job.test_rows.len());
    let mut mins = Vec::with_capacity(job.test_rows.len());
    for (x, &z) in job.test_rows.iter().zip(&job.z_test) {
        let (mean, sd) = model.predict(x).ok()?;
        means.push(mean);
        mins.push(gaussian_minimal_level(mean, sd, z));
    }
    let rmse_test = rmse(&means, &job.z_test).ok()?;
    let iae_test = iae(grid, &curve_from_minimal_levels(mins, grid)).ok()?;
    Some(ParetoRow {
        kind: "sample".into(),
        sigma2: spec.variance(),
        lengthscales: spec.lengthscales().to_vec(),
        rmse_loo,
        iae_loo,
        rmse_test,
        iae_test,
    })
}

/// LOO-side RMSE and Gaussian-interval IAE from the cached virtual-LOO
/// predictors.
fn gaussian_loo_metrics(model: &FittedGP, grid: &[f64]) -> Result<(f64, f64)> {
    let n = model.data().n();
    let sq_sum: f64 = model.loo_residuals().iter().map(|e| e * e).sum();
    let rmse_loo = (sq_sum / n as f64).sqrt();
    let mins: Vec<f64> = model
        .loo_at_training()
        .iter()
        .zip(model.data().values())
        .map(|(loo, &z)| gaussian_minimal_level(loo.loo_mean, loo.loo_sd, z))
        .collect();
    let iae_loo = iae(grid, &curve_from_minimal_levels(mins, grid))?;
    Ok((rmse_loo, iae_loo))
}

/// LOO-side J+GP calibration: for each i, fit on D₋ᵢ (same covariance) and
/// sweep the jackknife+ membership of Zᵢ in the fold's interval at Xᵢ.
fn jplus_gp_loo_iae(model: &FittedGP, score_cfg: &ScoreConfig, grid: &[f64]) -> Result<f64> {
    let data = model.data();
    let n = data.n();
    let counts = exec::map_indexed(n, |i| -> gpcp_core::Result<(usize, usize)> {
        let fold = data.without(i)?;
        let fold_model = fit(model.spec(), &fold, model.nugget())?;
        let profile = JplusGpProfile::new(&fold_model, score_cfg, data.point(i))?;
        Ok(profile.membership_counts(data.values()[i]))
    })
    .into_iter()
    .collect::<gpcp_core::Result<Vec<_>>>()?;
    Ok(iae(
        grid,
        &jackknife_plus_curve(&counts, n - 1, grid, false),
    )?)
}
