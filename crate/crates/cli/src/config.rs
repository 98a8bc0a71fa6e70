//! Experiment configuration: benchmark and Pareto-scatter settings, method
//! tags, and the JSON config-file layer (CLI flags override file values,
//! which override defaults).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use gpcp_core::testbed::get_function;
use serde::{Deserialize, Serialize};

/// Interval constructors the benchmark can run. The declaration order is the
/// canonical output order: records are sorted by it so that results are
/// independent of how the method list was written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    /// Plain Gaussian posterior intervals from the REML-fitted GP.
    GaussianReml,
    /// Full-conformal GP intervals (closed form).
    FcpGp,
    /// Jackknife+ GP with normalized scores.
    JplusGp,
    /// Asymmetric jackknife+ GP with signed normalized scores.
    AsymJplusGp,
    /// Split conformal around a half-data GP refit.
    Scp,
    /// Jackknife conformal: symmetric LOO-residual quantile around the
    /// full-data posterior mean.
    Jcp,
    /// Plain jackknife+ on unnormalized LOO residuals.
    Jplus,
}

impl MethodTag {
    pub const ALL: [MethodTag; 7] = [
        MethodTag::GaussianReml,
        MethodTag::FcpGp,
        MethodTag::JplusGp,
        MethodTag::AsymJplusGp,
        MethodTag::Scp,
        MethodTag::Jcp,
        MethodTag::Jplus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodTag::GaussianReml => "gaussian_reml",
            MethodTag::FcpGp => "fcp_gp",
            MethodTag::JplusGp => "jplus_gp",
            MethodTag::AsymJplusGp => "asym_jplus_gp",
            MethodTag::Scp => "scp",
            MethodTag::Jcp => "jcp",
            MethodTag::Jplus => "jplus",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodTag {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        for tag in MethodTag::ALL {
            if tag.as_str() == s {
                return Ok(tag);
            }
        }
        bail!(
            "unknown method '{s}' (expected one of: {})",
            MethodTag::ALL.map(|t| t.as_str()).join(", ")
        );
    }
}

/// Output format for benchmark records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown format '{other}' (expected csv or json)"),
        }
    }
}

/// Fully resolved benchmark settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Test-function tag (see `gpcp_core::testbed`).
    pub function: String,
    /// Matérn regularity indices to fit (ν = p + 1/2), each a separate run.
    pub p_values: Vec<usize>,
    /// Training-design size (default 20·d).
    pub n_train: usize,
    /// Test-design size (default 1100).
    pub n_test: usize,
    /// Number of repetitions; repetition r uses seed `base_seed + r`
    /// (default 40).
    pub repetitions: usize,
    /// Nominal coverage level for the reported intervals (default 0.9).
    pub alpha: f64,
    /// Score-normalization exponent β (default 1).
    pub beta: f64,
    /// Interval constructors to evaluate, deduplicated, canonical order.
    pub methods: Vec<MethodTag>,
    /// Seed offset shared by all repetitions.
    pub base_seed: u64,
    /// Number of interior levels in the IAE grid (default 99 → percent grid).
    pub iae_grid_size: usize,
}

/// Partial benchmark settings: every field optional. Used for both the JSON
/// config file and the CLI flags so the two layers merge uniformly.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentOverrides {
    pub function: Option<String>,
    pub p_values: Option<Vec<usize>>,
    pub n_train: Option<usize>,
    pub n_test: Option<usize>,
    pub repetitions: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub methods: Option<Vec<MethodTag>>,
    pub base_seed: Option<u64>,
    pub iae_grid_size: Option<usize>,
}

impl ExperimentOverrides {
    /// Read a partial config from a JSON file. Unknown keys are rejected so
    /// typos fail loudly instead of silently falling back to defaults.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))
    }

    /// Field-wise overlay: values in `self` win over values in `base`.
    pub fn over(self, base: ExperimentOverrides) -> ExperimentOverrides {
        ExperimentOverrides {
            function: self.function.or(base.function),
            p_values: self.p_values.or(base.p_values),
            n_train: self.n_train.or(base.n_train),
            n_test: self.n_test.or(base.n_test),
            repetitions: self.repetitions.or(base.repetitions),
            alpha: self.alpha.or(base.alpha),
            beta: self.beta.or(base.beta),
            methods: self.methods.or(base.methods),
            base_seed: self.base_seed.or(base.base_seed),
            iae_grid_size: self.iae_grid_size.or(base.iae_grid_size),
        }
    }
}

impl ExperimentConfig {
    /// Resolve a partial config against the defaults and validate it.
    /// `function` is the only field without a default.
    pub fn from_overrides(overrides: ExperimentOverrides) -> Result<Self> {
        let Some(function) = overrides.function else {
            bail!("no test function given (use --function or a config file)");
        };
        let dim = get_function(&function)?.dim();
        let mut methods = overrides.methods.unwrap_or_else(|| MethodTag::ALL.to_vec());
        methods.sort();
        methods.dedup();
        let config = ExperimentConfig {
            function,
            p_values: overrides.p_values.unwrap_or_else(|| vec![2]),
            n_train: overrides.n_train.unwrap_or(20 * dim),
            n_test: overrides.n_test.unwrap_or(1100),
            repetitions: overrides.repetitions.unwrap_or(40),
            alpha: overrides.alpha.unwrap_or(0.9),
            beta: overrides.beta.unwrap_or(1.0),
            methods,
            base_seed: overrides.base_seed.unwrap_or(0),
            iae_grid_size: overrides.iae_grid_size.unwrap_or(99),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        get_function(&self.function)?;
        if self.p_values.is_empty() {
            bail!("p_values must be nonempty");
        }
        if self.p_values.contains(&0) {
            bail!("p_values must be positive (ν = p + 1/2)");
        }
        if self.n_train < 2 {
            bail!("n_train must be at least 2, got {}", self.n_train);
        }
        if self.n_test == 0 {
            bail!("n_test must be at least 1");
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            bail!("alpha must lie in (0,1), got {}", self.alpha);
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            bail!("beta must be a positive real, got {}", self.beta);
        }
        if self.methods.is_empty() {
            bail!("methods must be nonempty");
        }
        if self.iae_grid_size < 2 {
            bail!(
                "iae_grid_size must be at least 2, got {}",
                self.iae_grid_size
            );
        }
        // The jackknife+ ranks only exist up to α = n/(n+1): reject configs
        // whose nominal level is unreachable instead of failing per record.
        let n = self.n_train as f64;
        let jplus_like = [MethodTag::JplusGp, MethodTag::AsymJplusGp, MethodTag::Jplus];
        if self.methods.iter().any(|m| jplus_like.contains(m)) && self.alpha > n / (n + 1.0) {
            bail!(
                "alpha = {} is unachievable for jackknife+ methods with n_train = {} \
                 (needs alpha <= n/(n+1) = {:.4})",
                self.alpha,
                self.n_train,
                n / (n + 1.0)
            );
        }
        Ok(())
    }
}

/// Settings for the hyperparameter-robustness scatter (`pareto` subcommand):
/// sample covariance parameters around the REML optimum and record
/// (RMSE, IAE) pairs on the LOO and test sides for each draw.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoConfig {
    pub function: String,
    /// Matérn regularity index of every fitted model (default 2).
    pub p: usize,
    /// Training-design size (default 150).
    pub n_train: usize,
    /// Test-design size (default 1500).
    pub n_test: usize,
    /// Number of hyperparameter draws; 0 emits only the REML and J+GP rows
    /// (default 200).
    pub n_samples: usize,
    pub seed: u64,
    /// Log-uniform sampling range for the variance, as multiples of the REML
    /// estimate (default 1e-2 .. 1e2).
    pub sigma2_factors: (f64, f64),
    /// Log-uniform sampling range for each lengthscale, as multiples of the
    /// REML estimate (default 1e-1 .. 1e1).
    pub rho_factors: (f64, f64),
    /// Number of interior levels in the IAE grid (default 99).
    pub iae_grid_size: usize,
}

impl ParetoConfig {
    pub fn new(function: &str) -> Result<Self> {
        get_function(function)?;
        Ok(ParetoConfig {
            function: function.to_string(),
            p: 2,
            n_train: 150,
            n_test: 1500,
            n_samples: 200,
            seed: 0,
            sigma2_factors: (1e-2, 1e2),
            rho_factors: (1e-1, 1e1),
            iae_grid_size: 99,
        })
    }

    pub fn validate(&self) -> Result<()> {
        get_function(&self.function)?;
        if self.p == 0 {
            bail!("p must be positive (ν = p + 1/2)");
        }
        if self.n_train < 2 {
            bail!("n_train must be at least 2, got {}", self.n_train);
        }
        if self.n_test == 0 {
            bail!("n_test must be at least 1");
        }
        for (name, (lo, hi)) in [
            ("sigma2-range", self.sigma2_factors),
            ("rho-range", self.rho_factors),
        ] {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                bail!("{name} must satisfy 0 < lo <= hi, got {lo}..{hi}");
            }
        }
        if self.iae_grid_size < 2 {
            bail!(
                "iae_grid_size must be at least 2, got {}",
                self.iae_grid_size
            );
        }
        Ok(())
    }
}
