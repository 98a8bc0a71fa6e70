//! Deterministic test functions used by the calibration benchmarks, with a
//! reproducible uniform design sampler.
//!
//! All functions are standard optimization/UQ test problems evaluated on
//! their conventional domains. `becker2d` is a fixed smooth two-dimensional
//! instance (a sine/cubic interaction surface) standing in for a random
//! member of that function family, so results on it are qualitative.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Tags accepted by [`get_function`], in canonical order.
pub const FUNCTION_TAGS: [&str; 6] = [
    "goldstein_price",
    "hartmann4",
    "hartmann6",
    "park",
    "branin",
    "becker2d",
];

/// A named deterministic test function on a box domain.
#[derive(Debug, Clone)]
pub struct TestFunction {
    name: &'static str,
    domain: Vec<(f64, f64)>,
    eval: fn(&[f64]) -> f64,
}

impl TestFunction {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.len()
    }

    /// Per-coordinate `(lower, upper)` bounds of the box domain.
    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok((self.eval)(x))
    }

    /// Evaluate at every row of `points`.
    pub fn eval_rows(&self, points: &Array2<f64>) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(points.nrows());
        for row in points.rows() {
            out.push(self.eval(row.to_slice().expect("contiguous row"))?);
        }
        Ok(out)
    }

    /// `n` points uniform on the open box interior, deterministic in `seed`.
    ///
    /// Coordinates are drawn strictly inside `(lo, hi)` — the sampler maps
    /// 53-bit words to `(0,1)` exclusive — so functions with boundary
    /// singularities (`park` at `x₁ = 0`) are always safe to evaluate.
    pub fn sample_uniform(&self, n: usize, seed: u64) -> Result<Array2<f64>> {
        if n == 0 {
            return Err(Error::EmptyInput("n"));
        }
        let d = self.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Array2::<f64>::zeros((n, d));
        for i in 0..n {
            for j in 0..d {
                let (lo, hi) = self.domain[j];
                points[(i, j)] = lo + open_unit(&mut rng) * (hi - lo);
            }
        }
        Ok(points)
    }
}

/// Uniform draw on the open interval (0, 1): offsets the 53-bit mantissa grid
/// by half a step so neither endpoint is attainable.
fn open_unit<R: Rng>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
}

/// Look up a test function by tag; see [`FUNCTION_TAGS`].
pub fn get_function(tag: &str) -> Result<TestFunction> {
    match tag {
        "goldstein_price" => Ok(TestFunction {
            name: "goldstein_price",
            domain: vec![(-2.0, 2.0), (-2.0, 2.0)],
            eval: goldstein_price,
        }),
        "hartmann4" => Ok(TestFunction {
            name: "hartmann4",
            domain: vec![(0.0, 1.0); 4],
            eval: hartmann4,
        }),
        "hartmann6" => Ok(TestFunction {
            name: "hartmann6",
            domain: vec![(0.0, 1.0); 6],
            eval: hartmann6,
        }),
        "park" => Ok(TestFunction {
            name: "park",
            domain: vec![(0.0, 1.0); 4],
            eval: park,
        }),
        "branin" => Ok(TestFunction {
            name: "branin",
            domain: vec![(-5.0, 10.0), (0.0, 15.0)],
            eval: branin,
        }),
        "becker2d" => Ok(TestFunction {
            name: "becker2d",
            domain: vec![
                (-std::f64::consts::PI, std::f64::consts::PI),
                (-std::f64::consts::PI, std::f64::consts::PI),
            ],
            eval: becker2d,
        }),
        other => Err(Error::UnknownFunction(other.to_string())),
    }
}

fn goldstein_price(x: &[f64]) -> f64 {
    let (x1, x2) = (x[0], x[1]);
    let a = 1.0
        + (x1 + x2 + 1.0).powi(2)
            * (19.0 - 14.0 * x1 + 3.0 * x1 * x1 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 * x2);
    let b = 30.0
        + (2.0 * x1 - 3.0 * x2).powi(2)
            * (18.0 - 32.0 * x1 + 12.0 * x1 * x1 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 * x2);
    a * b
}

fn branin(x: &[f64]) -> f64 {
    use std::f64::consts::PI;
    let (x1, x2) = (x[0], x[1]);
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    (x2 - b * x1 * x1 + c * x1 - 6.0).powi(2) + 10.0 * (1.0 - t) * x1.cos() + 10.0
}

const HARTMANN_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];

const HARTMANN_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

const HARTMANN_C: [f64; 4] = [1.0, 1.2, 3.0, 3.2];

fn hartmann_sum(x: &[f64], dims: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..4 {
        let mut expo = 0.0;
        for j in 0..dims {
            let diff = x[j] - HARTMANN_P[i][j];
            expo += HARTMANN_A[i][j] * diff * diff;
        }
        total += HARTMANN_C[i] * (-expo).exp();
    }
    total
}

fn hartmann4(x: &[f64]) -> f64 {
    (1.1 - hartmann_sum(x, 4)) / 0.839
}

fn hartmann6(x: &[f64]) -> f64 {
    -hartmann_sum(x, 6)
}

fn park(x: &[f64]) -> f64 {
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let inner = 1.0 + (x2 + x3 * x3) * x4 / (x1 * x1);
    x1 / 2.0 * (inner.sqrt() - 1.0) + (x1 + 3.0 * x4) * (1.0 + x3.sin()).exp()
}

fn becker2d(x: &[f64]) -> f64 {
    use std::f64::consts::PI;
    let (x1, x2) = (x[0], x[1]);
    let cubic = (x2 / PI).powi(3);
    x1.sin() + 0.7 * cubic + 0.4 * x1.sin() * cubic
}
