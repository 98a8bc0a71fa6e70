//! Standard-normal helpers shared by the Gaussian interval constructors.

use statrs::distribution::{ContinuousCDF, Normal};

pub(crate) fn std_normal_quantile(p: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("unit normal is well-defined")
        .inverse_cdf(p)
}

pub(crate) fn std_normal_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("unit normal is well-defined")
        .cdf(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quantile_matches_inverse_erf_reference() {
        // √2·erfinv(2p−1) evaluated with 50-digit arithmetic.
        assert_relative_eq!(
            std_normal_quantile(0.95),
            1.6448536269514727,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            std_normal_quantile(0.975),
            1.9599639845400545,
            max_relative = 1e-9
        );
        assert_relative_eq!(std_normal_quantile(0.5), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cdf_inverts_quantile() {
        for &p in &[0.01, 0.2, 0.5, 0.9, 0.999] {
            assert_relative_eq!(
                std_normal_cdf(std_normal_quantile(p)),
                p,
                max_relative = 1e-9
            );
        }
    }
}
