//! Binomial intervals, z-scores and Pearson's chi-squared test.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// z used for reported confidence intervals (95%).
pub const CI_Z: f64 = 1.96;

/// Wilson score interval for `successes / trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Deviation of an observed count from its binomial expectation, in units of
/// the binomial standard deviation.
pub fn binomial_z(successes: usize, trials: usize, p: f64) -> f64 {
    let n = trials as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    if sd == 0.0 {
        return if successes as f64 == n * p { 0.0 } else { f64::INFINITY };
    }
    (successes as f64 - n * p) / sd
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `observed` counts against `expected_probs`.
/// Cells with zero expected probability must be empty; one observation in
/// such a cell makes the statistic infinite.
pub fn chi_square_gof(observed: &[usize], expected_probs: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), expected_probs.len());
    let total: usize = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected_probs) {
        let e = p * total as f64;
        if e <= 0.0 {
            if o > 0 {
                stat = f64::INFINITY;
            }
            continue;
        }
        cells += 1;
        stat += (o as f64 - e).powi(2) / e;
    }
    let dof = cells.saturating_sub(1).max(1);
    let p_value = if stat.is_finite() {
        let dist = ChiSquared::new(dof as f64).expect("dof > 0");
        1.0 - dist.cdf(stat)
    } else {
        0.0
    };
    ChiSquareResult { statistic: stat, dof, p_value }
}
