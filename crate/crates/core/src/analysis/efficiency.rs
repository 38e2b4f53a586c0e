//! Closed-form comparison of the single-qudit relay with QKD-based and
//! GHZ-based secret sharing.
//!
//! With N recipients each running d-level QKD with the distributor, one
//! recipient picks the right basis in a round with probability 1/d, so after
//! `m` rounds all of them have done so at least once with probability
//! `(1 - (1 - 1/d)^m)^N`. `qkd_rounds` inverts that for the smallest
//! sufficient `m`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub fn qkd_success(n: u32, d: u32, m: u64) -> Result<f64> {
    if n == 0 || d < 2 {
        return Err(Error::Domain(format!("need N >= 1 and d >= 2, got N={n}, d={d}")));
    }
    let miss = 1.0 - 1.0 / d as f64;
    let m = i32::try_from(m).map_err(|_| Error::Domain(format!("m = {m} too large")))?;
    Ok((1.0 - miss.powi(m)).powi(n as i32))
}

/// Smallest `m` with `qkd_success(n, d, m) >= p`.
pub fn qkd_rounds(n: u32, d: u32, p_success: f64) -> Result<u64> {
    if n == 0 || d < 2 {
        return Err(Error::Domain(format!("need N >= 1 and d >= 2, got N={n}, d={d}")));
    }
    if !(p_success > 0.0 && p_success < 1.0) {
        return Err(Error::Domain(format!("p_success = {p_success} outside (0, 1)")));
    }
    let root = p_success.powf(1.0 / n as f64);
    let ratio = (1.0 - root).ln() / (1.0 - 1.0 / d as f64).ln();
    if !ratio.is_finite() || ratio > i32::MAX as f64 {
        return Err(Error::Domain(format!(
            "p_success = {p_success} too close to 1 for N={n}, d={d}"
        )));
    }
    // the closed-form ceiling can land one off when the ratio is an integer
    let mut m = (ratio.ceil() as u64).max(1);
    while m > 1 && qkd_success(n, d, m - 1)? >= p_success {
        m -= 1;
    }
    while qkd_success(n, d, m)? < p_success {
        m += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Ghz,
    SingleQudit,
    Qkd,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Ghz, Scheme::SingleQudit, Scheme::Qkd];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Ghz => "ghz",
            Scheme::SingleQudit => "single_qudit",
            Scheme::Qkd => "qkd",
        }
    }

    /// Number of detection events that must all succeed for one round.
    pub fn detections_per_round(self, n: u32) -> u32 {
        match self {
            Scheme::Ghz => n + 1,
            Scheme::SingleQudit => 1,
            Scheme::Qkd => n,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "ghz" => Ok(Scheme::Ghz),
            "single_qudit" => Ok(Scheme::SingleQudit),
            "qkd" => Ok(Scheme::Qkd),
            other => Err(Error::Domain(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Fraction of rounds surviving detector inefficiency `eta`.
pub fn detection_scaling(scheme: Scheme, n: u32, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta = {eta} outside [0, 1]")));
    }
    Ok(eta.powi(scheme.detections_per_round(n) as i32))
}
