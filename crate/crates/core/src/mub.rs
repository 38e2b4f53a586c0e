//! Qudit states, the d mutually unbiased bases built from quadratic phases,
//! the diagonal shift gates acting cyclically on them, and projective
//! measurement.
//!
//! The basis vectors are
//!
//! ```text
//! |e_l^(j)> = d^{-1/2} Σ_k ω^{k(l + j k)} |k>,   ω = exp(2πi/d)
//! ```
//!
//! for `l, j` in `0..d`. The gate `X^x Y^y` multiplies amplitude `k` by
//! `ω^{x k + y k²}` and sends `|e_l^(j)>` to `|e_{l+x}^(j+y)>`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Tolerance used by [`classify`] and by the normalization check.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// An odd prime qudit dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(d: u32) -> Result<Self> {
        if d < 3 || !is_prime(d as u64) {
            return Err(Error::InvalidDimension(d as u64));
        }
        Ok(Dimension(d))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// Reduces any integer into the residue set.
    pub fn residue(self, v: i64) -> ModInt {
        ModInt {
            value: v.rem_euclid(self.0 as i64) as u32,
            modulus: self,
        }
    }

    /// `ω^e`. The exponent is reduced mod d before the trig call.
    pub fn omega_pow(self, e: u64) -> Complex64 {
        let r = (e % self.0 as u64) as f64;
        Complex64::from_polar(1.0, 2.0 * PI * r / self.0 as f64)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(d: u32) -> Result<Self> {
        Dimension::new(d)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic trial division; inputs here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// A residue mod d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModInt {
    value: u32,
    modulus: Dimension,
}

impl ModInt {
    pub fn new(value: u64, modulus: Dimension) -> Self {
        ModInt {
            value: (value % modulus.0 as u64) as u32,
            modulus,
        }
    }

    pub fn zero(modulus: Dimension) -> Self {
        ModInt { value: 0, modulus }
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Dimension {
        self.modulus
    }

    fn check(self, other: ModInt) {
        assert_eq!(
            self.modulus, other.modulus,
            "mixing residues of different moduli"
        );
    }
}

impl Add for ModInt {
    type Output = ModInt;
    fn add(self, rhs: ModInt) -> ModInt {
        self.check(rhs);
        ModInt::new(self.value as u64 + rhs.value as u64, self.modulus)
    }
}

impl Sub for ModInt {
    type Output = ModInt;
    fn sub(self, rhs: ModInt) -> ModInt {
        self + (-rhs)
    }
}

impl Neg for ModInt {
    type Output = ModInt;
    fn neg(self) -> ModInt {
        let d = self.modulus.0;
        ModInt {
            value: (d - self.value) % d,
            modulus: self.modulus,
        }
    }
}

impl Mul for ModInt {
    type Output = ModInt;
    fn mul(self, rhs: ModInt) -> ModInt {
        self.check(rhs);
        ModInt::new(self.value as u64 * rhs.value as u64, self.modulus)
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A pure qudit state held as its full amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    amps: Vec<Complex64>,
}

impl QuditState {
    /// Wraps an amplitude vector, rejecting anything off the unit sphere.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if amps.is_empty() || (n - 1.0).abs() > CLASSIFY_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(QuditState { amps })
    }

    /// Computational basis state `|k>`. This is the basis the MUB labels
    /// leave out.
    pub fn computational(d: Dimension, k: u32) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); d.as_usize()];
        amps[(k % d.get()) as usize] = Complex64::new(1.0, 0.0);
        QuditState { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let p = Complex64::from_polar(1.0, theta);
        QuditState {
            amps: self.amps.iter().map(|a| a * p).collect(),
        }
    }

    /// Largest amplitude-wise distance to `other`.
    pub fn max_abs_diff(&self, other: &QuditState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(if self.dim() == other.dim() { 0.0 } else { f64::INFINITY }, f64::max)
    }
}

/// `M_{l,j}`: vector `l` of basis `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MubLabel {
    pub l: ModInt,
    pub j: ModInt,
}

impl MubLabel {
    pub fn new(d: Dimension, l: u64, j: u64) -> Self {
        MubLabel {
            l: ModInt::new(l, d),
            j: ModInt::new(j, d),
        }
    }

    pub fn dim(&self) -> Dimension {
        self.l.modulus()
    }

    /// Every label for `d`, ordered by basis then vector index.
    pub fn all(d: Dimension) -> impl Iterator<Item = MubLabel> {
        let n = d.get() as u64;
        (0..n).flat_map(move |j| (0..n).map(move |l| MubLabel::new(d, l, j)))
    }
}

impl fmt::Display for MubLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M[l={}, j={}]", self.l, self.j)
    }
}

/// The diagonal unitary `X^x Y^y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseGate {
    pub x: ModInt,
    pub y: ModInt,
}

impl PhaseGate {
    pub fn new(d: Dimension, x: u64, y: u64) -> Self {
        PhaseGate {
            x: ModInt::new(x, d),
            y: ModInt::new(y, d),
        }
    }

    pub fn identity(d: Dimension) -> Self {
        PhaseGate::new(d, 0, 0)
    }

    pub fn dim(&self) -> Dimension {
        self.x.modulus()
    }

    /// Gate equivalent to applying `self` and then `next`. The gates are
    /// diagonal so the order does not matter.
    pub fn then(self, next: PhaseGate) -> PhaseGate {
        PhaseGate {
            x: self.x + next.x,
            y: self.y + next.y,
        }
    }
}

pub fn mub_vector(d: Dimension, label: MubLabel) -> QuditState {
    let n = d.get() as u64;
    let (l, j) = (label.l.value() as u64, label.j.value() as u64);
    let scale = 1.0 / (n as f64).sqrt();
    let amps = (0..n)
        .map(|k| {
            let e = (k * ((l + j * k) % n)) % n;
            d.omega_pow(e) * scale
        })
        .collect();
    QuditState { amps }
}

pub fn apply_gate(state: &QuditState, gate: PhaseGate) -> Result<QuditState> {
    let d = gate.dim();
    if state.dim() != d.as_usize() {
        return Err(Error::DimensionMismatch {
            expected: d.as_usize(),
            got: state.dim(),
        });
    }
    let n = d.get() as u64;
    let (x, y) = (gate.x.value() as u64, gate.y.value() as u64);
    let amps = state
        .amps
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let k = k as u64;
            a * d.omega_pow((x * k + y * (k * k % n)) % n)
        })
        .collect();
    Ok(QuditState { amps })
}

/// `|<a|b>|²`.
pub fn overlap_sq(a: &QuditState, b: &QuditState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let inner: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(inner.norm_sqr())
}

/// Identifies which MUB vector `state` is, up to global phase. Returns
/// `None` for states outside the family (including computational basis
/// states) or for dimensions that are not odd primes.
pub fn classify(state: &QuditState, tol: f64) -> Option<MubLabel> {
    let d = Dimension::new(u32::try_from(state.dim()).ok()?).ok()?;
    MubLabel::all(d).find(|&label| {
        overlap_sq(&mub_vector(d, label), state).is_ok_and(|o| o >= 1.0 - tol)
    })
}

/// Projective measurement in basis `j`. Consumes exactly one uniform draw.
pub fn measure_in_basis(
    state: &QuditState,
    j: ModInt,
    rng: &mut RandomSource,
) -> (ModInt, QuditState) {
    let d = j.modulus();
    let probs = basis_probabilities(state, j);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut outcome = None;
    for (l, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = Some(l);
            break;
        }
    }
    // u landed in the rounding slack above the cumulative sum
    let l = outcome.unwrap_or_else(|| {
        probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(probs.len() - 1)
    });
    let label = MubLabel {
        l: ModInt::new(l as u64, d),
        j,
    };
    (label.l, mub_vector(d, label))
}

/// Born probabilities of each outcome `l` when measuring in basis `j`.
pub fn basis_probabilities(state: &QuditState, j: ModInt) -> Vec<f64> {
    let d = j.modulus();
    (0..d.get() as u64)
        .map(|l| {
            let e = mub_vector(d, MubLabel { l: ModInt::new(l, d), j });
            overlap_sq(&e, state).unwrap_or(0.0)
        })
        .collect()
}

/// Outcome of the exhaustive algebra check run by `verify-mubs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MubReport {
    pub d: u32,
    pub unbiased_pairs: usize,
    pub max_unbiased_error: f64,
    pub orthonormal_pairs: usize,
    pub max_orthonormal_error: f64,
    pub cyclic_cases: usize,
    pub cyclic_failures: usize,
}

impl MubReport {
    pub fn passed(&self) -> bool {
        self.max_unbiased_error <= CLASSIFY_TOL
            && self.max_orthonormal_error <= CLASSIFY_TOL
            && self.cyclic_failures == 0
    }
}

/// Checks unbiasedness and orthonormality for every pair of labels, and the
/// cyclic gate action for every (label, gate) combination.
pub fn verify_mubs(d: Dimension) -> MubReport {
    let labels: Vec<MubLabel> = MubLabel::all(d).collect();
    let vectors: Vec<QuditState> = labels.iter().map(|&lb| mub_vector(d, lb)).collect();
    let inv_d = 1.0 / d.get() as f64;

    let mut report = MubReport {
        d: d.get(),
        unbiased_pairs: 0,
        max_unbiased_error: 0.0,
        orthonormal_pairs: 0,
        max_orthonormal_error: 0.0,
        cyclic_cases: 0,
        cyclic_failures: 0,
    };
    for (a, la) in labels.iter().enumerate() {
        for (b, lb) in labels.iter().enumerate().skip(a) {
            let o = overlap_sq(&vectors[a], &vectors[b]).expect("same dimension");
            if la.j != lb.j {
                report.unbiased_pairs += 1;
                report.max_unbiased_error = report.max_unbiased_error.max((o - inv_d).abs());
            } else {
                let want = if la.l == lb.l { 1.0 } else { 0.0 };
                report.orthonormal_pairs += 1;
                report.max_orthonormal_error = report.max_orthonormal_error.max((o - want).abs());
            }
        }
    }

    let n = d.get() as u64;
    for (idx, label) in labels.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                let gate = PhaseGate::new(d, x, y);
                let out = apply_gate(&vectors[idx], gate).expect("same dimension");
                let want = MubLabel {
                    l: label.l + gate.x,
                    j: label.j + gate.y,
                };
                report.cyclic_cases += 1;
                // index of `want` in `labels` is j*d + l
                let w = (want.j.value() as usize) * d.as_usize() + want.l.value() as usize;
                let o = overlap_sq(&vectors[w], &out).expect("same dimension");
                if o < 1.0 - CLASSIFY_TOL {
                    report.cyclic_failures += 1;
                }
            }
        }
    }
    report
}
