//! Brute-force reference for the GHZ-entanglement version of the protocol.
//!
//! Each of the `N + 1` parties measures one particle of
//! `d^{-1/2} Σ_k |k>^{⊗(N+1)}` in basis `j_n`. The joint outcome law is
//!
//! ```text
//! P(l | j) = d^{-(N+2)} |Σ_k ω^{-Σ_n (k l_n + k² j_n)}|²
//! ```
//!
//! which is evaluated here by direct enumeration. It is the oracle the
//! single-qudit relay is compared against.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mub::{Dimension, ModInt};
use crate::protocol::RoundRecord;
use crate::rng::RandomSource;

pub const TABLE_BUDGET: u128 = 1_000_000;

/// Below the smallest nonzero probability any in-budget table can hold (1e-6).
const ZERO_SNAP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GhzSpec {
    d: Dimension,
    n_parties: usize,
}

impl GhzSpec {
    pub fn new(d: Dimension, n_parties: usize) -> Result<Self> {
        if n_parties == 0 {
            return Err(Error::Config("GHZ state needs at least one party".into()));
        }
        let entries = table_size(d, n_parties);
        if entries > TABLE_BUDGET {
            return Err(Error::MemoryGuard(entries));
        }
        Ok(GhzSpec { d, n_parties })
    }

    pub fn d(&self) -> Dimension {
        self.d
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    /// `d^{n_parties}`.
    pub fn tuples(&self) -> usize {
        table_size(self.d, self.n_parties) as usize
    }

    /// Decodes a mixed-radix index into a residue tuple (party 1 first).
    pub fn tuple(&self, mut index: usize) -> Vec<u32> {
        let n = self.d.as_usize();
        let mut out = vec![0; self.n_parties];
        for slot in out.iter_mut() {
            *slot = (index % n) as u32;
            index /= n;
        }
        out
    }

    pub fn index_of(&self, tuple: &[u32]) -> usize {
        let n = self.d.as_usize();
        tuple.iter().rev().fold(0, |acc, &v| acc * n + v as usize)
    }
}

fn table_size(d: Dimension, n_parties: usize) -> u128 {
    (d.get() as u128).saturating_pow(n_parties.min(u32::MAX as usize) as u32)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointOutcome {
    pub l: Vec<u32>,
    pub j: Vec<u32>,
}

fn sum_mod(d: Dimension, v: &[u32]) -> u32 {
    v.iter()
        .fold(ModInt::zero(d), |acc, &x| acc + ModInt::new(x as u64, d))
        .value()
}

impl JointOutcome {
    pub fn l_sum(&self, d: Dimension) -> u32 {
        sum_mod(d, &self.l)
    }

    pub fn j_sum(&self, d: Dimension) -> u32 {
        sum_mod(d, &self.j)
    }
}

pub fn joint_prob(spec: &GhzSpec, outcome: &JointOutcome) -> f64 {
    let d = spec.d;
    let n = d.get() as u64;
    assert_eq!(outcome.l.len(), spec.n_parties, "l tuple length");
    assert_eq!(outcome.j.len(), spec.n_parties, "j tuple length");
    let sl: u64 = outcome.l.iter().map(|&v| v as u64 % n).sum::<u64>() % n;
    let sj: u64 = outcome.j.iter().map(|&v| v as u64 % n).sum::<u64>() % n;
    let amp: Complex64 = (0..n)
        .map(|k| {
            let e = (k * sl + (k * k % n) * sj) % n;
            // ω^{-e}
            d.omega_pow((n - e) % n)
        })
        .sum();
    let p = amp.norm_sqr() / (n as f64).powi(spec.n_parties as i32 + 1);
    // exact zeros of the phase sum come out as ~1e-33
    if p < ZERO_SNAP {
        0.0
    } else {
        p
    }
}

/// `P(l | j)` for every l-tuple, indexed by [`GhzSpec::index_of`].
pub fn conditional_table(spec: &GhzSpec, j: &[u32]) -> Vec<f64> {
    (0..spec.tuples())
        .map(|i| {
            joint_prob(
                spec,
                &JointOutcome {
                    l: spec.tuple(i),
                    j: j.to_vec(),
                },
            )
        })
        .collect()
}

/// One GHZ round: uniform bases, outcomes drawn from the exact conditional
/// table. Returns the outcome and whether the bases sum to zero.
pub fn sample_round(spec: &GhzSpec, rng: &mut RandomSource) -> Result<(JointOutcome, bool)> {
    let entries = table_size(spec.d, spec.n_parties);
    if entries > TABLE_BUDGET {
        return Err(Error::MemoryGuard(entries));
    }
    let n = spec.d.get();
    let j: Vec<u32> = (0..spec.n_parties).map(|_| rng.random_range(0..n)).collect();
    let table = conditional_table(spec, &j);
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut pick = table.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (i, p) in table.iter().enumerate() {
        acc += p;
        if u < acc {
            pick = i;
            break;
        }
    }
    let outcome = JointOutcome { l: spec.tuple(pick), j };
    let valid = outcome.j_sum(spec.d) == 0;
    Ok((outcome, valid))
}

/// Reads a valid single-qudit round as a GHZ outcome: `y_n` plays the role of
/// the basis choice and `x_n` the local result. The distributor's entries
/// absorb its reset and its measurement basis, `l_1 = x_1 - a` and
/// `j_1 = y_1 - J`, so both tuples sum to zero.
pub fn equivalence_map(round: &RoundRecord, d: Dimension) -> Result<JointOutcome> {
    if !round.valid {
        return Err(Error::InvalidRound(round.round_index));
    }
    let mut l = round.x.clone();
    let mut j = round.y.clone();
    l[0] = (ModInt::new(l[0] as u64, d) - ModInt::new(round.outcome as u64, d)).value();
    j[0] = (ModInt::new(j[0] as u64, d) - ModInt::new(round.basis as u64, d)).value();
    Ok(JointOutcome { l, j })
}

/// Dumps every (l, j, probability) triple as CSV.
pub fn write_table_csv<W: Write>(spec: &GhzSpec, mut out: W) -> io::Result<()> {
    let entries = table_size(spec.d, spec.n_parties).saturating_mul(table_size(spec.d, spec.n_parties));
    if entries > TABLE_BUDGET {
        return Err(io::Error::other(Error::MemoryGuard(entries)));
    }
    let fmt = |t: &[u32]| t.iter().map(u32::to_string).collect::<Vec<_>>().join("-");
    writeln!(out, "l,j,probability")?;
    for ji in 0..spec.tuples() {
        let j = spec.tuple(ji);
        for (li, p) in conditional_table(spec, &j).into_iter().enumerate() {
            writeln!(out, "{},{},{:.12}", fmt(&spec.tuple(li)), fmt(&j), p)?;
        }
    }
    Ok(())
}
