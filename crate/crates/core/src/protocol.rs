//! The single-qudit relay protocol.
//!
//! Party 1 (the distributor) prepares `|e_0^(0)>`, every party `n = 1..=N+1`
//! applies a private gate `X^{x_n} Y^{y_n}` and forwards the qudit, and the
//! distributor finally measures it in a private basis `J`. The round is valid
//! when `Σ y_n ≡ J`, in which case the outcome `a` satisfies `Σ x_n ≡ a` and
//! the distributor's secret digit is `x_1 - a`.
//!
//! Links are numbered by the party that sends on them: link `k` carries the
//! qudit from party `k` to party `k + 1`, and link `N + 1` returns it to the
//! distributor. Adversaries plug in as [`ChannelTap`]s on links and only ever
//! see the in-flight [`Pulse`] and the public announcements of a round.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mub::{apply_gate, measure_in_basis, mub_vector, Dimension, ModInt, MubLabel, PhaseGate, QuditState};
use crate::rng::{seeded, RandomSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub d: Dimension,
    /// N; the session has N + 1 parties including the distributor.
    pub n_recipients: usize,
    pub n_rounds: usize,
    /// Probability that the distributor sacrifices a valid round as a check round.
    pub check_fraction: f64,
    /// Violation rate above which the session is declared corrupt.
    pub corruption_threshold: f64,
    pub seed: u64,
    /// Probability that a link replaces the carrier with a uniformly random MUB vector.
    pub link_noise: f64,
    /// Probability that a party counts the particles leaving its gate in a round.
    #[serde(default)]
    pub number_check_probability: f64,
}

impl ProtocolConfig {
    pub fn new(d: Dimension, n_recipients: usize) -> Self {
        ProtocolConfig {
            d,
            n_recipients,
            n_rounds: 1000,
            check_fraction: 0.1,
            corruption_threshold: 0.0,
            seed: 0,
            link_noise: 0.0,
            number_check_probability: 0.0,
        }
    }

    pub fn n_parties(&self) -> usize {
        self.n_recipients + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_recipients == 0 {
            return Err(Error::Config("need at least one recipient".into()));
        }
        for (name, v) in [
            ("check_fraction", self.check_fraction),
            ("corruption_threshold", self.corruption_threshold),
            ("link_noise", self.link_noise),
            ("number_check_probability", self.number_check_probability),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} = {v} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// What travels on a link: the protocol qudit plus any extra particles an
/// adversary slipped in alongside it.
#[derive(Debug, Clone)]
pub struct Pulse {
    pub carrier: QuditState,
    pub probes: Vec<QuditState>,
}

impl Pulse {
    pub fn particle_count(&self) -> usize {
        1 + self.probes.len()
    }
}

/// Everything a round makes public: recipients' basis shifts in announcement
/// order, the distributor's validity verdict, and on check rounds the
/// recipients' revealed shifts together with the check outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublicRound {
    pub round_index: usize,
    /// Recipients (parties 2..=N+1) in the order they announced.
    pub order: Vec<usize>,
    /// `y_2..y_{N+1}`, indexed by party.
    pub y: Vec<u32>,
    pub valid: bool,
    pub check: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub check_passed: Option<bool>,
    /// `x_2..x_{N+1}`, only on check rounds.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub alarm: bool,
}

impl PublicRound {
    /// Announced `y_party` for a recipient (party index 2..=N+1).
    pub fn recipient_y(&self, party: usize) -> Option<u32> {
        self.y.get(party.checked_sub(2)?).copied()
    }
}

/// Adversary hook on one or more links.
///
/// The engine hands a tap the in-flight pulse when it crosses one of the tap's
/// links and, once the round is over, the round's public announcements. A tap
/// never sees any party's private data.
pub trait ChannelTap: Send {
    fn links(&self) -> Vec<usize>;

    fn intercept(&mut self, round: usize, link: usize, pulse: &mut Pulse, rng: &mut RandomSource);

    fn observe(&mut self, _public: &PublicRound, _rng: &mut RandomSource) {}
}

/// Taps installed for a session, at most one per link.
#[derive(Default)]
pub struct TapSet<'a> {
    taps: Vec<&'a mut dyn ChannelTap>,
    by_link: BTreeMap<usize, usize>,
}

impl<'a> TapSet<'a> {
    pub fn empty() -> Self {
        TapSet::default()
    }

    pub fn new(taps: Vec<&'a mut dyn ChannelTap>, n_recipients: usize) -> Result<Self> {
        let max = n_recipients + 1;
        let mut by_link = BTreeMap::new();
        for (i, tap) in taps.iter().enumerate() {
            for link in tap.links() {
                if link == 0 || link > max {
                    return Err(Error::LinkOutOfRange { link, max });
                }
                if by_link.insert(link, i).is_some() {
                    return Err(Error::DuplicateTap(link));
                }
            }
        }
        Ok(TapSet { taps, by_link })
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    fn max_link(&self) -> usize {
        self.by_link.keys().next_back().copied().unwrap_or(0)
    }

    fn intercept(&mut self, round: usize, link: usize, pulse: &mut Pulse, rng: &mut RandomSource) {
        if let Some(&i) = self.by_link.get(&link) {
            self.taps[i].intercept(round, link, pulse, rng);
        }
    }

    fn observe(&mut self, public: &PublicRound, rng: &mut RandomSource) {
        for tap in self.taps.iter_mut() {
            tap.observe(public, rng);
        }
    }
}

/// Forced choices for a round. Anything left `None` is drawn uniformly.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundOverrides {
    pub x: Option<Vec<u32>>,
    pub y: Option<Vec<u32>>,
    pub basis: Option<u32>,
    pub check: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_index: usize,
    /// `x_1..x_{N+1}`.
    pub x: Vec<u32>,
    /// `y_1..y_{N+1}`.
    pub y: Vec<u32>,
    #[serde(rename = "J")]
    pub basis: u32,
    #[serde(rename = "a")]
    pub outcome: u32,
    pub valid: bool,
    #[serde(rename = "check")]
    pub is_check_round: bool,
    pub check_passed: Option<bool>,
    pub x1_secret: Option<u32>,
    pub order: Vec<usize>,
    #[serde(rename = "alarm", default)]
    pub particle_alarm: bool,
}

impl RoundRecord {
    pub fn public_view(&self) -> PublicRound {
        PublicRound {
            round_index: self.round_index,
            order: self.order.clone(),
            y: self.y[1..].to_vec(),
            valid: self.valid,
            check: self.is_check_round,
            check_passed: self.check_passed,
            x: self.is_check_round.then(|| self.x[1..].to_vec()),
            alarm: self.particle_alarm,
        }
    }

    /// Recipients' shares `x_2..x_{N+1}`.
    pub fn shares(&self) -> &[u32] {
        &self.x[1..]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Clean,
    Corrupt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionTranscript {
    pub config: ProtocolConfig,
    pub rounds: Vec<RoundRecord>,
    pub verdict: Verdict,
    pub observed_violation_rate: f64,
    pub secret_stream: Vec<u32>,
    pub particle_alarms: usize,
}

impl SessionTranscript {
    pub fn valid_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.valid).count()
    }

    pub fn check_rounds(&self) -> usize {
        self.rounds.iter().filter(|r| r.is_check_round).count()
    }

    pub fn violations(&self) -> usize {
        self.rounds.iter().filter(|r| r.check_passed == Some(false)).count()
    }

    pub fn valid_fraction(&self) -> f64 {
        if self.rounds.is_empty() {
            0.0
        } else {
            self.valid_rounds() as f64 / self.rounds.len() as f64
        }
    }
}

/// Uniform random permutation of recipients `2..=N+1`.
pub fn announce_order(rng: &mut RandomSource, n_recipients: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (2..=n_recipients + 1).collect();
    order.shuffle(rng);
    order
}

/// What the recipients compute by pooling their shares: `-(x_2 + … + x_{N+1}) mod d`.
pub fn reconstruct_secret(shares: &[u32], d: Dimension, n_recipients: usize) -> Result<u32> {
    if shares.len() != n_recipients {
        return Err(Error::ShareCount {
            expected: n_recipients,
            got: shares.len(),
        });
    }
    let sum = shares
        .iter()
        .fold(ModInt::zero(d), |acc, &s| acc + ModInt::new(s as u64, d));
    Ok((-sum).value())
}

pub fn run_round(
    config: &ProtocolConfig,
    round_index: usize,
    rng: &mut RandomSource,
    taps: &mut TapSet<'_>,
) -> RoundRecord {
    run_round_with(config, round_index, rng, taps, &RoundOverrides::default())
}

/// One round with optional forced choices.
///
/// # Panics
///
/// If an override vector does not have N + 1 entries.
pub fn run_round_with(
    config: &ProtocolConfig,
    round_index: usize,
    rng: &mut RandomSource,
    taps: &mut TapSet<'_>,
    forced: &RoundOverrides,
) -> RoundRecord {
    let d = config.d;
    let n = d.get();
    let parties = config.n_parties();
    for v in [&forced.x, &forced.y].into_iter().flatten() {
        assert_eq!(v.len(), parties, "override needs one entry per party");
    }
    debug_assert!(taps.max_link() <= parties);

    let mut pulse = Pulse {
        carrier: mub_vector(d, MubLabel::new(d, 0, 0)),
        probes: Vec::new(),
    };
    let mut x = Vec::with_capacity(parties);
    let mut y = Vec::with_capacity(parties);
    let mut particle_alarm = false;

    for party in 1..=parties {
        let i = party - 1;
        let xn = forced.x.as_ref().map_or_else(|| rng.random_range(0..n), |v| v[i] % n);
        let yn = forced.y.as_ref().map_or_else(|| rng.random_range(0..n), |v| v[i] % n);
        x.push(xn);
        y.push(yn);

        let gate = PhaseGate::new(d, xn as u64, yn as u64);
        pulse.carrier = apply_gate(&pulse.carrier, gate).expect("carrier has dimension d");
        for probe in pulse.probes.iter_mut() {
            if let Ok(p) = apply_gate(probe, gate) {
                *probe = p;
            }
        }
        if config.number_check_probability > 0.0
            && rng.random_bool(config.number_check_probability)
            && pulse.particle_count() > 1
        {
            particle_alarm = true;
        }

        // link `party`
        taps.intercept(round_index, party, &mut pulse, rng);
        if config.link_noise > 0.0 && rng.random_bool(config.link_noise) {
            let l = rng.random_range(0..n) as u64;
            let j = rng.random_range(0..n) as u64;
            pulse.carrier = mub_vector(d, MubLabel::new(d, l, j));
        }
    }

    let basis = forced.basis.map_or_else(|| rng.random_range(0..n), |b| b % n);
    let (a, _) = measure_in_basis(&pulse.carrier, ModInt::new(basis as u64, d), rng);
    let outcome = a.value();

    let sum_y = y.iter().fold(ModInt::zero(d), |acc, &v| acc + ModInt::new(v as u64, d));
    let valid = sum_y.value() == basis;

    let order = announce_order(rng, config.n_recipients);

    let is_check_round = valid
        && forced.check.unwrap_or_else(|| {
            config.check_fraction > 0.0 && rng.random_bool(config.check_fraction)
        });
    let check_passed = is_check_round.then(|| {
        let sum_x = x.iter().fold(ModInt::zero(d), |acc, &v| acc + ModInt::new(v as u64, d));
        sum_x.value() == outcome
    });
    let x1_secret = valid.then(|| (ModInt::new(x[0] as u64, d) - a).value());

    let record = RoundRecord {
        round_index,
        x,
        y,
        basis,
        outcome,
        valid,
        is_check_round,
        check_passed,
        x1_secret,
        order,
        particle_alarm,
    };
    if !taps.is_empty() {
        taps.observe(&record.public_view(), rng);
    }
    record
}

/// Runs `config.n_rounds` rounds from `config.seed` and applies the
/// distributor's security check.
pub fn run_session(config: &ProtocolConfig, taps: &mut TapSet<'_>) -> Result<SessionTranscript> {
    config.validate()?;
    if taps.max_link() > config.n_parties() {
        return Err(Error::LinkOutOfRange {
            link: taps.max_link(),
            max: config.n_parties(),
        });
    }
    let mut rng = seeded(config.seed);
    let rounds: Vec<RoundRecord> = (0..config.n_rounds)
        .map(|i| run_round(config, i, &mut rng, taps))
        .collect();
    Ok(finish_session(config.clone(), rounds))
}

/// Computes verdict, violation rate and secret stream for a list of rounds.
pub fn finish_session(config: ProtocolConfig, rounds: Vec<RoundRecord>) -> SessionTranscript {
    let checks = rounds.iter().filter(|r| r.is_check_round).count();
    let violations = rounds.iter().filter(|r| r.check_passed == Some(false)).count();
    let observed_violation_rate = if checks == 0 {
        0.0
    } else {
        violations as f64 / checks as f64
    };
    let particle_alarms = rounds.iter().filter(|r| r.particle_alarm).count();
    let verdict = if observed_violation_rate > config.corruption_threshold || particle_alarms > 0 {
        Verdict::Corrupt
    } else {
        Verdict::Clean
    };
    let secret_stream = rounds
        .iter()
        .filter(|r| r.valid && !r.is_check_round)
        .filter_map(|r| r.x1_secret)
        .collect();
    SessionTranscript {
        config,
        rounds,
        verdict,
        observed_violation_rate,
        secret_stream,
        particle_alarms,
    }
}
