//! Eavesdropping attacks installed as channel taps.
//!
//! Each attack is an [`AttackModel`] registered under a name in an
//! [`AttackRegistry`]. A model builds the per-session [`Adversary`] (the tap
//! that actually runs inside the relay and only ever sees in-flight pulses and
//! public announcements) and, on the harness side, knows what quantity the
//! adversary is trying to learn and what counts as evidence against it.

mod intercept_resend;
mod multi_pulse;
mod none;
mod substitute;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use intercept_resend::{InterceptResend, InterceptResendModel};
pub use multi_pulse::{MultiPulse, MultiPulseModel};
pub use none::{NoAttack, NoAttackModel};
pub use substitute::{SubstituteQudit, SubstituteQuditModel};

use crate::analysis::stats::{wilson_interval, CI_Z};
use crate::error::{Error, Result};
use crate::mub::{Dimension, ModInt};
use crate::protocol::{run_session, ChannelTap, ProtocolConfig, RoundRecord, SessionTranscript, TapSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    None,
    InterceptResend,
    SubstituteQudit,
    MultiPulse,
}

impl AttackKind {
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::InterceptResend => "intercept-resend",
            AttackKind::SubstituteQudit => "substitute-qudit",
            AttackKind::MultiPulse => "multi-pulse",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match normalize(s).as_str() {
            "none" => Ok(AttackKind::None),
            "intercept-resend" => Ok(AttackKind::InterceptResend),
            "substitute-qudit" => Ok(AttackKind::SubstituteQudit),
            "multi-pulse" => Ok(AttackKind::MultiPulse),
            _ => Err(Error::UnknownAttack(s.to_string())),
        }
    }
}

fn normalize(s: &str) -> String {
    s.trim().to_ascii_lowercase().replace('_', "-")
}

/// How the intercept-resend adversary picks her measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisStrategy {
    UniformRandom,
    Fixed(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryConfig {
    pub kind: AttackKind,
    /// Link to attack. For the multi-pulse attack this is also the party
    /// whose gate the probe rides through (the probe enters on link - 1).
    pub link: usize,
    pub basis_strategy: BasisStrategy,
    /// Per-round probability that a party counts particles at its gate exit.
    pub num_check_probability: f64,
}

impl AdversaryConfig {
    pub fn new(kind: AttackKind, link: usize) -> Self {
        AdversaryConfig {
            kind,
            link,
            basis_strategy: BasisStrategy::UniformRandom,
            num_check_probability: 0.0,
        }
    }

    fn check_link(&self, n_recipients: usize) -> Result<()> {
        let max = n_recipients + 1;
        if self.link == 0 || self.link > max {
            return Err(Error::LinkOutOfRange { link: self.link, max });
        }
        Ok(())
    }
}

/// One inference the adversary commits to after a round's announcements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EveGuess {
    pub round_index: usize,
    pub value: u32,
}

/// The adversary as installed in a session.
pub trait Adversary: ChannelTap {
    fn guesses(&self) -> &[EveGuess];

    fn rounds_attacked(&self) -> usize;
}

/// Hits over trials of whatever the honest parties use to notice the attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Evidence {
    pub hits: usize,
    pub trials: usize,
}

impl Evidence {
    /// Failed checks over valid check rounds.
    pub fn from_checks(t: &SessionTranscript) -> Self {
        Evidence {
            hits: t.violations(),
            trials: t.check_rounds(),
        }
    }
}

pub trait AttackModel: Send + Sync {
    fn kind(&self) -> AttackKind;

    fn name(&self) -> &'static str {
        self.kind().name()
    }

    /// Adjusts the honest parties' configuration for this attack (for
    /// instance enabling a countermeasure) and validates the pairing.
    fn prepare(&self, adv: &AdversaryConfig, protocol: &mut ProtocolConfig) -> Result<()> {
        adv.check_link(protocol.n_recipients)
    }

    fn build(&self, adv: &AdversaryConfig, protocol: &ProtocolConfig) -> Result<Box<dyn Adversary>>;

    /// The private quantity the adversary tries to learn in `round`.
    fn target(&self, adv: &AdversaryConfig, d: Dimension, round: &RoundRecord) -> u32;

    fn evidence(&self, transcript: &SessionTranscript) -> Evidence {
        Evidence::from_checks(transcript)
    }
}

pub(crate) fn sum_mod(d: Dimension, values: &[u32]) -> u32 {
    values
        .iter()
        .fold(ModInt::zero(d), |acc, &v| acc + ModInt::new(v as u64, d))
        .value()
}

/// Attack models by name.
pub struct AttackRegistry {
    models: BTreeMap<String, Box<dyn AttackModel>>,
}

impl AttackRegistry {
    pub fn empty() -> Self {
        AttackRegistry { models: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = AttackRegistry::empty();
        r.register(Box::new(NoAttackModel));
        r.register(Box::new(InterceptResendModel));
        r.register(Box::new(SubstituteQuditModel));
        r.register(Box::new(MultiPulseModel));
        r
    }

    /// Adds or replaces the model registered under its name.
    pub fn register(&mut self, model: Box<dyn AttackModel>) {
        self.models.insert(model.name().to_string(), model);
    }

    pub fn get(&self, name: &str) -> Result<&dyn AttackModel> {
        self.models
            .get(&normalize(name))
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownAttack(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.models.keys().map(String::as_str).collect()
    }
}

impl Default for AttackRegistry {
    fn default() -> Self {
        AttackRegistry::builtin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackReport {
    pub kind: String,
    pub link: usize,
    pub rounds: usize,
    pub rounds_attacked: usize,
    pub valid_rounds: usize,
    /// Fraction of valid rounds where the adversary's inference was right.
    pub guess_rate: f64,
    /// Evidence hits over evidence trials (failed checks per valid check
    /// round, or particle alarms per attacked round for the multi-pulse attack).
    pub detection_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: usize,
    pub detection_hits: usize,
    pub detected: bool,
}

impl AttackReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report is plain data")
    }
}

pub struct AttackOutcome {
    pub report: AttackReport,
    pub transcript: SessionTranscript,
}

/// Runs one session of `n_rounds` with the attack installed and scores it.
pub fn evaluate_attack(config: &ProtocolConfig, adv: &AdversaryConfig, n_rounds: usize) -> Result<AttackReport> {
    evaluate_attack_with(&AttackRegistry::builtin(), config, adv, n_rounds).map(|o| o.report)
}

pub fn evaluate_attack_with(
    registry: &AttackRegistry,
    config: &ProtocolConfig,
    adv: &AdversaryConfig,
    n_rounds: usize,
) -> Result<AttackOutcome> {
    let model = registry.get(adv.kind.name())?;
    let mut config = config.clone();
    config.n_rounds = n_rounds;
    model.prepare(adv, &mut config)?;
    let mut eve = model.build(adv, &config)?;

    let transcript = {
        let tap: &mut dyn ChannelTap = &mut *eve;
        let mut taps = TapSet::new(vec![tap], config.n_recipients)?;
        run_session(&config, &mut taps)?
    };

    let guesses: BTreeMap<usize, u32> = eve
        .guesses()
        .iter()
        .map(|g| (g.round_index, g.value))
        .collect();
    let valid: Vec<&RoundRecord> = transcript.rounds.iter().filter(|r| r.valid).collect();
    let correct = valid
        .iter()
        .filter(|r| guesses.get(&r.round_index) == Some(&model.target(adv, config.d, r)))
        .count();
    let guess_rate = if valid.is_empty() {
        0.0
    } else {
        correct as f64 / valid.len() as f64
    };

    let ev = model.evidence(&transcript);
    let detection_rate = if ev.trials == 0 {
        0.0
    } else {
        ev.hits as f64 / ev.trials as f64
    };
    let (ci_low, ci_high) = wilson_interval(ev.hits, ev.trials, CI_Z);

    let report = AttackReport {
        kind: model.name().to_string(),
        link: adv.link,
        rounds: transcript.rounds.len(),
        rounds_attacked: eve.rounds_attacked(),
        valid_rounds: valid.len(),
        guess_rate,
        detection_rate,
        ci_low,
        ci_high,
        n_samples: ev.trials,
        detection_hits: ev.hits,
        detected: transcript.verdict == crate::protocol::Verdict::Corrupt,
    };
    Ok(AttackOutcome { report, transcript })
}
