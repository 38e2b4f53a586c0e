//! A probe qudit sent along with the carrier through party k's gate. The
//! probe enters on link k - 1 prepared as `|e_0^(0)>`, leaves party k's gate
//! as `|e_{x_k}^(y_k)>`, and is pulled off on link k. Once `y_k` is announced
//! Eve measures it in that basis and learns `x_k`. Parties that count the
//! particles leaving their gate see two instead of one and raise an alarm.

use super::{Adversary, AdversaryConfig, AttackKind, AttackModel, EveGuess, Evidence};
use crate::error::{Error, Result};
use crate::mub::{measure_in_basis, mub_vector, Dimension, ModInt, MubLabel, QuditState};
use crate::protocol::{ChannelTap, ProtocolConfig, PublicRound, Pulse, RoundRecord, SessionTranscript};
use crate::rng::RandomSource;

pub struct MultiPulseModel;

/// Entry of the probe ledger: what Eve learned about party k's gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbeRecord {
    pub round_index: usize,
    pub x: u32,
    pub y: u32,
}

#[derive(Debug)]
pub struct MultiPulse {
    d: Dimension,
    party: usize,
    in_flight: Option<(usize, QuditState)>,
    ledger: Vec<ProbeRecord>,
    guesses: Vec<EveGuess>,
    attacked: usize,
}

impl MultiPulse {
    pub fn new(d: Dimension, party: usize) -> Self {
        MultiPulse {
            d,
            party,
            in_flight: None,
            ledger: Vec::new(),
            guesses: Vec::new(),
            attacked: 0,
        }
    }

    pub fn ledger(&self) -> &[ProbeRecord] {
        &self.ledger
    }
}

impl ChannelTap for MultiPulse {
    fn links(&self) -> Vec<usize> {
        vec![self.party - 1, self.party]
    }

    fn intercept(&mut self, round: usize, link: usize, pulse: &mut Pulse, _rng: &mut RandomSource) {
        if link == self.party - 1 {
            pulse.probes.push(mub_vector(self.d, MubLabel::new(self.d, 0, 0)));
            self.attacked += 1;
        } else if let Some(probe) = pulse.probes.pop() {
            self.in_flight = Some((round, probe));
        }
    }

    fn observe(&mut self, public: &PublicRound, rng: &mut RandomSource) {
        let Some((round, probe)) = self.in_flight.take() else {
            return;
        };
        let Some(y) = public.recipient_y(self.party) else {
            return;
        };
        if round != public.round_index {
            return;
        }
        let (x, _) = measure_in_basis(&probe, ModInt::new(y as u64, self.d), rng);
        self.ledger.push(ProbeRecord {
            round_index: round,
            x: x.value(),
            y,
        });
        self.guesses.push(EveGuess {
            round_index: round,
            value: x.value(),
        });
    }
}

impl Adversary for MultiPulse {
    fn guesses(&self) -> &[EveGuess] {
        &self.guesses
    }

    fn rounds_attacked(&self) -> usize {
        self.attacked
    }
}

impl AttackModel for MultiPulseModel {
    fn kind(&self) -> AttackKind {
        AttackKind::MultiPulse
    }

    fn prepare(&self, adv: &AdversaryConfig, protocol: &mut ProtocolConfig) -> Result<()> {
        adv.check_link(protocol.n_recipients)?;
        if adv.link < 2 {
            return Err(Error::Config(
                "multi-pulse probe targets a recipient's gate (link >= 2)".into(),
            ));
        }
        if !(0.0..=1.0).contains(&adv.num_check_probability) {
            return Err(Error::Config("num_check_probability outside [0, 1]".into()));
        }
        protocol.number_check_probability = adv.num_check_probability;
        Ok(())
    }

    fn build(&self, adv: &AdversaryConfig, protocol: &ProtocolConfig) -> Result<Box<dyn Adversary>> {
        Ok(Box::new(MultiPulse::new(protocol.d, adv.link)))
    }

    /// `x_k` of the probed party.
    fn target(&self, adv: &AdversaryConfig, _: Dimension, round: &RoundRecord) -> u32 {
        round.x[adv.link - 1]
    }

    /// Particle alarms over attacked rounds.
    fn evidence(&self, transcript: &SessionTranscript) -> Evidence {
        Evidence {
            hits: transcript.particle_alarms,
            trials: transcript.rounds.len(),
        }
    }
}
