//! Swap the distributor's qudit for one of Eve's own on link 1, let the
//! recipients act on Eve's qudit, and hand the distributor back its original
//! qudit on the return link. After the recipients announce their `y_n` Eve
//! measures her qudit in basis `Σ_{n≥2} y_n` and reads off `Σ_{n≥2} x_n`
//! exactly. The distributor has already measured by then, so the returned
//! qudit cannot be adapted to the announcements and the check catches it.

use super::{sum_mod, Adversary, AdversaryConfig, AttackKind, AttackModel, EveGuess};
use crate::error::Result;
use crate::mub::{measure_in_basis, mub_vector, Dimension, ModInt, MubLabel, QuditState};
use crate::protocol::{ChannelTap, ProtocolConfig, PublicRound, Pulse, RoundRecord};
use crate::rng::RandomSource;

pub struct SubstituteQuditModel;

#[derive(Debug)]
pub struct SubstituteQudit {
    d: Dimension,
    return_link: usize,
    retained: Option<QuditState>,
    kept: Option<(usize, QuditState)>,
    guesses: Vec<EveGuess>,
    attacked: usize,
}

impl SubstituteQudit {
    pub fn new(d: Dimension, n_recipients: usize) -> Self {
        SubstituteQudit {
            d,
            return_link: n_recipients + 1,
            retained: None,
            kept: None,
            guesses: Vec::new(),
            attacked: 0,
        }
    }
}

impl ChannelTap for SubstituteQudit {
    fn links(&self) -> Vec<usize> {
        vec![1, self.return_link]
    }

    fn intercept(&mut self, round: usize, link: usize, pulse: &mut Pulse, _rng: &mut RandomSource) {
        if link == 1 {
            let own = mub_vector(self.d, MubLabel::new(self.d, 0, 0));
            self.retained = Some(std::mem::replace(&mut pulse.carrier, own));
            self.attacked += 1;
        } else if let Some(original) = self.retained.take() {
            let circulated = std::mem::replace(&mut pulse.carrier, original);
            self.kept = Some((round, circulated));
        }
    }

    fn observe(&mut self, public: &PublicRound, rng: &mut RandomSource) {
        let Some((round, qudit)) = self.kept.take() else {
            return;
        };
        if round != public.round_index {
            return;
        }
        let basis = sum_mod(self.d, &public.y);
        let (value, _) = measure_in_basis(&qudit, ModInt::new(basis as u64, self.d), rng);
        self.guesses.push(EveGuess {
            round_index: round,
            value: value.value(),
        });
    }
}

impl Adversary for SubstituteQudit {
    fn guesses(&self) -> &[EveGuess] {
        &self.guesses
    }

    fn rounds_attacked(&self) -> usize {
        self.attacked
    }
}

impl AttackModel for SubstituteQuditModel {
    fn kind(&self) -> AttackKind {
        AttackKind::SubstituteQudit
    }

    fn prepare(&self, _: &AdversaryConfig, _: &mut ProtocolConfig) -> Result<()> {
        Ok(())
    }

    fn build(&self, _: &AdversaryConfig, protocol: &ProtocolConfig) -> Result<Box<dyn Adversary>> {
        Ok(Box::new(SubstituteQudit::new(protocol.d, protocol.n_recipients)))
    }

    /// `x_2 + … + x_{N+1}`.
    fn target(&self, _: &AdversaryConfig, d: Dimension, round: &RoundRecord) -> u32 {
        sum_mod(d, &round.x[1..])
    }
}
