//! Measure the carrier on one link in a guessed basis and forward the
//! collapsed state. A matching basis leaves the carrier untouched; otherwise
//! the forwarded vector sits in the wrong basis and the distributor's outcome
//! becomes uniform.

use rand::Rng;

use super::{sum_mod, Adversary, AdversaryConfig, AttackKind, AttackModel, BasisStrategy, EveGuess};
use crate::error::Result;
use crate::mub::{measure_in_basis, Dimension, ModInt};
use crate::protocol::{ChannelTap, ProtocolConfig, PublicRound, Pulse, RoundRecord};
use crate::rng::RandomSource;

pub struct InterceptResendModel;

#[derive(Debug)]
pub struct InterceptResend {
    d: Dimension,
    link: usize,
    strategy: BasisStrategy,
    pending: Option<(usize, u32)>,
    guesses: Vec<EveGuess>,
    attacked: usize,
}

impl InterceptResend {
    pub fn new(d: Dimension, link: usize, strategy: BasisStrategy) -> Self {
        InterceptResend {
            d,
            link,
            strategy,
            pending: None,
            guesses: Vec::new(),
            attacked: 0,
        }
    }
}

impl ChannelTap for InterceptResend {
    fn links(&self) -> Vec<usize> {
        vec![self.link]
    }

    fn intercept(&mut self, round: usize, _link: usize, pulse: &mut Pulse, rng: &mut RandomSource) {
        let basis = match self.strategy {
            BasisStrategy::UniformRandom => rng.random_range(0..self.d.get()),
            BasisStrategy::Fixed(j) => j % self.d.get(),
        };
        let (outcome, collapsed) = measure_in_basis(&pulse.carrier, ModInt::new(basis as u64, self.d), rng);
        pulse.carrier = collapsed;
        self.pending = Some((round, outcome.value()));
        self.attacked += 1;
    }

    fn observe(&mut self, public: &PublicRound, _rng: &mut RandomSource) {
        // her outcome is her estimate of the carrier's vector index on the link
        if let Some((round, value)) = self.pending.take() {
            if round == public.round_index {
                self.guesses.push(EveGuess { round_index: round, value });
            }
        }
    }
}

impl Adversary for InterceptResend {
    fn guesses(&self) -> &[EveGuess] {
        &self.guesses
    }

    fn rounds_attacked(&self) -> usize {
        self.attacked
    }
}

impl AttackModel for InterceptResendModel {
    fn kind(&self) -> AttackKind {
        AttackKind::InterceptResend
    }

    fn build(&self, adv: &AdversaryConfig, protocol: &ProtocolConfig) -> Result<Box<dyn Adversary>> {
        adv.check_link(protocol.n_recipients)?;
        Ok(Box::new(InterceptResend::new(protocol.d, adv.link, adv.basis_strategy)))
    }

    /// Vector index of the carrier on the tapped link: `x_1 + … + x_link`.
    fn target(&self, adv: &AdversaryConfig, d: Dimension, round: &RoundRecord) -> u32 {
        sum_mod(d, &round.x[..adv.link])
    }
}
