use super::{Adversary, AdversaryConfig, AttackKind, AttackModel, EveGuess};
use crate::error::Result;
use crate::mub::Dimension;
use crate::protocol::{ChannelTap, ProtocolConfig, Pulse, RoundRecord};
use crate::rng::RandomSource;

/// Baseline: no tap on any link.
pub struct NoAttackModel;

#[derive(Debug, Default)]
pub struct NoAttack;

impl ChannelTap for NoAttack {
    fn links(&self) -> Vec<usize> {
        Vec::new()
    }

    fn intercept(&mut self, _: usize, _: usize, _: &mut Pulse, _: &mut RandomSource) {}
}

impl Adversary for NoAttack {
    fn guesses(&self) -> &[EveGuess] {
        &[]
    }

    fn rounds_attacked(&self) -> usize {
        0
    }
}

impl AttackModel for NoAttackModel {
    fn kind(&self) -> AttackKind {
        AttackKind::None
    }

    fn prepare(&self, _: &AdversaryConfig, _: &mut ProtocolConfig) -> Result<()> {
        Ok(())
    }

    fn build(&self, _: &AdversaryConfig, _: &ProtocolConfig) -> Result<Box<dyn Adversary>> {
        Ok(Box::new(NoAttack))
    }

    fn target(&self, _: &AdversaryConfig, _: Dimension, _: &RoundRecord) -> u32 {
        0
    }
}
