//! Simulation of (N, N) secret sharing with a single qudit of odd prime
//! dimension relayed through all parties, together with the GHZ-based
//! reference protocol, eavesdropping attacks, and efficiency comparisons.

pub mod adversary;
pub mod analysis;
pub mod error;
pub mod ghz;
pub mod mub;
pub mod protocol;
pub mod rng;
pub mod transcript;

pub use error::{Error, Result};
pub use mub::{
    apply_gate, classify, measure_in_basis, mub_vector, overlap_sq, Dimension, ModInt, MubLabel,
    PhaseGate, QuditState, CLASSIFY_TOL,
};
pub use protocol::{
    announce_order, reconstruct_secret, run_round, run_round_with, run_session, ChannelTap,
    ProtocolConfig, PublicRound, Pulse, RoundOverrides, RoundRecord, SessionTranscript, TapSet,
    Verdict,
};
pub use rng::{seeded, RandomSource};
