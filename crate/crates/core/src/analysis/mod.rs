//! Efficiency calculators, the classical Shamir baseline, and statistics
//! over session transcripts.

pub mod aggregate;
pub mod efficiency;
pub mod shamir;
pub mod stats;

pub use aggregate::{aggregate, write_summary_csv, SummaryRow, SUMMARY_HEADER};
pub use efficiency::{detection_scaling, qkd_rounds, qkd_success, Scheme};
pub use shamir::{shamir_reconstruct, shamir_share, ShamirParams};
