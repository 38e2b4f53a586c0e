//! Pooled per-configuration statistics over session transcripts.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;

use super::stats::{wilson_interval, CI_Z};
use crate::protocol::SessionTranscript;

pub const SUMMARY_HEADER: &str = "scheme,d,N,metric,value,ci_low,ci_high,n_samples";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scheme: String,
    pub d: u32,
    #[serde(rename = "N")]
    pub n: usize,
    pub metric: String,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: usize,
}

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.scheme, self.d, self.n, self.metric, self.value, self.ci_low, self.ci_high, self.n_samples
        )
    }
}

#[derive(Default)]
struct Counts {
    rounds: usize,
    valid: usize,
    checks: usize,
    violations: usize,
    secret_digits: usize,
}

/// Valid-round rate, violation rate and secret throughput (digits per round)
/// for each `(d, N)` present, pooled over all matching transcripts. Rates
/// carry 95% Wilson intervals.
pub fn aggregate(transcripts: &[SessionTranscript]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(u32, usize), Counts> = BTreeMap::new();
    for t in transcripts {
        let c = groups.entry((t.config.d.get(), t.config.n_recipients)).or_default();
        c.rounds += t.rounds.len();
        c.valid += t.valid_rounds();
        c.checks += t.check_rounds();
        c.violations += t.violations();
        c.secret_digits += t.secret_stream.len();
    }

    let mut rows = Vec::new();
    for ((d, n), c) in groups {
        let mut push = |metric: &str, hits: usize, trials: usize| {
            let value = if trials == 0 { 0.0 } else { hits as f64 / trials as f64 };
            let (ci_low, ci_high) = wilson_interval(hits, trials, CI_Z);
            rows.push(SummaryRow {
                scheme: "single_qudit".into(),
                d,
                n,
                metric: metric.into(),
                value,
                ci_low,
                ci_high,
                n_samples: trials,
            });
        };
        push("valid_rate", c.valid, c.rounds);
        push("violation_rate", c.violations, c.checks);
        push("secret_throughput", c.secret_digits, c.rounds);
    }
    rows
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::stats::binomial_z;
    use crate::mub::Dimension;
    use crate::protocol::{run_session, ProtocolConfig, TapSet};

    #[test]
    fn empty_input() {
        assert!(aggregate(&[]).is_empty());
        let mut buf = Vec::new();
        write_summary_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{SUMMARY_HEADER}\n"));
    }

    #[test]
    fn honest_rates() {
        let d = Dimension::new(3).unwrap();
        let runs: Vec<_> = (0..4)
            .map(|seed| {
                let mut c = ProtocolConfig::new(d, 2);
                c.n_rounds = 5000;
                c.check_fraction = 0.25;
                c.seed = seed;
                run_session(&c, &mut TapSet::empty()).unwrap()
            })
            .collect();
        let rows = aggregate(&runs);
        assert_eq!(rows.len(), 3);
        let get = |m: &str| rows.iter().find(|r| r.metric == m).unwrap();

        let valid = get("valid_rate");
        assert_eq!(valid.n_samples, 20_000);
        let hits = (valid.value * 20_000.0).round() as usize;
        assert!(binomial_z(hits, 20_000, 1.0 / 3.0).abs() < 3.0);
        assert!(valid.ci_low < 1.0 / 3.0 && 1.0 / 3.0 < valid.ci_high);

        assert_eq!(get("violation_rate").value, 0.0);

        // (1/d)(1 - check_fraction) = 0.25
        let tp = get("secret_throughput");
        let hits = (tp.value * 20_000.0).round() as usize;
        assert!(binomial_z(hits, 20_000, 0.25).abs() < 3.0, "{}", tp.value);
    }
}
