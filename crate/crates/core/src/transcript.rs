//! Line-delimited JSON serialization of session transcripts.
//!
//! Layout, one JSON object per line:
//!
//! 1. `{"generated_at": <unix seconds>, "view": "full"|"public"}` — the only
//!    line that may differ between two runs of the same config and seed;
//! 2. `{"config": {...}}` — the public view omits the seed and noise settings;
//! 3. one line per round;
//! 4. `{"summary": {...}}`.
//!
//! Round lines in the full view carry `round_index, y, J, x, a, valid, check,
//! check_passed, x1_secret, order`. The public view keeps only what the
//! protocol announces: recipients' `y`, `valid`, `check`, `check_passed`, and
//! on check rounds the recipients' revealed `x`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::json;

use crate::protocol::{SessionTranscript, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TranscriptView {
    Full,
    Public,
}

impl TranscriptView {
    pub fn as_str(self) -> &'static str {
        match self {
            TranscriptView::Full => "full",
            TranscriptView::Public => "public",
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    verdict: Verdict,
    observed_violation_rate: f64,
    rounds: usize,
    valid_rounds: usize,
    check_rounds: usize,
    violations: usize,
    particle_alarms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    secret_stream: Option<&'a [u32]>,
}

pub fn write_jsonl<W: Write>(
    transcript: &SessionTranscript,
    view: TranscriptView,
    generated_at: u64,
    mut out: W,
) -> io::Result<()> {
    writeln!(
        out,
        "{}",
        json!({ "generated_at": generated_at, "view": view.as_str() })
    )?;

    let c = &transcript.config;
    let config = match view {
        TranscriptView::Full => serde_json::to_value(c)?,
        TranscriptView::Public => json!({
            "d": c.d.get(),
            "n_recipients": c.n_recipients,
            "n_rounds": c.n_rounds,
            "check_fraction": c.check_fraction,
            "corruption_threshold": c.corruption_threshold,
        }),
    };
    writeln!(out, "{}", json!({ "config": config }))?;

    for r in &transcript.rounds {
        let line = match view {
            TranscriptView::Full => serde_json::to_string(r)?,
            TranscriptView::Public => serde_json::to_string(&r.public_view())?,
        };
        writeln!(out, "{line}")?;
    }

    let summary = Summary {
        verdict: transcript.verdict,
        observed_violation_rate: transcript.observed_violation_rate,
        rounds: transcript.rounds.len(),
        valid_rounds: transcript.valid_rounds(),
        check_rounds: transcript.check_rounds(),
        violations: transcript.violations(),
        particle_alarms: transcript.particle_alarms,
        secret_stream: (view == TranscriptView::Full).then_some(&transcript.secret_stream[..]),
    };
    writeln!(out, "{}", json!({ "summary": summary }))?;
    Ok(())
}

pub fn to_jsonl_string(transcript: &SessionTranscript, view: TranscriptView, generated_at: u64) -> String {
    let mut buf = Vec::new();
    write_jsonl(transcript, view, generated_at, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Drops the timestamp header line.
pub fn strip_header(jsonl: &str) -> &str {
    jsonl.split_once('\n').map_or("", |(_, rest)| rest)
}
