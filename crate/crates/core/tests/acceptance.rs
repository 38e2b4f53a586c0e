//! Exit criteria for the simulator. Runs every criterion, prints one
//! PASS/FAIL line each, and exits non-zero if any fails.

mod common;

use std::collections::HashMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{intercept_resend_detection, substitute_detection, three_sigma, Q};
use qss_core::adversary::{evaluate_attack, AdversaryConfig, AttackKind};
use qss_core::analysis::stats::chi_square_gof;
use qss_core::analysis::{
    detection_scaling, qkd_rounds, qkd_success, shamir_reconstruct, shamir_share, Scheme, ShamirParams,
};
use qss_core::ghz::{conditional_table, equivalence_map, joint_prob, GhzSpec, JointOutcome};
use qss_core::transcript::{strip_header, to_jsonl_string, TranscriptView};
use qss_core::{
    apply_gate, classify, mub_vector, overlap_sq, reconstruct_secret, run_round, run_round_with,
    run_session, seeded, Dimension, MubLabel, PhaseGate, ProtocolConfig, RoundOverrides, TapSet,
    Verdict, CLASSIFY_TOL,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn dim(d: u32) -> Dimension {
    Dimension::new(d).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn honest(d: u32, n: usize, rounds: usize, seed: u64, check_fraction: f64) -> qss_core::SessionTranscript {
    let mut c = ProtocolConfig::new(dim(d), n);
    c.n_rounds = rounds;
    c.seed = seed;
    c.check_fraction = check_fraction;
    run_session(&c, &mut TapSet::empty()).unwrap()
}

fn mub_algebra() -> Outcome {
    let mut max_err: f64 = 0.0;
    let mut pairs = 0usize;
    for d in [3u32, 5, 7, 11, 13] {
        let dd = dim(d);
        let labels: Vec<_> = MubLabel::all(dd).collect();
        let vecs: Vec<_> = labels.iter().map(|&l| mub_vector(dd, l)).collect();
        for a in 0..labels.len() {
            for b in a + 1..labels.len() {
                if labels[a].j != labels[b].j {
                    let o = overlap_sq(&vecs[a], &vecs[b]).unwrap();
                    max_err = max_err.max((o - 1.0 / d as f64).abs());
                    pairs += 1;
                }
            }
        }
    }
    ensure(max_err <= 1e-9, || format!("max overlap error {max_err:e}"))?;

    let mut cases = 0usize;
    for d in [3u32, 5, 7] {
        let dd = dim(d);
        for label in MubLabel::all(dd) {
            let s = mub_vector(dd, label);
            for x in 0..d as u64 {
                for y in 0..d as u64 {
                    let g = PhaseGate::new(dd, x, y);
                    let got = classify(&apply_gate(&s, g).unwrap(), CLASSIFY_TOL);
                    let want = MubLabel { l: label.l + g.x, j: label.j + g.y };
                    ensure(got == Some(want), || format!("{label} under ({x},{y}) gave {got:?}"))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} unbiased pairs, max error {max_err:.1e}; {cases} cyclic cases"))
}

fn valid_rate() -> Outcome {
    let mut parts = Vec::new();
    for (d, seed) in [(3u32, 101u64), (5, 102)] {
        let t = honest(d, 3, 100_000, seed, 0.1);
        let v = t.valid_rounds();
        let p = 1.0 / d as f64;
        ensure(three_sigma(v, 100_000, p), || format!("d={d}: {v} valid of 100000"))?;
        parts.push(format!("d={d}: {:.4} (expect {:.4})", v as f64 / 1e5, p));
    }
    Ok(parts.join(", "))
}

fn perfect_correlation() -> Outcome {
    let cfg = {
        let mut c = ProtocolConfig::new(dim(5), 4);
        c.check_fraction = 0.0;
        c
    };
    let mut rng = seeded(303);
    let (mut valid, mut bad) = (0usize, 0usize);
    for i in 0..100_000 {
        let r = run_round(&cfg, i, &mut rng, &mut TapSet::empty());
        if r.valid {
            valid += 1;
            if r.x.iter().sum::<u32>() % 5 != r.outcome {
                bad += 1;
            }
        }
    }
    ensure(bad == 0 && valid > 0, || format!("{bad} of {valid} valid rounds violate the correlation"))?;
    Ok(format!("{valid} valid rounds, 0 exceptions"))
}

fn reconstruction() -> Outcome {
    let mut checked = 0usize;
    for (d, n, seed) in [(3u32, 2usize, 41u64), (7, 5, 42), (13, 9, 43)] {
        let t = honest(d, n, 30_000, seed, 0.2);
        for r in t.rounds.iter().filter(|r| r.valid && !r.is_check_round) {
            let got = reconstruct_secret(r.shares(), dim(d), n).unwrap();
            ensure(Some(got) == r.x1_secret, || format!("round {} d={d}: {got} vs {:?}", r.round_index, r.x1_secret))?;
            checked += 1;
        }
        ensure(t.secret_stream.len() == t.valid_rounds() - t.check_rounds(), || "secret stream length".into())?;
    }
    Ok(format!("{checked} valid non-check rounds agree"))
}

/// Enumerates every (x, y, J) at d = 3, N = 2 through the simulator and
/// tabulates the distributor's secret against each conditioning view.
fn secrecy() -> Outcome {
    let d = 3u32;
    let cfg = ProtocolConfig::new(dim(d), 2);
    let mut rng = seeded(0);
    // key: (recipient index, y2, y3, x_r, y_r) -> counts of x1_secret
    let mut table: HashMap<(usize, u32, u32, u32), [i128; 3]> = HashMap::new();
    let mut valid = 0;
    for code in 0..3u32.pow(7) {
        let mut c = code;
        let mut take = || {
            let v = c % 3;
            c /= 3;
            v
        };
        let x = vec![take(), take(), take()];
        let y = vec![take(), take(), take()];
        let basis = take();
        let forced = RoundOverrides { x: Some(x.clone()), y: Some(y.clone()), basis: Some(basis), check: Some(false) };
        let r = run_round_with(&cfg, 0, &mut rng, &mut TapSet::empty(), &forced);
        if !r.valid {
            continue;
        }
        valid += 1;
        let s = r.x1_secret.ok_or("valid round without secret")? as usize;
        for recipient in [1usize, 2] {
            // y_r is already part of the public announcement
            let key = (recipient, y[1], y[2], x[recipient]);
            table.entry(key).or_insert([0; 3])[s] += 1;
        }
    }
    for (key, counts) in &table {
        let total: i128 = counts.iter().sum();
        for &c in counts {
            ensure(Q::new(c, total) == Q::new(1, 3), || format!("view {key:?}: counts {counts:?}"))?;
        }
    }
    Ok(format!("{valid} valid assignments, {} conditioning views, all exactly uniform", table.len()))
}

fn ghz_oracle() -> Outcome {
    for d in [3u32, 5] {
        for parties in [2usize, 3] {
            let spec = GhzSpec::new(dim(d), parties).unwrap();
            for ji in 0..spec.tuples() {
                let j = spec.tuple(ji);
                let table = conditional_table(&spec, &j);
                let total: f64 = table.iter().sum();
                ensure((total - 1.0).abs() <= 1e-9, || format!("d={d} n={parties} j={j:?}: sum {total}"))?;
                let balanced = j.iter().sum::<u32>() % d == 0;
                if balanced {
                    let level = 1.0 / (d as f64).powi(parties as i32 - 1);
                    for (li, p) in table.iter().enumerate() {
                        let l = spec.tuple(li);
                        if *p > 0.0 {
                            ensure(l.iter().sum::<u32>() % d == 0, || format!("support off Σl≡0: {l:?}"))?;
                            ensure((p - level).abs() < 1e-9, || format!("unequal support prob {p}"))?;
                        }
                    }
                } else {
                    let level = 1.0 / (d as f64).powi(parties as i32);
                    ensure(table.iter().all(|p| (p - level).abs() < 1e-9), || format!("non-uniform at j={j:?}"))?;
                }
            }
        }
    }

    // cross-protocol: mapped single-qudit rounds vs P(j, l | valid)
    let d = 3u32;
    let spec = GhzSpec::new(dim(d), 3).unwrap();
    let cfg = ProtocolConfig::new(dim(d), 2);
    let mut rng = seeded(606);
    let cells = spec.tuples() * spec.tuples();
    let mut observed = vec![0usize; cells];
    let mut samples = 0usize;
    let mut i = 0;
    while samples < 100_000 {
        let r = run_round(&cfg, i, &mut rng, &mut TapSet::empty());
        i += 1;
        if r.valid {
            let o = equivalence_map(&r, dim(d)).unwrap();
            observed[spec.index_of(&o.j) * spec.tuples() + spec.index_of(&o.l)] += 1;
            samples += 1;
        }
    }
    let j_weight = 1.0 / (d as f64).powi(2);
    let expected: Vec<f64> = (0..cells)
        .map(|c| {
            let (j, l) = (spec.tuple(c / spec.tuples()), spec.tuple(c % spec.tuples()));
            let p = joint_prob(&spec, &JointOutcome { l: l.clone(), j: j.clone() });
            // off-support entries evaluate to rounding noise around 1e-33
            if j.iter().sum::<u32>() % d != 0 || p < 1e-12 {
                0.0
            } else {
                j_weight * p
            }
        })
        .collect();
    let chi = chi_square_gof(&observed, &expected);
    let support = expected.iter().filter(|&&e| e > 0.0).count();
    ensure(support == 81, || format!("expected 81 supported cells, got {support}"))?;
    ensure(chi.p_value >= 0.01, || format!("chi2 {:.2} dof {} p {:.4}", chi.statistic, chi.dof, chi.p_value))?;
    Ok(format!("tables exact; chi2 = {:.2} on {} dof, p = {:.3}", chi.statistic, chi.dof, chi.p_value))
}

fn attack_detection() -> Outcome {
    let mut parts = Vec::new();
    for (d, seed) in [(3u32, 701u64), (5, 702)] {
        let exact = intercept_resend_detection(d, 2, 2);
        let want = Q::new(((d - 1) * (d - 1)) as i128, (d * d) as i128);
        ensure(exact == want, || format!("oracle gave {exact}, closed form {want}"))?;
        let p = (d - 1) as f64 * (d - 1) as f64 / (d * d) as f64;

        let mut c = ProtocolConfig::new(dim(d), 2);
        c.check_fraction = 1.0;
        c.seed = seed;
        let rounds = 11_000 * d as usize;
        let rep = evaluate_attack(&c, &AdversaryConfig::new(AttackKind::InterceptResend, 2), rounds).unwrap();
        ensure(rep.n_samples >= 10_000, || format!("only {} check rounds", rep.n_samples))?;
        ensure(three_sigma(rep.detection_hits, rep.n_samples, p), || {
            format!("intercept-resend d={d}: {:.4} vs {p:.4}", rep.detection_rate)
        })?;
        parts.push(format!("IR d={d}: {:.4}≈{exact} (n={})", rep.detection_rate, rep.n_samples));
    }

    let d = 3u32;
    let exact = substitute_detection(d, 2);
    ensure(exact == Q::new(2, 3), || format!("substitute oracle {exact}"))?;
    let mut c = ProtocolConfig::new(dim(d), 2);
    c.check_fraction = 1.0;
    c.seed = 703;
    let rep = evaluate_attack(&c, &AdversaryConfig::new(AttackKind::SubstituteQudit, 1), 33_000).unwrap();
    ensure(rep.guess_rate == 1.0, || format!("substitute guess rate {}", rep.guess_rate))?;
    ensure(three_sigma(rep.detection_hits, rep.n_samples, 2.0 / 3.0), || {
        format!("substitute detection {:.4}", rep.detection_rate)
    })?;
    parts.push(format!("SQ d=3: guess 1.0, detect {:.4}≈2/3", rep.detection_rate));
    Ok(parts.join("; "))
}

fn efficiency() -> Outcome {
    let m = qkd_rounds(10, 23, 0.8).map_err(|e| e.to_string())?;
    ensure(m == 86, || format!("qkd_rounds(10, 23, 0.8) = {m}"))?;
    let mut grid = 0;
    for n in 1..=12u32 {
        for d in [2u32, 3, 5, 23] {
            for p in [0.5, 0.8, 0.95] {
                let m = qkd_rounds(n, d, p).unwrap();
                let hi = qkd_success(n, d, m).unwrap();
                let lo = if m > 1 { qkd_success(n, d, m - 1).unwrap() } else { 0.0 };
                ensure(hi >= p && lo < p, || format!("N={n} d={d} p={p}: m={m} brackets [{lo}, {hi}]"))?;
                grid += 1;
            }
        }
    }
    for n in [1u32, 5, 10] {
        for eta in [0.0, 0.5, 0.9, 1.0] {
            ensure(detection_scaling(Scheme::Ghz, n, eta).unwrap() == eta.powi(n as i32 + 1), || "ghz".into())?;
            ensure(detection_scaling(Scheme::SingleQudit, n, eta).unwrap() == eta, || "single".into())?;
            ensure(detection_scaling(Scheme::Qkd, n, eta).unwrap() == eta.powi(n as i32), || "qkd".into())?;
        }
    }
    Ok(format!("m = 86; {grid} grid points bracket; scaling exact"))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn shamir() -> Outcome {
    let mut reconstructions = 0usize;
    for p in [3u64, 5, 7, 11, 13] {
        for k in 2..=3usize {
            for n in k as u64..p.min(6) {
                let polys = p.pow(k as u32);
                for code in 0..polys {
                    let coeffs: Vec<u64> = (0..k).map(|i| code / p.pow(i as u32) % p).collect();
                    let params = ShamirParams::new(n, k, p, coeffs).unwrap();
                    let shares = shamir_share(&params);
                    for sub in subsets(n as usize, k) {
                        let pts: Vec<_> = sub.iter().map(|&i| shares[i]).collect();
                        let s = shamir_reconstruct(&pts, p).unwrap();
                        ensure(s == params.secret(), || format!("P={p} k={k} subset {sub:?}"))?;
                        reconstructions += 1;
                    }
                }
                // k-1 shares: every secret is consistent with exactly one polynomial
                for sub in subsets(n as usize, k - 1) {
                    let mut counts: HashMap<(Vec<u64>, u64), usize> = HashMap::new();
                    for code in 0..polys {
                        let coeffs: Vec<u64> = (0..k).map(|i| code / p.pow(i as u32) % p).collect();
                        let params = ShamirParams::new(n, k, p, coeffs).unwrap();
                        let vals = sub.iter().map(|&i| params.evaluate(i as u64 + 1)).collect();
                        *counts.entry((vals, params.secret())).or_default() += 1;
                    }
                    ensure(counts.len() as u64 == polys && counts.values().all(|&c| c == 1), || {
                        format!("P={p} k={k} subset {sub:?} leaks")
                    })?;
                }
            }
        }
    }
    let mut rng = seeded(909);
    for _ in 0..1000 {
        use rand::Rng;
        let p = [13u64, 101, 65_537, 2_147_483_647][rng.random_range(0..4)];
        let n = rng.random_range(2..=12u64.min(p - 1));
        let k = rng.random_range(2..=n as usize);
        let params = ShamirParams::random(n, k, p, &mut rng).unwrap();
        let shares = shamir_share(&params);
        let s = shamir_reconstruct(&shares[shares.len() - k..], p).unwrap();
        ensure(s == params.secret(), || format!("round trip failed for {params:?}"))?;
    }
    Ok(format!("{reconstructions} exhaustive reconstructions, zero-information holds, 1000 round trips"))
}

fn reproducibility() -> Outcome {
    let mut c = ProtocolConfig::new(dim(5), 4);
    c.n_rounds = 5000;
    c.seed = 1234;
    c.check_fraction = 0.3;
    c.link_noise = 0.05;
    c.corruption_threshold = 0.2;
    let a = run_session(&c, &mut TapSet::empty()).unwrap();
    let b = run_session(&c, &mut TapSet::empty()).unwrap();
    for view in [TranscriptView::Full, TranscriptView::Public] {
        let ta = to_jsonl_string(&a, view, 1);
        let tb = to_jsonl_string(&b, view, 2);
        ensure(strip_header(&ta).as_bytes() == strip_header(&tb).as_bytes(), || {
            format!("{} view differs", view.as_str())
        })?;
    }
    ensure(a.verdict == Verdict::Clean || a.verdict == Verdict::Corrupt, || unreachable!())?;
    Ok("full and public views byte-identical past the header".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 MUB algebra", mub_algebra, Some(Duration::from_secs(10))),
        ("2 valid-round rate", valid_rate, Some(Duration::from_secs(30))),
        ("3 perfect correlation", perfect_correlation, None),
        ("4 reconstruction", reconstruction, None),
        ("5 secrecy (exact enumeration)", secrecy, None),
        ("6 GHZ oracle + equivalence", ghz_oracle, None),
        ("7 attack detection", attack_detection, None),
        ("8 efficiency formulas", efficiency, None),
        ("9 Shamir baseline", shamir, None),
        ("10 reproducibility", reproducibility, None),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let took = start.elapsed();
        let result = match (result, budget) {
            (Ok(msg), Some(b)) if took > b => Err(format!("{msg}; took {took:.2?} > {b:?}")),
            (r, _) => r,
        };
        match result {
            Ok(msg) => println!("[PASS] criterion {name}: {msg} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {name}: {msg} ({took:.2?})");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
