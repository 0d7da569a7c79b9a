use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use thompson_core::suite::{
    check_names, run_check, CheckOutcome, Fixtures, Suite, DEFAULT_FIXTURES_JSON,
};

use crate::Failure;

#[derive(Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
}

#[derive(Serialize)]
struct CheckEntry {
    suite: &'static str,
    name: String,
    status: Status,
    count: u64,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

#[derive(Serialize)]
struct Summary {
    passed: usize,
    failed: usize,
}

/// Field order is fixed and no timing is recorded unless asked for, so the
/// same invocation gives the same bytes.
#[derive(Serialize)]
struct VerificationReport {
    version: &'static str,
    suite: &'static str,
    seed: u64,
    fixture_hashes: BTreeMap<&'static str, String>,
    checks: Vec<CheckEntry>,
    summary: Summary,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

fn entry(suite: &'static str, outcome: CheckOutcome, elapsed_ms: Option<u128>) -> CheckEntry {
    CheckEntry {
        suite,
        name: outcome.name,
        status: if outcome.passed {
            Status::Pass
        } else {
            Status::Fail
        },
        count: outcome.count,
        detail: outcome.detail,
        elapsed_ms,
    }
}

pub(crate) fn cmd_verify(
    suite_name: &'static str,
    suites: &[Suite],
    seed: u64,
    out: &Path,
    fixtures_path: Option<&Path>,
    timings: bool,
) -> Result<u8, Failure> {
    let started = Instant::now();
    let fixture_text = match fixtures_path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => DEFAULT_FIXTURES_JSON.to_string(),
    };
    let fixture_hashes = BTreeMap::from([(
        "fixtures.json",
        hex::encode(Sha256::digest(fixture_text.as_bytes())),
    )]);

    let checks: Vec<CheckEntry> = match serde_json::from_str::<Fixtures>(&fixture_text) {
        Err(e) => vec![CheckEntry {
            suite: "fixtures",
            name: "fixtures.load".to_string(),
            status: Status::Fail,
            count: 1,
            detail: format!("fixture file does not parse: {e}"),
            elapsed_ms: None,
        }],
        Ok(fixtures) => {
            let jobs: Vec<(Suite, usize)> = suites
                .iter()
                .flat_map(|&s| (0..check_names(s).len()).map(move |i| (s, i)))
                .collect();
            let fixtures = &fixtures;
            // each check is independent; results are collected in job order
            std::thread::scope(|scope| {
                let handles: Vec<_> = jobs
                    .iter()
                    .map(|&(s, i)| {
                        scope.spawn(move || {
                            let t = Instant::now();
                            let outcome = run_check(s, i, seed, fixtures);
                            (outcome, t.elapsed().as_millis())
                        })
                    })
                    .collect();
                jobs.iter()
                    .zip(handles)
                    .map(|(&(s, _), h)| {
                        let (outcome, ms) = h.join().expect("check thread panicked");
                        entry(s.name(), outcome, timings.then_some(ms))
                    })
                    .collect()
            })
        }
    };

    let failed = checks
        .iter()
        .filter(|c| matches!(c.status, Status::Fail))
        .count();
    for c in &checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        };
        println!("{status} {} ({} cases): {}", c.name, c.count, c.detail);
    }
    let report = VerificationReport {
        version: env!("CARGO_PKG_VERSION"),
        suite: suite_name,
        seed,
        fixture_hashes,
        summary: Summary {
            passed: checks.len() - failed,
            failed,
        },
        checks,
        status: if failed == 0 {
            Status::Pass
        } else {
            Status::Fail
        },
        elapsed_ms: timings.then(|| started.elapsed().as_millis()),
    };
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    fs::write(out, json).with_context(|| format!("writing {}", out.display()))?;
    println!(
        "{}: {} passed, {} failed; report at {} ({:.1}s)",
        suite_name,
        report.summary.passed,
        failed,
        out.display(),
        started.elapsed().as_secs_f64()
    );
    Ok(if failed == 0 { 0 } else { 1 })
}
