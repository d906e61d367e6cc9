//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines reach stdout directly.
//! Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperconnect::verify::{run_suites, Suite, SuiteInput, VerificationReport, REJECTION_GAP};
use hyperconnect::SeriesOptions;

const SEED: u64 = 20_240_601;

/// One batch of seeded suite runs.
struct Batch {
    suites: &'static [Suite],
    sizes: &'static [(usize, usize)],
}

struct Run {
    reports: Vec<VerificationReport>,
    json: String,
    elapsed: Duration,
    error: Option<String>,
}

fn run(batch: &Batch) -> Run {
    let opts = SeriesOptions::with_tol(1e-12);
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut error = None;
    for &(n, draws) in batch.sizes {
        let input = SuiteInput::Random { n, draws, seed: SEED };
        if let Err(e) = run_suites(batch.suites, &input, &opts, &mut |r| reports.push(r.clone())) {
            error = Some(format!("n = {n}: {e}"));
            break;
        }
    }
    let elapsed = start.elapsed();
    let json = reports.iter().map(|r| r.to_json() + "\n").collect();
    Run {
        reports,
        json,
        elapsed,
        error,
    }
}

const REJECTED: &str = "rejected_";

/// Verdict over the reports of one identity; `None` takes every identity
/// except the rejected-variant reports.
fn verdict(run: &Run, identity: Option<&str>) -> (bool, usize, f64, f64) {
    let picked: Vec<&VerificationReport> = run
        .reports
        .iter()
        .filter(|r| match identity {
            Some(id) => r.identity == id,
            None => !r.identity.starts_with(REJECTED),
        })
        .collect();
    let pass = run.error.is_none() && !picked.is_empty() && picked.iter().all(|r| r.pass);
    let worst = picked
        .iter()
        .max_by(|a, b| (a.residual / a.tolerance).total_cmp(&(b.residual / b.tolerance)));
    let (residual, tolerance) = worst.map_or((f64::NAN, f64::NAN), |r| (r.residual, r.tolerance));
    (pass, picked.len(), residual, tolerance)
}

fn line(id: usize, name: &str, ok: bool, detail: String) -> bool {
    println!("criterion {id} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

fn summary(run: &Run, identity: Option<&str>, limit: Option<f64>) -> (bool, String) {
    let (pass, count, residual, tolerance) = verdict(run, identity);
    let secs = run.elapsed.as_secs_f64();
    let in_time = limit.is_none_or(|l| secs < l);
    let mut text = format!("{count} reports, worst residual {residual:.3e} vs tolerance {tolerance:.0e}, {secs:.1} s");
    if let Some(l) = limit {
        text += &format!(" (limit {l} s)");
    }
    if let Some(e) = &run.error {
        text += &format!(", error: {e}");
    }
    (pass && in_time, text)
}

const BATCHES: [Batch; 7] = [
    Batch {
        suites: &[Suite::Inverse],
        sizes: &[(1, 100), (2, 100), (3, 100), (4, 100), (5, 100)],
    },
    Batch {
        suites: &[Suite::Connection01, Suite::Corollary],
        sizes: &[(1, 20), (2, 20), (3, 20)],
    },
    Batch {
        suites: &[Suite::Inf0],
        sizes: &[(1, 10), (2, 5)],
    },
    Batch {
        suites: &[Suite::Propositions],
        sizes: &[(1, 10), (2, 3)],
    },
    Batch {
        suites: &[Suite::Residues],
        sizes: &[(1, 200), (2, 200), (3, 200)],
    },
    Batch {
        suites: &[Suite::Periodicity],
        sizes: &[(1, 50), (2, 50), (3, 50)],
    },
    Batch {
        suites: &[Suite::Gauss],
        sizes: &[(1, 100)],
    },
];

fn main() -> ExitCode {
    let runs: Vec<Run> = BATCHES.iter().map(run).collect();
    let mut all = true;

    let (ok, text) = summary(&runs[0], None, Some(5.0));
    all &= line(1, "inverse identity", ok, text);

    let (ok, text) = summary(&runs[1], Some("connection_01"), Some(60.0));
    all &= line(2, "0-1 connection", ok, text);
    let (ok, text) = summary(&runs[1], Some("corollary"), None);
    all &= line(3, "corollary inversion", ok, text);

    let (ok, text) = summary(&runs[2], None, Some(120.0));
    all &= line(4, "inf-0 connection by quadrature", ok, text);

    let props = &runs[3];
    let (mut ok, mut text) = summary(props, None, None);
    for id in ["rejected_holo_base_alpha_one", "rejected_nonholo_printed_factor"] {
        let (pass, count, residual, _) = verdict(props, Some(id));
        // residual is REJECTION_GAP / gap, so the smallest gap is the largest residual
        text += &format!("; {id}: {count} reports, smallest gap {:.3e}", REJECTION_GAP / residual);
        ok &= pass;
    }
    all &= line(5, "proposition integrals", ok, text);

    let (ok, text) = summary(&runs[4], None, Some(10.0));
    all &= line(6, "residue identities", ok, text);

    let (ok, text) = summary(&runs[5], None, None);
    all &= line(7, "periodicity", ok, text);

    let (ok, text) = summary(&runs[6], None, None);
    all &= line(8, "gauss cross-check", ok, text);

    let again: Vec<Run> = BATCHES.iter().map(run).collect();
    let first: String = runs.iter().map(|r| r.json.as_str()).collect();
    let second: String = again.iter().map(|r| r.json.as_str()).collect();
    let same = first == second && !first.is_empty();
    all &= line(
        9,
        "determinism",
        same,
        format!("{} bytes of JSON per run, identical: {same}", first.len()),
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
