//! Runs every acceptance criterion and prints one line per criterion.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fracspec::suite::run_suite;

const SEED: u64 = 7;
const REPORT_BUDGET: Duration = Duration::from_secs(60);

fn report_run() -> (Vec<u8>, Duration, Option<i32>) {
    let t0 = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_fracspec"))
        .args(["report", "--seed", &SEED.to_string()])
        .output()
        .expect("fracspec binary runs");
    (out.stdout, t0.elapsed(), out.status.code())
}

fn without_timestamp(bytes: &[u8]) -> Vec<u8> {
    String::from_utf8_lossy(bytes)
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .flat_map(|l| l.bytes().chain(std::iter::once(b'\n')))
        .collect()
}

fn main() -> ExitCode {
    let mut all = true;
    let t0 = Instant::now();
    let criteria = match run_suite(SEED) {
        Ok(c) => c,
        Err(e) => {
            println!("acceptance suite aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    for c in &criteria {
        let slowest = c.timings.iter().map(|(_, d)| *d).max();
        let timing = slowest.map(|d| format!(", slowest case {:.3}s", d.as_secs_f64())).unwrap_or_default();
        println!(
            "criterion {}: {} - {} ({} checks{timing})",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.title,
            c.checks.len()
        );
        for f in c.failures() {
            println!("    failed: {} value={:e} bound={:e}", f.name, f.value, f.bound);
        }
        all &= c.pass;
    }
    println!("criteria 1-8 took {:.2}s", t0.elapsed().as_secs_f64());

    let (a, ta, code_a) = report_run();
    let (b, tb, code_b) = report_run();
    let identical = without_timestamp(&a) == without_timestamp(&b) && !a.is_empty();
    let fast = ta < REPORT_BUDGET && tb < REPORT_BUDGET;
    let exited_ok = code_a == Some(0) && code_b == Some(0);
    let pass = identical && fast && exited_ok;
    println!(
        "criterion 9: {} - report determinism (identical={identical}, exit ok={exited_ok}, runs {:.2}s and {:.2}s, budget {}s)",
        if pass { "PASS" } else { "FAIL" },
        ta.as_secs_f64(),
        tb.as_secs_f64(),
        REPORT_BUDGET.as_secs()
    );
    all &= pass;

    if all {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
