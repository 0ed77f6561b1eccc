//! Acceptance suite: one `[PASS]` or `[FAIL]` line per criterion.
//!
//! Runs without the libtest harness so every line is printed as soon as its
//! check finishes. `TGHO_CHECKS=1,2,3` restricts the run to some criteria.

use std::process::ExitCode;
use std::time::Instant;

use tgho_experiments::checks::{run_checks, CheckContext};

fn main() -> ExitCode {
    let ids: Vec<u32> = std::env::var("TGHO_CHECKS")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    // `cargo test -- --list` and filters come from the libtest protocol.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let ctx = CheckContext::new();
    let start = Instant::now();
    let mut last = Instant::now();
    let lines = run_checks(&ctx, &ids, |line| {
        println!("{} ({:.0} s)", line.line(), last.elapsed().as_secs_f64());
        last = Instant::now();
    });
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed ({:.0} s)",
        lines.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
