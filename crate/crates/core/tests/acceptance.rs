//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Tolerances live with the criteria in `kwcopt::experiments`.
//!
//! Built without the libtest harness so the lines are never captured.

use std::process::ExitCode;
use std::time::Instant;

use kwcopt::experiments::{run_suite, SUITES};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for name in SUITES {
        let start = Instant::now();
        match run_suite(name) {
            Ok(report) => {
                println!("{} [{:.2?}]", report.line(), start.elapsed());
                if !report.passed {
                    failed.push(name);
                }
            }
            Err(e) => {
                println!("FAIL {name} error: {e}");
                failed.push(name);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", SUITES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
