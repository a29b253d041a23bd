//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use zipper_core::verify::Suite;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for (k, suite) in Suite::ALL.into_iter().enumerate() {
        let report = suite.run();
        println!("criterion {:2}: {}", k + 1, report.summary());
        for case in report.failures().take(5) {
            println!("    {}: {}", case.label, case.detail);
        }
        if !report.passed() {
            failed.push(suite.name());
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
