//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//! Built without the libtest harness so the lines always appear; exits
//! nonzero if any criterion fails.

use std::process::ExitCode;

use trigl1::verify::{self, Suite, VerifyOptions};

fn main() -> ExitCode {
    // `cargo test -- --list` and filters from other targets should not
    // trigger the full run
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let opts = VerifyOptions {
        grid: std::env::var("TRIGL1_GRID").ok().and_then(|g| g.parse().ok()).unwrap_or(4096),
        ..VerifyOptions::default()
    };
    println!("acceptance: grid {}, seed {}", opts.grid, opts.seed);
    let results = verify::run_suite(Suite::All, &opts, |r| println!("{r}"));
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {} failed", results.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
